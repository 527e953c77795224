#include "qcnf/chebyshev.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qcnf {

namespace {

// Antiderivative of T_k evaluated at t (any fixed constant is fine,
// it cancels once the base point is subtracted).
double cheb_antideriv(int k, double t)
{
    auto T = [t](int m) { return std::cos(m * std::acos(std::clamp(t, -1.0, 1.0))); };
    if (k == 0) return t;
    if (k == 1) return 0.5 * t * t;
    return T(k + 1) / (2.0 * (k + 1)) - T(k - 1) / (2.0 * (k - 1));
}

} // namespace

ChebGrid::ChebGrid(double a, double b, int n, double base)
    : a_(a), b_(b), base_(base), n_(n)
{
    if (n < 2) throw std::invalid_argument("ChebGrid: need at least 2 nodes");
    if (!(b > a)) throw std::invalid_argument("ChebGrid: empty interval");
    const int N = n - 1;
    const double half = 0.5 * (b - a);
    t_.resize(n);
    x_.resize(n);
    bw_.resize(n);
    for (int j = 0; j < n; ++j) {
        t_(j) = -std::cos(std::numbers::pi * j / N);
        x_(j) = a + half * (t_(j) + 1.0);
        bw_(j) = (j % 2 == 0 ? 1.0 : -1.0) * ((j == 0 || j == N) ? 0.5 : 1.0);
    }

    // Differentiation matrix from the barycentric formula, diagonal by
    // negative row sums.
    D_.setZero(n, n);
    for (int i = 0; i < n; ++i) {
        double rowsum = 0.0;
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            D_(i, j) = (bw_(j) / bw_(i)) / (t_(i) - t_(j));
            rowsum += D_(i, j);
        }
        D_(i, i) = -rowsum;
    }
    D_ /= half;

    // Cumulative integration through the Chebyshev coefficient space.
    Eigen::MatrixXd V(n, n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k)
            V(i, k) = std::cos(k * std::acos(std::clamp(t_(i), -1.0, 1.0)));
    const double t0 = (base - a) / half - 1.0;
    Eigen::MatrixXd W(n, n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k)
            W(i, k) = cheb_antideriv(k, t_(i)) - cheb_antideriv(k, t0);
    Q_ = half * W * V.partialPivLu().inverse();
}

Eigen::RowVectorXd ChebGrid::interp_row(double x) const
{
    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(n_);
    const double t = (x - a_) / (0.5 * (b_ - a_)) - 1.0;
    double denom = 0.0;
    for (int j = 0; j < n_; ++j) {
        const double d = t - t_(j);
        if (std::abs(d) < 1e-15) {
            row.setZero();
            row(j) = 1.0;
            return row;
        }
        row(j) = bw_(j) / d;
        denom += row(j);
    }
    return row / denom;
}

} // namespace qcnf
