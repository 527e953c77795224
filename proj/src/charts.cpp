#include "qcnf/charts.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <boost/math/tools/roots.hpp>

namespace qcnf {

using std::numbers::pi;

namespace {

// Margin kept from the ends of a family's energy interval.
constexpr double kRangeMargin = 1e-9;

void check_side(int k)
{
    if (k != 1 && k != -1) throw std::invalid_argument("k must be +1 or -1");
}

} // namespace

EtValues et_forward(double E, double r, double tau)
{
    const auto d = level_data(E, r);
    const double theta = d.sigma * tau;
    const auto jet = breve_G_jet(d.kappa, theta);
    EtValues out;
    out.G = d.sigma * jet.G;
    // dG/dtau = r sqrt(1 - G^2) sin g and E - G^2 = r sqrt(1 - G^2) cos g share
    // a positive factor; +0.0 keeps g = pi rather than -pi at the top.
    out.g = std::atan2(d.alpha_plus * jet.G3 + 0.0, E - out.G * out.G);
    out.rho = -E * tau / r + d.sigma / r * rho_funcs(d.kappa, theta).rho_hat;
    return out;
}

Vec4 phi_et(const Vec4& et)
{
    const auto [Rcal, E, r, tau] = et;
    const auto v = et_forward(E, r, tau);
    return {Rcal + v.rho, v.G, r, v.g};
}

Vec4 et_inverse(const Vec4& delaunay)
{
    const auto [R, G, r, g] = delaunay;
    const double E = euler_E(r, G, g);
    const auto d = level_data(E, r);
    if (d.kappa > 0 && G < 0) throw std::domain_error("point on the G < 0 mirror component of a level with kappa > 0");

    // (alpha_+ - G^2)(G^2 - alpha_-) = r^2 (1 - G^2) sin^2 g: the smaller factor
    // is recovered from the product to keep its relative accuracy.
    const double s = std::sin(g);
    const double product = r * r * (1.0 - G * G) * s * s;
    double upper = d.alpha_plus - G * G;
    double lower = G * G - d.alpha_minus;
    if (upper < lower)
        upper = lower > 0 ? product / lower : 0.0;
    else
        lower = upper > 0 ? product / upper : 0.0;

    const double theta =
        breve_theta(d.kappa, G / d.sigma, upper / d.alpha_plus, lower / d.alpha_plus);
    const double tau = (s > 0 ? -1.0 : 1.0) * theta / d.sigma;
    const double rho = -E * tau / r + d.sigma / r * rho_funcs(d.kappa, d.sigma * tau).rho_hat;
    return {R - rho, E, r, tau};
}

std::pair<double, double> family_range(Motion family, double r)
{
    if (!(r > 0.0) || r == 2.0) throw std::invalid_argument("r must be positive and not 2");
    switch (family) {
    case Motion::LibrationMinimum: return {-r, std::min(r, 1.0)};
    case Motion::Rotation: return r < 1.0 ? std::pair{r, 1.0} : std::pair{0.0, 0.0};
    case Motion::LibrationCentral: return r > 1.0 ? std::pair{1.0, std::min(r, E_max(r))} : std::pair{0.0, 0.0};
    case Motion::LibrationSide: return r < 2.0 ? std::pair{std::max(r, 1.0), E_max(r)} : std::pair{0.0, 0.0};
    }
    return {0.0, 0.0};
}

Motion separatrix_family(double r, int k)
{
    check_side(k);
    if (!(r > 0.0 && r < 2.0) || r == 1.0) throw std::invalid_argument("separatrix E = r needs 0 < r < 2, r != 1");
    if (k > 0) return r < 1.0 ? Motion::Rotation : Motion::LibrationSide;
    return r < 1.0 ? Motion::LibrationMinimum : Motion::LibrationCentral;
}

double energy_of_action(double A, double r, Motion family)
{
    const auto [lo_end, hi_end] = family_range(family, r);
    if (!(lo_end < hi_end)) throw std::out_of_range(to_string(family) + " does not occur at this r");
    const double lo = lo_end + kRangeMargin * std::max(1.0, std::abs(lo_end));
    const double hi = hi_end - kRangeMargin * std::max(1.0, std::abs(hi_end));
    const auto f = [&](double E) { return level_data(E, r).action - A; };
    const double f_lo = f(lo), f_hi = f(hi);
    if (!(f_lo <= 0.0 && f_hi >= 0.0))
        throw std::out_of_range("action " + std::to_string(A) + " outside the " + to_string(family) + " band at r = " +
                                std::to_string(r));
    if (f_lo == 0.0) return lo;
    if (f_hi == 0.0) return hi;
    // Newton on dA/dE = tau_p / pi, seeded by linear interpolation; Boost
    // bisects whenever a step leaves the bracket.
    const auto f_and_slope = [&](double E) {
        const auto d = level_data(E, r);
        return std::pair{d.action - A, d.tau_p / pi};
    };
    const double guess = lo + (hi - lo) * (-f_lo) / (f_hi - f_lo);
    return boost::math::tools::newton_raphson_iterate(f_and_slope, guess, lo, hi, 50);
}

Vec4 aa_forward(const Vec4& et)
{
    const auto [Rcal, E, r, tau] = et;
    const auto d = level_data(E, r);
    return {Rcal + d.B * tau, d.action, r, pi * tau / d.tau_p};
}

Vec4 aa_inverse(const Vec4& star, Motion family)
{
    const auto [Rs, A, rs, phi] = star;
    const double E = energy_of_action(A, rs, family);
    const auto d = level_data(E, rs);
    const double tau = phi * d.tau_p / pi;
    return {Rs - d.B * tau, E, rs, tau};
}

Vec4 rg_forward(const Vec4& reg, int k)
{
    check_side(k);
    const auto [Y, A, y, phi] = reg;
    const double grow = std::exp(k * y);
    return {Y * grow, A, -k / grow + r_s(A), phi + Y * grow * r_s_prime(A)};
}

Vec4 rg_inverse(const Vec4& star, int k)
{
    check_side(k);
    const auto [Rs, A, rs, phi] = star;
    const double gap = k * (r_s(A) - rs);
    if (!(gap > 0.0)) throw std::domain_error("point on the wrong side of the separatrix for k = " + std::to_string(k));
    const double y = -k * std::log(gap);
    return {Rs * gap, A, y, phi - Rs * r_s_prime(A)};
}

namespace {

struct LevelAtAction {
    double E, sigma, kappa, Tp_hat, calA;
};

LevelAtAction level_at_action(double A, double r_star, Motion family)
{
    const double E = energy_of_action(A, r_star, family);
    const auto roots = level_roots(E, r_star);
    return {E, roots.sigma, roots.kappa, Tp_of(roots.kappa) / pi, calA(roots.kappa)};
}

// G* and rho* only, for the A-differences.
std::pair<double, double> star_values(double A, double r_star, double psi, Motion family)
{
    const auto l = level_at_action(A, r_star, family);
    const double theta = l.Tp_hat * psi;
    return {l.sigma * breve_G(l.kappa, theta), l.sigma / r_star * rho_funcs(l.kappa, theta).rho_breve};
}

} // namespace

StarFields star_fields(double A, double r_star, double psi, Motion family)
{
    const auto l = level_at_action(A, r_star, family);
    const double theta = l.Tp_hat * psi;
    const auto jet = breve_G_jet(l.kappa, theta);
    StarFields s;
    s.E = l.E;
    s.sigma = l.sigma;
    s.kappa = l.kappa;
    s.Tp_hat = l.Tp_hat;
    s.calA = l.calA;
    s.G = l.sigma * jet.G;
    s.rho = l.sigma / r_star * rho_funcs(l.kappa, theta).rho_breve;
    s.G3 = l.sigma * l.Tp_hat * jet.G3;
    s.rho3 = l.sigma / r_star * l.Tp_hat * (jet.G * jet.G - l.calA);

    const double h = 1e-6 * std::max(1.0, std::abs(A));
    const auto up = star_values(A + h, r_star, psi, family);
    const auto down = star_values(A - h, r_star, psi, family);
    s.G1 = (up.first - down.first) / (2.0 * h);
    s.rho1 = (up.second - down.second) / (2.0 * h);
    return s;
}

double psi_zero(double A, double r_star, Motion family)
{
    const auto l = level_at_action(A, r_star, family);
    return theta_star(l.kappa) / l.Tp_hat;
}

double symplectic_defect(const Map4& map, const Vec4& point, double h)
{
    Eigen::Matrix4d J;
    for (int i = 0; i < 4; ++i) {
        const double step = h * std::max(1.0, std::abs(point[i]));
        Vec4 up = point, down = point;
        up[i] += step;
        down[i] -= step;
        const Vec4 fu = map(up), fd = map(down);
        for (int j = 0; j < 4; ++j) {
            // The last slot is an angle in every chart; undo wraps across +-pi.
            const double diff = j == 3 ? std::remainder(fu[j] - fd[j], 2.0 * pi) : fu[j] - fd[j];
            J(j, i) = diff / (2.0 * step);
        }
    }
    Eigen::Matrix4d omega = Eigen::Matrix4d::Zero();
    omega.topRightCorner<2, 2>() = Eigen::Matrix2d::Identity();
    omega.bottomLeftCorner<2, 2>() = -Eigen::Matrix2d::Identity();
    return (J.transpose() * omega * J - omega).cwiseAbs().maxCoeff();
}

} // namespace qcnf
