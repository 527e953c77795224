#include "qcnf/homological.hpp"

#include <cmath>
#include <string>

namespace qcnf {

DriverField DriverField::make(ScalarField v, ScalarField omega, double v_floor)
{
    DriverField d;
    d.y0 = v.domain()->y0();
    d.v = std::move(v);
    d.omega = std::move(omega);
    d.v_floor = v_floor;
    d.validate();
    return d;
}

void DriverField::validate() const
{
    require_same_domain(v, omega, "DriverField");
    if (!v.psi_independent(1e-14) || !omega.psi_independent(1e-14))
        throw std::invalid_argument("DriverField: v and omega must not depend on psi");
    const int K = v.domain()->K();
    const double vmin = v.coeffs().row(K).cwiseAbs().minCoeff();
    if (!(vmin > v_floor))
        throw SingularDriver("DriverField: min |v| = " + std::to_string(vmin) + " is below the floor");
    if (std::abs(y0 - v.domain()->y0()) > 0.0)
        throw std::invalid_argument("DriverField: y0 must be the base point of the y grid");
}

VectorField3 DriverField::as_vector() const
{
    return {ScalarField::zero(domain()), v, omega};
}

ScalarField op_F(const DriverField& drv, const ScalarField& g)
{
    drv.validate();
    require_same_domain(drv.v, g, "op_F");
    const auto& dom = g.domain();
    const int K = dom->K(), ny = dom->ny(), nI = dom->nI();
    const Eigen::MatrixXd QT = dom->grid_y().cumint().transpose();

    Eigen::RowVectorXd inv_v(dom->points()), wv(dom->points());
    for (int j = 0; j < dom->points(); ++j) {
        inv_v(j) = 1.0 / drv.v.coeffs()(K, j).real();
        wv(j) = drv.omega.coeffs()(K, j).real() * inv_v(j);
    }

    ScalarField out = ScalarField::zero(dom);
    Eigen::MatrixXcd phase(2 * K + 1, ny);
    for (int iI = 0; iI < nI; ++iI) {
        const Eigen::RowVectorXd phi = wv.segment(iI * ny, ny) * QT;
        for (int k = -K; k <= K; ++k)
            for (int iy = 0; iy < ny; ++iy) phase(k + K, iy) = std::polar(1.0, k * phi(iy));
        Eigen::MatrixXcd h = g.coeffs().middleCols(iI * ny, ny);
        h = h * inv_v.segment(iI * ny, ny).asDiagonal();
        h = h.cwiseProduct(phase);
        out.coeffs().middleCols(iI * ny, ny) = (h * QT).cwiseProduct(phase.conjugate());
    }
    return out;
}

ScalarField op_G(const DriverField& drv, const ScalarField& g)
{
    const ScalarField inv_v = map_Iy(drv.v, [](double x) { return 1.0 / x; });
    return mul_Iy(op_F(drv, mul_Iy(g, inv_v)), drv.v);
}

HomologicalSolution solve_homological(const DriverField& drv, const VectorField3& Z, double tol)
{
    const ScalarField dIv = d_I(drv.v), dIw = d_I(drv.omega), dyw = d_y(drv.omega);
    HomologicalSolution sol;
    ScalarField Y1 = op_F(drv, Z[0]);
    ScalarField Y2 = op_G(drv, Z[1] + mul_Iy(Y1, dIv));
    ScalarField Y3 = op_F(drv, Z[2] + mul_Iy(Y1, dIw) + mul_Iy(Y2, dyw));
    sol.Y = VectorField3(std::move(Y1), std::move(Y2), std::move(Y3));

    const VectorField3 R = lie_bracket(drv.as_vector(), sol.Y) - Z;
    double zs = 0.0;
    for (int i = 0; i < 3; ++i) {
        sol.residual_sup = std::max(sol.residual_sup, sup_norm(R[i]));
        zs = std::max(zs, sup_norm(Z[i]));
    }
    sol.relative_residual = zs > 0 ? sol.residual_sup / zs : sol.residual_sup;
    sol.needs_refinement = sol.relative_residual > tol;
    return sol;
}

namespace {

bool is_zero(const ScalarField& f)
{
    return f.coeffs().cwiseAbs().maxCoeff() == 0.0;
}

// Directional derivative sum_j Y_j d_j f.
ScalarField transport(const VectorField3& Y, const ScalarField& f)
{
    ScalarField out = ScalarField::zero(f.domain());
    if (is_zero(f)) return out;
    if (!is_zero(Y[0])) out += mul(Y[0], d_I(f));
    if (!is_zero(Y[1])) out += mul(Y[1], d_y(f));
    if (!is_zero(Y[2]) && !f.psi_independent()) out += mul(Y[2], d_psi(f));
    return out;
}

} // namespace

VectorField3 lie_bracket(const VectorField3& Y, const VectorField3& X)
{
    VectorField3 out = VectorField3::zero(X.domain());
    for (int i = 0; i < 3; ++i) out[i] = transport(Y, X[i]) - transport(X, Y[i]);
    return out;
}

LieSeries lie_series(const VectorField3& Y, const VectorField3& X, double q, const VfNorm& norm, double tol,
                     int max_terms)
{
    LieSeries res;
    res.q = q;
    res.increment = VectorField3::zero(X.domain());
    const double xn = norm(X);
    if (xn == 0.0 || norm(Y) == 0.0) return res;
    VectorField3 term = X;
    int small_terms = 0;
    for (int k = 1; k <= max_terms; ++k) {
        term = lie_bracket(Y, term);
        term *= 1.0 / k;
        res.increment += term;
        res.terms = k;
        res.tail_bound = q < 1.0 ? std::pow(q, k + 1) / (1.0 - q) : INFINITY;
        const double tn = norm(term) / xn;
        small_terms = tn < tol ? small_terms + 1 : 0;
        if (res.tail_bound < tol || small_terms >= 2) break;
    }
    return res;
}

LieSeries lie_transform(const VectorField3& Y, const VectorField3& X, const Widths& u, const Weights& w,
                        double tol)
{
    const double q = 3.0 * vf_norm(Y, u, w);
    if (!(q < 1.0))
        throw std::domain_error("lie_transform: q = " + std::to_string(q) + " >= 1, Lie series may diverge");
    return lie_series(Y, X, q, [&](const VectorField3& Z) { return vf_norm(Z, u, w); }, tol);
}

} // namespace qcnf
