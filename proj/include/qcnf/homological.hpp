#pragma once

#include <functional>
#include <stdexcept>

#include "qcnf/field.hpp"

namespace qcnf {

struct SingularDriver : std::domain_error {
    using std::domain_error::domain_error;
};

// Unperturbed field N = v(I, y) d/dy + omega(I, y) d/dpsi.
struct DriverField {
    ScalarField v;
    ScalarField omega;
    double y0 = 0.0;
    double v_floor = 1e-6;

    static DriverField make(ScalarField v, ScalarField omega, double v_floor = 1e-6);
    void validate() const;
    VectorField3 as_vector() const;
    const DomainPtr& domain() const { return v.domain(); }
};

// Solves v dY/dy + omega dY/dpsi = g with Y = 0 at y = y0.
ScalarField op_F(const DriverField& drv, const ScalarField& g);
// Solves v dY/dy + omega dY/dpsi - (dv/dy) Y = g with Y = 0 at y = y0,
// through G[g] = v F[g / v].
ScalarField op_G(const DriverField& drv, const ScalarField& g);

struct HomologicalSolution {
    VectorField3 Y;
    double residual_sup = 0.0;   // sup of [N, Y] - Z
    double relative_residual = 0.0;
    bool needs_refinement = false;
};

HomologicalSolution solve_homological(const DriverField& drv, const VectorField3& Z, double tol = 1e-6);

// [Y, X] = J_X Y - J_Y X
VectorField3 lie_bracket(const VectorField3& Y, const VectorField3& X);

struct LieSeries {
    VectorField3 increment;   // e^{L_Y} X - X
    int terms = 0;
    double q = 0.0;
    double tail_bound = 0.0;  // q^m / (1 - q) relative to the norm of X
};

using VfNorm = std::function<double(const VectorField3&)>;

// Partial sum of sum_k L_Y^k X / k!, stopped once the geometric tail
// estimate or the observed terms fall below tol (relative to X).
LieSeries lie_series(const VectorField3& Y, const VectorField3& X, double q, const VfNorm& norm, double tol,
                     int max_terms = 80);

// Analytic-norm front end: q = 3 |||Y|||^w_u, refuses q >= 1.
LieSeries lie_transform(const VectorField3& Y, const VectorField3& X, const Widths& u, const Weights& w,
                        double tol);

} // namespace qcnf
