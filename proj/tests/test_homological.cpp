#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "qcnf/homological.hpp"

using namespace qcnf;

namespace {

DomainPtr domain(int K = 6, int nI = 8, int ny = 24, Interval Y = {0.0, 1.0})
{
    DomainSpec s;
    s.I_interval = {0.0, 1.0};
    s.Y_interval = Y;
    s.grid_I = nI;
    s.grid_y = ny;
    s.K_max = K;
    return Domain::make(s);
}

DriverField constant_driver(const DomainPtr& dom, double v, double w)
{
    return DriverField::make(ScalarField::constant(dom, v), ScalarField::constant(dom, w));
}

double sup_diff(const ScalarField& f, const ScalarField& g)
{
    return sup_norm(f - g);
}

ScalarField random_field(const DomainPtr& dom, std::mt19937& rng, int kmax, double scale)
{
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    std::vector<double> a(kmax + 1), b(kmax + 1), c(kmax + 1), d(kmax + 1);
    for (int k = 0; k <= kmax; ++k) {
        a[k] = U(rng) / (1 + k * k);
        b[k] = U(rng) / (1 + k * k);
        c[k] = U(rng);
        d[k] = U(rng);
    }
    return make_field(dom, [=](double I, double y, double p) {
        double v = 0.0;
        for (int k = 0; k <= kmax; ++k)
            v += (a[k] * std::cos(k * p) + b[k] * std::sin(k * p)) * (1 + 0.5 * c[k] * std::sin(y + I) + 0.3 * d[k] * I * y);
        return scale * v;
    });
}

} // namespace

TEST(OpF, PlainPrimitive)
{
    auto dom = domain();
    auto drv = constant_driver(dom, 1.0, 0.0);
    auto Y = op_F(drv, ScalarField::constant(dom, 1.0));
    auto expect = make_field(dom, [&](double, double y, double) { return y - drv.y0; });
    EXPECT_LT(sup_diff(Y, expect), 1e-13);

    auto c = make_field(dom, [](double, double, double p) { return std::cos(p); });
    auto Yc = op_F(drv, c);
    auto ec = make_field(dom, [&](double, double y, double p) { return (y - drv.y0) * std::cos(p); });
    EXPECT_LT(sup_diff(Yc, ec), 1e-13);
}

TEST(OpF, ResidualOfFirstLine)
{
    auto dom = domain();
    auto drv = constant_driver(dom, 2.0, 1.0);
    auto g = make_field(dom, [](double, double, double p) { return std::cos(p); });
    auto Y = op_F(drv, g);
    auto res = mul_Iy(d_y(Y), drv.v) + mul_Iy(d_psi(Y), drv.omega) - g;
    EXPECT_LT(sup_norm(res), 1e-8);
}

TEST(OpF, RejectsSingularDriver)
{
    auto dom = domain();
    EXPECT_THROW(DriverField::make(ScalarField::constant(dom, 1e-9), ScalarField::zero(dom)), SingularDriver);
}

TEST(OpG, ReducesToOpFForConstantSpeed)
{
    auto dom = domain();
    auto drv = constant_driver(dom, 1.0, 0.4);
    std::mt19937 rng(1);
    auto g = random_field(dom, rng, 4, 1.0);
    EXPECT_LT(sup_diff(op_G(drv, g), op_F(drv, g)), 1e-13);
}

TEST(OpG, ClosedFormQuadrature)
{
    auto dom = domain();
    auto v = make_field_Iy(dom, [](double, double y) { return std::exp(y); });
    auto drv = DriverField::make(v, ScalarField::zero(dom));
    auto G = op_G(drv, ScalarField::constant(dom, 1.0));
    const double y0 = drv.y0;
    auto expect = make_field(dom, [&](double, double y, double) {
        return 0.5 * std::exp(y) * (std::exp(-2 * y0) - std::exp(-2 * y));
    });
    EXPECT_LT(sup_diff(G, expect), 1e-12);
}

TEST(OpG, ZeroAverageInZeroAverageOut)
{
    auto dom = domain();
    auto v = make_field_Iy(dom, [](double I, double y) { return 1.2 + 0.1 * std::sin(y) + 0.1 * I; });
    auto w = make_field_Iy(dom, [](double, double y) { return 0.3 + 0.1 * y; });
    auto drv = DriverField::make(v, w);
    auto g = make_field(dom, [](double, double y, double p) { return std::cos(p + y) + 0.2 * std::sin(3 * p); });
    EXPECT_LT(sup_norm(average(op_G(drv, g))), 1e-14);
    EXPECT_LT(sup_norm(average(op_F(drv, g))), 1e-14);
}

TEST(SolveHomological, StructureWhenZIsN)
{
    auto dom = domain();
    auto v = make_field_Iy(dom, [](double, double y) { return 1.5 + 0.2 * std::tanh(y); });
    auto w = make_field_Iy(dom, [](double, double y) { return 0.1 * std::exp(-y); });
    auto drv = DriverField::make(v, w);
    auto sol = solve_homological(drv, drv.as_vector());
    EXPECT_LT(sup_norm(sol.Y[0]), 1e-15);
    EXPECT_LT(sup_diff(sol.Y[1], op_G(drv, v)), 1e-14);
    EXPECT_LT(sol.relative_residual, 1e-8);
}

TEST(SolveHomological, FlatDriver)
{
    auto dom = domain();
    auto drv = constant_driver(dom, 1.0, 0.0);
    auto c = make_field(dom, [](double, double, double p) { return std::cos(p); });
    VectorField3 Z(c, ScalarField::zero(dom), ScalarField::zero(dom));
    auto sol = solve_homological(drv, Z);
    auto e1 = make_field(dom, [&](double, double y, double p) { return (y - drv.y0) * std::cos(p); });
    EXPECT_LT(sup_diff(sol.Y[0], e1), 1e-13);
    EXPECT_LT(sup_norm(sol.Y[1]), 1e-14);
    EXPECT_LT(sup_norm(sol.Y[2]), 1e-14);
}

TEST(SolveHomological, RandomInstancesResidual)
{
    auto dom = domain(6, 8, 24);
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int n = 0; n < 20; ++n) {
        const double a = U(rng), b = U(rng), c = U(rng);
        auto v = make_field_Iy(dom, [=](double I, double y) { return 1.0 + 0.1 * std::cos(a * y + b * I) + 0.05 * c; });
        auto w = make_field_Iy(dom, [=](double I, double y) { return 0.3 + 0.1 * b * y + 0.05 * a * I; });
        auto drv = DriverField::make(v, w);
        VectorField3 Z(random_field(dom, rng, 4, 0.3), random_field(dom, rng, 4, 0.3), random_field(dom, rng, 4, 0.3));
        auto sol = solve_homological(drv, Z);
        EXPECT_LT(sol.relative_residual, 1e-6);
        EXPECT_FALSE(sol.needs_refinement);
    }
}

TEST(OperatorBounds, LemmaEstimatesOnRandomInputs)
{
    auto dom = domain(6, 6, 24);
    std::mt19937 rng(12);
    auto v = make_field_Iy(dom, [](double I, double y) { return 1.0 + 0.3 * y + 0.1 * I; });
    auto w = make_field_Iy(dom, [](double, double y) { return 0.5 * y; });
    auto drv = DriverField::make(v, w);
    const double diam = dom->spec().diam_y();
    auto inv_v = map_Iy(v, [](double x) { return 1.0 / x; });
    const double s2 = diam * sup_norm(mul_Iy(d_y(v), inv_v));
    for (int n = 0; n < 10; ++n) {
        auto g = random_field(dom, rng, 4, 1.0);
        const double gv = sup_norm(mul_Iy(g, inv_v));
        EXPECT_LE(sup_norm(op_F(drv, g)), diam * gv * (1 + 1e-12));
        EXPECT_LE(sup_norm(op_G(drv, g)), std::exp(s2) * diam * gv * (1 + 1e-12));
    }
}

TEST(LieBracket, Examples)
{
    auto dom = domain(4, 6, 12);
    std::mt19937 rng(13);
    VectorField3 X(random_field(dom, rng, 3, 1), random_field(dom, rng, 3, 1), random_field(dom, rng, 3, 1));
    auto XX = lie_bracket(X, X);
    for (int i = 0; i < 3; ++i) EXPECT_LT(sup_norm(XX[i]), 1e-12);

    VectorField3 c(ScalarField::constant(dom, 1), ScalarField::constant(dom, 2), ScalarField::constant(dom, 3));
    VectorField3 d(ScalarField::constant(dom, -1), ScalarField::constant(dom, 0.5), ScalarField::zero(dom));
    auto cd = lie_bracket(c, d);
    for (int i = 0; i < 3; ++i) EXPECT_LT(sup_norm(cd[i]), 1e-12);

    VectorField3 Y(ScalarField::zero(dom), ScalarField::constant(dom, 1), ScalarField::zero(dom));
    VectorField3 Xy(ScalarField::zero(dom), ScalarField::zero(dom), make_field_Iy(dom, [](double, double y) { return y; }));
    auto b = lie_bracket(Y, Xy);
    EXPECT_LT(sup_norm(b[0]), 1e-13);
    EXPECT_LT(sup_norm(b[1]), 1e-13);
    EXPECT_LT(sup_norm(b[2] - ScalarField::constant(dom, 1)), 1e-12);
}

TEST(LieBracket, JacobiIdentity)
{
    auto dom = domain(6, 10, 16);
    std::mt19937 rng(14);
    for (int n = 0; n < 5; ++n) {
        auto rv = [&] { return VectorField3(random_field(dom, rng, 2, 1), random_field(dom, rng, 2, 1), random_field(dom, rng, 2, 1)); };
        auto A = rv(), B = rv(), C = rv();
        auto J = lie_bracket(A, lie_bracket(B, C)) + lie_bracket(B, lie_bracket(C, A)) + lie_bracket(C, lie_bracket(A, B));
        for (int i = 0; i < 3; ++i) EXPECT_LT(sup_norm(J[i]), 1e-8);
    }
}

TEST(LieBracket, IteratedGrowth)
{
    // |L_Y^k X| <= 3^k k! q0^k |X| with q0 = |||Y|||^w_u
    auto dom = domain(8, 6, 12);
    std::mt19937 rng(15);
    const Widths u{0, 0, 0.0};
    const Weights w{1, 1, 1};
    VectorField3 Y(random_field(dom, rng, 2, 0.05), random_field(dom, rng, 2, 0.05), random_field(dom, rng, 2, 0.05));
    VectorField3 X(random_field(dom, rng, 2, 1), random_field(dom, rng, 2, 1), random_field(dom, rng, 2, 1));
    const double q0 = vf_norm(Y, u, w), xn = vf_norm(X, u, w);
    VectorField3 T = X;
    double fact = 1.0;
    for (int k = 1; k <= 5; ++k) {
        T = lie_bracket(Y, T);
        fact *= k;
        EXPECT_LE(vf_norm(T, u, w), std::pow(3 * q0, k) * fact * xn);
    }
}

TEST(LieTransform, Examples)
{
    auto dom = domain(4, 6, 12);
    std::mt19937 rng(16);
    VectorField3 X(random_field(dom, rng, 2, 1), random_field(dom, rng, 2, 1), random_field(dom, rng, 2, 1));
    auto id = lie_transform(VectorField3::zero(dom), X, {}, {1, 1, 1}, 1e-12);
    for (int i = 0; i < 3; ++i) EXPECT_EQ(sup_norm(id.increment[i]), 0.0);

    VectorField3 c(ScalarField::constant(dom, 0.01), ScalarField::constant(dom, 0.02), ScalarField::zero(dom));
    VectorField3 d(ScalarField::constant(dom, 1), ScalarField::constant(dom, 2), ScalarField::constant(dom, 3));
    auto cd = lie_transform(c, d, {}, {1, 1, 1}, 1e-12);
    for (int i = 0; i < 3; ++i) EXPECT_LT(sup_norm(cd.increment[i]), 1e-14);

    auto half = lie_series(c, X, 0.5, [](const VectorField3& Z) { return vf_sup_norm(Z, {1, 1, 1}); }, 1e-300, 6);
    EXPECT_LE(half.tail_bound, std::pow(0.5, half.terms) / 0.5);

    VectorField3 big(ScalarField::constant(dom, 1), ScalarField::zero(dom), ScalarField::zero(dom));
    EXPECT_THROW(lie_transform(big, X, {}, {1, 1, 1}, 1e-12), std::domain_error);
}
