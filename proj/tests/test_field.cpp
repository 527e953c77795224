#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "qcnf/field.hpp"

using namespace qcnf;

namespace {

DomainPtr small_domain(int K = 8, int n = 12)
{
    DomainSpec s;
    s.I_interval = {0.0, 1.0};
    s.Y_interval = {-0.5, 0.5};
    s.grid_I = n;
    s.grid_y = n;
    s.K_max = K;
    return Domain::make(s);
}

// Random real trig polynomial in psi with smooth (I, y) profiles.
ScalarField random_trig(const DomainPtr& dom, std::mt19937& rng, int kmax)
{
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    std::vector<double> a(kmax + 1), b(kmax + 1), cI(kmax + 1), cy(kmax + 1);
    for (int k = 0; k <= kmax; ++k) {
        a[k] = U(rng);
        b[k] = U(rng);
        cI[k] = U(rng);
        cy[k] = U(rng);
    }
    return make_field(dom, [=](double I, double y, double psi) {
        double v = 0.0;
        for (int k = 0; k <= kmax; ++k)
            v += (a[k] + 0.3 * cI[k] * I + 0.2 * cy[k] * y * y) * std::cos(k * psi) + b[k] * std::sin(k * psi);
        return v;
    });
}

} // namespace

TEST(MakeField, ConstantHasOnlyZeroMode)
{
    auto dom = small_domain();
    auto f = make_field(dom, [](double, double, double) { return 1.0; });
    for (int k = -8; k <= 8; ++k)
        for (int j = 0; j < dom->points(); ++j)
            EXPECT_NEAR(std::abs(f.coeffs()(k + 8, j) - cplx(k == 0 ? 1.0 : 0.0)), 0.0, 1e-14);
}

TEST(MakeField, CosineSplitsIntoTwoHalves)
{
    auto dom = small_domain();
    auto f = make_field(dom, [](double, double, double p) { return std::cos(p); });
    EXPECT_NEAR(std::abs(f.coeff(1, 3, 4) - 0.5), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(f.coeff(-1, 3, 4) - 0.5), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(f.coeff(2, 3, 4)), 0.0, 1e-14);
}

TEST(MakeField, ReevaluatesAtRandomPoints)
{
    DomainSpec s;
    s.I_interval = {0.0, 1.0};
    s.Y_interval = {0.0, 1.0};
    s.grid_I = 8;
    s.grid_y = 24;
    s.K_max = 4;
    auto dom = Domain::make(s);
    auto f = make_field(dom, [](double, double y, double p) { return std::exp(y) * std::sin(p); });
    std::mt19937 rng(1);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    double err = 0.0;
    for (int n = 0; n < 100; ++n) {
        const double I = U(rng), y = U(rng), p = 2 * std::numbers::pi * U(rng);
        err = std::max(err, std::abs(f.eval(I, y, p) - std::exp(y) * std::sin(p)));
    }
    EXPECT_LT(err, 1e-12);
}

TEST(MakeField, RejectsNonFinite)
{
    auto dom = small_domain();
    EXPECT_THROW(make_field(dom, [](double, double, double) { return NAN; }), std::domain_error);
}

TEST(WeightedNorm, Examples)
{
    auto dom = small_domain();
    auto one = ScalarField::constant(dom, 1.0);
    EXPECT_NEAR(weighted_norm(one, {0, 0, 3.0}), 1.0, 1e-14);
    auto c = make_field(dom, [](double, double, double p) { return std::cos(p); });
    EXPECT_NEAR(weighted_norm(c, {0, 0, std::log(2.0)}), 2.0, 1e-12);
}

TEST(WeightedNorm, MatchesBruteForceCoefficientSum)
{
    auto dom = small_domain();
    std::mt19937 rng(2);
    auto f = random_trig(dom, rng, 5);
    double brute = 0.0;
    for (int k = -8; k <= 8; ++k) {
        double m = 0.0;
        for (int iI = 0; iI < dom->nI(); ++iI)
            for (int iy = 0; iy < dom->ny(); ++iy) m = std::max(m, std::abs(f.coeff(k, iI, iy)));
        brute += m;
    }
    EXPECT_NEAR(weighted_norm(f, {0, 0, 0}), brute, 1e-13);
}

TEST(VfNorm, Examples)
{
    auto dom = small_domain();
    VectorField3 X(ScalarField::constant(dom, 1.0), ScalarField::zero(dom), ScalarField::zero(dom));
    EXPECT_NEAR(vf_norm(X, {}, {2, 1, 1}), 0.5, 1e-15);
    auto c = make_field(dom, [](double, double, double p) { return std::cos(p); });
    VectorField3 C(c, c, c);
    EXPECT_NEAR(vf_norm(C, {}, {1, 1, 1}), 3.0, 1e-13);
    EXPECT_THROW(vf_norm(C, {}, {0, 1, 1}), std::invalid_argument);
}

TEST(VfNorm, HomogeneityInWeights)
{
    auto dom = small_domain();
    std::mt19937 rng(3);
    VectorField3 X(random_trig(dom, rng, 3), random_trig(dom, rng, 4), random_trig(dom, rng, 2));
    const Widths u{0, 0, 0.3};
    const Weights w{0.2, 0.7, 1.3};
    for (double a : {2.0, 0.5, 7.0}) {
        const double lhs = vf_norm(X, u, w.scaled(a));
        EXPECT_NEAR(lhs, vf_norm(X, u, w) / a, 1e-14 * lhs);
    }
}

TEST(SmoothNorm, Examples)
{
    auto dom = small_domain();
    auto c = ScalarField::constant(dom, -2.5);
    for (int ell = 0; ell < 4; ++ell) EXPECT_NEAR(smooth_norm(c, ell), 2.5, 1e-14);
    auto f = make_field(dom, [](double, double, double p) { return std::cos(p); });
    EXPECT_NEAR(smooth_norm(f, 1), 1.0, 1e-12);
    auto g = make_field(dom, [](double, double, double p) { return std::cos(3 * p); });
    EXPECT_NEAR(smooth_norm(g, 2), 9.0, 1e-12);
    EXPECT_THROW(smooth_norm(g, 5, 4), std::invalid_argument);
}

TEST(Truncate, Examples)
{
    auto dom = small_domain();
    auto f = make_field(dom, [](double, double, double p) { return std::cos(p); });
    EXPECT_LT(truncate(f, 0).coeffs().cwiseAbs().maxCoeff(), 1e-15);
    std::mt19937 rng(4);
    auto g = random_trig(dom, rng, 6);
    auto t1 = truncate(g, 3);
    EXPECT_EQ((truncate(t1, 3).coeffs() - t1.coeffs()).cwiseAbs().maxCoeff(), 0.0);

    auto h = make_field(dom, [](double, double, double p) {
        double v = 0.0;
        for (int k = 0; k <= 5; ++k) v += std::exp(-k) * std::cos(k * p);
        return v;
    });
    EXPECT_LE(sup_norm(remainder(h, 3)), std::exp(-4.0) + std::exp(-5.0) + 1e-14);
}

TEST(Properties, MonotonicityInFourierWidth)
{
    auto dom = small_domain();
    std::mt19937 rng(5);
    for (int n = 0; n < 20; ++n) {
        auto f = random_trig(dom, rng, 6);
        double prev = 0.0;
        for (double s : {0.0, 0.1, 0.5, 1.0}) {
            const double v = weighted_norm(f, {0, 0, s});
            EXPECT_GE(v, prev);
            prev = v;
        }
    }
}

TEST(Properties, TriangleInequality)
{
    auto dom = small_domain(6, 6);
    std::mt19937 rng(6);
    for (int n = 0; n < 200; ++n) {
        auto f = random_trig(dom, rng, 5), g = random_trig(dom, rng, 5);
        const Widths u{0, 0, 0.2};
        EXPECT_LE(weighted_norm(f + g, u), weighted_norm(f, u) + weighted_norm(g, u) + 1e-13);
        EXPECT_LE(smooth_norm(f + g, 2), smooth_norm(f, 2) + smooth_norm(g, 2) + 1e-12);
    }
}

TEST(Properties, RealityPreserved)
{
    auto dom = small_domain();
    std::mt19937 rng(7);
    auto f = random_trig(dom, rng, 4), g = random_trig(dom, rng, 3);
    EXPECT_TRUE(f.is_real());
    EXPECT_TRUE(mul(f, g).is_real(1e-13));
    EXPECT_TRUE(d_psi(f).is_real(1e-13));
    EXPECT_TRUE(d_y(f).is_real(1e-12));
    EXPECT_TRUE(d_I(f).is_real(1e-12));
    EXPECT_TRUE(truncate(f, 2).is_real());
}

TEST(Properties, SmoothingPairWithUnitConstant)
{
    // |T_K f|_ell <= c0 K^{ell - j + delta} |f|_j and
    // |R_K f|_j <= c0 K^{-(ell - j) + delta} |f|_ell with c0 = 1, delta = 2.
    auto dom = small_domain(16, 3);
    std::mt19937 rng(8);
    const double c0 = 1.0, delta = 2.0;
    for (int n = 0; n < 50; ++n) {
        auto f = random_trig(dom, rng, 16);
        for (int K : {2, 4, 8}) {
            for (int j = 0; j <= 2; ++j)
                for (int ell = j; ell <= 4; ++ell) {
                    const double tk = smooth_norm(truncate(f, K), ell);
                    EXPECT_LE(tk, c0 * std::pow(K, ell - j + delta) * smooth_norm(f, j) * (1 + 1e-12));
                    const double rk = smooth_norm(remainder(f, K), j);
                    EXPECT_LE(rk, c0 * std::pow(K, -(ell - j) + delta) * smooth_norm(f, ell) * (1 + 1e-12));
                }
        }
    }
}

TEST(Derivatives, SpectralInY)
{
    auto dom = small_domain(2, 20);
    auto f = make_field(dom, [](double I, double y, double p) { return std::sin(2 * y) * (1 + I) * std::cos(p); });
    auto g = d_y(f);
    auto h = d_I(f);
    EXPECT_NEAR(g.eval(0.3, 0.1, 0.4), 2 * std::cos(0.2) * 1.3 * std::cos(0.4), 1e-11);
    EXPECT_NEAR(h.eval(0.3, 0.1, 0.4), std::sin(0.2) * std::cos(0.4), 1e-11);
}

TEST(Csv, Layout)
{
    auto dom = small_domain(1, 2);
    auto f = ScalarField::constant(dom, 1.5);
    const std::string csv = field_to_csv(f);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "k,I_index,y_index,re,im");
    EXPECT_NE(csv.find("0,0,0,1.5,0"), std::string::npos);
}
