#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "qcnf/elliptic.hpp"

using namespace qcnf;
using std::numbers::pi;

namespace {

template <class F>
double gk(F f, double a, double b)
{
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 20, 1e-14);
}

// Quarter period by quadrature with the endpoint singularities removed:
// xi^2 = 1 - (1 - kappa) sin^2 phi on (0, 1), xi = cos phi for kappa < 0.
double T0_quadrature(double kappa)
{
    if (kappa > 0) return gk([&](double p) { return 1.0 / std::sqrt(1.0 - (1.0 - kappa) * std::sin(p) * std::sin(p)); }, 0, pi / 2);
    return gk([&](double p) { return 1.0 / std::sqrt(std::cos(p) * std::cos(p) - kappa); }, 0, pi / 2);
}

// Integral of xi^2 / sqrt((1 - xi^2)(xi^2 - kappa)) from G0 to 1.
double rho_hat_Tp_quadrature(double kappa)
{
    if (kappa > 0)
        return gk([&](double p) { return std::sqrt(1.0 - (1.0 - kappa) * std::sin(p) * std::sin(p)); }, 0, pi / 2);
    return gk([&](double p) { return std::cos(p) * std::cos(p) / std::sqrt(std::cos(p) * std::cos(p) - kappa); }, 0,
              pi / 2);
}

// theta(G) = integral from G to 1 of the defining kernel, with xi = cos phi.
double theta_of_G(double kappa, double G)
{
    boost::math::quadrature::tanh_sinh<double> ts;
    return ts.integrate([&](double p) { return 1.0 / std::sqrt(std::cos(p) * std::cos(p) - kappa); }, 0.0, std::acos(G));
}

double agm(double a, double b)
{
    for (int i = 0; i < 40; ++i) {
        const double m = 0.5 * (a + b);
        b = std::sqrt(a * b);
        a = m;
    }
    return a;
}

const double kSigned[] = {-0.9, -0.5, -0.3, -0.1, -0.01, 0.01, 0.1, 0.3, 0.5, 0.9};

} // namespace

TEST(KappaPoint, RejectsSeparatrixAndOutOfRange)
{
    EXPECT_THROW(KappaPoint::make(1e-13), NearSeparatrix);
    EXPECT_THROW(T0_of(-5e-13), NearSeparatrix);
    EXPECT_THROW(KappaPoint::make(1.0), std::invalid_argument);
    EXPECT_EQ(KappaPoint::make(-0.2).regime, Regime::Negative);
    EXPECT_EQ(KappaPoint::make(0.2).regime, Regime::UnitInterval);
}

TEST(T0, LimitAtUnitKappa)
{
    EXPECT_NEAR(T0_of(1.0 - 1e-12), pi / 2, 1e-11);
}

TEST(T0, MatchesAgmOracle)
{
    EXPECT_NEAR(T0_of(0.5), pi / (2.0 * agm(1.0, std::sqrt(0.5))), 1e-14);
    EXPECT_NEAR(T0_of(0.5), j_beta(0.0, 0.5), 1e-15);
    // kappa < 0: K(k) / sqrt(1 - kappa) with k'^2 = -kappa / (1 - kappa).
    const double kappa = -0.4;
    EXPECT_NEAR(T0_of(kappa), pi / (2.0 * agm(1.0, std::sqrt(-kappa / (1 - kappa)))) / std::sqrt(1 - kappa), 1e-14);
}

TEST(T0, MatchesQuadrature)
{
    for (double k : kSigned) EXPECT_NEAR(T0_of(k), T0_quadrature(k), 1e-12) << k;
}

TEST(T0, LogarithmicDivergence)
{
    // T0 = log(16 / |kappa|) / 2 + o(1): the ratio approaches 1/2 from above.
    for (double sgn : {1.0, -1.0}) {
        double prev = 1e9;
        for (int m = 4; m <= 8; ++m) {
            const double kappa = sgn * std::pow(10.0, -m);
            const double ratio = T0_of(kappa) / std::abs(std::log(std::abs(kappa)));
            EXPECT_LT(ratio, prev) << kappa;
            EXPECT_NEAR(ratio, 0.5 + std::log(4.0) / std::abs(std::log(std::abs(kappa))), 1e-3) << kappa;
            prev = ratio;
        }
    }
}

TEST(JBeta, ZeroBetaIsQuarterPeriod)
{
    for (double k : {0.02, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.95}) EXPECT_NEAR(j_beta(0.0, k), T0_of(k), 1e-14);
}

TEST(JBeta, PartialFractionsAtUnitKappa)
{
    EXPECT_NEAR(j_beta(1.0, 1.0), pi / 4, 1e-14);
}

TEST(JBeta, MatchesQuadratureAndDecays)
{
    for (double kappa : {0.05, 0.5, 0.9}) {
        double prev = j_beta(0.0, kappa);
        for (double beta : {0.1, 0.5, 2.0, 10.0, 100.0, 1e4}) {
            const double q = gk(
                [&](double t) {
                    const double c2 = std::cos(t) * std::cos(t), s2 = std::sin(t) * std::sin(t);
                    return c2 / ((c2 + beta * s2) * std::sqrt(c2 + kappa * s2));
                },
                0, pi / 2);
            const double j = j_beta(beta, kappa);
            EXPECT_NEAR(j, q, 1e-10 * q) << beta << " " << kappa;
            EXPECT_LT(j, prev);
            prev = j;
        }
        EXPECT_LT(prev, 0.02);
    }
}

TEST(RS, DerivativeIdentities)
{
    for (double k : {-0.5, -0.1, -0.01, 0.01, 0.1, 0.5}) {
        const double h = 1e-4 * std::abs(k);
        const double d1 = (T0_of(k + h) - T0_of(k - h)) / (2 * h);
        const double d2 = (T0_of(k + h) - 2 * T0_of(k) + T0_of(k - h)) / (h * h);
        const auto rs = RS_of(k);
        EXPECT_NEAR(-2 * k * d1 / rs.R, 1.0, 1e-6) << k;
        EXPECT_NEAR(4 * k * k * d2 / rs.S, 1.0, 1e-4) << k;
    }
    const double k = -0.3, h = 1e-5;
    EXPECT_NEAR(-2 * k * (T0_of(k + h) - T0_of(k - h)) / (2 * h) / RS_of(k).R, 1.0, 1e-5);
}

TEST(RS, ClosedFormForR)
{
    // R = -2 kappa T0' = (E - kappa K) / (1 - kappa) for 0 < kappa < 1.
    for (double k : {0.01, 0.3, 0.8}) {
        const double K = T0_of(k);
        const double E = rho_hat_Tp_quadrature(k);
        EXPECT_NEAR(RS_of(k).R, (E - k * K) / (1 - k), 1e-12) << k;
    }
}

TEST(RS, LimitsAtSeparatrix)
{
    // R -> 1 on both sides. The S integral tends to 3/2 * 4/3 = 2,
    // which is what T0 ~ log(16/|kappa|)/2 requires of 4 kappa^2 T0''.
    for (double k : {1e-10, -1e-10}) {
        const auto rs = RS_of(k);
        EXPECT_NEAR(rs.R, 1.0, 1e-4) << k;
        EXPECT_NEAR(rs.S, 2.0, 1e-4) << k;
    }
}

TEST(RS, BoundedOnGrid)
{
    double sup = 0;
    for (int i = -99; i <= 99; ++i) {
        if (i == 0) continue;
        const auto rs = RS_of(i / 100.0);
        EXPECT_GE(rs.R, 0.0);
        EXPECT_GE(rs.S, 0.0);
        sup = std::max(sup, rs.R);
    }
    EXPECT_LT(sup, 2.0);
}

TEST(CalA, MatchesQuadratureOfMean)
{
    for (double k : kSigned) {
        const double T0 = T0_quadrature(k);
        EXPECT_NEAR(calA(k), rho_hat_Tp_quadrature(k) / T0, 1e-12) << k;
    }
}

TEST(CalA, Sandwich)
{
    for (int i = 1; i < 100; ++i) {
        const double k = i / 100.0;
        EXPECT_GT(calA(k), k);
        EXPECT_LT(calA(k), 1.0);
        EXPECT_GT(calA(-k), 0.0);
        EXPECT_LT(calA(-k), 1.0);
    }
}

TEST(CalA, LogBound)
{
    double prev = 0;
    for (int m = 2; m <= 10; ++m) {
        const double k = std::pow(10.0, -m);
        const double bound = calA(k) * std::abs(std::log(k));
        EXPECT_LT(bound, 3.0);
        EXPECT_LT(calA(-k) * std::abs(std::log(k)), 3.0);
        if (m > 2) EXPECT_NEAR(bound, prev, 0.5);
        prev = bound;
    }
}

TEST(CalA, JetMatchesFiniteDifferences)
{
    for (double k : {-0.5, -0.1, 0.1, 0.5}) {
        const double h = 1e-4 * std::abs(k);
        const auto j = calA_jet(k);
        EXPECT_NEAR(j.Ap, (calA(k + h) - calA(k - h)) / (2 * h), 1e-6 * std::abs(j.Ap) + 1e-8) << k;
        EXPECT_NEAR(j.App, (calA(k + h) - 2 * calA(k) + calA(k - h)) / (h * h), 1e-3 * std::abs(j.App) + 1e-4) << k;
        EXPECT_DOUBLE_EQ(j.Tp, k < 0 ? 2 * j.T0 : j.T0);
    }
}

TEST(BreveG, Endpoints)
{
    for (double k : kSigned) {
        EXPECT_NEAR(breve_G(k, 0.0), 1.0, 1e-15);
        EXPECT_NEAR(breve_G(k, T0_of(k)), k > 0 ? std::sqrt(k) : 0.0, 1e-12) << k;
    }
}

TEST(BreveG, SolvesDefiningEquation)
{
    for (double k : kSigned) {
        const double lo = k > 0 ? std::sqrt(k) : 0.0;
        for (double t : {0.1, 0.4, 0.7, 0.95}) {
            const double G = lo + t * (1 - lo);
            EXPECT_NEAR(breve_G(k, theta_of_G(k, G)), G, 1e-10) << k << " " << G;
        }
    }
}

TEST(BreveG, DerivativeSatisfiesFirstOrderEquation)
{
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> Th(-12.0, 12.0);
    for (double k : kSigned)
        for (int i = 0; i < 20; ++i) {
            const double th = Th(rng), h = 1e-5;
            const auto j = breve_G_jet(k, th);
            EXPECT_EQ(j.G, breve_G(k, th));
            EXPECT_NEAR(j.G3 * j.G3, (1 - j.G * j.G) * (j.G * j.G - k), 1e-12) << k << " " << th;
            const double fd = (breve_G(k, th + h) - breve_G(k, th - h)) / (2 * h);
            EXPECT_NEAR(j.G3, fd, 1e-8) << k << " " << th;
        }
}

TEST(BreveG, InverseRoundTrip)
{
    for (double k : kSigned)
        for (int i = 0; i <= 20; ++i) {
            const double th = Tp_of(k) * i / 20.0;
            const double G = breve_G(k, th);
            const double back = breve_theta(k, G, 1 - G * G, G * G - k);
            EXPECT_NEAR(breve_G(k, back), G, 1e-13) << k << " " << th;
            if (i > 0 && i < 20) EXPECT_NEAR(back, th, 1e-7 * Tp_of(k)) << k << " " << th;
        }
}

TEST(BreveG, SymmetryTables)
{
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> K(-0.95, 0.95), Th(-30.0, 30.0);
    for (int i = 0; i < 100; ++i) {
        double k = K(rng);
        if (std::abs(k) < 1e-3) k = 0.5;
        const double th = Th(rng), Tp = Tp_of(k);
        const double G = breve_G(k, th);
        EXPECT_NEAR(breve_G(k, -th), G, 1e-9);
        EXPECT_NEAR(breve_G(k, th + 2 * Tp), G, 1e-9);
        if (k < 0) EXPECT_NEAR(breve_G(k, Tp - th), -G, 1e-9);

        const auto r = rho_funcs(k, th);
        EXPECT_NEAR(rho_funcs(k, -th).rho_breve, -r.rho_breve, 1e-9);
        EXPECT_NEAR(rho_funcs(k, th + 2 * Tp).rho_breve, r.rho_breve, 1e-9);
        EXPECT_NEAR(rho_funcs(k, th + 2 * Tp).rho_hat, r.rho_hat + 2 * Tp * calA(k), 1e-9);
        if (k < 0) EXPECT_NEAR(rho_funcs(k, Tp - th).rho_breve, -r.rho_breve, 1e-9);
    }
}

TEST(Rho, ZerosAndPeriod)
{
    for (double k : kSigned) {
        const auto z = rho_funcs(k, 0.0);
        EXPECT_EQ(z.rho_hat, 0.0);
        EXPECT_EQ(z.rho_breve, 0.0);
        EXPECT_NEAR(rho_funcs(k, Tp_of(k)).rho_breve, 0.0, 1e-13) << k;
    }
}

TEST(Rho, HatIsIntegralOfGSquared)
{
    for (double k : {-0.6, 0.3}) {
        const double th = 1.3 * Tp_of(k);
        const double q = gk([&](double s) { return std::pow(breve_G(k, s), 2); }, 0.0, th);
        EXPECT_NEAR(rho_funcs(k, th).rho_hat, q, 1e-11) << k;
    }
}

TEST(Rho, ThetaDerivative)
{
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> Th(-5.0, 5.0);
    for (double k : {-0.7, -0.05, 0.05, 0.7}) {
        const double A = calA(k), h = 1e-5;
        for (int i = 0; i < 10; ++i) {
            const double th = Th(rng);
            const double fd = (rho_funcs(k, th + h).rho_breve - rho_funcs(k, th - h).rho_breve) / (2 * h);
            EXPECT_NEAR(fd, std::pow(breve_G(k, th), 2) - A, 1e-6) << k << " " << th;
        }
        for (double th : {0.0, Tp_of(k)}) {
            const double fd = (rho_funcs(k, th + h).rho_breve - rho_funcs(k, th - h).rho_breve) / (2 * h);
            EXPECT_NEAR(fd, std::pow(breve_G(k, th), 2) - A, 1e-6) << k << " " << th;
        }
    }
}

TEST(ThetaStar, RootInsideQuarterPeriod)
{
    for (int i = -99; i <= 99; i += 2) {
        if (i == 0) continue;
        const double k = i / 100.0;
        const double ts = theta_star(k);
        EXPECT_GT(ts, 0.0);
        EXPECT_LT(ts, T0_of(k));
        EXPECT_NEAR(std::pow(breve_G(k, ts), 2) - calA(k), 0.0, 1e-10) << k;
    }
}
