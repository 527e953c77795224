#include "qcnf/elliptic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/ellint_1.hpp>
#include <boost/math/special_functions/ellint_2.hpp>
#include <boost/math/special_functions/ellint_rf.hpp>
#include <boost/math/special_functions/ellint_rg.hpp>
#include <boost/math/special_functions/ellint_rj.hpp>
#include <boost/math/special_functions/jacobi_elliptic.hpp>

namespace qcnf {

namespace bm = boost::math;

KappaPoint KappaPoint::make(double kappa, double kappa_min)
{
    if (!std::isfinite(kappa) || kappa >= 1.0)
        throw std::invalid_argument("kappa must be finite and below 1, got " + std::to_string(kappa));
    if (std::abs(kappa) < kappa_min)
        throw NearSeparatrix("|kappa| = " + std::to_string(std::abs(kappa)) + " is below the separatrix floor");
    return {kappa, kappa < 0 ? Regime::Negative : Regime::UnitInterval};
}

namespace {

// Complete integrals in Carlson form. For 0 < kappa < 1 the modulus is
// k^2 = 1 - kappa with complementary parameter kappa passed exactly; for
// kappa < 0 it is k^2 = 1 / (1 - kappa) with k'^2 = -kappa / (1 - kappa).
struct Complete {
    double k = 0.0;     // modulus
    double kp2 = 0.0;   // complementary parameter
    double K = 0.0;
    double E = 0.0;
};

Complete complete(const KappaPoint& kp)
{
    Complete c;
    if (kp.regime == Regime::UnitInterval) {
        c.kp2 = kp.kappa;
        c.k = std::sqrt(1.0 - kp.kappa);
    } else {
        c.kp2 = -kp.kappa / (1.0 - kp.kappa);
        c.k = 1.0 / std::sqrt(1.0 - kp.kappa);
    }
    c.K = bm::ellint_rf(0.0, c.kp2, 1.0);
    c.E = 2.0 * bm::ellint_rg(0.0, c.kp2, 1.0);
    return c;
}

// Reduces theta to [0, T_p] using evenness and 2 T_p periodicity; returns
// the reduced value and the sign picked up by odd functions.
struct Reduced {
    double theta;
    double sign;
};

Reduced reduce(double theta, double Tp)
{
    const double period = 2.0 * Tp;
    const double n = std::floor((theta + Tp) / period);
    double t = theta - n * period;  // in [-Tp, Tp)
    double sign = 1.0;
    if (t < 0) {
        t = -t;
        sign = -1.0;
    }
    return {std::min(t, Tp), sign};
}

// G on [0, T_p].
double breve_G_reduced(const KappaPoint& kp, const Complete& c, double theta)
{
    double cn = 0.0, dn = 0.0;
    if (kp.regime == Regime::UnitInterval) {
        // dn from cn: the library's dn loses digits near the quarter period.
        bm::jacobi_elliptic(c.k, theta, &cn, &dn);
        return std::sqrt(c.kp2 + c.k * c.k * cn * cn);
    }
    bm::jacobi_elliptic(c.k, std::sqrt(1.0 - kp.kappa) * theta, &cn, &dn);
    return cn;
}

// G and dG/dtheta on [0, T0].
BreveJet breve_jet_reduced(const KappaPoint& kp, const Complete& c, double theta)
{
    double cn = 0.0, dn = 0.0;
    if (kp.regime == Regime::UnitInterval) {
        const double sn = bm::jacobi_elliptic(c.k, theta, &cn, &dn);
        return {std::sqrt(c.kp2 + c.k * c.k * cn * cn), -c.k * c.k * sn * cn};
    }
    const double scale = std::sqrt(1.0 - kp.kappa);
    const double sn = bm::jacobi_elliptic(c.k, scale * theta, &cn, &dn);
    return {cn, -scale * sn * dn};
}

// Integral of G^2 from 0 to theta for theta in [0, T0].
double rho_hat_quarter(const KappaPoint& kp, const Complete& c, double theta)
{
    if (kp.regime == Regime::UnitInterval) {
        double cn = 0.0, dn = 0.0;
        const double sn = bm::jacobi_elliptic(c.k, theta, &cn, &dn);
        return bm::ellint_2(c.k, std::atan2(sn, cn));
    }
    const double scale = std::sqrt(1.0 - kp.kappa);
    const double u = scale * theta;
    double cn = 0.0, dn = 0.0;
    const double sn = bm::jacobi_elliptic(c.k, u, &cn, &dn);
    return scale * (bm::ellint_2(c.k, std::atan2(sn, cn)) - c.kp2 * u);
}

double T0_from(const KappaPoint& kp, const Complete& c)
{
    return kp.regime == Regime::UnitInterval ? c.K : c.K / std::sqrt(1.0 - kp.kappa);
}

double A_from(const KappaPoint& kp, const Complete& c)
{
    return kp.regime == Regime::UnitInterval ? c.E / c.K : (1.0 - kp.kappa) * c.E / c.K + kp.kappa;
}

// Integral of f(u) over u >= 0, split at the scale sqrt|kappa| where the
// integrand turns over.
template <class F>
double half_line(F f, double kappa)
{
    const double split = std::sqrt(std::abs(kappa));
    bm::quadrature::tanh_sinh<double> inner;
    bm::quadrature::exp_sinh<double> outer;
    return inner.integrate(f, 0.0, split, 1e-15) + outer.integrate([&](double t) { return f(split + t); }, 1e-15);
}

} // namespace

double G0_of(double kappa)
{
    const auto kp = KappaPoint::make(kappa);
    return kp.regime == Regime::UnitInterval ? std::sqrt(kappa) : 0.0;
}

double T0_of(double kappa)
{
    const auto kp = KappaPoint::make(kappa);
    return T0_from(kp, complete(kp));
}

double Tp_of(double kappa)
{
    const double T0 = T0_of(kappa);
    return kappa < 0 ? 2.0 * T0 : T0;
}

double j_beta(double beta, double kappa)
{
    if (!(beta >= 0.0)) throw std::invalid_argument("j_beta needs beta >= 0");
    if (!(kappa > 0.0 && kappa <= 1.0)) throw std::invalid_argument("j_beta needs kappa in (0, 1]");
    // t = 1 / sqrt(s) turns the integral into R_F - (beta / 3) R_J.
    const double rf = bm::ellint_rf(0.0, kappa, 1.0);
    if (beta == 0.0) return rf;
    return rf - beta / 3.0 * bm::ellint_rj(0.0, kappa, 1.0, beta);
}

RS RS_of(double kappa)
{
    const auto kp = KappaPoint::make(kappa);
    RS out;
    // eta = 1 + u^2 (0 < kappa < 1) or eta = 1 - kappa + u^2 (kappa < 0).
    if (kp.regime == Regime::UnitInterval) {
        // Factored so that no intermediate overflows for large u.
        out.R = half_line(
            [&](double u) { return 1.0 / (std::sqrt(1.0 + kappa / (u * u)) * (u + 1.0 / u) * std::hypot(1.0, u)); },
            kappa);
        out.S = half_line(
            [&](double u) {
                const double ratio = 1.0 / (1.0 + 1.0 / (u * u));
                return 3.0 * ratio * std::sqrt(ratio) / (std::sqrt(1.0 + kappa / (u * u)) * (1.0 + u * u));
            },
            kappa);
    } else {
        const double m = -kappa;
        out.R = half_line(
            [&](double u) {
                const double y = u * u + 1 + m;
                return std::sqrt(1.0 - 1.0 / y) / y;
            },
            kappa);
        out.S = half_line(
            [&](double u) {
                const double y = u * u + 1 + m;
                const double ratio = 1.0 - 1.0 / y;
                return 3.0 * ratio * std::sqrt(ratio) / y;
            },
            kappa);
    }
    return out;
}

EllipticJet calA_jet(double kappa)
{
    const auto kp = KappaPoint::make(kappa);
    const auto c = complete(kp);
    const auto rs = RS_of(kappa);
    EllipticJet j;
    j.T0 = T0_from(kp, c);
    j.Tp = kp.regime == Regime::Negative ? 2.0 * j.T0 : j.T0;
    j.A = A_from(kp, c);
    j.R = rs.R;
    j.S = rs.S;
    j.T0p = -rs.R / (2.0 * kappa);
    j.T0pp = rs.S / (4.0 * kappa * kappa);
    const double gap = kappa - j.A;
    j.Ap = 0.5 - gap * rs.R / (2.0 * kappa * j.T0);
    j.App = -rs.R / (4.0 * kappa * j.T0) - 2.0 * gap * rs.R * rs.R / (4.0 * kappa * kappa * j.T0 * j.T0) +
            gap * rs.S / (4.0 * kappa * kappa * j.T0);
    return j;
}

double calA(double kappa)
{
    const auto kp = KappaPoint::make(kappa);
    return A_from(kp, complete(kp));
}

double breve_G(double kappa, double theta)
{
    const auto kp = KappaPoint::make(kappa);
    const auto c = complete(kp);
    const double T0 = T0_from(kp, c);
    const double Tp = kp.regime == Regime::Negative ? 2.0 * T0 : T0;
    const auto r = reduce(theta, Tp);
    if (kp.regime == Regime::Negative && r.theta > T0) return -breve_G_reduced(kp, c, Tp - r.theta);
    return breve_G_reduced(kp, c, r.theta);
}

BreveJet breve_G_jet(double kappa, double theta)
{
    const auto kp = KappaPoint::make(kappa);
    const auto c = complete(kp);
    const double T0 = T0_from(kp, c);
    const double Tp = kp.regime == Regime::Negative ? 2.0 * T0 : T0;
    const auto r = reduce(theta, Tp);
    BreveJet j;
    if (kp.regime == Regime::Negative && r.theta > T0) {
        j = breve_jet_reduced(kp, c, Tp - r.theta);
        j.G = -j.G;
    } else {
        j = breve_jet_reduced(kp, c, r.theta);
    }
    j.G3 *= r.sign;
    return j;
}

double breve_theta(double kappa, double G, double one_minus_G2, double G2_minus_kappa)
{
    const auto kp = KappaPoint::make(kappa);
    const auto c = complete(kp);
    const double sn = std::sqrt(std::max(one_minus_G2, 0.0));
    // Amplitude from (sn, cn): cn = G for kappa < 0, cn ~ sqrt(G^2 - kappa) otherwise.
    if (kp.regime == Regime::UnitInterval)
        return bm::ellint_1(c.k, std::atan2(sn, std::sqrt(std::max(G2_minus_kappa, 0.0))));
    return bm::ellint_1(c.k, std::atan2(sn, G)) / std::sqrt(1.0 - kp.kappa);
}

RhoValues rho_funcs(double kappa, double theta)
{
    const auto kp = KappaPoint::make(kappa);
    const auto c = complete(kp);
    const double T0 = T0_from(kp, c);
    const double Tp = kp.regime == Regime::Negative ? 2.0 * T0 : T0;
    const double A = A_from(kp, c);
    const auto r = reduce(theta, Tp);

    // G^2 is even about T0, so the second quarter mirrors the first.
    double hat = 0.0;
    if (kp.regime == Regime::Negative && r.theta > T0)
        hat = A * Tp - rho_hat_quarter(kp, c, Tp - r.theta);
    else
        hat = rho_hat_quarter(kp, c, r.theta);

    RhoValues out;
    out.rho_breve = r.sign * (hat - A * r.theta);
    out.rho_hat = out.rho_breve + A * theta;
    return out;
}

double theta_star(double kappa)
{
    const auto kp = KappaPoint::make(kappa);
    const auto c = complete(kp);
    const double A = A_from(kp, c);
    const double lo = kp.regime == Regime::UnitInterval ? kappa : 0.0;
    if (!(lo < A && A < 1.0))
        throw std::logic_error("mean value of G^2 outside (G0^2, 1) at kappa = " + std::to_string(kappa));
    // Inverts dn^2 = A (0 < kappa < 1) or cn^2 = A (kappa < 0) through the
    // incomplete integral of the first kind.
    if (kp.regime == Regime::UnitInterval) {
        const double phi = std::asin(std::sqrt((1.0 - A) / (1.0 - kappa)));
        return bm::ellint_1(c.k, phi);
    }
    return bm::ellint_1(c.k, std::acos(std::sqrt(A))) / std::sqrt(1.0 - kappa);
}

} // namespace qcnf
