#include "qcnf/euler.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

namespace qcnf {

using std::numbers::pi;

void PhysParams::validate() const
{
    if (!(alpha >= 0.0)) throw std::invalid_argument("alpha must be non-negative");
    if (!(beta >= 0.0)) throw std::invalid_argument("beta must be non-negative");
}

std::string to_string(Panel p)
{
    switch (p) {
    case Panel::A: return "panel_a";
    case Panel::B: return "panel_b";
    case Panel::C: return "panel_c";
    }
    return "?";
}

std::string to_string(Motion m)
{
    switch (m) {
    case Motion::LibrationMinimum: return "libration_minimum";
    case Motion::Rotation: return "rotation";
    case Motion::LibrationCentral: return "libration_central";
    case Motion::LibrationSide: return "libration_side";
    }
    return "?";
}

std::string to_string(CriticalKind k)
{
    switch (k) {
    case CriticalKind::Minimum: return "minimum";
    case CriticalKind::Saddle: return "saddle";
    case CriticalKind::Maximum: return "maximum";
    }
    return "?";
}

double euler_E(double r, double G, double g)
{
    if (!(std::abs(G) <= 1.0)) throw std::invalid_argument("|G| must not exceed 1");
    return G * G + r * std::sqrt(1.0 - G * G) * std::cos(g);
}

double E_max(double r)
{
    return r <= 2.0 ? 1.0 + r * r / 4.0 : r;
}

namespace {

double integrate(const auto& f, double a, double b)
{
    static thread_local boost::math::quadrature::tanh_sinh<double> ts;
    return ts.integrate(f, a, b, 1e-14);
}

double clamp_unit(double x)
{
    return std::clamp(x, -1.0, 1.0);
}

// Half-angle of the level curve at height Gamma.
double level_angle(double E, double r, double Gamma)
{
    return std::acos(clamp_unit((E - Gamma * Gamma) / (r * std::sqrt(1.0 - Gamma * Gamma))));
}

void check_level(double E, double r)
{
    if (!(r > 0.0) || r == 2.0 || !std::isfinite(r)) throw std::invalid_argument("r must be positive and not 2");
    if (!(E > -r && E < E_max(r)))
        throw std::invalid_argument("E = " + std::to_string(E) + " outside the range of the Euler integral at r = " +
                                    std::to_string(r));
    if (std::abs(E - r) < kLevelFloor) throw NearSeparatrix("level E = r (separatrix through the saddle)");
    if (std::abs(E - 1.0) < kLevelFloor) throw NearSeparatrix("level E = 1 (separatrix through circular orbits)");
}

} // namespace

LevelRoots level_roots(double E, double r)
{
    LevelRoots l;
    const double q = std::sqrt(1.0 + r * r / 4.0 - E);
    l.alpha_plus = E - r * r / 2.0 + r * q;
    l.alpha_minus = E - r * r / 2.0 - r * q;
    l.sigma = std::sqrt(l.alpha_plus);
    // alpha_+ alpha_- = E^2 - r^2, factored to keep digits near E = r.
    l.kappa = (E - r) * (E + r) / (l.alpha_plus * l.alpha_plus);
    return l;
}

LevelData level_data(double E, double r)
{
    check_level(E, r);
    LevelData d;
    d.E = E;
    d.r = r;
    const auto roots = level_roots(E, r);
    d.alpha_plus = roots.alpha_plus;
    d.alpha_minus = roots.alpha_minus;
    d.sigma = roots.sigma;
    d.kappa = roots.kappa;
    d.tau_p = Tp_of(d.kappa) / d.sigma;
    d.B = -E / r + d.alpha_plus * calA(d.kappa) / r;
    d.panel = r < 1.0 ? Panel::A : (r < 2.0 ? Panel::B : Panel::C);
    if (d.kappa < 0)
        d.motion = E < 1.0 ? Motion::LibrationMinimum : Motion::LibrationCentral;
    else
        d.motion = E < 1.0 ? Motion::Rotation : Motion::LibrationSide;

    const double lower = d.kappa < 0 ? 0.0 : std::sqrt(d.alpha_minus);
    double area = integrate([&](double G) { return level_angle(E, r, G); }, lower, d.sigma) / pi;
    if (d.kappa < 0) area *= 2.0;
    // Below E = 1 with kappa < 0 the curve crosses G = 0 and the strip
    // under it has height 2 sigma.
    const double strip = E > 1.0 ? 1.0 : (d.kappa < 0 ? 2.0 * d.sigma : d.sigma);
    d.action = strip - area;
    return d;
}

ActionJet action_jet(double E, double r)
{
    const auto d = level_data(E, r);
    return {d.action, d.tau_p / pi, d.B * d.tau_p / pi};
}

double sep_action(double r)
{
    if (!(r >= 0.0 && r <= 2.0)) throw std::invalid_argument("separatrix action needs 0 <= r <= 2");
    if (r == 0.0) return 0.0;
    if (r == 2.0) return 1.0;
    const double s0 = std::sqrt(r * (2.0 - r));
    const double area = integrate([&](double G) { return level_angle(r, r, G); }, 0.0, s0) / pi;
    return (r <= 1.0 ? s0 : 1.0) - area;
}

double sep_action_prime(double r)
{
    if (!(r > 0.0 && r < 2.0)) throw std::invalid_argument("separatrix action derivative needs 0 < r < 2");
    return std::sqrt((2.0 - r) / r) / pi;
}

double r_s(double A)
{
    if (!(A >= 0.0 && A <= 1.0)) throw std::invalid_argument("r_s needs 0 <= A <= 1");
    if (A == 0.0) return 0.0;
    if (A == 1.0) return 2.0;
    // Newton with the closed-form slope; Boost falls back to bisection
    // whenever a step leaves [0, 2].
    const auto f = [&](double r) {
        if (r <= 0.0) return std::pair{-A, 1e300};
        if (r >= 2.0) return std::pair{1.0 - A, 0.0};
        return std::pair{sep_action(r) - A, sep_action_prime(r)};
    };
    return boost::math::tools::newton_raphson_iterate(f, 2.0 * A, 0.0, 2.0, 50);
}

double r_s_prime(double A)
{
    const double r = r_s(A);
    return pi * std::sqrt(r / (2.0 - r));
}

double U_direct(double r, double G, double g)
{
    if (!(std::abs(G) <= 1.0)) throw std::invalid_argument("|G| must not exceed 1");
    const double ecc = std::sqrt(1.0 - G * G);
    const double cg = std::cos(g), sg = std::sin(g);
    auto radicand = [&](double xi) {
        const double n = 1.0 - ecc * std::cos(xi);
        return n * n + 2.0 * r * ((std::cos(xi) - ecc) * cg - G * std::sin(xi) * sg) + r * r;
    };

    // Start the period at the closest approach so that any near-collision
    // peak sits at the endpoints, where the quadrature clusters its nodes.
    constexpr int kScan = 512;
    double xi0 = 0.0, dmin = radicand(0.0);
    for (int i = 1; i < kScan; ++i) {
        const double xi = 2.0 * pi * i / kScan;
        if (const double d = radicand(xi); d < dmin) {
            dmin = d;
            xi0 = xi;
        }
    }
    const auto refined = boost::math::tools::brent_find_minima(radicand, xi0 - 2.0 * pi / kScan,
                                                               xi0 + 2.0 * pi / kScan, 52);
    xi0 = refined.first;
    if (refined.second < kCollisionFloor)
        throw CollisionLocus("averaged potential diverges: the two bodies collide on this orbit");

    const double total = integrate(
        [&](double xi) { return (1.0 - ecc * std::cos(xi)) / std::sqrt(std::max(radicand(xi), kCollisionFloor)); }, xi0,
        xi0 + 2.0 * pi);
    return total / (2.0 * pi);
}

double e_of(double E, double r)
{
    return r / 2.0 - std::sqrt(1.0 + r * r / 4.0 - E);
}

namespace {

void check_F_domain(double E, double r)
{
    if (!(r >= 0.0) || !std::isfinite(r)) throw std::invalid_argument("r must be non-negative");
    if (!(E >= -r && E <= E_max(r))) throw std::invalid_argument("E outside the range of the Euler integral");
    if (r < 2.0 && std::abs(E - r) < kLevelFloor) throw NearSeparatrix("F diverges on the level E = r");
}

// Integrand of the half-period formula in the angle x with z = cos x,
// together with its derivatives in (e, r).
struct Kernel {
    double f, fe, fr, fee, fer, frr;
};

Kernel kernel(double z, double e, double r)
{
    const double N = 1.0 - e * z;
    const double D = N * N + 2.0 * r * (z - e) + r * r;
    const double De = -2.0 * z * N - 2.0 * r, Dr = 2.0 * (z - e) + 2.0 * r;
    const double Dee = 2.0 * z * z, Der = -2.0, Drr = 2.0;
    const double Ne = -z;
    const double d1 = 1.0 / std::sqrt(D), d3 = d1 / D, d5 = d3 / D;
    Kernel k;
    k.f = N * d1;
    k.fe = Ne * d1 - 0.5 * N * De * d3;
    k.fr = -0.5 * N * Dr * d3;
    k.fee = -Ne * De * d3 - 0.5 * N * Dee * d3 + 0.75 * N * De * De * d5;
    k.fer = -0.5 * Ne * Dr * d3 - 0.5 * N * Der * d3 + 0.75 * N * De * Dr * d5;
    k.frr = -0.5 * N * Drr * d3 + 0.75 * N * Dr * Dr * d5;
    return k;
}

// Closest approach sits at z = -1 (x = pi) for the separatrix family, so the
// quadrature runs on [0, pi] where that endpoint is resolved.
double half_period(const auto& f)
{
    return integrate([&](double x) { return f(std::cos(x)); }, 0.0, pi) / pi;
}

} // namespace

double F_quadrature(double E, double r)
{
    check_F_domain(E, r);
    const double e = e_of(E, r);
    return half_period([&](double z) {
        const double N = 1.0 - e * z;
        return N / std::sqrt(N * N + 2.0 * r * (z - e) + r * r);
    });
}

double F_of(double E, double r)
{
    check_F_domain(E, r);
    const double e = e_of(E, r);
    // The representation needs e away from 0 (E = 1), z_- < z_+ and a
    // modulus inside (0, 1]; elsewhere the quadrature is used.
    if (std::abs(e) > 1e-3 && r > 0.0) {
        const double e2 = e * e;
        const double disc = r * (r - 2.0 * e) * (1.0 - e2);
        if (disc > 1e-12) {
            const double root = std::sqrt(disc);
            const double zp = (e - r + root) / e2, zm = (e - r - root) / e2;
            const double prod = (zm + 1.0) * (zp - 1.0);
            const double beta = (zm - 1.0) / (1.0 + zm);
            const double kappa = (1.0 + zp) * (zm - 1.0) / ((1.0 + zm) * (zp - 1.0));
            if (prod > 0.0 && beta > 0.0 && kappa > 0.0 && kappa <= 1.0 && std::isfinite(beta)) {
                return 2.0 / (pi * std::abs(e) * std::sqrt(prod)) *
                       ((1.0 + e) * j_beta(0.0, kappa) - 2.0 * e * j_beta(beta, kappa));
            }
        }
    }
    return F_quadrature(E, r);
}

FJet F_jet(double E, double r)
{
    check_F_domain(E, r);
    const double q = std::sqrt(1.0 + r * r / 4.0 - E);
    const double e = r / 2.0 - q;
    const double eE = 1.0 / (2.0 * q), er = 0.5 - r / (4.0 * q);
    const double q3 = q * q * q;
    const double eEE = 1.0 / (4.0 * q3), eEr = -r / (8.0 * q3), err = -1.0 / (4.0 * q) + r * r / (16.0 * q3);

    std::array<double, 6> m{};
    for (int c = 0; c < 6; ++c) {
        m[c] = half_period([&](double z) {
            const auto k = kernel(z, e, r);
            const double v[6] = {k.f, k.fe, k.fr, k.fee, k.fer, k.frr};
            return v[c];
        });
    }
    const double Fe = m[1], Fr = m[2], Fee = m[3], Fer = m[4], Frr = m[5];
    FJet j;
    j.F = F_of(E, r);
    j.F_E = Fe * eE;
    j.F_r = Fe * er + Fr;
    j.F_EE = Fee * eE * eE + Fe * eEE;
    j.F_Er = Fee * eE * er + Fer * eE + Fe * eEr;
    j.F_rr = Fee * er * er + 2.0 * Fer * er + Frr + Fe * err;
    return j;
}

FGrad F_gradient(double E, double r)
{
    check_F_domain(E, r);
    // Near E = 1 the closed form loses digits and F_of switches
    // representation; differentiate under the integral there.
    if (std::abs(e_of(E, r)) < 0.05) {
        const auto j = F_jet(E, r);
        return {j.F, j.F_E, j.F_r};
    }
    double gap = std::min({1.0, E_max(r) - E, E + r});
    if (r < 2.0) gap = std::min(gap, std::abs(E - r));
    const double h = 1e-3 * gap;
    if (!(h > 0.0)) throw std::domain_error("F_gradient needs E inside (-r, E_max(r))");
    const auto stencil = [h](const auto& f) {
        return (8.0 * (f(h) - f(-h)) - (f(2.0 * h) - f(-2.0 * h))) / (12.0 * h);
    };
    FGrad out;
    out.F = F_of(E, r);
    out.F_E = stencil([&](double d) { return F_of(E + d, r); });
    out.F_r = stencil([&](double d) { return F_of(E, r + d); });
    return out;
}

std::vector<Curve> level_curve(double E, double r, int n)
{
    if (n < 2) throw std::invalid_argument("level_curve needs n >= 2");
    if (!(E > -r && E < E_max(r))) throw std::invalid_argument("empty level set");
    const auto d = level_data(E, r);
    Curve c;
    c.reserve(n);
    for (int i = 0; i < n; ++i) {
        const double tau = -d.tau_p + 2.0 * d.tau_p * i / n;
        const double G = d.sigma * breve_G(d.kappa, d.sigma * tau);
        const double half = level_angle(E, r, G);
        // Top of the curve at tau = 0 sits at g = pi (E < 1) or g = 0 (E > 1);
        // positive tau moves towards negative g.
        double g = tau >= 0 ? -half : half;
        if (g <= -pi) g += 2.0 * pi;
        c.push_back({g, G});
    }
    if (d.kappa < 0) return {c};
    Curve mirror = c;
    for (auto& p : mirror) p.G = -p.G;
    return {c, mirror};
}

std::vector<CriticalPoint> critical_points(double r, int grid)
{
    auto grad = [r](double g, double G) {
        const double s = std::sqrt(1.0 - G * G);
        return Eigen::Vector2d(-r * s * std::sin(g), 2.0 * G - r * G * std::cos(g) / s);
    };
    auto hess = [r](double g, double G) {
        const double s = std::sqrt(1.0 - G * G);
        Eigen::Matrix2d H;
        H(0, 0) = -r * s * std::cos(g);
        H(0, 1) = H(1, 0) = r * G * std::sin(g) / s;
        H(1, 1) = 2.0 - r * std::cos(g) / (s * s * s);
        return H;
    };

    std::vector<CriticalPoint> out;
    for (int i = 0; i < grid; ++i) {
        for (int j = 1; j < grid; ++j) {
            double g = -pi + 2.0 * pi * (i + 0.5) / grid;
            double G = -1.0 + 2.0 * j / grid;
            bool ok = false;
            for (int it = 0; it < 60; ++it) {
                const Eigen::Vector2d step = hess(g, G).fullPivLu().solve(grad(g, G));
                if (!step.allFinite()) break;
                g -= step(0);
                G -= step(1);
                if (!(std::abs(G) < 1.0 - 1e-9)) break;
                if (step.norm() < 1e-14) {
                    ok = grad(g, G).norm() < 1e-10;
                    break;
                }
            }
            if (!ok) continue;
            g = std::remainder(g, 2.0 * pi);
            if (g <= -pi + 1e-9) g = pi;
            const bool seen = std::any_of(out.begin(), out.end(), [&](const CriticalPoint& p) {
                return std::abs(std::remainder(p.g - g, 2.0 * pi)) < 1e-7 && std::abs(p.G - G) < 1e-7;
            });
            if (seen) continue;
            const Eigen::Matrix2d H = hess(g, G);
            const double det = H.determinant();
            CriticalPoint p{g, G, euler_E(r, G, g), CriticalKind::Saddle};
            if (det > 0) p.kind = H(0, 0) > 0 ? CriticalKind::Minimum : CriticalKind::Maximum;
            out.push_back(p);
        }
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.E < b.E; });
    return out;
}

} // namespace qcnf
