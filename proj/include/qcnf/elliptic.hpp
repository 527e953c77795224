#pragma once

#include <stdexcept>

namespace qcnf {

// Smallest |kappa| accepted before the caller must switch to the
// logarithmic asymptotics.
inline constexpr double kKappaMin = 1e-12;

struct NearSeparatrix : std::domain_error {
    using std::domain_error::domain_error;
};

enum class Regime { Negative, UnitInterval };

struct KappaPoint {
    double kappa = 0.5;
    Regime regime = Regime::UnitInterval;

    // Throws NearSeparatrix for |kappa| < kappa_min, invalid_argument for kappa >= 1.
    static KappaPoint make(double kappa, double kappa_min = kKappaMin);
};

// Lower endpoint of the quadrature: sqrt(kappa) on (0, 1), 0 for kappa < 0.
double G0_of(double kappa);
// Quarter period: integral of 1 / sqrt((1 - xi^2)(xi^2 - kappa)) from G0 to 1.
double T0_of(double kappa);
// T0 on (0, 1), 2 T0 for kappa < 0.
double Tp_of(double kappa);

// Integral over t >= 0 of 1 / ((1 + beta t^2) sqrt((1 + t^2)(1 + kappa t^2))).
double j_beta(double beta, double kappa);

struct RS {
    double R = 0.0;
    double S = 0.0;
};
// R = -2 kappa T0', S = 4 kappa^2 T0'', from their half-line integrals.
RS RS_of(double kappa);

struct EllipticJet {
    double T0 = 0.0, T0p = 0.0, T0pp = 0.0;
    double A = 0.0, Ap = 0.0, App = 0.0;
    double Tp = 0.0;
    double R = 0.0, S = 0.0;
};

// Mean value A = rho_hat(T_p) / T_p with its first two kappa-derivatives.
EllipticJet calA_jet(double kappa);
double calA(double kappa);

// Solution of: integral from G to 1 of 1 / sqrt((1 - xi^2)(xi^2 - kappa)) = theta,
// extended to all theta by evenness and 2 T_p periodicity.
double breve_G(double kappa, double theta);

// G and its theta-derivative, the latter from the Jacobi functions so that
// it keeps full relative accuracy near the turning points.
struct BreveJet {
    double G = 0.0;
    double G3 = 0.0;
};
BreveJet breve_G_jet(double kappa, double theta);

// Inverse of G on [0, T_p]: theta with G(kappa, theta) = G, given 1 - G^2
// and G^2 - kappa separately so that digits survive near both turning points.
double breve_theta(double kappa, double G, double one_minus_G2, double G2_minus_kappa);

struct RhoValues {
    double rho_hat = 0.0;    // integral of G^2 from 0 to theta
    double rho_breve = 0.0;  // rho_hat - A theta, odd and 2 T_p periodic
};
RhoValues rho_funcs(double kappa, double theta);

// Unique root of G(kappa, theta)^2 = A(kappa) on (0, T0).
double theta_star(double kappa);

} // namespace qcnf
