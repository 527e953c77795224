#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "qcnf/elliptic.hpp"

namespace qcnf {

// Distance from the levels E = r and E = 1 below which chart-feeding
// calls refuse to evaluate.
inline constexpr double kLevelFloor = 1e-10;

// Smallest radicand accepted by the direct potential quadrature (squared
// distance between the two bodies).
inline constexpr double kCollisionFloor = 1e-24;

struct CollisionLocus : std::domain_error {
    using std::domain_error::domain_error;
};

// Mass coefficients of the averaged three-body Hamiltonian, the total
// angular momentum and the energy level.
struct PhysParams {
    double alpha = 1.0;
    double beta = 0.0;
    double C_total = 0.0;
    double c = 0.0;

    void validate() const;
};

// 0 < r < 1, 1 < r < 2, r > 2.
enum class Panel { A, B, C };

// Librations about the minima (pi, 0); rotations between the two separatrix
// levels; librations enclosing the central point (0, 0); librations about
// one of the side maxima (0, +-sqrt(1 - r^2/4)).
enum class Motion { LibrationMinimum, Rotation, LibrationCentral, LibrationSide };

std::string to_string(Panel p);
std::string to_string(Motion m);

struct LevelData {
    double E = 0.0, r = 0.0;
    double alpha_plus = 0.0, alpha_minus = 0.0;
    double sigma = 0.0, kappa = 0.0;
    double tau_p = 0.0;   // half-period in the time coordinate
    double action = 0.0;  // area enclosed (or its complement), over 2 pi
    double B = 0.0;       // secular drift rate of the radial momentum
    Panel panel = Panel::A;
    Motion motion = Motion::LibrationMinimum;
};

double euler_E(double r, double G, double g);

// Roots of x^2 - 2(E - r^2/2) x + E^2 - r^2 and the derived sigma, kappa,
// without any separatrix floor.
struct LevelRoots {
    double alpha_plus = 0.0, alpha_minus = 0.0;
    double sigma = 0.0, kappa = 0.0;
};
LevelRoots level_roots(double E, double r);
// Largest value of E at fixed r: 1 + r^2/4 for r <= 2, r beyond.
double E_max(double r);

// Throws NearSeparatrix within kLevelFloor of E = r or E = 1, and
// invalid_argument outside (-r, E_max(r)).
LevelData level_data(double E, double r);

struct ActionJet {
    double A = 0.0, A_E = 0.0, A_r = 0.0;
};
ActionJet action_jet(double E, double r);

// Limit of the action on the separatrix level E = r, for 0 <= r <= 2.
double sep_action(double r);
double sep_action_prime(double r);
// Inverse of sep_action on [0, 1] and its derivative.
double r_s(double A);
double r_s_prime(double A);

// Averaged potential by quadrature over the eccentric anomaly.
double U_direct(double r, double G, double g);

// Eccentricity of the ellipse at the top of the level curve, with sign.
double e_of(double E, double r);

struct FJet {
    double F = 0.0;
    double F_E = 0.0, F_r = 0.0;
    double F_EE = 0.0, F_Er = 0.0, F_rr = 0.0;
};

// F with U(r, G, g) = F(E(r, G, g), r). Uses the complete elliptic
// representation and falls back to the half-period quadrature where that
// representation degenerates. Throws NearSeparatrix near E = r.
double F_of(double E, double r);
// Half-period quadrature in the cosine variable.
double F_quadrature(double E, double r);
// F and its first and second derivatives, differentiated under the integral.
FJet F_jet(double E, double r);

struct FGrad {
    double F = 0.0, F_E = 0.0, F_r = 0.0;
};
// F and its first derivatives by fourth-order centered differences of F_of,
// step 1e-3 times the distance to the nearest singular level, and F_jet
// where the closed form degenerates (|e| < 0.05). Much cheaper than F_jet
// elsewhere; used inside vector fields.
FGrad F_gradient(double E, double r);

struct CurvePoint {
    double g = 0.0;
    double G = 0.0;
};
using Curve = std::vector<CurvePoint>;

// n points per connected component of {E(r, ., .) = E}, uniformly spaced in
// the time coordinate, g wrapped to (-pi, pi]. Librations about a side
// maximum and rotations come as a mirror pair under G -> -G; the other
// levels form a single closed curve.
std::vector<Curve> level_curve(double E, double r, int n);

enum class CriticalKind { Minimum, Saddle, Maximum };
std::string to_string(CriticalKind k);

struct CriticalPoint {
    double g = 0.0;
    double G = 0.0;
    double E = 0.0;
    CriticalKind kind = CriticalKind::Saddle;
};

// Critical points of E(r, ., .) on (-pi, pi] x (-1, 1), found by Newton from
// a grid of seeds and classified by the Hessian.
std::vector<CriticalPoint> critical_points(double r, int grid = 24);

} // namespace qcnf
