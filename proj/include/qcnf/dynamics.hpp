#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qcnf/charts.hpp"

namespace qcnf {

// ---------------------------------------------------------------- Hamiltonian

enum class PotentialSource { Representation, Direct };

// R^2/2 + (C - G)^2/(2 r^2) - alpha U - beta/r on Delaunay (R, G, r, g), with
// U = F(E(r, G, g), r) or the direct average. Throws CollisionLocus on the
// separatrix level E = r.
double hamiltonian(const Vec4& delaunay, const PhysParams& phys,
                   PotentialSource source = PotentialSource::Representation);

// Hamilton equations (dR, dG, dr, dg)/dt of hamiltonian().
Vec4 hamiltonian_field(const Vec4& delaunay, const PhysParams& phys);

// ---------------------------------------------------------------- schedule

struct ExperimentParams {
    double L = 4.0;
    double xi = 0.05;
    double c_plus = 0.8, c_minus = 0.4;
    double c1 = 0.5, C1 = 2.0;
    int k = 1;       // +1 outer side, -1 inner side
    int branch = 1;  // sign of the reduced radial momentum
    PhysParams phys;
    double delta_loc = 0.0;           // localization width around psi_circ
    double smoothing_exponent = 0.5;  // exponent in the Fourier cutoff K
    double bump_sharpness = 0.5;      // zeta of the bump, in units of (b - a)^2
    double tol = 1e-10;
    std::uint64_t seed = 1;
    // Exit window W: the plateau |psi - psi_circ| < delta_loc/4 of the
    // window (default), or the full window with psi on the whole torus.
    bool plateau_window = true;

    // Throws invalid_argument when a schedule inequality fails.
    void validate() const;
};

// Schedule quantities derived from L and xi.
struct Schedule {
    double L_minus = 0.0, L_plus = 0.0;
    double eps_plus = 0.0, eps_minus = 0.0;
    double s1 = 0.0, s2 = 0.0;
    double K = 0.0;
    double C_cap = 0.0, beta_cap = 0.0, delta_cap = 0.0;
    double eps_apriori = 0.0;  // L^3 e^{-4L} times the prefactor C1
    // Window: A_lo < A <= A_hi, y_lo <= k y <= y_hi.
    double A_lo = 0.0, A_hi = 0.0, y_lo = 0.0, y_hi = 0.0;
};
Schedule schedule(const ExperimentParams& params);

// Defaults at a given L and xi: C, beta and delta_loc at half their caps,
// alpha = 1, c = 0.
ExperimentParams default_experiment(double L, int k = 1, double xi = 0.05);

bool in_window(const Schedule& s, int k, double A, double y);
// Membership in the exit window W of the drift experiment.
bool in_exit_window(const ExperimentParams& params, const Schedule& s, double A, double y, double psi);

// ---------------------------------------------------------------- reduced field

// r_circ(A, y) = r_s(A) - k e^{-k y}.
double r_circ(double A, double y, int k);

// Family of Euler motions on the k side of the separatrix at r.
Motion window_family(double r, int k);

// branch * sqrt(2(c + alpha F* - (C - G*)^2/(2 r^2) + beta/r)) at r = r_circ.
// Throws domain_error when the radicand is negative.
double Y_cal(double A, double y, double psi, const PhysParams& phys, int k = 1, int branch = 1);
// The radicand itself.
double Y_radicand(double A, double y, double psi, const PhysParams& phys, int k = 1);

using Vec3 = std::array<double, 3>;

struct SplitField {
    Vec3 X{}, N{}, P{};
    double v = 0.0, omega = 0.0;
};

// X on (A, y, psi) in the rescaled time dt/dt' = e^{-2 k y}, split as
// N = (0, v, omega) and P assembled term by term.
SplitField X_split(double A, double y, double psi, const PhysParams& phys, int k = 1, int branch = 1);

// Same with star fields supplied; exposed so that P can be audited with
// individual terms forced to zero.
SplitField X_split_from(const StarFields& star, double F1, double A, double y, const PhysParams& phys, int k,
                        int branch);

// Zero of rho*_3 on the level (A, r_circ(A, y)).
double psi_circ(double A, double y, int k = 1);

// Even bump: 1 on |theta| <= a, 0 on |theta| >= b, smooth in between with
// the exponential profile of sharpness zeta (in units of (b - a)^2).
double bump(double theta, double a, double b, double zeta = 0.5);

// P times bump(psi - psi_circ) with a = delta/4, b = delta/2.
Vec3 localize(const Vec3& P, double A, double y, double psi, double delta, int k = 1, double zeta = 0.5);

// Delaunay point of the reduced state (A, y, psi) on the energy level c.
Vec4 reduced_to_delaunay(double A, double y, double psi, const PhysParams& phys, int k = 1, int branch = 1);
// Inverse: (A, y, psi) of a Delaunay point.
Vec3 delaunay_to_reduced(const Vec4& delaunay, int k = 1);

// ---------------------------------------------------------------- integration

using State = std::vector<double>;
using Field = std::function<void(const State& q, State& dq, double t)>;

struct IntegrateOptions {
    double t_max = 1.0;
    double tol = 1e-10;
    double dt0 = 1e-3;
    // Orbit stops at the first time inside() turns false.
    std::function<bool(const State&)> inside;
    // Tracked when set; energy_drift is the largest deviation from the start.
    std::function<double(const State&)> energy;
    // Extra times at which the dense output is recorded.
    std::vector<double> observe;
    double exit_resolution = 1e-10;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<State> states;
    std::vector<State> observed;  // one per IntegrateOptions::observe entry reached
    std::optional<double> exit_time;
    double energy_drift = 0.0;
    bool step_underflow = false;
};

// Dormand-Prince 5(4) with dense output; the exit time is located by
// bisection on the interpolant.
Trajectory integrate(const Field& field, const State& q0, const IntegrateOptions& options);

// ---------------------------------------------------------------- experiments

struct OrbitReport {
    double A0 = 0.0, y0 = 0.0, psi0 = 0.0;
    double max_dA = 0.0;
    double exit_time = 0.0;
    double bound = 0.0;  // eps * exit_time
    double ratio = 0.0;  // max_dA / bound
    double energy_drift = 0.0;
    bool dominated = false;  // |A(t) - A(0)| <= eps t at every recorded t
    bool exited = false;
};

struct DriftReport {
    double L = 0.0;
    double eps_measured = 0.0;  // grid sup of |P_1| over the window
    double eps_schedule = 0.0;
    std::vector<OrbitReport> orbits;
    double aggregate_ratio = 0.0;
    double max_energy_drift = 0.0;
    bool all_dominated = false;
    std::string reason;  // set when no orbit could be run
};

// Grid sup of |P_1| over the exit window W.
double sup_P1(const ExperimentParams& params, int n_A = 6, int n_y = 6, int n_psi = 33);

DriftReport drift_experiment(const ExperimentParams& params, int n_orbits, int threads = 1);

// Largest distance in (A, y, psi) between the rescaled reduced orbit and the
// Delaunay orbit of hamiltonian() from the same point, matched through the
// time change; an upper bound for their Hausdorff distance.
struct ReparametrizationCheck {
    double distance = 0.0;
    double energy_drift = 0.0;  // of hamiltonian() along the Delaunay orbit
    int samples = 0;
};
ReparametrizationCheck reparametrization_check(const ExperimentParams& params, double A0, double y0, double psi0,
                                               double t_end);

struct BoundRow {
    std::string quantity;
    double measured = 0.0;
    double rhs = 0.0;  // right-hand side of the bound with the constant set to 1
    bool ok = false;   // both sides finite
};

struct BoundsReport {
    std::vector<BoundRow> rows;
    bool Lm_holds = false;  // L_- >= alpha^{-1} max{|c|, C^2, eps_+, beta}
};

BoundsReport bounds_report(const ExperimentParams& params, int n_A = 4, int n_y = 4, int n_psi = 9);

} // namespace qcnf
