#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "qcnf/homological.hpp"

namespace qcnf {

// Which set of hypotheses is evaluated.
enum class HypothesisSet {
    Step,         // analytic step lemma
    SmoothStep,   // step lemma with ultraviolet cutoff
    Nft,          // analytic normal form theorem
    Gnft,         // smooth-in-psi normal form theorem
};

const char* to_string(HypothesisSet h);

struct StepParams {
    Widths u;
    Weights w;
    double s1 = 0.0;
    double s2 = 0.0;
    int p = 1;
    int K = 0;
    int ell = 0;
    SmoothingParams smoothing;
    int ell_star = kDefaultEllStar;
    // Return partial results instead of throwing when a hypothesis fails.
    bool best_effort = false;
    // Lie series stops once two consecutive terms fall below lie_tol |P|.
    double lie_tol = 1e-14;

    void validate() const;
    // Third weight of the smooth theorem: 1 / (c0 K^{1 + delta}).
    double cutoff_weight() const;
};

struct Hypothesis {
    std::string name;
    double value = 0.0;
    double bound = 0.0;
    bool strict = false;
    bool holds = false;
};

// Sup norms over the real grid of the driver ratios entering every bound.
struct DriverNorms {
    double inv_v = 0.0;
    double omega_v = 0.0;
    double dy_v = 0.0;
    double dy_omega = 0.0;
    double dI_v = 0.0;
    double dI_omega = 0.0;
};

DriverNorms driver_norms(const DriverField& drv);

// Smallest s1, s2 making the two existence ratios equal to 1 / margin.
struct MeasuredExponents {
    double s1 = 0.0;
    double s2 = 0.0;
};
MeasuredExponents measured_exponents(const DriverField& drv, double diam, double margin = 1.01);

struct StepDiagnostics {
    HypothesisSet set = HypothesisSet::Step;
    double diam = 0.0;
    double Q = 0.0;
    double chi = 0.0;
    double theta1 = 0.0;
    double theta2 = 0.0;
    double theta3 = 0.0;
    double eta = 0.0;            // eta^2 for the analytic theorem, eta for the smooth one
    double eta_drift = 0.0;      // diam / t |omega / v| part of the analytic eta^2
    double eta_pert = 0.0;       // perturbation part
    double q = 0.0;              // 3 |||Y|||, filled by nf_step
    double norm_P_before = 0.0;
    double norm_P_after = 0.0;
    double contraction_bound = 0.0;
    double homological_residual = 0.0;
    int lie_terms = 0;
    std::vector<Hypothesis> checks;

    bool all_hold() const;
    // Empty when every hypothesis holds.
    std::string first_failure() const;
};

struct HypothesisFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Perturbation norm used by a hypothesis set: Fourier-weighted for the
// analytic sets, sup-based for the smooth ones.
double perturbation_norm(const VectorField3& P, const Widths& u, const Weights& w, HypothesisSet set);

StepDiagnostics check_step_hypotheses(const DriverField& drv, const VectorField3& P, const StepParams& params,
                                      HypothesisSet set);

struct StepResult {
    VectorField3 P_plus;
    VectorField3 Y;
    StepDiagnostics diag;
    Widths u_plus;
};

// One normalization step. Smooth sets solve the cutoff equation L_N Y = T_K P.
StepResult nf_step(const DriverField& drv, const VectorField3& P, const StepParams& params,
                   HypothesisSet set = HypothesisSet::Step);

struct HistoryRow {
    int step = 0;
    double norm_P = 0.0;   // measured at the step's widths with the base weights
    double Q = 0.0;
    double chi = 0.0;
    double theta1 = 0.0;
    double theta2 = 0.0;
    double theta3 = 0.0;
    double eta = 0.0;
    std::string branch;
};

struct IterationResult {
    VectorField3 P_star;
    Widths u_star;
    std::vector<HistoryRow> history;
    StepDiagnostics initial;
    bool completed = false;
    int failed_step = -1;
    std::string failure;
    double final_ratio = 0.0;      // |P_*| / |P_0|
    bool final_bound_holds = false;

    // Smooth theorem only.
    double predicted_geometric = 0.0;  // 2^{-(p+1)} |P_0|
    double predicted_cutoff = 0.0;     // 2 c0 K^{-ell+delta} |P_0|_{ell}
    double predicted_cutoff_best = 0.0;  // minimum over 0 <= ell <= ell_star
    int best_ell = 0;
    double remainder_floor = 0.0;      // |R_K P_0|
    std::string branch;                // "geometric" or "cutoff"

    std::string history_csv() const;
};

IterationResult nft_iterate(const DriverField& drv, const VectorField3& P0, const StepParams& params);
IterationResult gnft_iterate(const DriverField& drv, const VectorField3& P0, const StepParams& params);

} // namespace qcnf
