#include "qcnf/normal_form.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "qcnf/io.hpp"

namespace qcnf {

const char* to_string(HypothesisSet h)
{
    switch (h) {
    case HypothesisSet::Step: return "step";
    case HypothesisSet::SmoothStep: return "smooth_step";
    case HypothesisSet::Nft: return "nft";
    case HypothesisSet::Gnft: return "gnft";
    }
    return "?";
}

void StepParams::validate() const
{
    if (!(w.rho > 0 && w.tau > 0 && w.t > 0)) throw std::invalid_argument("StepParams: weights must be positive");
    if (!(u.r >= 0 && u.sigma >= 0 && u.s >= 0)) throw std::invalid_argument("StepParams: widths must be >= 0");
    if (!(s2 > 0)) throw std::invalid_argument("StepParams: s2 must be positive");
    if (p < 0) throw std::invalid_argument("StepParams: p must be >= 0");
    if (K < 0 || ell < 0 || ell > ell_star) throw std::invalid_argument("StepParams: need K >= 0, 0 <= ell <= ell_star");
    if (!(smoothing.c0 > 0 && smoothing.delta_exp >= 0))
        throw std::invalid_argument("StepParams: smoothing needs c0 > 0, delta >= 0");
}

double StepParams::cutoff_weight() const
{
    return 1.0 / (smoothing.c0 * std::pow(static_cast<double>(K), 1.0 + smoothing.delta_exp));
}

bool StepDiagnostics::all_hold() const
{
    for (const auto& h : checks)
        if (!h.holds) return false;
    return true;
}

std::string StepDiagnostics::first_failure() const
{
    for (const auto& h : checks)
        if (!h.holds) {
            std::ostringstream os;
            os << to_string(set) << ": " << h.name << " = " << h.value << (h.strict ? " !< " : " !<= ") << h.bound;
            return os.str();
        }
    return {};
}

namespace {

double sup_ratio(const ScalarField& num, const ScalarField& v)
{
    const int K = v.domain()->K();
    return (num.coeffs().row(K).real().array() / v.coeffs().row(K).real().array()).abs().maxCoeff();
}

bool is_smooth(HypothesisSet s)
{
    return s == HypothesisSet::SmoothStep || s == HypothesisSet::Gnft;
}

void add(StepDiagnostics& d, const char* name, double value, double bound, bool strict)
{
    const bool ok = std::isfinite(value) && (strict ? value < bound : value <= bound);
    d.checks.push_back({name, value, bound, strict, ok});
}

} // namespace

DriverNorms driver_norms(const DriverField& drv)
{
    drv.validate();
    DriverNorms n;
    const ScalarField one = ScalarField::constant(drv.domain(), 1.0);
    n.inv_v = sup_ratio(one, drv.v);
    n.omega_v = sup_ratio(drv.omega, drv.v);
    n.dy_v = sup_ratio(d_y(drv.v), drv.v);
    n.dy_omega = sup_ratio(d_y(drv.omega), drv.v);
    n.dI_v = sup_ratio(d_I(drv.v), drv.v);
    n.dI_omega = sup_ratio(d_I(drv.omega), drv.v);
    return n;
}

MeasuredExponents measured_exponents(const DriverField& drv, double diam, double margin)
{
    const DriverNorms n = driver_norms(drv);
    constexpr double floor = 1e-12;
    return {std::max(margin * diam * n.omega_v, floor), std::max(margin * diam * n.dy_v, floor)};
}

double perturbation_norm(const VectorField3& P, const Widths& u, const Weights& w, HypothesisSet set)
{
    return is_smooth(set) ? vf_sup_norm(P, w) : vf_norm(P, u, w);
}

StepDiagnostics check_step_hypotheses(const DriverField& drv, const VectorField3& P, const StepParams& params,
                                      HypothesisSet set)
{
    params.validate();
    const DriverNorms n = driver_norms(drv);
    const auto& u = params.u;
    const auto& w = params.w;
    const double s1 = params.s1, s2 = params.s2;

    StepDiagnostics d;
    d.set = set;
    d.diam = drv.domain()->spec().Y_interval.length() + 2.0 * u.sigma;
    const double diam = d.diam;
    const double pn = perturbation_norm(P, u, w, set);
    d.norm_P_before = pn;

    if (!is_smooth(set)) {
        d.Q = 3.0 * diam * n.inv_v;
        d.chi = diam / s2 * n.dy_v;
        d.theta1 = 2.0 * std::exp(s2) * diam * n.dy_omega * w.tau / w.t;
        d.theta2 = 4.0 * diam * n.dI_v * w.rho / w.tau;
        d.theta3 = 8.0 * diam * n.dI_omega * w.rho / w.t;
        d.eta_drift = diam / w.t * n.omega_v;
        d.contraction_bound = 8.0 * std::exp(s2) * d.Q * pn * pn;
        if (set == HypothesisSet::Step) {
            add(d, "rho < r/4", w.rho, u.r / 4, true);
            add(d, "tau < sigma e^{-s2}/4", w.tau, u.sigma * std::exp(-s2) / 4, true);
            add(d, "t < s/5", w.t, u.s / 5, true);
            add(d, "diam |omega/v| / t", d.eta_drift, 1.0, false);
            d.eta_pert = 2.0 * d.Q * pn;
            d.eta = d.eta_pert;
            add(d, "2 Q |P|", d.eta_pert, 1.0, true);
        } else {
            add(d, "rho < r/8", w.rho, u.r / 8, true);
            add(d, "tau < sigma e^{-s2}/8", w.tau, u.sigma * std::exp(-s2) / 8, true);
            add(d, "t < s/10", w.t, u.s / 10, true);
            d.eta_pert = 128.0 * std::exp(2 * s2) * d.Q * d.Q * pn * pn;
            d.eta = std::max(d.eta_drift, d.eta_pert);
            add(d, "eta^2", d.eta, params.p > 0 ? 1.0 / params.p : INFINITY, true);
        }
    } else {
        const double CK = 1.0 / params.cutoff_weight();
        d.Q = 3.0 * std::exp(s1) * diam * n.inv_v;
        d.chi = std::max(diam / s1 * n.omega_v, diam / s2 * n.dy_v);
        d.theta1 = 2.0 * std::exp(s1 + s2) * diam * n.dy_omega * CK * w.tau;
        d.theta2 = 4.0 * std::exp(s1) * diam * n.dI_v * w.rho / w.tau;
        d.theta3 = 8.0 * std::exp(s1) * diam * n.dI_omega * CK * w.rho;
        d.eta_drift = diam / s1 * n.omega_v;
        d.contraction_bound = 8.0 * std::exp(s2) * d.Q * pn * pn +
                              params.smoothing.c0 *
                                  std::pow(static_cast<double>(params.K), -params.ell + params.smoothing.delta_exp) *
                                  vf_smooth_norm(P, w, params.ell, params.ell_star);
        if (set == HypothesisSet::SmoothStep) {
            add(d, "rho < r/4", w.rho, u.r / 4, true);
            add(d, "tau < sigma e^{-s2}/4", w.tau, u.sigma * std::exp(-s2) / 4, true);
            d.eta_pert = 2.0 * d.Q * pn;
            d.eta = d.eta_pert;
            add(d, "2 Q |P|", d.eta_pert, 1.0, true);
        } else {
            add(d, "rho < r/8", w.rho, u.r / 8, true);
            add(d, "tau < sigma e^{-s2}/8", w.tau, u.sigma * std::exp(-s2) / 8, true);
            d.eta_pert = 16.0 * std::exp(s2) * d.Q * pn;
            d.eta = d.eta_pert;
            add(d, "eta", d.eta, params.p > 0 ? 1.0 / std::sqrt(params.p) : INFINITY, true);
        }
    }
    add(d, "chi", d.chi, 1.0, false);
    add(d, "theta1", d.theta1, 1.0, false);
    add(d, "theta2", d.theta2, 1.0, false);
    add(d, "theta3", d.theta3, 1.0, false);
    return d;
}

StepResult nf_step(const DriverField& drv, const VectorField3& P, const StepParams& params, HypothesisSet set)
{
    if (set != HypothesisSet::Step && set != HypothesisSet::SmoothStep)
        throw std::invalid_argument("nf_step: expects a step hypothesis set");
    StepResult res;
    res.diag = check_step_hypotheses(drv, P, params, set);
    if (!res.diag.all_hold() && !params.best_effort) throw HypothesisFailure(res.diag.first_failure());

    const bool smooth = is_smooth(set);
    const auto& u = params.u;
    const auto& w = params.w;
    res.u_plus = {u.r - 4 * w.rho, u.sigma - 4 * w.tau * std::exp(params.s2), smooth ? 0.0 : u.s - 5 * w.t};

    const double pn = res.diag.norm_P_before;
    if (pn == 0.0) {
        res.P_plus = P;
        res.Y = VectorField3::zero(P.domain());
        return res;
    }
    const auto sol = solve_homological(drv, smooth ? truncate(P, params.K) : P);
    res.Y = sol.Y;
    res.diag.homological_residual = sol.relative_residual;
    const VfNorm norm = [&](const VectorField3& Z) { return perturbation_norm(Z, u, w, set); };
    res.diag.q = 3.0 * norm(res.Y);

    const VectorField3 X = drv.as_vector() + P;
    const auto lie = lie_series(res.Y, X, res.diag.q, norm, params.lie_tol * pn / norm(X));
    res.diag.lie_terms = lie.terms;
    res.P_plus = P + lie.increment;
    for (int i = 0; i < 3; ++i) res.P_plus[i] = real_part(res.P_plus[i]);
    res.diag.norm_P_after = perturbation_norm(res.P_plus, res.u_plus, w, set);
    return res;
}

namespace {

HistoryRow row_from(int step, double norm, const StepDiagnostics& d, std::string branch = {})
{
    return {step, norm, d.Q, d.chi, d.theta1, d.theta2, d.theta3, d.eta, std::move(branch)};
}

// Shared driver of both theorems: one base step with the full weights, then
// p inner steps with weights w0 / p and the width schedule of the proof.
IterationResult iterate(const DriverField& drv, const VectorField3& P0, const StepParams& params, bool smooth)
{
    params.validate();
    const HypothesisSet theorem = smooth ? HypothesisSet::Gnft : HypothesisSet::Nft;
    const HypothesisSet step = smooth ? HypothesisSet::SmoothStep : HypothesisSet::Step;
    StepParams base = params;
    if (smooth) {
        base.w.t = params.cutoff_weight();
        base.u.s = 0.0;
    }
    const Weights w0 = base.w;

    IterationResult out;
    out.initial = check_step_hypotheses(drv, P0, base, theorem);
    const double n0 = out.initial.norm_P_before;
    out.history.push_back(row_from(0, n0, out.initial));
    out.P_star = P0;
    out.u_star = base.u;
    if (!out.initial.all_hold()) {
        out.failed_step = 0;
        out.failure = out.initial.first_failure();
        if (!params.best_effort) throw HypothesisFailure("step 0: " + out.failure);
    }

    auto run = [&](int index, const StepParams& sp) -> bool {
        StepParams guarded = sp;
        guarded.best_effort = false;
        try {
            auto r = nf_step(drv, out.P_star, guarded, step);
            out.P_star = std::move(r.P_plus);
            out.u_star = r.u_plus;
            out.history.push_back(row_from(index, perturbation_norm(out.P_star, out.u_star, w0, step), r.diag));
            return true;
        } catch (const HypothesisFailure& e) {
            if (out.failed_step < 0) {
                out.failed_step = index;
                out.failure = e.what();
            }
            if (!params.best_effort) throw HypothesisFailure("step " + std::to_string(index) + ": " + e.what());
            return false;
        }
    };

    bool ok = run(1, base);
    if (ok && params.p > 0) {
        StepParams inner = base;
        inner.w = w0.scaled(1.0 / params.p);
        for (int j = 1; j <= params.p && ok; ++j) {
            inner.u = out.u_star;
            ok = run(j + 1, inner);
        }
    }
    out.completed = ok;
    const double nstar = perturbation_norm(out.P_star, out.u_star, w0, step);
    out.final_ratio = n0 > 0 ? nstar / n0 : 0.0;

    if (!smooth) {
        out.branch = "geometric";
        out.final_bound_holds = nstar < std::ldexp(n0, -(params.p + 1)) || n0 == 0.0;
    } else {
        const double c0 = params.smoothing.c0, delta = params.smoothing.delta_exp;
        const double K = params.K;
        // Weighted smooth norms of P_0 for every admissible order.
        std::vector<double> smooth(params.ell_star + 1, 0.0);
        const double inv_w[3] = {1 / w0.rho, 1 / w0.tau, 1 / w0.t};
        for (int i = 0; i < 3; ++i) {
            const auto sups = derivative_sups(P0[i], params.ell_star);
            double m = 0.0;
            for (int ell = 0; ell <= params.ell_star; ++ell) {
                m = std::max(m, sups[ell]);
                smooth[ell] += inv_w[i] * m;
            }
        }
        auto cutoff = [&](int ell) { return 2 * c0 * std::pow(K, -ell + delta) * smooth[ell]; };
        out.predicted_geometric = std::ldexp(n0, -(params.p + 1));
        out.predicted_cutoff = cutoff(params.ell);
        out.predicted_cutoff_best = out.predicted_cutoff;
        out.best_ell = params.ell;
        for (int ell = 0; ell <= params.ell_star; ++ell) {
            const double c = cutoff(ell);
            if (c < out.predicted_cutoff_best) {
                out.predicted_cutoff_best = c;
                out.best_ell = ell;
            }
        }
        out.remainder_floor = vf_sup_norm(remainder(P0, params.K), w0);
        out.branch = out.predicted_geometric >= out.predicted_cutoff ? "geometric" : "cutoff";
        out.final_bound_holds = nstar <= std::max(out.predicted_geometric, out.predicted_cutoff);
    }
    for (auto& row : out.history) row.branch = out.branch;
    return out;
}

} // namespace

IterationResult nft_iterate(const DriverField& drv, const VectorField3& P0, const StepParams& params)
{
    return iterate(drv, P0, params, false);
}

IterationResult gnft_iterate(const DriverField& drv, const VectorField3& P0, const StepParams& params)
{
    if (params.K < 1) throw std::invalid_argument("gnft_iterate: cutoff K must be >= 1");
    if (params.K > P0.domain()->K()) throw std::invalid_argument("gnft_iterate: K exceeds the represented modes");
    return iterate(drv, P0, params, true);
}

std::string IterationResult::history_csv() const
{
    CsvTable t({"step", "norm_P", "Q", "chi", "theta1", "theta2", "theta3", "eta", "branch"});
    for (const auto& r : history)
        t.add_row({std::to_string(r.step), fmt_num(r.norm_P), fmt_num(r.Q), fmt_num(r.chi), fmt_num(r.theta1),
                   fmt_num(r.theta2), fmt_num(r.theta3), fmt_num(r.eta), r.branch});
    return t.str();
}

} // namespace qcnf
