#include "qcnf/dynamics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <thread>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/numeric/odeint.hpp>

namespace qcnf {

using std::numbers::pi;

namespace {

void check_k(int k)
{
    if (k != 1 && k != -1) throw std::invalid_argument("k must be +1 or -1");
}

void check_branch(int branch)
{
    if (branch != 1 && branch != -1) throw std::invalid_argument("branch must be +1 or -1");
}

double wrap(double angle)
{
    return std::remainder(angle, 2.0 * pi);
}

} // namespace

// ---------------------------------------------------------------- Hamiltonian

double hamiltonian(const Vec4& delaunay, const PhysParams& phys, PotentialSource source)
{
    const auto [R, G, r, g] = delaunay;
    double U = 0.0;
    if (source == PotentialSource::Direct) {
        U = U_direct(r, G, g);
    } else {
        try {
            U = F_of(euler_E(r, G, g), r);
        } catch (const NearSeparatrix& e) {
            throw CollisionLocus(e.what());
        }
    }
    const double m = phys.C_total - G;
    return R * R / 2.0 + m * m / (2.0 * r * r) - phys.alpha * U - phys.beta / r;
}

Vec4 hamiltonian_field(const Vec4& delaunay, const PhysParams& phys)
{
    const auto [R, G, r, g] = delaunay;
    const double E = euler_E(r, G, g);
    FGrad F;
    try {
        F = F_gradient(E, r);
    } catch (const NearSeparatrix& e) {
        throw CollisionLocus(e.what());
    }
    const double root = std::sqrt(1.0 - G * G);
    const double cg = std::cos(g), sg = std::sin(g);
    const double E_G = 2.0 * G - r * G * cg / root;
    const double E_r = root * cg;
    const double E_g = -r * root * sg;
    const double m = phys.C_total - G;

    const double H_G = -m / (r * r) - phys.alpha * F.F_E * E_G;
    const double H_r = -m * m / (r * r * r) - phys.alpha * (F.F_E * E_r + F.F_r) + phys.beta / (r * r);
    const double H_g = -phys.alpha * F.F_E * E_g;
    return {-H_r, -H_g, R, H_G};
}

// ---------------------------------------------------------------- schedule

void ExperimentParams::validate() const
{
    phys.validate();
    check_k(k);
    check_branch(branch);
    if (!(L > 1.0)) throw std::invalid_argument("L must exceed 1");
    if (!(xi > 0.0 && xi < 1.0)) throw std::invalid_argument("xi must lie in (0, 1)");
    if (!(0.0 < c_minus && c_minus < c_plus && c_plus < 1.0))
        throw std::invalid_argument("need 0 < c_minus < c_plus < 1");
    if (!(0.0 < c1 && c1 < 1.0 && C1 > 1.0)) throw std::invalid_argument("need 0 < c1 < 1 < C1");
    if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
    const auto s = schedule(*this);
    if (!(std::abs(phys.C_total) < s.C_cap)) throw std::invalid_argument("|C| must stay below c1 L^2 e^{-2L}");
    if (!(phys.beta < s.beta_cap)) throw std::invalid_argument("beta must stay below c1 L^4 e^{-4L}");
    if (!(delta_loc > 0.0 && delta_loc < s.delta_cap))
        throw std::invalid_argument("delta_loc must lie in (0, c1 L^{3/2} e^{-L})");
}

Schedule schedule(const ExperimentParams& p)
{
    Schedule s;
    const double L = p.L;
    s.L_minus = L;
    s.L_plus = L + 10.0 * p.xi;
    s.eps_plus = p.c_plus * L * L * std::exp(-2.0 * L);
    s.eps_minus = p.c_minus * L * L * std::exp(-2.0 * L);
    s.s1 = p.C1 * p.xi * std::pow(L, -1.5);
    s.s2 = p.C1 * p.xi;
    s.K = std::floor(std::pow(p.c1 / (p.xi * std::sqrt(L)), 1.0 / (1.0 + p.smoothing_exponent)));
    s.C_cap = p.c1 * L * L * std::exp(-2.0 * L);
    s.beta_cap = p.c1 * std::pow(L, 4) * std::exp(-4.0 * L);
    s.delta_cap = p.c1 * std::pow(L, 1.5) * std::exp(-L);
    s.eps_apriori = p.C1 * L * L * L * std::exp(-4.0 * L);
    s.A_lo = 1.0 - 2.0 * s.eps_plus;
    s.A_hi = 1.0 - 2.0 * s.eps_minus;
    s.y_lo = s.L_minus + 2.0 * p.xi;
    s.y_hi = s.L_plus - 2.0 * p.xi;
    return s;
}

ExperimentParams default_experiment(double L, int k, double xi)
{
    ExperimentParams p;
    p.L = L;
    p.k = k;
    p.xi = xi;
    const auto s = schedule(p);
    p.phys.alpha = 1.0;
    p.phys.c = 0.0;
    p.phys.C_total = 0.5 * s.C_cap;
    p.phys.beta = 0.5 * s.beta_cap;
    p.delta_loc = 0.5 * s.delta_cap;
    return p;
}

bool in_window(const Schedule& s, int k, double A, double y)
{
    const double ky = k * y;
    return A > s.A_lo && A <= s.A_hi && ky >= s.y_lo && ky <= s.y_hi;
}

// ---------------------------------------------------------------- reduced field

bool in_exit_window(const ExperimentParams& params, const Schedule& s, double A, double y, double psi)
{
    if (!in_window(s, params.k, A, y)) return false;
    return !params.plateau_window || std::abs(wrap(psi - psi_circ(A, y, params.k))) < params.delta_loc / 4.0;
}

double r_circ(double A, double y, int k)
{
    check_k(k);
    return r_s(A) - k * std::exp(-k * y);
}

Motion window_family(double r, int k)
{
    return separatrix_family(r, k);
}

namespace {

struct Reduced {
    double rs = 0.0, rs_prime = 0.0, r = 0.0;
    Motion family = Motion::LibrationSide;
    StarFields star;
    FGrad F;
    double F1 = 0.0;  // dF*/dA at fixed r
};

Reduced reduce(double A, double y, double psi, int k)
{
    check_k(k);
    Reduced out;
    out.rs = r_s(A);
    out.rs_prime = 1.0 / sep_action_prime(out.rs);
    out.r = out.rs - k * std::exp(-k * y);
    out.family = window_family(out.r, k);
    out.star = star_fields(A, out.r, psi, out.family);
    out.F = F_gradient(out.star.E, out.r);
    // dE/dA = pi / tau_p = sigma / Tp_hat.
    out.F1 = out.F.F_E * out.star.sigma / out.star.Tp_hat;
    return out;
}

// 2(c + alpha F) and the remaining part of the radicand.
struct Radicand {
    double driving = 0.0, rest = 0.0;
};

Radicand radicand_parts(const StarFields& star, double F, double r, const PhysParams& phys)
{
    const double m = phys.C_total - star.G;
    return {2.0 * (phys.c + phys.alpha * F), 2.0 * (-m * m / (2.0 * r * r) + phys.beta / r)};
}

} // namespace

double Y_radicand(double A, double y, double psi, const PhysParams& phys, int k)
{
    const auto red = reduce(A, y, psi, k);
    const auto parts = radicand_parts(red.star, red.F.F, red.r, phys);
    return parts.driving + parts.rest;
}

double Y_cal(double A, double y, double psi, const PhysParams& phys, int k, int branch)
{
    check_branch(branch);
    const double rad = Y_radicand(A, y, psi, phys, k);
    if (rad < 0.0) throw std::domain_error("energy level not reachable at this point: negative radicand");
    return branch * std::sqrt(rad);
}

SplitField X_split_from(const StarFields& star, double F1, double A, double y, const PhysParams& phys, int k,
                        int branch)
{
    check_k(k);
    check_branch(branch);
    const double rs = r_s(A);
    const double rs_prime = 1.0 / sep_action_prime(rs);
    const double r = rs - k * std::exp(-k * y);
    const double F = F_of(star.E, r);
    const auto parts = radicand_parts(star, F, r, phys);
    const double rad = parts.driving + parts.rest;
    if (rad < 0.0) throw std::domain_error("energy level not reachable at this point: negative radicand");
    if (parts.driving < 0.0) throw std::domain_error("driving speed undefined: c + alpha F < 0");
    const double Y = branch * std::sqrt(rad);
    const double drive = std::sqrt(parts.driving);

    const double e1 = std::exp(-k * y), e2 = e1 * e1;
    const double q = (phys.C_total - star.G) / (r * r);

    SplitField s;
    s.X[0] = e2 * q * star.G3 - e2 * star.rho3 * Y;
    s.X[1] = -e1 * q * star.G3 * rs_prime + e1 * (1.0 + star.rho3 * rs_prime) * Y;
    s.X[2] = -phys.alpha * e2 * F1 - e2 * q * star.G1 + e2 * star.rho1 * Y;

    s.v = branch * e1 * drive;
    s.omega = -phys.alpha * e2 * F1;
    s.N = {0.0, s.v, s.omega};

    // Y - branch * drive as a difference quotient, exact when rest -> 0.
    const double gap = branch * parts.rest / (std::abs(Y) + drive);
    s.P[0] = e2 * q * star.G3 - e2 * star.rho3 * Y;
    s.P[1] = -e1 * q * star.G3 * rs_prime + e1 * star.rho3 * rs_prime * Y + e1 * gap;
    s.P[2] = -e2 * q * star.G1 + e2 * star.rho1 * Y;
    return s;
}

SplitField X_split(double A, double y, double psi, const PhysParams& phys, int k, int branch)
{
    const auto red = reduce(A, y, psi, k);
    return X_split_from(red.star, red.F1, A, y, phys, k, branch);
}

double psi_circ(double A, double y, int k)
{
    const double r = r_circ(A, y, k);
    return psi_zero(A, r, window_family(r, k));
}

double bump(double theta, double a, double b, double zeta)
{
    if (!(0.0 < a && a < b)) throw std::invalid_argument("bump needs 0 < a < b");
    if (!(zeta > 0.0)) throw std::invalid_argument("bump sharpness must be positive");
    const double t = std::abs(theta);
    if (t <= a) return 1.0;
    if (t >= b) return 0.0;
    using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
    const auto profile = [zeta](double u) {
        const double w = u * (1.0 - u);
        return w > 0.0 ? std::exp(-zeta / w) : 0.0;
    };
    const double total = GK::integrate(profile, 0.0, 1.0, 10, 1e-14);
    const double part = GK::integrate(profile, 0.0, (t - a) / (b - a), 10, 1e-14);
    return std::clamp(1.0 - part / total, 0.0, 1.0);
}

Vec3 localize(const Vec3& P, double A, double y, double psi, double delta, int k, double zeta)
{
    const double chi = bump(wrap(psi - psi_circ(A, y, k)), delta / 4.0, delta / 2.0, zeta);
    return {chi * P[0], chi * P[1], chi * P[2]};
}

Vec4 reduced_to_delaunay(double A, double y, double psi, const PhysParams& phys, int k, int branch)
{
    const auto red = reduce(A, y, psi, k);
    const double Y = Y_cal(A, y, psi, phys, k, branch);
    const Vec4 star{Y - red.star.rho, A, red.r, psi};
    return phi_et(aa_inverse(star, red.family));
}

Vec3 delaunay_to_reduced(const Vec4& delaunay, int k)
{
    check_k(k);
    const Vec4 star = aa_forward(et_inverse(delaunay));
    const double gap = k * (r_s(star[1]) - star[2]);
    if (!(gap > 0.0)) throw std::domain_error("point on the wrong side of the separatrix for this k");
    return {star[1], -k * std::log(gap), star[3]};
}

// ---------------------------------------------------------------- integration

Trajectory integrate(const Field& field, const State& q0, const IntegrateOptions& opt)
{
    namespace odeint = boost::numeric::odeint;
    if (!(opt.t_max > 0.0)) throw std::invalid_argument("t_max must be positive");
    if (opt.inside && !opt.inside(q0)) throw std::invalid_argument("initial point outside the window");

    auto stepper = odeint::make_dense_output(opt.tol, opt.tol, odeint::runge_kutta_dopri5<State>());
    stepper.initialize(q0, 0.0, std::min(opt.dt0, opt.t_max));

    Trajectory traj;
    traj.times.push_back(0.0);
    traj.states.push_back(q0);
    const double e0 = opt.energy ? opt.energy(q0) : 0.0;
    const auto track = [&](const State& q) {
        if (opt.energy) traj.energy_drift = std::max(traj.energy_drift, std::abs(opt.energy(q) - e0));
    };
    std::size_t next_obs = 0;
    State x(q0.size());
    const auto observe_until = [&](double t_end) {
        while (next_obs < opt.observe.size() && opt.observe[next_obs] <= t_end) {
            stepper.calc_state(opt.observe[next_obs], x);
            traj.observed.push_back(x);
            ++next_obs;
        }
    };
    while (next_obs < opt.observe.size() && opt.observe[next_obs] <= 0.0) {
        traj.observed.push_back(q0);
        ++next_obs;
    }

    while (stepper.current_time() < opt.t_max) {
        std::pair<double, double> span;
        try {
            span = stepper.do_step(field);
        } catch (const odeint::step_adjustment_error&) {
            traj.step_underflow = true;
            break;
        }
        const auto [t0, t1_raw] = span;
        if (t1_raw - t0 < 1e-15 * std::max(1.0, std::abs(t0))) {
            traj.step_underflow = true;
            break;
        }
        double t1 = std::min(t1_raw, opt.t_max);
        if (t1 < t1_raw)
            stepper.calc_state(t1, x);
        else
            x = stepper.current_state();

        if (opt.inside && !opt.inside(x)) {
            double lo = t0, hi = t1;
            while (hi - lo > opt.exit_resolution) {
                const double mid = 0.5 * (lo + hi);
                stepper.calc_state(mid, x);
                (opt.inside(x) ? lo : hi) = mid;
            }
            stepper.calc_state(lo, x);
            observe_until(lo);
            traj.times.push_back(lo);
            traj.states.push_back(x);
            traj.exit_time = 0.5 * (lo + hi);
            track(x);
            break;
        }
        observe_until(t1);
        traj.times.push_back(t1);
        traj.states.push_back(x);
        track(x);
    }
    return traj;
}

// ---------------------------------------------------------------- experiments

double sup_P1(const ExperimentParams& params, int n_A, int n_y, int n_psi)
{
    const auto s = schedule(params);
    double sup = 0.0;
    for (int i = 0; i < n_A; ++i) {
        const double A = s.A_lo + (s.A_hi - s.A_lo) * (i + 0.5) / n_A;
        for (int j = 0; j < n_y; ++j) {
            const double y = params.k * (s.y_lo + (s.y_hi - s.y_lo) * j / std::max(1, n_y - 1));
            // Plateau nodes stay strictly inside |psi - psi_circ| < delta/4.
            const double centre = params.plateau_window ? psi_circ(A, y, params.k) : 0.0;
            const double half = params.plateau_window ? params.delta_loc / 4.0 : pi;
            for (int m = 0; m < n_psi; ++m) {
                const double psi = centre - half + 2.0 * half * (m + 0.5) / n_psi;
                const auto split = X_split(A, y, psi, params.phys, params.k, params.branch);
                sup = std::max(sup, std::abs(split.P[0]));
            }
        }
    }
    return sup;
}

namespace {

Field reduced_field(const ExperimentParams& params)
{
    return [params](const State& q, State& dq, double) {
        const auto split = X_split(q[0], q[1], q[2], params.phys, params.k, params.branch);
        dq[0] = split.X[0];
        dq[1] = split.X[1];
        dq[2] = split.X[2];
    };
}

OrbitReport run_orbit(const ExperimentParams& params, const Schedule& s, double eps, int index)
{
    std::seed_seq seq{static_cast<std::uint32_t>(params.seed), static_cast<std::uint32_t>(params.seed >> 32),
                      static_cast<std::uint32_t>(index)};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    OrbitReport o;
    o.A0 = s.A_hi - (s.A_hi - s.A_lo) * unit(rng);  // in (A_lo, A_hi]
    o.y0 = params.k * (s.y_lo + (s.y_hi - s.y_lo) * unit(rng));
    o.psi0 = psi_circ(o.A0, o.y0, params.k) + params.delta_loc * (unit(rng) - 0.5) / 4.0;

    IntegrateOptions opt;
    opt.tol = params.tol;
    // Slowest crossing of the y band: |v| >= e^{-y} sqrt(2(c + alpha F)) with F of order one.
    opt.t_max = 1e3 * (s.y_hi - s.y_lo) * std::exp(s.y_hi);
    opt.dt0 = 1e-3 * std::exp(s.y_lo);
    opt.inside = [&](const State& q) { return in_exit_window(params, s, q[0], q[1], q[2]); };
    opt.energy = [&](const State& q) {
        return hamiltonian(reduced_to_delaunay(q[0], q[1], q[2], params.phys, params.k, params.branch), params.phys);
    };
    const auto traj = integrate(reduced_field(params), {o.A0, o.y0, o.psi0}, opt);

    o.exited = traj.exit_time.has_value();
    o.exit_time = traj.exit_time.value_or(traj.times.back());
    o.energy_drift = traj.energy_drift;
    o.dominated = true;
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const double dA = std::abs(traj.states[i][0] - o.A0);
        o.max_dA = std::max(o.max_dA, dA);
        if (dA > eps * traj.times[i]) o.dominated = false;
    }
    o.bound = eps * o.exit_time;
    o.ratio = o.bound > 0.0 ? o.max_dA / o.bound : 0.0;
    return o;
}

} // namespace

DriftReport drift_experiment(const ExperimentParams& params, int n_orbits, int threads)
{
    params.validate();
    if (n_orbits < 0) throw std::invalid_argument("n_orbits must be non-negative");
    const auto s = schedule(params);
    DriftReport rep;
    rep.L = params.L;
    rep.eps_schedule = s.eps_apriori;
    try {
        rep.eps_measured = sup_P1(params);
    } catch (const std::exception& e) {
        rep.reason = std::string("window not resolvable: ") + e.what();
        return rep;
    }
    if (n_orbits == 0) {
        rep.reason = "no orbits requested";
        return rep;
    }

    std::vector<std::optional<OrbitReport>> slots(n_orbits);
    std::vector<std::string> errors(n_orbits);
    std::atomic<int> next{0};
    const auto worker = [&] {
        for (int i = next++; i < n_orbits; i = next++) {
            try {
                slots[i] = run_orbit(params, s, rep.eps_measured, i);
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
        }
    };
    const int n_threads = std::clamp(threads, 1, n_orbits);
    std::vector<std::thread> pool;
    for (int t = 1; t < n_threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    rep.all_dominated = true;
    for (int i = 0; i < n_orbits; ++i) {
        if (!slots[i]) continue;
        const auto& o = *slots[i];
        rep.orbits.push_back(o);
        rep.aggregate_ratio = std::max(rep.aggregate_ratio, o.ratio);
        rep.max_energy_drift = std::max(rep.max_energy_drift, o.energy_drift);
        rep.all_dominated = rep.all_dominated && o.dominated;
    }
    if (rep.orbits.empty()) {
        rep.all_dominated = false;
        rep.reason = "no valid orbit: " + errors.front();
    }
    return rep;
}

ReparametrizationCheck reparametrization_check(const ExperimentParams& params, double A0, double y0, double psi0,
                                               double t_end)
{
    params.validate();
    const int k = params.k;
    const Vec4 d0 = reduced_to_delaunay(A0, y0, psi0, params.phys, k, params.branch);

    // Physical flow of hamiltonian() with the rescaled time t' carried along:
    // dt'/dt = e^{2 k y}.
    const Field physical = [&](const State& q, State& dq, double) {
        const Vec4 d{q[0], q[1], q[2], q[3]};
        const auto f = hamiltonian_field(d, params.phys);
        const auto red = delaunay_to_reduced(d, k);
        for (int i = 0; i < 4; ++i) dq[i] = f[i];
        dq[4] = std::exp(2.0 * k * red[1]);
    };
    IntegrateOptions opt;
    opt.tol = params.tol;
    opt.t_max = 1e6;
    opt.dt0 = 1e-3 * std::exp(-2.0 * k * y0);
    opt.exit_resolution = 1e-14;
    opt.inside = [&](const State& q) { return q[4] < t_end; };
    opt.energy = [&](const State& q) { return hamiltonian({q[0], q[1], q[2], q[3]}, params.phys); };
    const auto phys_traj = integrate(physical, {d0[0], d0[1], d0[2], d0[3], 0.0}, opt);

    IntegrateOptions red_opt;
    red_opt.tol = params.tol;
    red_opt.t_max = t_end;
    red_opt.dt0 = 1e-3 * std::exp(std::abs(y0));
    for (const auto& q : phys_traj.states) red_opt.observe.push_back(q[4]);
    const auto red_traj = integrate(reduced_field(params), {A0, y0, psi0}, red_opt);

    ReparametrizationCheck out;
    out.energy_drift = phys_traj.energy_drift;
    out.samples = static_cast<int>(red_traj.observed.size());
    for (std::size_t i = 0; i < red_traj.observed.size(); ++i) {
        const auto& q = phys_traj.states[i];
        const auto p = delaunay_to_reduced({q[0], q[1], q[2], q[3]}, k);
        const auto& o = red_traj.observed[i];
        out.distance = std::max({out.distance, std::abs(p[0] - o[0]), std::abs(p[1] - o[1]),
                                 std::abs(wrap(p[2] - o[2]))});
    }
    return out;
}

BoundsReport bounds_report(const ExperimentParams& params, int n_A, int n_y, int n_psi)
{
    params.validate();
    const auto s = schedule(params);
    const int k = params.k;
    const auto& ph = params.phys;
    const double Lm = s.L_minus, Lp = s.L_plus, em = s.eps_minus, ep = s.eps_plus;
    const double alpha = ph.alpha, C = std::abs(ph.C_total), beta = ph.beta, delta = params.delta_loc;
    const double KK = std::pow(s.K, 1.0 + params.smoothing_exponent);

    // v and omega at (A, y): psi-independent parts of X_split.
    const auto v_omega = [&](double A, double y) {
        const auto sp = X_split(A, y, 0.0, ph, k, params.branch);
        return std::pair{sp.v, sp.omega};
    };

    double m_inv_v = 0, m_dAv = 0, m_dyv = 0, m_om = 0, m_dAom = 0, m_dyom = 0;
    double m_P1 = 0, m_P2 = 0, m_P3 = 0, m_rho3 = 0;
    const double hA = 1e-3 * (s.A_hi - s.A_lo), hy = 1e-4;
    for (int i = 0; i < n_A; ++i) {
        // Interior nodes keep the A-differences inside the band.
        const double A = s.A_lo + (s.A_hi - s.A_lo) * (i + 0.5) / n_A;
        for (int j = 0; j < n_y; ++j) {
            const double y = k * (s.y_lo + (s.y_hi - s.y_lo) * j / std::max(1, n_y - 1));
            const auto [v, om] = v_omega(A, y);
            const auto [vAp, omAp] = v_omega(A + hA, y);
            const auto [vAm, omAm] = v_omega(A - hA, y);
            const auto [vyp, omyp] = v_omega(A, y + hy);
            const auto [vym, omym] = v_omega(A, y - hy);
            const double av = std::abs(v);
            m_inv_v = std::max(m_inv_v, 1.0 / av);
            m_dAv = std::max(m_dAv, std::abs((vAp - vAm) / (2 * hA)) / av);
            m_dyv = std::max(m_dyv, std::abs((vyp - vym) / (2 * hy)) / av);
            m_om = std::max(m_om, std::abs(om) / av);
            m_dAom = std::max(m_dAom, std::abs((omAp - omAm) / (2 * hA)) / av);
            m_dyom = std::max(m_dyom, std::abs((omyp - omym) / (2 * hy)) / av);

            const double centre = psi_circ(A, y, k);
            const double b = delta / 2.0;
            for (int m = 0; m < n_psi; ++m) {
                const double psi = centre - b + 2.0 * b * m / std::max(1, n_psi - 1);
                const auto sp = X_split(A, y, psi, ph, k, params.branch);
                const auto Pt = localize(sp.P, A, y, psi, delta, k, params.bump_sharpness);
                m_P1 = std::max(m_P1, std::abs(Pt[0]));
                m_P2 = std::max(m_P2, std::abs(Pt[1]));
                m_P3 = std::max(m_P3, std::abs(Pt[2]));
                const double r = r_circ(A, y, k);
                const auto st = star_fields(A, r, psi, window_family(r, k));
                m_rho3 = std::max(m_rho3, std::abs(st.rho3) * r / st.sigma);
            }
        }
    }

    BoundsReport rep;
    const auto row = [&](std::string name, double measured, double rhs) {
        rep.rows.push_back({std::move(name), measured, rhs, std::isfinite(measured) && std::isfinite(rhs)});
    };
    const double sLm = std::sqrt(Lm), Lm32 = std::pow(Lm, 1.5);
    row("1/v", m_inv_v, std::exp(Lp) / (alpha * sLm));
    row("dA v/v", m_dAv, std::exp(Lp) / (Lm * std::sqrt(em)));
    row("dy v/v", m_dyv, 1.0 + std::exp(Lp - Lm) / (Lm * Lm));
    row("omega/v", m_om, std::exp(Lp - Lm) / Lm32);
    row("dA omega/v", m_dAom, std::exp(2 * Lp - Lm) / (Lm32 * std::sqrt(em)));
    row("dy omega/v", m_dyom, std::exp(2 * Lp - 2 * Lm) / Lm32);

    const double sa = std::sqrt(alpha * Lp);
    const double max1 = std::max({C * Lp * std::sqrt(ep), Lp * ep, delta * std::sqrt(ep) * sa});
    const double max2 = std::max({C * Lp * std::sqrt(ep / em), Lp * ep / std::sqrt(em), std::sqrt(ep / em) * delta * sa,
                                  std::max({C * C, ep * ep, beta}) / std::sqrt(alpha * Lm)});
    const double max3 = std::max({C * std::sqrt(ep) / em, ep / em, std::sqrt(ep) / em * sa});
    row("P1 localized", m_P1, std::exp(-2 * Lm) * max1);
    row("P2 localized", m_P2, std::exp(-Lm) * max2);
    row("P3 localized", m_P3, std::exp(-2 * Lm) * max3);
    row("rho3 r/(sigma delta) on support", m_rho3 / delta, 1.0);

    // Step-5 quantities: rhs with unit constants, measured with the
    // bounds above replaced by their measured left-hand sides.
    const double dL = Lp - Lm, e1 = std::exp(s.s1), e12 = std::exp(s.s1 + s.s2);
    row("chi", dL * std::max(m_om / s.s1, m_dyv / s.s2),
        dL * std::max(std::exp(dL) / (s.s1 * Lm32), (1.0 + std::exp(dL) / (Lm * Lm)) / s.s2));
    row("theta1", e1 * dL * params.xi * KK * m_dyom, e1 * dL * params.xi * KK * std::exp(2 * dL) / Lm32);
    row("theta2", e12 * dL * em / params.xi * m_dAv, e12 * dL * std::sqrt(em) / params.xi * std::exp(Lp) / Lm);
    row("theta3", e1 * dL * KK * em * m_dAom, e1 * dL * KK * std::sqrt(em) * std::exp(2 * Lp - Lm) / Lm32);
    const double eta_meas = e12 * dL * std::exp(-Lm) * m_inv_v *
                            std::max({std::exp(Lm) / em * m_P1, std::exp(s.s2) / params.xi * std::exp(Lm) * m_P2,
                                      std::exp(Lm) * KK * m_P3});
    const double eta_rhs = e12 * dL * std::exp(dL) / (alpha * sLm) *
                           std::max({std::exp(-Lm) / em * max1, std::exp(s.s2) / params.xi * max2,
                                     std::exp(-Lm) * KK * max3});
    row("eta", eta_meas, eta_rhs);

    const double lm_rhs = std::max({std::abs(ph.c), C * C, ep, beta}) / alpha;
    rep.Lm_holds = Lm >= lm_rhs;
    rep.rows.push_back({"L_minus condition", Lm, lm_rhs, rep.Lm_holds});
    return rep;
}

} // namespace qcnf
