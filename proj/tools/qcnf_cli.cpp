// Command-line front end: each subcommand writes CSV files plus a
// manifest.json into the output directory.

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "qcnf/checks.hpp"
#include "qcnf/dynamics.hpp"
#include "qcnf/io.hpp"
#include "qcnf/toy.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace qcnf;

namespace {

struct Common {
    std::string out = "out";
    std::uint64_t seed = 1;
    int threads = 0;                // 0: hardware concurrency
    std::optional<double> tol;      // subcommand default when unset
};

int worker_count(const Common& c)
{
    if (c.threads > 0) return c.threads;
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

std::string utc_timestamp()
{
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

fs::path prepare_out(const Common& c)
{
    const fs::path dir(c.out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory " + dir.string() + ": " + ec.message());
    return dir;
}

void write_manifest(const fs::path& dir, const std::string& subcommand, const Common& c, json parameters,
                    const std::vector<std::string>& files, json results = json::object())
{
    json m;
    m["schema_version"] = kSchemaVersion;
    m["subcommand"] = subcommand;
    m["created_utc"] = utc_timestamp();
    m["seed"] = c.seed;
    m["parameters"] = std::move(parameters);
    m["files"] = files;
    if (!results.empty()) m["results"] = std::move(results);
    write_text(dir / "manifest.json", m.dump(2) + "\n");
}

// ---------------------------------------------------------------- portrait

// Points of the level E(r, G, g) = E_level as two branches g = +-acos(...),
// sampled in G. Used for the separatrix levels, where the time-uniform
// parametrization degenerates.
std::vector<Curve> level_by_height(double E_level, double r, int n)
{
    std::vector<Curve> branches(2);
    for (int i = 1; i < n; ++i) {
        const double G = -1.0 + 2.0 * i / n;
        const double c = (E_level - G * G) / (r * std::sqrt(1.0 - G * G));
        if (std::abs(c) > 1.0) continue;
        const double g = std::acos(c);
        branches[0].push_back({g, G});
        branches[1].push_back({-g, G});
    }
    return branches;
}

std::vector<double> parse_list(const std::string& text)
{
    std::vector<double> out;
    std::istringstream is(text);
    std::string item;
    while (std::getline(is, item, ',')) {
        std::size_t used = 0;
        double x = 0;
        try {
            x = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || item.find_first_not_of(" ", used) != std::string::npos)
            throw std::invalid_argument("not a number: '" + item + "'");
        out.push_back(x);
    }
    return out;
}

int cmd_portrait(const Common& c, const std::vector<double>& r_values, int n_levels, int n_points)
{
    if (r_values.empty()) throw std::invalid_argument("portrait needs at least one r value");
    for (double r : r_values)
        if (!(r > 0.0) || r == 2.0) throw std::invalid_argument("r must lie in (0, 2) or (2, inf), got " + fmt_num(r));
    if (n_levels < 1 || n_points < 8) throw std::invalid_argument("need levels >= 1 and points >= 8");

    const auto dir = prepare_out(c);
    std::vector<std::string> files;
    json per_r = json::array();
    for (double r : r_values) {
        CsvTable t({"r", "E", "curve", "g", "G", "family", "separatrix"});
        int curve_id = 0;
        const auto emit = [&](double E, const std::vector<Curve>& curves, const std::string& family,
                              const std::string& tag) {
            for (const auto& curve : curves) {
                for (const auto& p : curve)
                    t.add_row({fmt_num(r), fmt_num(E), std::to_string(curve_id), fmt_num(p.g), fmt_num(p.G), family,
                               tag});
                ++curve_id;
            }
        };
        const double lo = -r, hi = E_max(r);
        int skipped = 0;
        for (int i = 0; i < n_levels; ++i) {
            const double E = lo + (hi - lo) * (i + 0.5) / n_levels;
            if (std::abs(E - r) < 1e-3 || std::abs(E - 1.0) < 1e-3) {
                ++skipped;
                continue;
            }
            emit(E, level_curve(E, r, n_points), to_string(level_data(E, r).motion), "");
        }
        // S0: level through the saddle (exists for r < 2); S1: level E = 1.
        if (r < 2.0) emit(r, level_by_height(r, r, n_points), "separatrix", "S0");
        if (r != 1.0) emit(1.0, level_by_height(1.0, r, n_points), "separatrix", "S1");

        const std::string name = "portrait_r" + fmt_num(r) + ".csv";
        t.write(dir / name);
        files.push_back(name);
        json cps = json::array();
        for (const auto& cp : critical_points(r))
            cps.push_back({{"kind", to_string(cp.kind)}, {"g", cp.g}, {"G", cp.G}, {"E", cp.E}});
        per_r.push_back({{"r", r}, {"panel", to_string(level_data(0.5 * (lo + std::min(r, 1.0)), r).panel)},
                         {"S0_present", r < 2.0}, {"critical_points", cps}, {"levels_skipped_near_separatrix", skipped}});
    }
    write_manifest(dir, "portrait", c, {{"r_values", r_values}, {"levels", n_levels}, {"points", n_points}}, files,
                   {{"sections", per_r}});
    return 0;
}

// ---------------------------------------------------------------- check

int cmd_check(const Common& c, const std::string& suite)
{
    CheckOptions o;
    o.seed = c.seed;
    o.threads = worker_count(c);
    if (c.tol) o.tolerance_scale = *c.tol;
    const auto result = run_suite(suite, o);
    const auto dir = prepare_out(c);
    const std::string text = suite_json({result});
    const std::string name = "check_" + suite + ".json";
    write_text(dir / name, text + "\n");
    std::cout << text << "\n";
    write_manifest(dir, "check", c, {{"suite", suite}, {"tolerance_scale", o.tolerance_scale}}, {name},
                   {{"pass", result.pass()}});
    return result.pass() ? 0 : 1;
}

// ---------------------------------------------------------------- nf

int cmd_nf(const Common& c, const std::string& fixture, int p, int K, int ell, double eps)
{
    if (p < 0) throw std::invalid_argument("p must be non-negative");
    IterationResult it;
    json params{{"fixture", fixture}, {"p", p}, {"eps", eps}};
    if (fixture == "toy_analytic") {
        const auto toy = ToyFixture::make();
        auto sp = toy.nft_params(p);
        sp.best_effort = true;
        it = nft_iterate(toy.N, toy.perturbation(eps), sp);
    } else if (fixture == "toy_smooth") {
        if (K < 1 || ell < 0) throw std::invalid_argument("toy_smooth needs K >= 1 and ell >= 0");
        const auto toy = ToyFixture::make(std::max(40, 2 * K));
        auto sp = toy.gnft_params(p, K, ell);
        sp.best_effort = true;
        it = gnft_iterate(toy.N, toy.slow_tail_perturbation(eps), sp);
        params["K"] = K;
        params["ell"] = ell;
    } else {
        throw std::invalid_argument("unknown fixture: " + fixture + " (toy_analytic, toy_smooth)");
    }
    const auto dir = prepare_out(c);
    write_text(dir / "nf_history.csv", it.history_csv());
    const auto& d = it.initial;
    json diag{{"Q", d.Q}, {"chi", d.chi}, {"theta1", d.theta1}, {"theta2", d.theta2}, {"theta3", d.theta3},
              {"eta", d.eta}};
    json hyps = json::array();
    for (const auto& h : d.checks)
        hyps.push_back({{"name", h.name}, {"value", h.value}, {"bound", h.bound}, {"holds", h.holds}});
    json results{{"completed", it.completed},
                 {"hypotheses_hold", it.completed && d.all_hold()},
                 {"failed_step", it.failed_step},
                 {"failure", it.failure},
                 {"final_ratio", it.final_ratio},
                 {"final_bound_holds", it.final_bound_holds},
                 {"initial_diagnostics", diag},
                 {"initial_hypotheses", hyps}};
    if (fixture == "toy_smooth") {
        results["predicted_geometric"] = it.predicted_geometric;
        results["predicted_cutoff"] = it.predicted_cutoff;
        results["predicted_cutoff_best"] = it.predicted_cutoff_best;
        results["best_ell"] = it.best_ell;
        results["remainder_floor"] = it.remainder_floor;
        results["branch"] = it.branch;
    }
    write_manifest(dir, "nf", c, params, {"nf_history.csv"}, results);
    return 0;
}

// ---------------------------------------------------------------- drift, bounds

ExperimentParams experiment(const Common& c, double L, double xi, const std::string& side)
{
    int k = 0;
    if (side == "outer") k = 1;
    else if (side == "inner") k = -1;
    else throw std::invalid_argument("side must be inner or outer");
    auto p = default_experiment(L, k, xi);
    p.seed = c.seed;
    if (c.tol) p.tol = *c.tol;
    p.validate();
    return p;
}

json experiment_json(const ExperimentParams& p)
{
    const auto s = schedule(p);
    return {{"L", p.L},
            {"xi", p.xi},
            {"side", p.k > 0 ? "outer" : "inner"},
            {"alpha", p.phys.alpha},
            {"beta", p.phys.beta},
            {"C_total", p.phys.C_total},
            {"c", p.phys.c},
            {"delta_loc", p.delta_loc},
            {"tol", p.tol},
            {"plateau_window", p.plateau_window},
            {"schedule",
             {{"L_minus", s.L_minus},
              {"L_plus", s.L_plus},
              {"eps_plus", s.eps_plus},
              {"eps_minus", s.eps_minus},
              {"K", s.K},
              {"eps_apriori", s.eps_apriori},
              {"A_lo", s.A_lo},
              {"A_hi", s.A_hi},
              {"y_lo", s.y_lo},
              {"y_hi", s.y_hi}}}};
}

int cmd_drift(const Common& c, double L, double xi, int orbits, const std::string& side)
{
    if (orbits < 1) throw std::invalid_argument("orbits must be positive");
    const auto p = experiment(c, L, xi, side);
    const auto rep = drift_experiment(p, orbits, worker_count(c));
    CsvTable t({"orbit", "A0", "y0", "psi0", "max_dA", "exit_time", "bound", "ratio", "energy_drift", "dominated",
                "exited"});
    for (std::size_t i = 0; i < rep.orbits.size(); ++i) {
        const auto& o = rep.orbits[i];
        t.add_row({std::to_string(i), fmt_num(o.A0), fmt_num(o.y0), fmt_num(o.psi0), fmt_num(o.max_dA),
                   fmt_num(o.exit_time), fmt_num(o.bound), fmt_num(o.ratio), fmt_num(o.energy_drift),
                   o.dominated ? "1" : "0", o.exited ? "1" : "0"});
    }
    const auto dir = prepare_out(c);
    t.write(dir / "drift.csv");
    auto params = experiment_json(p);
    params["orbits"] = orbits;
    write_manifest(dir, "drift", c, params, {"drift.csv"},
                   {{"eps_measured", rep.eps_measured},
                    {"eps_schedule", rep.eps_schedule},
                    {"aggregate_ratio", rep.aggregate_ratio},
                    {"max_energy_drift", rep.max_energy_drift},
                    {"all_dominated", rep.all_dominated},
                    {"reason", rep.reason}});
    std::cout << "aggregate ratio " << fmt_num(rep.aggregate_ratio) << ", all dominated "
              << (rep.all_dominated ? "yes" : "no") << ", orbits " << rep.orbits.size() << "\n";
    if (!rep.reason.empty()) std::cout << rep.reason << "\n";
    return 0;
}

int cmd_bounds(const Common& c, double L, double xi, const std::string& side)
{
    const auto p = experiment(c, L, xi, side);
    const auto rep = bounds_report(p);
    CsvTable t({"quantity", "measured", "paper_bound_rhs", "ok"});
    for (const auto& row : rep.rows)
        t.add_row({row.quantity, fmt_num(row.measured), fmt_num(row.rhs), row.ok ? "1" : "0"});
    const auto dir = prepare_out(c);
    t.write(dir / "bounds.csv");
    write_manifest(dir, "bounds", c, experiment_json(p), {"bounds.csv"}, {{"L_minus_condition", rep.Lm_holds}});
    return 0;
}

// ---------------------------------------------------------------- elliptic

struct Grid {
    double lo, hi, step;
};

Grid parse_grid(const std::string& text)
{
    Grid g{};
    char c1 = 0, c2 = 0;
    std::istringstream is(text);
    if (!(is >> g.lo >> c1 >> g.hi >> c2 >> g.step) || c1 != ':' || c2 != ':' || !(is >> std::ws).eof())
        throw std::invalid_argument("grid must be lo:hi:step, got " + text);
    if (!(g.step > 0.0) || g.hi < g.lo) throw std::invalid_argument("grid needs step > 0 and hi >= lo");
    return g;
}

int cmd_elliptic(const Common& c, const std::string& grid_text)
{
    const auto g = parse_grid(grid_text);
    CsvTable t({"kappa", "T0", "calA", "theta_star"});
    json notes = json::array();
    const long n = std::lround(std::floor((g.hi - g.lo) / g.step + 1e-9));
    for (long i = 0; i <= n; ++i) {
        // Rounded to the grid's decimal so that 0 and 0.1 come out exact.
        const double kappa = std::round((g.lo + i * g.step) * 1e12) / 1e12;
        try {
            t.add_numeric_row({kappa, T0_of(kappa), calA(kappa), theta_star(kappa)});
        } catch (const std::exception& e) {
            notes.push_back("kappa = " + fmt_num(kappa) + " skipped: " + e.what());
        }
    }
    const auto dir = prepare_out(c);
    t.write(dir / "elliptic.csv");
    write_manifest(dir, "elliptic", c, {{"kappa_grid", grid_text}}, {"elliptic.csv"}, {{"notes", notes}});
    for (const auto& note : notes) std::cout << note.get<std::string>() << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Normal-form and drift experiments near the separatrix of the averaged three-body problem"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "Config file with key = value lines; subcommand keys as [name] sections");
    app.allow_config_extras(CLI::config_extras_mode::error);

    Common common;
    app.add_option("--out", common.out, "Output directory")->capture_default_str();
    app.add_option("--seed", common.seed, "Random seed")->capture_default_str();
    app.add_option("--threads", common.threads, "Worker cap (0: hardware concurrency)")->check(CLI::NonNegativeNumber);
    app.add_option("--tol", common.tol,
                   "Integration tolerance (drift, bounds) or tolerance multiplier (check)");

    std::string r_list = "0.5,1.5,3";
    int levels = 12, points = 200;
    auto* portrait = app.add_subcommand("portrait", "Level curves of the Euler integral at fixed r");
    portrait->add_option("--r", r_list, "Comma-separated values of r")->capture_default_str();
    portrait->add_option("--levels", levels, "Energy levels per r")->capture_default_str();
    portrait->add_option("--points", points, "Points per curve")->capture_default_str();

    std::string suite = "all";
    auto* check = app.add_subcommand("check", "Run invariant suites and write a pass/fail JSON report");
    check->add_option("--suite", suite, "norms, homological, nf, elliptic, euler, charts, dynamics or all")
        ->check(CLI::IsMember(suite_names()))
        ->capture_default_str();

    std::string fixture = "toy_analytic";
    int p = 8, K = 16, ell = 8;
    double eps = 1e-4;
    auto* nf = app.add_subcommand("nf", "Iterate the normal form on a toy fixture");
    nf->add_option("--fixture", fixture, "toy_analytic or toy_smooth")->capture_default_str();
    nf->add_option("--p", p, "Number of iterations after the first step")->capture_default_str();
    nf->add_option("--K", K, "Fourier cutoff (toy_smooth)")->capture_default_str();
    nf->add_option("--ell", ell, "Smoothness order (toy_smooth)")->capture_default_str();
    nf->add_option("--eps", eps, "Perturbation size")->capture_default_str();

    double L = 4.0, xi = 0.05;
    int orbits = 32;
    std::string side = "outer";
    auto* drift = app.add_subcommand("drift", "Drift of the action along sampled orbits of the window");
    auto* bounds = app.add_subcommand("bounds", "Measured sup-norms against the driver bounds");
    for (auto* sub : {drift, bounds}) {
        sub->add_option("--L", L, "Window parameter L")->capture_default_str();
        sub->add_option("--xi", xi, "Window margin xi")->capture_default_str();
        sub->add_option("--side", side, "inner or outer side of the separatrix")
            ->check(CLI::IsMember({"inner", "outer"}))
            ->capture_default_str();
    }
    drift->add_option("--orbits", orbits, "Number of orbits")->capture_default_str();

    std::string kappa_grid = "-0.9:0.9:0.1";
    auto* elliptic = app.add_subcommand("elliptic", "Tabulate T0, the mean value calA and theta_star over kappa");
    elliptic->add_option("--kappa-grid", kappa_grid, "lo:hi:step")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*portrait) return cmd_portrait(common, parse_list(r_list), levels, points);
        if (*check) return cmd_check(common, suite);
        if (*nf) return cmd_nf(common, fixture, p, K, ell, eps);
        if (*drift) return cmd_drift(common, L, xi, orbits, side);
        if (*bounds) return cmd_bounds(common, L, xi, side);
        if (*elliptic) return cmd_elliptic(common, kappa_grid);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
