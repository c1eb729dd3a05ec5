// Command-line workbench: Legendre transforms, phase scans, quasi-stationary
// densities, Yaglom limits, front integration, wave construction, and the
// acceptance battery. Numeric tables go to CSV, run summaries to JSON; every
// output embeds the seed and a hash of the configuration that produced it.

#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "levywave/acceptance.hpp"
#include "levywave/branching.hpp"
#include "levywave/errors.hpp"
#include "levywave/fkpp.hpp"
#include "levywave/io.hpp"
#include "levywave/model.hpp"
#include "levywave/paths.hpp"
#include "levywave/qsd.hpp"
#include "levywave/stats.hpp"

using namespace levywave;

namespace {

struct CommonArgs {
    std::string model_path;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int threads = 1;
    std::string out_dir = ".";
    bool force = false;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool model_required = true) {
    auto* m = cmd->add_option("--model", args.model_path, "model JSON document");
    if (model_required) m->required();
    cmd->add_option("--seed", args.seed, "master RNG seed (required)")
        ->required();
    cmd->add_option("--threads", args.threads, "worker pool size")
        ->default_val(1);
    cmd->add_option("--out", args.out_dir, "output directory")->default_val(".");
    cmd->add_flag("--force", args.force, "overwrite existing outputs");
}

LevyTriplet load_model(const CommonArgs& args) {
    return model_from_json_text(read_text_file(args.model_path));
}

std::string hash_of(const nlohmann::ordered_json& cfg) {
    return config_hash(cfg.dump());
}

std::vector<std::string> stamp(const nlohmann::ordered_json& cfg,
                               std::uint64_t seed) {
    return {"config_hash=" + hash_of(cfg), "seed=" + std::to_string(seed)};
}

void write_summary(const std::string& path, nlohmann::ordered_json summary,
                   const nlohmann::ordered_json& cfg, const CommonArgs& args) {
    summary["config_hash"] = hash_of(cfg);
    summary["seed"] = args.seed;
    write_text_file(path, summary.dump(2) + "\n", args.force);
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (!tok.empty()) out.push_back(std::stod(tok));
    }
    return out;
}

// ---------------------------------------------------------------------------

int cmd_gamma(const CommonArgs& args, const std::string& alphas_text,
              const std::string& inverse_text) {
    const auto model = load_model(args);
    const auto alphas = parse_list(alphas_text);
    nlohmann::ordered_json cfg{{"cmd", "gamma"},
                               {"model", args.model_path},
                               {"alphas", alphas_text},
                               {"inverse", inverse_text},
                               {"seed", args.seed}};
    CsvTable table;
    table.comments = stamp(cfg, args.seed);
    table.header = {"alpha", "gamma", "gamma_dual"};
    for (double a : alphas)
        table.rows.push_back({a, legendre(model, a), legendre_dual(model, a)});
    write_text_file(args.out_dir + "/gamma.csv", csv_to_string(table), args.force);

    nlohmann::ordered_json summary{{"command", "gamma"}, {"rows", table.rows.size()}};
    if (!inverse_text.empty()) {
        CsvTable inv;
        inv.comments = table.comments;
        inv.header = {"r", "c"};
        for (double r : parse_list(inverse_text))
            inv.rows.push_back({r, gamma_inverse(model, r)});
        write_text_file(args.out_dir + "/gamma_inverse.csv", csv_to_string(inv),
                        args.force);
        summary["inverse_rows"] = inv.rows.size();
    }
    write_summary(args.out_dir + "/gamma_summary.json", summary, cfg, args);
    return 0;
}

int cmd_phase(const CommonArgs& args, const std::string& r_text,
              const std::string& c_text, std::size_t runs, double x0,
              std::size_t cap, double t_max, double dt) {
    const auto model = load_model(args);
    const auto rs = parse_list(r_text);
    const auto cs = parse_list(c_text);
    nlohmann::ordered_json cfg{{"cmd", "phase"},   {"model", args.model_path},
                               {"r", r_text},      {"c", c_text},
                               {"runs", runs},     {"x0", x0},
                               {"cap", cap},       {"t_max", t_max},
                               {"dt", dt},         {"seed", args.seed}};
    CsvTable table;
    table.comments = stamp(cfg, args.seed);
    table.header = {"r",            "c",          "n_runs",        "extinct_frac",
                    "survived_frac", "undecided_frac", "gamma_of_c"};

    BranchingConfig bcfg;
    bcfg.dt = dt;
    bcfg.t_max = t_max;
    bcfg.cap = cap;
    bcfg.threads = args.threads;

    bool all_consistent = true;
    std::size_t cell = 0;
    for (double c : cs) {
        const double gamma_c = legendre(model, c);
        for (double r : rs) {
            bcfg.seed = args.seed + 1000 + cell;
            const auto st = extinction_scan(model, c, r, x0, runs, bcfg);
            table.rows.push_back({r, c, static_cast<double>(runs), st.extinct_frac,
                                  st.survived_frac, st.undecided_frac, gamma_c});
            if (std::abs(r - gamma_c) > 0.05) {
                const bool ok = r > gamma_c
                                    ? st.survived_frac + st.undecided_frac >= 0.10
                                    : st.extinct_frac >= 0.90;
                all_consistent = all_consistent && ok;
            }
            ++cell;
        }
    }
    write_text_file(args.out_dir + "/phase.csv", csv_to_string(table), args.force);
    nlohmann::ordered_json summary{{"command", "phase"},
                                   {"cells", table.rows.size()},
                                   {"consistent", all_consistent}};
    write_summary(args.out_dir + "/phase_summary.json", summary, cfg, args);
    return all_consistent ? 0 : 1;
}

int cmd_qsd(const CommonArgs& args, double c, double r, std::size_t n_paths,
            double grid_max, std::size_t grid_points, double ladder_dt,
            double ladder_horizon) {
    const auto model = load_model(args);
    nlohmann::ordered_json cfg{{"cmd", "qsd"},       {"model", args.model_path},
                               {"c", c},             {"r", r},
                               {"n_paths", n_paths}, {"grid_max", grid_max},
                               {"grid_points", grid_points},
                               {"ladder_dt", ladder_dt},
                               {"ladder_horizon", ladder_horizon},
                               {"seed", args.seed}};
    PathConfig pcfg;
    pcfg.dt = ladder_dt;
    pcfg.horizon = ladder_horizon;
    pcfg.seed = args.seed;
    pcfg.threads = args.threads;

    try {
        std::vector<double> grid;
        if (grid_max > 0.0) {
            grid.resize(grid_points);
            for (std::size_t i = 0; i < grid_points; ++i)
                grid[i] = grid_max * static_cast<double>(i + 1) /
                          static_cast<double>(grid_points);
        } else {
            grid = make_qsd_grid(qsd_theta(model, c, r), grid_points);
        }
        const auto q = qsd_density_formula(model, c, r, grid, n_paths, pcfg);
        CsvTable table;
        table.comments = stamp(cfg, args.seed);
        table.header = {"x", "v"};
        for (std::size_t i = 0; i < q.grid().size(); ++i)
            table.rows.push_back({q.grid()[i], q.values()[i]});
        write_text_file(args.out_dir + "/qsd.csv", csv_to_string(table), args.force);
        nlohmann::ordered_json summary{{"command", "qsd"},
                                       {"regime", "exists"},
                                       {"theta", q.theta()},
                                       {"normalization", q.normalization()},
                                       {"mean", q.mean()},
                                       {"mean_absorption_target",
                                        q.mean_absorption_target()}};
        write_summary(args.out_dir + "/qsd_summary.json", summary, cfg, args);
    } catch (const NoRoot& e) {
        // correct classification beyond the boundary: a clean report, exit 0
        nlohmann::ordered_json summary{{"command", "qsd"},
                                       {"regime", "non-existence"},
                                       {"r", e.r},
                                       {"gamma_c", e.gamma_c}};
        write_summary(args.out_dir + "/qsd_summary.json", summary, cfg, args);
    }
    return 0;
}

int cmd_yaglom(const CommonArgs& args, double c, double x0,
               const std::string& schedule_text, std::size_t n_paths, double dt) {
    const auto model = load_model(args);
    const auto schedule = parse_list(schedule_text);
    nlohmann::ordered_json cfg{{"cmd", "yaglom"},    {"model", args.model_path},
                               {"c", c},             {"x0", x0},
                               {"schedule", schedule_text},
                               {"n_paths", n_paths}, {"dt", dt},
                               {"seed", args.seed}};
    PathConfig pcfg;
    pcfg.dt = dt;
    pcfg.seed = args.seed;
    pcfg.threads = args.threads;

    const auto stages = yaglom_convergence(model, c, x0, schedule, n_paths, pcfg);
    CsvTable table;
    table.comments = stamp(cfg, args.seed);
    table.header = {"t", "stage_survival", "n_survivors", "ks_to_final"};
    for (const auto& st : stages)
        table.rows.push_back({st.t, st.result.survival_fraction,
                              static_cast<double>(st.result.n_survivors),
                              st.ks_to_final});
    write_text_file(args.out_dir + "/yaglom_stages.csv", csv_to_string(table),
                    args.force);

    CsvTable law;
    law.comments = table.comments;
    law.header = {"x", "weight"};
    const auto& final_law = stages.back().result.law;
    for (std::size_t i = 0; i < final_law.samples().size(); ++i)
        law.rows.push_back({final_law.samples()[i], final_law.weights()[i]});
    write_text_file(args.out_dir + "/yaglom_law.csv", csv_to_string(law),
                    args.force);

    nlohmann::ordered_json summary{{"command", "yaglom"},
                                   {"stages", stages.size()},
                                   {"final_t", stages.back().t},
                                   {"final_survivors", stages.back().result.n_survivors},
                                   {"final_mean", final_law.mean()}};
    write_summary(args.out_dir + "/yaglom_summary.json", summary, cfg, args);
    return 0;
}

int cmd_front(const CommonArgs& args, double r, double lo, double hi, double dx,
              double T, double dt, double trace_every) {
    const auto model = load_model(args);
    nlohmann::ordered_json cfg{{"cmd", "front"}, {"model", args.model_path},
                               {"r", r},         {"lo", lo},
                               {"hi", hi},       {"dx", dx},
                               {"T", T},         {"dt", dt},
                               {"trace_every", trace_every},
                               {"seed", args.seed}};
    const auto st = run_front(model, r, [](double x) { return x >= 0.0 ? 1.0 : 0.0; },
                              T, dt, FrontGrid{lo, hi, dx}, trace_every);
    const auto sp = front_speed(st.front_trace);

    CsvTable table;
    table.comments = stamp(cfg, args.seed);
    table.header = {"t", "front_position"};
    for (const auto& [t, x] : st.front_trace) table.rows.push_back({t, x});
    write_text_file(args.out_dir + "/front_trace.csv", csv_to_string(table),
                    args.force);

    nlohmann::ordered_json summary{{"command", "front"},
                                   {"speed", sp.speed},
                                   {"speed_se", sp.se},
                                   {"r2", sp.r2},
                                   {"gamma_inverse_r", gamma_inverse(model, r)},
                                   {"clip_magnitude", st.clip_magnitude}};
    write_summary(args.out_dir + "/front_summary.json", summary, cfg, args);
    return 0;
}

int cmd_tw(const CommonArgs& args, double c, double r, double s,
           double level_max, std::size_t n_levels, std::size_t n_runs, double dt,
           std::size_t cap, double t_max, double mckean_t,
           std::size_t mckean_runs) {
    const auto model = load_model(args);
    nlohmann::ordered_json cfg{{"cmd", "tw"},   {"model", args.model_path},
                               {"c", c},        {"r", r},
                               {"s", s},        {"level_max", level_max},
                               {"n_levels", n_levels},
                               {"n_runs", n_runs},
                               {"dt", dt},      {"cap", cap},
                               {"t_max", t_max},
                               {"mckean_t", mckean_t},
                               {"mckean_runs", mckean_runs},
                               {"seed", args.seed}};
    BranchingConfig bcfg;
    bcfg.dt = dt;
    bcfg.cap = cap;
    bcfg.t_max = t_max;
    bcfg.threads = args.threads;
    bcfg.seed = args.seed;

    std::vector<double> levels(n_levels);
    for (std::size_t i = 0; i < n_levels; ++i)
        levels[i] =
            level_max * static_cast<double>(i + 1) / static_cast<double>(n_levels);

    const auto wave = tw_from_gw(model, c, r, s, levels, n_runs, bcfg);
    CsvTable table;
    table.comments = stamp(cfg, args.seed);
    table.header = {"x", "w", "w_se"};
    for (std::size_t i = 0; i < wave.grid.size(); ++i)
        table.rows.push_back({wave.grid[i], wave.w[i], wave.w_se[i]});
    write_text_file(args.out_dir + "/tw_profile.csv", csv_to_string(table),
                    args.force);

    nlohmann::ordered_json summary{{"command", "tw"},
                                   {"s", s},
                                   {"n_runs_used", wave.n_runs},
                                   {"undecided", wave.undecided},
                                   {"residual_ms",
                                    wave_equation_residual(model, wave, c, r)}};
    if (mckean_runs > 0) {
        bcfg.seed = args.seed + 7;
        const auto mk = mckean_fixed_point_check(
            model, c, r, wave, mckean_t,
            {0.25 * level_max, 0.5 * level_max, 0.75 * level_max}, mckean_runs,
            bcfg);
        summary["mckean_max_abs_discrepancy"] = mk.max_abs_discrepancy;
        summary["mckean_exit_fraction"] = mk.exit_fraction;
    }
    write_summary(args.out_dir + "/tw_summary.json", summary, cfg, args);
    return 0;
}

int cmd_check(const CommonArgs& args, const std::string& budget,
              const std::string& only) {
    AcceptanceOptions opt;
    opt.budget = budget == "quick" ? CheckBudget::Quick : CheckBudget::Full;
    opt.threads = args.threads;
    opt.seed = args.seed;
    nlohmann::ordered_json cfg{{"cmd", "check"},
                               {"budget", budget},
                               {"only", only},
                               {"seed", args.seed}};
    const auto results = run_acceptance(opt, only);
    bool all = true;
    for (const auto& r : results) {
        std::printf("[%s] %s: %s\n", r.pass ? "PASS" : "FAIL", r.id.c_str(),
                    r.description.c_str());
        all = all && r.pass;
    }
    nlohmann::ordered_json summary =
        nlohmann::ordered_json::parse(acceptance_summary_json(results, opt));
    write_summary(args.out_dir + "/check_summary.json", summary, cfg, args);
    return all ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lévy branching / quasi-stationary / traveling-wave workbench"};
    app.require_subcommand(1);

    CommonArgs ga, pa, qa, ya, fa, ta, ca;

    auto* gamma = app.add_subcommand("gamma", "Legendre transform tables");
    add_common(gamma, ga);
    std::string alphas = "0.25,0.5,0.75,1,1.5,2";
    std::string inverse;
    gamma->add_option("--alphas", alphas, "comma-separated alpha grid");
    gamma->add_option("--gamma-inverse", inverse, "comma-separated r values");

    auto* phase = app.add_subcommand("phase", "extinction phase diagram");
    add_common(phase, pa);
    std::string r_list = "0.125,0.3,0.525,0.8,1.6";
    std::string c_list = "0.4,0.75,1.0,1.3,1.6";
    std::size_t runs = 200, cap = 15000;
    double x0 = 4.0, t_max = 50.0, pdt = 0.05;
    phase->add_option("--r-list", r_list);
    phase->add_option("--c-list", c_list);
    phase->add_option("--runs", runs);
    phase->add_option("--x0", x0);
    phase->add_option("--cap", cap);
    phase->add_option("--tmax", t_max);
    phase->add_option("--dt", pdt);

    auto* qsd = app.add_subcommand("qsd", "quasi-stationary density");
    add_common(qsd, qa);
    double qc = 1.0, qr = 0.5, qgrid_max = 0.0, ladder_dt = 2e-4,
           ladder_horizon = 80.0;
    std::size_t qn = 8000, qpoints = 2000;
    qsd->add_option("--c", qc)->required();
    qsd->add_option("--r", qr)->required();
    qsd->add_option("--n-paths", qn);
    qsd->add_option("--grid-max", qgrid_max, "0 selects 20/theta");
    qsd->add_option("--grid-points", qpoints);
    qsd->add_option("--ladder-dt", ladder_dt);
    qsd->add_option("--ladder-horizon", ladder_horizon);

    auto* yag = app.add_subcommand("yaglom", "conditioned-law schedule");
    add_common(yag, ya);
    double yc = 1.0, yx0 = 1.0, ydt = 0.02;
    std::string schedule = "3,6,9,12,15";
    std::size_t yn = 200000;
    yag->add_option("--c", yc)->required();
    yag->add_option("--x0", yx0);
    yag->add_option("--schedule", schedule);
    yag->add_option("--n-paths", yn);
    yag->add_option("--dt", ydt);

    auto* front = app.add_subcommand("front", "front integration from step data");
    add_common(front, fa);
    double fr = 1.0, flo = -100.0, fhi = 300.0, fdx = 0.05, fT = 40.0, fdt = 0.0,
           ftrace = 0.5;
    front->add_option("--r", fr)->required();
    front->add_option("--lo", flo);
    front->add_option("--hi", fhi);
    front->add_option("--dx", fdx);
    front->add_option("--T", fT);
    front->add_option("--dt", fdt, "0 selects the largest stable step");
    front->add_option("--trace-every", ftrace);

    auto* tw = app.add_subcommand("tw", "traveling wave from level counts");
    add_common(tw, ta);
    double tc = std::sqrt(2.0), tr = 1.0, ts = 0.5, tlmax = 4.0, tdt = 0.05,
           ttmax = 200.0, tmt = 0.5;
    std::size_t tlevels = 20, truns = 4000, tcap = 200000, tmruns = 20000;
    tw->add_option("--c", tc)->required();
    tw->add_option("--r", tr)->required();
    tw->add_option("--s", ts);
    tw->add_option("--level-max", tlmax);
    tw->add_option("--levels", tlevels);
    tw->add_option("--n-runs", truns);
    tw->add_option("--dt", tdt);
    tw->add_option("--cap", tcap);
    tw->add_option("--tmax", ttmax);
    tw->add_option("--mckean-t", tmt);
    tw->add_option("--mckean-runs", tmruns, "0 disables the product check");

    auto* check = app.add_subcommand("check", "acceptance battery");
    add_common(check, ca, false);
    std::string budget = "full", only;
    check->add_option("--budget", budget)->check(CLI::IsMember({"full", "quick"}));
    check->add_option("--only", only, "single criterion id, e.g. C7");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (gamma->parsed()) return cmd_gamma(ga, alphas, inverse);
        if (phase->parsed())
            return cmd_phase(pa, r_list, c_list, runs, x0, cap, t_max, pdt);
        if (qsd->parsed())
            return cmd_qsd(qa, qc, qr, qn, qgrid_max, qpoints, ladder_dt,
                           ladder_horizon);
        if (yag->parsed()) return cmd_yaglom(ya, yc, yx0, schedule, yn, ydt);
        if (front->parsed())
            return cmd_front(fa, fr, flo, fhi, fdx, fT, fdt, ftrace);
        if (tw->parsed())
            return cmd_tw(ta, tc, tr, ts, tlmax, tlevels, truns, tdt, tcap, ttmax,
                          tmt, tmruns);
        if (check->parsed()) return cmd_check(ca, budget, only);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 2;
}
