// Command-line front end for the job-size testing toolkit: single-point
// evaluations, cutoff optimization, testing-time sweeps, simulation runs,
// figure reproduction, and the release verification suites.

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "jst/analytic.hpp"
#include "jst/design.hpp"
#include "jst/io.hpp"
#include "jst/optimize.hpp"
#include "jst/sim.hpp"
#include "jst/verify.hpp"

namespace fs = std::filesystem;
using jst::ExperimentConfig;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitUnstable = 2;

struct GlobalOpts {
    std::string config_path;
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    bool seed_given = false;
    int threads = 0;
};

// Loads the --config file; returns false after printing the diagnostic and
// setting the exit code (missing/malformed -> 1, overloaded -> 2).
bool load_config(const GlobalOpts& g, ExperimentConfig& cfg, int& exit_code) {
    if (g.config_path.empty()) {
        std::fprintf(stderr, "error: --config is required for this command\n");
        exit_code = kExitUsage;
        return false;
    }
    jst::ParseResult res = jst::load_experiment_config(g.config_path);
    if (!res.ok()) {
        std::fprintf(stderr, "error: %s\n", res.message.c_str());
        exit_code = res.error == jst::ConfigError::Unstable ? kExitUnstable : kExitUsage;
        return false;
    }
    cfg = res.config;
    return true;
}

std::string out_path(const GlobalOpts& g, const std::string& name) {
    fs::path p(name);
    if (p.is_absolute()) return name;
    fs::create_directories(g.out_dir);
    return (fs::path(g.out_dir) / p).string();
}

double number(double v) { return v; }  // keeps ordered_json from widening literals

int cmd_eval(const GlobalOpts& g, double cutoff, double sigma) {
    ExperimentConfig cfg;
    int code = kExitOk;
    if (!load_config(g, cfg, code)) return code;
    jst::CostBreakdown b = jst::total_cost(cfg.system, cutoff, sigma);
    ordered_json j;
    j["sigma"] = number(sigma);
    j["cutoff"] = number(cutoff);
    j["scheduler_delay"] = b.scheduler_delay;
    j["scheduler_cost"] = b.scheduler_cost;
    j["servers_waiting"] = b.servers_waiting;
    j["total"] = b.total;
    j["stable"] = b.finite();
    j["reason"] = jst::unstable_name(b.reason);
    std::printf("%s\n", j.dump().c_str());
    if (!b.finite()) {
        std::fprintf(stderr, "error: %s unstable\n", jst::unstable_name(b.reason));
        return kExitUnstable;
    }
    return kExitOk;
}

int cmd_optimize(const GlobalOpts& g, double sigma) {
    ExperimentConfig cfg;
    int code = kExitOk;
    if (!load_config(g, cfg, code)) return code;
    if (sigma * cfg.system.total_arrival_rate() >= 1) {
        std::fprintf(stderr, "error: scheduler unstable at sigma %g\n", sigma);
        return kExitUnstable;
    }
    jst::OptimumPoint p = jst::min_cost_over_cutoff(cfg.system, sigma);
    jst::OptimumPoint base = jst::min_cost_over_cutoff(cfg.system, 0.0);
    ordered_json j;
    j["sigma"] = number(sigma);
    j["c_opt"] = p.argmin;
    j["d_opt"] = p.value;
    j["efficiency"] = p.value / base.value;
    std::printf("%s\n", j.dump().c_str());
    return p.feasible() ? kExitOk : kExitUnstable;
}

// --- sweep and figure presets -------------------------------------------------

struct PresetOpts {
    std::string preset;        // "", "figure1", "figure2"
    std::string workload = "p50";  // p50 | p20 | p80
    double beta = 0.5;
    double xM = 1e5;
    int n = 100;
    double rho = 0.8;
};

double workload_p(const std::string& w) {
    if (w == "p50") return 0.5;
    if (w == "p20") return 0.2;
    if (w == "p80") return 0.8;
    throw std::invalid_argument("workload must be one of p50, p20, p80");
}

jst::SystemConfig preset_system(const PresetOpts& po) {
    jst::SystemConfig sys;
    sys.n_servers = po.n;
    if (po.preset == "figure1") {
        sys.dist = jst::pareto_tail_dist(1.0, po.beta, 1.0, po.xM);
        sys.profile.family = jst::ProfileFamily::ExponentialSaturating;
        sys.profile.rate_small = 10.0;
        sys.profile.rate_large = 1.0;
    } else if (po.preset == "figure2") {
        sys.dist.small_size = 25;
        sys.dist.large_size = 540;
        sys.dist.p_small = workload_p(po.workload);
        sys.profile.family = jst::ProfileFamily::NoFalseSmall;
        sys.profile.rate_small = 3.0;
        sys.profile.rate_large = 1.0;
    } else {
        throw std::invalid_argument("preset must be figure1 or figure2");
    }
    sys.lambda_per_server = po.rho / sys.dist.mean();
    sys.validate();
    return sys;
}

int cmd_sweep(const GlobalOpts& g, const PresetOpts& po, const std::string& csv_flag) {
    ExperimentConfig cfg;
    if (po.preset.empty()) {
        int code = kExitOk;
        if (!load_config(g, cfg, code)) return code;
    } else {
        cfg.system = preset_system(po);
    }
    double gamma = cfg.gamma_or_default();
    double sigma_star =
        cfg.design.tau
            ? jst::testing_time_for_budget(cfg.system.lambda_per_server,
                                           cfg.system.n_servers, *cfg.design.tau)
            : jst::design_testing_time(cfg.system.lambda_per_server, cfg.system.n_servers,
                                       cfg.system.dist, gamma);
    double smax = cfg.sweep_max_or_default();
    std::vector<jst::SweepRow> rows =
        jst::sweep_efficiency(cfg.system, smax, cfg.sweep_points_or_default(), sigma_star);

    jst::CsvWriter csv(out_path(g, !csv_flag.empty()       ? csv_flag
                                    : cfg.output.csv        ? *cfg.output.csv
                                                            : std::string("sweep.csv")));
    csv.metadata(jst::format_number(cfg.system.n_servers) +
                 " servers, per-server rate " + jst::format_number(cfg.system.lambda_per_server) +
                 ", mean size " + jst::format_number(cfg.system.dist.mean()) + ", sigma_star " +
                 jst::format_number(sigma_star));
    csv.header({"sigma", "c_opt", "d_opt", "efficiency", "sigma_star_marker"});
    for (const jst::SweepRow& r : rows)
        csv.row({r.sigma, r.c_opt, r.d_opt, r.efficiency, r.sigma_star_row ? 1.0 : 0.0});
    csv.write();
    std::printf("wrote %zu rows\n", rows.size());

    if (cfg.output.svg) {
        jst::SvgSeries series;
        series.label = "efficiency";
        for (const jst::SweepRow& r : rows) series.points.emplace_back(r.sigma, r.efficiency);
        jst::write_svg_chart(out_path(g, *cfg.output.svg), "testing-time sweep",
                             "testing time", "efficiency", {series}, false);
    }
    return kExitOk;
}

int cmd_figures(const GlobalOpts& g, int which) {
    const double rhos[3] = {0.7, 0.8, 0.9};
    const int ns[2] = {10, 100};
    if (which == 1) {
        const double betas[3] = {0.5, 1.5, 2.0};
        std::vector<double> xMs;
        for (int i = 0; i <= 12; ++i) xMs.push_back(std::pow(10.0, 2.0 + 0.25 * i));
        for (double beta : betas) {
            for (int n : ns) {
                std::string base = "fig1_beta" + jst::format_number(beta) + "_N" +
                                   std::to_string(n);
                jst::CsvWriter csv(out_path(g, base + ".csv"));
                csv.metadata("figure1 preset: alpha=1 x_m=1 beta=" + jst::format_number(beta) +
                             " N=" + std::to_string(n) +
                             " profile=ExponentialSaturating a=10 b=1 gamma=10 cost=identity");
                csv.header({"x_M", "eff_rho0.7", "eff_rho0.8", "eff_rho0.9"});
                std::vector<jst::SvgSeries> series(3);
                for (int k = 0; k < 3; ++k)
                    series[k].label = "rho " + jst::format_number(rhos[k]);
                for (double xM : xMs) {
                    std::vector<double> row{xM};
                    for (int k = 0; k < 3; ++k) {
                        jst::SystemConfig sys;
                        sys.n_servers = n;
                        sys.dist = jst::pareto_tail_dist(1.0, beta, 1.0, xM);
                        sys.lambda_per_server = rhos[k] / sys.dist.mean();
                        sys.profile.family = jst::ProfileFamily::ExponentialSaturating;
                        sys.profile.rate_small = 10.0;
                        sys.profile.rate_large = 1.0;
                        double ss = jst::design_testing_time(sys.lambda_per_server, n,
                                                             sys.dist, 10.0);
                        double e = jst::efficiency(sys, ss);
                        row.push_back(e);
                        series[k].points.emplace_back(xM, e);
                    }
                    csv.row(row);
                }
                csv.write();
                jst::write_svg_chart(out_path(g, base + ".svg"),
                                     "efficiency at the designed testing time",
                                     "largest job size", "efficiency", series, true);
            }
        }
        std::printf("wrote 6 panels (figure1)\n");
        return kExitOk;
    }
    if (which == 2) {
        const double ps[3] = {0.5, 0.2, 0.8};
        for (double p : ps) {
            for (int n : ns) {
                jst::TwoPointJobDist dist;
                dist.small_size = 25;
                dist.large_size = 540;
                dist.p_small = p;
                std::string base = "fig2_p" + jst::format_number(p) + "_N" + std::to_string(n);
                jst::CsvWriter csv(out_path(g, base + ".csv"));
                // common grid kept stable for the highest-load curve
                double smax = 0.9 / (rhos[2] / dist.mean() * n);
                std::string meta = "figure2 preset: x_m=25 x_M=540 p=" + jst::format_number(p) +
                                   " E[X]=" + jst::format_number(dist.mean()) +
                                   " N=" + std::to_string(n) +
                                   " profile=NoFalseSmall a=3 b=1 gamma=10 cost=identity";
                std::vector<jst::SvgSeries> series(3);
                std::vector<double> dens(3), stars(3);
                std::vector<jst::SystemConfig> syss(3);
                for (int k = 0; k < 3; ++k) {
                    jst::SystemConfig sys;
                    sys.n_servers = n;
                    sys.dist = dist;
                    sys.lambda_per_server = rhos[k] / dist.mean();
                    sys.profile.family = jst::ProfileFamily::NoFalseSmall;
                    sys.profile.rate_small = 3.0;
                    syss[k] = sys;
                    dens[k] = jst::min_cost_over_cutoff(sys, 0.0).value;
                    stars[k] = jst::design_testing_time(sys.lambda_per_server, n, dist, 10.0);
                    series[k].label = "rho " + jst::format_number(rhos[k]);
                    meta += " sigma_star(rho=" + jst::format_number(rhos[k]) +
                            ")=" + jst::format_number(stars[k]);
                }
                csv.metadata(meta);
                csv.header({"sigma", "eff_rho0.7", "eff_rho0.8", "eff_rho0.9"});
                for (double s : jst::sigma_grid(smax, 200)) {
                    std::vector<double> row{s};
                    for (int k = 0; k < 3; ++k) {
                        double e = jst::min_cost_over_cutoff(syss[k], s).value / dens[k];
                        row.push_back(e);
                        series[k].points.emplace_back(s, e);
                    }
                    csv.row(row);
                }
                csv.write();
                jst::write_svg_chart(out_path(g, base + ".svg"),
                                     "efficiency against testing time", "testing time",
                                     "efficiency", series, false);
            }
        }
        std::printf("wrote 6 panels (figure2)\n");
        return kExitOk;
    }
    std::fprintf(stderr, "error: --which must be 1 or 2\n");
    return kExitUsage;
}

int cmd_simulate(const GlobalOpts& g, double cutoff, double sigma, long jobs_flag,
                 int reps_flag, long warmup_flag, const std::string& event_log) {
    ExperimentConfig cfg;
    int code = kExitOk;
    if (!load_config(g, cfg, code)) return code;

    if (sigma > 0 && sigma * cfg.system.total_arrival_rate() >= 1) {
        std::fprintf(stderr, "error: scheduler unstable at sigma %g\n", sigma);
        return kExitUnstable;
    }
    if (!(cutoff >= 0) || cutoff >= cfg.system.n_servers) {
        std::fprintf(stderr, "error: simulation cutoff must lie in [0, N)\n");
        return kExitUsage;
    }
    jst::CostBreakdown analytic = jst::total_cost(cfg.system, cutoff, sigma);
    if (!analytic.finite()) {
        std::fprintf(stderr, "error: %s unstable\n", jst::unstable_name(analytic.reason));
        return kExitUnstable;
    }

    jst::SimParams params;
    if (cfg.sim.jobs) params.jobs = *cfg.sim.jobs;
    if (cfg.sim.warmup) params.warmup = *cfg.sim.warmup;
    if (cfg.sim.seed) params.seed = *cfg.sim.seed;
    if (cfg.sim.replications) params.replications = *cfg.sim.replications;
    if (jobs_flag > 0) params.jobs = jobs_flag;
    if (reps_flag > 0) params.replications = reps_flag;
    if (warmup_flag >= 0) params.warmup = warmup_flag;
    if (g.seed_given) params.seed = g.seed;
    if (!event_log.empty()) params.event_log_path = out_path(g, event_log);

    int streams = g.threads > 0 ? g.threads : 1;
    jst::SimReport rep = jst::replicate_parallel(cfg.system, cutoff, sigma, params, streams);

    ordered_json j;
    j["sigma"] = number(sigma);
    j["cutoff"] = number(cutoff);
    j["analytic_total"] = analytic.total;
    j["total"] = {{"mean", rep.total.mean}, {"ci95", rep.total.half_width}};
    j["scheduler_sojourn"] = {{"mean", rep.scheduler_sojourn.mean},
                              {"ci95", rep.scheduler_sojourn.half_width}};
    j["servers_waiting"] = {{"mean", rep.servers_waiting.mean},
                            {"ci95", rep.servers_waiting.half_width}};
    j["jobs_completed"] = rep.jobs_completed;
    j["predicted_small_fraction"] = rep.predicted_small_fraction;
    j["per_server_utilization"] = rep.per_server_utilization;
    j["seed"] = rep.seed;
    j["replications"] = rep.replications;
    std::printf("%s\n", j.dump().c_str());
    return kExitOk;
}

int cmd_verify(const std::string& suite, int threads) {
    std::vector<int> ids = jst::suite_criteria(suite);
    bool all = true;
    for (int id : ids) {
        jst::CriterionResult r = jst::run_criterion(id, threads);
        all = all && r.pass;
        std::printf("[%s] %s/%d %s: %s (%.1fs)\n", r.pass ? "PASS" : "FAIL", suite.c_str(),
                    r.id, r.name.c_str(), r.detail.c_str(), r.seconds);
    }
    return all ? kExitOk : kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"job-size testing toolkit: waiting-time analysis, testing-time design, "
                 "optimization, simulation, and verification"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOpts g;
    app.add_option("--config", g.config_path, "experiment config (JSON)");
    app.add_option("--out", g.out_dir, "output directory for generated files");
    auto* seed_opt = app.add_option("--seed", g.seed, "master seed for simulation");
    app.add_option("--threads", g.threads, "worker threads for simulation/verification");

    double cutoff = 0, sigma = 0;
    CLI::App* eval = app.add_subcommand("eval", "evaluate the total cost at (cutoff, sigma)");
    eval->add_option("--cutoff,-c", cutoff, "cutoff in [0, N]")->required();
    eval->add_option("--sigma,-s", sigma, "testing time");

    double osigma = 0;
    CLI::App* opt = app.add_subcommand("optimize", "minimize the total cost over the cutoff");
    opt->add_option("--sigma,-s", osigma, "testing time");

    PresetOpts po;
    std::string sweep_csv;
    CLI::App* sweep = app.add_subcommand("sweep", "efficiency sweep over testing times");
    sweep->add_option("--preset", po.preset, "figure1 or figure2 (instead of --config)");
    sweep->add_option("--workload", po.workload, "figure2 workload: p50, p20, p80");
    sweep->add_option("--beta", po.beta, "figure1 tail decay");
    sweep->add_option("--xM", po.xM, "figure1 largest job size");
    sweep->add_option("--N", po.n, "preset server count");
    sweep->add_option("--rho", po.rho, "preset per-server load");
    sweep->add_option("--csv", sweep_csv, "CSV output path (overrides config)");

    double scutoff = 0, ssigma = 0;
    long sim_jobs = 0, sim_warmup = -1;
    int sim_reps = 0;
    std::string event_log;
    CLI::App* sim = app.add_subcommand("simulate", "simulate the full pipeline");
    sim->add_option("--cutoff,-c", scutoff, "cutoff in [0, N)")->required();
    sim->add_option("--sigma,-s", ssigma, "testing time");
    sim->add_option("--jobs", sim_jobs, "arrivals per replication");
    sim->add_option("--replications", sim_reps, "independent replications");
    sim->add_option("--warmup", sim_warmup, "jobs discarded up front");
    sim->add_option("--event-log", event_log, "per-job event CSV (first replication)");

    int which = 0;
    CLI::App* figures = app.add_subcommand("figures", "reproduce the report figure panels");
    figures->add_option("--which", which, "panel set: 1 or 2")->required();

    std::string suite;
    CLI::App* verify = app.add_subcommand("verify", "run a verification suite");
    verify->add_option("--suite", suite,
                       "prop1 (waiting limit), thm1 (derivative decay), thm2 (zero-testing "
                       "derivative), thm3 (tail trends), bounds (lower bounds)")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }
    g.seed_given = seed_opt->count() > 0;

    try {
        if (eval->parsed()) return cmd_eval(g, cutoff, sigma);
        if (opt->parsed()) return cmd_optimize(g, osigma);
        if (sweep->parsed()) return cmd_sweep(g, po, sweep_csv);
        if (sim->parsed())
            return cmd_simulate(g, scutoff, ssigma, sim_jobs, sim_reps, sim_warmup, event_log);
        if (figures->parsed()) return cmd_figures(g, which);
        if (verify->parsed()) return cmd_verify(suite, g.threads);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    }
    return kExitUsage;
}
