#include "jst/verify.hpp"

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <random>
#include <thread>

#include "jst/analytic.hpp"
#include "jst/design.hpp"
#include "jst/io.hpp"
#include "jst/optimize.hpp"
#include "jst/sim.hpp"

namespace jst {

namespace {

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list args;
    va_start(args, f);
    std::vsnprintf(buf, sizeof buf, f, args);
    va_end(args);
    return buf;
}

double uni(std::mt19937_64& rng, double a, double b) {
    return std::uniform_real_distribution<double>(a, b)(rng);
}

int uni_int(std::mt19937_64& rng, int a, int b) {
    return std::uniform_int_distribution<int>(a, b)(rng);
}

// Stable random system: load in [0.1, 0.9], all four profile families,
// occasional explicit zero-testing diagonals.
SystemConfig random_config(std::mt19937_64& rng, int n_lo, int n_hi) {
    SystemConfig cfg;
    cfg.n_servers = uni_int(rng, n_lo, n_hi);
    cfg.dist.small_size = uni(rng, 0.5, 4.0);
    cfg.dist.large_size = cfg.dist.small_size * uni(rng, 2.0, 80.0);
    cfg.dist.p_small = uni(rng, 0.05, 0.95);
    const ProfileFamily fams[] = {ProfileFamily::PerfectKnowledge,
                                  ProfileFamily::IndependentConstant,
                                  ProfileFamily::ExponentialSaturating,
                                  ProfileFamily::NoFalseSmall};
    cfg.profile.family = fams[uni_int(rng, 0, 3)];
    cfg.profile.rate_small = uni(rng, 0.5, 6.0);
    cfg.profile.rate_large = uni(rng, 0.2, 2.0);
    if (uni(rng, 0.0, 1.0) < 0.3) {
        if (cfg.profile.family == ProfileFamily::ExponentialSaturating) {
            cfg.profile.diag_small0 = uni(rng, 0.0, cfg.dist.p_small);
            cfg.profile.diag_large0 = uni(rng, 0.0, 1.0 - cfg.dist.p_small);
        } else if (cfg.profile.family == ProfileFamily::NoFalseSmall) {
            cfg.profile.diag_small0 = uni(rng, 0.0, cfg.dist.p_small);
        }
    }
    double rho = uni(rng, 0.1, 0.9);
    cfg.lambda_per_server = rho / cfg.dist.mean();
    return cfg;
}

TwoPointJobDist neuro_dist(double p) {
    TwoPointJobDist d;
    d.small_size = 25;
    d.large_size = 540;
    d.p_small = p;
    return d;
}

// --- check 1: general and integer-pool waiting formulas agree at integer cutoffs

CriterionResult check_integer_equivalence() {
    std::mt19937_64 rng(11);
    double worst = 0;
    int infinite_pairs = 0;
    for (int it = 0; it < 1000; ++it) {
        SystemConfig cfg = random_config(rng, 2, 40);
        int c = uni_int(rng, 1, cfg.n_servers - 1);
        double sigma =
            it % 10 == 0 ? 0.0 : uni(rng, 0.0, 0.8 / cfg.total_arrival_rate());
        WaitingResult a = servers_waiting(cfg, c, sigma);
        WaitingResult b = servers_waiting_integer(cfg, c, sigma);
        if (!a.finite() || !b.finite()) {
            if (a.finite() != b.finite()) {
                CriterionResult r;
                r.detail = fmt("finiteness mismatch at iteration %d", it);
                return r;
            }
            ++infinite_pairs;
            continue;
        }
        double rel = std::abs(a.total - b.total) / std::max(1.0, std::abs(b.total));
        worst = std::max(worst, rel);
    }
    CriterionResult r;
    r.pass = worst <= 1e-10;
    r.detail = fmt("worst relative gap %.3g (allowed 1e-10), %d unstable pairs agreed",
                   worst, infinite_pairs);
    return r;
}

// --- check 2: pinned three-server waiting value

CriterionResult check_worked_example() {
    SystemConfig cfg;
    cfg.n_servers = 3;
    cfg.lambda_per_server = 0.1;
    cfg.dist = {1.0, 10.0, 0.9};
    cfg.profile.family = ProfileFamily::PerfectKnowledge;
    double w = servers_waiting(cfg, 1.0, 0.0).total;
    CriterionResult r;
    r.pass = std::abs(w - 0.2546737) <= 1e-6;
    r.detail = fmt("waiting %.9f vs pinned 0.2546737 (tol 1e-6)", w);
    return r;
}

/// --- check 3: zero testing time is never counted as a gain or a loss

CriterionResult check_unit_efficiency_at_zero() {
    std::mt19937_64 rng(33);
    double worst = 0;
    for (int it = 0; it < 100; ++it) {
        SystemConfig cfg = random_config(rng, 2, 30);
        worst = std::max(worst, std::abs(efficiency(cfg, 0.0) - 1.0));
    }
    CriterionResult r;
    r.pass = worst <= 1e-12;
    r.detail = fmt("worst |E(0)-1| = %.3g (allowed 1e-12) over 100 configs", worst);
    return r;
}

// --- check 4: information-free floors hold across the whole domain

CriterionResult check_lower_bounds() {
    std::mt19937_64 rng(44);
    double worst_wait_margin = std::numeric_limits<double>::infinity();
    double worst_eff_margin = std::numeric_limits<double>::infinity();
    int finite_evals = 0;
    for (int it = 0; it < 10000; ++it) {
        SystemConfig cfg = random_config(rng, 2, 24);
        double sigma = uni(rng, 0.0, 0.9 / cfg.total_arrival_rate());
        double c = uni(rng, 0.0, 1.0) * cfg.n_servers * (1.0 - 1e-12);
        double floor_wait = waiting_lower_bound(cfg.dist, cfg.lambda_per_server);
        WaitingResult w = servers_waiting(cfg, c, sigma);
        if (w.finite()) {
            ++finite_evals;
            worst_wait_margin = std::min(worst_wait_margin, w.total / floor_wait - 1.0);
        }
        double e = efficiency(cfg, sigma);
        worst_eff_margin =
            std::min(worst_eff_margin, e / efficiency_floor(cfg.dist) - 1.0);
    }
    CriterionResult r;
    r.pass = worst_wait_margin >= -1e-12 && worst_eff_margin >= -1e-12;
    r.detail = fmt("min waiting margin %.3g, min efficiency margin %.3g "
                   "(both must be >= -1e-12; %d finite waiting evals of 10000)",
                   worst_wait_margin, worst_eff_margin, finite_evals);
    return r;
}

// --- check 5: optimal waiting approaches its many-server limit

CriterionResult check_waiting_limit() {
    CriterionResult r;
    r.pass = true;
    std::string d;
    const double anchors[2] = {0.672839506172839, 0.222839506172839};
    const ProfileFamily fams[2] = {ProfileFamily::IndependentConstant,
                                   ProfileFamily::PerfectKnowledge};
    for (int i = 0; i < 2; ++i) {
        SystemConfig cfg;
        cfg.lambda_per_server = 0.1;
        cfg.dist = {1.0, 10.0, 0.9};
        cfg.profile.family = fams[i];
        double gap[2];
        for (int j = 0; j < 2; ++j) {
            int n = j == 0 ? 8 : 1024;
            cfg.n_servers = n;
            double sigma = testing_time_for_budget(0.1, n, 1.0);
            double best = std::numeric_limits<double>::infinity();
            for (int C = 1; C <= n - 1; ++C)
                best = std::min(best, servers_waiting_integer(cfg, C, sigma).total);
            double limit = asymptotic_waiting_limit(cfg, sigma);
            if (std::abs(limit - anchors[i]) > 1e-9) r.pass = false;
            gap[j] = std::abs(best - limit) / limit;
        }
        if (!(gap[1] <= 0.05 && gap[1] < gap[0])) r.pass = false;
        d += fmt("%s gap %.2e -> %.2e (need <= 5%% and shrinking); ",
                 family_name(fams[i]), gap[0], gap[1]);
    }
    r.detail = d;
    return r;
}

// --- check 6: with a constant-at-zero profile the waiting derivative fades with N

CriterionResult check_derivative_decay() {
    SystemConfig base;
    base.lambda_per_server = 0.1;
    base.dist = {1.0, 10.0, 0.9};
    base.profile.family = ProfileFamily::ExponentialSaturating;
    base.profile.rate_small = 3.0;
    base.profile.rate_large = 1.0;

    const int ns[4] = {10, 100, 1000, 10000};
    double mags[4];
    double fd_total = 0;
    for (int i = 0; i < 4; ++i) {
        SystemConfig cfg = base;
        cfg.n_servers = ns[i];
        double h = 1e-4 / cfg.total_arrival_rate();
        double c_fixed = std::floor(0.9 * ns[i]);
        auto cut = [c_fixed](double) { return c_fixed; };
        mags[i] = std::abs(fd_derivative_at_zero(cfg, CostPart::ServersOnly, cut, h));
        if (i == 3) fd_total = fd_derivative_at_zero(cfg, CostPart::Total, cut, h);
    }
    bool decreasing = mags[1] < mags[0] && mags[2] < mags[1] && mags[3] < mags[2];
    CriterionResult r;
    r.pass = decreasing && mags[3] < 0.05 && std::abs(fd_total - 1.0) <= 0.1;
    r.detail = fmt("|dR/ds| = {%.2e, %.2e, %.2e, %.2e} over N={10..10^4} "
                   "(decreasing %s, last < 0.05 %s); dD/ds = %.5f (need within 10%% of 1)",
                   mags[0], mags[1], mags[2], mags[3], decreasing ? "yes" : "NO",
                   mags[3] < 0.05 ? "yes" : "NO", fd_total);
    return r;
}

// --- check 7: closed-form zero-testing derivative matches finite differences

CriterionResult check_zero_derivative_closed_form() {
    struct Row {
        double xm, xM, p, lam, a, diag0;
    };
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const Row rows[10] = {
        {1, 10, 0.9, 0.10, 3.0, nan},          {1, 10, 0.9, 0.05, 3.0, nan},
        {1, 10, 0.8, 0.08, 2.0, nan},          {25, 540, 0.5, 0.8 / 282.5, 3.0, nan},
        {25, 540, 0.8, 0.8 / 128.0, 3.0, nan}, {25, 540, 0.2, 0.5 / 437.0, 1.0, nan},
        {1, 50, 0.95, 0.05, 5.0, nan},         {2, 30, 0.7, 0.02, 4.0, 0.2},
        {1, 10, 0.9, 0.10, 3.0, 0.7},          {5, 100, 0.6, 0.01, 2.5, 0.3},
    };
    const int n = 10000;
    CriterionResult r;
    r.pass = true;
    double worst_rel = 0;
    int sign_checked = 0;
    for (int i = 0; i < 10; ++i) {
        SystemConfig cfg;
        cfg.n_servers = n;
        cfg.lambda_per_server = rows[i].lam;
        cfg.dist = {rows[i].xm, rows[i].xM, rows[i].p};
        cfg.profile.family = ProfileFamily::NoFalseSmall;
        cfg.profile.rate_small = rows[i].a;
        cfg.profile.diag_small0 = rows[i].diag0;

        ZeroTestingDerivative z = zero_testing_derivative(cfg);
        if (i == 0 && std::abs(z.rate - 0.385837269421641) > 1e-9) r.pass = false;
        double h = 1e-4 / cfg.total_arrival_rate();
        auto cut = [&cfg, n](double s) {
            return static_cast<double>(integer_cutoff(cfg, s, n));
        };
        double fd = fd_derivative_at_zero(cfg, CostPart::Total, cut, h);
        double rel = std::abs(fd - z.rate) / std::abs(z.rate);
        worst_rel = std::max(worst_rel, rel);
        if (rel > 0.05) r.pass = false;
        double f0 = cfg.cost.slope_at_zero();
        if (z.condition_value >= 1.1 * f0) {
            ++sign_checked;
            if (!(fd < 0)) r.pass = false;
        } else if (z.condition_value <= 0.9 * f0) {
            ++sign_checked;
            if (!(fd > 0)) r.pass = false;
        }
    }
    r.detail = fmt("10 configs: worst |fd-closed|/|closed| = %.3g (allowed 0.05), "
                   "sign agreed on all %d margin cases, anchor 0.385837 matched",
                   worst_rel, sign_checked);
    return r;
}

// Bounded-tail scenario of the first figure family at a given tail decay.
SystemConfig fig1_config(double beta, double xM) {
    SystemConfig cfg;
    cfg.n_servers = 100;
    cfg.dist = pareto_tail_dist(1.0, beta, 1.0, xM);
    cfg.lambda_per_server = 0.8 / cfg.dist.mean();
    cfg.profile.family = ProfileFamily::ExponentialSaturating;
    cfg.profile.rate_small = 10.0;
    cfg.profile.rate_large = 1.0;
    return cfg;
}

// --- check 8: heavy tails decide whether testing pays

CriterionResult check_tail_benefit() {
    CriterionResult r;
    double evals[4];
    const double xMs[4] = {1e2, 1e3, 1e4, 1e5};
    for (int i = 0; i < 4; ++i) {
        SystemConfig cfg = fig1_config(0.5, xMs[i]);
        double ss = design_testing_time(cfg.lambda_per_server, 100, cfg.dist, 10.0);
        evals[i] = efficiency(cfg, ss);
    }
    bool decreasing = evals[1] < evals[0] && evals[2] < evals[1] && evals[3] < evals[2];
    double ratio = evals[3] / evals[0];
    bool light_ok[2];
    double light_min[2];
    const double betas[2] = {1.5, 2.0};
    for (int b = 0; b < 2; ++b) {
        SystemConfig cfg = fig1_config(betas[b], 1e5);
        double smax = 0.9 / cfg.total_arrival_rate();
        double den = min_cost_over_cutoff(cfg, 0.0).value;
        double worst = std::numeric_limits<double>::infinity();
        for (double s : sigma_grid(smax, 400))
            worst = std::min(worst, min_cost_over_cutoff(cfg, s).value / den);
        light_min[b] = worst;
        light_ok[b] = worst >= 1.0 - 1e-9;
    }
    r.pass = decreasing && ratio <= 0.2 && light_ok[0] && light_ok[1];
    r.detail = fmt("steep tail: E(s*) = {%.4f, %.4f, %.4f, %.4f} decreasing %s, "
                   "drop ratio %.4f (need <= 0.2); shallow tails: min-grid E = "
                   "{%.10f, %.10f} (need >= 1-1e-9: %s, %s)",
                   evals[0], evals[1], evals[2], evals[3], decreasing ? "yes" : "NO",
                   ratio, light_min[0], light_min[1], light_ok[0] ? "yes" : "NO",
                   light_ok[1] ? "yes" : "NO");
    return r;
}

// --- check 9: designed testing/cutoff pair approaches the closed-form cost ratios

CriterionResult check_design_limits() {
    CriterionResult r;
    r.pass = true;
    std::string d;
    const double anchors_ref[2] = {1.799301, 0.208333};
    const double rhos[2] = {0.19, 0.8};
    for (int case_i = 0; case_i < 2; ++case_i) {
        double rho = rhos[case_i];
        double dist_anchor = 0, traj[3];
        for (int i = 0; i < 3; ++i) {
            double xM = std::pow(10.0, 3 + i);
            SystemConfig cfg;
            cfg.n_servers = 3;
            cfg.dist = pareto_tail_dist(1.0, 0.5, 1.0, xM);
            cfg.lambda_per_server = rho / cfg.dist.mean();
            cfg.profile.family = ProfileFamily::NoFalseSmall;
            cfg.profile.rate_small = 3.0;
            LimitRatio lim = design_limit_ratio(cfg, 10.0, 0.25);
            dist_anchor = lim.value;
            double ss = design_testing_time(cfg.lambda_per_server, 3, cfg.dist, 10.0);
            double c = design_cutoff(cfg, ss, 0.25);
            double cost = total_cost(cfg, c, ss).total;
            double floor_wait = waiting_lower_bound(cfg.dist, cfg.lambda_per_server);
            double scale = lim.regime == Regime::Subcritical
                               ? std::pow(xM, 0.25) * floor_wait
                               : floor_wait;
            traj[i] = cost / scale;
        }
        bool anchor_ok = std::abs(dist_anchor - anchors_ref[case_i]) <= 1e-6;
        double e0 = std::abs(traj[0] - dist_anchor), e1 = std::abs(traj[1] - dist_anchor),
               e2 = std::abs(traj[2] - dist_anchor);
        bool monotone = e1 < e0 && e2 < e1;
        bool close = e2 / dist_anchor <= 0.10;
        if (!(anchor_ok && monotone && close)) r.pass = false;
        d += fmt("%s: anchor %.6f (%s), ratios {%.4f, %.4f, %.4f} -> monotone %s, "
                 "final gap %.2f%% (need <= 10%%); ",
                 case_i == 0 ? "wide-margin" : "tight-margin", dist_anchor,
                 anchor_ok ? "ok" : "MISMATCH", traj[0], traj[1], traj[2],
                 monotone ? "yes" : "NO", 100.0 * e2 / dist_anchor);
    }
    r.detail = d;
    return r;
}

// --- check 10: simulation agrees with the closed forms

CriterionResult check_simulator_agreement(int threads) {
    if (threads <= 0)
        threads = std::max(1u, std::min(10u, std::thread::hardware_concurrency()));
    CriterionResult r;
    r.pass = true;
    std::string d;

    struct Scenario {
        const char* tag;
        SystemConfig cfg;
        double c;
        double sigma;
    };
    std::vector<Scenario> scenarios;

    {
        Scenario s;
        s.tag = "three-server";
        s.cfg.n_servers = 3;
        s.cfg.lambda_per_server = 0.1;
        s.cfg.dist = {1.0, 10.0, 0.9};
        s.cfg.profile.family = ProfileFamily::PerfectKnowledge;
        s.c = 1.0;
        s.sigma = 0.0;
        scenarios.push_back(s);
    }
    {
        Scenario s;
        s.tag = "designed";
        s.cfg.n_servers = 10;
        s.cfg.dist = neuro_dist(0.8);
        s.cfg.lambda_per_server = 0.8 / s.cfg.dist.mean();
        s.cfg.profile.family = ProfileFamily::NoFalseSmall;
        s.cfg.profile.rate_small = 3.0;
        s.sigma = design_testing_time(s.cfg.lambda_per_server, 10, s.cfg.dist, 10.0);
        s.c = min_cost_over_cutoff(s.cfg, s.sigma).argmin;
        scenarios.push_back(s);
    }
    {
        Scenario s;
        s.tag = "fractional";
        s.cfg.n_servers = 5;
        s.cfg.lambda_per_server = 0.1;
        s.cfg.dist = {1.0, 10.0, 0.9};
        s.cfg.profile.family = ProfileFamily::ExponentialSaturating;
        s.cfg.profile.rate_small = 3.0;
        s.cfg.profile.rate_large = 1.0;
        s.cfg.cost.kind = CostKind::Scaled;
        s.cfg.cost.kappa = 2.0;
        s.c = 2.5;
        s.sigma = 1.0;
        scenarios.push_back(s);
    }

    SimParams params;
    params.jobs = 1'000'000;
    params.warmup = -1;
    params.seed = 2026;
    params.replications = 20;

    for (const Scenario& s : scenarios) {
        double analytic = total_cost(s.cfg, s.c, s.sigma).total;
        SimReport rep = replicate_parallel(s.cfg, s.c, s.sigma, params, threads);
        double se = rep.total.half_width / 2.093;  // reps=20 -> t(19)=2.093
        double z = se > 0 ? std::abs(rep.total.mean - analytic) / se : 0.0;
        double rel_se = se / rep.total.mean;
        bool ok = z <= 3.0 && rel_se < 0.02;
        if (!ok) r.pass = false;
        d += fmt("%s: sim %.6g vs analytic %.6g (%.2f SE, need <= 3; SE/mean %.3g%%); ",
                 s.tag, rep.total.mean, analytic, z, 100.0 * rel_se);
    }
    r.detail = d;
    return r;
}

// --- check 11: structured cutoff search matches the exhaustive grid

CriterionResult check_optimizer_oracle() {
    std::mt19937_64 rng(77);
    double worst = 0;
    bool never_worse = true;
    for (int it = 0; it < 50; ++it) {
        SystemConfig cfg = random_config(rng, 2, 20);
        double sigma = uni(rng, 0.0, 0.8 / cfg.total_arrival_rate());
        OptimumPoint s = min_cost_over_cutoff(cfg, sigma);
        OptimumPoint g = grid_min_cost_over_cutoff(cfg, sigma, 1e-4);
        worst = std::max(worst, std::abs(s.value - g.value) / g.value);
        if (s.value > g.value * (1.0 + 1e-9)) never_worse = false;
    }
    CriterionResult r;
    r.pass = worst <= 1e-6 && never_worse;
    r.detail = fmt("worst relative value gap %.3g over 50 configs (allowed 1e-6); "
                   "structured never above grid: %s",
                   worst, never_worse ? "yes" : "NO");
    return r;
}

// --- check 12: designed testing time is near-optimal across workloads

CriterionResult check_design_near_optimality() {
    CriterionResult r;
    r.pass = true;
    std::string d;
    const double ps[3] = {0.5, 0.2, 0.8};
    const int ns[2] = {10, 100};
    for (double p : ps) {
        for (int n : ns) {
            SystemConfig cfg;
            cfg.n_servers = n;
            cfg.dist = neuro_dist(p);
            cfg.lambda_per_server = 0.8 / cfg.dist.mean();
            cfg.profile.family = ProfileFamily::NoFalseSmall;
            cfg.profile.rate_small = 3.0;
            double smax = 0.9 / cfg.total_arrival_rate();
            double den = min_cost_over_cutoff(cfg, 0.0).value;
            double e_first = min_cost_over_cutoff(cfg, smax * 1e-4).value / den;
            double ss = design_testing_time(cfg.lambda_per_server, n, cfg.dist, 10.0);
            double e_star = min_cost_over_cutoff(cfg, ss).value / den;
            double grid_min = std::numeric_limits<double>::infinity();
            for (double s : sigma_grid(smax, 100))
                grid_min = std::min(grid_min, min_cost_over_cutoff(cfg, s).value / den);
            double ratio = e_star / grid_min;
            bool ok = e_first < 1.0 && e_star < 1.0 && ratio <= 1.25;
            if (!ok) r.pass = false;
            d += fmt("p=%.1f N=%d: E(first)=%.6f E(s*)=%.6f ratio-to-best=%.4f%s; ", p, n,
                     e_first, e_star, ratio, ok ? "" : " [FAIL]");
        }
    }
    r.detail = d;
    return r;
}

}  // namespace

CriterionResult run_criterion(int id, int threads) {
    auto t0 = std::chrono::steady_clock::now();
    CriterionResult r;
    switch (id) {
        case 1:
            r = check_integer_equivalence();
            r.name = "integer-cutoff formula equivalence";
            break;
        case 2:
            r = check_worked_example();
            r.name = "pinned three-server waiting value";
            break;
        case 3:
            r = check_unit_efficiency_at_zero();
            r.name = "unit efficiency at zero testing time";
            break;
        case 4:
            r = check_lower_bounds();
            r.name = "waiting and efficiency lower bounds";
            break;
        case 5:
            r = check_waiting_limit();
            r.name = "many-server optimal waiting limit";
            break;
        case 6:
            r = check_derivative_decay();
            r.name = "vanishing waiting derivative at scale";
            break;
        case 7:
            r = check_zero_derivative_closed_form();
            r.name = "zero-testing derivative closed form";
            break;
        case 8:
            r = check_tail_benefit();
            r.name = "tail decay decides the testing benefit";
            break;
        case 9:
            r = check_design_limits();
            r.name = "designed pair approaches limit ratios";
            break;
        case 10:
            r = check_simulator_agreement(threads);
            r.name = "simulator agreement with closed forms";
            break;
        case 11:
            r = check_optimizer_oracle();
            r.name = "structured optimizer vs grid oracle";
            break;
        case 12:
            r = check_design_near_optimality();
            r.name = "designed testing time near-optimality";
            break;
        default:
            throw std::invalid_argument("criterion id must lie in 1..12");
    }
    r.id = id;
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

std::vector<int> suite_criteria(const std::string& suite) {
    if (suite == "prop1") return {5};
    if (suite == "thm1") return {6};
    if (suite == "thm2") return {7};
    if (suite == "thm3") return {8, 9};
    if (suite == "bounds") return {4};
    throw std::invalid_argument("unknown verify suite: " + suite);
}

std::vector<std::string> suite_names() { return {"prop1", "thm1", "thm2", "thm3", "bounds"}; }

}  // namespace jst
