#include "jst/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <stdexcept>
#include <thread>

#include "jst/analytic.hpp"

namespace jst {

namespace {

// 97.5% Student-t quantiles for df = 1..30; 1.96 beyond.
constexpr double kT975[] = {
    12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228,
    2.201,  2.179, 2.160, 2.145, 2.131, 2.120, 2.110, 2.101, 2.093, 2.086,
    2.080,  2.074, 2.069, 2.064, 2.060, 2.056, 2.052, 2.048, 2.045, 2.042};

double t975(int df) {
    if (df < 1) return 0.0;
    if (df <= 30) return kT975[df - 1];
    return 1.96;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// substream seed: a fixed mix of the master seed and the replication index
std::uint64_t substream_seed(std::uint64_t master, int rep) {
    return splitmix64(master ^ splitmix64(0x51700FACADE0ull + static_cast<std::uint64_t>(rep)));
}

struct RepStats {
    double mean_sched = 0;
    double mean_wait = 0;
    double total = 0;
    double pred_small_frac = 0;
    std::vector<double> utilization;
};

RepStats run_replication(const SystemConfig& cfg, double c, double sigma, long jobs, long warmup,
                         std::uint64_t seed, const std::string& log_path) {
    const int n = cfg.n_servers;
    const double lam = cfg.total_arrival_rate();
    const JointPmf pmf = prediction_pmf(cfg.dist, cfg.profile, sigma);
    // P(predicted small | size)
    const double ps_given_small = cfg.dist.p_small > 0 ? pmf.ss / cfg.dist.p_small : 0.0;
    const double ps_given_large =
        cfg.dist.p_small < 1 ? pmf.ls / (1.0 - cfg.dist.p_small) : 0.0;
    const double k = std::floor(c);

    std::mt19937_64 rng(seed);
    std::exponential_distribution<double> inter(lam);
    std::exponential_distribution<double> test_time(sigma > 0 ? 1.0 / sigma : 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    std::FILE* log = nullptr;
    if (!log_path.empty()) {
        log = std::fopen(log_path.c_str(), "w");
        if (!log) throw std::runtime_error("cannot open event log: " + log_path);
        std::fputs(
            "job_id,arrival_t,test_done_t,server,service_start_t,depart_t,size,prediction\n",
            log);
    }

    double arrival = 0;            // current job arrival time
    double sched_depart = 0;       // last scheduler departure
    std::vector<double> last_depart(n, 0.0);  // per-server last departure

    double sum_sched = 0, sum_wait = 0, sum_pred_small = 0;
    std::vector<double> busy(n, 0.0);
    double window_start = 0, window_end = 0;
    long counted = 0;

    for (long i = 0; i < jobs; ++i) {
        arrival += inter(rng);
        // testing stage (single FCFS station)
        if (sigma > 0)
            sched_depart = std::max(arrival, sched_depart) + test_time(rng);
        else
            sched_depart = arrival;
        double sched_sojourn = sched_depart - arrival;

        double size = unif(rng) < cfg.dist.p_small ? cfg.dist.small_size : cfg.dist.large_size;
        bool small_size = size == cfg.dist.small_size;
        bool pred_small = unif(rng) < (small_size ? ps_given_small : ps_given_large);

        // cutoff routing; u scaled onto the pool keeps one uniform per job
        int server;  // 0-based
        if (pred_small) {
            double u = unif(rng) * std::max(c, 1e-300);
            server = (c >= 1.0 && u < k) ? static_cast<int>(u) : static_cast<int>(k);
        } else {
            double u = unif(rng) * (n - c);
            double in_pool = n - 1.0 - k;
            server = (c <= n - 1.0 && u < in_pool) ? static_cast<int>(k) + 1 + static_cast<int>(u)
                                                   : static_cast<int>(k);
        }
        server = std::min(server, n - 1);

        double start = std::max(sched_depart, last_depart[server]);
        double depart = start + size;
        last_depart[server] = depart;
        double wait = start - sched_depart;

        if (i >= warmup) {
            if (counted == 0) window_start = arrival;
            window_end = arrival;
            ++counted;
            sum_sched += sched_sojourn;
            sum_wait += wait;
            sum_pred_small += pred_small ? 1.0 : 0.0;
            busy[server] += size;
        }
        if (log)
            std::fprintf(log, "%ld,%.12g,%.12g,%d,%.12g,%.12g,%.12g,%s\n", i, arrival,
                         sched_depart, server + 1, start, depart, size,
                         pred_small ? "small" : "large");
    }
    if (log) std::fclose(log);

    RepStats st;
    st.mean_sched = sum_sched / counted;
    st.mean_wait = sum_wait / counted;
    st.total = cfg.cost(st.mean_sched) + st.mean_wait;
    st.pred_small_frac = sum_pred_small / counted;
    st.utilization.resize(n, 0.0);
    double window = window_end - window_start;
    if (window > 0)
        for (int s = 0; s < n; ++s)
            st.utilization[s] = std::min(1.0, busy[s] / window);
    return st;
}

SimEstimate reduce(const std::vector<double>& xs) {
    SimEstimate e;
    int r = static_cast<int>(xs.size());
    for (double x : xs) e.mean += x;
    e.mean /= r;
    if (r >= 2) {
        double ss = 0;
        for (double x : xs) ss += (x - e.mean) * (x - e.mean);
        double sd = std::sqrt(ss / (r - 1));
        e.half_width = t975(r - 1) * sd / std::sqrt(static_cast<double>(r));
    }
    return e;
}

SimReport aggregate(const SystemConfig& cfg, const std::vector<RepStats>& reps,
                    const SimParams& params, long jobs_counted) {
    SimReport rep;
    std::vector<double> sched, wait, tot;
    for (const RepStats& r : reps) {
        sched.push_back(r.mean_sched);
        wait.push_back(r.mean_wait);
        tot.push_back(r.total);
    }
    rep.scheduler_sojourn = reduce(sched);
    rep.servers_waiting = reduce(wait);
    rep.total = reduce(tot);
    rep.replication_totals = tot;
    rep.jobs_completed = jobs_counted * static_cast<long>(reps.size());
    rep.per_server_utilization.assign(cfg.n_servers, 0.0);
    rep.predicted_small_fraction = 0;
    for (const RepStats& r : reps) {
        rep.predicted_small_fraction += r.pred_small_frac / reps.size();
        for (int s = 0; s < cfg.n_servers; ++s)
            rep.per_server_utilization[s] += r.utilization[s] / reps.size();
    }
    rep.seed = params.seed;
    rep.replications = static_cast<int>(reps.size());
    return rep;
}

void check_params(const SystemConfig& cfg, double c, double sigma, const SimParams& params,
                  long& warmup) {
    cfg.validate();
    if (!(c >= 0) || c >= cfg.n_servers)
        throw std::invalid_argument("simulation cutoff must lie in [0, N)");
    if (sigma > 0 && !(cfg.total_arrival_rate() * sigma < 1))
        throw std::invalid_argument("scheduler unstable: lambda N sigma >= 1");
    if (!total_cost(cfg, c, sigma).finite())
        throw std::invalid_argument("unstable configuration refused");
    warmup = params.warmup < 0 ? params.jobs / 10 : params.warmup;
    if (params.jobs <= warmup) throw std::invalid_argument("jobs must exceed warmup");
    if (params.replications < 1) throw std::invalid_argument("replications must be >= 1");
}

}  // namespace

SimReport simulate(const SystemConfig& cfg, double c, double sigma, const SimParams& params) {
    long warmup = 0;
    check_params(cfg, c, sigma, params, warmup);
    std::vector<RepStats> reps(params.replications);
    for (int r = 0; r < params.replications; ++r)
        reps[r] = run_replication(cfg, c, sigma, params.jobs, warmup,
                                  substream_seed(params.seed, r),
                                  r == 0 ? params.event_log_path : std::string());
    return aggregate(cfg, reps, params, params.jobs - warmup);
}

SimReport replicate_parallel(const SystemConfig& cfg, double c, double sigma,
                             const SimParams& params, int streams) {
    if (streams < 1) throw std::invalid_argument("streams must be >= 1");
    long warmup = 0;
    check_params(cfg, c, sigma, params, warmup);
    std::vector<RepStats> reps(params.replications);
    std::vector<std::thread> workers;
    std::size_t stride = streams;
    for (int w = 0; w < streams; ++w) {
        workers.emplace_back([&, w]() {
            for (int r = w; r < params.replications; r += static_cast<int>(stride))
                reps[r] = run_replication(cfg, c, sigma, params.jobs, warmup,
                                          substream_seed(params.seed, r),
                                          r == 0 ? params.event_log_path : std::string());
        });
    }
    for (std::thread& t : workers) t.join();
    return aggregate(cfg, reps, params, params.jobs - warmup);
}

}  // namespace jst
