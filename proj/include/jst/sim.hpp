#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "jst/model.hpp"

// Discrete-event simulation of the full pipeline: Poisson arrivals, an
// M/M/1 FCFS testing stage with mean sigma (pass-through at sigma = 0),
// prediction sampling from the joint law at the configured sigma, cutoff
// routing, and N FCFS unit-rate servers. Used as an independent oracle for
// the analytic formulas.
//
// Every station is FCFS and the network is feed-forward, so the sample
// path is computed by per-job waiting-time recursions in arrival order;
// this is the event-driven system with ties broken by arrival index.

namespace jst {

struct SimParams {
    long jobs = 1'000'000;       // arrivals per replication
    long warmup = -1;            // jobs discarded up front; -1 means 10% of jobs
    std::uint64_t seed = 1;
    int replications = 20;
    std::string event_log_path;  // first replication only; empty disables
};

struct SimEstimate {
    double mean = 0;
    double half_width = 0;  // 95% Student-t over replications; 0 when reps < 2
};

struct SimReport {
    SimEstimate scheduler_sojourn;
    SimEstimate servers_waiting;
    SimEstimate total;  // cost(mean scheduler sojourn) + mean waiting, per replication
    long jobs_completed = 0;
    std::vector<double> per_server_utilization;  // in [0,1]
    double predicted_small_fraction = 0;
    std::uint64_t seed = 0;
    int replications = 0;
    std::vector<double> replication_totals;  // determinism checks
};

// Runs `replications` independent replications sequentially.
SimReport simulate(const SystemConfig& cfg, double c, double sigma, const SimParams& params);

// Same statistics as simulate for the same seed, computed on `streams`
// worker threads; per-replication results depend only on (seed, index).
SimReport replicate_parallel(const SystemConfig& cfg, double c, double sigma,
                             const SimParams& params, int streams);

}  // namespace jst
