#pragma once

#include <functional>

#include "jst/model.hpp"

// Stationary performance formulas: the M/M/1 testing-scheduler delay, the
// mean waiting time across the N downstream FCFS servers under a cutoff
// dispatching rule (general real cutoff and the integer-pool special case),
// the combined total cost, and a forward-difference helper for derivatives
// of the cost at sigma = 0.

namespace jst {

// Which stability condition failed; None means every term is finite.
enum class Unstable { None, Scheduler, ShortPool, MixedServer, LongPool };

const char* unstable_name(Unstable u);

// Mean sojourn of the M/M/1 testing stage: sigma / (1 - Lambda * sigma).
// sigma = 0 is a pass-through; Lambda * sigma >= 1 yields +infinity.
double scheduler_delay(double total_arrival_rate, double sigma);

// Routing of the cutoff rule with real c in [0, N]: predicted-small jobs
// go to servers 1..floor(c) with total probability floor(c)/c, otherwise
// to server floor(c)+1; predicted-large jobs go to servers floor(c)+2..N
// with total probability (N-1-floor(c))/(N-c), otherwise to server
// floor(c)+1. c = N is a documented extrapolation of the formula (the
// overflow position is not a physical server there).
struct RoutingProbs {
    double small_in_pool = 0;  // P(dedicated small pool | predicted small)
    double large_in_pool = 0;  // P(dedicated large pool | predicted large)
    double mixed_weight = 0;   // unconditional mass arriving at the overflow server
};

RoutingProbs routing_probs(double c, int n, const PredictionSplit& split);

// Mean waiting time across servers, split into the three aggregate terms
// (dedicated small pool, overflow server, dedicated large pool). Any
// positive-weight pool whose load reaches 1 makes the result +infinity
// with the violated condition recorded; zero-weight pools contribute 0.
struct WaitingResult {
    double total = 0;
    double small_term = 0;
    double mixed_term = 0;
    double large_term = 0;
    Unstable reason = Unstable::None;

    bool finite() const { return reason == Unstable::None; }
};

WaitingResult servers_waiting(const SystemConfig& cfg, double c, double sigma);

// Integer-pool form: servers 1..C take predicted-small jobs, C+1..N the
// rest. Equal to servers_waiting at integer c (the terms combine).
WaitingResult servers_waiting_integer(const SystemConfig& cfg, int pool_servers, double sigma);

// Total cost D = f(scheduler delay) + servers waiting.
struct CostBreakdown {
    double scheduler_delay = 0;
    double scheduler_cost = 0;
    double servers_waiting = 0;
    double total = 0;
    Unstable reason = Unstable::None;

    bool finite() const { return reason == Unstable::None; }
};

CostBreakdown total_cost(const SystemConfig& cfg, double c, double sigma);

enum class CostPart { ServersOnly, Total };

// One-sided forward difference of the chosen cost part at sigma = 0, with
// the cutoff supplied per evaluation point (fixed or re-derived policies).
double fd_derivative_at_zero(const SystemConfig& cfg, CostPart part,
                             const std::function<double(double)>& cutoff_at_sigma, double h);

}  // namespace jst
