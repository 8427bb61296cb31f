#include "jst/analytic.hpp"

#include <cmath>

namespace jst {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Mean waiting of an M/G/1 queue with arrival rate r and service moments
// (m1, m2); infinite when the load r*m1 reaches 1 (strict condition).
bool mg1_waiting(double r, double m1, double m2, double& w) {
    if (r <= 0) {
        w = 0;
        return true;
    }
    double load = r * m1;
    if (!(load < 1)) {
        w = kInf;
        return false;
    }
    w = r * m2 / (2.0 * (1.0 - load));
    return true;
}

}  // namespace

const char* unstable_name(Unstable u) {
    switch (u) {
        case Unstable::None: return "none";
        case Unstable::Scheduler: return "scheduler";
        case Unstable::ShortPool: return "small-pool";
        case Unstable::MixedServer: return "overflow-server";
        case Unstable::LongPool: return "large-pool";
    }
    return "?";
}

double scheduler_delay(double total_arrival_rate, double sigma) {
    if (sigma == 0) return 0.0;
    double util = total_arrival_rate * sigma;
    if (!(util < 1)) return kInf;
    return sigma / (1.0 - util);
}

RoutingProbs routing_probs(double c, int n, const PredictionSplit& split) {
    double k = std::floor(c);
    RoutingProbs r;
    r.small_in_pool = (c >= 1.0) ? k / c : 0.0;
    r.large_in_pool = (c <= n - 1.0 && c < n) ? (n - 1.0 - k) / (n - c) : 0.0;
    r.mixed_weight = split.pred_small.prob * (1.0 - r.small_in_pool) +
                     split.pred_large.prob * (1.0 - r.large_in_pool);
    return r;
}

WaitingResult servers_waiting(const SystemConfig& cfg, double c, double sigma) {
    const int n = cfg.n_servers;
    if (!(c >= 0) || c > n) throw std::invalid_argument("cutoff c must lie in [0, N]");
    const double lam = cfg.total_arrival_rate();
    const PredictionSplit sp = prediction_split(cfg.dist, cfg.profile, sigma);
    const RoutingProbs rp = routing_probs(c, n, sp);

    WaitingResult out;

    // dedicated small pool: floor(c) servers, each fed lam * P(pred small) / c
    double w_small_pool = sp.pred_small.prob * rp.small_in_pool;
    if (w_small_pool > 0) {
        double w;
        if (!mg1_waiting(lam * sp.pred_small.prob / c, sp.pred_small.mean,
                         sp.pred_small.second, w)) {
            out.reason = Unstable::ShortPool;
            out.total = kInf;
            return out;
        }
        out.small_term = w_small_pool * w;
    }

    // overflow server floor(c)+1: mixture of both prediction classes
    if (rp.mixed_weight > 0) {
        double w1 = sp.pred_small.prob * (1.0 - rp.small_in_pool);
        double w2 = sp.pred_large.prob * (1.0 - rp.large_in_pool);
        double z1 = w1 * sp.pred_small.mean + w2 * sp.pred_large.mean;
        double z2 = w1 * sp.pred_small.second + w2 * sp.pred_large.second;
        // arrival rate lam * mixed_weight, moments z1/pz, z2/pz
        double load = lam * z1;
        if (!(load < 1)) {
            out.reason = Unstable::MixedServer;
            out.total = kInf;
            return out;
        }
        out.mixed_term = rp.mixed_weight * (lam * z2) / (2.0 * (1.0 - load));
    }

    // dedicated large pool: n - floor(c) - 1 servers, each fed lam * P(pred large) / (n - c)
    double w_large_pool = sp.pred_large.prob * rp.large_in_pool;
    if (w_large_pool > 0) {
        double w;
        if (!mg1_waiting(lam * sp.pred_large.prob / (n - c), sp.pred_large.mean,
                         sp.pred_large.second, w)) {
            out.reason = Unstable::LongPool;
            out.total = kInf;
            return out;
        }
        out.large_term = w_large_pool * w;
    }

    out.total = out.small_term + out.mixed_term + out.large_term;
    return out;
}

WaitingResult servers_waiting_integer(const SystemConfig& cfg, int pool_servers, double sigma) {
    const int n = cfg.n_servers;
    if (pool_servers < 1 || pool_servers > n - 1)
        throw std::invalid_argument("integer cutoff must lie in [1, N-1]");
    const double lam = cfg.total_arrival_rate();
    const PredictionSplit sp = prediction_split(cfg.dist, cfg.profile, sigma);

    WaitingResult out;
    if (sp.pred_small.prob > 0) {
        double den = pool_servers - lam * sp.pred_small.prob * sp.pred_small.mean;
        if (!(den > 0)) {
            out.reason = Unstable::ShortPool;
            out.total = kInf;
            return out;
        }
        out.small_term = 0.5 * lam * sp.pred_small.prob * sp.pred_small.prob *
                         sp.pred_small.second / den;
    }
    if (sp.pred_large.prob > 0) {
        double den = (n - pool_servers) - lam * sp.pred_large.prob * sp.pred_large.mean;
        if (!(den > 0)) {
            out.reason = Unstable::LongPool;
            out.total = kInf;
            return out;
        }
        out.large_term = 0.5 * lam * sp.pred_large.prob * sp.pred_large.prob *
                         sp.pred_large.second / den;
    }
    out.total = out.small_term + out.large_term;
    return out;
}

CostBreakdown total_cost(const SystemConfig& cfg, double c, double sigma) {
    CostBreakdown out;
    out.scheduler_delay = scheduler_delay(cfg.total_arrival_rate(), sigma);
    if (!std::isfinite(out.scheduler_delay)) {
        out.reason = Unstable::Scheduler;
        out.scheduler_cost = kInf;
        out.total = kInf;
        return out;
    }
    out.scheduler_cost = cfg.cost(out.scheduler_delay);
    WaitingResult w = servers_waiting(cfg, c, sigma);
    out.servers_waiting = w.total;
    out.reason = w.reason;
    out.total = out.scheduler_cost + w.total;
    return out;
}

double fd_derivative_at_zero(const SystemConfig& cfg, CostPart part,
                             const std::function<double(double)>& cutoff_at_sigma, double h) {
    if (!(h > 0)) throw std::invalid_argument("fd step must be positive");
    auto value = [&](double sigma) {
        double c = cutoff_at_sigma(sigma);
        if (part == CostPart::ServersOnly) return servers_waiting(cfg, c, sigma).total;
        return total_cost(cfg, c, sigma).total;
    };
    return (value(h) - value(0.0)) / h;
}

}  // namespace jst
