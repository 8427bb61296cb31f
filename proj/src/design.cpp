#include "jst/design.hpp"

#include <algorithm>
#include <cmath>

namespace jst {

namespace {

// sum_y P(Y=y) sqrt(E[X^2 | Y=y]); zero-probability classes contribute 0.
double root_second_moment_sum(const PredictionSplit& sp) {
    double t = 0;
    if (sp.pred_small.prob > 0) t += sp.pred_small.prob * std::sqrt(sp.pred_small.second);
    if (sp.pred_large.prob > 0) t += sp.pred_large.prob * std::sqrt(sp.pred_large.second);
    return t;
}

}  // namespace

double optimal_cutoff_fraction(const SystemConfig& cfg, double sigma) {
    const PredictionSplit sp = prediction_split(cfg.dist, cfg.profile, sigma);
    double t = root_second_moment_sum(sp);
    double gamma_small =
        sp.pred_small.prob > 0 ? sp.pred_small.prob * std::sqrt(sp.pred_small.second) / t : 0.0;
    return gamma_small * (1.0 - cfg.load()) +
           cfg.lambda_per_server * sp.pred_small.prob * sp.pred_small.mean;
}

int integer_cutoff(const SystemConfig& cfg, double sigma, int n) {
    if (n < 2) throw std::invalid_argument("integer cutoff needs N >= 2");
    double c = std::floor(optimal_cutoff_fraction(cfg, sigma) * n);
    return static_cast<int>(std::clamp(c, 1.0, static_cast<double>(n - 1)));
}

double testing_time_for_budget(double lambda_per_server, int n, double budget) {
    if (!(budget >= 0)) throw std::invalid_argument("budget must be >= 0");
    if (budget == 0) return 0.0;
    return 1.0 / (lambda_per_server * n + std::sqrt(static_cast<double>(n)) / budget);
}

double asymptotic_waiting_limit(const SystemConfig& cfg, double sigma) {
    const PredictionSplit sp = prediction_split(cfg.dist, cfg.profile, sigma);
    double t = root_second_moment_sum(sp);
    return 0.5 * cfg.lambda_per_server * t * t / (1.0 - cfg.load());
}

double waiting_lower_bound(const TwoPointJobDist& dist, double lambda_per_server) {
    double m = dist.mean();
    double rho = lambda_per_server * m;
    if (!(rho < 1)) throw std::invalid_argument("waiting lower bound needs rho < 1");
    return 0.5 * lambda_per_server * m * m / (1.0 - rho);
}

double efficiency_floor(const TwoPointJobDist& dist) {
    double m = dist.mean();
    return m * m / dist.second_moment();
}

double design_testing_time(double lambda_per_server, int n, const TwoPointJobDist& dist,
                           double gamma) {
    if (!(gamma > 0)) throw std::invalid_argument("gamma must be positive");
    double floor = waiting_lower_bound(dist, lambda_per_server);
    return 1.0 / (lambda_per_server * n + gamma / floor);
}

namespace {

double resolve_theta(const TwoPointJobDist& dist, double theta) {
    if (!dist.has_tail())
        throw std::invalid_argument("heavy-tail design rules need a Pareto-built distribution");
    if (std::isnan(theta)) theta = 0.5 * dist.tail_beta;
    if (!(theta > 0) || !(theta < dist.tail_beta))
        throw std::invalid_argument("theta must lie in (0, tail_beta)");
    return theta;
}

}  // namespace

double design_cutoff(const SystemConfig& cfg, double sigma_star, double theta) {
    theta = resolve_theta(cfg.dist, theta);
    const double n = cfg.n_servers;
    const double rho = cfg.load();
    double scaled = n * optimal_cutoff_fraction(cfg, sigma_star);
    if (n * (1.0 - rho) > 1.0) return std::max(scaled, 1.0);
    double damping = std::pow(cfg.dist.large_size, -theta);
    return std::max(scaled, n * (1.0 - rho) - n * rho * damping);
}

const char* regime_name(Regime r) {
    switch (r) {
        case Regime::Supercritical: return "supercritical";
        case Regime::Subcritical: return "subcritical";
        case Regime::Boundary: return "boundary";
    }
    return "?";
}

LimitRatio design_limit_ratio(const SystemConfig& cfg, double gamma, double theta) {
    resolve_theta(cfg.dist, theta);
    if (!(gamma > 0)) throw std::invalid_argument("gamma must be positive");
    const double n = cfg.n_servers;
    const double rho = cfg.load();
    const double slack = n * (1.0 - rho);
    LimitRatio out;
    if (std::abs(slack - 1.0) < 1e-12) {
        out.regime = Regime::Boundary;  // closed forms leave this case uncovered
        return out;
    }
    if (slack > 1.0) {
        out.regime = Regime::Supercritical;
        out.value = 1.0 / gamma + slack / (slack - 1.0);
    } else {
        out.regime = Regime::Subcritical;
        out.value = (1.0 - rho) * (n - 1.0) / (n * rho * rho);
    }
    return out;
}

ZeroTestingDerivative zero_testing_derivative(const SystemConfig& cfg) {
    if (cfg.profile.family != ProfileFamily::NoFalseSmall)
        throw std::invalid_argument("zero-testing derivative is defined for NoFalseSmall profiles");
    const PredictionSplit sp = prediction_split(cfg.dist, cfg.profile, 0.0);
    const double lam = cfg.lambda_per_server;
    const double rho = cfg.load();
    const double slope = diag_small_slope_at_zero(cfg.dist, cfg.profile);
    const double xs = cfg.dist.small_size;
    const double t0 = root_second_moment_sum(sp);
    const double e2l = sp.pred_large.second;  // positive: the large class holds all x_M mass

    ZeroTestingDerivative out;
    double lever = (e2l + xs * xs) / (2.0 * std::sqrt(e2l)) - xs;
    out.rate = cfg.cost.slope_at_zero() - slope * (lam * t0 / (1.0 - rho)) * lever;
    double root_gap = std::sqrt(cfg.dist.second_moment()) - xs;
    out.condition_value = slope * 0.5 * lam * root_gap * root_gap / (1.0 - rho);
    out.improves = out.condition_value >= cfg.cost.slope_at_zero();
    return out;
}

}  // namespace jst
