#pragma once

#include "jst/model.hpp"

// Closed-form design rules and asymptotic constants: the optimal cutoff
// fraction and its integer sequence, testing-time choices, the many-server
// waiting limit and its information-free lower bound, the zero-testing
// derivative of the cost with its improvement condition, the heavy-tail
// design pair (testing time, cutoff) and the limiting cost ratios, and the
// efficiency floor.

namespace jst {

// Share of servers dedicated to predicted-small jobs that balances the
// pools in the many-server limit; lies in [0, 1].
double optimal_cutoff_fraction(const SystemConfig& cfg, double sigma);

// floor(fraction * N) clamped to [1, N-1].
int integer_cutoff(const SystemConfig& cfg, double sigma, int n);

// Testing time for a per-job time budget: 1/(lambda N + sqrt(N)/budget);
// 0 for a zero budget. Always below the scheduler stability point.
double testing_time_for_budget(double lambda_per_server, int n, double budget);

// Limit of the optimal mean server waiting as N grows:
// (lambda/2) * (sum_y P(Y=y) sqrt(E[X^2|Y=y]))^2 / (1 - rho), at sigma.
double asymptotic_waiting_limit(const SystemConfig& cfg, double sigma);

// Information-free floor (lambda/2) E[X]^2 / (1 - rho); no dispatching
// policy beats it regardless of prediction quality.
double waiting_lower_bound(const TwoPointJobDist& dist, double lambda_per_server);

// Matching floor for the efficiency ratio: E[X]^2 / E[X^2].
double efficiency_floor(const TwoPointJobDist& dist);

// Testing time balancing scheduler delay against the waiting floor:
// 1/(lambda N + gamma / waiting_lower_bound).
double design_testing_time(double lambda_per_server, int n, const TwoPointJobDist& dist,
                           double gamma);

// Cutoff rule for heavy-tailed (Pareto-built) distributions. theta must lie
// in (0, tail_beta); pass NaN for the default tail_beta / 2.
double design_cutoff(const SystemConfig& cfg, double sigma_star, double theta);

enum class Regime { Supercritical, Subcritical, Boundary };

const char* regime_name(Regime r);

// Limiting value of D(sigma*)/R_floor (supercritical, N(1-rho) > 1) or of
// D(sigma*)/(x_M^theta R_floor) (subcritical); Boundary flags N(1-rho) = 1,
// which the closed forms do not cover.
struct LimitRatio {
    double value = std::numeric_limits<double>::quiet_NaN();
    Regime regime = Regime::Boundary;
};

LimitRatio design_limit_ratio(const SystemConfig& cfg, double gamma, double theta);

// Derivative of the total cost in sigma at 0+ for NoFalseSmall profiles
// (cutoff re-derived along the way), plus the closed-form condition for
// testing to improve the cost in a right neighbourhood of zero.
struct ZeroTestingDerivative {
    double rate = 0;              // d D / d sigma at 0+
    double condition_value = 0;   // left-hand side of the improvement condition
    bool improves = false;        // condition_value >= f'(0)
};

ZeroTestingDerivative zero_testing_derivative(const SystemConfig& cfg);

}  // namespace jst
