#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

// Core domain model: two-point job-size distributions, prediction profiles
// (the joint law of (size, predicted size) as a function of the testing
// time sigma), conditional per-class moments, and the system configuration
// shared by every higher module.

namespace jst {

inline constexpr double kPmfTol = 1e-12;  // joint-pmf validity tolerance

// Job sizes take two values; p_small is the probability of the small one.
struct TwoPointJobDist {
    double small_size = 1.0;
    double large_size = 10.0;
    double p_small = 0.9;
    // Set when the distribution was built from a bounded Pareto tail;
    // NaN otherwise. Needed by the heavy-tail design rules.
    double tail_alpha = std::numeric_limits<double>::quiet_NaN();
    double tail_beta = std::numeric_limits<double>::quiet_NaN();

    double mean() const { return p_small * small_size + (1.0 - p_small) * large_size; }
    double second_moment() const {
        return p_small * small_size * small_size + (1.0 - p_small) * large_size * large_size;
    }
    bool has_tail() const { return std::isfinite(tail_beta); }
    void validate() const;
};

// Two-point reduction of a bounded Pareto tail: the large-size mass is
// alpha * large_size^(-beta).
TwoPointJobDist pareto_tail_dist(double alpha, double beta, double small_size, double large_size);

enum class ProfileFamily {
    PerfectKnowledge,       // prediction equals the size at every sigma
    IndependentConstant,    // prediction independent of size, constant in sigma
    ExponentialSaturating,  // both diagonals approach truth at rates (a, b)
    NoFalseSmall,           // large jobs never predicted small; small diagonal rate a
};

const char* family_name(ProfileFamily f);
bool family_from_name(const std::string& name, ProfileFamily& out);

// Joint law P(size, prediction) at a given sigma. diag_small0 / diag_large0
// are the sigma=0 diagonal masses q_ss(0), q_ll(0); NaN selects the family
// default (independent coupling for ExponentialSaturating, half the small
// mass for NoFalseSmall).
struct PredictionProfile {
    ProfileFamily family = ProfileFamily::ExponentialSaturating;
    double rate_small = 3.0;  // a
    double rate_large = 1.0;  // b
    double diag_small0 = std::numeric_limits<double>::quiet_NaN();
    double diag_large0 = std::numeric_limits<double>::quiet_NaN();
};

// Joint pmf over {small,large} x {predicted small, predicted large}.
struct JointPmf {
    double ss = 0, sl = 0, ls = 0, ll = 0;
    double pred_small() const { return ss + ls; }
    double pred_large() const { return sl + ll; }
};

JointPmf prediction_pmf(const TwoPointJobDist& dist, const PredictionProfile& prof, double sigma);

// d q_ss / d sigma at 0+: a * (p_small - q_ss(0)) for the saturating
// families, 0 for the constant ones.
double diag_small_slope_at_zero(const TwoPointJobDist& dist, const PredictionProfile& prof);

// Resolved sigma=0 diagonals (family defaults applied).
double resolved_diag_small0(const TwoPointJobDist& dist, const PredictionProfile& prof);
double resolved_diag_large0(const TwoPointJobDist& dist, const PredictionProfile& prof);

// Moments of the size conditioned on one prediction value. A class with
// zero probability carries zero moments and never enters a denominator.
struct ClassMoments {
    double prob = 0;
    double mean = 0;
    double second = 0;
};

struct PredictionSplit {
    ClassMoments pred_small;
    ClassMoments pred_large;
};

PredictionSplit prediction_split(const TwoPointJobDist& dist, const PredictionProfile& prof,
                                 double sigma);

enum class CostKind { Identity, Scaled };

// Cost of the scheduler delay inside the total-cost objective. Scaled is
// kappa * t; both have f(0) = 0 and a finite slope at 0.
struct CostFn {
    CostKind kind = CostKind::Identity;
    double kappa = 1.0;

    double operator()(double t) const { return kind == CostKind::Identity ? t : kappa * t; }
    double slope_at_zero() const { return kind == CostKind::Identity ? 1.0 : kappa; }
};

struct SystemConfig {
    int n_servers = 1;
    double lambda_per_server = 0.1;  // per-server arrival rate
    TwoPointJobDist dist;
    PredictionProfile profile;
    CostFn cost;

    double total_arrival_rate() const { return lambda_per_server * n_servers; }
    double load() const { return lambda_per_server * dist.mean(); }  // rho, per server
    void validate() const;  // throws std::invalid_argument on bad or overloaded systems
};

}  // namespace jst
