#include "jst/model.hpp"

#include <algorithm>

namespace jst {

void TwoPointJobDist::validate() const {
    if (!(small_size > 0) || !(large_size > small_size))
        throw std::invalid_argument("job sizes must satisfy 0 < small < large");
    if (!(p_small > 0) || !(p_small < 1))
        throw std::invalid_argument("p_small must lie in (0,1)");
}

TwoPointJobDist pareto_tail_dist(double alpha, double beta, double small_size,
                                 double large_size) {
    if (!(alpha > 0) || !(beta > 0))
        throw std::invalid_argument("pareto tail needs alpha > 0 and beta > 0");
    double tail = alpha * std::pow(large_size, -beta);
    TwoPointJobDist d;
    d.small_size = small_size;
    d.large_size = large_size;
    d.p_small = 1.0 - tail;
    d.tail_alpha = alpha;
    d.tail_beta = beta;
    d.validate();
    return d;
}

const char* family_name(ProfileFamily f) {
    switch (f) {
        case ProfileFamily::PerfectKnowledge: return "PerfectKnowledge";
        case ProfileFamily::IndependentConstant: return "IndependentConstant";
        case ProfileFamily::ExponentialSaturating: return "ExponentialSaturating";
        case ProfileFamily::NoFalseSmall: return "NoFalseSmall";
    }
    return "?";
}

bool family_from_name(const std::string& name, ProfileFamily& out) {
    for (ProfileFamily f : {ProfileFamily::PerfectKnowledge, ProfileFamily::IndependentConstant,
                            ProfileFamily::ExponentialSaturating, ProfileFamily::NoFalseSmall}) {
        if (name == family_name(f)) {
            out = f;
            return true;
        }
    }
    return false;
}

double resolved_diag_small0(const TwoPointJobDist& dist, const PredictionProfile& prof) {
    double p = dist.p_small;
    switch (prof.family) {
        case ProfileFamily::PerfectKnowledge: return p;       // family law, overrides ignored
        case ProfileFamily::IndependentConstant: return p * p;
        case ProfileFamily::ExponentialSaturating:
            return std::isfinite(prof.diag_small0) ? prof.diag_small0 : p * p;
        case ProfileFamily::NoFalseSmall:
            return std::isfinite(prof.diag_small0) ? prof.diag_small0 : 0.5 * p;
    }
    return p * p;
}

double resolved_diag_large0(const TwoPointJobDist& dist, const PredictionProfile& prof) {
    double q = 1.0 - dist.p_small;
    switch (prof.family) {
        case ProfileFamily::PerfectKnowledge: return q;       // family law, overrides ignored
        case ProfileFamily::IndependentConstant: return q * q;
        case ProfileFamily::ExponentialSaturating:
            return std::isfinite(prof.diag_large0) ? prof.diag_large0 : q * q;
        case ProfileFamily::NoFalseSmall: return q;  // family law: no false smalls at any sigma
    }
    return q * q;
}

namespace {

void check_pmf(const JointPmf& m, double p_small) {
    const double cells[4] = {m.ss, m.sl, m.ls, m.ll};
    for (double c : cells)
        if (c < -kPmfTol || c > 1 + kPmfTol)
            throw std::invalid_argument("prediction pmf cell outside [0,1]");
    if (std::abs(m.ss + m.sl - p_small) > kPmfTol ||
        std::abs(m.ls + m.ll - (1.0 - p_small)) > kPmfTol)
        throw std::invalid_argument("prediction pmf rows do not match the size marginal");
}

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

}  // namespace

JointPmf prediction_pmf(const TwoPointJobDist& dist, const PredictionProfile& prof,
                        double sigma) {
    dist.validate();
    if (!(sigma >= 0)) throw std::invalid_argument("sigma must be >= 0");
    double p = dist.p_small, q = 1.0 - p;
    JointPmf m;
    switch (prof.family) {
        case ProfileFamily::PerfectKnowledge:
            m.ss = p;
            m.ll = q;
            break;
        case ProfileFamily::IndependentConstant:
            m.ss = p * p;
            m.sl = p * q;
            m.ls = q * p;
            m.ll = q * q;
            break;
        case ProfileFamily::ExponentialSaturating: {
            double ss0 = resolved_diag_small0(dist, prof);
            double ll0 = resolved_diag_large0(dist, prof);
            m.ss = (1.0 - std::exp(-prof.rate_small * sigma)) * (p - ss0) + ss0;
            m.ll = (1.0 - std::exp(-prof.rate_large * sigma)) * (q - ll0) + ll0;
            m.sl = p - m.ss;
            m.ls = q - m.ll;
            break;
        }
        case ProfileFamily::NoFalseSmall: {
            double ss0 = resolved_diag_small0(dist, prof);
            m.ss = (1.0 - std::exp(-prof.rate_small * sigma)) * (p - ss0) + ss0;
            m.sl = p - m.ss;
            m.ll = q;
            m.ls = 0.0;
            break;
        }
    }
    check_pmf(m, p);
    // only rounding noise at the kPmfTol scale is clamped away
    m.ss = clamp01(m.ss);
    m.sl = clamp01(m.sl);
    m.ls = clamp01(m.ls);
    m.ll = clamp01(m.ll);
    return m;
}

double diag_small_slope_at_zero(const TwoPointJobDist& dist, const PredictionProfile& prof) {
    switch (prof.family) {
        case ProfileFamily::PerfectKnowledge:
        case ProfileFamily::IndependentConstant:
            return 0.0;
        case ProfileFamily::ExponentialSaturating:
        case ProfileFamily::NoFalseSmall:
            return prof.rate_small * (dist.p_small - resolved_diag_small0(dist, prof));
    }
    return 0.0;
}

PredictionSplit prediction_split(const TwoPointJobDist& dist, const PredictionProfile& prof,
                                 double sigma) {
    JointPmf m = prediction_pmf(dist, prof, sigma);
    double xs = dist.small_size, xl = dist.large_size;
    PredictionSplit out;
    out.pred_small.prob = m.pred_small();
    if (out.pred_small.prob > 0) {
        out.pred_small.mean = (m.ss * xs + m.ls * xl) / out.pred_small.prob;
        out.pred_small.second = (m.ss * xs * xs + m.ls * xl * xl) / out.pred_small.prob;
    }
    out.pred_large.prob = m.pred_large();
    if (out.pred_large.prob > 0) {
        out.pred_large.mean = (m.sl * xs + m.ll * xl) / out.pred_large.prob;
        out.pred_large.second = (m.sl * xs * xs + m.ll * xl * xl) / out.pred_large.prob;
    }
    return out;
}

void SystemConfig::validate() const {
    dist.validate();
    if (n_servers < 1) throw std::invalid_argument("n_servers must be >= 1");
    if (!(lambda_per_server > 0)) throw std::invalid_argument("arrival rate must be positive");
    if (!(load() < 1))
        throw std::invalid_argument("system overloaded: lambda * E[X] = " +
                                    std::to_string(load()) + " >= 1");
    if (cost.kind == CostKind::Scaled && !(cost.kappa > 0))
        throw std::invalid_argument("cost kappa must be positive");
    double p = dist.p_small;
    double s0 = resolved_diag_small0(dist, profile);
    double l0 = resolved_diag_large0(dist, profile);
    if (s0 < -kPmfTol || s0 > p + kPmfTol)
        throw std::invalid_argument("profile diag_small0 outside [0, p_small]");
    if (l0 < -kPmfTol || l0 > 1.0 - p + kPmfTol)
        throw std::invalid_argument("profile diag_large0 outside [0, 1 - p_small]");
}

}  // namespace jst
