#include "jst/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace jst {

namespace {

constexpr double kGolden = 0.6180339887498949;  // (sqrt(5)-1)/2

struct Best {
    double arg = 0;
    double val = std::numeric_limits<double>::infinity();

    // strict improvement, or an exact tie resolved toward the smaller argument
    void offer(double a, double v) {
        if (v < val || (v == val && a < arg)) {
            arg = a;
            val = v;
        }
    }
};

// Golden-section minimization on [lo, hi]; assumes f is continuous there.
// Returns the best probed point (never an un-evaluated one).
template <class F>
void golden_min(F&& f, double lo, double hi, double tol, Best& best) {
    double a = lo, b = hi;
    double x1 = b - kGolden * (b - a);
    double x2 = a + kGolden * (b - a);
    double f1 = f(x1), f2 = f(x2);
    best.offer(x1, f1);
    best.offer(x2, f2);
    while (b - a > tol) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - kGolden * (b - a);
            f1 = f(x1);
            best.offer(x1, f1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + kGolden * (b - a);
            f2 = f(x2);
            best.offer(x2, f2);
        }
    }
}

// Pre-sample a piece, then refine with golden search around the best probe;
// guards against non-unimodal pieces near stability frontiers.
template <class F>
void refine_piece(F&& f, double lo, double hi, double tol, Best& best) {
    if (!(hi > lo)) return;
    const int kProbes = 17;
    double px = lo, pv = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= kProbes; ++i) {
        double x = lo + (hi - lo) * i / kProbes;
        double v = f(x);
        best.offer(x, v);
        if (v < pv) {
            pv = v;
            px = x;
        }
    }
    if (!std::isfinite(pv)) return;
    double span = (hi - lo) / kProbes;
    golden_min(f, std::max(lo, px - span), std::min(hi, px + span), tol, best);
}

}  // namespace

OptimumPoint min_cost_over_cutoff(const SystemConfig& cfg, double sigma) {
    cfg.validate();
    const int n = cfg.n_servers;
    // highest admissible cutoff, strictly below the extrapolated endpoint N
    const double hi_cap = n * (1.0 - 1e-12);
    auto f = [&](double c) { return total_cost(cfg, c, sigma).total; };

    Best best;
    best.offer(0.0, f(0.0));
    for (int c = 1; c <= n - 1; ++c) best.offer(static_cast<double>(c), f(static_cast<double>(c)));

    // pieces worth refining: around the best integers, around the scaled
    // optimal fraction, around the pool stability frontiers, and the two
    // boundary pieces
    std::set<int> piece_starts = {0};
    if (n >= 2) piece_starts.insert(n - 1);
    double kbest = std::floor(std::min(best.arg, n - 1.0));
    for (int d = -2; d <= 2; ++d) {
        int k = static_cast<int>(kbest) + d;
        if (k >= 0 && k <= n - 1) piece_starts.insert(k);
    }
    int kstar = static_cast<int>(std::floor(optimal_cutoff_fraction(cfg, sigma) * n));
    for (int d = -1; d <= 1; ++d) {
        int k = kstar + d;
        if (k >= 0 && k <= n - 1) piece_starts.insert(k);
    }
    const PredictionSplit sp = prediction_split(cfg.dist, cfg.profile, sigma);
    const double lam = cfg.total_arrival_rate();
    // small pool needs c > lam P_s E[X|s]; large pool needs c < N - lam P_l E[X|l]
    for (double frontier : {lam * sp.pred_small.prob * sp.pred_small.mean,
                            n - lam * sp.pred_large.prob * sp.pred_large.mean}) {
        if (frontier > 0 && frontier < n) {
            int k = static_cast<int>(std::floor(frontier));
            for (int d = -1; d <= 1; ++d)
                if (k + d >= 0 && k + d <= n - 1) piece_starts.insert(k + d);
        }
    }

    const double tol = std::max(1e-10 * n, 1e-12);
    for (int k : piece_starts) {
        double lo = k;
        double hi = std::min(static_cast<double>(k + 1), hi_cap);
        refine_piece(f, lo, hi, tol, best);
    }

    OptimumPoint out;
    out.argmin = best.arg;
    out.value = best.val;
    out.method = OptMethod::Structured;
    return out;
}

OptimumPoint grid_min_cost_over_cutoff(const SystemConfig& cfg, double sigma, double step) {
    cfg.validate();
    if (!(step > 0)) throw std::invalid_argument("grid step must be positive");
    const int n = cfg.n_servers;
    Best best;
    long count = static_cast<long>(std::ceil(n / step));
    for (long i = 0; i < count; ++i) {
        double c = i * step;
        if (c >= n) break;
        best.offer(c, total_cost(cfg, c, sigma).total);
    }
    OptimumPoint out;
    out.argmin = best.arg;
    out.value = best.val;
    out.method = OptMethod::Grid;
    out.grid_step = step;
    return out;
}

double efficiency(const SystemConfig& cfg, double sigma) {
    double num = min_cost_over_cutoff(cfg, sigma).value;
    double den = min_cost_over_cutoff(cfg, 0.0).value;
    return num / den;
}

std::vector<double> sigma_grid(double sigma_max, int points) {
    if (!(sigma_max > 0) || points < 4)
        throw std::invalid_argument("sigma grid needs sigma_max > 0 and points >= 4");
    std::vector<double> g;
    g.reserve(points + 1);
    g.push_back(0.0);
    int half = points / 2;
    for (int i = 0; i < half; ++i)
        g.push_back(sigma_max * 1e-4 * std::pow(10.0, 3.0 * i / (half - 1)));
    int rest = points - half;
    for (int i = 1; i <= rest; ++i) g.push_back(sigma_max * (0.1 + 0.9 * i / rest));
    return g;
}

std::vector<SweepRow> sweep_efficiency(const SystemConfig& cfg, double sigma_max, int points,
                                       double sigma_star) {
    cfg.validate();
    if (!(sigma_max * cfg.total_arrival_rate() < 1))
        throw std::invalid_argument("sigma_max must keep the scheduler stable");
    std::vector<double> grid = sigma_grid(sigma_max, points);
    if (std::isfinite(sigma_star) && sigma_star > 0 && sigma_star <= sigma_max) {
        grid.push_back(sigma_star);
        std::sort(grid.begin(), grid.end());
        grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    }
    const double den = min_cost_over_cutoff(cfg, 0.0).value;
    std::vector<SweepRow> rows;
    rows.reserve(grid.size());
    for (double s : grid) {
        OptimumPoint p = min_cost_over_cutoff(cfg, s);
        SweepRow r;
        r.sigma = s;
        r.c_opt = p.argmin;
        r.d_opt = p.value;
        r.efficiency = p.value / den;
        r.sigma_star_row = std::isfinite(sigma_star) && s == sigma_star;
        rows.push_back(r);
    }
    return rows;
}

OptimumPoint min_efficiency_over_sigma(const SystemConfig& cfg, double sigma_max,
                                       int grid_points) {
    cfg.validate();
    if (!(sigma_max * cfg.total_arrival_rate() < 1))
        throw std::invalid_argument("sigma_max must keep the scheduler stable");
    const double den = min_cost_over_cutoff(cfg, 0.0).value;
    auto eff = [&](double s) { return min_cost_over_cutoff(cfg, s).value / den; };

    std::vector<double> grid = sigma_grid(sigma_max, grid_points);
    Best best;
    std::size_t best_idx = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double v = eff(grid[i]);
        if (v < best.val || (v == best.val && grid[i] < best.arg)) best_idx = i;
        best.offer(grid[i], v);
    }
    // refine inside the bracketing neighbours of the best grid point
    double lo = best_idx > 0 ? grid[best_idx - 1] : grid.front();
    double hi = best_idx + 1 < grid.size() ? grid[best_idx + 1] : grid.back();
    if (hi > lo) golden_min(eff, lo, hi, 1e-8 * sigma_max, best);

    OptimumPoint out;
    out.argmin = best.arg;
    out.value = best.val;
    out.method = OptMethod::Refined;
    return out;
}

}  // namespace jst
