#pragma once

#include <vector>

#include "jst/analytic.hpp"
#include "jst/design.hpp"

// Minimization of the total cost over the cutoff and over the testing
// time, and the efficiency ratio E(sigma) built from those minima.
//
// The cutoff search runs over [0, N): the right endpoint of the formula
// domain routes predicted-large work to a nonexistent overflow position
// (an extrapolation, not a system), so neither the structured search nor
// the grid oracle proposes it. c = 0 is physical and kept.

namespace jst {

enum class OptMethod { Structured, Grid, Refined };

struct OptimumPoint {
    double argmin = 0;
    double value = std::numeric_limits<double>::infinity();
    OptMethod method = OptMethod::Structured;
    double grid_step = 0;

    bool feasible() const { return std::isfinite(value); }
};

// Structured search: every integer candidate in [1, N-1] plus c=0, golden
// refinement inside the unit intervals adjacent to the best integers and
// to the pool stability frontiers. Ties break toward the smaller cutoff.
OptimumPoint min_cost_over_cutoff(const SystemConfig& cfg, double sigma);

// Exhaustive grid over {0, step, 2 step, ...} < N; the correctness oracle.
OptimumPoint grid_min_cost_over_cutoff(const SystemConfig& cfg, double sigma, double step);

// E(sigma) = min_c D(sigma) / min_c D(0); exactly 1 at sigma = 0.
double efficiency(const SystemConfig& cfg, double sigma);

// Hybrid sigma grid on [0, sigma_max]: 0, then a geometric half resolving
// the right neighbourhood of zero (1e-4..1e-1 of sigma_max), then a linear
// half up to sigma_max. Returns points+1 values including both endpoints.
std::vector<double> sigma_grid(double sigma_max, int points);

struct SweepRow {
    double sigma = 0;
    double c_opt = 0;
    double d_opt = 0;
    double efficiency = 0;
    bool sigma_star_row = false;
};

// Efficiency sweep over the hybrid grid; when sigma_star is finite and
// positive it is spliced in as an extra flagged row.
std::vector<SweepRow> sweep_efficiency(const SystemConfig& cfg, double sigma_max, int points,
                                       double sigma_star);

// Grid scan of E(sigma) followed by golden refinement around the best grid
// point (tolerance 1e-8 * sigma_max). Ties break toward the smaller sigma.
OptimumPoint min_efficiency_over_sigma(const SystemConfig& cfg, double sigma_max,
                                       int grid_points);

}  // namespace jst
