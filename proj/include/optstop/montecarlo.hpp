#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "optstop/model.hpp"

// Monte Carlo valuation of intervention rules.  Paths step the damage rate
// exactly in log space, watch for the (exponentially growing) barrier on the
// grid with a Brownian-bridge correction between grid points, accumulate
// discounted damage by the trapezoidal rule, and close the horizon with the
// analytic perpetuity tail so truncation at t_max adds no bias.

namespace optstop {

struct SimConfig {
    std::uint64_t paths = 100000;
    double dt = 0.1;         // years per step, in (0, 1]
    double t_max = 600.0;    // simulated horizon, >= 100
    std::uint64_t seed = 42;
    bool bridge_correction = true;  // intra-step crossing test
    std::vector<double> quantile_levels = {0.01, 0.05, 0.1, 0.25, 0.5,
                                           0.75, 0.9,  0.95, 0.99};
    std::size_t histogram_bins = 100;
    double overflow_ceiling = 1e12;  // close a path early past this damage rate

    void validate() const;
};

struct PathOutcome {
    double total_damage = 0.0;         // discounted damage plus discounted cost
    std::optional<double> tau;         // intervention time, if any
    bool acted = false;
    bool overflowed = false;           // hit the ceiling; closed by the tail early
};

struct HistogramBin {
    double left;
    double right;
    double mass;  // probability mass, not density
};

struct DamageDistribution {
    double mean = 0.0;
    double std_error = 0.0;  // sample standard deviation / sqrt(paths)
    std::vector<std::pair<double, double>> quantiles;  // (level, value)
    std::vector<HistogramBin> histogram;  // equal width over [0, 99.5th pct]
    double act_fraction = 0.0;
    std::optional<double> mean_tau_given_acted;
    std::uint64_t overflow_paths = 0;
};

// Probability that a Brownian bridge pinned at the two log-states crossed the
// log-linear barrier inside the step: exp(-2 d0 d1 / (sigma^2 dt)) with
// d = log barrier - log state at each end.  Returns 1 if an endpoint touches
// the barrier and 0 for a degenerate diffusion.
double bridge_crossing_probability(double log_s0, double log_s1, double log_barrier0,
                                   double log_barrier1, double sigma, double dt);

// Replace optimal_barrier strategies by their concrete barrier (or immediate)
// form and collapse barriers below S0.  Other kinds pass through.
Strategy resolve_strategy(const DamageDynamics& dyn, const CostSchedule& cost,
                          const Strategy& strategy);

// Simulate one path.  Draws come from counter streams keyed by
// (cfg.seed, path_index), so the result does not depend on evaluation order.
PathOutcome simulate_path(const DamageDynamics& dyn, const CostSchedule& cost,
                          const Strategy& strategy, const SimConfig& cfg,
                          std::uint64_t path_index);

// Simulate cfg.paths paths (threads = 0 means hardware concurrency) and
// aggregate.  Output is bit-identical for a given config at any thread count.
DamageDistribution run_ensemble(const DamageDynamics& dyn, const CostSchedule& cost,
                                const Strategy& strategy, const SimConfig& cfg,
                                unsigned threads = 0);

// Raw per-path outcomes behind run_ensemble, in path-index order.
std::vector<PathOutcome> run_paths(const DamageDynamics& dyn, const CostSchedule& cost,
                                   const Strategy& strategy, const SimConfig& cfg,
                                   unsigned threads = 0);

// Aggregation used by run_ensemble, exposed for reuse by sweeps.
DamageDistribution summarize(const std::vector<PathOutcome>& outcomes, const SimConfig& cfg);

// Quantile by linear interpolation between the closest order statistics of a
// sorted sample.
double sorted_quantile(const std::vector<double>& sorted, double level);

}  // namespace optstop
