#include "optstop/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "optstop/closed_form.hpp"
#include "optstop/rng.hpp"

namespace optstop {

namespace {

[[noreturn]] void config_fail(const std::string& what) {
    throw std::invalid_argument(what);
}

// Grid data shared by every path of an ensemble.
struct StepGrid {
    std::vector<double> t;         // grid times, t[0] = 0, t.back() = t_max
    std::vector<double> discount;  // exp(-r t)
    std::vector<double> log_barrier;  // ln H + q t, only for barrier strategies
    double log_s0 = 0.0;
};

StepGrid make_grid(const DamageDynamics& dyn, const CostSchedule& cost, const Strategy& strategy,
                   const SimConfig& cfg) {
    StepGrid grid;
    auto steps = static_cast<std::size_t>(std::ceil(cfg.t_max / cfg.dt - 1e-9));
    grid.t.resize(steps + 1);
    grid.discount.resize(steps + 1);
    for (std::size_t k = 0; k <= steps; ++k) {
        grid.t[k] = std::min(static_cast<double>(k) * cfg.dt, cfg.t_max);
        grid.discount[k] = std::exp(-dyn.r * grid.t[k]);
    }
    grid.t[steps] = cfg.t_max;
    grid.log_s0 = std::log(dyn.S0);
    if (strategy.kind == StrategyKind::barrier) {
        grid.log_barrier.resize(steps + 1);
        double log_h = std::log(strategy.H);
        for (std::size_t k = 0; k <= steps; ++k) {
            grid.log_barrier[k] = log_h + cost.q * grid.t[k];
        }
    }
    return grid;
}

struct PathState {
    double log_s;
    double s;
};

// One log-exact GBM step of length h.
inline double step_log(double log_s, double alpha, double sigma, double h, double z) {
    return log_s + (alpha - 0.5 * sigma * sigma) * h + sigma * std::sqrt(h) * z;
}

}  // namespace

void SimConfig::validate() const {
    if (paths < 1) config_fail("paths must be at least 1");
    if (paths > (std::uint64_t{1} << 32)) config_fail("paths must fit in 32 bits");
    if (!(dt > 0.0) || !(dt <= 1.0)) config_fail("dt must lie in (0, 1]");
    if (!(t_max >= 100.0)) config_fail("t_max must be at least 100 years");
    if (!std::isfinite(t_max)) config_fail("t_max must be finite");
    if (quantile_levels.empty()) config_fail("quantile_levels must not be empty");
    for (std::size_t i = 0; i < quantile_levels.size(); ++i) {
        double p = quantile_levels[i];
        if (!(p > 0.0) || !(p < 1.0)) config_fail("quantile levels must lie in (0, 1)");
        if (i > 0 && !(p > quantile_levels[i - 1]))
            config_fail("quantile levels must be strictly increasing");
    }
    if (histogram_bins < 1) config_fail("histogram_bins must be at least 1");
    if (!(overflow_ceiling > 0.0)) config_fail("overflow_ceiling must be positive");
}

double bridge_crossing_probability(double log_s0, double log_s1, double log_barrier0,
                                   double log_barrier1, double sigma, double dt) {
    if (!(dt > 0.0)) config_fail("bridge_crossing_probability requires dt > 0");
    if (sigma < 0.0) config_fail("bridge_crossing_probability requires sigma >= 0");
    double d0 = log_barrier0 - log_s0;
    double d1 = log_barrier1 - log_s1;
    if (d0 <= 0.0 || d1 <= 0.0) return 1.0;  // an endpoint already touches
    if (sigma == 0.0) return 0.0;            // degenerate diffusion never bridges
    return std::exp(-2.0 * d0 * d1 / (sigma * sigma * dt));
}

Strategy resolve_strategy(const DamageDynamics& dyn, const CostSchedule& cost,
                          const Strategy& strategy) {
    dyn.validate();
    cost.validate();
    switch (strategy.kind) {
        case StrategyKind::optimal_barrier: {
            ClosedFormSolution sol = optimal_barrier(dyn, cost);
            if (sol.branch == SolutionBranch::immediate_optimal) return Strategy::immediate();
            return Strategy::barrier(*sol.H_star, dyn.S0);
        }
        case StrategyKind::barrier:
            return Strategy::barrier(strategy.H, dyn.S0);
        default:
            return strategy;
    }
}

namespace {

// Core path simulation against a prebuilt grid.  `strategy` must already be
// resolved (never_act / immediate / barrier with H >= S0).
PathOutcome simulate_resolved(const DamageDynamics& dyn, const CostSchedule& cost,
                              const Strategy& strategy, const SimConfig& cfg,
                              const StepGrid& grid, std::uint64_t path_index) {
    const std::size_t n = grid.t.size() - 1;
    PathRng rng(cfg.seed, path_index);
    PathOutcome out;

    PathState st;
    st.log_s = grid.log_s0;
    st.s = dyn.S0;

    double alpha = dyn.alpha1;
    double sigma = dyn.sigma1;
    bool watching = strategy.kind == StrategyKind::barrier;

    auto act = [&](double tau, double log_s_tau) {
        out.acted = true;
        out.tau = tau;
        st.log_s = log_s_tau;
        st.s = std::exp(log_s_tau);
        alpha = dyn.alpha2;
        sigma = dyn.sigma2;
        watching = false;
        out.total_damage += cost.K * std::exp((cost.q - dyn.r) * tau);
    };

    if (strategy.kind == StrategyKind::immediate) {
        act(0.0, grid.log_s0);
    } else if (watching && st.log_s >= grid.log_barrier[0]) {
        act(0.0, grid.log_s0);  // barrier at or below the starting level
    }

    std::size_t k = 0;
    while (k < n) {
        double t0 = grid.t[k];
        double t1 = grid.t[k + 1];
        double h = t1 - t0;
        double z = rng.normal(k);
        double log_next = step_log(st.log_s, alpha, sigma, h, z);

        if (watching) {
            if (log_next >= grid.log_barrier[k + 1]) {
                // Grid detection: the step ends at or above the barrier.
                double s_next = std::exp(log_next);
                out.total_damage +=
                    0.5 * h * (st.s * grid.discount[k] + s_next * grid.discount[k + 1]);
                act(t1, log_next);
                k += 1;
                if (st.s > cfg.overflow_ceiling) break;
                continue;
            }
            if (cfg.bridge_correction && sigma > 0.0) {
                double d0 = grid.log_barrier[k] - st.log_s;
                double d1 = grid.log_barrier[k + 1] - log_next;
                double expo = 2.0 * d0 * d1 / (sigma * sigma * h);
                // Skip the draw when the crossing chance is below ~4e-18.
                if (expo < 40.0 && rng.bridge_uniform(k) < std::exp(-expo)) {
                    double tau = t0 + 0.5 * h;
                    double log_tau = std::log(strategy.H) + cost.q * tau;
                    double s_tau = std::exp(log_tau);
                    out.total_damage += 0.25 * h * (st.s * grid.discount[k] +
                                                    s_tau * std::exp(-dyn.r * tau));
                    act(tau, log_tau);
                    // Finish the step from the barrier under the new regime.
                    double z2 = rng.post_switch_normal(k);
                    double log_end = step_log(st.log_s, alpha, sigma, 0.5 * h, z2);
                    double s_end = std::exp(log_end);
                    out.total_damage += 0.25 * h * (st.s * std::exp(-dyn.r * tau) +
                                                    s_end * grid.discount[k + 1]);
                    st.log_s = log_end;
                    st.s = s_end;
                    k += 1;
                    if (st.s > cfg.overflow_ceiling) break;
                    continue;
                }
            }
        }

        double s_next = std::exp(log_next);
        out.total_damage += 0.5 * h * (st.s * grid.discount[k] + s_next * grid.discount[k + 1]);
        st.log_s = log_next;
        st.s = s_next;
        k += 1;
        if (st.s > cfg.overflow_ceiling) break;
    }

    if (k < n) out.overflowed = true;  // left the loop through the ceiling

    // Analytic tail from wherever the path stopped.
    out.total_damage += st.s * grid.discount[k] / (dyn.r - alpha);
    return out;
}

}  // namespace

PathOutcome simulate_path(const DamageDynamics& dyn, const CostSchedule& cost,
                          const Strategy& strategy, const SimConfig& cfg,
                          std::uint64_t path_index) {
    dyn.validate();
    cost.validate();
    cfg.validate();
    Strategy resolved = resolve_strategy(dyn, cost, strategy);
    StepGrid grid = make_grid(dyn, cost, resolved, cfg);
    return simulate_resolved(dyn, cost, resolved, cfg, grid, path_index);
}

std::vector<PathOutcome> run_paths(const DamageDynamics& dyn, const CostSchedule& cost,
                                   const Strategy& strategy, const SimConfig& cfg,
                                   unsigned threads) {
    dyn.validate();
    cost.validate();
    cfg.validate();
    Strategy resolved = resolve_strategy(dyn, cost, strategy);
    StepGrid grid = make_grid(dyn, cost, resolved, cfg);

    std::vector<PathOutcome> outcomes(cfg.paths);
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(
        std::min<std::uint64_t>(threads, cfg.paths));

    if (threads <= 1) {
        for (std::uint64_t i = 0; i < cfg.paths; ++i) {
            outcomes[i] = simulate_resolved(dyn, cost, resolved, cfg, grid, i);
        }
        return outcomes;
    }

    // Paths land in preassigned slots, so the partition cannot affect results.
    std::vector<std::thread> pool;
    pool.reserve(threads);
    std::uint64_t chunk = (cfg.paths + threads - 1) / threads;
    for (unsigned w = 0; w < threads; ++w) {
        std::uint64_t begin = w * chunk;
        std::uint64_t end = std::min<std::uint64_t>(begin + chunk, cfg.paths);
        if (begin >= end) break;
        pool.emplace_back([&, begin, end] {
            for (std::uint64_t i = begin; i < end; ++i) {
                outcomes[i] = simulate_resolved(dyn, cost, resolved, cfg, grid, i);
            }
        });
    }
    for (auto& th : pool) th.join();
    return outcomes;
}

double sorted_quantile(const std::vector<double>& sorted, double level) {
    if (sorted.empty()) config_fail("quantile of an empty sample");
    if (!(level > 0.0) || !(level < 1.0)) config_fail("quantile level must lie in (0, 1)");
    double pos = level * static_cast<double>(sorted.size() - 1);
    auto lo = static_cast<std::size_t>(pos);
    std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    double w = pos - static_cast<double>(lo);
    return sorted[lo] + w * (sorted[hi] - sorted[lo]);
}

DamageDistribution summarize(const std::vector<PathOutcome>& outcomes, const SimConfig& cfg) {
    if (outcomes.empty()) config_fail("cannot summarize an empty ensemble");
    DamageDistribution dist;

    const auto n = outcomes.size();
    double sum = 0.0;
    std::uint64_t acted = 0;
    double tau_sum = 0.0;
    for (const auto& o : outcomes) {
        sum += o.total_damage;
        if (o.acted) {
            acted += 1;
            tau_sum += *o.tau;
        }
        if (o.overflowed) dist.overflow_paths += 1;
    }
    dist.mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (const auto& o : outcomes) {
        double d = o.total_damage - dist.mean;
        ss += d * d;
    }
    double sd = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
    dist.std_error = sd / std::sqrt(static_cast<double>(n));
    dist.act_fraction = static_cast<double>(acted) / static_cast<double>(n);
    if (acted > 0) dist.mean_tau_given_acted = tau_sum / static_cast<double>(acted);

    std::vector<double> sorted;
    sorted.reserve(n);
    for (const auto& o : outcomes) sorted.push_back(o.total_damage);
    std::sort(sorted.begin(), sorted.end());

    dist.quantiles.reserve(cfg.quantile_levels.size());
    for (double p : cfg.quantile_levels) {
        dist.quantiles.emplace_back(p, sorted_quantile(sorted, p));
    }

    // Equal-width bins over [0, 99.5th percentile]; the extreme upper tail is
    // folded into the last bin so the masses always sum to one.
    double top = sorted_quantile(sorted, 0.995);
    if (!(top > 0.0)) top = sorted.back() > 0.0 ? sorted.back() : 1.0;
    std::size_t bins = cfg.histogram_bins;
    double width = top / static_cast<double>(bins);
    std::vector<std::uint64_t> counts(bins, 0);
    for (double v : sorted) {
        auto idx = static_cast<std::size_t>(v / width);
        counts[std::min(idx, bins - 1)] += 1;
    }
    dist.histogram.reserve(bins);
    for (std::size_t b = 0; b < bins; ++b) {
        dist.histogram.push_back({width * static_cast<double>(b),
                                  width * static_cast<double>(b + 1),
                                  static_cast<double>(counts[b]) / static_cast<double>(n)});
    }
    return dist;
}

DamageDistribution run_ensemble(const DamageDynamics& dyn, const CostSchedule& cost,
                                const Strategy& strategy, const SimConfig& cfg,
                                unsigned threads) {
    return summarize(run_paths(dyn, cost, strategy, cfg, threads), cfg);
}

}  // namespace optstop
