#include "optstop/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "optstop/closed_form.hpp"
#include "optstop/rng.hpp"

namespace optstop {

namespace {

[[noreturn]] void spec_fail(const std::string& what) {
    throw std::invalid_argument(what);
}

SweepArgmin grid_argmin(double q, const std::vector<double>& h, const std::vector<double>& v,
                        const char* engine) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (v[i] < v[best]) best = i;
    }
    SweepArgmin a;
    a.q = q;
    a.H_best = h[best];
    a.damage_best = v[best];
    a.engine = engine;
    a.boundary = h.size() > 1 && (best == 0 || best + 1 == h.size());
    return a;
}

void note_boundary(SweepResult& result, const SweepArgmin& a) {
    if (!a.boundary) return;
    std::ostringstream os;
    os << a.engine << " argmin at q = " << a.q << " sits on the grid boundary (H = " << a.H_best
       << "); widen the grid";
    result.warnings.push_back(os.str());
}

}  // namespace

void SweepSpec::validate(const DamageDynamics& dyn) const {
    if (H_grid.empty()) spec_fail("H_grid must not be empty");
    for (std::size_t i = 0; i < H_grid.size(); ++i) {
        if (!(H_grid[i] >= dyn.S0)) spec_fail("every H_grid entry must be at least S0");
        if (i > 0 && !(H_grid[i] > H_grid[i - 1]))
            spec_fail("H_grid must be strictly increasing");
    }
    if (q_values.empty()) spec_fail("q_values must not be empty");
    if (engine == SweepEngine::closed_form) {
        for (double q : q_values) {
            if (q >= dyn.r)
                spec_fail("closed-form engine requires every q < r (use the Monte Carlo engine)");
        }
    }
    sim.validate();
}

SweepResult damage_curve(const DamageDynamics& dyn, const CostSchedule& base_cost,
                         const SweepSpec& spec, unsigned threads) {
    dyn.validate();
    base_cost.validate();
    spec.validate(dyn);

    SweepResult result;
    for (double q : spec.q_values) {
        CostSchedule cost{base_cost.K, q};
        bool cf_available = q < dyn.r;
        bool want_cf = cf_available && (spec.engine == SweepEngine::closed_form ||
                                        spec.engine == SweepEngine::both);
        bool want_mc = spec.engine == SweepEngine::monte_carlo ||
                       spec.engine == SweepEngine::both || !cf_available;
        if (!cf_available && spec.engine == SweepEngine::both) {
            std::ostringstream os;
            os << "q = " << q << " >= r: closed form unavailable, row is Monte Carlo only";
            result.warnings.push_back(os.str());
        }

        std::vector<double> cf_vals;
        std::vector<double> mc_vals;
        std::vector<double> mc_ses;
        for (double H : spec.H_grid) {
            SweepPoint pt;
            pt.q = q;
            pt.H = H;
            if (want_cf) {
                pt.cf_damage = H <= dyn.S0
                                   ? pv_with_action(dyn, cost, dyn.S0, 0.0)
                                   : value_function(dyn, cost, H, dyn.S0, 0.0);
                cf_vals.push_back(*pt.cf_damage);
            }
            if (want_mc) {
                Strategy s = Strategy::barrier(H, dyn.S0);
                DamageDistribution d = run_ensemble(dyn, cost, s, spec.sim, threads);
                pt.mc_damage = d.mean;
                pt.mc_se = d.std_error;
                mc_vals.push_back(d.mean);
                mc_ses.push_back(d.std_error);
            }
            result.points.push_back(pt);
        }
        if (want_cf) {
            SweepArgmin a = grid_argmin(q, spec.H_grid, cf_vals, "closed_form");
            note_boundary(result, a);
            result.argmins.push_back(a);
        }
        if (want_mc) {
            SweepArgmin a = grid_argmin(q, spec.H_grid, mc_vals, "monte_carlo");
            note_boundary(result, a);
            result.argmins.push_back(a);
        }
    }
    return result;
}

namespace {

// Per-path damage estimates for every barrier of the grid, sharing one
// pre-intervention path.  After a barrier is hit its remaining damage is
// replaced by the conditional expectation
//     e^{-r tau} (S_tau / (r - alpha2) + K e^{q tau}),
// which is unbiased for the mean and removes all post-crossing noise.
struct MultiBarrierContext {
    std::vector<double> t;
    std::vector<double> discount;
    std::vector<double> log_h;              // log barrier levels, ascending
    std::vector<std::vector<double>> log_barrier;  // per barrier, per node
    double log_s0;
};

void evaluate_path(const DamageDynamics& dyn, const CostSchedule& cost, const SimConfig& cfg,
                   const MultiBarrierContext& ctx, std::uint64_t path_index, double* damage_out,
                   bool* overflow_out) {
    const std::size_t n = ctx.t.size() - 1;
    const std::size_t nh = ctx.log_h.size();
    PathRng rng(cfg.seed, path_index);

    double post_slope = 1.0 / (dyn.r - dyn.alpha2);
    auto closure = [&](double tau, double s_tau) {
        return std::exp(-dyn.r * tau) * (s_tau * post_slope + cost.K * std::exp(cost.q * tau));
    };

    *overflow_out = false;
    double log_s = ctx.log_s0;
    double s = dyn.S0;
    double integral = 0.0;  // trapezoidal discounted damage up to the current node
    std::size_t lo = 0;     // first barrier not yet hit

    // Barriers at or below the start trigger immediately.
    while (lo < nh && log_s >= ctx.log_barrier[lo][0]) {
        damage_out[lo] = closure(0.0, dyn.S0);
        ++lo;
    }

    double drift = dyn.alpha1 - 0.5 * dyn.sigma1 * dyn.sigma1;
    std::size_t k = 0;
    for (; k < n && lo < nh; ++k) {
        double h = ctx.t[k + 1] - ctx.t[k];
        double z = rng.normal(k);
        double log_next = log_s + drift * h + dyn.sigma1 * std::sqrt(h) * z;
        double s_next = std::exp(log_next);
        double piece = 0.5 * h * (s * ctx.discount[k] + s_next * ctx.discount[k + 1]);

        // Grid detections, smallest barrier first.
        while (lo < nh && log_next >= ctx.log_barrier[lo][k + 1]) {
            damage_out[lo] = integral + piece + closure(ctx.t[k + 1], s_next);
            ++lo;
        }
        // Bridge detections with one shared uniform; the crossing chance
        // shrinks as the barrier rises, so scanning can stop at the first miss.
        if (lo < nh && cfg.bridge_correction && dyn.sigma1 > 0.0) {
            double u = -1.0;
            double denom = dyn.sigma1 * dyn.sigma1 * h;
            while (lo < nh) {
                double d0 = ctx.log_barrier[lo][k] - log_s;
                double d1 = ctx.log_barrier[lo][k + 1] - log_next;
                double expo = 2.0 * d0 * d1 / denom;
                if (expo >= 40.0) break;
                if (u < 0.0) u = rng.bridge_uniform(k);
                if (u >= std::exp(-expo)) break;
                double tau = ctx.t[k] + 0.5 * h;
                double s_tau = std::exp(ctx.log_h[lo] + cost.q * tau);
                double part = 0.25 * h * (s * ctx.discount[k] + s_tau * std::exp(-dyn.r * tau));
                damage_out[lo] = integral + part + closure(tau, s_tau);
                ++lo;
            }
        }

        integral += piece;
        log_s = log_next;
        s = s_next;
        if (s > cfg.overflow_ceiling) {
            ++k;
            break;
        }
    }

    if (lo < nh) {
        // Remaining barriers were never hit: no-action damage with the tail.
        bool overflowed = k < n && s > cfg.overflow_ceiling;
        double tail = integral + s * ctx.discount[k] / (dyn.r - dyn.alpha1);
        for (; lo < nh; ++lo) damage_out[lo] = tail;
        *overflow_out = overflowed;
    }
}

}  // namespace

SweepResult mc_optimal_barrier(const DamageDynamics& dyn, const CostSchedule& cost,
                               const SimConfig& sim, const std::vector<double>& H_grid,
                               unsigned threads) {
    dyn.validate();
    cost.validate();
    sim.validate();
    if (H_grid.empty()) spec_fail("H_grid must not be empty");
    for (std::size_t i = 0; i < H_grid.size(); ++i) {
        if (!(H_grid[i] >= dyn.S0)) spec_fail("every H_grid entry must be at least S0");
        if (i > 0 && !(H_grid[i] > H_grid[i - 1]))
            spec_fail("H_grid must be strictly increasing");
    }

    MultiBarrierContext ctx;
    auto steps = static_cast<std::size_t>(std::ceil(sim.t_max / sim.dt - 1e-9));
    ctx.t.resize(steps + 1);
    ctx.discount.resize(steps + 1);
    for (std::size_t k = 0; k <= steps; ++k) {
        ctx.t[k] = std::min(static_cast<double>(k) * sim.dt, sim.t_max);
        ctx.discount[k] = std::exp(-dyn.r * ctx.t[k]);
    }
    ctx.t[steps] = sim.t_max;
    ctx.log_s0 = std::log(dyn.S0);
    ctx.log_h.reserve(H_grid.size());
    ctx.log_barrier.resize(H_grid.size());
    for (std::size_t i = 0; i < H_grid.size(); ++i) {
        ctx.log_h.push_back(std::log(H_grid[i]));
        ctx.log_barrier[i].resize(steps + 1);
        for (std::size_t k = 0; k <= steps; ++k) {
            ctx.log_barrier[i][k] = ctx.log_h[i] + cost.q * ctx.t[k];
        }
    }

    const std::size_t nh = H_grid.size();
    std::vector<double> damages(sim.paths * nh);
    std::vector<char> overflow(sim.paths, 0);

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, sim.paths));
    auto work = [&](std::uint64_t begin, std::uint64_t end) {
        for (std::uint64_t i = begin; i < end; ++i) {
            bool ov = false;
            evaluate_path(dyn, cost, sim, ctx, i, &damages[i * nh], &ov);
            overflow[i] = ov ? 1 : 0;
        }
    };
    if (threads <= 1) {
        work(0, sim.paths);
    } else {
        std::vector<std::thread> pool;
        std::uint64_t chunk = (sim.paths + threads - 1) / threads;
        for (unsigned w = 0; w < threads; ++w) {
            std::uint64_t begin = w * chunk;
            std::uint64_t end = std::min<std::uint64_t>(begin + chunk, sim.paths);
            if (begin >= end) break;
            pool.emplace_back(work, begin, end);
        }
        for (auto& th : pool) th.join();
    }

    SweepResult result;
    std::vector<double> means(nh);
    std::vector<double> ses(nh);
    for (std::size_t j = 0; j < nh; ++j) {
        double sum = 0.0;
        for (std::uint64_t i = 0; i < sim.paths; ++i) sum += damages[i * nh + j];
        double mean = sum / static_cast<double>(sim.paths);
        double ss = 0.0;
        for (std::uint64_t i = 0; i < sim.paths; ++i) {
            double d = damages[i * nh + j] - mean;
            ss += d * d;
        }
        double sd = sim.paths > 1 ? std::sqrt(ss / static_cast<double>(sim.paths - 1)) : 0.0;
        means[j] = mean;
        ses[j] = sd / std::sqrt(static_cast<double>(sim.paths));

        SweepPoint pt;
        pt.q = cost.q;
        pt.H = H_grid[j];
        pt.mc_damage = mean;
        pt.mc_se = ses[j];
        result.points.push_back(pt);
    }
    SweepArgmin a = grid_argmin(cost.q, H_grid, means, "monte_carlo");
    note_boundary(result, a);
    result.argmins.push_back(a);

    std::uint64_t overflow_count = 0;
    for (char c : overflow) overflow_count += c;
    if (overflow_count > 0) {
        std::ostringstream os;
        os << overflow_count << " path(s) hit the overflow ceiling before crossing every barrier";
        result.warnings.push_back(os.str());
    }
    return result;
}

}  // namespace optstop
