#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "optstop/closed_form.hpp"
#include "optstop/montecarlo.hpp"
#include "test_util.hpp"

using namespace optstop;

namespace {

SimConfig quick_config(std::uint64_t paths, double dt = 0.1, double t_max = 600.0) {
    SimConfig cfg;
    cfg.paths = paths;
    cfg.dt = dt;
    cfg.t_max = t_max;
    cfg.seed = 42;
    return cfg;
}

// Noise-free dynamics with a clean analytic value for every strategy.
DamageDynamics flat_dynamics() {
    DamageDynamics d;
    d.alpha1 = 0.04;
    d.alpha2 = 0.03;
    d.sigma1 = 0.0;
    d.sigma2 = 0.0;
    d.S0 = 1.0;
    d.r = 0.05;
    return d;
}

}  // namespace

TEST_CASE("config validation") {
    SimConfig cfg = quick_config(100);
    CHECK_NOTHROW(cfg.validate());

    SimConfig bad = cfg;
    bad.paths = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    bad = cfg;
    bad.dt = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad.dt = 1.5;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    bad = cfg;
    bad.t_max = 50.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    bad = cfg;
    bad.quantile_levels = {0.5, 0.5};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad.quantile_levels = {0.0, 0.5};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad.quantile_levels = {};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    bad = cfg;
    bad.histogram_bins = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    bad = cfg;
    bad.overflow_ceiling = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("bridge crossing probability") {
    // Both ends strictly below the barrier: exp(-2 d0 d1 / (sigma^2 h)).
    double p = bridge_crossing_probability(0.0, 0.02, 0.05, 0.05, 0.2, 0.1);
    CHECK(p == doctest::Approx(std::exp(-2.0 * 0.05 * 0.03 / (0.04 * 0.1))).epsilon(1e-14));

    // An endpoint touching or above the barrier is a certain crossing.
    CHECK(bridge_crossing_probability(0.05, 0.0, 0.05, 0.05, 0.2, 0.1) == 1.0);
    CHECK(bridge_crossing_probability(0.0, 0.07, 0.05, 0.05, 0.2, 0.1) == 1.0);

    // A flat path strictly below the barrier never crosses.
    CHECK(bridge_crossing_probability(0.0, 0.0, 0.05, 0.05, 0.0, 0.1) == 0.0);

    // Wider steps make crossings likelier.
    double p_wide = bridge_crossing_probability(0.0, 0.02, 0.05, 0.05, 0.2, 0.5);
    CHECK(p_wide > p);

    CHECK_THROWS_AS(bridge_crossing_probability(0, 0, 1, 1, 0.2, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(bridge_crossing_probability(0, 0, 1, 1, -0.2, 0.1), std::invalid_argument);
}

TEST_CASE("strategy resolution") {
    DamageDynamics d = default_dynamics();
    CostSchedule c = default_cost();

    Strategy s = resolve_strategy(d, c, Strategy::optimal());
    CHECK(s.kind == StrategyKind::barrier);
    CHECK(s.H == doctest::Approx(10.1915072050).epsilon(1e-9));

    s = resolve_strategy(d, CostSchedule{60.0, 0.05}, Strategy::optimal());
    CHECK(s.kind == StrategyKind::immediate);

    s = resolve_strategy(d, c, Strategy::barrier(0.2, d.S0));
    CHECK(s.kind == StrategyKind::immediate);

    s = resolve_strategy(d, c, Strategy::never_act());
    CHECK(s.kind == StrategyKind::never_act);
}

TEST_CASE("noise-free paths reproduce the analytic present values") {
    DamageDynamics d = default_dynamics();
    d.sigma1 = 0.0;
    d.sigma2 = 0.0;
    CostSchedule c = default_cost();
    SimConfig cfg = quick_config(50);

    DamageDistribution never = run_ensemble(d, c, Strategy::never_act(), cfg, 1);
    CHECK(never.mean == doctest::Approx(77.4387663778).epsilon(1e-6));
    CHECK(never.std_error < 1e-12);  // identical outcomes up to rounding
    CHECK(never.act_fraction == 0.0);
    CHECK_FALSE(never.mean_tau_given_acted.has_value());

    DamageDistribution now = run_ensemble(d, c, Strategy::immediate(), cfg, 1);
    CHECK(now.mean == doctest::Approx(104.6035644851).epsilon(1e-6));
    CHECK(now.std_error < 1e-12);
    CHECK(now.act_fraction == 1.0);
    REQUIRE(now.mean_tau_given_acted.has_value());
    CHECK(*now.mean_tau_given_acted == 0.0);
}

TEST_CASE("noise-free barrier rule acts on the first grid node past the level") {
    DamageDynamics d = default_dynamics();
    d.sigma1 = 0.0;
    d.sigma2 = 0.0;
    CostSchedule c = default_cost();
    SimConfig cfg = quick_config(10);

    DamageDistribution dist = run_ensemble(d, c, Strategy::barrier(2.0, d.S0), cfg, 1);
    CHECK(dist.act_fraction == 1.0);
    // ln 2 / alpha1 = 18.6904, so the crossing lands on the 18.7 node.
    REQUIRE(dist.mean_tau_given_acted.has_value());
    CHECK(*dist.mean_tau_given_acted == doctest::Approx(18.7).epsilon(1e-12));

    double tau = 18.7;
    double s_tau = std::exp(d.alpha1 * tau);
    double exact = (std::exp((d.alpha1 - d.r) * tau) - 1.0) / (d.alpha1 - d.r) +
                   std::exp(-d.r * tau) * (c.K + s_tau / (d.r - d.alpha2));
    CHECK(dist.mean == doctest::Approx(exact).epsilon(1e-5));
    CHECK(dist.std_error < 1e-12);
}

TEST_CASE("overflow ceiling closes runaway paths early and flags them") {
    DamageDynamics d = flat_dynamics();
    CostSchedule c = default_cost();
    SimConfig cfg = quick_config(10);
    cfg.overflow_ceiling = 10.0;

    // Deterministic growth e^{0.04 t} passes 10 near t = 57.6 << t_max.
    DamageDistribution dist = run_ensemble(d, c, Strategy::never_act(), cfg, 1);
    CHECK(dist.overflow_paths == cfg.paths);
    // The early close substitutes the exact continuation, so the value is
    // still the full no-action present value.
    CHECK(dist.mean == doctest::Approx(d.S0 / (d.r - d.alpha1)).epsilon(1e-6));

    std::vector<PathOutcome> outs = run_paths(d, c, Strategy::never_act(), cfg, 1);
    for (const auto& o : outs) {
        CHECK(o.overflowed);
        CHECK_FALSE(o.acted);
    }

    // Overflow after an intervention: both flags set, value still analytic.
    DamageDistribution acted = run_ensemble(d, c, Strategy::barrier(5.0, d.S0), cfg, 1);
    CHECK(acted.overflow_paths == cfg.paths);
    CHECK(acted.act_fraction == 1.0);
    double tau = 40.3;  // first node with e^{0.04 t} >= 5
    double s_tau = std::exp(d.alpha1 * tau);
    double exact = (std::exp((d.alpha1 - d.r) * tau) - 1.0) / (d.alpha1 - d.r) +
                   std::exp(-d.r * tau) * (c.K + s_tau / (d.r - d.alpha2));
    CHECK(acted.mean == doctest::Approx(exact).epsilon(1e-4));

    // A roomier ceiling removes the flag; the value agrees up to the
    // discretization error of the stretch the early close skipped.
    cfg.overflow_ceiling = 1e12;
    DamageDistribution calm = run_ensemble(d, c, Strategy::never_act(), cfg, 1);
    CHECK(calm.overflow_paths == 0);
    CHECK(calm.mean == doctest::Approx(dist.mean).epsilon(1e-6));
}

TEST_CASE("barrier ensemble matches the first-passage law") {
    DamageDynamics d = default_dynamics();
    CostSchedule c = default_cost();
    SimConfig cfg = quick_config(30000);

    std::vector<PathOutcome> outs = run_paths(d, c, Strategy::barrier(2.0, d.S0), cfg, 1);
    DamageDistribution dist = summarize(outs, cfg);

    // Hit probability by the horizon and the truncated mean hitting time.
    CHECK(std::abs(dist.act_fraction - 0.99900572) < 0.0025);
    REQUIRE(dist.mean_tau_given_acted.has_value());
    CHECK(std::abs(*dist.mean_tau_given_acted - 35.748437) < 0.9);

    // Conditional histogram of hitting times on [0, 200] in 10-year bins,
    // against the analytic first-passage law.
    const double expected[20] = {0.35761, 0.22830, 0.11856, 0.07290, 0.04943,
                                 0.03567, 0.02687, 0.02089, 0.01663, 0.01349,
                                 0.01112, 0.00927, 0.00782, 0.00665, 0.00570,
                                 0.00492, 0.00427, 0.00373, 0.00327, 0.00288};
    std::vector<double> counts(20, 0.0);
    double total = 0.0;
    for (const auto& o : outs) {
        if (!o.acted || *o.tau > 200.0) continue;
        auto bin = static_cast<std::size_t>(*o.tau / 10.0);
        counts[std::min<std::size_t>(bin, 19)] += 1.0;
        total += 1.0;
    }
    REQUIRE(total > 0.0);
    for (std::size_t i = 0; i < 20; ++i) {
        CHECK(std::abs(counts[i] / total - expected[i]) < 0.015);
    }

    // Damage mean against the closed form.
    double cf = value_function(d, c, 2.0, d.S0, 0.0);
    CHECK(std::abs(dist.mean - cf) < 4.0 * dist.std_error + 0.3);
}

TEST_CASE("bridge correction detects strictly more crossings") {
    DamageDynamics d = default_dynamics();
    CostSchedule c = default_cost();
    SimConfig coarse = quick_config(20000, 0.5);
    SimConfig no_bridge = coarse;
    no_bridge.bridge_correction = false;

    DamageDistribution with = run_ensemble(d, c, Strategy::barrier(2.0, d.S0), coarse, 1);
    DamageDistribution without = run_ensemble(d, c, Strategy::barrier(2.0, d.S0), no_bridge, 1);

    // Every crossing the plain grid sees, the bridge run sees no later, so
    // it acts at least as often and distinctly earlier on this coarse grid.
    CHECK(with.act_fraction >= without.act_fraction);
    REQUIRE(with.mean_tau_given_acted.has_value());
    REQUIRE(without.mean_tau_given_acted.has_value());
    CHECK(*with.mean_tau_given_acted < *without.mean_tau_given_acted - 0.1);

    // Missed crossings act like a higher effective barrier, which for a level
    // this far below the optimum means less expected damage; the corrected
    // run sits closer to the exact value.
    double cf = value_function(d, c, 2.0, d.S0, 0.0);
    CHECK(without.mean < with.mean - 0.5);
    CHECK(std::abs(with.mean - cf) < std::abs(without.mean - cf));
    CHECK(std::abs(with.mean - cf) < 1.5);
}

TEST_CASE("coarse and fine grids agree with the closed form") {
    DamageDynamics d = default_dynamics();
    CostSchedule c = default_cost();
    double cf = value_function(d, c, 2.0, d.S0, 0.0);
    for (double dt : {0.2, 0.1, 0.05}) {
        SimConfig cfg = quick_config(dt < 0.1 ? 10000 : 20000, dt);
        DamageDistribution dist = run_ensemble(d, c, Strategy::barrier(2.0, d.S0), cfg, 1);
        CHECK(std::abs(dist.mean - cf) < 3.0 * dist.std_error + 0.3);
    }
}

TEST_CASE("thread count never changes results") {
    DamageDynamics d = default_dynamics();
    CostSchedule c = default_cost();
    SimConfig cfg = quick_config(4001, 0.2, 150.0);

    std::vector<PathOutcome> serial = run_paths(d, c, Strategy::barrier(2.0, d.S0), cfg, 1);
    std::vector<PathOutcome> pooled = run_paths(d, c, Strategy::barrier(2.0, d.S0), cfg, 3);
    REQUIRE(serial.size() == pooled.size());
    for (std::size_t i = 0; i < serial.size(); ++i) {
        CHECK(serial[i].total_damage == pooled[i].total_damage);
        CHECK(serial[i].acted == pooled[i].acted);
        CHECK(serial[i].tau.has_value() == pooled[i].tau.has_value());
        if (serial[i].tau) CHECK(*serial[i].tau == *pooled[i].tau);
        CHECK(serial[i].overflowed == pooled[i].overflowed);
    }

    DamageDistribution a = run_ensemble(d, c, Strategy::barrier(2.0, d.S0), cfg, 1);
    DamageDistribution b = run_ensemble(d, c, Strategy::barrier(2.0, d.S0), cfg, 4);
    CHECK(a.mean == b.mean);
    CHECK(a.std_error == b.std_error);
    REQUIRE(a.quantiles.size() == b.quantiles.size());
    for (std::size_t i = 0; i < a.quantiles.size(); ++i)
        CHECK(a.quantiles[i].second == b.quantiles[i].second);
}

TEST_CASE("single paths are pure functions of their index") {
    DamageDynamics d = default_dynamics();
    CostSchedule c = default_cost();
    SimConfig cfg = quick_config(8, 0.2, 150.0);

    PathOutcome once = simulate_path(d, c, Strategy::barrier(2.0, d.S0), cfg, 3);
    PathOutcome again = simulate_path(d, c, Strategy::barrier(2.0, d.S0), cfg, 3);
    CHECK(once.total_damage == again.total_damage);

    std::vector<PathOutcome> all = run_paths(d, c, Strategy::barrier(2.0, d.S0), cfg, 2);
    CHECK(all[3].total_damage == once.total_damage);

    PathOutcome other = simulate_path(d, c, Strategy::barrier(2.0, d.S0), cfg, 4);
    CHECK(other.total_damage != once.total_damage);
}

TEST_CASE("quantile interpolation") {
    std::vector<double> sorted = {1.0, 2.0, 3.0, 4.0, 5.0};
    CHECK(sorted_quantile(sorted, 0.5) == 3.0);
    CHECK(sorted_quantile(sorted, 0.25) == 2.0);
    CHECK(sorted_quantile(sorted, 0.375) == 2.5);
    CHECK(sorted_quantile(sorted, 0.999) == doctest::Approx(4.996).epsilon(1e-12));
    CHECK_THROWS_AS(sorted_quantile(sorted, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(sorted_quantile({}, 0.5), std::invalid_argument);
}

TEST_CASE("summary statistics of a hand-built ensemble") {
    SimConfig cfg = quick_config(2);
    cfg.histogram_bins = 10;
    std::vector<PathOutcome> outs(2);
    outs[0].total_damage = 10.0;
    outs[1].total_damage = 20.0;
    outs[1].acted = true;
    outs[1].tau = 7.0;

    DamageDistribution dist = summarize(outs, cfg);
    CHECK(dist.mean == 15.0);
    CHECK(dist.std_error == doctest::Approx(5.0).epsilon(1e-14));
    CHECK(dist.act_fraction == 0.5);
    REQUIRE(dist.mean_tau_given_acted.has_value());
    CHECK(*dist.mean_tau_given_acted == 7.0);
    CHECK(dist.overflow_paths == 0);

    double mass = 0.0;
    for (const auto& bin : dist.histogram) {
        CHECK(bin.right > bin.left);
        mass += bin.mass;
    }
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("histogram masses always sum to one on a live run") {
    DamageDynamics d = default_dynamics();
    CostSchedule c = default_cost();
    SimConfig cfg = quick_config(2000, 0.2, 150.0);
    DamageDistribution dist = run_ensemble(d, c, Strategy::never_act(), cfg, 1);

    double mass = 0.0;
    for (const auto& bin : dist.histogram) mass += bin.mass;
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));

    for (std::size_t i = 1; i < dist.quantiles.size(); ++i)
        CHECK(dist.quantiles[i].second >= dist.quantiles[i - 1].second);
}
