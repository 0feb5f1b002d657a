#pragma once

#include <optional>
#include <string>
#include <vector>

#include "optstop/model.hpp"
#include "optstop/montecarlo.hpp"

// Damage curves over barrier grids and cost growth rates, and a simulation
// route to the optimal barrier that is independent of the closed form.

namespace optstop {

enum class SweepEngine : std::uint8_t { closed_form, monte_carlo, both };

struct SweepSpec {
    std::vector<double> H_grid;   // strictly increasing, every entry >= S0
    std::vector<double> q_values;
    SweepEngine engine = SweepEngine::closed_form;
    SimConfig sim;                // used by the Monte Carlo engine

    // Needs the dynamics for the grid-versus-S0 check and the q < r rule.
    void validate(const DamageDynamics& dyn) const;
};

struct SweepPoint {
    double q = 0.0;
    double H = 0.0;
    std::optional<double> cf_damage;
    std::optional<double> mc_damage;
    std::optional<double> mc_se;
};

struct SweepArgmin {
    double q = 0.0;
    double H_best = 0.0;
    double damage_best = 0.0;
    std::string engine;      // "closed_form" or "monte_carlo"
    bool boundary = false;   // argmin sits on a grid edge
};

struct SweepResult {
    std::vector<SweepPoint> points;    // row-major: q outer, H inner
    std::vector<SweepArgmin> argmins;  // one per (q, engine) pair
    std::vector<std::string> warnings;
};

// Expected damage over spec.H_grid for each q in spec.q_values, with the cost
// level taken from base_cost.K.  Rows with q >= dyn.r are evaluated by Monte
// Carlo only (the closed form does not exist there); requesting the pure
// closed-form engine together with such a q is a validation error.
SweepResult damage_curve(const DamageDynamics& dyn, const CostSchedule& base_cost,
                         const SweepSpec& spec, unsigned threads = 0);

// Locate the best barrier on a grid by simulation with common random numbers:
// every barrier sees the same pre-intervention path, and damage after a
// crossing is closed by its conditional expectation, so grid points differ
// only through genuine timing differences.  Serves as the simulation oracle
// for the closed-form optimal barrier.
SweepResult mc_optimal_barrier(const DamageDynamics& dyn, const CostSchedule& cost,
                               const SimConfig& sim, const std::vector<double>& H_grid,
                               unsigned threads = 0);

}  // namespace optstop
