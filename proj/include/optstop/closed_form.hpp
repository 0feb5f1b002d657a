#pragma once

#include <optional>

#include "optstop/model.hpp"

// Closed-form valuation of barrier intervention rules.  In the detrended
// variable Y = S * exp(-q t) the expected discounted damage of a barrier rule
// solves a Cauchy-Euler ODE; the continuation value below the barrier is
//
//     Q(Y) = coeff * Y^eps + Y / (r - alpha1),
//     coeff = K / H^eps - H^(1-eps) * (alpha1 - alpha2) / ((r - alpha1)(r - alpha2)),
//
// where eps > 1 is the positive characteristic root.  Minimizing over H gives
// the optimal barrier H_star; total damage at time t is exp(q t) * Q(Y).
// All of this requires q < r; otherwise cost growth cancels discounting and
// the solver reports the immediate-action branch instead.

namespace optstop {

enum class SolutionBranch : std::uint8_t {
    interior,           // q < r and H_star > S0: wait for the barrier
    immediate_optimal,  // q >= r, or the interior barrier collapses to S0
};

struct CharacteristicRoots {
    double eps_tilde;  // negative root (q < r)
    double eps;        // positive root, > 1 for q < r
};

struct ClosedFormSolution {
    SolutionBranch branch = SolutionBranch::interior;
    double V0 = 0.0;  // expected total discounted damage at (S0, t = 0)
    double nu = 0.0;  // drift of ln Y: alpha1 - q - sigma1^2 / 2
    std::optional<double> eps;
    std::optional<double> eps_tilde;
    std::optional<double> H_star;        // optimal time-zero barrier level
    std::optional<double> coeff;         // Y^eps multiplier at H = H_star
    std::optional<double> expected_tau;  // mean barrier hitting time; needs nu > 0
};

struct DeterministicSolution {
    double tau_star;  // optimal intervention time of the noise-free problem
    double S_star;    // damage rate at that time
};

// Expected discounted damage from state S if no intervention ever happens:
// S / (r - alpha1).
double pv_no_action(const DamageDynamics& dyn, double S);

// Expected discounted damage, valued at time t, of intervening right now at
// state S: S / (r - alpha2) + K * exp(q t).
double pv_with_action(const DamageDynamics& dyn, const CostSchedule& cost, double S, double t);

// Roots of (sigma1^2/2) x (x - 1) + (alpha1 - q) x - (r - q) = 0, computed in
// the cancellation-free form.  Requires sigma1 > 0 and q < r.
CharacteristicRoots characteristic_roots(const DamageDynamics& dyn, const CostSchedule& cost);

// Optimal barrier and its value.  Routes to the immediate-action branch when
// q >= r or when the interior barrier does not exceed S0; delegates to the
// deterministic solution when sigma1 = 0.
ClosedFormSolution optimal_barrier(const DamageDynamics& dyn, const CostSchedule& cost);

// Expected total discounted damage, valued at time t, of the barrier rule H
// evaluated at state S.  Requires q < r and Y = S exp(-q t) <= H; throws
// std::domain_error outside the continuation region (use pv_with_action there).
double value_function(const DamageDynamics& dyn, const CostSchedule& cost, double H, double S,
                      double t);

// Optimal intervention time and damage level with all volatilities at zero.
// Requires q < alpha1; clamps to (0, S0) when acting immediately is optimal.
DeterministicSolution deterministic_solution(const DamageDynamics& dyn, const CostSchedule& cost);

// First-passage density of S_t to the barrier H exp(q t): with b = ln(H/S0)
// and nu = alpha1 - q - sigma1^2/2,
//     g(tau) = b / (sigma1 tau sqrt(2 pi tau)) * exp(-(b - nu tau)^2 / (2 sigma1^2 tau)).
// Requires nu > 0 and H > S0.
double hitting_time_density(const DamageDynamics& dyn, const CostSchedule& cost, double H,
                            double tau);

// Mean of the first-passage law: ln(H/S0) / nu.  Requires nu > 0 and H >= S0.
double expected_hitting_time(const DamageDynamics& dyn, const CostSchedule& cost, double H);

// Adaptive quadrature of tau^moment * g(tau) over [0, t_hi] (moment 0 or 1),
// split around the bulk of the law so narrow peaks are never stepped over.
// Moment 0 up to a large t_hi checks that the density normalizes to one.
double hitting_time_integral(const DamageDynamics& dyn, const CostSchedule& cost, double H,
                             double t_hi, int moment);

}  // namespace optstop
