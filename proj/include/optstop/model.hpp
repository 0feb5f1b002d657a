#pragma once

#include <cstdint>

// Parameter types for a two-regime damage process.  Damage accrues at rate S_t
// (billion USD/year) following a geometric Brownian motion whose drift and
// volatility drop from (alpha1, sigma1) to (alpha2, sigma2) once a one-off
// intervention is made.  The intervention cost grows exponentially at rate q.
// Damage can equivalently be parameterized through an exponential map from a
// temperature anomaly C_t that itself follows an arithmetic Brownian motion.

namespace optstop {

// Temperature-side parameterization: C_t has drift mu_i and volatility xi_i in
// regime i, and the damage rate is S = S0 * exp(gamma * (C - C0)).
struct TemperatureModel {
    double mu1 = 0.0;    // temperature drift before intervention (deg C/year)
    double mu2 = 0.0;    // temperature drift after intervention
    double xi1 = 0.0;    // temperature volatility before intervention
    double xi2 = 0.0;    // temperature volatility after intervention
    double gamma = 1.0;  // damage sensitivity per degree
    double C0 = 0.0;     // reference temperature (deg C)
    double S0 = 1.0;     // damage rate at the reference temperature

    // Throws std::invalid_argument naming the violated constraint.
    void validate() const;
};

// Damage-side parameterization, the one all solvers work with.
struct DamageDynamics {
    double alpha1 = 0.0;  // damage-rate drift before intervention (1/year)
    double alpha2 = 0.0;  // damage-rate drift after intervention
    double sigma1 = 0.0;  // damage-rate volatility before intervention
    double sigma2 = 0.0;  // damage-rate volatility after intervention
    double S0 = 1.0;      // damage rate at time zero (billion USD/year)
    double r = 0.0;       // discount rate (1/year); must exceed both drifts

    void validate() const;
};

// One-off intervention cost K * exp(q * t), paid at the intervention time.
struct CostSchedule {
    double K = 0.0;  // cost at time zero (billion USD)
    double q = 0.0;  // cost growth rate (1/year); q >= r is allowed and routes
                     // the solver to the immediate-action branch

    void validate() const;
};

enum class StrategyKind : std::uint8_t {
    never_act,        // let damage run forever
    immediate,        // intervene at time zero
    barrier,          // intervene when S_t first reaches H * exp(q * t)
    optimal_barrier,  // barrier at the solver's optimal level
};

// An intervention rule.  Barrier levels below the starting damage rate would
// trigger at time zero anyway, so they are normalized to immediate at
// construction.
struct Strategy {
    StrategyKind kind = StrategyKind::never_act;
    double H = 0.0;  // time-zero barrier level, meaningful for kind == barrier

    static Strategy never_act();
    static Strategy immediate();
    static Strategy barrier(double H, double S0);
    static Strategy optimal();
};

// Ito-corrected map from temperature dynamics to damage-rate GBM coefficients:
// sigma_i = xi_i * gamma, alpha_i = mu_i * gamma + sigma_i^2 / 2.  The discount
// rate is carried along so the result is a complete DamageDynamics.
DamageDynamics calibrate(const TemperatureModel& m, double r);

// S(C) = S0 * exp(gamma * (C - C0)).
double damage_rate_from_temperature(const TemperatureModel& m, double temperature);

// Inverse of the damage map: the temperature at which the damage rate reaches
// the given level.
double critical_temperature(const TemperatureModel& m, double damage_rate);

}  // namespace optstop
