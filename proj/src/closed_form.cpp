#include "optstop/closed_form.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "optstop/quadrature.hpp"

namespace optstop {

namespace {

[[noreturn]] void domain_fail(const std::string& what) {
    throw std::domain_error(what);
}

double log_drift(const DamageDynamics& dyn, const CostSchedule& cost) {
    return dyn.alpha1 - cost.q - 0.5 * dyn.sigma1 * dyn.sigma1;
}

// Damage-swap factor: pv difference per unit of S when switching regimes.
double swap_slope(const DamageDynamics& dyn) {
    return (dyn.alpha1 - dyn.alpha2) / ((dyn.r - dyn.alpha1) * (dyn.r - dyn.alpha2));
}

// Deterministic (sigma = 0) expected discounted damage of acting at tau_star.
double deterministic_value(const DamageDynamics& dyn, const CostSchedule& cost, double tau_star) {
    double s_at = dyn.S0 * std::exp(dyn.alpha1 * tau_star);
    double pre = dyn.S0 * (1.0 - std::exp((dyn.alpha1 - dyn.r) * tau_star)) / (dyn.r - dyn.alpha1);
    double post = std::exp(-dyn.r * tau_star) *
                  (s_at / (dyn.r - dyn.alpha2) + cost.K * std::exp(cost.q * tau_star));
    return pre + post;
}

}  // namespace

double pv_no_action(const DamageDynamics& dyn, double S) {
    dyn.validate();
    if (!(S > 0.0) || !std::isfinite(S)) domain_fail("pv_no_action requires S > 0");
    return S / (dyn.r - dyn.alpha1);
}

double pv_with_action(const DamageDynamics& dyn, const CostSchedule& cost, double S, double t) {
    dyn.validate();
    cost.validate();
    if (!(S > 0.0) || !std::isfinite(S)) domain_fail("pv_with_action requires S > 0");
    if (!std::isfinite(t)) domain_fail("pv_with_action requires finite t");
    return S / (dyn.r - dyn.alpha2) + cost.K * std::exp(cost.q * t);
}

CharacteristicRoots characteristic_roots(const DamageDynamics& dyn, const CostSchedule& cost) {
    dyn.validate();
    cost.validate();
    if (dyn.sigma1 <= 0.0)
        domain_fail("characteristic roots need sigma1 > 0 (degenerate volatility)");
    if (!(cost.q < dyn.r)) domain_fail("characteristic roots need q < r");

    // a x^2 + b x + c with a = sigma1^2/2, b = (alpha1 - q) - a, c = -(r - q).
    double a = 0.5 * dyn.sigma1 * dyn.sigma1;
    double b = (dyn.alpha1 - cost.q) - a;
    double c = -(dyn.r - cost.q);
    // c < 0, so the discriminant is positive and the roots straddle zero.
    double disc = b * b - 4.0 * a * c;
    double s = std::sqrt(disc);
    // Cancellation-free: form the half-sum with matching signs, then divide.
    double u = -0.5 * (b + std::copysign(s, b));
    double x1 = u / a;
    double x2 = c / u;
    CharacteristicRoots roots;
    roots.eps = std::max(x1, x2);
    roots.eps_tilde = std::min(x1, x2);
    return roots;
}

ClosedFormSolution optimal_barrier(const DamageDynamics& dyn, const CostSchedule& cost) {
    dyn.validate();
    cost.validate();

    ClosedFormSolution sol;
    sol.nu = log_drift(dyn, cost);

    if (cost.q >= dyn.r) {
        // Cost growth cancels (or beats) discounting: waiting never reduces
        // the bill, so the solved rule is to act at once.
        sol.branch = SolutionBranch::immediate_optimal;
        sol.V0 = pv_with_action(dyn, cost, dyn.S0, 0.0);
        sol.expected_tau = 0.0;
        return sol;
    }

    if (dyn.sigma1 == 0.0) {
        // Noise-free limit: the barrier rule degenerates to a fixed date.
        DeterministicSolution det = deterministic_solution(dyn, cost);
        sol.eps = (dyn.r - cost.q) / (dyn.alpha1 - cost.q);
        sol.H_star = dyn.S0 * std::exp((dyn.alpha1 - cost.q) * det.tau_star);
        sol.expected_tau = det.tau_star;
        sol.V0 = deterministic_value(dyn, cost, det.tau_star);
        sol.branch = det.tau_star > 0.0 ? SolutionBranch::interior
                                        : SolutionBranch::immediate_optimal;
        return sol;
    }

    CharacteristicRoots roots = characteristic_roots(dyn, cost);
    sol.eps = roots.eps;
    sol.eps_tilde = roots.eps_tilde;

    double h = roots.eps * (dyn.r - dyn.alpha1) * (dyn.r - dyn.alpha2) * cost.K /
               ((roots.eps - 1.0) * (dyn.alpha1 - dyn.alpha2));
    sol.H_star = h;

    if (h <= dyn.S0) {
        sol.branch = SolutionBranch::immediate_optimal;
        sol.V0 = pv_with_action(dyn, cost, dyn.S0, 0.0);
        sol.expected_tau = 0.0;
        return sol;
    }

    sol.branch = SolutionBranch::interior;
    sol.coeff = (cost.K - h * swap_slope(dyn)) * std::exp(-roots.eps * std::log(h));
    sol.V0 = value_function(dyn, cost, h, dyn.S0, 0.0);
    if (sol.nu > 0.0) sol.expected_tau = std::log(h / dyn.S0) / sol.nu;
    return sol;
}

double value_function(const DamageDynamics& dyn, const CostSchedule& cost, double H, double S,
                      double t) {
    dyn.validate();
    cost.validate();
    if (!(H > 0.0) || !std::isfinite(H)) domain_fail("value_function requires H > 0");
    if (!(S > 0.0) || !std::isfinite(S)) domain_fail("value_function requires S > 0");
    if (!std::isfinite(t)) domain_fail("value_function requires finite t");
    if (!(cost.q < dyn.r)) domain_fail("value_function requires q < r");

    double y = S * std::exp(-cost.q * t);
    if (y > H) {
        std::ostringstream os;
        os << "state outside the continuation region: Y = " << y << " > H = " << H
           << " (use pv_with_action)";
        domain_fail(os.str());
    }
    CharacteristicRoots roots = characteristic_roots(dyn, cost);
    // (Y/H)^eps stays in [0, 1]; evaluated via exp/log so huge H cannot overflow.
    double ratio_pow = std::exp(roots.eps * std::log(y / H));
    double q_value = ratio_pow * (cost.K - H * swap_slope(dyn)) + y / (dyn.r - dyn.alpha1);
    return std::exp(cost.q * t) * q_value;
}

DeterministicSolution deterministic_solution(const DamageDynamics& dyn, const CostSchedule& cost) {
    dyn.validate();
    cost.validate();
    if (!(cost.q < dyn.alpha1))
        domain_fail("deterministic solution requires q < alpha1 (damage growth must outpace cost growth)");

    double arg = cost.K * (dyn.r - cost.q) * (dyn.r - dyn.alpha2) /
                 (dyn.S0 * (dyn.alpha1 - dyn.alpha2));
    if (arg <= 1.0) return {0.0, dyn.S0};  // acting at once is already optimal
    double tau = std::log(arg) / (dyn.alpha1 - cost.q);
    double s_star = dyn.S0 * std::exp(dyn.alpha1 * tau);
    return {tau, s_star};
}

double hitting_time_density(const DamageDynamics& dyn, const CostSchedule& cost, double H,
                            double tau) {
    dyn.validate();
    cost.validate();
    if (dyn.sigma1 <= 0.0) domain_fail("hitting-time density requires sigma1 > 0");
    double nu = log_drift(dyn, cost);
    if (!(nu > 0.0)) domain_fail("hitting-time density requires positive detrended drift nu");
    if (!(H > dyn.S0)) domain_fail("hitting-time density requires H > S0");
    if (!(tau >= 0.0) || !std::isfinite(tau)) domain_fail("hitting-time density requires tau >= 0");
    if (tau == 0.0) return 0.0;

    double b = std::log(H / dyn.S0);
    double dev = b - nu * tau;
    // Assembled in log space so tiny tau underflows cleanly to zero.
    double log_g = std::log(b) - std::log(dyn.sigma1) - 1.5 * std::log(tau) -
                   0.5 * std::log(2.0 * M_PI) -
                   dev * dev / (2.0 * dyn.sigma1 * dyn.sigma1 * tau);
    return std::exp(log_g);
}

double expected_hitting_time(const DamageDynamics& dyn, const CostSchedule& cost, double H) {
    dyn.validate();
    cost.validate();
    double nu = log_drift(dyn, cost);
    if (!(nu > 0.0)) domain_fail("expected hitting time requires positive detrended drift nu");
    if (!(H >= dyn.S0)) domain_fail("expected hitting time requires H >= S0");
    return std::log(H / dyn.S0) / nu;
}

double hitting_time_integral(const DamageDynamics& dyn, const CostSchedule& cost, double H,
                             double t_hi, int moment) {
    if (moment != 0 && moment != 1)
        throw std::invalid_argument("hitting-time integral supports moments 0 and 1 only");
    if (!(t_hi > 0.0) || !std::isfinite(t_hi))
        throw std::invalid_argument("hitting-time integral needs a finite positive upper end");
    hitting_time_density(dyn, cost, H, 0.0);  // runs the full guard set

    double b = std::log(H / dyn.S0);
    double nu = log_drift(dyn, cost);
    double mean = b / nu;
    double sd = std::sqrt(b) * dyn.sigma1 / (nu * std::sqrt(nu));
    // Mode of the inverse Gaussian law, where the density peaks.
    double ratio = 1.5 * dyn.sigma1 * dyn.sigma1 / (b * nu);
    double mode = mean * (std::sqrt(1.0 + ratio * ratio) - ratio);

    // Plain adaptive quadrature on [0, t_hi] can miss a narrow peak entirely,
    // so split at landmarks of the law and integrate each piece.
    std::vector<double> cuts = {0.0,           0.5 * mode,      mode,
                                2.0 * mode,    mean,            mean + 2.0 * sd,
                                mean + 8.0 * sd, mean + 20.0 * sd, t_hi};
    std::sort(cuts.begin(), cuts.end());
    auto f = [&](double tau) {
        double g = hitting_time_density(dyn, cost, H, tau);
        return moment == 0 ? g : tau * g;
    };
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        double a = std::clamp(cuts[i], 0.0, t_hi);
        double c = std::clamp(cuts[i + 1], 0.0, t_hi);
        if (c > a) total += integrate(f, a, c, 1e-11);
    }
    return total;
}

}  // namespace optstop
