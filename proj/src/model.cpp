#include "optstop/model.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace optstop {

namespace {

[[noreturn]] void fail(const std::string& what) {
    throw std::invalid_argument(what);
}

void require_finite(double x, const char* name) {
    if (!std::isfinite(x)) {
        std::ostringstream os;
        os << name << " must be finite (got " << x << ")";
        fail(os.str());
    }
}

}  // namespace

void TemperatureModel::validate() const {
    require_finite(mu1, "mu1");
    require_finite(mu2, "mu2");
    require_finite(xi1, "xi1");
    require_finite(xi2, "xi2");
    require_finite(gamma, "gamma");
    require_finite(C0, "C0");
    require_finite(S0, "S0");
    if (gamma <= 0.0) fail("gamma must be positive");
    if (xi1 < 0.0 || xi2 < 0.0) fail("temperature volatilities must be non-negative");
    if (S0 <= 0.0) fail("S0 must be positive");
    if (mu2 > mu1) fail("mu2 must not exceed mu1 (intervention cannot raise the drift)");
    if (xi2 > xi1) fail("xi2 must not exceed xi1 (intervention cannot raise the volatility)");
}

void DamageDynamics::validate() const {
    require_finite(alpha1, "alpha1");
    require_finite(alpha2, "alpha2");
    require_finite(sigma1, "sigma1");
    require_finite(sigma2, "sigma2");
    require_finite(S0, "S0");
    require_finite(r, "r");
    if (!(r > alpha1)) fail("r must exceed alpha1 (discounted damage must converge)");
    if (!(alpha1 > alpha2)) fail("alpha1 must exceed alpha2 (intervention must lower the drift)");
    if (sigma1 < 0.0 || sigma2 < 0.0) fail("volatilities must be non-negative");
    if (sigma2 > sigma1) fail("sigma2 must not exceed sigma1");
    if (S0 <= 0.0) fail("S0 must be positive");
}

void CostSchedule::validate() const {
    require_finite(K, "K");
    require_finite(q, "q");
    if (K <= 0.0) fail("K must be positive");
}

Strategy Strategy::never_act() { return {StrategyKind::never_act, 0.0}; }

Strategy Strategy::immediate() { return {StrategyKind::immediate, 0.0}; }

Strategy Strategy::barrier(double H, double S0) {
    require_finite(H, "barrier level");
    if (H <= 0.0) fail("barrier level must be positive");
    if (H < S0) return immediate();  // would trigger at time zero anyway
    return {StrategyKind::barrier, H};
}

Strategy Strategy::optimal() { return {StrategyKind::optimal_barrier, 0.0}; }

DamageDynamics calibrate(const TemperatureModel& m, double r) {
    m.validate();
    require_finite(r, "r");
    DamageDynamics d;
    d.sigma1 = m.xi1 * m.gamma;
    d.sigma2 = m.xi2 * m.gamma;
    d.alpha1 = m.mu1 * m.gamma + 0.5 * d.sigma1 * d.sigma1;
    d.alpha2 = m.mu2 * m.gamma + 0.5 * d.sigma2 * d.sigma2;
    d.S0 = m.S0;
    d.r = r;
    d.validate();
    return d;
}

double damage_rate_from_temperature(const TemperatureModel& m, double temperature) {
    m.validate();
    require_finite(temperature, "temperature");
    return m.S0 * std::exp(m.gamma * (temperature - m.C0));
}

double critical_temperature(const TemperatureModel& m, double damage_rate) {
    m.validate();
    require_finite(damage_rate, "damage rate");
    if (damage_rate <= 0.0) fail("damage rate must be positive");
    return m.C0 + std::log(damage_rate / m.S0) / m.gamma;
}

}  // namespace optstop
