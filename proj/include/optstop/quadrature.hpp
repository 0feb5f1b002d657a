#pragma once

#include <cmath>
#include <stdexcept>

// Adaptive Simpson integration, used to normalize and take moments of the
// hitting-time density.  Plain recursive bisection with the standard
// Richardson error estimate.

namespace optstop {

namespace detail {

template <typename F>
double simpson_recurse(const F& f, double a, double b, double fa, double fm, double fb,
                       double whole, double tol, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m);
    double rm = 0.5 * (m + b);
    double flm = f(lm);
    double frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
        return left + right + delta / 15.0;
    }
    return simpson_recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

// Integrate f over [a, b] to roughly the requested absolute tolerance.
template <typename F>
double integrate(const F& f, double a, double b, double abs_tol = 1e-8) {
    if (!(b >= a)) throw std::invalid_argument("integrate requires b >= a");
    if (a == b) return 0.0;
    double m = 0.5 * (a + b);
    double fa = f(a);
    double fm = f(m);
    double fb = f(b);
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::simpson_recurse(f, a, b, fa, fm, fb, whole, abs_tol, 60);
}

}  // namespace optstop
