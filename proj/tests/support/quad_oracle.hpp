// quad_oracle.hpp — brute-force quadrature oracle, independent of the
// adaptive implementation: composite Simpson with singularity subtraction.

#pragma once

#include <cmath>
#include <functional>

namespace qcycle::testing {

// PV int_lo^hi W(u)/(E-u) du on a fixed n-node Simpson grid (n odd).
inline double pv_brute_force(const std::function<double(double)>& W, double E, double lo,
                             double hi, long n = 1000001) {
    if (n % 2 == 0) ++n;
    const double h = (hi - lo) / (n - 1);
    const double WE = (E > lo && E < hi) ? W(E) : 0.0;
    auto g = [&](double u) {
        const double d = E - u;
        if (std::abs(d) < 1e-13 * (1.0 + std::abs(E))) {
            const double eps = 1e-6 * (1.0 + std::abs(E));
            return (W(E - eps) - W(E + eps)) / (2.0 * eps);
        }
        if (E > lo && E < hi) return (W(u) - WE) / d;
        return W(u) / d;
    };
    double acc = g(lo) + g(hi);
    for (long k = 1; k + 1 < n; ++k) acc += g(lo + k * h) * (k % 2 == 1 ? 4.0 : 2.0);
    double val = acc * h / 3.0;
    if (E > lo && E < hi) val += WE * std::log((E - lo) / (hi - E));
    return val;
}

}  // namespace qcycle::testing
