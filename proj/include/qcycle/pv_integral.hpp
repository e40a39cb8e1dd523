// pv_integral.hpp — Cauchy principal-value integrals by singularity
// subtraction plus adaptive Gauss-Kronrod quadrature.

#pragma once

#include <functional>

#include "qcycle/common.hpp"

namespace qcycle {

struct PVIntegrandSpec {
    std::function<double(double)> weight;  // W(u), continuous at the pole
    double pole = 0.0;                     // E
    double lo = -1.0;
    double hi = 1.0;
    double tol = 1e-9;  // absolute
    int max_intervals = 20000;
    // extra interior points the adaptive pass should split at (kinks etc.)
    std::vector<double> split_points;
};

struct PVResult {
    double value = 0.0;
    double error_estimate = 0.0;
    long evaluations = 0;
};

// PV int_lo^hi W(u)/(E-u) du.
//   = int (W(u)-W(E))/(E-u) du  +  W(E) log((E-lo)/(hi-E))   for lo < E < hi,
// the regularized part handled by adaptive GK15. Throws QuadratureError when
// the tolerance cannot be met.
PVResult pv_integral(const PVIntegrandSpec& spec);

// Ordinary adaptive integral (same machinery, no pole).
PVResult integrate_adaptive(const std::function<double(double)>& f, double lo, double hi,
                            double tol, const std::vector<double>& splits = {},
                            int max_intervals = 20000);

}  // namespace qcycle
