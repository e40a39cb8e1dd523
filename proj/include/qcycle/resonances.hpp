// resonances.hpp — second-order Floquet resonances E_j^(k)(g) of the driven
// two-level system: golden-rule widths, principal-value Lamb shifts, and the
// degenerate population block, for both Liouvillean conventions.

#pragma once

#include <array>
#include <iosfwd>
#include <vector>

#include "qcycle/model.hpp"

namespace qcycle {

enum class LiouvilleanConvention { CLiouvillean, StandardFloquet };

// Gamma_k = pi sum_m sum_i ||fhat_{beta_i,mu_i,m}(2 w0 - (k-m) w)||^2  (>= 0)
double fgr_width(const ModelSpec& model, int k);

// Lambda_k = sum_m sum_i PV int ||fhat_{beta_i,mu_i,m}(u)||^2 / (2 w0 - (k-m) w - u) du
double lamb_shift(const ModelSpec& model, int k, double tol = 1e-9);

// Population / coherence relaxation rates from the summed golden-rule weight
// with both glued branches, 2 pi g^2 sum_m,i |hhat_m|^2 J_i(x_{k,m}); this is
// the decay rate seen by gauge-invariant one-body observables.
double golden_rule_total_rate(const ModelSpec& model, double g, int k = 0);

// Steady excited-state population from golden-rule up/down rate balance.
double golden_rule_steady_population(const ModelSpec& model);

// E_j^(k)(g), j = 0..3, C-Liouvillean convention:
//   E_0 = kw, E_1 = kw - 2i g^2 Gamma_k,
//   E_2 = kw - 2 w0 - g^2 Lambda_k - i g^2 Gamma_k,
//   E_3 = kw + 2 w0 + g^2 Lambda_k - i g^2 Gamma_k.   O(g^4) omitted.
std::array<cxd, 4> c_liouvillean_resonances(const ModelSpec& model, double g, int k,
                                            double tol = 1e-9);

// Standard Floquet convention; requires one reservoir, or two with equal mu.
// E_{2,3} as above; E_{0,1} = kw + g^2 a_{0,1} with a_{0,1} the eigenvalues of
// -i pi sum_{m,i} W_i(x_{k,m}) [[1, -e^{-beta_i xbar/2}], [-e^{beta_i xbar/2}, 1]].
std::array<cxd, 4> standard_floquet_resonances(const ModelSpec& model, double g, int k,
                                               double tol = 1e-9);

struct ResonanceEntry {
    int k = 0;
    std::array<cxd, 4> E{};
    double lamb_shift = 0.0;  // Lambda_k
    double width = 0.0;       // Gamma_k
};

struct ResonanceTable {
    LiouvilleanConvention convention = LiouvilleanConvention::CLiouvillean;
    double g = 0.0;
    double base_frequency = 0.0;
    std::vector<ResonanceEntry> entries;  // ordered by k

    const ResonanceEntry& at_k(int k) const;
};

ResonanceTable build_resonance_table(const ModelSpec& model, LiouvilleanConvention conv,
                                     double g, int k_min, int k_max, double tol = 1e-9);

// gamma = min_{j=1..3} -Im E_j^(0); per-cycle contraction factor e^{-gamma tau}
double spectral_gap(const ResonanceTable& table);

// -Im E_1^(0): width of the population resonance, the slowest mode that
// gauge-invariant stroboscopic observables couple to.
double population_rate(const ResonanceTable& table);

void write_csv(const ResonanceTable& table, std::ostream& os);

}  // namespace qcycle
