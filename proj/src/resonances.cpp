#include "qcycle/resonances.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "qcycle/pv_integral.hpp"

namespace qcycle {

namespace {

// Channel argument x_m = 2 w0 + m w: the pole reached by the m-th Fourier
// coefficient. In the k-block the same sum appears with the dummy index
// shifted (m -> m-k paired with 2 w0 - (k-m) w), so every k-block carries the
// identical channel sum and E_j^(k) - k w is k-independent exactly.
double channel_argument(const ModelSpec& model, int m) {
    return 2.0 * model.omega0 + static_cast<double>(m) * model.base_frequency();
}

}  // namespace

double fgr_width(const ModelSpec& model, int) {
    double acc = 0.0;
    for (const auto& r : model.reservoirs) {
        const int window = r.form_factor.envelope.max_harmonic();
        for (int m = -window; m <= window; ++m) {
            const double x = channel_argument(model, m);
            acc += fourier_weight(r.form_factor, r.beta, r.mu, m, x);
        }
    }
    return pi * acc;
}

double lamb_shift(const ModelSpec& model, int, double tol) {
    double acc = 0.0;
    int terms = 0;
    for (const auto& r : model.reservoirs) {
        const int window = r.form_factor.envelope.max_harmonic();
        terms += 2 * window + 1;
    }
    const double term_tol = tol / std::max(terms, 1);
    for (const auto& r : model.reservoirs) {
        const auto& ff = r.form_factor;
        const int window = ff.envelope.max_harmonic();
        const double radius = ff.radial.support_radius() + std::abs(r.mu) + 2.0;
        for (int m = -window; m <= window; ++m) {
            if (std::norm(ff.envelope.coeff(m)) == 0.0 &&
                std::norm(ff.envelope.coeff(-m)) == 0.0)
                continue;
            const double x = channel_argument(model, m);
            PVIntegrandSpec spec;
            spec.weight = [&ff, &r, m](double u) {
                return fourier_weight(ff, r.beta, r.mu, m, u);
            };
            spec.pole = x;
            spec.lo = -std::max(radius, std::abs(x) + 2.0);
            spec.hi = std::max(radius, std::abs(x) + 2.0);
            spec.tol = term_tol;
            spec.split_points = {0.0};  // glued weight has a kink at u = 0
            acc += pv_integral(spec).value;
        }
    }
    return acc;
}

double golden_rule_total_rate(const ModelSpec& model, double g, int) {
    double acc = 0.0;
    for (const auto& r : model.reservoirs) {
        const int window = r.form_factor.envelope.max_harmonic();
        for (int m = -window; m <= window; ++m) {
            const double x = channel_argument(model, m);
            acc += fourier_weight(r.form_factor, r.beta, r.mu, m, x) +
                   fourier_weight(r.form_factor, r.beta, r.mu, -m, -x);
        }
    }
    return 2.0 * pi * g * g * acc;
}

double golden_rule_steady_population(const ModelSpec& model) {
    // up rate: absorption weight w(-x); down rate: emission weight w(x)
    double up = 0.0, down = 0.0;
    for (const auto& r : model.reservoirs) {
        const int window = r.form_factor.envelope.max_harmonic();
        for (int m = -window; m <= window; ++m) {
            const double x = channel_argument(model, m);
            down += fourier_weight(r.form_factor, r.beta, r.mu, m, x);
            up += fourier_weight(r.form_factor, r.beta, r.mu, -m, -x);
        }
    }
    if (up + down <= 0.0) return 0.5;
    return up / (up + down);
}

std::array<cxd, 4> c_liouvillean_resonances(const ModelSpec& model, double g, int k,
                                            double tol) {
    const double kw = k * model.base_frequency();
    const double gap = 2.0 * model.omega0;
    if (g == 0.0) return {cxd(kw, 0), cxd(kw, 0), cxd(kw - gap, 0), cxd(kw + gap, 0)};
    const double G = fgr_width(model, k);
    const double L = lamb_shift(model, k, tol);
    const double g2 = g * g;
    return {cxd(kw, 0.0), cxd(kw, -2.0 * g2 * G), cxd(kw - gap - g2 * L, -g2 * G),
            cxd(kw + gap + g2 * L, -g2 * G)};
}

std::array<cxd, 4> standard_floquet_resonances(const ModelSpec& model, double g, int k,
                                               double tol) {
    const int n = model.n_reservoirs();
    if (n > 2) throw UnsupportedError(
        "standard_floquet_resonances: supports at most two reservoirs");
    if (n == 2 &&
        std::abs(model.reservoirs[0].mu - model.reservoirs[1].mu) > 1e-12)
        throw UnsupportedError(
            "standard_floquet_resonances: reservoirs must share one chemical potential");

    const double kw = k * model.base_frequency();
    const double gap = 2.0 * model.omega0;
    if (g == 0.0) return {cxd(kw, 0), cxd(kw, 0), cxd(kw - gap, 0), cxd(kw + gap, 0)};

    // degenerate block: B = sum_{m,i} W [[1, -e^{-b xbar/2}],[-e^{b xbar/2}, 1]],
    // eigenvalues of -i pi B are -i pi (s -+ sqrt(p q)).
    double s = 0.0, p = 0.0, q = 0.0;
    for (const auto& r : model.reservoirs) {
        const int window = r.form_factor.envelope.max_harmonic();
        for (int m = -window; m <= window; ++m) {
            const double x = channel_argument(model, m);
            const double W = fourier_weight(r.form_factor, r.beta, r.mu, m, x);
            const double xbar = x - r.mu;
            s += W;
            p += W * std::exp(-r.beta * xbar / 2.0);
            q += W * std::exp(r.beta * xbar / 2.0);
        }
    }
    const double root = std::sqrt(p * q);
    const cxd a0 = -iu * pi * (s - root);
    const cxd a1 = -iu * pi * (s + root);

    const double G = fgr_width(model, k);
    const double L = lamb_shift(model, k, tol);
    const double g2 = g * g;
    return {cxd(kw, 0) + g2 * a0, cxd(kw, 0) + g2 * a1,
            cxd(kw - gap - g2 * L, -g2 * G), cxd(kw + gap + g2 * L, -g2 * G)};
}

const ResonanceEntry& ResonanceTable::at_k(int k) const {
    for (const auto& e : entries)
        if (e.k == k) return e;
    throw StateError("ResonanceTable: no entry for requested k");
}

ResonanceTable build_resonance_table(const ModelSpec& model, LiouvilleanConvention conv,
                                     double g, int k_min, int k_max, double tol) {
    if (k_max < k_min) throw ConfigError("build_resonance_table: empty k range");
    ResonanceTable table;
    table.convention = conv;
    table.g = g;
    table.base_frequency = model.base_frequency();
    for (int k = k_min; k <= k_max; ++k) {
        ResonanceEntry e;
        e.k = k;
        e.width = fgr_width(model, k);
        e.lamb_shift = (g == 0.0) ? 0.0 : lamb_shift(model, k, tol);
        e.E = (conv == LiouvilleanConvention::CLiouvillean)
                  ? c_liouvillean_resonances(model, g, k, tol)
                  : standard_floquet_resonances(model, g, k, tol);
        table.entries.push_back(std::move(e));
    }
    return table;
}

double spectral_gap(const ResonanceTable& table) {
    if (table.entries.empty()) throw StateError("spectral_gap: empty resonance table");
    const auto& e = table.at_k(0);
    double gap = std::numeric_limits<double>::infinity();
    for (int j = 1; j < 4; ++j) gap = std::min(gap, -e.E[j].imag());
    return std::max(gap, 0.0);
}

double population_rate(const ResonanceTable& table) {
    if (table.entries.empty()) throw StateError("population_rate: empty resonance table");
    return -table.at_k(0).E[1].imag();
}

void write_csv(const ResonanceTable& table, std::ostream& os) {
    os << "convention,k,j,re_E,im_E,lamb_shift,width,g\r\n";
    const char* conv = table.convention == LiouvilleanConvention::CLiouvillean
                           ? "c_liouvillean"
                           : "standard";
    char buf[512];
    for (const auto& e : table.entries) {
        for (int j = 0; j < 4; ++j) {
            std::snprintf(buf, sizeof(buf), "%s,%d,%d,%.17g,%.17g,%.17g,%.17g,%.17g\r\n",
                          conv, e.k, j, e.E[j].real(), e.E[j].imag(), e.lamb_shift,
                          e.width, table.g);
            os << buf;
        }
    }
}

}  // namespace qcycle
