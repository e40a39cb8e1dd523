#include "qcycle/validate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qcycle {

namespace {

// |phi(u + i theta)|^2 for the power-Gaussian family, continued analytically:
// |u+i theta|^{2n} e^{-2(u^2-theta^2)/s^2} * A^2 / s^{2n}
double continued_phi_sq(const RadialProfile& p, double u, double theta) {
    const double s = p.scale();
    const double r2 = (u * u + theta * theta) / (s * s);
    return p.amplitude() * p.amplitude() * std::pow(r2, p.exponent()) *
           std::exp(-2.0 * (u * u - theta * theta) / (s * s));
}

}  // namespace

AssumptionReport validate_assumptions(const ModelSpec& model, double delta, int grid) {
    AssumptionReport rep;
    if (model.reservoirs.empty()) throw ConfigError("validate_assumptions: no reservoirs");

    // (A1) shared minimal period
    const double tau = model.reservoirs.front().form_factor.envelope.period();
    rep.a1_shared_period = true;
    for (const auto& r : model.reservoirs) {
        const double ti = r.form_factor.envelope.period();
        if (std::abs(ti - tau) > 1e-12 * tau) rep.a1_shared_period = false;
    }
    if (!rep.a1_shared_period) rep.failures.push_back("A1: reservoir envelopes disagree on the period");

    // (A2) sampled finiteness of int ||e^{-beta u/2} f_{beta,mu}(u+i theta)||^2 du
    // over a grid of |theta| < min(delta, pi/beta_i). Power-Gaussian profiles with
    // exponent >= 2 are in the Hardy class by construction; the scan is a sanity
    // check. Tabulated profiles cannot be continued and are flagged unverifiable.
    bool any_tab = false;
    bool a2_finite = true;
    double a2_sup = 0.0;
    for (const auto& r : model.reservoirs) {
        const auto& prof = r.form_factor.radial;
        if (prof.kind() == RadialProfile::Kind::Tabulated) {
            any_tab = true;
            continue;
        }
        const double strip = 0.95 * std::min(delta, pi / r.beta);
        const double umax = prof.support_radius() + std::abs(r.mu) + 5.0;
        const int nu = std::max(grid, 16);
        const double du = 2.0 * umax / nu;
        const double env_power = r.form_factor.envelope.power();
        for (int it = 0; it <= 8; ++it) {
            const double theta = strip * it / 8.0;
            double integral = 0.0;
            for (int k = 0; k <= nu; ++k) {
                const double u = -umax + k * du;
                // occupation factors are bounded by 1 on the strip interior
                const double damp = std::exp(-r.beta * u);
                const double meas = prof.measure(std::abs(u));
                const double val =
                    damp * meas * continued_phi_sq(prof, std::abs(u), theta) * env_power;
                integral += val * du;
                if (!std::isfinite(val)) a2_finite = false;
            }
            if (!std::isfinite(integral)) a2_finite = false;
            a2_sup = std::max(a2_sup, integral);
        }
    }
    rep.a2_sup = a2_sup;
    if (!a2_finite) {
        rep.a2 = A2Status::Fail;
        rep.failures.push_back("A2: sampled strip integral diverges");
    } else if (any_tab) {
        rep.a2 = A2Status::Unverifiable;
    } else {
        rep.a2 = A2Status::Pass;
    }

    // (A3) sum_i ||tilde f_i(2 w0, t)||^2 > 0 over one period
    const double gap = 2.0 * model.omega0;
    int max_window = 1;
    for (const auto& r : model.reservoirs)
        max_window = std::max(max_window, r.form_factor.envelope.max_harmonic());
    const int nt = std::max(grid, 8 * max_window + 9);
    double peak = 0.0;
    for (int k = 0; k < nt; ++k) {
        const double t = tau * k / nt;
        double s = 0.0;
        for (const auto& r : model.reservoirs)
            s += std::norm(eval_tilde_f(r.form_factor, gap, t));
        peak = std::max(peak, s);
    }
    rep.a3_peak = peak;
    rep.a3_fgr_positive = peak > 0.0;
    if (!rep.a3_fgr_positive)
        rep.failures.push_back("A3: golden-rule coupling vanishes at the gap 2*omega0");

    // Parseval tail: sum_m ||fhat_m(u+mw)||^2 finite on a grid (exact for the
    // finite harmonic window; checked for non-finite values anyway)
    const double w = 2.0 * pi / tau;
    bool pars_ok = true;
    double pars_peak = 0.0;
    for (const auto& r : model.reservoirs) {
        const double umax = r.form_factor.radial.support_radius();
        for (int k = -grid; k <= grid; ++k) {
            const double u = umax * k / grid;
            double s = 0.0;
            for (int m = -r.form_factor.envelope.max_harmonic();
                 m <= r.form_factor.envelope.max_harmonic(); ++m)
                s += fourier_weight(r.form_factor, r.beta, r.mu, m, u + m * w);
            if (!std::isfinite(s)) pars_ok = false;
            pars_peak = std::max(pars_peak, s);
        }
    }
    rep.parseval_finite = pars_ok;
    rep.parseval_peak = pars_peak;
    if (!pars_ok) rep.failures.push_back("Parseval: shifted Fourier-weight sum is not finite");

    return rep;
}

std::string to_string(const AssumptionReport& rep) {
    std::ostringstream os;
    os << "A1 shared period: " << (rep.a1_shared_period ? "pass" : "FAIL") << "\n";
    os << "A2 regularity: "
       << (rep.a2 == A2Status::Pass ? "pass"
                                    : (rep.a2 == A2Status::Unverifiable ? "unverifiable"
                                                                        : "FAIL"))
       << " (sampled sup " << rep.a2_sup << ")\n";
    os << "A3 golden rule: " << (rep.a3_fgr_positive ? "pass" : "FAIL") << " (peak "
       << rep.a3_peak << ")\n";
    os << "Parseval tail: " << (rep.parseval_finite ? "pass" : "FAIL") << " (peak "
       << rep.parseval_peak << ")\n";
    return os.str();
}

}  // namespace qcycle
