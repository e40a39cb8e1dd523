#include "qcycle/model.hpp"

#include <algorithm>

namespace qcycle {

double fermi_occupation(double beta, double mu, double u) {
    if (!std::isfinite(beta) || !std::isfinite(mu) || !std::isfinite(u))
        throw std::domain_error("fermi_occupation: non-finite input");
    if (beta <= 0.0) throw std::domain_error("fermi_occupation: beta must be > 0");
    const double x = beta * (u - mu);
    if (x >= 0.0) {
        const double e = std::exp(-x);
        return e / (1.0 + e);
    }
    return 1.0 / (1.0 + std::exp(x));
}

PeriodicEnvelope::PeriodicEnvelope(double tau, std::vector<Harmonic> harmonics)
    : tau_(tau), harmonics_(std::move(harmonics)) {
    if (!(tau_ > 0.0) || !std::isfinite(tau_))
        throw ConfigError("PeriodicEnvelope: period must be positive and finite");
    std::sort(harmonics_.begin(), harmonics_.end(),
              [](const Harmonic& a, const Harmonic& b) { return a.m < b.m; });
    for (size_t i = 1; i < harmonics_.size(); ++i)
        if (harmonics_[i].m == harmonics_[i - 1].m)
            throw ConfigError("PeriodicEnvelope: duplicate harmonic index");
    for (const auto& h : harmonics_) window_ = std::max(window_, std::abs(h.m));
    // realness: hhat_{-m} = conj(hhat_m) within roundoff
    real_ = true;
    for (const auto& h : harmonics_) {
        const cxd mirrored = coeff(-h.m);
        if (std::abs(mirrored - std::conj(h.amplitude)) >
            1e-14 * (1.0 + std::abs(h.amplitude))) {
            real_ = false;
            break;
        }
    }
}

PeriodicEnvelope PeriodicEnvelope::constant(double tau, double value) {
    return PeriodicEnvelope(tau, {{0, cxd(value, 0.0)}});
}

PeriodicEnvelope PeriodicEnvelope::cosine(double tau, double mean, double amplitude) {
    return PeriodicEnvelope(tau, {{-1, cxd(amplitude / 2.0, 0.0)},
                                  {0, cxd(mean, 0.0)},
                                  {1, cxd(amplitude / 2.0, 0.0)}});
}

cxd PeriodicEnvelope::value(double t) const {
    const double w = base_frequency();
    cxd acc{0.0, 0.0};
    for (const auto& h : harmonics_)
        acc += h.amplitude * std::exp(iu * (static_cast<double>(h.m) * w * t));
    return acc;
}

cxd PeriodicEnvelope::coeff(int m) const {
    for (const auto& h : harmonics_)
        if (h.m == m) return h.amplitude;
    return cxd{0.0, 0.0};
}

double PeriodicEnvelope::power() const {
    double acc = 0.0;
    for (const auto& h : harmonics_) acc += std::norm(h.amplitude);
    return acc;
}

RadialProfile RadialProfile::power_gaussian(int exponent, double scale, double amplitude,
                                            MeasureKind measure) {
    if (exponent < 1) throw ConfigError("RadialProfile: exponent must be >= 1");
    if (!(scale > 0.0)) throw ConfigError("RadialProfile: scale must be > 0");
    if (amplitude < 0.0) throw ConfigError("RadialProfile: amplitude must be >= 0");
    RadialProfile p;
    p.kind_ = Kind::PowerGaussian;
    p.exponent_ = exponent;
    p.scale_ = scale;
    p.amplitude_ = amplitude;
    p.measure_ = measure;
    return p;
}

RadialProfile RadialProfile::tabulated(std::vector<double> u, std::vector<double> phi,
                                       MeasureKind measure) {
    if (u.size() != phi.size() || u.size() < 2)
        throw ConfigError("RadialProfile: tabulated profile needs matching u/phi arrays");
    for (size_t i = 0; i < u.size(); ++i) {
        if (i > 0 && u[i] <= u[i - 1])
            throw ConfigError("RadialProfile: tabulated u must be strictly increasing");
        if (u[i] < 0.0 || phi[i] < 0.0)
            throw ConfigError("RadialProfile: tabulated values must be nonnegative");
    }
    RadialProfile p;
    p.kind_ = Kind::Tabulated;
    p.measure_ = measure;
    p.tab_u_ = std::move(u);
    p.tab_phi_ = std::move(phi);
    return p;
}

double RadialProfile::phi(double u) const {
    const double a = std::abs(u);
    if (kind_ == Kind::PowerGaussian) {
        const double x = a / scale_;
        return amplitude_ * std::pow(x, exponent_) * std::exp(-x * x);
    }
    // linear interpolation, zero outside the table
    if (a <= tab_u_.front() || a >= tab_u_.back()) {
        if (a == tab_u_.front()) return tab_phi_.front();
        if (a == tab_u_.back()) return tab_phi_.back();
        return 0.0;
    }
    const auto it = std::upper_bound(tab_u_.begin(), tab_u_.end(), a);
    const size_t i = static_cast<size_t>(it - tab_u_.begin());
    const double t = (a - tab_u_[i - 1]) / (tab_u_[i] - tab_u_[i - 1]);
    return (1.0 - t) * tab_phi_[i - 1] + t * tab_phi_[i];
}

double RadialProfile::measure(double u) const {
    const double a = std::abs(u);
    return measure_ == MeasureKind::Flat ? 1.0 : 0.5 * std::sqrt(a);
}

double RadialProfile::support_radius() const {
    if (kind_ == Kind::Tabulated) return tab_u_.back();
    // x^n e^{-x^2} < 1e-200 for x beyond this; generous for any n <= 40
    return scale_ * (std::sqrt(std::log(1e300)) + 2.0 * std::sqrt(1.0 + exponent_));
}

double ModelSpec::period() const {
    if (reservoirs.empty()) throw ConfigError("ModelSpec: needs at least one reservoir");
    return reservoirs.front().form_factor.envelope.period();
}

cxd eval_tilde_f(const FormFactor& ff, double u, double t) {
    const double a = std::abs(u);
    const double radial = std::sqrt(ff.radial.measure(a)) * ff.radial.phi(a);
    const cxd env = ff.envelope.value(t);
    return (u >= 0.0 ? env : std::conj(env)) * radial;
}

double glued_weight(const FormFactor& ff, double beta, double mu, double u) {
    const double a = std::abs(u);
    const double rho = fermi_occupation(beta, mu, a);
    const double occ = (u >= 0.0) ? (1.0 - rho) : rho;
    const double phi = ff.radial.phi(a);
    return ff.radial.measure(a) * occ * phi * phi;
}

double sharp_weight(const FormFactor& ff, double beta, double mu, double u) {
    return glued_weight(ff, beta, mu, -u);
}

double fourier_weight(const FormFactor& ff, double beta, double mu, int m, double u) {
    const cxd c = (u >= 0.0) ? ff.envelope.coeff(m) : std::conj(ff.envelope.coeff(-m));
    const double n = std::norm(c);
    if (n == 0.0) return 0.0;
    return n * glued_weight(ff, beta, mu, u);
}

}  // namespace qcycle
