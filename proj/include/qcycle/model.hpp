// model.hpp — physical model definition: drive envelopes, radial profiles,
// form factors, reservoirs, and the spectral-kernel functions built on them.

#pragma once

#include <cmath>
#include <vector>

#include "qcycle/common.hpp"

namespace qcycle {

// Fermi-Dirac occupation 1/(e^{beta(u-mu)}+1), overflow-safe for large |beta(u-mu)|.
double fermi_occupation(double beta, double mu, double u);

struct Harmonic {
    int m = 0;
    cxd amplitude{0.0, 0.0};
};

// Periodic drive h(t) = sum_m hhat_m e^{i m w t} with a finite symmetric
// harmonic window. The base frequency is derived from tau, never stored.
class PeriodicEnvelope {
  public:
    PeriodicEnvelope() : PeriodicEnvelope(1.0, {{0, cxd(1.0, 0.0)}}) {}
    PeriodicEnvelope(double tau, std::vector<Harmonic> harmonics);

    static PeriodicEnvelope constant(double tau, double value = 1.0);
    // mean + amplitude*cos(w t)
    static PeriodicEnvelope cosine(double tau, double mean, double amplitude);

    double period() const { return tau_; }
    double base_frequency() const { return 2.0 * pi / tau_; }
    int max_harmonic() const { return window_; }
    bool is_real() const { return real_; }

    cxd value(double t) const;
    cxd coeff(int m) const;
    // sum_m |hhat_m|^2
    double power() const;

    const std::vector<Harmonic>& harmonics() const { return harmonics_; }

  private:
    double tau_;
    std::vector<Harmonic> harmonics_;  // sorted by m, unique
    int window_ = 0;
    bool real_ = false;
};

enum class MeasureKind { Flat, HalfSqrt };  // m(u) = 1 or m(u) = sqrt(u)/2

// Radial part phi(u) of a separable form factor, with the reservoir measure
// density m(u). Evaluation always goes through |u| (even extension).
class RadialProfile {
  public:
    enum class Kind { PowerGaussian, Tabulated };

    // phi(u) = amplitude * (u/scale)^exponent * exp(-(u/scale)^2), u >= 0
    static RadialProfile power_gaussian(int exponent, double scale, double amplitude,
                                        MeasureKind measure = MeasureKind::Flat);
    static RadialProfile tabulated(std::vector<double> u, std::vector<double> phi,
                                   MeasureKind measure = MeasureKind::Flat);

    double phi(double u) const;      // phi(|u|)
    double measure(double u) const;  // m(|u|)
    // radius beyond which phi is negligible (integration cutoff)
    double support_radius() const;

    Kind kind() const { return kind_; }
    int exponent() const { return exponent_; }
    double scale() const { return scale_; }
    double amplitude() const { return amplitude_; }
    MeasureKind measure_kind() const { return measure_; }
    const std::vector<double>& table_u() const { return tab_u_; }
    const std::vector<double>& table_phi() const { return tab_phi_; }

  private:
    Kind kind_ = Kind::PowerGaussian;
    int exponent_ = 2;
    double scale_ = 1.0;
    double amplitude_ = 1.0;
    MeasureKind measure_ = MeasureKind::Flat;
    std::vector<double> tab_u_, tab_phi_;
};

// Separable form factor f(u,t) = h(t) * phi(u).
struct FormFactor {
    PeriodicEnvelope envelope;
    RadialProfile radial;
};

struct ReservoirSpec {
    double beta = 1.0;  // inverse temperature, finite and > 0
    double mu = 0.0;    // chemical potential
    FormFactor form_factor;
};

// Diagonal density record for the two-level system.
struct SystemState {
    double excited_population = 0.5;  // trace state by default
};

struct ModelSpec {
    double omega0 = 0.5;  // half-gap; level splitting is 2*omega0
    double g = 0.0;       // coupling constant
    std::vector<ReservoirSpec> reservoirs;
    SystemState initial_state;

    double period() const;
    double base_frequency() const { return 2.0 * pi / period(); }
    int n_reservoirs() const { return static_cast<int>(reservoirs.size()); }
};

// tilde-f(u,t): h(t) sqrt(m(|u|)) phi(|u|) for u >= 0; the u < 0 branch
// conjugates the envelope.
cxd eval_tilde_f(const FormFactor& ff, double u, double t);

// Glued radial weight w_{beta,mu}(u) with the envelope factored out:
//   u >= 0:  m(u) (1 - rho(u)) phi(u)^2
//   u <  0:  m(-u) rho(-u) phi(-u)^2
double glued_weight(const FormFactor& ff, double beta, double mu, double u);

// ||f^#_{beta,mu}(u)||^2 = ||f_{beta,mu}(-u)||^2 (radial part).
double sharp_weight(const FormFactor& ff, double beta, double mu, double u);

// ||fhat_{beta,mu,m}(u)||^2. Real envelopes: |hhat_m|^2 w(u); the u < 0
// branch uses conj-reflected coefficients |hhat_{-m}|^2.
double fourier_weight(const FormFactor& ff, double beta, double mu, int m, double u);

}  // namespace qcycle
