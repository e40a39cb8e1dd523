// dynamics.hpp — time evolution of the one-body covariance matrix and the
// per-sample observables (energies, fluxes, relative entropy, entropy
// production rate) built from it.

#pragma once

#include <Eigen/Dense>
#include <vector>

#include "qcycle/discretization.hpp"

namespace qcycle {

// One-body correlation matrix, G(p,q) = <a_q^dag a_p>; Hermitian, 0 <= G <= 1.
struct CovarianceState {
    Eigen::MatrixXcd G;
    double time = 0.0;

    double hermiticity_defect() const;
    double trace() const;
    // smallest / largest eigenvalue (dense, for containment checks)
    std::pair<double, double> eigenvalue_range() const;
};

// Thermal product state: impurity at the configured excited population,
// reservoir modes at their Fermi occupations.
CovarianceState thermal_covariance(const DiscretizedModel& dm);
CovarianceState thermal_covariance(const DiscretizedModel& dm, const SystemState& state);

struct IntegratorOptions {
    int steps_per_cycle = 512;
    double unitarity_tol = 1e-10;
    int max_halvings = 8;
};

// Midpoint-exponential stepper for the one-body propagator. Applies
// exp(-i h(t+dt/2) dt) to the columns of a matrix via a scaled Taylor
// expansion; each application is checked on a probe vector and the step is
// halved on unitarity defects.
class StepPropagator {
  public:
    StepPropagator(const DiscretizedModel& dm, IntegratorOptions opts = {});

    // advance X <- U(t0 -> t0+dt) X
    void step(Eigen::MatrixXcd& X, double t0, double dt) const;
    // advance across [t0, t1] in uniform steps of at most dt
    void advance(Eigen::MatrixXcd& X, double t0, double t1, double dt) const;
    // U(t0 -> t0 + tau) over one drive period
    Eigen::MatrixXcd one_cycle_propagator(double t0 = 0.0) const;

    const DiscretizedModel& model() const { return *dm_; }
    const IntegratorOptions& options() const { return opts_; }

  private:
    void apply_exponential(Eigen::MatrixXcd& X, double tmid, double dt) const;
    double probe_defect(double tmid, double dt) const;

    const DiscretizedModel* dm_;
    IntegratorOptions opts_;
    double hnorm_bound_;
};

// Gamma(t1) = U Gamma(t0) U^dag with U the midpoint-exponential propagator.
CovarianceState propagate_covariance(const DiscretizedModel& dm, const CovarianceState& s,
                                     double t0, double t1, double dt,
                                     const IntegratorOptions& opts = {});

// ---- observables -----------------------------------------------------------

// E_i(t) = sum_{j in R_i} u_j G_jj
double reservoir_energy(const DiscretizedModel& dm, const Eigen::MatrixXcd& G, int i);
double reservoir_number(const DiscretizedModel& dm, const Eigen::MatrixXcd& G, int i);

// Phi_i(t) = -d<H_i>/dt = i tr([D_i, h(t)] G) = -2 sum_j u_j Im(conj(lambda_j) G_0j)
double heat_flux(const DiscretizedModel& dm, const Eigen::MatrixXcd& G, double t, int i);
// particle flux -d<N_i>/dt
double number_flux(const DiscretizedModel& dm, const Eigen::MatrixXcd& G, double t, int i);

// Sampled trajectory row.
struct Sample {
    double t = 0.0;
    bool cycle_boundary = false;
    int cycle_index = 0;
    Eigen::VectorXd reservoir_E, reservoir_N, flux, number_flux_v;
    double impurity_population = 0.0;
    double entropy = 0.0;   // Ent(t), closed form
    double ep_rate = 0.0;   // Ep(t) = -sum_i beta_i Phi_i^eff
};

struct Trajectory {
    double tau = 0.0;
    int reservoirs = 0;
    Eigen::VectorXd beta, mu;
    Eigen::VectorXd E0, N0;   // reference energies/numbers at t = 0
    double entropy_offset = 0.0;  // KL(rho_S(0) || trace state)
    std::vector<Sample> samples;

    const Sample& at_time(double t) const;
    const Sample& boundary(int cycle) const;  // sample at t = cycle * tau
    int complete_cycles() const;
};

// Ent(t) = sum_i beta_i [(E_i - E_i(0)) - mu_i (N_i - N_i(0))] + offset
double relative_entropy(const Trajectory& traj, double t);
double entropy_production_rate(const Trajectory& traj, double t);
double heat_flux(const Trajectory& traj, int i, double t);

// entropy fields for a freshly computed sample
void finalize_sample(const Trajectory& traj, Sample& s);

// KL(diag(p,1-p) || diag(1/2,1/2))
double system_state_entropy_offset(const SystemState& state);

// time average (1/(n tau)) int_0^{n tau} x dt over the largest complete n,
// trapezoidal on the sampled grid
double cesaro_average(const Trajectory& traj,
                      const std::function<double(const Sample&)>& observable);

}  // namespace qcycle
