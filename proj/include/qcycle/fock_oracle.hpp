// fock_oracle.hpp — exact many-body reference dynamics on the 2^N Fock space,
// built from the literal spin model (Pauli operators tensor fermion modes),
// independent of the quadratic covariance path.

#pragma once

#include <Eigen/Dense>
#include <vector>

#include "qcycle/discretization.hpp"

namespace qcycle {

// Density matrix on the 2^N space (oracle only, N <= 14).
struct FockState {
    Eigen::MatrixXcd rho;
    double time = 0.0;

    double hermiticity_defect() const;
    double trace_defect() const;       // |tr rho - 1|
    double min_eigenvalue() const;
};

class FockOracle {
  public:
    explicit FockOracle(const DiscretizedModel& dm, int steps_per_cycle = 512);

    // advance the cumulative many-body propagator across [t0, t1]
    void advance(double t0, double t1);
    double time() const { return t_; }

    // observables against the initial thermal product state
    double impurity_population() const;
    double reservoir_energy(int i) const;
    double reservoir_number(int i) const;

    // U rho0 U^dag (materializes the 2^N x 2^N density matrix)
    Eigen::MatrixXcd density_matrix() const;
    // Tr(rho_t log rho_t - rho_t log rho_ref) by dense eigendecomposition,
    // rho_ref = trace state (x) thermal reservoirs
    double relative_entropy_direct() const;

    // cumulative many-body propagator built so far
    const Eigen::MatrixXcd& propagator() const { return U_; }

    int dim() const { return dim_; }

  private:
    void apply_hamiltonian(const Eigen::MatrixXcd& X, Eigen::MatrixXcd& Y, double t) const;
    void taylor_step(Eigen::MatrixXcd& X, double tmid, double dt) const;

    const DiscretizedModel* dm_;
    int n_modes_ = 0;  // bath modes (impurity handled as the spin)
    int dim_ = 0;
    int steps_per_cycle_ = 512;
    double t_ = 0.0;
    double hnorm_bound_ = 0.0;

    std::vector<double> diag_energy_;   // per basis state
    std::vector<double> rho0_;          // thermal weights per basis state
    std::vector<double> ref_log_rho_;   // log of reference weights
    // per mode: signed pairs (s_down_occupied -> s_up_empty) for sigma_+ b_j
    struct Hop { int from, to; double sign; };
    std::vector<std::vector<Hop>> hops_;
    Eigen::MatrixXcd U_;
};

// rho(t1) = U rho(t0) U^dag with midpoint-exponential many-body steps; refuses
// dimensions above 14 modes.
FockState propagate_fock_oracle(const DiscretizedModel& dm, const FockState& s, double t0,
                                double t1, double dt);

// thermal product density matrix (diagonal) for tests and the direct path
FockState thermal_fock_state(const DiscretizedModel& dm);

}  // namespace qcycle
