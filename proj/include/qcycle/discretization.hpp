// discretization.hpp — finite mode grids for the reservoirs and assembly of
// the time-dependent single-particle (impurity + star bath) Hamiltonian.

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "qcycle/model.hpp"

namespace qcycle {

enum class GridScheme { Uniform, GaussLegendre };

struct ModeGrid {
    std::vector<double> nodes;    // strictly increasing, >= 0
    std::vector<double> weights;  // > 0
    GridScheme scheme = GridScheme::Uniform;
    double u_max = 0.0;

    int size() const { return static_cast<int>(nodes.size()); }
};

// Quadrature grid on [0, u_max]. Uniform: midpoints with equal weights.
ModeGrid build_mode_grid(const ReservoirSpec& res, double omega0, GridScheme scheme,
                         int modes, double u_max);

// Heuristic Poincare horizon 2 pi / min spacing; +inf (with warn flag set by
// caller) for a single node.
double recurrence_estimate(const ModeGrid& grid);

// Gauss-Legendre nodes/weights on [-1, 1] (exposed for tests).
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w);

class DiscretizedModel {
  public:
    DiscretizedModel(ModelSpec model, std::vector<ModeGrid> grids);

    const ModelSpec& model() const { return model_; }
    const std::vector<ModeGrid>& grids() const { return grids_; }

    int dim() const { return dim_; }  // 1 impurity + all modes
    double impurity_energy() const { return 2.0 * model_.omega0; }
    int n_reservoirs() const { return static_cast<int>(grids_.size()); }
    // [first, last) one-body indices of reservoir i
    std::pair<int, int> reservoir_span(int i) const;

    const Eigen::VectorXd& diagonal() const { return diag_; }
    // g-independent radial amplitudes sqrt(m(u_j) w_j) phi_i(u_j), stacked
    const Eigen::VectorXd& radial_coupling() const { return radial_; }
    // lambda_{i,j}(t) = g h_i(t) sqrt(m(u_j) w_j) phi_i(u_j), stacked
    Eigen::VectorXcd coupling_row(double t) const;

    Eigen::MatrixXcd single_particle_hamiltonian(double t) const;

    // smallest recurrence estimate over the reservoirs
    double recurrence_time() const;

    uint64_t hash() const { return hash_; }

  private:
    ModelSpec model_;
    std::vector<ModeGrid> grids_;
    int dim_ = 0;
    Eigen::VectorXd diag_;
    Eigen::VectorXd radial_;
    std::vector<int> offsets_;
    uint64_t hash_ = 0;
};

DiscretizedModel discretize(const ModelSpec& model, GridScheme scheme,
                            int modes_per_reservoir, double u_max);

// Default cutoff max(4 w0, mu + 10/beta) over the reservoirs.
double default_u_max(const ModelSpec& model);

}  // namespace qcycle
