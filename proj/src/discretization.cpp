#include "qcycle/discretization.hpp"

#include <cmath>
#include <limits>

#include "qcycle/hash.hpp"

namespace qcycle {

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        // Newton from the Chebyshev-like initial guess
        double z = std::cos(pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        w[n - 1 - i] = w[i];
    }
}

ModeGrid build_mode_grid(const ReservoirSpec& res, double omega0, GridScheme scheme,
                         int modes, double u_max) {
    if (modes < 1) throw ConfigError("build_mode_grid: need at least one mode");
    if (!(u_max > 0.0)) throw ConfigError("build_mode_grid: u_max must be > 0");
    if (u_max <= 2.0 * omega0)
        throw ConfigError("build_mode_grid: u_max does not cover the resonance 2*omega0");
    if (u_max <= res.mu)
        throw ConfigError("build_mode_grid: u_max does not cover the chemical potential");
    ModeGrid grid;
    grid.scheme = scheme;
    grid.u_max = u_max;
    grid.nodes.resize(modes);
    grid.weights.resize(modes);
    if (scheme == GridScheme::Uniform) {
        const double du = u_max / modes;
        for (int j = 0; j < modes; ++j) {
            grid.nodes[j] = (j + 0.5) * du;
            grid.weights[j] = du;
        }
    } else {
        std::vector<double> x, w;
        gauss_legendre(modes, x, w);
        for (int j = 0; j < modes; ++j) {
            grid.nodes[j] = 0.5 * u_max * (x[j] + 1.0);
            grid.weights[j] = 0.5 * u_max * w[j];
        }
    }
    return grid;
}

double recurrence_estimate(const ModeGrid& grid) {
    if (grid.size() < 2) return std::numeric_limits<double>::infinity();
    double dmin = std::numeric_limits<double>::infinity();
    for (int j = 1; j < grid.size(); ++j)
        dmin = std::min(dmin, grid.nodes[j] - grid.nodes[j - 1]);
    return 2.0 * pi / dmin;
}

DiscretizedModel::DiscretizedModel(ModelSpec model, std::vector<ModeGrid> grids)
    : model_(std::move(model)), grids_(std::move(grids)) {
    if (grids_.size() != model_.reservoirs.size())
        throw ConfigError("DiscretizedModel: one grid per reservoir required");
    dim_ = 1;
    offsets_.push_back(1);
    for (const auto& g : grids_) {
        dim_ += g.size();
        offsets_.push_back(dim_);
    }
    diag_.resize(dim_);
    radial_.resize(dim_ - 1);
    diag_(0) = impurity_energy();
    int p = 1;
    for (size_t i = 0; i < grids_.size(); ++i) {
        const auto& prof = model_.reservoirs[i].form_factor.radial;
        for (int j = 0; j < grids_[i].size(); ++j, ++p) {
            const double u = grids_[i].nodes[j];
            diag_(p) = u;
            radial_(p - 1) = std::sqrt(prof.measure(u) * grids_[i].weights[j]) * prof.phi(u);
        }
    }
    // deterministic stamp over the grid data and key model numbers
    Fnv1a h;
    h.add(model_.omega0).add(model_.g).add(model_.period());
    for (size_t i = 0; i < grids_.size(); ++i) {
        h.add(static_cast<uint64_t>(grids_[i].scheme == GridScheme::Uniform ? 0 : 1));
        h.add(grids_[i].u_max);
        for (double u : grids_[i].nodes) h.add(u);
        for (double w : grids_[i].weights) h.add(w);
        h.add(model_.reservoirs[i].beta).add(model_.reservoirs[i].mu);
    }
    hash_ = h.value();
}

std::pair<int, int> DiscretizedModel::reservoir_span(int i) const {
    if (i < 0 || i >= n_reservoirs())
        throw ConfigError("reservoir_span: reservoir index out of range");
    return {offsets_[i], offsets_[i + 1]};
}

Eigen::VectorXcd DiscretizedModel::coupling_row(double t) const {
    Eigen::VectorXcd row(dim_ - 1);
    int p = 0;
    for (int i = 0; i < n_reservoirs(); ++i) {
        const cxd env = model_.g * model_.reservoirs[i].form_factor.envelope.value(t);
        const int m = grids_[i].size();
        row.segment(p, m) = env * radial_.segment(p, m);
        p += m;
    }
    return row;
}

Eigen::MatrixXcd DiscretizedModel::single_particle_hamiltonian(double t) const {
    if (!std::isfinite(t)) throw std::domain_error("single_particle_hamiltonian: t must be finite");
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim_, dim_);
    h.diagonal() = diag_.cast<cxd>();
    const Eigen::VectorXcd row = coupling_row(t);
    h.row(0).tail(dim_ - 1) = row.transpose();
    h.col(0).tail(dim_ - 1) = row.conjugate();
    return h;
}

double DiscretizedModel::recurrence_time() const {
    double r = std::numeric_limits<double>::infinity();
    for (const auto& g : grids_) r = std::min(r, recurrence_estimate(g));
    return r;
}

DiscretizedModel discretize(const ModelSpec& model, GridScheme scheme,
                            int modes_per_reservoir, double u_max) {
    std::vector<ModeGrid> grids;
    grids.reserve(model.reservoirs.size());
    for (const auto& r : model.reservoirs)
        grids.push_back(build_mode_grid(r, model.omega0, scheme, modes_per_reservoir, u_max));
    return DiscretizedModel(model, std::move(grids));
}

double default_u_max(const ModelSpec& model) {
    double m = 4.0 * model.omega0;
    for (const auto& r : model.reservoirs) m = std::max(m, r.mu + 10.0 / r.beta);
    return m;
}

}  // namespace qcycle
