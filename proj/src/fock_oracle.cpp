#include "qcycle/fock_oracle.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace qcycle {

namespace {

// basis layout: bit 0 = spin (1 = up), bits 1..n = bath modes in grid order
inline bool bit(int s, int b) { return (s >> b) & 1; }

int parity_below(int s, int mode_bit) {
    // parity of occupied bath modes with bit index < mode_bit (bath bits start at 1)
    int mask = ((1 << mode_bit) - 1) & ~1;
    return __builtin_popcount(s & mask) & 1;
}

}  // namespace

double FockState::hermiticity_defect() const {
    return (rho - rho.adjoint()).cwiseAbs().maxCoeff();
}

double FockState::trace_defect() const { return std::abs(rho.trace().real() - 1.0); }

double FockState::min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

FockOracle::FockOracle(const DiscretizedModel& dm, int steps_per_cycle)
    : dm_(&dm), steps_per_cycle_(steps_per_cycle) {
    n_modes_ = dm.dim() - 1;
    if (dm.dim() > 14)
        throw DimensionError("FockOracle: dimension guard (impurity + modes <= 14)");
    dim_ = 1 << (n_modes_ + 1);

    const double w0 = dm.model().omega0;
    diag_energy_.resize(dim_);
    rho0_.resize(dim_);
    ref_log_rho_.resize(dim_);

    // occupation data per mode
    std::vector<double> occ(n_modes_);
    int p = 0;
    for (int i = 0; i < dm.n_reservoirs(); ++i) {
        const auto& res = dm.model().reservoirs[i];
        for (double u : dm.grids()[i].nodes) occ[p++] = fermi_occupation(res.beta, res.mu, u);
    }
    const double pexc = dm.model().initial_state.excited_population;

    for (int s = 0; s < dim_; ++s) {
        double e = bit(s, 0) ? w0 : -w0;
        double w = bit(s, 0) ? pexc : (1.0 - pexc);
        double lref = std::log(0.5);  // trace state on the system
        for (int j = 0; j < n_modes_; ++j) {
            const double u = dm.diagonal()(1 + j);
            const bool n = bit(s, 1 + j);
            if (n) e += u;
            w *= n ? occ[j] : (1.0 - occ[j]);
            lref += std::log(n ? occ[j] : (1.0 - occ[j]));
        }
        diag_energy_[s] = e;
        rho0_[s] = w;
        ref_log_rho_[s] = lref;
    }

    // hop tables for sigma_+ b_j: spin down -> up, bath mode j occupied -> empty,
    // Jordan-Wigner sign over bath modes below j
    hops_.resize(n_modes_);
    for (int j = 0; j < n_modes_; ++j) {
        const int mb = 1 + j;
        for (int s = 0; s < dim_; ++s) {
            if (bit(s, 0) || !bit(s, mb)) continue;
            const int t = (s & ~(1 << mb)) | 1;
            const double sign = parity_below(s, mb) ? -1.0 : 1.0;
            hops_[j].push_back({s, t, sign});
        }
    }

    double env_bound = 0.0;
    for (const auto& r : dm.model().reservoirs) {
        double b = 0.0;
        for (const auto& h : r.form_factor.envelope.harmonics()) b += std::abs(h.amplitude);
        env_bound = std::max(env_bound, b);
    }
    double diag_bound = 0.0;
    for (double e : diag_energy_) diag_bound = std::max(diag_bound, std::abs(e));
    const double lam_sum = std::abs(dm.model().g) * env_bound *
                           dm.radial_coupling().cwiseAbs().sum();
    hnorm_bound_ = diag_bound + 2.0 * lam_sum;

    U_ = Eigen::MatrixXcd::Identity(dim_, dim_);
}

void FockOracle::apply_hamiltonian(const Eigen::MatrixXcd& X, Eigen::MatrixXcd& Y,
                                   double t) const {
    Y.resize(dim_, dim_);
    const Eigen::VectorXcd lam = dm_->coupling_row(t);
    const Eigen::Map<const Eigen::ArrayXd> e(diag_energy_.data(), dim_);
    // column-major friendly: process one column at a time
    for (int c = 0; c < dim_; ++c) {
        Y.col(c).array() = e * X.col(c).array();
        for (int j = 0; j < n_modes_; ++j) {
            const cxd up = std::conj(lam(j));  // sigma_+ b_j amplitude
            const cxd dn = lam(j);             // sigma_- b_j^dag amplitude
            auto xc = X.col(c);
            auto yc = Y.col(c);
            for (const auto& h : hops_[j]) {
                yc(h.to) += (h.sign * up) * xc(h.from);
                yc(h.from) += (h.sign * dn) * xc(h.to);
            }
        }
    }
}

void FockOracle::taylor_step(Eigen::MatrixXcd& X, double tmid, double dt) const {
    const double z = hnorm_bound_ * std::abs(dt);
    const int nsub = std::max(1, static_cast<int>(std::ceil(z / 0.75)));
    const double dts = dt / nsub;
    Eigen::MatrixXcd term, tmp;
    for (int s = 0; s < nsub; ++s) {
        term = X;
        double coef_bound = 1.0;
        for (int k = 1; k < 40; ++k) {
            apply_hamiltonian(term, tmp, tmid);
            term = (cxd(0.0, -dts) / static_cast<double>(k)) * tmp;
            X += term;
            coef_bound *= hnorm_bound_ * std::abs(dts) / k;
            if (coef_bound < 1e-17) break;
        }
    }
}

void FockOracle::advance(double t0, double t1) {
    const double tau = dm_->model().period();
    const double dt = tau / steps_per_cycle_;
    const int n = std::max(1, static_cast<int>(std::ceil((t1 - t0) / dt - 1e-12)));
    const double h = (t1 - t0) / n;
    for (int s = 0; s < n; ++s) taylor_step(U_, t0 + (s + 0.5) * h, h);
    t_ = t1;
}

double FockOracle::impurity_population() const {
    double acc = 0.0;
    for (int s = 0; s < dim_; ++s) {
        if (rho0_[s] == 0.0) continue;
        for (int r = 0; r < dim_; ++r)
            if (bit(r, 0)) acc += std::norm(U_(r, s)) * rho0_[s];
    }
    return acc;
}

namespace {

double weighted_occupation(const Eigen::MatrixXcd& U, const std::vector<double>& rho0,
                           int dim, int lo_bit, int hi_bit,
                           const Eigen::VectorXd& weights) {
    // sum_s rho0_s sum_r |U_rs|^2 * (sum_{b in [lo,hi)} w_b n_b(r))
    Eigen::VectorXd wr = Eigen::VectorXd::Zero(dim);
    for (int r = 0; r < dim; ++r) {
        double w = 0.0;
        for (int b = lo_bit; b < hi_bit; ++b)
            if ((r >> b) & 1) w += weights(b - lo_bit);
        wr(r) = w;
    }
    double acc = 0.0;
    for (int s = 0; s < dim; ++s) {
        if (rho0[s] == 0.0) continue;
        double col = 0.0;
        for (int r = 0; r < dim; ++r) col += std::norm(U(r, s)) * wr(r);
        acc += rho0[s] * col;
    }
    return acc;
}

}  // namespace

double FockOracle::reservoir_energy(int i) const {
    const auto [lo, hi] = dm_->reservoir_span(i);
    Eigen::VectorXd w(hi - lo);
    for (int p = lo; p < hi; ++p) w(p - lo) = dm_->diagonal()(p);
    return weighted_occupation(U_, rho0_, dim_, lo, hi, w);
}

double FockOracle::reservoir_number(int i) const {
    const auto [lo, hi] = dm_->reservoir_span(i);
    return weighted_occupation(U_, rho0_, dim_, lo, hi, Eigen::VectorXd::Ones(hi - lo));
}

Eigen::MatrixXcd FockOracle::density_matrix() const {
    Eigen::VectorXd d = Eigen::Map<const Eigen::VectorXd>(rho0_.data(), dim_);
    return U_ * d.asDiagonal() * U_.adjoint();
}

double FockOracle::relative_entropy_direct() const {
    const Eigen::MatrixXcd rho = density_matrix();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho);
    double s_rho = 0.0;
    for (int k = 0; k < dim_; ++k) {
        const double p = es.eigenvalues()(k);
        if (p > 1e-300) s_rho += p * std::log(p);
    }
    double cross = 0.0;
    for (int s = 0; s < dim_; ++s) cross += rho(s, s).real() * ref_log_rho_[s];
    return s_rho - cross;
}

FockState thermal_fock_state(const DiscretizedModel& dm) {
    FockOracle o(dm);
    FockState st;
    st.rho = o.density_matrix();
    st.time = 0.0;
    return st;
}

FockState propagate_fock_oracle(const DiscretizedModel& dm, const FockState& s, double t0,
                                double t1, double dt) {
    if (dm.dim() > 14) throw DimensionError("propagate_fock_oracle: dimension guard");
    const double tau = dm.model().period();
    const int steps = std::max(1, static_cast<int>(std::llround(tau / dt)));
    FockOracle o(dm, steps);
    o.advance(t0, t1);
    FockState out;
    out.rho = o.propagator() * s.rho * o.propagator().adjoint();
    out.time = t1;
    return out;
}

}  // namespace qcycle
