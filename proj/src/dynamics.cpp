#include "qcycle/dynamics.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace qcycle {

double CovarianceState::hermiticity_defect() const {
    return (G - G.adjoint()).cwiseAbs().maxCoeff();
}

double CovarianceState::trace() const { return G.trace().real(); }

std::pair<double, double> CovarianceState::eigenvalue_range() const {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(G, Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    return {ev.minCoeff(), ev.maxCoeff()};
}

CovarianceState thermal_covariance(const DiscretizedModel& dm, const SystemState& state) {
    if (state.excited_population < 0.0 || state.excited_population > 1.0)
        throw ConfigError("thermal_covariance: excited population outside [0,1]");
    const int n = dm.dim();
    CovarianceState s;
    s.G = Eigen::MatrixXcd::Zero(n, n);
    s.G(0, 0) = state.excited_population;
    int p = 1;
    for (int i = 0; i < dm.n_reservoirs(); ++i) {
        const auto& res = dm.model().reservoirs[i];
        for (double u : dm.grids()[i].nodes) s.G(p, p) = fermi_occupation(res.beta, res.mu, u), ++p;
    }
    s.time = 0.0;
    return s;
}

CovarianceState thermal_covariance(const DiscretizedModel& dm) {
    return thermal_covariance(dm, dm.model().initial_state);
}

StepPropagator::StepPropagator(const DiscretizedModel& dm, IntegratorOptions opts)
    : dm_(&dm), opts_(opts) {
    if (opts_.steps_per_cycle < 1) throw ConfigError("StepPropagator: steps_per_cycle >= 1");
    // column-sum norm bound of h(t): max over modes of |u_j| + |lambda_j|,
    // and eps + sum |lambda_j|; envelope bounded by sum |hhat_m|
    double env_bound = 0.0;
    for (const auto& r : dm.model().reservoirs) {
        double b = 0.0;
        for (const auto& h : r.form_factor.envelope.harmonics()) b += std::abs(h.amplitude);
        env_bound = std::max(env_bound, b);
    }
    const double lam_bound = std::abs(dm.model().g) * env_bound *
                             dm.radial_coupling().cwiseAbs().maxCoeff();
    const double lam_sum = std::abs(dm.model().g) * env_bound *
                           dm.radial_coupling().cwiseAbs().sum();
    hnorm_bound_ = std::max(dm.diagonal().cwiseAbs().maxCoeff() + lam_bound,
                            dm.impurity_energy() + lam_sum);
}

namespace {

// y <- h(t) x exploiting the arrowhead structure (diag + first row/col)
inline void arrowhead_apply(const Eigen::VectorXd& diag, const Eigen::VectorXcd& row,
                            const Eigen::MatrixXcd& X, Eigen::MatrixXcd& Y) {
    const int n = static_cast<int>(diag.size());
    Y = diag.cast<cxd>().asDiagonal() * X;
    Y.row(0).noalias() += row.transpose() * X.bottomRows(n - 1);
    Y.bottomRows(n - 1).noalias() += row.conjugate() * X.row(0);
}

int taylor_terms(double z) {
    // smallest K with z^K / K! < 1e-17 (z <= 0.75 by substepping)
    double term = 1.0;
    for (int k = 1; k < 40; ++k) {
        term *= z / k;
        if (term < 1e-17) return k;
    }
    return 40;
}

}  // namespace

void StepPropagator::apply_exponential(Eigen::MatrixXcd& X, double tmid, double dt) const {
    const double z = hnorm_bound_ * std::abs(dt);
    const int nsub = std::max(1, static_cast<int>(std::ceil(z / 0.75)));
    const double dts = dt / nsub;
    const int K = taylor_terms(hnorm_bound_ * std::abs(dts));
    const Eigen::VectorXd& diag = dm_->diagonal();
    const Eigen::VectorXcd row = dm_->coupling_row(tmid);
    Eigen::MatrixXcd term(X.rows(), X.cols()), tmp(X.rows(), X.cols());
    for (int s = 0; s < nsub; ++s) {
        term = X;
        for (int k = 1; k <= K; ++k) {
            arrowhead_apply(diag, row, term, tmp);
            term = (cxd(0.0, -dts) / static_cast<double>(k)) * tmp;
            X += term;
        }
    }
}

double StepPropagator::probe_defect(double tmid, double dt) const {
    const int n = dm_->dim();
    Eigen::MatrixXcd v(n, 1);
    for (int p = 0; p < n; ++p) v(p, 0) = cxd(1.0 / std::sqrt(double(n)), 0.0);
    apply_exponential(v, tmid, dt);
    return std::abs(v.col(0).norm() - 1.0);
}

void StepPropagator::step(Eigen::MatrixXcd& X, double t0, double dt) const {
    if (!(dt > 0.0)) throw std::domain_error("StepPropagator::step: dt must be > 0");
    int halvings = 0;
    double d = dt;
    while (probe_defect(t0 + 0.5 * d, d) > opts_.unitarity_tol) {
        if (++halvings > opts_.max_halvings)
            throw StateError("StepPropagator: unitarity defect persists after max halvings");
        d *= 0.5;
    }
    const int nstep = 1 << halvings;
    for (int s = 0; s < nstep; ++s) apply_exponential(X, t0 + (s + 0.5) * d, d);
}

void StepPropagator::advance(Eigen::MatrixXcd& X, double t0, double t1, double dt) const {
    if (!(t1 > t0)) throw std::domain_error("StepPropagator::advance: t1 must exceed t0");
    const int n = std::max(1, static_cast<int>(std::ceil((t1 - t0) / dt - 1e-12)));
    const double h = (t1 - t0) / n;
    for (int s = 0; s < n; ++s) step(X, t0 + s * h, h);
}

Eigen::MatrixXcd StepPropagator::one_cycle_propagator(double t0) const {
    const double tau = dm_->model().period();
    Eigen::MatrixXcd U = Eigen::MatrixXcd::Identity(dm_->dim(), dm_->dim());
    advance(U, t0, t0 + tau, tau / opts_.steps_per_cycle);
    return U;
}

CovarianceState propagate_covariance(const DiscretizedModel& dm, const CovarianceState& s,
                                     double t0, double t1, double dt,
                                     const IntegratorOptions& opts) {
    StepPropagator prop(dm, opts);
    Eigen::MatrixXcd U = Eigen::MatrixXcd::Identity(dm.dim(), dm.dim());
    prop.advance(U, t0, t1, dt);
    CovarianceState out;
    out.G = U * s.G * U.adjoint();
    out.time = t1;
    return out;
}

double reservoir_energy(const DiscretizedModel& dm, const Eigen::MatrixXcd& G, int i) {
    const auto [lo, hi] = dm.reservoir_span(i);
    double acc = 0.0;
    for (int p = lo; p < hi; ++p) acc += dm.diagonal()(p) * G(p, p).real();
    return acc;
}

double reservoir_number(const DiscretizedModel& dm, const Eigen::MatrixXcd& G, int i) {
    const auto [lo, hi] = dm.reservoir_span(i);
    double acc = 0.0;
    for (int p = lo; p < hi; ++p) acc += G(p, p).real();
    return acc;
}

namespace {

double flux_weighted(const DiscretizedModel& dm, const Eigen::MatrixXcd& G, double t,
                     int i, bool energy_weighted) {
    const auto [lo, hi] = dm.reservoir_span(i);
    const Eigen::VectorXcd row = dm.coupling_row(t);
    double acc = 0.0;
    for (int p = lo; p < hi; ++p) {
        const double w = energy_weighted ? dm.diagonal()(p) : 1.0;
        acc += w * std::imag(std::conj(row(p - 1)) * G(0, p));
    }
    return -2.0 * acc;
}

}  // namespace

double heat_flux(const DiscretizedModel& dm, const Eigen::MatrixXcd& G, double t, int i) {
    return flux_weighted(dm, G, t, i, true);
}

double number_flux(const DiscretizedModel& dm, const Eigen::MatrixXcd& G, double t, int i) {
    return flux_weighted(dm, G, t, i, false);
}

const Sample& Trajectory::at_time(double t) const {
    const double tol = 1e-9 * (1.0 + std::abs(t));
    for (const auto& s : samples)
        if (std::abs(s.t - t) <= tol) return s;
    throw StateError("Trajectory: time not sampled");
}

const Sample& Trajectory::boundary(int cycle) const {
    for (const auto& s : samples)
        if (s.cycle_boundary && s.cycle_index == cycle) return s;
    throw StateError("Trajectory: cycle boundary not sampled");
}

int Trajectory::complete_cycles() const {
    int n = -1;
    for (const auto& s : samples)
        if (s.cycle_boundary) n = std::max(n, s.cycle_index);
    return n;
}

double system_state_entropy_offset(const SystemState& state) {
    const double p = state.excited_population;
    auto xlogx = [](double x) { return x > 0.0 ? x * std::log(x) : 0.0; };
    return std::log(2.0) + xlogx(p) + xlogx(1.0 - p);
}

void finalize_sample(const Trajectory& traj, Sample& s) {
    double ent = traj.entropy_offset;
    double ep = 0.0;
    for (int i = 0; i < traj.reservoirs; ++i) {
        ent += traj.beta(i) * ((s.reservoir_E(i) - traj.E0(i)) -
                               traj.mu(i) * (s.reservoir_N(i) - traj.N0(i)));
        ep -= traj.beta(i) * (s.flux(i) - traj.mu(i) * s.number_flux_v(i));
    }
    s.entropy = ent;
    s.ep_rate = ep;
}

double relative_entropy(const Trajectory& traj, double t) { return traj.at_time(t).entropy; }

double entropy_production_rate(const Trajectory& traj, double t) {
    return traj.at_time(t).ep_rate;
}

double heat_flux(const Trajectory& traj, int i, double t) {
    if (i < 0 || i >= traj.reservoirs) throw ConfigError("heat_flux: unknown reservoir index");
    return traj.at_time(t).flux(i);
}

double cesaro_average(const Trajectory& traj,
                      const std::function<double(const Sample&)>& observable) {
    const int n = traj.complete_cycles();
    if (n < 1) throw StateError("cesaro_average: needs at least one complete cycle");
    const double horizon = n * traj.tau;
    double acc = 0.0;
    bool any = false;
    for (size_t k = 0; k + 1 < traj.samples.size(); ++k) {
        const auto& a = traj.samples[k];
        const auto& b = traj.samples[k + 1];
        if (b.t > horizon + 1e-9) break;
        acc += 0.5 * (observable(a) + observable(b)) * (b.t - a.t);
        any = true;
    }
    if (!any) throw StateError("cesaro_average: no sample intervals inside the horizon");
    return acc / horizon;
}

}  // namespace qcycle
