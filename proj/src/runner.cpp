#include "qcycle/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <set>
#include <thread>

#include "qcycle/csv.hpp"
#include "qcycle/hash.hpp"
#include "qcycle/snapshot.hpp"

namespace qcycle {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

Sample make_sample(const DiscretizedModel& dm, const Eigen::MatrixXcd& A, double t,
                   int cycle, bool boundary, const Trajectory& traj) {
    const int R = dm.n_reservoirs();
    Sample s;
    s.t = t;
    s.cycle_boundary = boundary;
    s.cycle_index = cycle;
    s.reservoir_E.resize(R);
    s.reservoir_N.resize(R);
    s.flux.resize(R);
    s.number_flux_v.resize(R);
    // G = A A^dag; only the diagonal and the impurity row are needed
    const Eigen::VectorXd diagG = A.rowwise().squaredNorm();
    const Eigen::RowVectorXcd row0 = A.row(0) * A.adjoint();
    s.impurity_population = diagG(0);
    const Eigen::VectorXcd lam = dm.coupling_row(t);
    for (int i = 0; i < R; ++i) {
        const auto [lo, hi] = dm.reservoir_span(i);
        double E = 0.0, N = 0.0, f = 0.0, fn = 0.0;
        for (int p = lo; p < hi; ++p) {
            const double u = dm.diagonal()(p);
            E += u * diagG(p);
            N += diagG(p);
            // G(0,p) = row0(p)
            const double im = std::imag(std::conj(lam(p - 1)) * row0(p));
            f += u * im;
            fn += im;
        }
        s.reservoir_E(i) = E;
        s.reservoir_N(i) = N;
        s.flux(i) = -2.0 * f;
        s.number_flux_v(i) = -2.0 * fn;
    }
    finalize_sample(traj, s);
    return s;
}

}  // namespace

bool InvariantSuite::pass(double balance_tol) const {
    return eigenvalue_low > -1e-10 && eigenvalue_high < 1.0 + 1e-10 &&
           trace_drift_abs <= 1e-10 * std::max(1, dim) && min_entropy >= -1e-10 &&
           (balance_points == 0 || max_balance_rel <= balance_tol) &&
           ledger_identity <= 1e-12 && cumulative_defect <= 1e-10;
}

void balance_check(const Trajectory& traj, InvariantSuite& inv) {
    double max_ep = 0.0;
    for (const auto& s : traj.samples) max_ep = std::max(max_ep, std::abs(s.ep_rate));
    if (max_ep == 0.0) max_ep = 1.0;
    double worst = 0.0;
    int points = 0;
    const auto& v = traj.samples;
    for (size_t k = 2; k + 2 < v.size(); ++k) {
        const double h1 = v[k].t - v[k - 1].t;
        // five-point stencil needs a locally uniform grid
        bool uniform = true;
        for (int d = -1; d <= 1; ++d)
            if (std::abs((v[k + d + 1].t - v[k + d].t) - h1) > 1e-9 * h1) uniform = false;
        if (!uniform || h1 <= 0.0) continue;
        const double dent = (-v[k + 2].entropy + 8.0 * v[k + 1].entropy -
                             8.0 * v[k - 1].entropy + v[k - 2].entropy) /
                            (12.0 * h1);
        worst = std::max(worst, std::abs(dent - v[k].ep_rate));
        ++points;
    }
    inv.max_balance_abs = worst;
    inv.max_balance_rel = worst / max_ep;
    inv.balance_points = points;
}

RunResult execute_run(const RunConfig& cfg_in) {
    RunResult res;
    res.cfg = cfg_in;
    RunConfig& cfg = res.cfg;

    res.assumptions = validate_assumptions(cfg.model);
    if (!res.assumptions.ok())
        throw ConfigError("model failed assumption validation:\n" + to_string(res.assumptions));

    if (cfg.init_kind == InitialStateKind::GoldenRuleSteady) {
        cfg.model.initial_state.excited_population = golden_rule_steady_population(cfg.model);
        res.seeded_population = cfg.model.initial_state.excited_population;
    }

    DiscretizedModel dm =
        discretize(cfg.model, cfg.disc.scheme, cfg.disc.modes_per_reservoir, cfg.resolved_u_max());
    res.discretization_hash = dm.hash();
    res.recurrence_time = dm.recurrence_time();

    // resonance-predicted rates (C-Liouvillean widths)
    {
        ResonanceTable table =
            build_resonance_table(cfg.model, LiouvilleanConvention::CLiouvillean, cfg.model.g, 0, 0);
        res.predicted_population_rate = population_rate(table);
        res.predicted_gap_rate = spectral_gap(table);
    }

    const double tau = cfg.model.period();
    const int R = dm.n_reservoirs();
    Trajectory& traj = res.trajectory;
    traj.tau = tau;
    traj.reservoirs = R;
    traj.beta.resize(R);
    traj.mu.resize(R);
    for (int i = 0; i < R; ++i) {
        traj.beta(i) = cfg.model.reservoirs[i].beta;
        traj.mu(i) = cfg.model.reservoirs[i].mu;
    }
    traj.entropy_offset = system_state_entropy_offset(cfg.model.initial_state);

    IntegratorOptions iopts;
    iopts.steps_per_cycle = cfg.integrator.steps_per_cycle;
    iopts.unitarity_tol = cfg.integrator.unitarity_tol;
    StepPropagator prop(dm, iopts);

    // dense-sampled cycles: configured ones plus a validation tail
    std::set<int> dense(cfg.run.dense_cycles.begin(), cfg.run.dense_cycles.end());
    for (int k = 0; k < cfg.run.validation_tail; ++k) dense.insert(cfg.run.cycles - 1 - k);
    dense.erase(dense.begin(), dense.lower_bound(0));
    dense.erase(dense.lower_bound(cfg.run.cycles), dense.end());

    CovarianceState init = thermal_covariance(dm);
    const int n = dm.dim();
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(n, n);
    A.diagonal() = init.G.diagonal().cwiseSqrt();
    const double trace0 = A.squaredNorm();

    // reference energies before the first sample
    {
        const Eigen::VectorXd diagG = A.rowwise().squaredNorm();
        traj.E0.resize(R);
        traj.N0.resize(R);
        for (int i = 0; i < R; ++i) {
            const auto [lo, hi] = dm.reservoir_span(i);
            double E = 0.0, Ncnt = 0.0;
            for (int p = lo; p < hi; ++p) {
                E += dm.diagonal()(p) * diagG(p);
                Ncnt += diagG(p);
            }
            traj.E0(i) = E;
            traj.N0(i) = Ncnt;
        }
    }

    traj.samples.push_back(make_sample(dm, A, 0.0, 0, true, traj));

    const bool need_cycle_map =
        static_cast<int>(dense.size()) < cfg.run.cycles;  // any stroboscopic cycle
    Eigen::MatrixXcd U_tau;
    if (need_cycle_map) U_tau = prop.one_cycle_propagator(0.0);

    const double dt = tau / cfg.integrator.steps_per_cycle;
    Eigen::MatrixXcd next(n, n);
    for (int c = 0; c < cfg.run.cycles; ++c) {
        const double t0 = c * tau;
        if (dense.count(c)) {
            for (int s = 1; s <= cfg.integrator.steps_per_cycle; ++s) {
                prop.step(A, t0 + (s - 1) * dt, dt);
                const bool boundary = s == cfg.integrator.steps_per_cycle;
                traj.samples.push_back(
                    make_sample(dm, A, boundary ? (c + 1) * tau : t0 + s * dt,
                                boundary ? c + 1 : c, boundary, traj));
            }
        } else {
            next.noalias() = U_tau * A;
            A.swap(next);
            traj.samples.push_back(make_sample(dm, A, (c + 1) * tau, c + 1, true, traj));
        }
    }

    res.ledger = build_ledger(traj, dm);
    // widen the noise floor by the differentiation balance residual (the
    // per-cycle quadrature residual alone understates the bookkeeping noise)
    balance_check(traj, res.invariants);
    res.ledger.noise_floor = std::max(
        res.ledger.noise_floor, 10.0 * res.invariants.max_balance_abs * traj.tau);
    res.convergence =
        detect_periodic_convergence(res.ledger, cfg.run.convergence_tol, cfg.run.convergence_window);
    if (res.convergence.converged) res.entropy = entropy_per_cycle(res.ledger, res.convergence);
    if (R == 2 && res.convergence.converged) {
        const double T1 = 1.0 / traj.beta(0), T2 = 1.0 / traj.beta(1);
        if (T1 > T2) res.engine = efficiency(res.ledger, res.convergence, T1, T2);
    }
    res.prop21 = prop21_diagnostic(res.ledger, res.convergence);

    // invariant suite
    {
        InvariantSuite& inv = res.invariants;
        inv.dim = n;
        CovarianceState fin;
        fin.G = A * A.adjoint();
        fin.time = cfg.run.cycles * tau;
        auto [lo, hi] = fin.eigenvalue_range();
        inv.eigenvalue_low = lo;
        inv.eigenvalue_high = hi;
        inv.trace_drift_abs = std::abs(A.squaredNorm() - trace0);
        res.final_state = std::move(fin);
        double min_ent = 0.0;
        for (const auto& s : traj.samples) min_ent = std::min(min_ent, s.entropy);
        inv.min_entropy = min_ent;
        double ident = 0.0, cum = 0.0, acc = 0.0;
        for (const auto& rec : res.ledger.cycles) {
            double lhs = rec.dEnt;
            for (int i = 0; i < R; ++i) lhs += traj.beta(i) * rec.Q_eff(i);
            ident = std::max(ident, std::abs(lhs));
            acc += rec.dEnt;
            cum = std::max(cum, std::abs(traj.boundary(rec.n + 1).entropy -
                                         traj.entropy_offset - acc));
        }
        inv.ledger_identity = ident;
        inv.cumulative_defect = cum;
    }

    if (!res.invariants.pass())
        res.exit_code = 4;
    else if (!res.convergence.converged)
        res.exit_code = 3;
    return res;
}

json ledger_json(const RunResult& r) {
    json j;
    j["config_hash"] = hex_hash(r.cfg.config_hash);
    j["discretization_hash"] = hex_hash(r.discretization_hash);
    j["tau"] = r.ledger.tau;
    j["beta"] = std::vector<double>(r.ledger.beta.data(), r.ledger.beta.data() + r.ledger.beta.size());
    j["mu"] = std::vector<double>(r.ledger.mu.data(), r.ledger.mu.data() + r.ledger.mu.size());
    j["noise_floor"] = r.ledger.noise_floor;
    j["recurrence_time"] = r.ledger.recurrence_time;
    j["horizon_within_recurrence"] = r.ledger.horizon_within_recurrence;
    j["cycles"] = json::array();
    for (const auto& c : r.ledger.cycles) {
        json jc;
        jc["n"] = c.n;
        jc["Q"] = std::vector<double>(c.Q.data(), c.Q.data() + c.Q.size());
        jc["dEnt"] = c.dEnt;
        jc["dA"] = c.dA;
        jc["population"] = c.population;
        jc["balance_residual"] = c.balance_residual;
        j["cycles"].push_back(jc);
    }
    return j;
}

json report_json(const RunResult& r) {
    json j;
    j["name"] = r.cfg.name;
    j["config_hash"] = hex_hash(r.cfg.config_hash);
    j["discretization_hash"] = hex_hash(r.discretization_hash);
    j["exit_code"] = r.exit_code;
    j["assumptions"] = {{"a1", r.assumptions.a1_shared_period},
                        {"a2", r.assumptions.a2 == A2Status::Pass
                                   ? "pass"
                                   : (r.assumptions.a2 == A2Status::Unverifiable ? "unverifiable" : "fail")},
                        {"a3", r.assumptions.a3_fgr_positive},
                        {"parseval", r.assumptions.parseval_finite}};
    j["recurrence_time"] = r.recurrence_time;
    j["horizon"] = r.cfg.run.cycles * r.ledger.tau;
    j["horizon_within_recurrence"] = r.ledger.horizon_within_recurrence;
    j["noise_floor"] = r.ledger.noise_floor;
    j["convergence"] = {{"converged", r.convergence.converged},
                        {"n_star", r.convergence.n_star},
                        {"status", r.convergence.status},
                        {"fitted_rate", r.convergence.fitted_rate},
                        {"fitted_rates", r.convergence.fitted_rates},
                        {"limits", r.convergence.limits}};
    j["predicted_population_rate"] = r.predicted_population_rate;
    j["predicted_gap_rate"] = r.predicted_gap_rate;
    if (r.seeded_population >= 0.0) j["seeded_population"] = r.seeded_population;
    if (r.convergence.converged)
        j["entropy_per_cycle"] = {{"mean", r.entropy.mean},
                                  {"spread", r.entropy.spread},
                                  {"window_first", r.entropy.window_first},
                                  {"window_last", r.entropy.window_last}};
    if (r.engine) {
        json je;
        je["regime"] = to_string(r.engine->regime);
        je["Q1"] = r.engine->Q1;
        je["Q2"] = r.engine->Q2;
        je["dA"] = r.engine->dA;
        je["dEnt"] = r.engine->dEnt;
        je["eta_carnot"] = r.engine->eta_carnot;
        if (r.engine->eta) je["eta"] = *r.engine->eta;
        if (r.engine->margin) je["margin"] = *r.engine->margin;
        j["engine"] = je;
    }
    j["prop21"] = {{"sup", r.prop21.sup_abs}, {"plateau", r.prop21.plateau}};
    j["invariants"] = {{"eigenvalue_low", r.invariants.eigenvalue_low},
                       {"eigenvalue_high", r.invariants.eigenvalue_high},
                       {"trace_drift_abs", r.invariants.trace_drift_abs},
                       {"min_entropy", r.invariants.min_entropy},
                       {"max_balance_rel", r.invariants.max_balance_rel},
                       {"balance_points", r.invariants.balance_points},
                       {"ledger_identity", r.invariants.ledger_identity},
                       {"cumulative_defect", r.invariants.cumulative_defect},
                       {"pass", r.invariants.pass()}};
    return j;
}

RunResult run(const RunConfig& cfg, const std::string& out_dir) {
    RunResult res = execute_run(cfg);
    fs::create_directories(out_dir);
    if (cfg.run.write_trajectory)
        write_trajectory_csv(res.trajectory, hex_hash(cfg.config_hash),
                             hex_hash(res.discretization_hash),
                             (fs::path(out_dir) / "trajectory.csv").string());
    {
        std::ofstream os(fs::path(out_dir) / "ledger.json");
        os << ledger_json(res).dump(2) << "\n";
    }
    {
        std::ofstream os(fs::path(out_dir) / "report.json");
        os << report_json(res).dump(2) << "\n";
    }
    if (cfg.run.write_snapshot && res.final_state) {
        Snapshot snap;
        snap.state = *res.final_state;
        snap.tau = res.ledger.tau;
        snap.cycle = cfg.run.cycles;
        snap.config_hash = cfg.config_hash;
        snap.discretization_hash = res.discretization_hash;
        save_snapshot((fs::path(out_dir) / "state.snapshot").string(), snap);
    }
    return res;
}

SweepManifest sweep(const RunConfig& base, const std::string& out_dir, int workers) {
    // axis expansion in fixed order: g, tau, beta1, beta2, modes
    auto axis = [](std::vector<double> v, double fallback) {
        if (v.empty()) v.push_back(fallback);
        return v;
    };
    const auto gs = axis(base.sweep.g, base.model.g);
    const auto taus = axis(base.sweep.tau, base.model.period());
    const auto b1s = axis(base.sweep.beta1, base.model.reservoirs.front().beta);
    const auto b2s = axis(base.sweep.beta2,
                          base.model.reservoirs.size() > 1 ? base.model.reservoirs[1].beta : 0.0);
    std::vector<int> modes = base.sweep.modes;
    if (modes.empty()) modes.push_back(base.disc.modes_per_reservoir);

    std::vector<SweepPointRow> rows;
    for (double g : gs)
        for (double tau : taus)
            for (double b1 : b1s)
                for (double b2 : b2s)
                    for (int M : modes) {
                        SweepPointRow row;
                        row.index = static_cast<int>(rows.size());
                        row.g = g;
                        row.tau = tau;
                        row.beta1 = b1;
                        row.beta2 = b2;
                        row.modes = M;
                        rows.push_back(row);
                    }
    if (static_cast<int>(rows.size()) > base.sweep.max_points)
        throw ConfigError("sweep: axis product exceeds sweep.max_points");

    fs::create_directories(out_dir);
    std::atomic<size_t> cursor{0};
    auto worker = [&]() {
        for (;;) {
            const size_t k = cursor.fetch_add(1);
            if (k >= rows.size()) return;
            SweepPointRow& row = rows[k];
            char tag[32];
            std::snprintf(tag, sizeof(tag), "point_%04d", row.index);
            row.name = tag;
            try {
                RunConfig cfg = base;
                cfg.name = base.name + "/" + row.name;
                cfg.sweep = SweepAxes{};
                // rebuild the model with the point values
                cfg.model.g = row.g;
                if (std::abs(row.tau - base.model.period()) > 0.0) {
                    for (auto& r : cfg.model.reservoirs) {
                        std::vector<Harmonic> hs = r.form_factor.envelope.harmonics();
                        r.form_factor.envelope = PeriodicEnvelope(row.tau, hs);
                    }
                }
                cfg.model.reservoirs.front().beta = row.beta1;
                if (cfg.model.reservoirs.size() > 1) cfg.model.reservoirs[1].beta = row.beta2;
                cfg.disc.modes_per_reservoir = row.modes;
                cfg.canonical = to_json(cfg).dump();
                cfg.config_hash = Fnv1a().add(cfg.canonical).value();
                RunResult r = run(cfg, (fs::path(out_dir) / row.name).string());
                row.result = std::move(r);
                row.status = "ok";
            } catch (const std::exception& e) {
                row.status = e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    const int W = std::max(1, workers);
    for (int w = 0; w < W - 1; ++w) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    SweepManifest manifest;
    manifest.manifest_csv = (fs::path(out_dir) / "manifest.csv").string();
    write_manifest_csv(rows, manifest.manifest_csv);
    manifest.rows = std::move(rows);
    return manifest;
}

}  // namespace qcycle
