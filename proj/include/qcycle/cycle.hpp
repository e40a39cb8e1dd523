// cycle.hpp — per-cycle ledger: heats, entropy production, convergence to the
// time-periodic state, efficiency versus the Carnot bound.

#pragma once

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qcycle/dynamics.hpp"

namespace qcycle {

struct CycleRecord {
    int n = 0;
    Eigen::VectorXd Q;       // heat extracted from reservoir i during cycle n
    Eigen::VectorXd Q_eff;   // mu-corrected heats
    double dEnt = 0.0;       // Ent((n+1)tau) - Ent(n tau) = -sum_i beta_i Q_eff_i
    double dA = 0.0;         // sum_i Q_i
    double population = 0.0; // impurity population at the start of the cycle
    double balance_residual = 0.0;  // |dEnt - int_cycle Ep dt| when sampled
};

struct CycleLedger {
    double tau = 0.0;
    Eigen::VectorXd beta, mu;
    std::vector<CycleRecord> cycles;
    // 10 x the largest per-cycle balance residual (quadrature and
    // differentiation cross-checks); the runner widens it after the
    // trajectory-level balance check
    double noise_floor = 0.0;
    // series below this absolute level count as numerically stationary
    double abs_floor = 0.0;
    double recurrence_time = 0.0;
    bool horizon_within_recurrence = true;

    int size() const { return static_cast<int>(cycles.size()); }
};

CycleLedger build_ledger(const Trajectory& traj, const DiscretizedModel& dm);

// Q_i[n] = -(E_i((n+1)tau) - E_i(n tau))
double per_cycle_heat(const Trajectory& traj, int i, int n);

struct ConvergenceResult {
    bool converged = false;
    int n_star = -1;
    double tol = 0.0;
    int window = 0;
    double fitted_rate = 0.0;  // geometric rate from the population series
    std::map<std::string, double> fitted_rates;  // per observable
    std::map<std::string, double> limits;        // trailing means
    std::string status;
};

// n* = first cycle with relative per-cycle changes below tol for `window`
// consecutive cycles; fitted rate from log-linear regression on |x[n]-x_inf|.
ConvergenceResult detect_periodic_convergence(const CycleLedger& ledger, double tol,
                                              int window);

struct EntropyPerCycle {
    double mean = 0.0;
    double spread = 0.0;  // sample std over the averaging window
    int window_first = 0, window_last = 0;
};

// average of dEnt[n] over the trailing post-convergence window
EntropyPerCycle entropy_per_cycle(const CycleLedger& ledger, const ConvergenceResult& conv);

enum class Regime { Engine, Heater, Refrigerator, Undetermined };

struct EngineReport {
    Regime regime = Regime::Undetermined;
    double Q1 = 0.0, Q2 = 0.0, dA = 0.0, dEnt = 0.0;
    std::optional<double> eta;
    double eta_carnot = 0.0;
    std::optional<double> margin;  // eta_carnot - T2 dEnt/Q1 - eta
    int n_star = -1;
};

// two reservoirs with T1 > T2; eta reported only when Q1 > 0
EngineReport efficiency(const CycleLedger& ledger, const ConvergenceResult& conv,
                        double T1, double T2);

const char* to_string(Regime r);

struct Prop21Report {
    double sup_abs = 0.0;
    bool plateau = false;
    std::vector<double> running_sup;  // per cycle boundary
};

// running sup over T = n tau of |int_0^T (Ep_periodic - Ep) dt| with the
// post-convergence cycle profile tiled backward; cycle-boundary granularity
Prop21Report prop21_diagnostic(const CycleLedger& ledger, const ConvergenceResult& conv);

}  // namespace qcycle
