// runner.hpp — run orchestration: single runs, parameter sweeps, plot-data
// emission, deterministic artifact output.

#pragma once

#include <nlohmann/json_fwd.hpp>
#include <optional>

#include "qcycle/config.hpp"
#include "qcycle/cycle.hpp"
#include "qcycle/resonances.hpp"
#include "qcycle/validate.hpp"

namespace qcycle {

struct InvariantSuite {
    int dim = 0;
    double eigenvalue_low = 0.0, eigenvalue_high = 1.0;  // spectrum of final G
    double trace_drift_abs = 0.0;
    double min_entropy = 0.0;
    double max_balance_rel = 0.0;  // |dEnt/dt + sum beta phi| / max|Ep| at samples
    double max_balance_abs = 0.0;
    int balance_points = 0;
    double ledger_identity = 0.0;  // max |dEnt[n] + sum beta Q_eff[n]|
    double cumulative_defect = 0.0;  // max |Ent(n tau) - sum_k<n dEnt[k]|
    bool pass(double balance_tol = 1e-6) const;
};

struct RunResult {
    RunConfig cfg;
    AssumptionReport assumptions;
    uint64_t discretization_hash = 0;
    double recurrence_time = 0.0;
    Trajectory trajectory;
    CycleLedger ledger;
    ConvergenceResult convergence;
    EntropyPerCycle entropy;          // valid when converged
    std::optional<EngineReport> engine;
    Prop21Report prop21;
    InvariantSuite invariants;
    double predicted_population_rate = 0.0;  // -Im E_1^(0) from the C-Liouvillean table
    double predicted_gap_rate = 0.0;         // spectral_gap
    double seeded_population = -1.0;         // when golden_rule_steady seeding is on
    std::optional<CovarianceState> final_state;  // kept for snapshot output
    int exit_code = 0;                       // 0 ok, 3 not converged, 4 invariants failed
};

// full pipeline in memory (no files)
RunResult execute_run(const RunConfig& cfg);

// pipeline + artifact files (trajectory.csv, ledger.json, report.json, ...)
RunResult run(const RunConfig& cfg, const std::string& out_dir);

nlohmann::json report_json(const RunResult& r);
nlohmann::json ledger_json(const RunResult& r);

// five-point central-difference cross-check of dEnt/dt against -sum beta Phi^eff
void balance_check(const Trajectory& traj, InvariantSuite& inv);

struct SweepPointRow {
    int index = 0;
    std::string name;
    double g = 0, tau = 0, beta1 = 0, beta2 = 0;
    int modes = 0;
    std::string status;  // "ok" or error text
    RunResult result;    // valid when status == "ok"
};

struct SweepManifest {
    std::vector<SweepPointRow> rows;
    std::string manifest_csv;  // path written
};

SweepManifest sweep(const RunConfig& cfg, const std::string& out_dir, int workers = 1);

// plot-data recipes (columnar CSV, no GUI)
void emit_plots_from_run(const std::string& run_dir, const std::string& out_dir);
void emit_plots_from_manifest(const std::string& manifest_csv, const std::string& out_dir);

}  // namespace qcycle
