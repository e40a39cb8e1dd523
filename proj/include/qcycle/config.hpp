// config.hpp — run configuration: JSON ingestion, resolution, content hash.

#pragma once

#include <nlohmann/json_fwd.hpp>
#include <string>

#include "qcycle/discretization.hpp"

namespace qcycle {

enum class InitialStateKind { Trace, Explicit, GoldenRuleSteady };

struct DiscretizationConfig {
    GridScheme scheme = GridScheme::Uniform;
    int modes_per_reservoir = 400;
    double u_max = 0.0;  // 0 = default_u_max(model)
};

struct IntegratorConfig {
    int steps_per_cycle = 512;
    double unitarity_tol = 1e-10;
};

struct RunSection {
    int cycles = 100;
    double convergence_tol = 1e-6;
    int convergence_window = 5;
    std::vector<int> dense_cycles;  // sampled at full step resolution
    int validation_tail = 2;        // trailing cycles added to dense set
    bool write_trajectory = true;
    bool write_snapshot = false;
};

struct SweepAxes {
    std::vector<double> g, tau, beta1, beta2;
    std::vector<int> modes;
    int max_points = 256;

    bool empty() const {
        return g.empty() && tau.empty() && beta1.empty() && beta2.empty() && modes.empty();
    }
};

struct RunConfig {
    std::string name = "run";
    ModelSpec model;
    InitialStateKind init_kind = InitialStateKind::Trace;
    DiscretizationConfig disc;
    IntegratorConfig integrator;
    RunSection run;
    SweepAxes sweep;

    std::string canonical;  // canonical resolved-config dump (hash input)
    uint64_t config_hash = 0;

    double resolved_u_max() const;
};

RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

// re-serialize the resolved configuration (canonical key order)
nlohmann::json to_json(const RunConfig& cfg);

}  // namespace qcycle
