// run_helpers.hpp — programmatic RunConfig builders for the heavier suites

#pragma once

#include "qcycle/config.hpp"
#include "qcycle/hash.hpp"
#include "support/test_models.hpp"

namespace qcycle::testing {

inline RunConfig make_config(ModelSpec model, int modes, double u_max, int cycles,
                             int steps = 256, InitialStateKind init = InitialStateKind::Trace) {
    RunConfig cfg;
    cfg.name = "test";
    cfg.model = std::move(model);
    cfg.init_kind = init;
    cfg.disc.scheme = GridScheme::Uniform;
    cfg.disc.modes_per_reservoir = modes;
    cfg.disc.u_max = u_max;
    cfg.integrator.steps_per_cycle = steps;
    cfg.run.cycles = cycles;
    cfg.run.dense_cycles = {0};
    cfg.run.validation_tail = 1;
    cfg.canonical = "test";
    cfg.config_hash = Fnv1a().add(cfg.canonical).value();
    return cfg;
}

}  // namespace qcycle::testing
