// validate.hpp — interaction assumption checks (periodicity, form-factor
// regularity, golden-rule coupling) run before any simulation.

#pragma once

#include <string>
#include <vector>

#include "qcycle/model.hpp"

namespace qcycle {

enum class A2Status { Pass, Unverifiable, Fail };

struct AssumptionReport {
    bool a1_shared_period = false;
    A2Status a2 = A2Status::Fail;
    bool a3_fgr_positive = false;
    bool parseval_finite = false;

    double a3_peak = 0.0;          // max_t sum_i ||tilde f_i(2 w0, t)||^2
    double a2_sup = 0.0;           // largest sampled strip integral
    double parseval_peak = 0.0;    // largest sampled sum_m ||fhat_m(u+mw)||^2
    std::vector<std::string> failures;

    bool ok() const {
        return a1_shared_period && a2 != A2Status::Fail && a3_fgr_positive &&
               parseval_finite;
    }
};

// delta: half-width of the sampled analyticity strip used by the (A2) scan.
// Exposed as a plain number; nothing downstream consumes it numerically.
AssumptionReport validate_assumptions(const ModelSpec& model, double delta = 0.25,
                                      int grid = 96);

std::string to_string(const AssumptionReport& report);

}  // namespace qcycle
