// snapshot.hpp — versioned binary restart snapshots of a covariance state

#pragma once

#include <string>

#include "qcycle/dynamics.hpp"

namespace qcycle {

struct Snapshot {
    CovarianceState state;
    double tau = 0.0;
    int cycle = 0;
    uint64_t config_hash = 0;
    uint64_t discretization_hash = 0;
};

// layout: magic "QCYCSNP1", u32 version, u64 config hash, u64 discretization
// hash, f64 tau, i32 cycle, f64 time, i32 N, N*N complex<double> (column major)
void save_snapshot(const std::string& path, const Snapshot& snap);
Snapshot load_snapshot(const std::string& path);

}  // namespace qcycle
