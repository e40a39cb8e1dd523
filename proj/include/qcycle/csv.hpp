// csv.hpp — RFC-4180-style CSV output with deterministic float formatting

#pragma once

#include <string>
#include <vector>

#include "qcycle/dynamics.hpp"

namespace qcycle {

struct SweepPointRow;  // runner.hpp

std::string csv_field(const std::string& raw);  // quote when needed
std::string format_double(double v);            // %.17g, locale-free

void write_trajectory_csv(const Trajectory& traj, const std::string& config_hash,
                          const std::string& disc_hash, const std::string& path);

void write_manifest_csv(const std::vector<SweepPointRow>& rows, const std::string& path);

// minimal reader used by the plot recipes: header + rows of fields,
// '#'-prefixed lines skipped
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column(const std::string& name) const;  // -1 when absent
};
CsvTable read_csv(const std::string& path);

}  // namespace qcycle
