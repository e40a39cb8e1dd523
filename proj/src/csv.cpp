#include "qcycle/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "qcycle/hash.hpp"
#include "qcycle/runner.hpp"

namespace qcycle {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string csv_field(const std::string& raw) {
    if (raw.find_first_of(",\"\r\n") == std::string::npos) return raw;
    std::string out = "\"";
    for (char c : raw) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

void write_trajectory_csv(const Trajectory& traj, const std::string& config_hash,
                          const std::string& disc_hash, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("write_trajectory_csv: cannot open '" + path + "'");
    os << "# config=" << config_hash << " discretization=" << disc_hash << "\r\n";
    os << "t,cycle,boundary,population";
    for (int i = 0; i < traj.reservoirs; ++i) os << ",E_" << i + 1;
    for (int i = 0; i < traj.reservoirs; ++i) os << ",N_" << i + 1;
    for (int i = 0; i < traj.reservoirs; ++i) os << ",flux_" << i + 1;
    for (int i = 0; i < traj.reservoirs; ++i) os << ",number_flux_" << i + 1;
    os << ",Ent,Ep\r\n";
    for (const auto& s : traj.samples) {
        os << format_double(s.t) << ',' << s.cycle_index << ',' << (s.cycle_boundary ? 1 : 0)
           << ',' << format_double(s.impurity_population);
        for (int i = 0; i < traj.reservoirs; ++i) os << ',' << format_double(s.reservoir_E(i));
        for (int i = 0; i < traj.reservoirs; ++i) os << ',' << format_double(s.reservoir_N(i));
        for (int i = 0; i < traj.reservoirs; ++i) os << ',' << format_double(s.flux(i));
        for (int i = 0; i < traj.reservoirs; ++i)
            os << ',' << format_double(s.number_flux_v(i));
        os << ',' << format_double(s.entropy) << ',' << format_double(s.ep_rate) << "\r\n";
    }
}

void write_manifest_csv(const std::vector<SweepPointRow>& rows, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("write_manifest_csv: cannot open '" + path + "'");
    os << "index,name,status,config_hash,g,tau,beta1,beta2,modes,converged,n_star,"
          "Q1,Q2,dA,dEnt,noise_floor,regime,eta,eta_carnot,margin,fitted_rate,"
          "predicted_rate,gap_rate\r\n";
    for (const auto& r : rows) {
        os << r.index << ',' << csv_field(r.name) << ','
           << csv_field(r.status == "ok" ? "ok" : r.status) << ',';
        if (r.status == "ok") {
            const RunResult& x = r.result;
            const bool eng = x.engine.has_value();
            os << hex_hash(x.cfg.config_hash) << ',' << format_double(r.g) << ','
               << format_double(r.tau) << ',' << format_double(r.beta1) << ','
               << format_double(r.beta2) << ',' << r.modes << ','
               << (x.convergence.converged ? 1 : 0) << ',' << x.convergence.n_star << ','
               << format_double(eng ? x.engine->Q1 : 0.0) << ','
               << format_double(eng ? x.engine->Q2 : 0.0) << ','
               << format_double(eng ? x.engine->dA : 0.0) << ','
               << format_double(x.convergence.converged ? x.entropy.mean : 0.0) << ','
               << format_double(x.ledger.noise_floor) << ','
               << (eng ? to_string(x.engine->regime) : "n/a") << ','
               << (eng && x.engine->eta ? format_double(*x.engine->eta) : "") << ','
               << format_double(eng ? x.engine->eta_carnot : 0.0) << ','
               << (eng && x.engine->margin ? format_double(*x.engine->margin) : "") << ','
               << format_double(x.convergence.fitted_rate) << ','
               << format_double(x.predicted_population_rate) << ','
               << format_double(x.predicted_gap_rate);
        } else {
            os << ",," << format_double(r.g) << ',' << format_double(r.tau) << ','
               << format_double(r.beta1) << ',' << format_double(r.beta2) << ',' << r.modes
               << ",,,,,,,,,,,,,";
        }
        os << "\r\n";
    }
}

CsvTable read_csv(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("read_csv: cannot open '" + path + "'");
    CsvTable t;
    std::string line;
    bool header_done = false;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        // simple split (fields in our files never contain quoted commas)
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string f;
        while (std::getline(ss, f, ',')) fields.push_back(f);
        if (line.back() == ',') fields.push_back("");
        if (!header_done) {
            t.header = fields;
            header_done = true;
        } else {
            t.rows.push_back(fields);
        }
    }
    return t;
}

int CsvTable::column(const std::string& name) const {
    for (size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return static_cast<int>(i);
    return -1;
}

}  // namespace qcycle
