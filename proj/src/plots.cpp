#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>

#include "qcycle/csv.hpp"
#include "qcycle/runner.hpp"

namespace qcycle {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::ofstream open_out(const fs::path& p) {
    fs::create_directories(p.parent_path());
    std::ofstream os(p, std::ios::binary);
    if (!os) throw ConfigError("emit_plots: cannot open '" + p.string() + "'");
    return os;
}

void require_columns(const CsvTable& t, std::initializer_list<const char*> names,
                     const std::string& what) {
    for (const char* n : names)
        if (t.column(n) < 0)
            throw ConfigError("emit_plots: " + what + " is missing column '" + n + "'");
}

}  // namespace

void emit_plots_from_run(const std::string& run_dir, const std::string& out_dir) {
    const fs::path traj_path = fs::path(run_dir) / "trajectory.csv";
    const fs::path ledger_path = fs::path(run_dir) / "ledger.json";
    if (!fs::exists(traj_path) || !fs::exists(ledger_path))
        throw ConfigError("emit_plots: run directory lacks trajectory.csv or ledger.json");

    // flux vs t
    {
        CsvTable t = read_csv(traj_path.string());
        require_columns(t, {"t", "flux_1", "Ep"}, "trajectory.csv");
        auto os = open_out(fs::path(out_dir) / "flux_vs_t.csv");
        os << "t";
        for (const auto& h : t.header)
            if (h.rfind("flux_", 0) == 0) os << ',' << h;
        os << ",Ep\r\n";
        const int ct = t.column("t");
        const int cep = t.column("Ep");
        for (const auto& row : t.rows) {
            os << row[ct];
            for (size_t i = 0; i < t.header.size(); ++i)
                if (t.header[i].rfind("flux_", 0) == 0) os << ',' << row[i];
            os << ',' << row[cep] << "\r\n";
        }
    }
    // entropy per cycle vs n
    {
        std::ifstream is(ledger_path);
        json j;
        is >> j;
        if (!j.contains("cycles")) throw ConfigError("emit_plots: ledger.json lacks 'cycles'");
        auto os = open_out(fs::path(out_dir) / "entropy_per_cycle.csv");
        os << "n,dEnt,cumulative\r\n";
        double acc = 0.0;
        for (const auto& c : j["cycles"]) {
            acc += c["dEnt"].get<double>();
            os << c["n"].get<int>() << ',' << format_double(c["dEnt"].get<double>()) << ','
               << format_double(acc) << "\r\n";
        }
    }
}

void emit_plots_from_manifest(const std::string& manifest_csv, const std::string& out_dir) {
    CsvTable t = read_csv(manifest_csv);
    require_columns(t, {"g", "eta", "eta_carnot", "regime", "dEnt", "predicted_rate",
                        "gap_rate", "fitted_rate", "status"},
                    "manifest.csv");
    const int cg = t.column("g"), ce = t.column("eta"), cc = t.column("eta_carnot"),
              cr = t.column("regime"), cd = t.column("dEnt"), cs = t.column("status"),
              cp = t.column("predicted_rate"), cgap = t.column("gap_rate"),
              cf = t.column("fitted_rate");
    {
        auto os = open_out(fs::path(out_dir) / "eta_vs_g.csv");
        os << "g,eta,eta_carnot,regime,dEnt\r\n";
        for (const auto& row : t.rows) {
            if (row[cs] != "ok") continue;
            os << row[cg] << ',' << row[ce] << ',' << row[cc] << ',' << row[cr] << ','
               << row[cd] << "\r\n";
        }
    }
    {
        auto os = open_out(fs::path(out_dir) / "widths_vs_g.csv");
        os << "g,population_rate,gap_rate,fitted_rate\r\n";
        for (const auto& row : t.rows) {
            if (row[cs] != "ok") continue;
            os << row[cg] << ',' << row[cp] << ',' << row[cgap] << ',' << row[cf] << "\r\n";
        }
    }
}

}  // namespace qcycle
