// qcycle_main.cpp — command-line interface: validate, run, sweep, resonances, plots

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>

#include "qcycle/csv.hpp"
#include "qcycle/hash.hpp"
#include "qcycle/runner.hpp"

using namespace qcycle;
namespace fs = std::filesystem;

int main(int argc, char** argv) {
    CLI::App app{"qcycle: cyclic thermodynamics of a driven two-level system "
                 "coupled to free-fermion reservoirs"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out";
    int workers = 1, cycles = -1;
    bool seedless = false;

    auto add_common = [&](CLI::App* sub, bool needs_config = true) {
        if (needs_config)
            sub->add_option("--config", config_path, "configuration file (JSON)")->required();
        sub->add_option("--out", out_dir, "output directory");
        sub->add_flag("--seedless", seedless,
                      "document that runs carry no randomness (always true)");
    };

    auto* c_validate = app.add_subcommand("validate", "check a configuration and model assumptions");
    add_common(c_validate);

    auto* c_run = app.add_subcommand("run", "execute a single run");
    add_common(c_run);
    c_run->add_option("--cycles", cycles, "override run.cycles");

    auto* c_sweep = app.add_subcommand("sweep", "execute the configured parameter sweep");
    add_common(c_sweep);
    c_sweep->add_option("--workers", workers, "parallel sweep workers");

    auto* c_res = app.add_subcommand("resonances", "emit the resonance table");
    add_common(c_res);
    int kmin = -2, kmax = 2;
    std::string convention = "c_liouvillean";
    c_res->add_option("--kmin", kmin, "lowest Floquet index");
    c_res->add_option("--kmax", kmax, "highest Floquet index");
    c_res->add_option("--convention", convention, "c_liouvillean | standard");

    auto* c_plots = app.add_subcommand("plots", "emit plot-data files from a run or manifest");
    std::string run_dir, manifest;
    c_plots->add_option("--run-dir", run_dir, "run directory with trajectory.csv/ledger.json");
    c_plots->add_option("--manifest", manifest, "sweep manifest.csv");
    c_plots->add_option("--out", out_dir, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (c_validate->parsed()) {
            RunConfig cfg = load_config(config_path);
            auto rep = validate_assumptions(cfg.model);
            std::cout << to_string(rep);
            DiscretizedModel dm = discretize(cfg.model, cfg.disc.scheme,
                                             cfg.disc.modes_per_reservoir, cfg.resolved_u_max());
            std::cout << "discretization: N=" << dm.dim() << " hash=" << hex_hash(dm.hash())
                      << " recurrence=" << dm.recurrence_time()
                      << " horizon=" << cfg.run.cycles * cfg.model.period() << "\n";
            std::cout << "config hash: " << hex_hash(cfg.config_hash) << "\n";
            if (!rep.ok()) {
                for (const auto& f : rep.failures) std::cout << "failure: " << f << "\n";
                return 2;
            }
            return 0;
        }
        if (c_run->parsed()) {
            RunConfig cfg = load_config(config_path);
            if (cycles > 0) cfg.run.cycles = cycles;
            RunResult r = run(cfg, out_dir);
            std::cout << report_json(r).dump(2) << "\n";
            return r.exit_code;
        }
        if (c_sweep->parsed()) {
            RunConfig cfg = load_config(config_path);
            SweepManifest m = sweep(cfg, out_dir, workers);
            int failures = 0;
            for (const auto& row : m.rows)
                if (row.status != "ok") ++failures;
            std::cout << "sweep: " << m.rows.size() << " points, " << failures
                      << " failures; manifest at " << m.manifest_csv << "\n";
            return failures == 0 ? 0 : 5;
        }
        if (c_res->parsed()) {
            RunConfig cfg = load_config(config_path);
            const auto conv = convention == "standard" ? LiouvilleanConvention::StandardFloquet
                                                       : LiouvilleanConvention::CLiouvillean;
            ResonanceTable table =
                build_resonance_table(cfg.model, conv, cfg.model.g, kmin, kmax);
            fs::create_directories(out_dir);
            {
                std::ofstream os(fs::path(out_dir) / "resonances.csv", std::ios::binary);
                write_csv(table, os);
            }
            {
                nlohmann::json j;
                j["convention"] = convention;
                j["g"] = table.g;
                j["base_frequency"] = table.base_frequency;
                j["entries"] = nlohmann::json::array();
                for (const auto& e : table.entries) {
                    nlohmann::json je;
                    je["k"] = e.k;
                    je["lamb_shift"] = e.lamb_shift;
                    je["width"] = e.width;
                    for (int jj = 0; jj < 4; ++jj)
                        je["E"].push_back({{"re", e.E[jj].real()}, {"im", e.E[jj].imag()}});
                    j["entries"].push_back(je);
                }
                std::ofstream os(fs::path(out_dir) / "resonances.json");
                os << j.dump(2) << "\n";
            }
            std::cout << "wrote resonance table (" << table.entries.size() << " k-blocks) to "
                      << out_dir << "\n";
            return 0;
        }
        if (c_plots->parsed()) {
            if (run_dir.empty() && manifest.empty())
                throw ConfigError("plots: need --run-dir or --manifest");
            if (!run_dir.empty()) emit_plots_from_run(run_dir, out_dir);
            if (!manifest.empty()) emit_plots_from_manifest(manifest, out_dir);
            std::cout << "wrote plot data to " << out_dir << "\n";
            return 0;
        }
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
