#include "qcycle/config.hpp"

#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>

#include "qcycle/hash.hpp"

namespace qcycle {

using nlohmann::json;

namespace {

[[noreturn]] void bad_key(const std::string& path, const std::string& why) {
    throw ConfigError("config error at '" + path + "': " + why);
}

double need_number(const json& j, const std::string& path, const char* key) {
    if (!j.contains(key)) bad_key(path + "." + key, "missing required number");
    if (!j[key].is_number()) bad_key(path + "." + key, "expected a number");
    return j[key].get<double>();
}

double opt_number(const json& j, const std::string& path, const char* key, double dflt) {
    if (!j.contains(key)) return dflt;
    if (!j[key].is_number()) bad_key(path + "." + key, "expected a number");
    return j[key].get<double>();
}

int opt_int(const json& j, const std::string& path, const char* key, int dflt) {
    if (!j.contains(key)) return dflt;
    if (!j[key].is_number_integer()) bad_key(path + "." + key, "expected an integer");
    return j[key].get<int>();
}

PeriodicEnvelope parse_envelope(const json& e, const std::string& path, double tau) {
    const double tau_here = opt_number(e, path, "tau", tau);
    if (e.contains("constant"))
        return PeriodicEnvelope::constant(tau_here, e["constant"].get<double>());
    if (e.contains("cosine")) {
        const auto& c = e["cosine"];
        return PeriodicEnvelope::cosine(tau_here, need_number(c, path + ".cosine", "mean"),
                                        need_number(c, path + ".cosine", "amplitude"));
    }
    if (e.contains("harmonics")) {
        std::vector<Harmonic> hs;
        for (size_t k = 0; k < e["harmonics"].size(); ++k) {
            const auto& h = e["harmonics"][k];
            const std::string hp = path + ".harmonics[" + std::to_string(k) + "]";
            hs.push_back({static_cast<int>(need_number(h, hp, "m")),
                          cxd(need_number(h, hp, "re"), opt_number(h, hp, "im", 0.0))});
        }
        return PeriodicEnvelope(tau_here, std::move(hs));
    }
    bad_key(path, "envelope needs one of: constant, cosine, harmonics");
}

RadialProfile parse_profile(const json& p, const std::string& path, MeasureKind measure) {
    const std::string kind = p.value("kind", "power_gaussian");
    if (kind == "power_gaussian") {
        return RadialProfile::power_gaussian(
            opt_int(p, path, "exponent", 2), opt_number(p, path, "scale", 1.0),
            opt_number(p, path, "amplitude", 1.0), measure);
    }
    if (kind == "tabulated") {
        if (!p.contains("u") || !p.contains("phi")) bad_key(path, "tabulated profile needs u and phi arrays");
        return RadialProfile::tabulated(p["u"].get<std::vector<double>>(),
                                        p["phi"].get<std::vector<double>>(), measure);
    }
    bad_key(path + ".kind", "unknown profile kind '" + kind + "'");
}

}  // namespace

double RunConfig::resolved_u_max() const {
    return disc.u_max > 0.0 ? disc.u_max : default_u_max(model);
}

RunConfig parse_config(const json& j) {
    RunConfig cfg;
    cfg.name = j.value("name", "run");
    if (!j.contains("model")) bad_key("model", "missing section");
    const auto& jm = j["model"];
    cfg.model.omega0 = need_number(jm, "model", "omega0");
    if (!(cfg.model.omega0 > 0.0)) bad_key("model.omega0", "must be > 0");
    cfg.model.g = need_number(jm, "model", "g");
    const double tau = need_number(jm, "model", "tau");
    if (!(tau > 0.0)) bad_key("model.tau", "must be > 0");

    if (jm.contains("initial_state")) {
        const auto& is = jm["initial_state"];
        if (is.is_string() && is.get<std::string>() == "trace") {
            cfg.init_kind = InitialStateKind::Trace;
        } else if (is.is_string() && is.get<std::string>() == "golden_rule_steady") {
            cfg.init_kind = InitialStateKind::GoldenRuleSteady;
        } else if (is.is_object() && is.contains("excited_population")) {
            cfg.init_kind = InitialStateKind::Explicit;
            const double p = is["excited_population"].get<double>();
            if (p < 0.0 || p > 1.0) bad_key("model.initial_state.excited_population", "must be in [0,1]");
            cfg.model.initial_state.excited_population = p;
        } else {
            bad_key("model.initial_state", "expected 'trace', 'golden_rule_steady', or {excited_population}");
        }
    }

    if (!jm.contains("reservoirs") || !jm["reservoirs"].is_array() || jm["reservoirs"].empty())
        bad_key("model.reservoirs", "need a non-empty array");
    for (size_t i = 0; i < jm["reservoirs"].size(); ++i) {
        const auto& jr = jm["reservoirs"][i];
        const std::string path = "model.reservoirs[" + std::to_string(i) + "]";
        ReservoirSpec r{
            need_number(jr, path, "beta"), opt_number(jr, path, "mu", 0.0),
            FormFactor{
                jr.contains("envelope") ? parse_envelope(jr["envelope"], path + ".envelope", tau)
                                        : PeriodicEnvelope::constant(tau),
                RadialProfile::power_gaussian(2, 1.0, 1.0)}};
        if (!(r.beta > 0.0) || !std::isfinite(r.beta)) bad_key(path + ".beta", "must be finite and > 0");
        MeasureKind measure = MeasureKind::Flat;
        if (jr.contains("measure")) {
            const std::string m = jr["measure"].get<std::string>();
            if (m == "flat") measure = MeasureKind::Flat;
            else if (m == "half_sqrt") measure = MeasureKind::HalfSqrt;
            else bad_key(path + ".measure", "expected 'flat' or 'half_sqrt'");
        }
        if (jr.contains("profile"))
            r.form_factor.radial = parse_profile(jr["profile"], path + ".profile", measure);
        else
            r.form_factor.radial = RadialProfile::power_gaussian(2, 1.0, 1.0, measure);
        cfg.model.reservoirs.push_back(std::move(r));
    }

    if (j.contains("discretization")) {
        const auto& jd = j["discretization"];
        const std::string scheme = jd.value("scheme", "uniform");
        if (scheme == "uniform") cfg.disc.scheme = GridScheme::Uniform;
        else if (scheme == "gauss_legendre") cfg.disc.scheme = GridScheme::GaussLegendre;
        else bad_key("discretization.scheme", "expected 'uniform' or 'gauss_legendre'");
        cfg.disc.modes_per_reservoir = opt_int(jd, "discretization", "modes_per_reservoir", 400);
        if (cfg.disc.modes_per_reservoir < 1) bad_key("discretization.modes_per_reservoir", "must be >= 1");
        cfg.disc.u_max = opt_number(jd, "discretization", "u_max", 0.0);
    }
    if (j.contains("integrator")) {
        const auto& ji = j["integrator"];
        cfg.integrator.steps_per_cycle = opt_int(ji, "integrator", "steps_per_cycle", 512);
        if (cfg.integrator.steps_per_cycle < 2) bad_key("integrator.steps_per_cycle", "must be >= 2");
        cfg.integrator.unitarity_tol = opt_number(ji, "integrator", "unitarity_tol", 1e-10);
    }
    if (j.contains("run")) {
        const auto& jr = j["run"];
        cfg.run.cycles = opt_int(jr, "run", "cycles", 100);
        if (cfg.run.cycles < 1) bad_key("run.cycles", "must be >= 1");
        cfg.run.convergence_tol = opt_number(jr, "run", "convergence_tol", 1e-6);
        cfg.run.convergence_window = opt_int(jr, "run", "convergence_window", 5);
        if (jr.contains("dense_cycles"))
            cfg.run.dense_cycles = jr["dense_cycles"].get<std::vector<int>>();
        cfg.run.validation_tail = opt_int(jr, "run", "validation_tail", 2);
        cfg.run.write_trajectory = jr.value("write_trajectory", true);
        cfg.run.write_snapshot = jr.value("write_snapshot", false);
    }
    if (j.contains("sweep")) {
        const auto& js = j["sweep"];
        auto grab = [&](const char* key, std::vector<double>& out) {
            if (js.contains(key)) out = js[key].get<std::vector<double>>();
        };
        grab("g", cfg.sweep.g);
        grab("tau", cfg.sweep.tau);
        grab("beta1", cfg.sweep.beta1);
        grab("beta2", cfg.sweep.beta2);
        if (js.contains("modes")) cfg.sweep.modes = js["modes"].get<std::vector<int>>();
        cfg.sweep.max_points = opt_int(js, "sweep", "max_points", 256);
    }

    cfg.canonical = to_json(cfg).dump();
    cfg.config_hash = Fnv1a().add(cfg.canonical).value();
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError("config parse error in '" + path + "': " + e.what());
    }
    return parse_config(j);
}

json to_json(const RunConfig& cfg) {
    json j;
    j["name"] = cfg.name;
    json jm;
    jm["omega0"] = cfg.model.omega0;
    jm["g"] = cfg.model.g;
    jm["tau"] = cfg.model.period();
    switch (cfg.init_kind) {
        case InitialStateKind::Trace: jm["initial_state"] = "trace"; break;
        case InitialStateKind::GoldenRuleSteady: jm["initial_state"] = "golden_rule_steady"; break;
        case InitialStateKind::Explicit:
            jm["initial_state"] = {{"excited_population", cfg.model.initial_state.excited_population}};
            break;
    }
    jm["reservoirs"] = json::array();
    for (const auto& r : cfg.model.reservoirs) {
        json jr;
        jr["beta"] = r.beta;
        jr["mu"] = r.mu;
        json harm = json::array();
        for (const auto& h : r.form_factor.envelope.harmonics())
            harm.push_back({{"m", h.m}, {"re", h.amplitude.real()}, {"im", h.amplitude.imag()}});
        jr["envelope"] = {{"tau", r.form_factor.envelope.period()}, {"harmonics", harm}};
        const auto& p = r.form_factor.radial;
        if (p.kind() == RadialProfile::Kind::PowerGaussian) {
            jr["profile"] = {{"kind", "power_gaussian"},
                             {"exponent", p.exponent()},
                             {"scale", p.scale()},
                             {"amplitude", p.amplitude()}};
        } else {
            jr["profile"] = {{"kind", "tabulated"}, {"u", p.table_u()}, {"phi", p.table_phi()}};
        }
        jr["measure"] = p.measure_kind() == MeasureKind::Flat ? "flat" : "half_sqrt";
        jm["reservoirs"].push_back(jr);
    }
    j["model"] = jm;
    j["discretization"] = {
        {"scheme", cfg.disc.scheme == GridScheme::Uniform ? "uniform" : "gauss_legendre"},
        {"modes_per_reservoir", cfg.disc.modes_per_reservoir},
        {"u_max", cfg.disc.u_max}};
    j["integrator"] = {{"steps_per_cycle", cfg.integrator.steps_per_cycle},
                       {"unitarity_tol", cfg.integrator.unitarity_tol}};
    j["run"] = {{"cycles", cfg.run.cycles},
                {"convergence_tol", cfg.run.convergence_tol},
                {"convergence_window", cfg.run.convergence_window},
                {"dense_cycles", cfg.run.dense_cycles},
                {"validation_tail", cfg.run.validation_tail},
                {"write_trajectory", cfg.run.write_trajectory},
                {"write_snapshot", cfg.run.write_snapshot}};
    j["sweep"] = {{"g", cfg.sweep.g},           {"tau", cfg.sweep.tau},
                  {"beta1", cfg.sweep.beta1},   {"beta2", cfg.sweep.beta2},
                  {"modes", cfg.sweep.modes},   {"max_points", cfg.sweep.max_points}};
    return j;
}

}  // namespace qcycle
