#include "qcycle/cycle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qcycle {

double per_cycle_heat(const Trajectory& traj, int i, int n) {
    if (i < 0 || i >= traj.reservoirs) throw ConfigError("per_cycle_heat: unknown reservoir");
    const Sample* a = nullptr;
    const Sample* b = nullptr;
    try {
        a = &traj.boundary(n);
        b = &traj.boundary(n + 1);
    } catch (const StateError&) {
        throw StateError("per_cycle_heat: trajectory does not cover cycle " +
                         std::to_string(n));
    }
    return -(b->reservoir_E(i) - a->reservoir_E(i));
}

CycleLedger build_ledger(const Trajectory& traj, const DiscretizedModel& dm) {
    CycleLedger led;
    led.tau = traj.tau;
    led.beta = traj.beta;
    led.mu = traj.mu;
    led.recurrence_time = dm.recurrence_time();
    const int n_cycles = traj.complete_cycles();
    led.horizon_within_recurrence = n_cycles * traj.tau <= led.recurrence_time;

    // per-cycle integral of Ep over densely sampled cycles (Simpson on the
    // uniform intra-cycle grid) for the balance residual
    std::vector<double> ep_integral(n_cycles, std::numeric_limits<double>::quiet_NaN());
    {
        const double tol = 1e-9 * traj.tau;
        size_t idx = 0;
        for (int c = 0; c < n_cycles; ++c) {
            const double t0 = c * traj.tau, t1 = (c + 1) * traj.tau;
            while (idx < traj.samples.size() && traj.samples[idx].t < t0 - tol) ++idx;
            std::vector<const Sample*> v;
            for (size_t k = idx; k < traj.samples.size() && traj.samples[k].t <= t1 + tol; ++k)
                v.push_back(&traj.samples[k]);
            // needs a dense grid with both boundaries
            if (v.size() < 9 || std::abs(v.front()->t - t0) > tol ||
                std::abs(v.back()->t - t1) > tol)
                continue;
            double acc = 0.0;
            bool uniform = true;
            const double h0 = v[1]->t - v[0]->t;
            for (size_t k = 0; k + 1 < v.size(); ++k)
                if (std::abs((v[k + 1]->t - v[k]->t) - h0) > 1e-9 * traj.tau) uniform = false;
            const size_t m = v.size() - 1;
            if (uniform && m % 2 == 0) {
                for (size_t k = 0; k < m; k += 2)
                    acc += (v[k]->ep_rate + 4.0 * v[k + 1]->ep_rate + v[k + 2]->ep_rate) *
                           h0 / 3.0;
            } else {
                for (size_t k = 0; k < m; ++k)
                    acc += 0.5 * (v[k]->ep_rate + v[k + 1]->ep_rate) *
                           (v[k + 1]->t - v[k]->t);
            }
            ep_integral[c] = acc;
        }
    }

    double max_resid = 0.0;
    for (int n = 0; n < n_cycles; ++n) {
        const Sample& a = traj.boundary(n);
        const Sample& b = traj.boundary(n + 1);
        CycleRecord rec;
        rec.n = n;
        rec.Q = -(b.reservoir_E - a.reservoir_E);
        rec.Q_eff = rec.Q + traj.mu.cwiseProduct(b.reservoir_N - a.reservoir_N);
        rec.dEnt = b.entropy - a.entropy;
        rec.dA = rec.Q.sum();
        rec.population = a.impurity_population;
        if (std::isfinite(ep_integral[n])) {
            rec.balance_residual = std::abs(rec.dEnt - ep_integral[n]);
            max_resid = std::max(max_resid, rec.balance_residual);
        }
        led.cycles.push_back(std::move(rec));
    }
    led.noise_floor = 10.0 * std::max(max_resid, 1e-15);
    double escale = 0.0;
    for (int i = 0; i < static_cast<int>(traj.E0.size()); ++i)
        escale += std::abs(traj.E0(i));
    led.abs_floor = 1e-7 * (1.0 + escale);
    return led;
}

namespace {

struct Series {
    std::string name;
    std::vector<double> x;
};

std::vector<Series> ledger_series(const CycleLedger& led) {
    std::vector<Series> out;
    const int R = static_cast<int>(led.beta.size());
    for (int i = 0; i < R; ++i) {
        Series s;
        s.name = "Q" + std::to_string(i + 1);
        for (const auto& c : led.cycles) s.x.push_back(c.Q(i));
        out.push_back(std::move(s));
    }
    Series e{"dEnt", {}};
    Series p{"population", {}};
    for (const auto& c : led.cycles) {
        e.x.push_back(c.dEnt);
        p.x.push_back(c.population);
    }
    out.push_back(std::move(e));
    out.push_back(std::move(p));
    return out;
}

double series_scale(const std::vector<double>& x) {
    double m = 0.0;
    for (double v : x) m = std::max(m, std::abs(v));
    return std::max(m, 1e-300);
}

// least-squares slope of log|x - x_inf| vs n tau over the decaying stretch
double fit_rate(const std::vector<double>& x, double tau) {
    const int n = static_cast<int>(x.size());
    if (n < 12) return 0.0;
    const int tail = std::max(4, n / 8);
    double xinf = 0.0;
    for (int k = n - tail; k < n; ++k) xinf += x[k];
    xinf /= tail;
    double noise = 0.0;
    for (int k = n - tail; k < n; ++k) noise = std::max(noise, std::abs(x[k] - xinf));
    std::vector<double> ts, ys;
    for (int k = 1; k < n - tail; ++k) {
        const double dev = std::abs(x[k] - xinf);
        if (dev > 30.0 * std::max(noise, 1e-300)) {
            ts.push_back(k * tau);
            ys.push_back(std::log(dev));
        }
    }
    if (ts.size() < 5) return 0.0;
    double st = 0, sy = 0, stt = 0, sty = 0;
    const double m = static_cast<double>(ts.size());
    for (size_t k = 0; k < ts.size(); ++k) {
        st += ts[k];
        sy += ys[k];
        stt += ts[k] * ts[k];
        sty += ts[k] * ys[k];
    }
    const double slope = (m * sty - st * sy) / (m * stt - st * st);
    return -slope;
}

}  // namespace

ConvergenceResult detect_periodic_convergence(const CycleLedger& led, double tol,
                                              int window) {
    ConvergenceResult res;
    res.tol = tol;
    res.window = window;
    if (led.size() < window + 1) {
        res.status = "not-converged: fewer cycles than the window";
        return res;
    }
    const auto series = ledger_series(led);
    std::vector<double> scales;
    for (const auto& s : series)
        scales.push_back(std::max(series_scale(s.x), led.abs_floor));

    const int n = led.size();
    int run = 0;
    int n_star = -1;
    for (int k = 1; k < n; ++k) {
        double rel = 0.0;
        for (size_t j = 0; j < series.size(); ++j)
            rel = std::max(rel, std::abs(series[j].x[k] - series[j].x[k - 1]) / scales[j]);
        const bool quiet = tol > 0.0 && rel < tol;
        run = quiet ? run + 1 : 0;
        if (run >= window) {
            n_star = k - window;  // first cycle of the stable stretch
            break;
        }
    }
    if (n_star < 0) {
        res.status = led.horizon_within_recurrence
                         ? "not-converged: tolerance not reached before the horizon"
                         : "not-converged: horizon exceeds the recurrence estimate";
        return res;
    }
    res.converged = true;
    res.n_star = n_star;
    res.status = "converged";
    for (const auto& s : series) {
        const int tail = std::min(std::max(window, 4), n);
        double m = 0.0;
        for (int k = n - tail; k < n; ++k) m += s.x[k];
        res.limits[s.name] = m / tail;
        res.fitted_rates[s.name] = fit_rate(s.x, led.tau);
    }
    res.fitted_rate = res.fitted_rates.at("population");
    return res;
}

EntropyPerCycle entropy_per_cycle(const CycleLedger& led, const ConvergenceResult& conv) {
    if (!conv.converged)
        throw StateError("entropy_per_cycle: run did not converge to a time-periodic state");
    EntropyPerCycle out;
    const int n = led.size();
    const int w = std::min(std::max(conv.window, 4), n - conv.n_star);
    out.window_first = n - w;
    out.window_last = n - 1;
    double m = 0.0;
    for (int k = out.window_first; k < n; ++k) m += led.cycles[k].dEnt;
    out.mean = m / w;
    double v = 0.0;
    for (int k = out.window_first; k < n; ++k) {
        const double d = led.cycles[k].dEnt - out.mean;
        v += d * d;
    }
    out.spread = w > 1 ? std::sqrt(v / (w - 1)) : 0.0;
    return out;
}

const char* to_string(Regime r) {
    switch (r) {
        case Regime::Engine: return "engine";
        case Regime::Heater: return "heater";
        case Regime::Refrigerator: return "refrigerator";
        default: return "undetermined";
    }
}

EngineReport efficiency(const CycleLedger& led, const ConvergenceResult& conv, double T1,
                        double T2) {
    if (led.beta.size() != 2)
        throw UnsupportedError("efficiency: defined for exactly two reservoirs");
    if (!(T1 > T2)) throw ConfigError("efficiency: requires T1 > T2");
    if (!conv.converged) throw StateError("efficiency: run did not converge");

    EngineReport rep;
    rep.n_star = conv.n_star;
    rep.eta_carnot = (T1 - T2) / T1;
    const auto ent = entropy_per_cycle(led, conv);
    const int n = led.size();
    const int w = n - ent.window_first;
    double q1 = 0.0, q2 = 0.0;
    for (int k = ent.window_first; k < n; ++k) {
        q1 += led.cycles[k].Q(0);
        q2 += led.cycles[k].Q(1);
    }
    rep.Q1 = q1 / w;
    rep.Q2 = q2 / w;
    rep.dA = rep.Q1 + rep.Q2;
    rep.dEnt = ent.mean;

    const double floor = led.noise_floor;
    if (rep.Q1 > 0.0 && rep.dA >= -floor) {
        rep.regime = Regime::Engine;
        rep.eta = rep.dA / rep.Q1;
        rep.margin = rep.eta_carnot - T2 * rep.dEnt / rep.Q1 - *rep.eta;
    } else if (rep.dA < -floor && rep.Q2 > 0.0) {
        rep.regime = Regime::Refrigerator;
    } else if (rep.dA < -floor) {
        rep.regime = Regime::Heater;
    } else {
        rep.regime = Regime::Undetermined;
    }
    return rep;
}

Prop21Report prop21_diagnostic(const CycleLedger& led, const ConvergenceResult& conv) {
    Prop21Report rep;
    if (led.size() == 0) return rep;
    // periodic profile value: converged dEnt limit (0 for an all-zero ledger)
    double d_per = 0.0;
    if (conv.converged) {
        d_per = conv.limits.at("dEnt");
    } else {
        const int tail = std::max(2, led.size() / 8);
        for (int k = led.size() - tail; k < led.size(); ++k) d_per += led.cycles[k].dEnt;
        d_per /= tail;
    }
    double acc = 0.0, sup = 0.0;
    rep.running_sup.reserve(led.size());
    for (const auto& c : led.cycles) {
        acc += d_per - c.dEnt;
        sup = std::max(sup, std::abs(acc));
        rep.running_sup.push_back(sup);
    }
    rep.sup_abs = sup;
    // plateau: essentially all of the sup is reached by three quarters of the
    // run (small trailing drift from the estimated periodic profile allowed)
    const int n = static_cast<int>(rep.running_sup.size());
    const int q = std::max(1, n / 4);
    rep.plateau = n >= 8 && rep.running_sup[n - 1 - q] >= sup * 0.95;
    return rep;
}

}  // namespace qcycle
