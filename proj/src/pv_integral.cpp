#include "qcycle/pv_integral.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

namespace qcycle {

namespace {

// Gauss-Kronrod 15(7) on [-1,1]
constexpr double xgk[8] = {0.991455371120813, 0.949107912342759, 0.864864423359769,
                           0.741531185599394, 0.586087235467691, 0.405845151377397,
                           0.207784955007898, 0.0};
constexpr double wgk[8] = {0.022935322010529, 0.063092092629979, 0.104790010322250,
                           0.140653259715525, 0.169004726639267, 0.190350578064785,
                           0.204432940075298, 0.209482141084728};
constexpr double wg[4] = {0.129484966168870, 0.279705391489277, 0.381830050505119,
                          0.417959183673469};

struct Panel {
    double a, b, integral, err;
    bool operator<(const Panel& o) const { return err < o.err; }
};

Panel gk15(const std::function<double(double)>& f, double a, double b, long& evals) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double resk = 0.0, resg = 0.0;
    for (int j = 0; j < 7; ++j) {
        const double fv1 = f(c - h * xgk[j]);
        const double fv2 = f(c + h * xgk[j]);
        resk += wgk[j] * (fv1 + fv2);
        if (j % 2 == 1) resg += wg[j / 2] * (fv1 + fv2);
    }
    const double fc = f(c);
    resk += wgk[7] * fc;
    resg += wg[3] * fc;
    evals += 15;
    Panel p;
    p.a = a;
    p.b = b;
    p.integral = resk * h;
    p.err = std::abs((resk - resg) * h);
    // sharpen the raw (K-G) difference the way QUADPACK does
    const double scale = std::abs(resk * h);
    if (p.err > 0 && scale > 0)
        p.err = std::min(p.err, scale * std::pow(200.0 * p.err / scale, 1.5));
    return p;
}

PVResult adapt(const std::function<double(double)>& f, double lo, double hi, double tol,
               const std::vector<double>& splits, int max_intervals) {
    std::vector<double> pts{lo, hi};
    for (double s : splits)
        if (s > lo && s < hi) pts.push_back(s);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

    long evals = 0;
    std::priority_queue<Panel> q;
    double total = 0.0, toterr = 0.0;
    for (size_t i = 0; i + 1 < pts.size(); ++i) {
        Panel p = gk15(f, pts[i], pts[i + 1], evals);
        total += p.integral;
        toterr += p.err;
        q.push(p);
    }
    int n = static_cast<int>(pts.size()) - 1;
    while (toterr > tol && n < max_intervals) {
        Panel worst = q.top();
        q.pop();
        if (worst.b - worst.a < 1e-15 * (std::abs(worst.a) + std::abs(worst.b) + 1.0)) {
            q.push(worst);  // cannot refine further
            break;
        }
        const double mid = 0.5 * (worst.a + worst.b);
        Panel p1 = gk15(f, worst.a, mid, evals);
        Panel p2 = gk15(f, mid, worst.b, evals);
        total += p1.integral + p2.integral - worst.integral;
        toterr += p1.err + p2.err - worst.err;
        q.push(p1);
        q.push(p2);
        n += 1;
    }
    if (toterr > tol)
        throw QuadratureError("adaptive quadrature did not reach tolerance (achieved " +
                                  std::to_string(toterr) + ", requested " +
                                  std::to_string(tol) + ")",
                              toterr);
    PVResult r;
    r.value = total;
    r.error_estimate = toterr;
    r.evaluations = evals;
    return r;
}

}  // namespace

PVResult integrate_adaptive(const std::function<double(double)>& f, double lo, double hi,
                            double tol, const std::vector<double>& splits,
                            int max_intervals) {
    if (!(hi > lo)) throw ConfigError("integrate_adaptive: empty domain");
    return adapt(f, lo, hi, tol, splits, max_intervals);
}

PVResult pv_integral(const PVIntegrandSpec& spec) {
    if (!(spec.hi > spec.lo)) throw ConfigError("pv_integral: empty domain");
    if (!(spec.tol > 0.0)) throw ConfigError("pv_integral: tolerance must be > 0");
    const double E = spec.pole;
    const auto& W = spec.weight;

    if (E <= spec.lo || E >= spec.hi) {
        auto f = [&](double u) { return W(u) / (E - u); };
        return adapt(f, spec.lo, spec.hi, spec.tol, spec.split_points,
                     spec.max_intervals);
    }

    const double WE = W(E);
    auto g = [&](double u) {
        const double d = E - u;
        if (std::abs(d) < 1e-14 * (1.0 + std::abs(E))) {
            // symmetric difference quotient at the removable point
            const double h = 1e-7 * (1.0 + std::abs(E));
            return (W(E - h) - W(E + h)) / (2.0 * h);
        }
        return (W(u) - WE) / d;
    };
    std::vector<double> splits = spec.split_points;
    splits.push_back(E);
    PVResult r = adapt(g, spec.lo, spec.hi, spec.tol, splits, spec.max_intervals);
    r.value += WE * std::log((E - spec.lo) / (spec.hi - E));
    return r;
}

}  // namespace qcycle
