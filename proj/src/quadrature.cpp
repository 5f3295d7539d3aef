#include "tourney/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <vector>

#include "tourney/common.hpp"

namespace tourney {

namespace {

constexpr int kPoints = 16;

struct GaussRule {
    std::array<double, kPoints> node{};
    std::array<double, kPoints> weight{};
};

// Nodes/weights of the 16-point Gauss-Legendre rule on [-1, 1], computed once
// by Newton iteration on the Legendre recurrence.
const GaussRule& rule16() {
    static const GaussRule rule = [] {
        GaussRule r;
        const int m = kPoints;
        for (int i = 0; i < m; ++i) {
            double x = std::cos(M_PI * (i + 0.75) / (m + 0.5));
            double dp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = x;
                for (int k = 2; k <= m; ++k) {
                    double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = m * (x * p1 - p0) / (x * x - 1.0);
                double dx = p1 / dp;
                x -= dx;
                if (std::abs(dx) < 1e-15) {
                    // one more pass to polish, then stop
                    p0 = 1.0;
                    p1 = x;
                    for (int k = 2; k <= m; ++k) {
                        double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                        p0 = p1;
                        p1 = p2;
                    }
                    dp = m * (x * p1 - p0) / (x * x - 1.0);
                    x -= p1 / dp;
                    break;
                }
            }
            r.node[i] = x;
            r.weight[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        return r;
    }();
    return rule;
}

double gauss16(const std::function<double(double)>& f, double a, double b, long& evals) {
    const GaussRule& r = rule16();
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double sum = 0.0;
    for (int i = 0; i < kPoints; ++i) sum += r.weight[i] * f(mid + half * r.node[i]);
    evals += kPoints;
    return half * sum;
}

struct Panel {
    double a, b;
    double fine;        // sum of the two half-panel estimates
    double left, right; // the half-panel estimates, reused as children's coarse values
    double err;         // |coarse - fine|
    int depth;
};

Panel make_panel(const std::function<double(double)>& f, double a, double b, double coarse,
                 int depth, long& evals) {
    Panel p;
    p.a = a;
    p.b = b;
    p.depth = depth;
    const double mid = 0.5 * (a + b);
    p.left = gauss16(f, a, mid, evals);
    p.right = gauss16(f, mid, b, evals);
    p.fine = p.left + p.right;
    p.err = std::abs(p.fine - coarse);
    return p;
}

struct ByError {
    bool operator()(const Panel& x, const Panel& y) const { return x.err < y.err; }
};

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           const QuadratureOptions& opts) {
    QuadratureResult res;
    if (!(a < b)) return res;

    long evals = 0;
    const double coarse0 = gauss16(f, a, b, evals);
    std::priority_queue<Panel, std::vector<Panel>, ByError> active;
    active.push(make_panel(f, a, b, coarse0, 0, evals));

    double value = active.top().fine;
    double err_active = active.top().err;
    double err_frozen = 0.0;  // panels at max depth, no longer refinable
    int splits = 0;

    auto done = [&] {
        const double err = err_active + err_frozen;
        return err <= opts.abs_tol || err <= opts.rel_tol * std::abs(value);
    };

    while (!done() && !active.empty() && splits < opts.max_splits) {
        Panel top = active.top();
        active.pop();
        err_active -= top.err;
        if (top.depth >= opts.max_depth) {
            err_frozen += top.err;
            // once the frozen deficit alone exceeds the tolerance, further
            // refinement elsewhere cannot recover convergence
            if (err_frozen > opts.abs_tol && err_frozen > opts.rel_tol * std::abs(value)) break;
            continue;
        }
        ++splits;
        const double mid = 0.5 * (top.a + top.b);
        Panel l = make_panel(f, top.a, mid, top.left, top.depth + 1, evals);
        Panel r = make_panel(f, mid, top.b, top.right, top.depth + 1, evals);
        value += (l.fine + r.fine) - top.fine;
        err_active += l.err + r.err;
        active.push(l);
        active.push(r);
    }

    res.value = value;
    res.error_estimate = err_active + err_frozen;
    res.converged = done();
    res.evaluations = evals;
    return res;
}

double integrate_or_throw(const std::function<double(double)>& f, double a, double b,
                          const QuadratureOptions& opts) {
    QuadratureResult r = integrate(f, a, b, opts);
    if (!r.converged)
        throw numeric_error("quadrature did not converge", r.error_estimate);
    return r.value;
}

}  // namespace tourney
