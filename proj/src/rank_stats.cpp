#include "tourney/rank_stats.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "tourney/common.hpp"
#include "tourney/quadrature.hpp"

namespace tourney {

namespace {

double ipow(double x, int k) {
    double r = 1.0;
    for (; k > 0; k >>= 1, x *= x)
        if (k & 1) r *= x;
    return r;
}

void check_n(int n) {
    if (n < 2) throw std::domain_error("rank statistics need n >= 2, got n=" + std::to_string(n));
}

void check_r(int n, int r, int rmax) {
    if (r < 1 || r > rmax)
        throw std::domain_error("rank r=" + std::to_string(r) + " out of range for n=" +
                                std::to_string(n));
}

// All integrals run over u = F(t) in (0,1), so infinite supports and
// mass concentration are handled by the quantile transform.
double integrate01(const std::function<double(double)>& f) {
    return integrate_or_throw(f, 0.0, 1.0);
}

}  // namespace

double rank_probability(const NoiseDistribution& dist, int n, int r, double delta) {
    check_n(n);
    check_r(n, r, n);
    if (!std::isfinite(delta)) throw std::domain_error("rank_probability: delta must be finite");
    const double coeff = binomial(n - 1, r - 1);
    return coeff * integrate01([&](double u) {
        const double q = dist.cdf(delta + dist.quantile(u));
        return ipow(q, n - r) * ipow(1.0 - q, r - 1);
    });
}

RankCoefficients compute_beta(const NoiseDistribution& dist, int n) {
    check_n(n);
    RankCoefficients out;
    out.n = n;
    out.method = CoeffMethod::quadrature;
    out.beta.resize(n);
    for (int r = 1; r <= n; ++r) {
        double val;
        if (r == 1) {
            // (n-1) Int u^(n-2) f(Q(u)) du
            val = (n - 1) * integrate01([&](double u) {
                return ipow(u, n - 2) * dist.pdf(dist.quantile(u));
            });
        } else if (r == n) {
            // -(n-1) Int (1-u)^(n-2) f(Q(u)) du
            val = -(n - 1) * integrate01([&](double u) {
                return ipow(1.0 - u, n - 2) * dist.pdf(dist.quantile(u));
            });
        } else {
            const double coeff = binomial(n - 1, r - 1);
            val = coeff * integrate01([&](double u) {
                return ipow(u, n - r - 1) * ipow(1.0 - u, r - 2) *
                       (n - r - (n - 1) * u) * dist.pdf(dist.quantile(u));
            });
        }
        out.beta[r - 1] = val;
    }
    out.B.resize(n);
    double acc = 0.0;
    for (int r = 1; r <= n; ++r) {
        acc += out.beta[r - 1];
        out.B[r - 1] = acc;
    }
    out.bar_beta.resize(n - 1);
    for (int r = 1; r <= n - 1; ++r) out.bar_beta[r - 1] = out.B[r - 1] / r;
    return out;
}

std::vector<double> compute_B(const NoiseDistribution& dist, int n) {
    check_n(n);
    std::vector<double> B(n);
    for (int r = 1; r <= n - 1; ++r) {
        const double coeff = static_cast<double>(r) * binomial(n - 1, r);
        B[r - 1] = coeff * integrate01([&](double u) {
            return ipow(u, n - 1 - r) * ipow(1.0 - u, r - 1) * dist.pdf(dist.quantile(u));
        });
    }
    B[n - 1] = 0.0;
    return B;
}

std::optional<RankCoefficients> coefficients_from_closed_form(const NoiseDistribution& dist,
                                                              int n) {
    check_n(n);
    if (!dist.closed_form_B(n, 1)) return std::nullopt;
    RankCoefficients out;
    out.n = n;
    out.method = CoeffMethod::closed_form;
    out.B.resize(n);
    for (int r = 1; r <= n - 1; ++r) out.B[r - 1] = *dist.closed_form_B(n, r);
    out.B[n - 1] = 0.0;
    out.beta.resize(n);
    for (int r = 1; r <= n; ++r)
        out.beta[r - 1] = out.B[r - 1] - (r >= 2 ? out.B[r - 2] : 0.0);
    out.bar_beta.resize(n - 1);
    for (int r = 1; r <= n - 1; ++r) out.bar_beta[r - 1] = out.B[r - 1] / r;
    return out;
}

double bar_beta_hazard(const NoiseDistribution& dist, int n, int r) {
    check_n(n);
    check_r(n, r, n - 1);
    // (1/n) E[h(X_(n-r:n))]; density of the (n-r)-th smallest of n draws in
    // probability space is n!/((n-r-1)! r!) u^(n-r-1) (1-u)^r.
    const double coeff = binomial(n - 1, r);
    return coeff * integrate01([&](double u) {
        return ipow(u, n - r - 1) * ipow(1.0 - u, r) * dist.hazard(dist.quantile(u));
    });
}

int r_hat(const RankCoefficients& coeffs) {
    int best = 0;
    for (int r = 1; r <= coeffs.n; ++r)
        if (coeffs.beta[r - 1] > kZeroBand) best = r;
    if (best == 0) throw std::domain_error("r_hat: no strictly positive beta (invalid coefficients)");
    return best;
}

}  // namespace tourney
