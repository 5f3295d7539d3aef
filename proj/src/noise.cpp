#include "tourney/noise.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "tourney/common.hpp"

namespace tourney {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double harmonic(int k) {
    double h = 0.0;
    for (int j = k; j >= 1; --j) h += 1.0 / j;
    return h;
}

void check_rank_range(int n, int r) {
    if (n < 2) throw std::domain_error("closed_form_B: n must be >= 2");
    if (r < 1 || r > n - 1)
        throw std::domain_error("closed_form_B: r must satisfy 1 <= r <= n-1, got r=" +
                                std::to_string(r) + ", n=" + std::to_string(n));
}

// Inverse standard normal cdf: Acklam's rational approximation polished with
// one Halley step against the erfc-based cdf.
double normal_quantile_std(double p) {
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    double x;
    if (p < plow) {
        double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - plow) {
        double q = p - 0.5, r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        double q = std::sqrt(-2.0 * std::log1p(-p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    // Halley refinement
    double e = 0.5 * std::erfc(-x / M_SQRT2) - p;
    double u = e * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
    x -= u / (1.0 + 0.5 * x * u);
    return x;
}

struct UniformImpl : NoiseDistribution::Impl {
    double b;
    explicit UniformImpl(double width) : b(width) {
        if (!(width > 0.0) || !std::isfinite(width))
            throw std::invalid_argument("uniform: width b must be positive");
    }
    FamilyCatalogEntry catalog() const override {
        return {Family::uniform, true, true, false, true, true};
    }
    Support support() const override { return {-0.5 * b, 0.5 * b}; }
    std::string spec_string() const override {
        std::ostringstream os;
        os << "uniform:b=" << b;
        return os.str();
    }
    double cdf(double t) const override {
        if (t <= -0.5 * b) return 0.0;
        if (t >= 0.5 * b) return 1.0;
        return (t + 0.5 * b) / b;
    }
    double pdf(double t) const override {
        return (t >= -0.5 * b && t <= 0.5 * b) ? 1.0 / b : 0.0;
    }
    double quantile(double u) const override { return b * (u - 0.5); }
    double hazard(double t) const override { return 1.0 / (0.5 * b - t); }
    std::optional<double> closed_form_B(int n, int r) const override {
        check_rank_range(n, r);
        return 1.0 / b;
    }
};

struct GumbelImpl : NoiseDistribution::Impl {
    FamilyCatalogEntry catalog() const override {
        return {Family::gumbel, true, true, false, true, true};
    }
    Support support() const override { return {-kInf, kInf}; }
    std::string spec_string() const override { return "gumbel"; }
    double cdf(double t) const override { return std::exp(-std::exp(-t)); }
    double pdf(double t) const override {
        double a = std::exp(-t);
        if (!std::isfinite(a)) return 0.0;  // far left tail underflows to zero density
        return a * std::exp(-a);
    }
    double quantile(double u) const override { return -std::log(-std::log(u)); }
    double hazard(double t) const override {
        double a = std::exp(-t);
        if (!std::isfinite(a)) return 0.0;
        // 1 - cdf = -expm1(-a), stable where exp(-a) rounds to 1
        return a * std::exp(-a) / (-std::expm1(-a));
    }
    std::optional<double> closed_form_B(int n, int r) const override {
        check_rank_range(n, r);
        return (1.0 - static_cast<double>(r) / n) * (harmonic(n) - harmonic(n - r));
    }
};

struct ParetoImpl : NoiseDistribution::Impl {
    FamilyCatalogEntry catalog() const override {
        return {Family::pareto, true, false, true, true, true};
    }
    Support support() const override { return {1.0, kInf}; }
    std::string spec_string() const override { return "pareto"; }
    double cdf(double t) const override { return t <= 1.0 ? 0.0 : 1.0 - 1.0 / t; }
    double pdf(double t) const override { return t < 1.0 ? 0.0 : 1.0 / (t * t); }
    double quantile(double u) const override { return 1.0 / (1.0 - u); }
    double hazard(double t) const override { return t < 1.0 ? 0.0 : 1.0 / t; }
    std::optional<double> closed_form_B(int n, int r) const override {
        check_rank_range(n, r);
        return static_cast<double>(r) * (r + 1) / (static_cast<double>(n) * (n + 1));
    }
};

struct BurrImpl : NoiseDistribution::Impl {
    FamilyCatalogEntry catalog() const override {
        return {Family::burr, true, false, false, true, true};
    }
    Support support() const override { return {0.0, kInf}; }
    std::string spec_string() const override { return "burr"; }
    double cdf(double t) const override { return t <= 0.0 ? 0.0 : 1.0 - 1.0 / (1.0 + t * t); }
    double pdf(double t) const override {
        if (t < 0.0) return 0.0;
        double s = 1.0 + t * t;
        return 2.0 * t / (s * s);
    }
    double quantile(double u) const override { return std::sqrt(u / (1.0 - u)); }
    double hazard(double t) const override { return t < 0.0 ? 0.0 : 2.0 * t / (1.0 + t * t); }
    std::optional<double> closed_form_B(int n, int r) const override {
        check_rank_range(n, r);
        // pi (n-r) r (r+1) / (2^(2n-1) n (n+1)) * C(2n-2r-1, n-r) * C(2r+1, r)
        if (n <= 80) {
            double c1 = binomial(2 * n - 2 * r - 1, n - r);
            double c2 = binomial(2 * r + 1, r);
            double v = M_PI * (n - r) * static_cast<double>(r) * (r + 1) * c1 * c2 /
                       (static_cast<double>(n) * (n + 1));
            return std::ldexp(v, -(2 * n - 1));
        }
        // log space once the binomials could overflow the double range
        auto lchoose = [](int a, int k) {
            return std::lgamma(a + 1.0) - std::lgamma(k + 1.0) - std::lgamma(a - k + 1.0);
        };
        double lv = std::log(M_PI) + std::log(static_cast<double>(n - r)) +
                    std::log(static_cast<double>(r)) + std::log(r + 1.0) +
                    lchoose(2 * n - 2 * r - 1, n - r) + lchoose(2 * r + 1, r) -
                    (2 * n - 1) * M_LN2 - std::log(static_cast<double>(n)) -
                    std::log(n + 1.0);
        return std::exp(lv);
    }
};

struct NormalImpl : NoiseDistribution::Impl {
    double sigma;
    explicit NormalImpl(double s) : sigma(s) {
        if (!(s > 0.0) || !std::isfinite(s))
            throw std::invalid_argument("normal: sigma must be positive");
    }
    FamilyCatalogEntry catalog() const override {
        return {Family::normal, false, true, false, true, true};
    }
    Support support() const override { return {-kInf, kInf}; }
    std::string spec_string() const override {
        std::ostringstream os;
        os << "normal:sigma=" << sigma;
        return os.str();
    }
    double cdf(double t) const override { return 0.5 * std::erfc(-t / (sigma * M_SQRT2)); }
    double pdf(double t) const override {
        double z = t / sigma;
        return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * M_PI));
    }
    double quantile(double u) const override { return sigma * normal_quantile_std(u); }
    double hazard(double t) const override {
        // survival via erfc keeps the ratio stable deep in the right tail
        double z = t / sigma;
        double surv = 0.5 * std::erfc(z / M_SQRT2);
        if (surv <= 0.0) throw singularity_error("normal hazard: survival underflowed");
        return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * M_PI)) / surv;
    }
};

double parse_param(std::string_view spec, std::string_view body, std::string_view key) {
    auto eq = body.find('=');
    if (eq == std::string_view::npos || body.substr(0, eq) != key)
        throw std::invalid_argument("distribution spec '" + std::string(spec) + "': expected " +
                                    std::string(key) + "=<value>");
    try {
        size_t used = 0;
        std::string tail(body.substr(eq + 1));
        double v = std::stod(tail, &used);
        if (used != tail.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("distribution spec '" + std::string(spec) +
                                    "': bad numeric value for " + std::string(key));
    }
}

}  // namespace

NoiseDistribution::NoiseDistribution(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {
    if (!impl_) throw std::invalid_argument("NoiseDistribution: null implementation");
}

NoiseDistribution NoiseDistribution::uniform(double width) {
    return NoiseDistribution(std::make_shared<UniformImpl>(width));
}
NoiseDistribution NoiseDistribution::gumbel() {
    return NoiseDistribution(std::make_shared<GumbelImpl>());
}
NoiseDistribution NoiseDistribution::pareto() {
    return NoiseDistribution(std::make_shared<ParetoImpl>());
}
NoiseDistribution NoiseDistribution::burr() {
    return NoiseDistribution(std::make_shared<BurrImpl>());
}
NoiseDistribution NoiseDistribution::normal(double sigma) {
    return NoiseDistribution(std::make_shared<NormalImpl>(sigma));
}

NoiseDistribution NoiseDistribution::parse(std::string_view spec) {
    auto colon = spec.find(':');
    std::string_view head = spec.substr(0, colon);
    std::string_view body = colon == std::string_view::npos ? std::string_view{}
                                                            : spec.substr(colon + 1);
    if (head == "gumbel" || head == "pareto" || head == "burr") {
        if (!body.empty())
            throw std::invalid_argument("distribution spec '" + std::string(spec) +
                                        "': family takes no parameters");
        if (head == "gumbel") return gumbel();
        if (head == "pareto") return pareto();
        return burr();
    }
    if (head == "uniform") return uniform(parse_param(spec, body, "b"));
    if (head == "normal") return normal(parse_param(spec, body, "sigma"));
    throw std::invalid_argument("distribution spec '" + std::string(spec) +
                                "': unknown family '" + std::string(head) + "'");
}

double NoiseDistribution::quantile(double u) const {
    if (!(u > 0.0 && u < 1.0))
        throw std::domain_error("quantile: argument must lie strictly inside (0,1)");
    return impl_->quantile(u);
}

double NoiseDistribution::hazard(double t) const {
    if (t >= support().hi)
        throw singularity_error("hazard undefined at cdf = 1 (t >= upper support endpoint)");
    return impl_->hazard(t);
}

std::optional<double> NoiseDistribution::closed_form_B(int n, int r) const {
    return impl_->closed_form_B(n, r);
}

double eval(const NoiseDistribution& dist, FuncKind which, double t) {
    switch (which) {
        case FuncKind::cdf: return dist.cdf(t);
        case FuncKind::pdf: return dist.pdf(t);
        case FuncKind::quantile: return dist.quantile(t);
        case FuncKind::hazard: return dist.hazard(t);
    }
    throw std::invalid_argument("eval: bad function kind");
}

double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    k = std::min(k, n - k);
    if (k == 0) return 1.0;
    // exact while the running product fits; n <= 62 always does
    if (n <= 62) {
        unsigned long long res = 1;
        for (int i = 1; i <= k; ++i) {
            unsigned __int128 t = static_cast<unsigned __int128>(res) *
                                  static_cast<unsigned long long>(n - k + i);
            res = static_cast<unsigned long long>(t / i);
        }
        return static_cast<double>(res);
    }
    return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0));
}

}  // namespace tourney
