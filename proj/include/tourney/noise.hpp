#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>

namespace tourney {

enum class Family { uniform, gumbel, pareto, burr, normal };

enum class FuncKind { cdf, pdf, quantile, hazard };

struct Support {
    double lo;
    double hi;
};

// Structural properties of a noise family, used by the comparative-statics
// checks. Monotone hazards count as (weakly) unimodal.
struct FamilyCatalogEntry {
    Family family;
    bool has_closed_form_B;
    bool ifr;              // increasing failure rate
    bool dfr;              // decreasing failure rate
    bool unimodal_hazard;  // IFR then DFR
    bool unimodal_density;
};

/// Additive performance shock distribution. Immutable after construction;
/// copies share state and are safe for concurrent reads.
///
/// Built-in families:
///   uniform:b=<w>   on [-w/2, w/2]
///   gumbel          F(t) = exp(-exp(-t)) on R
///   pareto          F(t) = 1 - 1/t on [1, inf)
///   burr            F(t) = 1 - 1/(1+t^2) on [0, inf)
///   normal:sigma=<s>
class NoiseDistribution {
public:
    // Extension point: additional families implement this interface.
    struct Impl {
        virtual ~Impl() = default;
        virtual FamilyCatalogEntry catalog() const = 0;
        virtual Support support() const = 0;
        virtual std::string spec_string() const = 0;
        virtual double cdf(double t) const = 0;
        virtual double pdf(double t) const = 0;
        virtual double quantile(double u) const = 0;  // u in (0,1)
        virtual double hazard(double t) const = 0;    // only called where cdf < 1
        virtual std::optional<double> closed_form_B(int, int) const { return std::nullopt; }
    };

    static NoiseDistribution uniform(double width);
    static NoiseDistribution gumbel();
    static NoiseDistribution pareto();
    static NoiseDistribution burr();
    static NoiseDistribution normal(double sigma);

    /// Parses "uniform:b=<w>", "gumbel", "pareto", "burr", "normal:sigma=<s>".
    static NoiseDistribution parse(std::string_view spec);

    explicit NoiseDistribution(std::shared_ptr<const Impl> impl);

    Family family() const { return impl_->catalog().family; }
    FamilyCatalogEntry catalog() const { return impl_->catalog(); }
    Support support() const { return impl_->support(); }
    std::string spec_string() const { return impl_->spec_string(); }

    double cdf(double t) const { return impl_->cdf(t); }
    double pdf(double t) const { return impl_->pdf(t); }

    /// Inverse cdf; throws std::domain_error unless u is strictly inside (0,1).
    double quantile(double u) const;

    /// pdf(t)/(1-cdf(t)); throws singularity_error at or above the upper
    /// support endpoint, where the cdf is exactly one.
    double hazard(double t) const;

    /// Catalogued closed form for the cumulative rank coefficient B_r, where
    /// the family has one. 1 <= r <= n-1 required.
    std::optional<double> closed_form_B(int n, int r) const;

private:
    std::shared_ptr<const Impl> impl_;
};

/// Uniform dispatcher over the four function kinds.
double eval(const NoiseDistribution& dist, FuncKind which, double t);

/// Binomial coefficient as a double: exact integer arithmetic while the
/// result is exactly representable, log-gamma beyond that.
double binomial(int n, int k);

}  // namespace tourney
