#pragma once

#include <functional>
#include <vector>

#include "tourney/noise.hpp"
#include "tourney/prizes.hpp"
#include "tourney/rank_stats.hpp"

namespace tourney {

/// Gain-loss weights. Every equilibrium object depends on (eta, lambda) only
/// through theta = eta * (lambda - 1), so theta is the canonical parameter
/// and the pair is kept for the utility-form equivalence only.
struct LossAversionParams {
    double eta = 1.0;
    double lambda = 1.0;
    double theta = 0.0;

    static LossAversionParams from_theta(double theta);
    static LossAversionParams from_eta_lambda(double eta, double lambda);
};

/// Effort cost: c(0) = c'(0) = 0, strictly convex up to x_bar = c^{-1}(1).
class CostFunction {
public:
    static CostFunction quadratic(double c0);  // c(x) = c0 x^2 / 2
    static CostFunction custom(std::function<double(double)> value,
                               std::function<double(double)> marginal,
                               std::function<double(double)> inverse_marginal,
                               double x_bar);

    double value(double x) const { return value_(x); }
    double marginal(double x) const { return marginal_(x); }

    /// c'^{-1}(m); throws std::range_error when m exceeds c'(x_bar).
    double inverse_marginal(double m) const;

    double x_bar() const { return x_bar_; }
    bool is_quadratic() const { return quadratic_c0_ > 0.0; }
    double quadratic_c0() const { return quadratic_c0_; }

private:
    CostFunction() = default;
    std::function<double(double)> value_, marginal_, inverse_marginal_;
    double x_bar_ = 0.0;
    double quadratic_c0_ = 0.0;
};

/// Full problem instance.
struct TournamentDesign {
    int n;
    NoiseDistribution dist;
    LossAversionParams loss;
    CostFunction cost;
};

struct EquilibriumReport {
    double R = 0.0;            // monetary marginal benefit
    double L = 0.0;            // gain-loss marginal benefit (per unit theta)
    double M = 0.0;            // R + theta L
    double x_star = 0.0;
    bool corner = false;       // M < 0 forced x* = 0
    std::vector<double> A;     // prize coefficients A_r(theta), r = 1..n-1
    int r_star = 0;            // argmax of A (smallest on ties)
    bool concave = true;       // sampled u_xx <= 0 on [0, x_bar] (advisory)
    double foc_residual = 0.0; // |u_x(x*; x*)| by central difference
    bool diagnostics = false;  // whether the two fields above were computed
};

/// Piece-wise linear gain-loss value: identity on gains, slope lambda on
/// losses.
double mu(double value, double lambda);

/// Utility of deviating to effort x against a symmetric field at x_star,
/// reduced form: expected prize - theta * anticipated-loss term - cost.
double utility(const TournamentDesign& design, const PrizeSchedule& v, double x, double x_star);

/// Same quantity through the explicit mu() gain-loss double sum weighted by
/// eta; agrees with utility() up to quadrature noise.
double utility_gain_loss(const TournamentDesign& design, const PrizeSchedule& v, double x,
                         double x_star);

/// R(v) = sum_r beta_r v_r. Also evaluated in differential form
/// sum_r B_r d_r; the two must agree to 1e-10.
double monetary_marginal_R(const RankCoefficients& coeffs, const PrizeSchedule& v);

struct LForms {
    double differential;  // sum_r (2r/n - 1) B_r d_r
    double double_sum;    // -(1/n) sum_r sum_{s<r} (beta_r + beta_s)(v_s - v_r)
    double per_prize;     // (1/n) sum_r [2 B_{r-1} - (n - 2r) beta_r] v_r
};

/// All three algebraic routes to L(v); they must agree to 1e-10.
LForms psychological_marginal_L_forms(const RankCoefficients& coeffs, const PrizeSchedule& v);

/// L(v), returned in the differential representation after the three-way
/// consistency check.
double psychological_marginal_L(const RankCoefficients& coeffs, const PrizeSchedule& v);

/// M(v, theta) = R(v) + theta L(v).
double marginal_benefit_M(const RankCoefficients& coeffs, const PrizeSchedule& v, double theta);

/// A_r(theta) = [1 + theta (2r/n - 1)] B_r / r for r = 1..n-1. The schedule
/// with r* = argmax A_r equal top prizes maximizes M over all schedules.
std::vector<double> prize_coefficients_A(const RankCoefficients& coeffs, double theta);

struct ArgmaxReport {
    int r_star;                // smallest maximizer
    std::vector<int> tie_set;  // all maximizers within tolerance
};
ArgmaxReport optimal_r_star(const RankCoefficients& coeffs, double theta);

struct RStarStep {
    double theta;  // exact crossing point; the new argmax holds for theta above it
    int r;
};

/// r*(theta) on [0, 1] as a step function: the value at theta = 0 plus every
/// jump. Crossings are solved exactly from the pairwise linear equations
/// A_r(theta) = A_r'(theta) over all candidate pairs, and each segment is
/// verified to be the global argmax at its midpoint.
struct RStarPath {
    int initial_r;
    std::vector<RStarStep> jumps;

    int value_at(double theta) const;
};
RStarPath r_star_breakpoints(const RankCoefficients& coeffs);

struct EquilibriumOptions {
    bool diagnostics = true;   // sampled concavity + FOC residual (costs quadrature time)
    int concavity_points = 21;
};

EquilibriumReport equilibrium_effort(const TournamentDesign& design, const PrizeSchedule& v,
                                     const RankCoefficients& coeffs,
                                     const EquilibriumOptions& opts = {});
EquilibriumReport equilibrium_effort(const TournamentDesign& design, const PrizeSchedule& v,
                                     const EquilibriumOptions& opts = {});

enum class EffortSensitivity { increasing, decreasing, zero, ambiguous_numeric };

/// Sign of L(v): how equilibrium effort responds to rising loss aversion.
/// The numeric sign (zero band 1e-10) is cross-checked against the
/// structural guarantees (at most floor(n/2) positive prizes forces L <= 0,
/// at least ceil(n/2) equal top prizes forces L >= 0); a conflict reports
/// ambiguous_numeric.
EffortSensitivity effort_sensitivity_sign(const RankCoefficients& coeffs,
                                          const PrizeSchedule& v);

/// Coefficient on v_n in the prize-design objective,
/// (1 + theta (n-2)/n) beta_n; strictly negative, which pins v_n = 0 at any
/// optimum.
double optimal_schedule_vn_coefficient(const RankCoefficients& coeffs, double theta);

}  // namespace tourney
