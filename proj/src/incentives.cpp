#include "tourney/incentives.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "tourney/common.hpp"

namespace tourney {

namespace {

constexpr double kFormAgreementTol = 1e-10;
constexpr double kSignBand = 1e-10;
constexpr double kTieRelTol = 1e-12;

void check_theta(double theta) {
    if (!(theta >= 0.0 && theta <= 1.0))
        throw std::domain_error("theta must lie in [0, 1], got " + std::to_string(theta));
}

void check_match(const RankCoefficients& coeffs, const PrizeSchedule& v) {
    if (coeffs.n != v.n())
        throw std::domain_error("rank coefficients are for n=" + std::to_string(coeffs.n) +
                                " but the schedule has n=" + std::to_string(v.n()));
}

std::vector<double> rank_probabilities(const TournamentDesign& design, double delta) {
    std::vector<double> p(design.n);
    for (int r = 1; r <= design.n; ++r)
        p[r - 1] = rank_probability(design.dist, design.n, r, delta);
    return p;
}

// Anticipated-loss term of the reduced utility: sum_r sum_{s<r} p_r p_s (v_s - v_r).
double loss_term(const std::vector<double>& p, const PrizeSchedule& v) {
    const int n = static_cast<int>(p.size());
    double acc = 0.0;
    for (int r = 2; r <= n; ++r)
        for (int s = 1; s < r; ++s)
            acc += p[r - 1] * p[s - 1] * (v.v_at(s) - v.v_at(r));
    return acc;
}

}  // namespace

LossAversionParams LossAversionParams::from_theta(double theta) {
    check_theta(theta);
    return {1.0, 1.0 + theta, theta};
}

LossAversionParams LossAversionParams::from_eta_lambda(double eta, double lambda) {
    if (!(eta > 0.0)) throw std::domain_error("eta must be positive");
    if (!(lambda >= 1.0)) throw std::domain_error("lambda must be >= 1");
    double theta = eta * (lambda - 1.0);
    check_theta(theta);
    return {eta, lambda, theta};
}

CostFunction CostFunction::quadratic(double c0) {
    if (!(c0 > 0.0)) throw std::domain_error("quadratic cost: c0 must be positive");
    CostFunction c;
    c.quadratic_c0_ = c0;
    c.x_bar_ = std::sqrt(2.0 / c0);
    c.value_ = [c0](double x) { return 0.5 * c0 * x * x; };
    c.marginal_ = [c0](double x) { return c0 * x; };
    c.inverse_marginal_ = [c0](double m) { return m / c0; };
    return c;
}

CostFunction CostFunction::custom(std::function<double(double)> value,
                                  std::function<double(double)> marginal,
                                  std::function<double(double)> inverse_marginal,
                                  double x_bar) {
    if (!(x_bar > 0.0)) throw std::domain_error("custom cost: x_bar must be positive");
    CostFunction c;
    c.value_ = std::move(value);
    c.marginal_ = std::move(marginal);
    c.inverse_marginal_ = std::move(inverse_marginal);
    c.x_bar_ = x_bar;
    return c;
}

double CostFunction::inverse_marginal(double m) const {
    if (m > marginal_(x_bar_) * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "marginal benefit " << m << " exceeds c'(x_bar) = " << marginal_(x_bar_)
           << "; no effort in [0, x_bar] satisfies the first-order condition";
        throw std::range_error(os.str());
    }
    return inverse_marginal_(m);
}

double mu(double value, double lambda) {
    if (!(lambda >= 1.0)) throw std::domain_error("mu: lambda must be >= 1");
    return value < 0.0 ? lambda * value : value;
}

double utility(const TournamentDesign& design, const PrizeSchedule& v, double x, double x_star) {
    if (design.n != v.n())
        throw std::domain_error("design and schedule disagree on n");
    const std::vector<double> p = rank_probabilities(design, x - x_star);
    double monetary = 0.0;
    for (int r = 1; r <= design.n; ++r) monetary += p[r - 1] * v.v_at(r);
    return monetary - design.loss.theta * loss_term(p, v) - design.cost.value(x);
}

double utility_gain_loss(const TournamentDesign& design, const PrizeSchedule& v, double x,
                         double x_star) {
    const std::vector<double> p = rank_probabilities(design, x - x_star);
    const int n = design.n;
    double monetary = 0.0;
    for (int r = 1; r <= n; ++r) monetary += p[r - 1] * v.v_at(r);
    double gain_loss = 0.0;
    for (int r = 1; r <= n; ++r)
        for (int s = 1; s <= n; ++s) {
            if (s == r) continue;
            gain_loss += p[r - 1] * p[s - 1] * mu(v.v_at(r) - v.v_at(s), design.loss.lambda);
        }
    return monetary + design.loss.eta * gain_loss - design.cost.value(x);
}

double monetary_marginal_R(const RankCoefficients& coeffs, const PrizeSchedule& v) {
    check_match(coeffs, v);
    const int n = coeffs.n;
    double by_beta = 0.0;
    for (int r = 1; r <= n; ++r) by_beta += coeffs.beta_at(r) * v.v_at(r);
    const std::vector<double> d = v.differentials();
    double by_diff = 0.0;
    for (int r = 1; r <= n - 1; ++r) by_diff += coeffs.B_at(r) * d[r - 1];
    if (std::abs(by_beta - by_diff) > kFormAgreementTol)
        throw numeric_error("R(v): beta form and differential form disagree",
                            std::abs(by_beta - by_diff));
    return by_beta;
}

LForms psychological_marginal_L_forms(const RankCoefficients& coeffs, const PrizeSchedule& v) {
    check_match(coeffs, v);
    const int n = coeffs.n;
    LForms f{};

    const std::vector<double> d = v.differentials();
    f.differential = 0.0;
    for (int r = 1; r <= n - 1; ++r)
        f.differential += (2.0 * r / n - 1.0) * coeffs.B_at(r) * d[r - 1];

    f.double_sum = 0.0;
    for (int r = 2; r <= n; ++r)
        for (int s = 1; s < r; ++s)
            f.double_sum -= (coeffs.beta_at(r) + coeffs.beta_at(s)) * (v.v_at(s) - v.v_at(r));
    f.double_sum /= n;

    f.per_prize = 0.0;
    for (int r = 1; r <= n; ++r) {
        const double B_prev = r >= 2 ? coeffs.B_at(r - 1) : 0.0;
        f.per_prize += (2.0 * B_prev - (n - 2.0 * r) * coeffs.beta_at(r)) * v.v_at(r);
    }
    f.per_prize /= n;
    return f;
}

double psychological_marginal_L(const RankCoefficients& coeffs, const PrizeSchedule& v) {
    const LForms f = psychological_marginal_L_forms(coeffs, v);
    const double spread = std::max({std::abs(f.differential - f.double_sum),
                                    std::abs(f.differential - f.per_prize),
                                    std::abs(f.double_sum - f.per_prize)});
    if (spread > kFormAgreementTol)
        throw numeric_error("L(v): algebraic representations disagree", spread);
    return f.differential;
}

double marginal_benefit_M(const RankCoefficients& coeffs, const PrizeSchedule& v, double theta) {
    check_theta(theta);
    return monetary_marginal_R(coeffs, v) + theta * psychological_marginal_L(coeffs, v);
}

std::vector<double> prize_coefficients_A(const RankCoefficients& coeffs, double theta) {
    check_theta(theta);
    const int n = coeffs.n;
    std::vector<double> A(n - 1);
    for (int r = 1; r <= n - 1; ++r)
        A[r - 1] = (1.0 + theta * (2.0 * r / n - 1.0)) * coeffs.bar_beta_at(r);
    return A;
}

ArgmaxReport optimal_r_star(const RankCoefficients& coeffs, double theta) {
    const std::vector<double> A = prize_coefficients_A(coeffs, theta);
    const double amax = *std::max_element(A.begin(), A.end());
    const double tol = kTieRelTol * std::max(1.0, std::abs(amax));
    ArgmaxReport rep;
    rep.r_star = 0;
    for (int r = 1; r <= static_cast<int>(A.size()); ++r) {
        if (A[r - 1] >= amax - tol) {
            rep.tie_set.push_back(r);
            if (rep.r_star == 0) rep.r_star = r;
        }
    }
    return rep;
}

int RStarPath::value_at(double theta) const {
    int r = initial_r;
    for (const RStarStep& s : jumps) {
        if (theta > s.theta) r = s.r;
    }
    return r;
}

RStarPath r_star_breakpoints(const RankCoefficients& coeffs) {
    const int n = coeffs.n;
    // A_r(theta) = a_r + theta * s_r
    std::vector<double> a(n - 1), s(n - 1);
    for (int r = 1; r <= n - 1; ++r) {
        a[r - 1] = coeffs.bar_beta_at(r);
        s[r - 1] = coeffs.bar_beta_at(r) * (2.0 * r / n - 1.0);
    }
    auto argmax_at = [&](double theta) {
        double vb = -std::numeric_limits<double>::infinity();
        for (int r = 1; r <= n - 1; ++r) vb = std::max(vb, a[r - 1] + theta * s[r - 1]);
        const double tol = kTieRelTol * std::max(1.0, std::abs(vb));
        for (int r = 1; r <= n - 1; ++r)
            if (a[r - 1] + theta * s[r - 1] >= vb - tol) return r;
        return 1;
    };

    RStarPath path;
    path.initial_r = optimal_r_star(coeffs, 0.0).r_star;
    int cur = path.initial_r;
    double theta = 0.0;
    while (true) {
        // earliest point past theta where any line overtakes the current one
        double next = std::numeric_limits<double>::infinity();
        for (int r = 1; r <= n - 1; ++r) {
            if (r == cur || s[r - 1] <= s[cur - 1]) continue;
            const double tc = (a[cur - 1] - a[r - 1]) / (s[r - 1] - s[cur - 1]);
            if (tc > theta + 1e-15 && tc <= 1.0 && tc < next) next = tc;
        }
        if (!std::isfinite(next)) break;
        // winner just past the crossing: steepest line among the maximizers
        const double probe = std::min(1.0, next + 1e-9);
        int winner = cur;
        double best = -std::numeric_limits<double>::infinity();
        for (int r = 1; r <= n - 1; ++r) {
            const double val = a[r - 1] + probe * s[r - 1];
            if (val > best + 1e-15) {
                best = val;
                winner = r;
            }
        }
        if (winner == cur) {  // grazing contact, no argmax change
            theta = next;
            continue;
        }
        path.jumps.push_back({next, winner});
        theta = next;
        cur = winner;
    }

    // verify each segment is the global argmax at its midpoint
    double lo = 0.0;
    int seg = path.initial_r;
    for (std::size_t i = 0; i <= path.jumps.size(); ++i) {
        const double hi = i < path.jumps.size() ? path.jumps[i].theta : 1.0;
        if (hi > lo) {
            const double mid = 0.5 * (lo + hi);
            if (argmax_at(mid) != seg)
                throw numeric_error("r* step function failed midpoint verification", 0.0);
        }
        if (i < path.jumps.size()) {
            lo = hi;
            seg = path.jumps[i].r;
        }
    }
    return path;
}

EquilibriumReport equilibrium_effort(const TournamentDesign& design, const PrizeSchedule& v,
                                     const RankCoefficients& coeffs,
                                     const EquilibriumOptions& opts) {
    check_match(coeffs, v);
    EquilibriumReport rep;
    rep.R = monetary_marginal_R(coeffs, v);
    rep.L = psychological_marginal_L(coeffs, v);
    rep.M = rep.R + design.loss.theta * rep.L;
    if (rep.M < 0.0) {
        rep.x_star = 0.0;
        rep.corner = true;
    } else {
        rep.x_star = design.cost.inverse_marginal(rep.M);
    }
    rep.A = prize_coefficients_A(coeffs, design.loss.theta);
    rep.r_star = optimal_r_star(coeffs, design.loss.theta).r_star;

    if (opts.diagnostics) {
        rep.diagnostics = true;
        const double xb = design.cost.x_bar();
        const double h = xb / (4.0 * std::max(1, opts.concavity_points - 1));
        rep.concave = true;
        for (int j = 0; j < opts.concavity_points; ++j) {
            double x = xb * j / (opts.concavity_points - 1);
            x = std::min(std::max(x, h), xb - h);
            const double um = utility(design, v, x - h, rep.x_star);
            const double u0 = utility(design, v, x, rep.x_star);
            const double up = utility(design, v, x + h, rep.x_star);
            const double uxx = (up - 2.0 * u0 + um) / (h * h);
            if (uxx > 1e-8) rep.concave = false;
        }
        const double hf = 1e-5 * std::max(1.0, xb);
        const double um = utility(design, v, rep.x_star - hf, rep.x_star);
        const double up = utility(design, v, rep.x_star + hf, rep.x_star);
        rep.foc_residual = std::abs((up - um) / (2.0 * hf));
        if (rep.corner) rep.foc_residual = 0.0;  // boundary optimum, FOC does not apply
    }
    return rep;
}

EquilibriumReport equilibrium_effort(const TournamentDesign& design, const PrizeSchedule& v,
                                     const EquilibriumOptions& opts) {
    return equilibrium_effort(design, v, compute_beta(design.dist, design.n), opts);
}

EffortSensitivity effort_sensitivity_sign(const RankCoefficients& coeffs,
                                          const PrizeSchedule& v) {
    const double L = psychological_marginal_L(coeffs, v);
    const int n = v.n();

    int positive_prizes = 0;
    for (int r = 1; r <= n; ++r)
        if (v.v_at(r) > kPrizeTol) ++positive_prizes;
    int equal_top = 1;
    while (equal_top < n && std::abs(v.v_at(equal_top + 1) - v.v_at(1)) <= kPrizeTol)
        ++equal_top;

    const bool force_nonpositive = positive_prizes <= n / 2;
    const bool force_nonnegative = equal_top >= (n + 1) / 2;

    int sign = 0;
    if (L > kSignBand) sign = 1;
    else if (L < -kSignBand) sign = -1;

    if ((force_nonpositive && sign > 0) || (force_nonnegative && sign < 0))
        return EffortSensitivity::ambiguous_numeric;
    if (sign > 0) return EffortSensitivity::increasing;
    if (sign < 0) return EffortSensitivity::decreasing;
    return EffortSensitivity::zero;
}

double optimal_schedule_vn_coefficient(const RankCoefficients& coeffs, double theta) {
    check_theta(theta);
    const int n = coeffs.n;
    return (1.0 + theta * (n - 2.0) / n) * coeffs.beta_at(n);
}

}  // namespace tourney
