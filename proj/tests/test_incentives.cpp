#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "tourney/incentives.hpp"

using namespace tourney;

namespace {

std::vector<NoiseDistribution> all_families() {
    return {NoiseDistribution::uniform(1.0), NoiseDistribution::gumbel(),
            NoiseDistribution::pareto(), NoiseDistribution::burr(),
            NoiseDistribution::normal(1.0)};
}

TournamentDesign make_design(const NoiseDistribution& d, int n, double theta, double c0 = 1.0) {
    return {n, d, LossAversionParams::from_theta(theta), CostFunction::quadratic(c0)};
}

RankCoefficients fake_coeffs(std::vector<double> beta) {
    RankCoefficients c;
    c.n = static_cast<int>(beta.size());
    c.beta = std::move(beta);
    c.B.resize(c.n);
    double acc = 0.0;
    for (int r = 1; r <= c.n; ++r) {
        acc += c.beta[r - 1];
        c.B[r - 1] = acc;
    }
    c.bar_beta.resize(c.n - 1);
    for (int r = 1; r <= c.n - 1; ++r) c.bar_beta[r - 1] = c.B[r - 1] / r;
    return c;
}

}  // namespace

TEST_CASE("gain-loss value function") {
    CHECK(mu(0.3, 2.0) == doctest::Approx(0.3));
    CHECK(mu(-0.3, 2.0) == doctest::Approx(-0.6));
    CHECK(mu(0.0, 5.0) == 0.0);
    CHECK_THROWS_AS(mu(1.0, 0.5), std::domain_error);
}

TEST_CASE("loss aversion parameters") {
    auto p = LossAversionParams::from_eta_lambda(0.5, 2.2);
    CHECK(p.theta == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(LossAversionParams::from_theta(0.25).theta == doctest::Approx(0.25));
    CHECK_THROWS_AS(LossAversionParams::from_eta_lambda(2.0, 3.0), std::domain_error);  // theta > 1
    CHECK_THROWS_AS(LossAversionParams::from_eta_lambda(-1.0, 1.5), std::domain_error);
    CHECK_THROWS_AS(LossAversionParams::from_eta_lambda(1.0, 0.9), std::domain_error);
}

TEST_CASE("cost function basics") {
    auto c = CostFunction::quadratic(2.0);
    CHECK(c.value(0.0) == 0.0);
    CHECK(c.marginal(0.0) == 0.0);
    CHECK(c.x_bar() == doctest::Approx(1.0));
    CHECK(c.inverse_marginal(1.0) == doctest::Approx(0.5));
    CHECK_THROWS_AS(c.inverse_marginal(5.0), std::range_error);
    CHECK_THROWS_AS(CostFunction::quadratic(0.0), std::domain_error);
}

TEST_CASE("equilibrium with a custom strictly convex cost") {
    // c(x) = x^4 / 4, c'(x) = x^3, x_bar = 4^(1/4)
    auto quartic = CostFunction::custom(
        [](double x) { return 0.25 * x * x * x * x; }, [](double x) { return x * x * x; },
        [](double m) { return std::cbrt(m); }, std::pow(4.0, 0.25));
    CHECK(quartic.value(quartic.x_bar()) == doctest::Approx(1.0));
    CHECK(!quartic.is_quadratic());

    auto par = compute_beta(NoiseDistribution::pareto(), 15);
    TournamentDesign design{15, NoiseDistribution::pareto(), LossAversionParams::from_theta(1.0),
                            quartic};
    EquilibriumOptions light;
    light.diagnostics = false;
    auto rep = equilibrium_effort(design, PrizeSchedule::top_s(15, 14), par, light);
    CHECK(rep.M == doctest::Approx(7.0 / 60.0).epsilon(1e-9));
    CHECK(rep.x_star == doctest::Approx(std::cbrt(7.0 / 60.0)).epsilon(1e-9));
    CHECK(quartic.marginal(rep.x_star) == doctest::Approx(rep.M).epsilon(1e-12));
}

TEST_CASE("symmetric-point utility for a two-player winner-take-all") {
    auto v = PrizeSchedule::winner_take_all(2);
    for (double theta : {0.0, 0.4, 1.0}) {
        auto design = make_design(NoiseDistribution::gumbel(), 2, theta);
        const double x = 0.3;
        const double expected = 0.5 - theta / 4.0 - 0.5 * x * x;
        CHECK(utility(design, v, x, x) == doctest::Approx(expected).epsilon(1e-9));
    }
    // flat schedule: gains and losses vanish pair by pair
    auto design = make_design(NoiseDistribution::normal(1.0), 4, 0.7);
    PrizeSchedule flat({0.25, 0.25, 0.25, 0.25});
    CHECK(utility(design, flat, 0.2, 0.2) ==
          doctest::Approx(0.25 - 0.5 * 0.04).epsilon(1e-9));
}

TEST_CASE("anticipated gains and losses cancel without loss aversion") {
    // sum_r p_r sum_{s != r} p_s (v_r - v_s) = 0 for any probability vector
    auto d = NoiseDistribution::burr();
    const int n = 6;
    std::mt19937_64 rng(3);
    for (int it = 0; it < 5; ++it) {
        const double delta = -0.5 + 0.2 * it;
        std::vector<double> p(n);
        for (int r = 1; r <= n; ++r) p[r - 1] = rank_probability(d, n, r, delta);
        PrizeSchedule v(oracle::random_schedule(rng, n));
        double total = 0.0;
        for (int r = 1; r <= n; ++r)
            for (int s = 1; s <= n; ++s)
                if (s != r) total += p[r - 1] * p[s - 1] * (v.v_at(r) - v.v_at(s));
        CHECK(std::abs(total) < 1e-10);
    }
}

TEST_CASE("reduced utility equals the explicit gain-loss form") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    auto fams = all_families();
    for (int it = 0; it < 20; ++it) {
        const auto& d = fams[it % fams.size()];
        const int n = 2 + static_cast<int>(rng() % 5);
        const double theta = u01(rng);
        const double eta = 0.2 + 1.8 * u01(rng);
        TournamentDesign design{n, d, LossAversionParams::from_eta_lambda(eta, 1.0 + theta / eta),
                                CostFunction::quadratic(1.0)};
        PrizeSchedule v(oracle::random_schedule(rng, n));
        const double xb = design.cost.x_bar();
        const double x = 0.8 * xb * u01(rng);
        const double xs = 0.8 * xb * u01(rng);
        CAPTURE(d.spec_string());
        CHECK(std::abs(utility(design, v, x, xs) - utility_gain_loss(design, v, x, xs)) < 1e-10);
    }
}

TEST_CASE("monetary marginal benefit") {
    auto uni = compute_beta(NoiseDistribution::uniform(1.0), 5);
    CHECK(monetary_marginal_R(uni, PrizeSchedule::winner_take_all(5)) ==
          doctest::Approx(1.0).epsilon(1e-9));
    PrizeSchedule flat({0.2, 0.2, 0.2, 0.2, 0.2});
    CHECK(std::abs(monetary_marginal_R(uni, flat)) < 1e-12);

    // nine prizes of 1/10, five of 1/50: R = B_9 * 2/25 + B_14 * 1/50
    auto g = compute_beta(NoiseDistribution::gumbel(), 15);
    std::vector<double> vpp(15, 0.0);
    for (int r = 0; r < 9; ++r) vpp[r] = 0.1;
    for (int r = 9; r < 14; ++r) vpp[r] = 0.02;
    const double expected =
        oracle::gumbel_B(15, 9) * (2.0 / 25.0) + oracle::gumbel_B(15, 14) * (1.0 / 50.0);
    CHECK(expected == doctest::Approx(0.0308743).epsilon(1e-5));
    CHECK(monetary_marginal_R(g, PrizeSchedule(vpp)) ==
          doctest::Approx(expected).epsilon(1e-8));

    CHECK_THROWS_AS(monetary_marginal_R(uni, PrizeSchedule::winner_take_all(4)),
                    std::domain_error);
}

TEST_CASE("gain-loss marginal benefit") {
    // symmetric noise + equidistant prizes: the effect washes out
    auto nrm = compute_beta(NoiseDistribution::normal(1.0), 15);
    CHECK(std::abs(psychological_marginal_L(nrm, PrizeSchedule::equidistant(15))) < 1e-9);

    // single differential at r = n/2 carries weight zero
    auto any4 = compute_beta(NoiseDistribution::burr(), 4);
    CHECK(std::abs(psychological_marginal_L(any4, PrizeSchedule::top_s(4, 2))) < 1e-12);

    // maximal sharing under the heavy-tailed family: L = (13/15) B_14 / 14
    auto par = compute_beta(NoiseDistribution::pareto(), 15);
    CHECK(psychological_marginal_L(par, PrizeSchedule::top_s(15, 14)) ==
          doctest::Approx(91.0 / 1680.0).epsilon(1e-9));
}

TEST_CASE("three algebraic routes to L agree on random schedules") {
    std::mt19937_64 rng(23);
    for (const auto& d : all_families()) {
        for (int n : {3, 8, 15}) {
            const RankCoefficients c = compute_beta(d, n);
            for (int it = 0; it < 10; ++it) {
                PrizeSchedule v(oracle::random_schedule(rng, n));
                const LForms f = psychological_marginal_L_forms(c, v);
                CAPTURE(d.spec_string());
                CHECK(std::abs(f.differential - f.double_sum) < 1e-10);
                CHECK(std::abs(f.differential - f.per_prize) < 1e-10);
            }
        }
    }
}

TEST_CASE("total marginal benefit") {
    auto par = compute_beta(NoiseDistribution::pareto(), 15);
    auto v14 = PrizeSchedule::top_s(15, 14);
    for (double theta : {0.0, 0.3, 0.77, 1.0}) {
        const double expected = (1.0 / 16.0) * (1.0 + 13.0 * theta / 15.0);
        CHECK(marginal_benefit_M(par, v14, theta) == doctest::Approx(expected).epsilon(1e-9));
    }
    // theta = 0 collapses to the monetary part
    auto g = compute_beta(NoiseDistribution::gumbel(), 15);
    PrizeSchedule v5 = PrizeSchedule::top_s(15, 5);
    CHECK(marginal_benefit_M(g, v5, 0.0) == doctest::Approx(monetary_marginal_R(g, v5)));
    CHECK_THROWS_AS(marginal_benefit_M(g, v5, 1.5), std::domain_error);
}

TEST_CASE("prize coefficients for uniform noise have the closed form") {
    for (double b : {1.0, 2.0}) {
        const int n = 15;
        auto c = compute_beta(NoiseDistribution::uniform(b), n);
        for (double theta : {0.0, 0.37, 0.9, 1.0}) {
            const auto A = prize_coefficients_A(c, theta);
            for (int r = 1; r <= n - 1; ++r) {
                const double expected = (1.0 - theta) / (b * r) + 2.0 * theta / (n * b);
                CHECK(std::abs(A[r - 1] - expected) < 1e-10);
            }
            CHECK(optimal_r_star(c, theta).r_star == 1);
        }
    }
}

TEST_CASE("convex-combination identity for the prize coefficients") {
    for (const auto& d : all_families()) {
        auto c = compute_beta(d, 15);
        for (double theta : {0.0, 0.3, 1.0}) {
            const auto A = prize_coefficients_A(c, theta);
            for (int r = 1; r <= 14; ++r) {
                const double alt =
                    (1.0 - theta) * c.bar_beta_at(r) + (2.0 * theta / 15.0) * c.B_at(r);
                CHECK(std::abs(A[r - 1] - alt) < 1e-12);
            }
        }
    }
}

TEST_CASE("optimal top-prize counts at the endpoints") {
    auto par = compute_beta(NoiseDistribution::pareto(), 15);
    for (double theta : {0.0, 0.5, 1.0}) CHECK(optimal_r_star(par, theta).r_star == 14);

    auto burr = compute_beta(NoiseDistribution::burr(), 15);
    CHECK(optimal_r_star(burr, 0.0).r_star == 7);
    CHECK(optimal_r_star(burr, 1.0).r_star == 11);

    auto g = compute_beta(NoiseDistribution::gumbel(), 15);
    CHECK(optimal_r_star(g, 0.0).r_star == 1);
    CHECK(optimal_r_star(g, 1.0).r_star == 9);

    // at theta = 1 all uniform-noise coefficients tie; smallest rank wins
    auto uni = compute_beta(NoiseDistribution::uniform(1.0), 15);
    auto rep = optimal_r_star(uni, 1.0);
    CHECK(rep.r_star == 1);
    CHECK(rep.tie_set.size() == 14);
}

TEST_CASE("step function of optimal counts") {
    auto burr = compute_beta(NoiseDistribution::burr(), 15);
    auto path = r_star_breakpoints(burr);
    CHECK(path.initial_r == 7);
    REQUIRE(path.jumps.size() == 4);
    // exact crossings recomputed from the closed-form coefficients
    auto cross = [&](int r1, int r2) {
        const double a1 = oracle::burr_B(15, r1) / r1, a2 = oracle::burr_B(15, r2) / r2;
        const double s1 = a1 * (2.0 * r1 / 15.0 - 1.0), s2 = a2 * (2.0 * r2 / 15.0 - 1.0);
        return (a1 - a2) / (s2 - s1);
    };
    const int targets[] = {8, 9, 10, 11};
    for (int i = 0; i < 4; ++i) {
        CHECK(path.jumps[i].r == targets[i]);
        CHECK(path.jumps[i].theta ==
              doctest::Approx(cross(targets[i] - 1, targets[i])).epsilon(1e-7));
    }
    // figure-coordinate agreement
    const double coords[] = {0.07, 0.2, 0.39, 0.71};
    for (int i = 0; i < 4; ++i) CHECK(std::abs(path.jumps[i].theta - coords[i]) <= 0.0101);

    auto par = compute_beta(NoiseDistribution::pareto(), 15);
    auto ppath = r_star_breakpoints(par);
    CHECK(ppath.initial_r == 14);
    CHECK(ppath.jumps.empty());

    auto g = compute_beta(NoiseDistribution::gumbel(), 15);
    auto gpath = r_star_breakpoints(g);
    CHECK(gpath.initial_r == 1);
    REQUIRE(gpath.jumps.size() == 8);
    CHECK(gpath.jumps.front().r == 2);
    CHECK(gpath.jumps.front().theta == doctest::Approx(0.237).epsilon(0.02));
    CHECK(std::abs(gpath.jumps.front().theta - 0.245) <= 0.011);  // between the plotted 0.24-0.25
    CHECK(gpath.jumps.back().r == 9);
    CHECK(std::abs(gpath.jumps.back().theta - 0.77) <= 0.0101);

    // value_at honours the smallest-r tie break exactly at a crossing
    const double tc = gpath.jumps.front().theta;
    CHECK(gpath.value_at(tc) == 1);
    CHECK(gpath.value_at(std::nextafter(tc, 1.0)) == 2);
}

TEST_CASE("the maximized benefit is continuous across breakpoints") {
    for (const auto& d : {NoiseDistribution::burr(), NoiseDistribution::gumbel()}) {
        auto c = compute_beta(d, 15);
        auto path = r_star_breakpoints(c);
        int prev = path.initial_r;
        for (const auto& j : path.jumps) {
            const auto A = prize_coefficients_A(c, j.theta);
            CHECK(std::abs(A[prev - 1] - A[j.r - 1]) < 1e-12);
            prev = j.r;
        }
    }
}

TEST_CASE("argmax path is invariant to a rescaling of the noise") {
    auto a = compute_beta(NoiseDistribution::uniform(1.0), 15);
    auto b = compute_beta(NoiseDistribution::uniform(2.0), 15);
    auto na = compute_beta(NoiseDistribution::normal(1.0), 15);
    auto nb = compute_beta(NoiseDistribution::normal(2.5), 15);
    for (double theta = 0.0; theta <= 1.0; theta += 0.05) {
        CHECK(optimal_r_star(a, theta).r_star == optimal_r_star(b, theta).r_star);
        CHECK(optimal_r_star(na, theta).r_star == optimal_r_star(nb, theta).r_star);
    }
    auto pa = r_star_breakpoints(na);
    auto pb = r_star_breakpoints(nb);
    CHECK(pa.initial_r == pb.initial_r);
    REQUIRE(pa.jumps.size() == pb.jumps.size());
    for (std::size_t i = 0; i < pa.jumps.size(); ++i) {
        CHECK(pa.jumps[i].r == pb.jumps[i].r);
        CHECK(pa.jumps[i].theta == doctest::Approx(pb.jumps[i].theta).epsilon(1e-9));
    }
}

TEST_CASE("equilibrium effort") {
    auto par = compute_beta(NoiseDistribution::pareto(), 15);
    auto v14 = PrizeSchedule::top_s(15, 14);
    EquilibriumOptions light;
    light.diagnostics = false;

    auto d0 = make_design(NoiseDistribution::pareto(), 15, 0.0);
    auto rep0 = equilibrium_effort(d0, v14, par, light);
    CHECK(rep0.M == doctest::Approx(0.0625).epsilon(1e-9));
    CHECK(rep0.x_star == doctest::Approx(0.0625).epsilon(1e-9));

    auto d1 = make_design(NoiseDistribution::pareto(), 15, 1.0);
    auto rep1 = equilibrium_effort(d1, v14, par, light);
    CHECK(rep1.x_star == doctest::Approx(7.0 / 60.0).epsilon(1e-9));
    CHECK(rep1.M == doctest::Approx(rep1.R + 1.0 * rep1.L).epsilon(1e-15));
    CHECK(d1.cost.marginal(rep1.x_star) == doctest::Approx(rep1.M).epsilon(1e-9));
    CHECK(rep1.r_star == 14);

    // flat prizes: no marginal benefit, zero effort
    std::vector<double> flat(15, 1.0 / 15.0);
    auto repf = equilibrium_effort(d1, PrizeSchedule(flat), par, light);
    CHECK(std::abs(repf.R) < 1e-12);
    CHECK(std::abs(repf.L) < 1e-12);
    CHECK(repf.x_star == doctest::Approx(0.0));
    CHECK(!repf.corner);
}

TEST_CASE("equilibrium diagnostics on a well-conditioned design") {
    auto d = make_design(NoiseDistribution::pareto(), 15, 0.5);
    auto rep = equilibrium_effort(d, PrizeSchedule::top_s(15, 14));
    CHECK(rep.diagnostics);
    CHECK(rep.concave);
    CHECK(rep.foc_residual < 1e-5);
}

TEST_CASE("negative marginal benefit reports a corner, not an error") {
    // handworked coefficient vector with an interior dip, unreachable from the
    // built-in families but legal input for the reporting layer
    auto c = fake_coeffs({0.01, -0.05, 0.05, -0.01});
    PrizeSchedule v({0.5, 0.5, 0.0, 0.0});
    auto design = make_design(NoiseDistribution::uniform(1.0), 4, 0.0);
    EquilibriumOptions light;
    light.diagnostics = false;
    auto rep = equilibrium_effort(design, v, c, light);
    CHECK(rep.M < 0.0);
    CHECK(rep.corner);
    CHECK(rep.x_star == 0.0);
}

TEST_CASE("marginal benefit beyond the cost range raises a range error") {
    auto par = compute_beta(NoiseDistribution::pareto(), 15);
    auto design = make_design(NoiseDistribution::pareto(), 15, 0.0, 1e-6);
    EquilibriumOptions light;
    light.diagnostics = false;
    CHECK_THROWS_AS(equilibrium_effort(design, PrizeSchedule::top_s(15, 14), par, light),
                    std::range_error);
}

TEST_CASE("effort response classification") {
    for (const auto& d : all_families()) {
        auto c = compute_beta(d, 15);
        CAPTURE(d.spec_string());
        CHECK(effort_sensitivity_sign(c, PrizeSchedule::top_s(15, 5)) ==
              EffortSensitivity::decreasing);
        CHECK(effort_sensitivity_sign(c, PrizeSchedule::top_s(15, 9)) ==
              EffortSensitivity::increasing);
    }
    auto c4 = compute_beta(NoiseDistribution::gumbel(), 4);
    CHECK(effort_sensitivity_sign(c4, PrizeSchedule::top_s(4, 2)) == EffortSensitivity::zero);

    // numeric sign conflicting with the structural guarantee
    auto bad = fake_coeffs({-0.01, 0.02, 0.0, -0.01});
    CHECK(effort_sensitivity_sign(bad, PrizeSchedule::winner_take_all(4)) ==
          EffortSensitivity::ambiguous_numeric);
}

TEST_CASE("effort moves with theta exactly as the classification says") {
    auto burr = compute_beta(NoiseDistribution::burr(), 15);
    for (int s : {5, 9}) {
        auto v = PrizeSchedule::top_s(15, s);
        const double R = monetary_marginal_R(burr, v);
        const double L = psychological_marginal_L(burr, v);
        std::vector<double> xs;
        for (double theta = 0.0; theta <= 1.0; theta += 0.1)
            xs.push_back(R + theta * L);  // quadratic cost with c0 = 1
        const auto sign = effort_sensitivity_sign(burr, v);
        for (std::size_t i = 1; i < xs.size(); ++i) {
            if (sign == EffortSensitivity::increasing) CHECK(xs[i] > xs[i - 1]);
            if (sign == EffortSensitivity::decreasing) CHECK(xs[i] < xs[i - 1]);
        }
    }
}

TEST_CASE("bottom-prize coefficient is strictly negative") {
    auto uni = compute_beta(NoiseDistribution::uniform(1.0), 4);
    CHECK(optimal_schedule_vn_coefficient(uni, 0.0) == doctest::Approx(-1.0).epsilon(1e-9));
    for (const auto& d : all_families()) {
        auto c = compute_beta(d, 15);
        CHECK(optimal_schedule_vn_coefficient(c, 0.0) ==
              doctest::Approx(c.beta_at(15)).epsilon(1e-12));
        for (double theta : {0.0, 0.5, 1.0})
            CHECK(optimal_schedule_vn_coefficient(c, theta) < 0.0);
    }
    auto g = compute_beta(NoiseDistribution::gumbel(), 15);
    const double expected = (1.0 + 13.0 / 15.0) * (-oracle::gumbel_B(15, 14));
    CHECK(optimal_schedule_vn_coefficient(g, 1.0) == doctest::Approx(expected).epsilon(1e-7));
}

TEST_CASE("optimal count rises weakly with theta and stays sandwiched") {
    for (const auto& d : all_families()) {
        for (int n : {3, 8, 15}) {
            auto c = compute_beta(d, n);
            const int lo = optimal_r_star(c, 0.0).r_star;
            const int hi = r_hat(c);
            int prev = 0;
            for (double theta = 0.0; theta <= 1.0 + 1e-12; theta += 0.01) {
                const int r = optimal_r_star(c, std::min(theta, 1.0)).r_star;
                CAPTURE(d.spec_string());
                CHECK(r >= prev);
                if (d.catalog().unimodal_hazard && d.catalog().unimodal_density) {
                    CHECK(r >= lo);
                    CHECK(r <= hi);
                }
                prev = r;
            }
        }
    }
}
