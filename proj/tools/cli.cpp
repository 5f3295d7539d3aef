#include "cli.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tourney/common.hpp"
#include "tourney/csvio.hpp"
#include "tourney/incentives.hpp"
#include "tourney/noise.hpp"
#include "tourney/prizes.hpp"
#include "tourney/rank_stats.hpp"
#include "tourney/simulate.hpp"

namespace tourney::cli {

namespace {

using nlohmann::json;

// ---------------------------------------------------------------- theta grid

// Decimal triple "start:stop:step" evaluated in scaled integers so grid
// points land on exact decimals (0.58, not 0.58000000000000007).
struct ThetaGrid {
    long long start_n = 0, stop_n = 0, step_n = 0;
    long long scale = 1;

    static ThetaGrid parse(const std::string& text);
    std::vector<double> points() const {
        std::vector<double> out;
        for (long long v = start_n; v <= stop_n; v += step_n)
            out.push_back(static_cast<double>(v) / static_cast<double>(scale));
        return out;
    }
};

struct Decimal {
    long long num;
    long long den;  // power of ten
};

Decimal parse_decimal(const std::string& s) {
    if (s.empty()) throw std::invalid_argument("empty number");
    std::size_t dot = s.find('.');
    std::string digits = dot == std::string::npos ? s : s.substr(0, dot) + s.substr(dot + 1);
    int frac = dot == std::string::npos ? 0 : static_cast<int>(s.size() - dot - 1);
    if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos)
        throw std::invalid_argument("bad decimal '" + s + "'");
    long long den = 1;
    for (int i = 0; i < frac; ++i) den *= 10;
    return {std::stoll(digits), den};
}

ThetaGrid ThetaGrid::parse(const std::string& text) {
    auto c1 = text.find(':');
    auto c2 = c1 == std::string::npos ? std::string::npos : text.find(':', c1 + 1);
    if (c2 == std::string::npos)
        throw std::invalid_argument("--theta-grid: expected start:stop:step, got '" + text + "'");
    Decimal a, b, s;
    try {
        a = parse_decimal(text.substr(0, c1));
        b = parse_decimal(text.substr(c1 + 1, c2 - c1 - 1));
        s = parse_decimal(text.substr(c2 + 1));
    } catch (const std::exception& e) {
        throw std::invalid_argument(std::string("--theta-grid: ") + e.what());
    }
    ThetaGrid g;
    g.scale = std::max({a.den, b.den, s.den});
    g.start_n = a.num * (g.scale / a.den);
    g.stop_n = b.num * (g.scale / b.den);
    g.step_n = s.num * (g.scale / s.den);
    if (g.step_n <= 0) throw std::invalid_argument("--theta-grid: step must be positive");
    if (g.start_n > g.stop_n) throw std::invalid_argument("--theta-grid: start exceeds stop");
    if (g.start_n < 0 || g.stop_n > g.scale)
        throw std::invalid_argument("--theta-grid: grid must stay inside [0, 1]");
    return g;
}

// ------------------------------------------------------------------- helpers

NoiseDistribution parse_dist(const std::string& spec) {
    try {
        return NoiseDistribution::parse(spec);
    } catch (const std::exception& e) {
        throw std::invalid_argument(std::string("--dist: ") + e.what());
    }
}

PrizeSchedule parse_prizes(const std::string& spec, int n) {
    try {
        return PrizeSchedule::parse(spec, n);
    } catch (const std::exception& e) {
        throw std::invalid_argument(std::string("--prizes: ") + e.what());
    }
}

CostFunction parse_cost(const std::string& spec) {
    if (spec.rfind("quadratic:c0=", 0) == 0) {
        try {
            std::size_t used = 0;
            std::string tail = spec.substr(13);
            double c0 = std::stod(tail, &used);
            if (used != tail.size()) throw std::invalid_argument("trailing characters");
            return CostFunction::quadratic(c0);
        } catch (const std::exception&) {
            throw std::invalid_argument("--cost: bad value in '" + spec + "'");
        }
    }
    throw std::invalid_argument("--cost: expected quadratic:c0=<real>, got '" + spec + "'");
}

double parse_theta(double theta) {
    if (!(theta >= 0.0 && theta <= 1.0))
        throw std::invalid_argument("--theta: must lie in [0, 1]");
    return theta;
}

json table_to_json(const Table& t) {
    json j;
    j["columns"] = t.columns;
    json rows = json::array();
    for (const auto& row : t.rows) {
        json jr = json::array();
        for (const auto& c : row) {
            if (std::holds_alternative<std::monostate>(c))
                jr.push_back(nullptr);
            else if (const double* d = std::get_if<double>(&c))
                jr.push_back(*d);
            else if (const long long* i = std::get_if<long long>(&c))
                jr.push_back(*i);
            else
                jr.push_back(std::get<std::string>(c));
        }
        rows.push_back(std::move(jr));
    }
    j["rows"] = std::move(rows);
    return j;
}

void write_text(const std::string& out_path, const std::string& text) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open output file '" + out_path + "'");
    f << text;
    if (!f) throw std::runtime_error("write failed for '" + out_path + "'");
}

void emit_table(const Table& t, const std::string& format, const std::string& out,
                const json* extra = nullptr) {
    if (format == "csv") {
        write_text(out, to_csv(t));
    } else if (format == "json") {
        json j = table_to_json(t);
        if (extra)
            for (auto& [k, v] : extra->items()) j[k] = v;
        write_text(out, j.dump(2) + "\n");
    } else {
        throw std::invalid_argument("--format: expected csv or json, got '" + format + "'");
    }
}

// Applies config-file values to options the command line left untouched.
struct ConfigMerge {
    json cfg;

    explicit ConfigMerge(const std::string& path) {
        if (path.empty()) return;
        std::ifstream f(path);
        if (!f) throw std::invalid_argument("--config: cannot open '" + path + "'");
        try {
            f >> cfg;
        } catch (const json::exception& e) {
            throw std::invalid_argument("--config: " + std::string(e.what()));
        }
        if (!cfg.is_object()) throw std::invalid_argument("--config: expected a JSON object");
    }

    template <typename T>
    void apply(const CLI::Option* opt, const char* key, T& var) const {
        if (cfg.is_null() || opt->count() > 0 || !cfg.contains(key)) return;
        try {
            var = cfg.at(key).get<T>();
        } catch (const json::exception&) {
            throw std::invalid_argument(std::string("--config: bad value for '") + key + "'");
        }
    }
};

// --------------------------------------------------------------- subcommands

struct CommonArgs {
    std::string dist = "gumbel";
    int n = 15;
    std::string format = "csv";
    std::string out;
    std::string config;
    CLI::Option *dist_opt = nullptr, *n_opt = nullptr, *format_opt = nullptr, *out_opt = nullptr;

    void attach(CLI::App* cmd, bool with_dist = true) {
        if (with_dist)
            dist_opt = cmd->add_option("--dist", dist,
                                       "noise spec: uniform:b=<w> | gumbel | pareto | burr | "
                                       "normal:sigma=<s>");
        n_opt = cmd->add_option("--n", n, "number of agents");
        format_opt = cmd->add_option("--format", format, "csv or json");
        out_opt = cmd->add_option("--out", out, "output path (default stdout)");
        cmd->add_option("--config", config, "JSON file mirroring the flags; flags win");
    }

    void merge(const ConfigMerge& m) {
        if (dist_opt) m.apply(dist_opt, "dist", dist);
        m.apply(n_opt, "n", n);
        m.apply(format_opt, "format", format);
        m.apply(out_opt, "out", out);
    }

    void validate() const {
        if (n < 2) throw std::invalid_argument("--n: must be >= 2");
        if (format != "csv" && format != "json")
            throw std::invalid_argument("--format: expected csv or json");
    }
};

int cmd_coeffs(const CommonArgs& a) {
    const NoiseDistribution d = parse_dist(a.dist);
    const RankCoefficients c = compute_beta(d, a.n);
    Table t;
    t.columns = {"r", "beta", "B", "bar_beta", "closed_form_B", "abs_diff"};
    for (int r = 1; r <= a.n; ++r) {
        std::vector<Cell> row{static_cast<long long>(r), c.beta_at(r), c.B_at(r)};
        if (r <= a.n - 1)
            row.emplace_back(c.bar_beta_at(r));
        else
            row.emplace_back(std::monostate{});
        std::optional<double> cf = r <= a.n - 1 ? d.closed_form_B(a.n, r) : std::nullopt;
        if (cf) {
            row.emplace_back(*cf);
            row.emplace_back(std::abs(c.B_at(r) - *cf));
        } else {
            row.emplace_back(std::monostate{});
            row.emplace_back(std::monostate{});
        }
        t.add_row(std::move(row));
    }
    emit_table(t, a.format, a.out);
    return kExitOk;
}

int cmd_optimal(const CommonArgs& a, double theta) {
    parse_theta(theta);
    const NoiseDistribution d = parse_dist(a.dist);
    const RankCoefficients c = compute_beta(d, a.n);
    const std::vector<double> A = prize_coefficients_A(c, theta);
    const ArgmaxReport rep = optimal_r_star(c, theta);
    Table t;
    t.columns = {"r", "A", "argmax"};
    for (int r = 1; r <= a.n - 1; ++r) {
        const bool tied =
            std::find(rep.tie_set.begin(), rep.tie_set.end(), r) != rep.tie_set.end();
        t.add_row({static_cast<long long>(r), A[r - 1], static_cast<long long>(tied ? 1 : 0)});
    }
    json extra;
    extra["r_star"] = rep.r_star;
    extra["tie_set"] = rep.tie_set;
    extra["theta"] = theta;
    emit_table(t, a.format, a.out, &extra);
    return kExitOk;
}

Table steps_table(const RStarPath& path) {
    Table t;
    t.columns = {"theta", "r_star"};
    t.add_row({0.0, static_cast<long long>(path.initial_r)});
    for (const RStarStep& s : path.jumps)
        t.add_row({s.theta, static_cast<long long>(s.r)});
    return t;
}

int cmd_breakpoints(const CommonArgs& a) {
    const NoiseDistribution d = parse_dist(a.dist);
    const RankCoefficients c = compute_beta(d, a.n);
    emit_table(steps_table(r_star_breakpoints(c)), a.format, a.out);
    return kExitOk;
}

int cmd_effort(const CommonArgs& a, const std::string& grid_spec, const std::string& prizes,
               const std::string& cost_spec) {
    const NoiseDistribution d = parse_dist(a.dist);
    const CostFunction cost = parse_cost(cost_spec);
    const std::vector<double> thetas = ThetaGrid::parse(grid_spec).points();
    const RankCoefficients c = compute_beta(d, a.n);

    Table t;
    if (prizes == "optimal") {
        t.columns = {"theta", "r_star", "R", "L", "M", "x_star"};
        for (double th : thetas) {
            const int r = optimal_r_star(c, th).r_star;
            const double R = c.bar_beta_at(r);
            const double L = (2.0 * r / a.n - 1.0) * c.bar_beta_at(r);
            const double M = R + th * L;
            t.add_row({th, static_cast<long long>(r), R, L, M, cost.inverse_marginal(M)});
        }
    } else {
        const PrizeSchedule v = parse_prizes(prizes, a.n);
        const double R = monetary_marginal_R(c, v);
        const double L = psychological_marginal_L(c, v);
        t.columns = {"theta", "R", "L", "M", "x_star"};
        for (double th : thetas) {
            const double M = R + th * L;
            t.add_row({th, R, L, M, cost.inverse_marginal(std::max(M, 0.0))});
        }
    }
    emit_table(t, a.format, a.out);
    return kExitOk;
}

// The nine-file reproduction set: for each of gumbel/pareto/burr at n = 15,
// M(v', theta) and M(v'', theta) curves, the r*(theta) steps, and M*(theta).
int cmd_figure1(std::string out_dir) {
    if (out_dir.empty()) {
        const char* env = std::getenv("TOURNEY_OUT_DIR");
        out_dir = env && *env ? env : ".";
    }
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec)
        throw std::runtime_error("figure1: cannot create output directory '" + out_dir +
                                 "': " + ec.message());

    const int n = 15;
    // Six-prize demo schedule: as usually quoted, (2/7, 5/21, 4/21, 1/7, 2/21,
    // 1/7, 0...) breaks monotonicity and sums to 23/21. The unique
    // single-entry fix consistent with both constraints ends ...2/21, 1/21.
    std::vector<double> vp(n, 0.0);
    for (int r = 1; r <= 6; ++r) vp[r - 1] = (7.0 - r) / 21.0;
    std::cerr << "figure1: schedule v_prime as quoted (2/7, 5/21, 4/21, 1/7, 2/21, 1/7, 0...)"
                 " is non-monotone and sums to 23/21; using corrected final entry 1/21\n";
    const PrizeSchedule vprime{vp};

    std::vector<double> vpp(n, 0.0);
    for (int r = 1; r <= 9; ++r) vpp[r - 1] = 1.0 / 10.0;
    for (int r = 10; r <= 14; ++r) vpp[r - 1] = 1.0 / 50.0;
    const PrizeSchedule vsecond{vpp};

    const std::vector<double> thetas = ThetaGrid::parse("0:1:0.01").points();
    const std::vector<std::pair<std::string, NoiseDistribution>> families = {
        {"gumbel", NoiseDistribution::gumbel()},
        {"pareto", NoiseDistribution::pareto()},
        {"burr", NoiseDistribution::burr()},
    };

    for (const auto& [name, dist] : families) {
        const RankCoefficients c = compute_beta(dist, n);
        const double Rp = monetary_marginal_R(c, vprime);
        const double Lp = psychological_marginal_L(c, vprime);
        const double Rs = monetary_marginal_R(c, vsecond);
        const double Ls = psychological_marginal_L(c, vsecond);

        Table curves;
        curves.columns = {"theta", "M_vprime", "M_vsecond"};
        for (double th : thetas) curves.add_row({th, Rp + th * Lp, Rs + th * Ls});
        write_text(out_dir + "/" + name + "_M_curves.csv", to_csv(curves));

        write_text(out_dir + "/" + name + "_rstar_steps.csv",
                   to_csv(steps_table(r_star_breakpoints(c))));

        Table mstar;
        mstar.columns = {"theta", "M_star"};
        for (double th : thetas) {
            const std::vector<double> A = prize_coefficients_A(c, th);
            mstar.add_row({th, *std::max_element(A.begin(), A.end())});
        }
        write_text(out_dir + "/" + name + "_Mstar.csv", to_csv(mstar));
    }
    return kExitOk;
}

int cmd_simulate(const CommonArgs& a, double delta, double theta, const std::string& prizes,
                 const std::string& cost_spec, const SimulationConfig& cfg) {
    parse_theta(theta);
    const NoiseDistribution d = parse_dist(a.dist);
    const RankCoefficients c = compute_beta(d, a.n);
    const double N = static_cast<double>(cfg.samples);

    Table t;
    t.columns = {"quantity", "analytic", "value", "std_error", "z"};
    bool z_fail = false;
    auto push = [&](const std::string& name, double analytic, double value, double se) {
        const double se_eff = std::max(se, 1.0 / N);
        const double z = (value - analytic) / se_eff;
        if (std::abs(z) > 4.0) z_fail = true;
        t.add_row({name, analytic, value, se, z});
    };

    const std::vector<McEstimate> probs = mc_rank_probabilities(d, a.n, delta, cfg);
    for (int r = 1; r <= a.n; ++r)
        push("p[" + std::to_string(r) + "]", rank_probability(d, a.n, r, delta),
             probs[r - 1].value, probs[r - 1].std_error);

    const std::vector<McEstimate> betas = mc_beta(d, a.n, cfg);
    for (int r = 1; r <= a.n; ++r)
        push("beta[" + std::to_string(r) + "]", c.beta_at(r), betas[r - 1].value,
             betas[r - 1].std_error);

    if (!prizes.empty()) {
        const PrizeSchedule v = parse_prizes(prizes, a.n);
        const TournamentDesign design{a.n, d, LossAversionParams::from_theta(theta),
                                      parse_cost(cost_spec)};
        EquilibriumOptions light;
        light.diagnostics = false;
        const EquilibriumReport rep = equilibrium_effort(design, v, c, light);
        const double xb = design.cost.x_bar();
        std::vector<double> grid(81);
        for (int i = 0; i < 81; ++i) grid[i] = xb * i / 80.0;
        const BestResponseCurve curve = mc_best_response(design, v, rep.x_star, cfg, grid);
        const double step = xb / 80.0;
        const double se_eff =
            std::sqrt(curve.argmax_std_error * curve.argmax_std_error + step * step / 12.0);
        const double z = (curve.argmax - rep.x_star) / se_eff;
        if (std::abs(z) > 4.0) z_fail = true;
        t.add_row({std::string("best_response_argmax"), rep.x_star, curve.argmax,
                   curve.argmax_std_error, z});
        t.add_row({std::string("equilibrium_residual"), 0.0,
                   std::abs(curve.argmax - rep.x_star), curve.argmax_std_error,
                   std::monostate{}});
    }

    json extra;
    extra["seed"] = cfg.seed;
    extra["samples"] = cfg.samples;
    emit_table(t, a.format, a.out, &extra);
    return z_fail ? kExitOracle : kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv) {
    CLI::App app{"rank-order tournament equilibria and prize design under loss aversion"};
    app.require_subcommand(1);

    CLI::App* coeffs = app.add_subcommand("coeffs", "rank coefficients beta_r, B_r, B_r/r");
    CommonArgs coeffs_args;
    coeffs_args.attach(coeffs);

    CLI::App* optimal = app.add_subcommand("optimal", "prize coefficients A_r and the argmax");
    CommonArgs optimal_args;
    double optimal_theta = 0.0;
    optimal_args.attach(optimal);
    CLI::Option* optimal_theta_opt = optimal->add_option("--theta", optimal_theta, "in [0, 1]");

    CLI::App* breakpoints =
        app.add_subcommand("breakpoints", "exact theta values where the optimal count changes");
    CommonArgs breakpoints_args;
    breakpoints_args.attach(breakpoints);

    CLI::App* effort = app.add_subcommand("effort", "effort curve over a theta grid");
    CommonArgs effort_args;
    std::string effort_grid = "0:1:0.01";
    std::string effort_prizes = "optimal";
    std::string effort_cost = "quadratic:c0=1";
    effort_args.attach(effort);
    CLI::Option* effort_grid_opt =
        effort->add_option("--theta-grid", effort_grid, "start:stop:step, decimals");
    CLI::Option* effort_prizes_opt = effort->add_option(
        "--prizes", effort_prizes, "wta | topk:<s> | equidistant | optimal | <json path>");
    CLI::Option* effort_cost_opt =
        effort->add_option("--cost", effort_cost, "quadratic:c0=<real>");

    CLI::App* figure1 = app.add_subcommand(
        "figure1", "write the nine reproduction CSV files for gumbel/pareto/burr at n=15");
    std::string figure1_out;
    figure1->add_option("--out", figure1_out,
                        "output directory (default $TOURNEY_OUT_DIR or .)");

    CLI::App* simulate =
        app.add_subcommand("simulate", "Monte Carlo cross-check against quadrature");
    CommonArgs sim_args;
    double sim_delta = 0.25, sim_theta = 0.5;
    std::string sim_prizes = "wta";
    std::string sim_cost = "quadratic:c0=1";
    SimulationConfig sim_cfg;
    sim_args.attach(simulate);
    CLI::Option* sim_delta_opt = simulate->add_option("--delta", sim_delta, "effort offset");
    CLI::Option* sim_theta_opt = simulate->add_option("--theta", sim_theta, "in [0, 1]");
    CLI::Option* sim_prizes_opt = simulate->add_option("--prizes", sim_prizes,
                                                       "schedule for the best-response check");
    CLI::Option* sim_cost_opt = simulate->add_option("--cost", sim_cost, "quadratic:c0=<real>");
    CLI::Option* sim_samples_opt =
        simulate->add_option("--samples", sim_cfg.samples, "replications, >= 1000");
    CLI::Option* sim_seed_opt = simulate->add_option("--seed", sim_cfg.seed, "RNG seed");
    CLI::Option* sim_chunks_opt =
        simulate->add_option("--chunks", sim_cfg.chunks, "parallel chunks (result-invariant)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (coeffs->parsed()) {
            ConfigMerge m(coeffs_args.config);
            coeffs_args.merge(m);
            coeffs_args.validate();
            return cmd_coeffs(coeffs_args);
        }
        if (optimal->parsed()) {
            ConfigMerge m(optimal_args.config);
            optimal_args.merge(m);
            m.apply(optimal_theta_opt, "theta", optimal_theta);
            optimal_args.validate();
            return cmd_optimal(optimal_args, optimal_theta);
        }
        if (breakpoints->parsed()) {
            ConfigMerge m(breakpoints_args.config);
            breakpoints_args.merge(m);
            breakpoints_args.validate();
            return cmd_breakpoints(breakpoints_args);
        }
        if (effort->parsed()) {
            ConfigMerge m(effort_args.config);
            effort_args.merge(m);
            m.apply(effort_grid_opt, "theta_grid", effort_grid);
            m.apply(effort_prizes_opt, "prizes", effort_prizes);
            m.apply(effort_cost_opt, "cost", effort_cost);
            effort_args.validate();
            return cmd_effort(effort_args, effort_grid, effort_prizes, effort_cost);
        }
        if (figure1->parsed()) {
            return cmd_figure1(figure1_out);
        }
        if (simulate->parsed()) {
            ConfigMerge m(sim_args.config);
            sim_args.merge(m);
            m.apply(sim_delta_opt, "delta", sim_delta);
            m.apply(sim_theta_opt, "theta", sim_theta);
            m.apply(sim_prizes_opt, "prizes", sim_prizes);
            m.apply(sim_cost_opt, "cost", sim_cost);
            m.apply(sim_samples_opt, "samples", sim_cfg.samples);
            m.apply(sim_seed_opt, "seed", sim_cfg.seed);
            m.apply(sim_chunks_opt, "chunks", sim_cfg.chunks);
            sim_args.validate();
            if (sim_cfg.samples < 1000)
                throw std::invalid_argument("--samples: must be >= 1000");
            return cmd_simulate(sim_args, sim_delta, sim_theta, sim_prizes, sim_cost, sim_cfg);
        }
        return kExitUsage;
    } catch (const numeric_error& e) {
        std::cerr << "numeric error: " << e.what()
                  << " (achieved error estimate " << e.error_estimate() << ")\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
}

}  // namespace tourney::cli
