#include "tourney/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <future>
#include <stdexcept>
#include <vector>

#include "tourney/rng.hpp"

namespace tourney {

namespace {

void check_cfg(const SimulationConfig& cfg) {
    if (cfg.samples < 1000) throw std::domain_error("simulation needs at least 1000 samples");
    if (!(cfg.fd_step > 0.0)) throw std::domain_error("fd_step must be positive");
    if (cfg.chunks < 1) throw std::domain_error("chunks must be >= 1");
}

// Runs body(lo, hi, tally) over a contiguous partition of [0, samples) and
// merges the integer tallies in chunk order. Tally must be a vector of an
// integral type with operator+= semantics element-wise.
template <typename Tally, typename Body>
Tally run_chunked(const SimulationConfig& cfg, std::size_t tally_size, Body body) {
    const std::size_t N = cfg.samples;
    const int chunks = static_cast<int>(std::min<std::size_t>(cfg.chunks, N));
    std::vector<std::future<Tally>> futs;
    futs.reserve(chunks);
    for (int c = 0; c < chunks; ++c) {
        const std::size_t lo = N * c / chunks;
        const std::size_t hi = N * (c + 1) / chunks;
        futs.push_back(std::async(std::launch::async, [=]() {
            Tally t(tally_size, 0);
            body(lo, hi, t);
            return t;
        }));
    }
    Tally total(tally_size, 0);
    for (auto& f : futs) {
        Tally t = f.get();
        for (std::size_t i = 0; i < tally_size; ++i) total[i] += t[i];
    }
    return total;
}

// Focal agent's rank among n: 1 + number of rivals strictly above. Exact
// floating-point ties go to the focal agent (lower index).
inline int focal_rank(double y, const double* rivals, int count) {
    int above = 0;
    for (int j = 0; j < count; ++j) above += rivals[j] > y;
    return 1 + above;
}

}  // namespace

std::vector<McEstimate> mc_rank_probabilities(const NoiseDistribution& dist, int n, double delta,
                                              const SimulationConfig& cfg) {
    check_cfg(cfg);
    if (n < 2) throw std::domain_error("mc_rank_probabilities: n must be >= 2");
    if (!std::isfinite(delta)) throw std::domain_error("mc_rank_probabilities: bad delta");
    const CounterStream rng{cfg.seed};

    using Tally = std::vector<std::uint64_t>;
    Tally counts = run_chunked<Tally>(cfg, n, [&](std::size_t lo, std::size_t hi, Tally& t) {
        std::vector<double> rivals(n - 1);
        for (std::size_t i = lo; i < hi; ++i) {
            const std::uint64_t base = i * static_cast<std::uint64_t>(n);
            const double y = delta + dist.quantile(rng.u01(base));
            for (int j = 1; j < n; ++j) rivals[j - 1] = dist.quantile(rng.u01(base + j));
            t[focal_rank(y, rivals.data(), n - 1) - 1]++;
        }
    });

    const double N = static_cast<double>(cfg.samples);
    std::vector<McEstimate> est(n);
    for (int r = 0; r < n; ++r) {
        const double p = counts[r] / N;
        est[r] = {p, std::sqrt(p * (1.0 - p) / N), cfg.samples};
    }
    return est;
}

std::vector<McEstimate> mc_beta(const NoiseDistribution& dist, int n,
                                const SimulationConfig& cfg) {
    check_cfg(cfg);
    if (n < 2) throw std::domain_error("mc_beta: n must be >= 2");
    const CounterStream rng{cfg.seed};
    const double h = cfg.fd_step;

    // tally layout, all counts of replications where the two shifted ranks differ:
    //   [0, n)  rank(+h) == r
    //   [n, 2n) rank(-h) == r
    using Tally = std::vector<std::uint64_t>;
    Tally t = run_chunked<Tally>(cfg, 2 * n, [&](std::size_t lo, std::size_t hi, Tally& tl) {
        std::vector<double> rivals(n - 1);
        for (std::size_t i = lo; i < hi; ++i) {
            const std::uint64_t base = i * static_cast<std::uint64_t>(n);
            const double e0 = dist.quantile(rng.u01(base));
            for (int j = 1; j < n; ++j) rivals[j - 1] = dist.quantile(rng.u01(base + j));
            const int rp = focal_rank(e0 + h, rivals.data(), n - 1);
            const int rm = focal_rank(e0 - h, rivals.data(), n - 1);
            if (rp != rm) {
                tl[rp - 1]++;
                tl[n + rm - 1]++;
            }
        }
    });

    const double N = static_cast<double>(cfg.samples);
    std::vector<McEstimate> est(n);
    for (int r = 0; r < n; ++r) {
        const double plus = static_cast<double>(t[r]);
        const double minus = static_cast<double>(t[n + r]);
        const double mean_d = (plus - minus) / N;
        const double mean_d2 = (plus + minus) / N;
        const double var_d = std::max(0.0, mean_d2 - mean_d * mean_d);
        est[r] = {mean_d / (2.0 * h), std::sqrt(var_d / N) / (2.0 * h), cfg.samples};
    }
    return est;
}

BestResponseCurve mc_best_response(const TournamentDesign& design, const PrizeSchedule& v,
                                   double x_star, const SimulationConfig& cfg,
                                   const std::vector<double>& grid) {
    check_cfg(cfg);
    const int n = design.n;
    if (v.n() != n) throw std::domain_error("mc_best_response: schedule size mismatch");
    const int G = static_cast<int>(grid.size());
    if (G < 3) throw std::domain_error("mc_best_response: need at least 3 grid points");
    if (!std::is_sorted(grid.begin(), grid.end()))
        throw std::domain_error("mc_best_response: grid must be ascending");
    if (grid.front() < 0.0 || grid.back() > design.cost.x_bar() * (1.0 + 1e-12))
        throw std::domain_error("mc_best_response: grid must stay inside [0, x_bar]");

    const CounterStream rng{cfg.seed};
    const double theta = design.loss.theta;
    const std::size_t N = cfg.samples;

    // Rank counts per (jackknife block, grid point, rank). The block of a
    // replication depends only on its index, so both the estimates and the
    // jackknife spread are invariant to the chunk partition.
    constexpr int kBlocks = 16;
    const std::size_t stride_g = static_cast<std::size_t>(n);
    const std::size_t stride_b = static_cast<std::size_t>(G) * n;

    using Tally = std::vector<std::uint64_t>;
    Tally t = run_chunked<Tally>(cfg, kBlocks * stride_b,
                                 [&](std::size_t lo, std::size_t hi, Tally& tl) {
        std::vector<double> rivals(n - 1);
        for (std::size_t i = lo; i < hi; ++i) {
            const std::uint64_t base = i * static_cast<std::uint64_t>(n);
            const double e0 = design.dist.quantile(rng.u01(base));
            for (int j = 1; j < n; ++j)
                rivals[j - 1] = design.dist.quantile(rng.u01(base + j));
            std::sort(rivals.begin(), rivals.end());
            const std::size_t block = i * kBlocks / N;
            // y rises along the grid, so the count of rivals above it only falls
            int below = 0;  // rivals <= y
            for (int g = 0; g < G; ++g) {
                const double y = grid[g] - x_star + e0;
                while (below < n - 1 && rivals[below] <= y) ++below;
                const int rank = n - below;
                tl[block * stride_b + g * stride_g + rank - 1]++;
            }
        }
    });

    // utility of a grid point given rank counts and the replication total
    auto utility_from = [&](const std::vector<double>& p, int g) {
        double monetary = 0.0, loss = 0.0;
        for (int r = 1; r <= n; ++r) monetary += p[r - 1] * v.v_at(r);
        for (int r = 2; r <= n; ++r)
            for (int s = 1; s < r; ++s)
                loss += p[r - 1] * p[s - 1] * (v.v_at(s) - v.v_at(r));
        return monetary - theta * loss - design.cost.value(grid[g]);
    };

    std::vector<std::uint64_t> full(stride_b, 0);
    for (int b = 0; b < kBlocks; ++b)
        for (std::size_t k = 0; k < stride_b; ++k) full[k] += t[b * stride_b + k];

    BestResponseCurve out;
    out.grid = grid;
    out.utility.resize(G);
    out.std_error.resize(G);
    const double Nd = static_cast<double>(N);
    std::vector<double> p(n);
    for (int g = 0; g < G; ++g) {
        for (int r = 0; r < n; ++r) p[r] = full[g * stride_g + r] / Nd;
        out.utility[g] = utility_from(p, g);
        // delta-method standard error: gradient of the utility in the rank
        // frequencies against the multinomial covariance
        double m1 = 0.0, m2 = 0.0;
        for (int k = 1; k <= n; ++k) {
            double dl = 0.0;
            for (int s = 1; s < k; ++s) dl += p[s - 1] * (v.v_at(s) - v.v_at(k));
            for (int r = k + 1; r <= n; ++r) dl += p[r - 1] * (v.v_at(k) - v.v_at(r));
            const double gk = v.v_at(k) - theta * dl;
            m1 += p[k - 1] * gk;
            m2 += p[k - 1] * gk * gk;
        }
        out.std_error[g] = std::sqrt(std::max(0.0, m2 - m1 * m1) / Nd);
    }

    const int imax = static_cast<int>(std::max_element(out.utility.begin(), out.utility.end()) -
                                      out.utility.begin());
    out.argmax = grid[imax];

    const double step = (grid.back() - grid.front()) / (G - 1);
    out.argmax_std_error = step;  // fallback for boundary or non-concave fits
    if (imax > 0 && imax < G - 1) {
        // Leave-one-block-out replicates of two location statistics: the
        // vertex of the parabola through the argmax and its neighbours, and
        // the grid argmax itself. The jackknife spread prices in the
        // common-random-number correlation across grid points; the larger of
        // the two spreads guards against the vertex fit collapsing when the
        // curve is noise-flat around the maximum.
        std::vector<double> vertex_rep(kBlocks), argmax_rep(kBlocks);
        std::vector<double> curve(G);
        for (int b = 0; b < kBlocks; ++b) {
            const std::size_t blo = b * N / kBlocks;
            const std::size_t bhi = (b + 1) * N / kBlocks;
            const double Nb = static_cast<double>(N - (bhi - blo));
            for (int g = 0; g < G; ++g) {
                for (int r = 0; r < n; ++r)
                    p[r] = (full[g * stride_g + r] - t[b * stride_b + g * stride_g + r]) / Nb;
                curve[g] = utility_from(p, g);
            }
            argmax_rep[b] =
                grid[std::max_element(curve.begin(), curve.end()) - curve.begin()];
            const double C = curve[imax + 1] - 2.0 * curve[imax] + curve[imax - 1];
            if (C < 0.0) {
                double o = -step * (curve[imax + 1] - curve[imax - 1]) / (2.0 * C);
                o = std::min(std::max(o, -2.0 * step), 2.0 * step);
                vertex_rep[b] = grid[imax] + o;
            } else {
                vertex_rep[b] = grid[imax];
            }
        }
        auto jackknife_se = [&](const std::vector<double>& xs) {
            double mean = 0.0;
            for (double x : xs) mean += x;
            mean /= xs.size();
            double ss = 0.0;
            for (double x : xs) ss += (x - mean) * (x - mean);
            return std::sqrt(ss * (xs.size() - 1.0) / xs.size());
        };
        out.argmax_std_error = std::max(jackknife_se(vertex_rep), jackknife_se(argmax_rep));
    }
    return out;
}

double equilibrium_residual(const TournamentDesign& design, const PrizeSchedule& v,
                            const SimulationConfig& cfg) {
    EquilibriumOptions light;
    light.diagnostics = false;
    const EquilibriumReport rep = equilibrium_effort(design, v, light);
    const double xb = design.cost.x_bar();
    std::vector<double> grid(81);
    for (int i = 0; i < 81; ++i) grid[i] = xb * i / 80.0;
    const BestResponseCurve curve = mc_best_response(design, v, rep.x_star, cfg, grid);
    return std::abs(curve.argmax - rep.x_star);
}

}  // namespace tourney
