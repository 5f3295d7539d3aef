#pragma once

#include <cstdint>
#include <vector>

#include "tourney/incentives.hpp"

namespace tourney {

/// Monte Carlo configuration. Estimates are deterministic functions of
/// (inputs, samples, seed, fd_step) alone: tallies are integers, so the chunk
/// count changes parallelism but never the result.
struct SimulationConfig {
    std::size_t samples = 1000000;  // >= 1000
    std::uint64_t seed = 0;
    double fd_step = 1e-2;  // effort step for the beta finite differences
    int chunks = 1;
};

struct McEstimate {
    double value = 0.0;
    double std_error = 0.0;
    std::size_t samples = 0;
};

/// Rank frequencies of a focal agent sitting delta above the field,
/// one tournament draw per replication.
std::vector<McEstimate> mc_rank_probabilities(const NoiseDistribution& dist, int n, double delta,
                                              const SimulationConfig& cfg);

/// beta_r by central finite differences of the rank frequencies at
/// +/- fd_step, with common random numbers across the two evaluations.
std::vector<McEstimate> mc_beta(const NoiseDistribution& dist, int n,
                                const SimulationConfig& cfg);

struct BestResponseCurve {
    std::vector<double> grid;
    std::vector<double> utility;      // estimated u(x; x_star) per grid point
    std::vector<double> std_error;    // delta-method standard errors
    double argmax = 0.0;              // grid point with the largest estimate
    double argmax_std_error = 0.0;    // vertex uncertainty from a local parabola fit
};

/// Evaluates the deviation utility on an effort grid using simulated rank
/// frequencies plugged into the reduced utility form (the gain-loss term is a
/// function of the estimated probabilities, not of realized prizes). Shocks
/// are shared across grid points.
BestResponseCurve mc_best_response(const TournamentDesign& design, const PrizeSchedule& v,
                                   double x_star, const SimulationConfig& cfg,
                                   const std::vector<double>& grid);

/// |MC best-response argmax - analytic x*| on a default 81-point grid over
/// [0, x_bar].
double equilibrium_residual(const TournamentDesign& design, const PrizeSchedule& v,
                            const SimulationConfig& cfg);

}  // namespace tourney
