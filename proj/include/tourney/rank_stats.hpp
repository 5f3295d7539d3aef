#pragma once

#include <vector>

#include "tourney/noise.hpp"

namespace tourney {

enum class CoeffMethod { quadrature, closed_form, monte_carlo };

// Quadrature noise below this magnitude is treated as a structural zero when
// classifying signs (interior beta of the uniform family, r_hat).
inline constexpr double kZeroBand = 1e-9;

/// Marginal rank probabilities at the symmetric equilibrium point.
///   beta[r-1]     d/dx P(rank = r), r = 1..n
///   B[r-1]        sum of beta_1..beta_r; B_n vanishes
///   bar_beta[r-1] B_r / r, r = 1..n-1
struct RankCoefficients {
    int n = 0;
    std::vector<double> beta;
    std::vector<double> B;
    std::vector<double> bar_beta;
    CoeffMethod method = CoeffMethod::quadrature;

    double beta_at(int r) const { return beta.at(r - 1); }
    double B_at(int r) const { return B.at(r - 1); }
    double bar_beta_at(int r) const { return bar_beta.at(r - 1); }
};

/// P(rank = r) for an agent whose effort sits delta above the common effort
/// of the n-1 others.
double rank_probability(const NoiseDistribution& dist, int n, int r, double delta);

/// All beta_r by quadrature in probability space; B and bar_beta filled from
/// the partial sums. The r = 1 and r = n integrands are simplified
/// symbolically first (the raw exponents r-2 and n-r-1 would be negative).
RankCoefficients compute_beta(const NoiseDistribution& dist, int n);

/// B_r by direct quadrature, r = 1..n (B_n = 0 by definition). Independent of
/// compute_beta's summation route.
std::vector<double> compute_B(const NoiseDistribution& dist, int n);

/// Coefficients assembled from the family's catalogued closed form, when it
/// has one: beta from first differences of B. Empty for generic families.
std::optional<RankCoefficients> coefficients_from_closed_form(const NoiseDistribution& dist,
                                                              int n);

/// bar_beta_r via the hazard representation: the mean hazard rate at the
/// (n-r)-th smallest of n draws, divided by n.
double bar_beta_hazard(const NoiseDistribution& dist, int n, int r);

/// Largest rank whose beta is strictly positive (zero band kZeroBand).
int r_hat(const RankCoefficients& coeffs);

}  // namespace tourney
