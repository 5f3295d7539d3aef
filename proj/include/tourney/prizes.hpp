#pragma once

#include <string_view>
#include <vector>

namespace tourney {

// Construction-time validation tolerance for monotonicity and the unit sum.
inline constexpr double kPrizeTol = 1e-12;

/// Prize vector: non-negative, non-increasing, summing to one. Validated at
/// construction; everything downstream may assume the invariants.
class PrizeSchedule {
public:
    explicit PrizeSchedule(std::vector<double> v);

    /// s equal prizes of 1/s at the top, 1 <= s <= n-1.
    static PrizeSchedule top_s(int n, int s);

    /// v_r = 2(n-r)/(n(n-1)); every differential equals 2/(n(n-1)).
    static PrizeSchedule equidistant(int n);

    static PrizeSchedule winner_take_all(int n) { return top_s(n, 1); }

    /// Rebuilds a schedule from differentials d_1..d_{n-1}, taking v_n = 0.
    static PrizeSchedule from_differentials(const std::vector<double>& d, int n);

    /// "wta", "topk:<s>", "equidistant", or a path to a JSON array of n reals.
    static PrizeSchedule parse(std::string_view spec, int n);

    int n() const { return static_cast<int>(v_.size()); }
    double v_at(int r) const { return v_.at(r - 1); }  // 1-based rank
    const std::vector<double>& values() const { return v_; }

    /// d_r = v_r - v_{r+1}, r = 1..n-1.
    std::vector<double> differentials() const;

private:
    std::vector<double> v_;
};

}  // namespace tourney
