#include "tourney/prizes.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace tourney {

PrizeSchedule::PrizeSchedule(std::vector<double> v) : v_(std::move(v)) {
    const int n = static_cast<int>(v_.size());
    if (n < 2) throw std::invalid_argument("prize schedule needs n >= 2 entries");
    double sum = 0.0;
    for (int r = 0; r < n; ++r) {
        if (!std::isfinite(v_[r]))
            throw std::invalid_argument("prize schedule: entry " + std::to_string(r + 1) +
                                        " is not finite");
        if (v_[r] < -kPrizeTol)
            throw std::invalid_argument("prize schedule: entry " + std::to_string(r + 1) +
                                        " is negative");
        if (r > 0 && v_[r] > v_[r - 1] + kPrizeTol) {
            std::ostringstream os;
            os << "prize schedule: not non-increasing at rank " << r + 1 << " (" << v_[r - 1]
               << " -> " << v_[r] << ")";
            throw std::invalid_argument(os.str());
        }
        sum += v_[r];
    }
    if (std::abs(sum - 1.0) > kPrizeTol * n) {
        std::ostringstream os;
        os << "prize schedule: entries sum to " << sum << ", expected 1";
        throw std::invalid_argument(os.str());
    }
}

PrizeSchedule PrizeSchedule::top_s(int n, int s) {
    if (n < 2) throw std::domain_error("top_s: n must be >= 2");
    if (s < 1 || s > n - 1)
        throw std::domain_error("top_s: s must satisfy 1 <= s <= n-1, got s=" +
                                std::to_string(s) + ", n=" + std::to_string(n));
    std::vector<double> v(n, 0.0);
    for (int r = 0; r < s; ++r) v[r] = 1.0 / s;
    return PrizeSchedule(std::move(v));
}

PrizeSchedule PrizeSchedule::equidistant(int n) {
    if (n < 2) throw std::domain_error("equidistant: n must be >= 2");
    std::vector<double> v(n);
    for (int r = 1; r <= n; ++r)
        v[r - 1] = 2.0 * (n - r) / (static_cast<double>(n) * (n - 1));
    return PrizeSchedule(std::move(v));
}

PrizeSchedule PrizeSchedule::from_differentials(const std::vector<double>& d, int n) {
    if (static_cast<int>(d.size()) != n - 1)
        throw std::invalid_argument("from_differentials: expected n-1 differentials");
    for (std::size_t r = 0; r < d.size(); ++r)
        if (!(d[r] >= -kPrizeTol))
            throw std::invalid_argument("from_differentials: negative differential at r=" +
                                        std::to_string(r + 1));
    std::vector<double> v(n, 0.0);
    for (int r = n - 1; r >= 1; --r) v[r - 1] = v[r] + d[r - 1];
    return PrizeSchedule(std::move(v));
}

std::vector<double> PrizeSchedule::differentials() const {
    std::vector<double> d(v_.size() - 1);
    for (std::size_t r = 0; r + 1 < v_.size(); ++r) d[r] = v_[r] - v_[r + 1];
    return d;
}

PrizeSchedule PrizeSchedule::parse(std::string_view spec, int n) {
    if (spec == "wta") return winner_take_all(n);
    if (spec == "equidistant") return equidistant(n);
    if (spec.rfind("topk:", 0) == 0) {
        std::string_view tail = spec.substr(5);
        int s = 0;
        auto [p, ec] = std::from_chars(tail.data(), tail.data() + tail.size(), s);
        if (ec != std::errc{} || p != tail.data() + tail.size())
            throw std::invalid_argument("prize spec '" + std::string(spec) +
                                        "': expected topk:<integer>");
        return top_s(n, s);
    }
    // anything else is a path to a JSON array
    std::ifstream in{std::string(spec)};
    if (!in)
        throw std::invalid_argument("prize spec '" + std::string(spec) +
                                    "': not a keyword and not a readable file");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument("prize file '" + std::string(spec) + "': " + e.what());
    }
    if (!j.is_array())
        throw std::invalid_argument("prize file '" + std::string(spec) +
                                    "': expected a JSON array of reals");
    std::vector<double> v;
    v.reserve(j.size());
    for (const auto& x : j) {
        if (!x.is_number())
            throw std::invalid_argument("prize file '" + std::string(spec) +
                                        "': non-numeric entry");
        v.push_back(x.get<double>());
    }
    if (static_cast<int>(v.size()) != n)
        throw std::invalid_argument("prize file '" + std::string(spec) + "': has " +
                                    std::to_string(v.size()) + " entries, expected n=" +
                                    std::to_string(n));
    return PrizeSchedule(std::move(v));
}

}  // namespace tourney
