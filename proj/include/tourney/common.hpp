#pragma once

#include <stdexcept>
#include <string>

namespace tourney {

// A numerical routine (quadrature, root bracketing) stopped short of its
// tolerance. error_estimate carries the achieved error bound.
class numeric_error : public std::runtime_error {
public:
    numeric_error(const std::string& what, double achieved)
        : std::runtime_error(what), error_estimate_(achieved) {}
    double error_estimate() const { return error_estimate_; }

private:
    double error_estimate_;
};

// Evaluation at a point where the function diverges (e.g. hazard rate at the
// upper support endpoint).
class singularity_error : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

}  // namespace tourney
