#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace smann {

/// Malformed or out-of-contract arguments (dimension mismatch, NaN input,
/// non-contractive parameters, bad config fields).
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Parameter combination outside the domain of a formula (divergent series,
/// rho outside its admissible window, n < 2 for the rate envelope).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// An iterate left the finite range. `last_finite_index` is the last n whose
/// iterate x_n was finite.
class DivergedError : public std::runtime_error {
public:
    DivergedError(const std::string& what, std::size_t last_finite_index)
        : std::runtime_error(what), last_finite_index_(last_finite_index) {}

    std::size_t last_finite_index() const noexcept { return last_finite_index_; }

private:
    std::size_t last_finite_index_;
};

/// No iteration count under the search cap brings the tail bound below alpha.
class InfeasibleError : public std::runtime_error {
public:
    InfeasibleError(const std::string& what, double log_bound_at_cap, double raw_bound_at_cap)
        : std::runtime_error(what), log_bound_at_cap_(log_bound_at_cap),
          raw_bound_at_cap_(raw_bound_at_cap) {}

    double log_bound_at_cap() const noexcept { return log_bound_at_cap_; }
    double raw_bound_at_cap() const noexcept { return raw_bound_at_cap_; }

private:
    double log_bound_at_cap_;
    double raw_bound_at_cap_;
};

}  // namespace smann
