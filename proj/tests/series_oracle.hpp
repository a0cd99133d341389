#pragma once

// Brute-force oracle for sum_{i>=1} (i+1)^p / i^q: explicit summation of the
// first M terms in extended precision plus the tail approximated by the
// midpoint-rule integral over [M + 1/2, inf), evaluated by exp-sinh quadrature.
// For decreasing convex f the midpoint error is below f''(M)/24 per unit, so
// for M = 10^7 the tail error is below 1e-20.

#include <boost/math/quadrature/exp_sinh.hpp>

#include <cmath>
#include <cstddef>

namespace oracle {

inline long double brute_partial_sum(double p, double q, std::size_t terms)
{
    long double sum = 0;
    for (std::size_t i = terms; i >= 1; --i) {
        const auto x = static_cast<long double>(i);
        sum += std::pow(x + 1, static_cast<long double>(p)) / std::pow(x, static_cast<long double>(q));
    }
    return sum;
}

inline double midpoint_tail(double p, double q, std::size_t terms)
{
    const double start = static_cast<double>(terms) + 0.5;
    boost::math::quadrature::exp_sinh<double> integrator;
    // Shift to [0, inf) so the integrand is smooth at the origin.
    const auto f = [&](double t) {
        const double x = start + t;
        return std::pow(x + 1.0, p) / std::pow(x, q);
    };
    return integrator.integrate(f, 0.0, std::numeric_limits<double>::infinity());
}

inline double power_ratio_sum(double p, double q, std::size_t terms)
{
    return static_cast<double>(brute_partial_sum(p, q, terms) + midpoint_tail(p, q, terms));
}

}  // namespace oracle
