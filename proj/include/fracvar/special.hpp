#pragma once

#include <stdexcept>
#include <string>

namespace fracvar {

/// Thrown when Γ is requested at a non-positive integer.
class PoleError : public std::domain_error {
public:
    explicit PoleError(const std::string& what) : std::domain_error(what) {}
};

/// sin(πx) with exact zeros at the integers.
double sinpi(double x);

/// Gamma function (std::tgamma). Throws PoleError at 0, -1, -2, ...
double gamma(double x);

/**
 * Reciprocal gamma 1/Γ(x). Entire: returns exactly 0 at the non-positive
 * integers and is continuous there, so coefficients like 1/Γ(1-α) fade out
 * smoothly as α → 1.
 */
double rgamma(double x);

} // namespace fracvar
