#include "fracvar/special.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace fracvar {

namespace {

bool is_nonpositive_integer(double x) { return x <= 0.0 && x == std::floor(x); }

} // namespace

double sinpi(double x)
{
    // reduce to [-1, 1]; sin(πx) has period 2
    double r = std::fmod(x, 2.0);
    if (r > 1.0)
        r -= 2.0;
    else if (r < -1.0)
        r += 2.0;
    if (r == 0.0 || r == 1.0 || r == -1.0)
        return 0.0;
    if (r == 0.5)
        return 1.0;
    if (r == -0.5)
        return -1.0;
    return std::sin(std::numbers::pi * r);
}

double gamma(double x)
{
    if (std::isnan(x))
        return x;
    if (is_nonpositive_integer(x))
        throw PoleError("gamma: pole at x = " + std::to_string(x));
    return std::tgamma(x);
}

double rgamma(double x)
{
    if (std::isnan(x))
        return x;
    if (is_nonpositive_integer(x))
        return 0.0;
    // Γ overflows past 171.6; the reciprocal is then 0, or tiny with the sign of sin(πx)
    if (x < -170.0)
        return sinpi(x) * std::tgamma(1.0 - x) / std::numbers::pi;
    return 1.0 / std::tgamma(x);
}

} // namespace fracvar
