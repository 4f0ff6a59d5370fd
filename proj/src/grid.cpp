#include "fracvar/grid.hpp"

#include <cmath>
#include <string>

namespace fracvar {

Grid::Grid(double a, double b, std::size_t n)
    : a_(a), b_(b), n_(n), h_((b - a) / static_cast<double>(n))
{
    if (!std::isfinite(a) || !std::isfinite(b) || !(b > a))
        throw std::invalid_argument("grid: need finite endpoints with b > a");
    if (n < 2)
        throw std::invalid_argument("grid: need at least 2 subintervals, got " +
                                    std::to_string(n));
}

std::vector<double> Grid::nodes() const
{
    std::vector<double> t(size());
    for (std::size_t j = 0; j < t.size(); ++j)
        t[j] = node(j);
    return t;
}

FracOrder::FracOrder(double alpha) : alpha_(alpha), band_(0)
{
    if (!std::isfinite(alpha) || !(alpha > 0.0))
        throw std::invalid_argument("fractional order must be positive and finite");
    band_ = static_cast<int>(std::ceil(alpha));
}

SampledSignal::SampledSignal(Grid g, std::vector<double> v)
    : grid(g), values(std::move(v))
{
    if (values.size() != grid.size())
        throw std::invalid_argument("sampled signal: expected " +
                                    std::to_string(grid.size()) + " values, got " +
                                    std::to_string(values.size()));
    for (std::size_t j = 0; j < values.size(); ++j)
        if (!std::isfinite(values[j]))
            throw std::invalid_argument("sampled signal: non-finite value at node " +
                                        std::to_string(j));
}

} // namespace fracvar
