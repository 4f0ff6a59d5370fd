#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace fracvar {

/// Uniform partition t_j = a + j h of [a, b] into n subintervals.
class Grid {
public:
    Grid(double a, double b, std::size_t n);

    double a() const noexcept { return a_; }
    double b() const noexcept { return b_; }
    std::size_t n() const noexcept { return n_; }
    double h() const noexcept { return h_; }
    std::size_t size() const noexcept { return n_ + 1; }

    /// Node t_j; the last node is b itself, not an accumulated sum.
    double node(std::size_t j) const noexcept
    {
        return j == n_ ? b_ : a_ + static_cast<double>(j) * h_;
    }

    std::vector<double> nodes() const;

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    double a_;
    double b_;
    std::size_t n_;
    double h_;
};

/**
 * Order of a fractional derivative. The integer band i is the smallest
 * integer with alpha <= i, so alpha lies in (i-1, i].
 */
class FracOrder {
public:
    explicit FracOrder(double alpha);

    double value() const noexcept { return alpha_; }
    int band() const noexcept { return band_; }
    /// Part of the order above the integer band floor, in (0, 1].
    double fractional_part() const noexcept { return alpha_ - (band_ - 1); }

private:
    double alpha_;
    int band_;
};

/// Values sampled at every node of a grid.
struct SampledSignal {
    SampledSignal(Grid g, std::vector<double> v);

    Grid grid;
    std::vector<double> values;
    /// Node holding a convention value rather than a computed one
    /// (e.g. a singular endpoint), if any.
    std::optional<std::size_t> flagged;

    double operator[](std::size_t j) const { return values[j]; }
    std::size_t size() const noexcept { return values.size(); }
};

/// Samples f(t_j) on every node.
template <typename F>
SampledSignal sample(const Grid& grid, F&& f)
{
    std::vector<double> v(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j)
        v[j] = f(grid.node(j));
    return SampledSignal(grid, std::move(v));
}

} // namespace fracvar
