#include "fbpm/exponent_field.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fbpm {

ExponentField::ExponentField(std::vector<double> values) : values_(std::move(values))
{
    if (values_.empty()) {
        throw std::invalid_argument("exponent field: no values");
    }
    for (double p : values_) {
        if (!std::isfinite(p) || p < 2.0) {
            throw std::invalid_argument("exponent field: values must be finite and >= 2");
        }
    }
    const auto [lo, hi] = std::minmax_element(values_.begin(), values_.end());
    p_minus_ = *lo;
    p_plus_ = *hi;
}

ExponentField build_constant(double p, const Grid& grid)
{
    if (!(p >= 2.0)) {
        throw std::invalid_argument("build_constant: exponent must be >= 2");
    }
    return ExponentField(std::vector<double>(grid.node_count(), p));
}

namespace {

std::size_t mirror(std::ptrdiff_t i, std::size_t n)
{
    // Half-sample symmetric reflection: -1 -> 0, n -> n - 1.
    const auto period = static_cast<std::ptrdiff_t>(2 * n);
    i %= period;
    if (i < 0) {
        i += period;
    }
    if (i >= static_cast<std::ptrdiff_t>(n)) {
        i = period - 1 - i;
    }
    return static_cast<std::size_t>(i);
}

}  // namespace

ScalarField gaussian_blur(const Grid& grid, const ScalarField& u, double sigma)
{
    if (sigma < 0.0) {
        throw std::invalid_argument("gaussian_blur: sigma must be >= 0");
    }
    if (sigma == 0.0) {
        return u;
    }
    const auto radius = static_cast<std::ptrdiff_t>(std::ceil(3.0 * sigma));
    std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
    double total = 0.0;
    for (std::ptrdiff_t r = -radius; r <= radius; ++r) {
        const double w = std::exp(-0.5 * static_cast<double>(r * r) / (sigma * sigma));
        kernel[static_cast<std::size_t>(r + radius)] = w;
        total += w;
    }
    for (double& w : kernel) {
        w /= total;
    }

    ScalarField out = u;
    const std::size_t nx = grid.nx();
    const std::size_t ny = grid.ny();
    for (int axis = 0; axis < grid.dim(); ++axis) {
        ScalarField src = out;
        for (std::size_t j = 0; j < ny; ++j) {
            for (std::size_t i = 0; i < nx; ++i) {
                double acc = 0.0;
                for (std::ptrdiff_t r = -radius; r <= radius; ++r) {
                    const double w = kernel[static_cast<std::size_t>(r + radius)];
                    if (axis == 0) {
                        acc += w * src[grid.node(mirror(static_cast<std::ptrdiff_t>(i) + r, nx), j)];
                    } else {
                        acc += w * src[grid.node(i, mirror(static_cast<std::ptrdiff_t>(j) + r, ny))];
                    }
                }
                out[grid.node(i, j)] = acc;
            }
        }
    }
    return out;
}

ScalarField node_gradient_squared(const Grid& grid, const ScalarField& u)
{
    const EdgeField g = gradient(grid, u);
    ScalarField sum(grid.node_count());
    for (int a = 0; a < grid.dim(); ++a) {
        ScalarField acc(grid.node_count());
        std::vector<int> count(grid.node_count(), 0);
        for (std::size_t e = 0; e < g.axis[a].size(); ++e) {
            const auto [lo, hi] = grid.edge_nodes(a, e);
            const double g2 = g.axis[a][e] * g.axis[a][e];
            acc[lo] += g2;
            acc[hi] += g2;
            ++count[lo];
            ++count[hi];
        }
        for (std::size_t i = 0; i < acc.size(); ++i) {
            sum[i] += acc[i] / count[i];
        }
    }
    return sum;
}

ExponentField build_edge_adaptive(const Grid& grid, const ScalarField& reference, const EdgeAdaptiveParams& params)
{
    if (!(params.p_min >= 2.0)) {
        throw std::invalid_argument("build_edge_adaptive: p_min must be >= 2");
    }
    if (!(params.p_max >= params.p_min)) {
        throw std::invalid_argument("build_edge_adaptive: p_max must be >= p_min");
    }
    if (!(params.sigma >= 0.0)) {
        throw std::invalid_argument("build_edge_adaptive: sigma must be >= 0");
    }
    if (!(params.k > 0.0)) {
        throw std::invalid_argument("build_edge_adaptive: k must be positive");
    }
    if (reference.size() != grid.node_count()) {
        throw std::invalid_argument("build_edge_adaptive: reference does not match grid");
    }
    // The edge detector works in grid units, like sigma: differences between
    // neighbouring nodes, independent of the physical spacing.
    const Grid unit = grid.dim() == 1 ? Grid::line(grid.nx(), 1.0) : Grid::rect(grid.nx(), grid.ny(), 1.0);
    const ScalarField g2 = node_gradient_squared(unit, gaussian_blur(unit, reference, params.sigma));
    std::vector<double> p(grid.node_count());
    for (std::size_t i = 0; i < p.size(); ++i) {
        p[i] = params.p_min + (params.p_max - params.p_min) / (1.0 + params.k * g2[i]);
        // Rounding can push p_min + tiny fraction below p_min only by an ulp.
        p[i] = std::clamp(p[i], params.p_min, params.p_max);
    }
    return ExponentField(std::move(p));
}

double log_holder_constant(const ExponentField& field, const Grid& grid)
{
    if (grid.node_count() < 2) {
        throw std::invalid_argument("log_holder_constant: need at least 2 nodes");
    }
    if (field.size() != grid.node_count()) {
        throw std::invalid_argument("log_holder_constant: field does not match grid");
    }
    double best = 0.0;
    const std::size_t n = grid.node_count();
    for (std::size_t a = 0; a < n; ++a) {
        const auto xa = grid.position(a);
        for (std::size_t b = a + 1; b < n; ++b) {
            const double dp = std::abs(field[a] - field[b]);
            if (dp == 0.0) {
                continue;
            }
            const auto xb = grid.position(b);
            const double dist = std::hypot(xa[0] - xb[0], xa[1] - xb[1]);
            best = std::max(best, dp * std::log(std::numbers::e + 1.0 / dist));
        }
    }
    return best;
}

}  // namespace fbpm
