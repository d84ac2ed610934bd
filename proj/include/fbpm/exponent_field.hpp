#pragma once

#include <span>
#include <vector>

#include "fbpm/grid.hpp"

namespace fbpm {

/// Variable exponent p(x) sampled at grid nodes, with 2 <= p_minus <= p <= p_plus.
class ExponentField {
public:
    /// Throws std::invalid_argument on any value below 2 or non-finite.
    explicit ExponentField(std::vector<double> values);

    std::span<const double> values() const { return values_; }
    double operator[](std::size_t node) const { return values_[node]; }
    std::size_t size() const { return values_.size(); }
    double p_minus() const { return p_minus_; }
    double p_plus() const { return p_plus_; }

private:
    std::vector<double> values_;
    double p_minus_ = 2.0;
    double p_plus_ = 2.0;
};

ExponentField build_constant(double p, const Grid& grid);

struct EdgeAdaptiveParams {
    double sigma = 1.0;  // blur width in grid units
    double k = 10.0;
    double p_min = 2.0;
    double p_max = 3.0;
};

/// p = p_min + (p_max - p_min) / (1 + k |grad(G_sigma * reference)|^2),
/// with sigma and the gradient both measured in grid units (node spacing 1).
///
/// Edges of the reference get exponents close to p_min (weaker
/// regularization), flat regions get p_max.
ExponentField build_edge_adaptive(const Grid& grid, const ScalarField& reference, const EdgeAdaptiveParams& params);

/// Separable Gaussian blur, kernel radius ceil(3 sigma), mirrored at the
/// boundary. sigma == 0 returns the input.
ScalarField gaussian_blur(const Grid& grid, const ScalarField& u, double sigma);

/// Squared gradient magnitude at nodes: per axis, the mean of the squared
/// differences on the incident edges.
ScalarField node_gradient_squared(const Grid& grid, const ScalarField& u);

/// max over node pairs of |p(x) - p(y)| * log(e + 1/|x - y|). A lower bound
/// for the continuum log-Hoelder constant, since only nodes are sampled.
double log_holder_constant(const ExponentField& field, const Grid& grid);

}  // namespace fbpm
