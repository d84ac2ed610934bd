#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace fbpm {

/// Uniform node-centred mesh on an interval (dim 1) or rectangle (dim 2).
///
/// Nodes are stored row-major: node (i, j) has linear index i + nx * j.
/// Axis-0 edges join (i, j)-(i+1, j) and are indexed i + (nx - 1) * j;
/// axis-1 edges join (i, j)-(i, j+1) and are indexed i + nx * j.
/// Only interior edges exist, so a zero boundary flux is implicit.
class Grid {
public:
    static Grid line(std::size_t n, double h);
    static Grid rect(std::size_t nx, std::size_t ny, double h);
    /// n nodes spanning [0, 1].
    static Grid unit_line(std::size_t n);

    int dim() const { return dim_; }
    std::size_t nx() const { return nx_; }
    std::size_t ny() const { return ny_; }
    double spacing() const { return h_; }
    /// Quadrature weight per node / per edge: h^dim.
    double cell_volume() const;

    std::size_t node_count() const { return nx_ * ny_; }
    std::size_t edge_count(int axis) const;
    std::size_t node(std::size_t i, std::size_t j = 0) const { return i + nx_ * j; }
    /// Node coordinates, origin at node (0, 0).
    std::array<double, 2> position(std::size_t node) const;

    /// Endpoints of an edge, lower node first.
    std::array<std::size_t, 2> edge_nodes(int axis, std::size_t edge) const;

    bool operator==(const Grid&) const = default;

private:
    Grid(int dim, std::size_t nx, std::size_t ny, double h);

    int dim_ = 1;
    std::size_t nx_ = 2;
    std::size_t ny_ = 1;
    double h_ = 1.0;
};

/// One scalar per grid node.
class ScalarField {
public:
    ScalarField() = default;
    explicit ScalarField(std::size_t n, double value = 0.0) : values_(n, value) {}
    explicit ScalarField(std::vector<double> values) : values_(std::move(values)) {}
    ScalarField(std::initializer_list<double> values) : values_(values) {}

    std::size_t size() const { return values_.size(); }
    double& operator[](std::size_t i) { return values_[i]; }
    double operator[](std::size_t i) const { return values_[i]; }

    std::span<double> values() { return values_; }
    std::span<const double> values() const { return values_; }
    const std::vector<double>& vector() const { return values_; }

    auto begin() { return values_.begin(); }
    auto end() { return values_.end(); }
    auto begin() const { return values_.begin(); }
    auto end() const { return values_.end(); }

    Eigen::Map<Eigen::VectorXd> eigen() { return {values_.data(), static_cast<Eigen::Index>(values_.size())}; }
    Eigen::Map<const Eigen::VectorXd> eigen() const
    {
        return {values_.data(), static_cast<Eigen::Index>(values_.size())};
    }

    ScalarField& operator+=(const ScalarField& other);
    ScalarField& operator-=(const ScalarField& other);
    ScalarField& operator*=(double s);

    bool operator==(const ScalarField&) const = default;

private:
    std::vector<double> values_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double s, ScalarField a);

/// One scalar per interior edge, per axis. Values sit midway between nodes.
struct EdgeField {
    std::array<std::vector<double>, 2> axis;

    static EdgeField zeros(const Grid& grid);
    std::size_t size() const { return axis[0].size() + axis[1].size(); }
};

/// Forward differences on interior edges.
EdgeField gradient(const Grid& grid, const ScalarField& u);

/// Negative adjoint of gradient: node value is the signed sum of incident
/// edge values over h, with absent boundary edges contributing nothing.
ScalarField divergence(const Grid& grid, const EdgeField& flux);

/// divergence(gradient(u)).
ScalarField laplacian(const Grid& grid, const ScalarField& u);

double inner(const Grid& grid, const ScalarField& u, const ScalarField& v);
double inner_edges(const Grid& grid, const EdgeField& f, const EdgeField& g);
double mean(const Grid& grid, const ScalarField& u);
double l2_norm_squared(const Grid& grid, const ScalarField& u);
double l2_norm(const Grid& grid, const ScalarField& u);
double max_abs(std::span<const double> values);

/// Discrete variable-exponent semimodular h^dim * sum |u_i|^{p_i}.
double semimodular(const Grid& grid, const ScalarField& u, std::span<const double> exponent);

/// Measure of the discrete domain, node_count * h^dim.
double domain_measure(const Grid& grid);

/// Gradient samples used for every integral of a function of the gradient.
///
/// In 1D there is one sample per edge with weight h. In 2D each cell
/// contributes four samples, one per corner node, pairing the axis-0 edge
/// and the axis-1 edge that meet at that corner, each with weight h^2 / 4.
/// The quadratic form sum_k w_k |xi_k|^2 is then the edge L2 norm with half
/// weight on boundary edges, and has no checkerboard kernel.
struct GradientSample {
    /// Edge used for each component; -1 when the component is absent (1D).
    std::array<std::ptrdiff_t, 2> edge{-1, -1};
    double weight = 0.0;
    /// The sample exponent is the mean of the exponents at these two nodes.
    std::array<std::size_t, 2> exponent_nodes{0, 0};
};

class GradientQuadrature {
public:
    explicit GradientQuadrature(const Grid& grid);

    const Grid& grid() const { return grid_; }
    std::span<const GradientSample> samples() const { return samples_; }
    std::size_t size() const { return samples_.size(); }

    /// Gradient vectors at every sample (second component 0 in 1D).
    std::vector<Eigen::Vector2d> evaluate(const EdgeField& grad) const;
    std::vector<Eigen::Vector2d> evaluate(const ScalarField& u) const;

    /// Edge field F with <gradient(v), F>_edges = sum_k w_k flux_k . xi_k(v)
    /// for every v. The node gradient of sum_k w_k phi(xi_k) is then
    /// -h^dim * divergence(F).
    EdgeField scatter(std::span<const Eigen::Vector2d> flux) const;

    /// sum_k w_k |xi_k|^2 for the gradient of u.
    double dirichlet_energy(const ScalarField& u) const;

    /// Per-sample exponent, averaged from node exponents.
    std::vector<double> sample_exponents(std::span<const double> node_exponent) const;

private:
    Grid grid_;
    std::vector<GradientSample> samples_;
};

}  // namespace fbpm
