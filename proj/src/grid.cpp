#include "fbpm/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fbpm {

namespace {

void require_nodes(const Grid& grid, const ScalarField& u, const char* what)
{
    if (u.size() != grid.node_count()) {
        throw std::invalid_argument(std::string(what) + ": field size does not match grid");
    }
}

void require_edges(const Grid& grid, const EdgeField& f, const char* what)
{
    for (int a = 0; a < 2; ++a) {
        if (f.axis[a].size() != grid.edge_count(a)) {
            throw std::invalid_argument(std::string(what) + ": edge field does not match grid");
        }
    }
}

}  // namespace

Grid::Grid(int dim, std::size_t nx, std::size_t ny, double h) : dim_(dim), nx_(nx), ny_(ny), h_(h)
{
    if (nx < 2 || (dim == 2 && ny < 2)) {
        throw std::invalid_argument("grid: every axis needs at least 2 nodes");
    }
    if (!(h > 0.0) || !std::isfinite(h)) {
        throw std::invalid_argument("grid: spacing must be positive");
    }
}

Grid Grid::line(std::size_t n, double h) { return Grid(1, n, 1, h); }

Grid Grid::rect(std::size_t nx, std::size_t ny, double h) { return Grid(2, nx, ny, h); }

Grid Grid::unit_line(std::size_t n)
{
    if (n < 2) {
        throw std::invalid_argument("grid: every axis needs at least 2 nodes");
    }
    return Grid(1, n, 1, 1.0 / static_cast<double>(n - 1));
}

double Grid::cell_volume() const { return dim_ == 1 ? h_ : h_ * h_; }

std::size_t Grid::edge_count(int axis) const
{
    if (axis == 0) {
        return (nx_ - 1) * ny_;
    }
    return dim_ == 2 ? nx_ * (ny_ - 1) : 0;
}

std::array<double, 2> Grid::position(std::size_t node) const
{
    return {h_ * static_cast<double>(node % nx_), h_ * static_cast<double>(node / nx_)};
}

std::array<std::size_t, 2> Grid::edge_nodes(int axis, std::size_t edge) const
{
    if (axis == 0) {
        const std::size_t i = edge % (nx_ - 1);
        const std::size_t j = edge / (nx_ - 1);
        return {node(i, j), node(i + 1, j)};
    }
    return {edge, edge + nx_};
}

ScalarField& ScalarField::operator+=(const ScalarField& other)
{
    for (std::size_t i = 0; i < values_.size(); ++i) {
        values_[i] += other.values_[i];
    }
    return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& other)
{
    for (std::size_t i = 0; i < values_.size(); ++i) {
        values_[i] -= other.values_[i];
    }
    return *this;
}

ScalarField& ScalarField::operator*=(double s)
{
    for (double& v : values_) {
        v *= s;
    }
    return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(double s, ScalarField a) { return a *= s; }

EdgeField EdgeField::zeros(const Grid& grid)
{
    EdgeField f;
    f.axis[0].assign(grid.edge_count(0), 0.0);
    f.axis[1].assign(grid.edge_count(1), 0.0);
    return f;
}

EdgeField gradient(const Grid& grid, const ScalarField& u)
{
    require_nodes(grid, u, "gradient");
    EdgeField g = EdgeField::zeros(grid);
    const double inv_h = 1.0 / grid.spacing();
    for (int a = 0; a < grid.dim(); ++a) {
        auto& out = g.axis[a];
        for (std::size_t e = 0; e < out.size(); ++e) {
            const auto [lo, hi] = grid.edge_nodes(a, e);
            out[e] = (u[hi] - u[lo]) * inv_h;
        }
    }
    return g;
}

ScalarField divergence(const Grid& grid, const EdgeField& flux)
{
    require_edges(grid, flux, "divergence");
    ScalarField d(grid.node_count());
    const double inv_h = 1.0 / grid.spacing();
    for (int a = 0; a < grid.dim(); ++a) {
        const auto& f = flux.axis[a];
        for (std::size_t e = 0; e < f.size(); ++e) {
            const auto [lo, hi] = grid.edge_nodes(a, e);
            d[lo] += f[e] * inv_h;
            d[hi] -= f[e] * inv_h;
        }
    }
    return d;
}

ScalarField laplacian(const Grid& grid, const ScalarField& u) { return divergence(grid, gradient(grid, u)); }

double inner(const Grid& grid, const ScalarField& u, const ScalarField& v)
{
    require_nodes(grid, u, "inner");
    require_nodes(grid, v, "inner");
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        s += u[i] * v[i];
    }
    return s * grid.cell_volume();
}

double inner_edges(const Grid& grid, const EdgeField& f, const EdgeField& g)
{
    require_edges(grid, f, "inner_edges");
    require_edges(grid, g, "inner_edges");
    double s = 0.0;
    for (int a = 0; a < 2; ++a) {
        for (std::size_t e = 0; e < f.axis[a].size(); ++e) {
            s += f.axis[a][e] * g.axis[a][e];
        }
    }
    return s * grid.cell_volume();
}

double mean(const Grid& grid, const ScalarField& u)
{
    require_nodes(grid, u, "mean");
    double s = 0.0;
    for (double v : u) {
        s += v;
    }
    return s / static_cast<double>(u.size());
}

double l2_norm_squared(const Grid& grid, const ScalarField& u) { return inner(grid, u, u); }

double l2_norm(const Grid& grid, const ScalarField& u) { return std::sqrt(l2_norm_squared(grid, u)); }

double max_abs(std::span<const double> values)
{
    double m = 0.0;
    for (double v : values) {
        m = std::max(m, std::abs(v));
    }
    return m;
}

double semimodular(const Grid& grid, const ScalarField& u, std::span<const double> exponent)
{
    require_nodes(grid, u, "semimodular");
    if (exponent.size() != u.size()) {
        throw std::invalid_argument("semimodular: exponent size does not match grid");
    }
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        s += std::pow(std::abs(u[i]), exponent[i]);
    }
    return s * grid.cell_volume();
}

double domain_measure(const Grid& grid) { return static_cast<double>(grid.node_count()) * grid.cell_volume(); }

GradientQuadrature::GradientQuadrature(const Grid& grid) : grid_(grid)
{
    if (grid.dim() == 1) {
        samples_.reserve(grid.edge_count(0));
        for (std::size_t e = 0; e < grid.edge_count(0); ++e) {
            GradientSample s;
            s.edge = {static_cast<std::ptrdiff_t>(e), -1};
            s.weight = grid.spacing();
            s.exponent_nodes = {e, e + 1};
            samples_.push_back(s);
        }
        return;
    }
    const std::size_t nx = grid.nx();
    const std::size_t ny = grid.ny();
    const double w = grid.cell_volume() / 4.0;
    samples_.reserve(4 * (nx - 1) * (ny - 1));
    for (std::size_t j = 0; j + 1 < ny; ++j) {
        for (std::size_t i = 0; i + 1 < nx; ++i) {
            for (std::size_t cj = 0; cj < 2; ++cj) {
                for (std::size_t ci = 0; ci < 2; ++ci) {
                    GradientSample s;
                    // Corner (i + ci, j + cj): axis-0 edge on row j + cj,
                    // axis-1 edge on column i + ci.
                    s.edge = {static_cast<std::ptrdiff_t>(i + (nx - 1) * (j + cj)),
                              static_cast<std::ptrdiff_t>((i + ci) + nx * j)};
                    s.weight = w;
                    const std::size_t corner = grid.node(i + ci, j + cj);
                    s.exponent_nodes = {corner, corner};
                    samples_.push_back(s);
                }
            }
        }
    }
}

std::vector<Eigen::Vector2d> GradientQuadrature::evaluate(const EdgeField& grad) const
{
    std::vector<Eigen::Vector2d> out(samples_.size(), Eigen::Vector2d::Zero());
    for (std::size_t k = 0; k < samples_.size(); ++k) {
        for (int a = 0; a < 2; ++a) {
            if (samples_[k].edge[a] >= 0) {
                out[k][a] = grad.axis[a][static_cast<std::size_t>(samples_[k].edge[a])];
            }
        }
    }
    return out;
}

std::vector<Eigen::Vector2d> GradientQuadrature::evaluate(const ScalarField& u) const
{
    return evaluate(gradient(grid_, u));
}

EdgeField GradientQuadrature::scatter(std::span<const Eigen::Vector2d> flux) const
{
    EdgeField f = EdgeField::zeros(grid_);
    const double inv_vol = 1.0 / grid_.cell_volume();
    for (std::size_t k = 0; k < samples_.size(); ++k) {
        for (int a = 0; a < 2; ++a) {
            if (samples_[k].edge[a] >= 0) {
                f.axis[a][static_cast<std::size_t>(samples_[k].edge[a])] += samples_[k].weight * inv_vol * flux[k][a];
            }
        }
    }
    return f;
}

double GradientQuadrature::dirichlet_energy(const ScalarField& u) const
{
    const auto xi = evaluate(u);
    double s = 0.0;
    for (std::size_t k = 0; k < xi.size(); ++k) {
        s += samples_[k].weight * xi[k].squaredNorm();
    }
    return s;
}

std::vector<double> GradientQuadrature::sample_exponents(std::span<const double> node_exponent) const
{
    std::vector<double> p(samples_.size());
    for (std::size_t k = 0; k < samples_.size(); ++k) {
        p[k] = 0.5 * (node_exponent[samples_[k].exponent_nodes[0]] + node_exponent[samples_[k].exponent_nodes[1]]);
    }
    return p;
}

}  // namespace fbpm
