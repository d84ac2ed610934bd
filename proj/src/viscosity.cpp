#include "fbpm/viscosity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fbpm {

void SweepPlan::validate() const
{
    if (eps_list.empty()) {
        throw std::invalid_argument("sweep: eps list is empty");
    }
    for (std::size_t i = 0; i < eps_list.size(); ++i) {
        if (!(eps_list[i] > 0.0 && eps_list[i] < 1.0)) {
            throw std::invalid_argument("sweep: every epsilon must lie in (0, 1)");
        }
        if (i > 0 && !(eps_list[i] < eps_list[i - 1])) {
            throw std::invalid_argument("sweep: eps list must be strictly decreasing");
        }
    }
    if (!(T > 0.0)) {
        throw std::invalid_argument("sweep: T must be positive");
    }
}

RotheConfig SweepPlan::config_for(double epsilon, double K) const
{
    RotheConfig cfg;
    cfg.T = T;
    cfg.epsilon = epsilon;
    cfg.gamma = 0.5 * epsilon;
    cfg.m = std::max(min_steps(K, T, epsilon, cfg.gamma), m_user);
    cfg.newton_tol = newton_tol;
    cfg.newton_max_iter = newton_max_iter;
    return cfg;
}

std::vector<SweepRun> sweep(const ScalarField& f, const SweepPlan& plan, const FluxModel& model, const Grid& grid)
{
    plan.validate();
    const double K = monotonicity_defect(model);
    std::vector<SweepRun> runs;
    for (double eps : plan.eps_list) {
        SweepRun run;
        run.epsilon = eps;
        run.config = plan.config_for(eps, K);
        try {
            run.trajectory = evolve(f, run.config, model, grid);
        } catch (const EvolveFailure& e) {
            run.error = e.what();
            run.trajectory = e.partial();
        }
        runs.push_back(std::move(run));
    }
    return runs;
}

Eigen::MatrixXd pairwise_distance(std::span<const Trajectory* const> trajs, std::size_t samples)
{
    const auto n = static_cast<Eigen::Index>(trajs.size());
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
    if (trajs.empty()) {
        return d;
    }
    if (samples < 2) {
        throw std::invalid_argument("pairwise_distance: need at least 2 time samples");
    }
    const Grid& grid = trajs.front()->grid;
    const double T = trajs.front()->config.T;
    for (const Trajectory* t : trajs) {
        if (!(t->grid == grid) || t->config.T != T) {
            throw std::invalid_argument("pairwise_distance: trajectories must share grid and T");
        }
    }
    for (std::size_t k = 0; k < samples; ++k) {
        // Exact endpoint at the last sample.
        const double t = k + 1 == samples ? T : T * static_cast<double>(k) / static_cast<double>(samples - 1);
        std::vector<ScalarField> states;
        states.reserve(trajs.size());
        for (const Trajectory* traj : trajs) {
            states.push_back(interpolants(*traj, t).linear);
        }
        for (Eigen::Index a = 0; a < n; ++a) {
            for (Eigen::Index b = a + 1; b < n; ++b) {
                const double dist = l2_norm(grid, states[static_cast<std::size_t>(a)] - states[static_cast<std::size_t>(b)]);
                d(a, b) = std::max(d(a, b), dist);
                d(b, a) = d(a, b);
            }
        }
    }
    return d;
}

std::vector<SpaceTimeWindow> tile_windows(const Grid& grid, double T, std::size_t splits, std::size_t time_splits)
{
    if (splits < 1 || time_splits < 1 || splits > grid.nx() || (grid.dim() == 2 && splits > grid.ny())) {
        throw std::invalid_argument("tile_windows: split counts must be between 1 and the node count per axis");
    }
    const std::size_t ysplits = grid.dim() == 2 ? splits : 1;
    std::vector<SpaceTimeWindow> out;
    for (std::size_t k = 0; k < time_splits; ++k) {
        for (std::size_t b = 0; b < ysplits; ++b) {
            for (std::size_t a = 0; a < splits; ++a) {
                SpaceTimeWindow w;
                w.begin = {a * grid.nx() / splits, b * grid.ny() / ysplits};
                w.end = {(a + 1) * grid.nx() / splits, (b + 1) * grid.ny() / ysplits};
                w.t_begin = T * static_cast<double>(k) / static_cast<double>(time_splits);
                w.t_end = k + 1 == time_splits ? T : T * static_cast<double>(k + 1) / static_cast<double>(time_splits);
                out.push_back(w);
            }
        }
    }
    return out;
}

namespace {

bool node_in_window(const Grid& grid, std::size_t node, const SpaceTimeWindow& w)
{
    const std::size_t i = node % grid.nx();
    const std::size_t j = node / grid.nx();
    return i >= w.begin[0] && i < w.end[0] && j >= w.begin[1] && j < w.end[1];
}

}  // namespace

std::vector<Eigen::Vector2d> window_samples(const Trajectory& traj, const SpaceTimeWindow& window)
{
    const Grid& grid = traj.grid;
    const GradientQuadrature quad(grid);
    const auto samples = quad.samples();

    std::vector<std::size_t> chosen;
    for (std::size_t k = 0; k < samples.size(); ++k) {
        bool inside = true;
        for (int a = 0; a < 2 && inside; ++a) {
            if (samples[k].edge[a] < 0) {
                continue;
            }
            const auto ends = grid.edge_nodes(a, static_cast<std::size_t>(samples[k].edge[a]));
            inside = node_in_window(grid, ends[0], window) && node_in_window(grid, ends[1], window);
        }
        if (inside) {
            chosen.push_back(k);
        }
    }

    std::vector<Eigen::Vector2d> out;
    const double slack = 1e-12 * traj.config.T;
    for (std::size_t j = 1; j < traj.steps.size(); ++j) {
        const double t = traj.time(j);
        if (t < window.t_begin - slack || t > window.t_end + slack) {
            continue;
        }
        const auto xi = quad.evaluate(traj.steps[j]);
        for (std::size_t k : chosen) {
            out.push_back(xi[k]);
        }
    }
    return out;
}

Eigen::Vector2d window_average_gradient(const Trajectory& traj, const SpaceTimeWindow& window)
{
    const auto s = window_samples(traj, window);
    if (s.empty()) {
        throw std::invalid_argument("window_average_gradient: empty window");
    }
    Eigen::Vector2d sum = Eigen::Vector2d::Zero();
    for (const auto& v : s) {
        sum += v;
    }
    return sum / static_cast<double>(s.size());
}

double GradientHistogram::bin_width() const { return 2.0 * half_width / static_cast<double>(bins_per_component); }

double GradientHistogram::bin_center(std::size_t bin) const
{
    return -half_width + (static_cast<double>(bin) + 0.5) * bin_width();
}

Eigen::Vector2d GradientHistogram::center(std::size_t flat_index) const
{
    Eigen::Vector2d c = Eigen::Vector2d::Zero();
    c[0] = bin_center(flat_index % bins_per_component);
    if (components == 2) {
        c[1] = bin_center(flat_index / bins_per_component);
    }
    return c;
}

std::vector<double> GradientHistogram::probabilities() const
{
    std::vector<double> p(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i) {
        p[i] = static_cast<double>(counts[i]) / static_cast<double>(total);
    }
    return p;
}

double GradientHistogram::standard_deviation() const
{
    double var = 0.0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        if (counts[i] != 0) {
            var += static_cast<double>(counts[i]) * (center(i) - first_moment).squaredNorm();
        }
    }
    return std::sqrt(var / static_cast<double>(total));
}

GradientHistogram histogram(std::span<const Eigen::Vector2d> samples, int components, const SpaceTimeWindow& window,
                            std::size_t bins)
{
    if (samples.empty()) {
        throw std::invalid_argument("histogram: empty window");
    }
    if (components != 1 && components != 2) {
        throw std::invalid_argument("histogram: components must be 1 or 2");
    }
    if (bins < 1) {
        throw std::invalid_argument("histogram: need at least one bin");
    }
    GradientHistogram h;
    h.window = window;
    h.components = components;
    h.bins_per_component = bins;
    double max_abs_sample = 0.0;
    for (const auto& s : samples) {
        for (int c = 0; c < components; ++c) {
            max_abs_sample = std::max(max_abs_sample, std::abs(s[c]));
        }
    }
    h.half_width = max_abs_sample > 0.0 ? 1.05 * max_abs_sample : 1.0;
    h.counts.assign(components == 2 ? bins * bins : bins, 0);

    const auto index = [&](double v) {
        const auto b = static_cast<std::ptrdiff_t>(std::floor((v + h.half_width) / h.bin_width()));
        return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(b, 0, static_cast<std::ptrdiff_t>(bins) - 1));
    };
    for (const auto& s : samples) {
        std::size_t flat = index(s[0]);
        if (components == 2) {
            flat += bins * index(s[1]);
        }
        ++h.counts[flat];
    }
    h.total = samples.size();

    for (std::size_t i = 0; i < h.counts.size(); ++i) {
        if (h.counts[i] != 0) {
            h.first_moment += static_cast<double>(h.counts[i]) * h.center(i);
        }
    }
    h.first_moment /= static_cast<double>(h.total);
    return h;
}

GradientHistogram young_measure(std::span<const Trajectory* const> trajs, const SpaceTimeWindow& window,
                                std::size_t bins)
{
    if (trajs.empty()) {
        throw std::invalid_argument("young_measure: no trajectories");
    }
    std::vector<Eigen::Vector2d> pooled;
    for (const Trajectory* t : trajs) {
        const auto s = window_samples(*t, window);
        pooled.insert(pooled.end(), s.begin(), s.end());
    }
    return histogram(pooled, trajs.front()->grid.dim(), window, bins);
}

double barycenter_check(const GradientHistogram& hist, const Eigen::Vector2d& grad_u)
{
    return (hist.first_moment - grad_u).norm();
}

}  // namespace fbpm
