#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "fbpm/rothe.hpp"

namespace fbpm {

/// A family of Rothe runs over decreasing epsilon. Each run uses
/// gamma = eps / 2 and m = max(min_steps(K, T, eps, eps / 2), m_user).
struct SweepPlan {
    std::vector<double> eps_list;
    double T = 1.0;
    std::size_t m_user = 1;
    double newton_tol = 1e-10;
    int newton_max_iter = 50;

    void validate() const;
    RotheConfig config_for(double epsilon, double K) const;
};

struct SweepRun {
    double epsilon = 0.0;
    RotheConfig config;
    std::optional<Trajectory> trajectory;
    /// Non-empty when the run failed; the partial trajectory is kept.
    std::string error;

    bool ok() const { return error.empty(); }
};

/// One run per epsilon, in plan order. A failing run does not stop the rest.
std::vector<SweepRun> sweep(const ScalarField& f, const SweepPlan& plan, const FluxModel& model, const Grid& grid);

/// Pseudometric d(a, b) = max over t_k = k T / (samples - 1) of
/// ||u_m^a(t_k) - u_m^b(t_k)||_{L2}, using the piecewise-linear interpolants.
Eigen::MatrixXd pairwise_distance(std::span<const Trajectory* const> trajs, std::size_t samples = 257);

/// Node index ranges [begin, end) per axis and a closed time interval.
struct SpaceTimeWindow {
    std::array<std::size_t, 2> begin{0, 0};
    std::array<std::size_t, 2> end{0, 1};
    double t_begin = 0.0;
    double t_end = 0.0;
};

/// Splits every spatial axis into `splits` contiguous node ranges and [0, T]
/// into `time_splits` equal closed intervals. Windows are ordered by time
/// interval, then axis 1, then axis 0.
std::vector<SpaceTimeWindow> tile_windows(const Grid& grid, double T, std::size_t splits, std::size_t time_splits);

/// Gradient samples of bar u_m inside a window: the gradient of u^j at each
/// step time t_j (j >= 1) in [t_begin, t_end], at every quadrature sample
/// whose nodes lie in the window's node ranges.
std::vector<Eigen::Vector2d> window_samples(const Trajectory& traj, const SpaceTimeWindow& window);

/// Mean of window_samples(traj, window).
Eigen::Vector2d window_average_gradient(const Trajectory& traj, const SpaceTimeWindow& window);

/// Empirical Young measure over a space-time window: a regular histogram
/// over gradient space. Bins are uniform per component on
/// [-1.05 max|s|, 1.05 max|s|]; in 2D the histogram is the tensor grid.
struct GradientHistogram {
    SpaceTimeWindow window;
    int components = 1;
    std::size_t bins_per_component = 64;
    double half_width = 1.0;
    /// Flattened, component 0 fastest.
    std::vector<std::size_t> counts;
    std::size_t total = 0;
    /// Count-weighted mean of bin centres.
    Eigen::Vector2d first_moment = Eigen::Vector2d::Zero();

    double bin_width() const;
    double bin_center(std::size_t bin) const;
    Eigen::Vector2d center(std::size_t flat_index) const;
    /// counts / total; sums to 1.
    std::vector<double> probabilities() const;
    /// Root mean squared distance of bin centres from first_moment.
    double standard_deviation() const;
};

/// Throws std::invalid_argument when there are no samples.
GradientHistogram histogram(std::span<const Eigen::Vector2d> samples, int components, const SpaceTimeWindow& window,
                            std::size_t bins = 64);

/// Pools window samples across the family.
GradientHistogram young_measure(std::span<const Trajectory* const> trajs, const SpaceTimeWindow& window,
                                std::size_t bins = 64);

/// |first_moment - grad_u|.
double barycenter_check(const GradientHistogram& hist, const Eigen::Vector2d& grad_u);

}  // namespace fbpm
