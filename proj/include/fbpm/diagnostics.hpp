#pragma once

#include <functional>
#include <span>
#include <vector>

#include "fbpm/io.hpp"
#include "fbpm/rothe.hpp"

namespace fbpm {

struct EnergyTraceRow {
    std::size_t step = 0;
    double t = 0.0;
    double energy = 0.0;
    /// (m/T) sum_{i<=j} ||u^i - u^{i-1}||^2
    double cum_l2 = 0.0;
    /// (eps - gamma)(m/T) sum_{i<=j} ||grad(u^i - u^{i-1})||^2
    double cum_h1 = 0.0;
    double mean = 0.0;
    /// E(f) - (energy + cum_l2 + cum_h1); nonnegative when the discrete
    /// energy inequality holds.
    double margin = 0.0;
};

struct EnergyTrace {
    std::vector<EnergyTraceRow> rows;  // rows[0] is u^0 = f
    double initial_energy = 0.0;
    bool guaranteed = true;

    /// Smallest margin over steps j >= 1 (row 0 is zero by construction).
    double min_margin() const;
    /// max_j |mean(u^j) - mean(f)|.
    double max_mean_drift() const;
};

EnergyTrace energy_trace(const Trajectory& traj);

/// Columns step,t,energy,cum_l2,cum_h1,mean,margin.
CsvTable to_csv(const EnergyTrace& trace);

/// A separable test function zeta(x) eta(t).
struct SeparableTest {
    ScalarField zeta;
    std::function<double(double)> eta;
};

struct WeakResidual {
    /// Per test: |sum over space-time of the weak form|.
    std::vector<double> residuals;
    /// Per test: the same sum with every term replaced by its absolute value.
    std::vector<double> scales;
    /// Set when the trajectory is incomplete or some step did not meet its
    /// Newton tolerance.
    bool flagged = false;

    double max_abs() const;
    double max_relative() const;
};

/// Evaluates, for each test, the weak form
///   int int (d_t u_m) zeta + q(x, grad bar u_m) . grad zeta + eps grad(d_t u_m) . grad zeta
/// with the piecewise-linear interpolant in the time-derivative terms and the
/// piecewise-constant one in the flux. Time integrals of eta use 5-point
/// Gauss-Legendre on each step interval.
WeakResidual weak_residual(const Trajectory& traj, std::span<const SeparableTest> tests);

/// |Omega| * |mean(u^m) - mean(f)|: the weak residual for zeta = 1, eta = 1
/// computed through conservation instead of the weak form.
double mean_drift_residual(const Trajectory& traj);

struct StaircaseReport {
    std::size_t sign_change_count = 0;
    double max_abs_gradient = 0.0;
    /// max - min over the local maxima of |grad u|.
    double gradient_range_width = 0.0;
};

/// Counts sign changes of the edge gradient along every grid line (rows
/// along axis 0, columns along axis 1 in 2D). Entries with
/// |g| <= 1e-6 max|g| are treated as zero and skipped, and are not
/// candidates for local maxima.
StaircaseReport staircase_report(const ScalarField& u, const Grid& grid);

}  // namespace fbpm
