#include "fbpm/diagnostics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace fbpm {

double EnergyTrace::min_margin() const
{
    if (rows.size() < 2) {
        return rows.empty() ? 0.0 : rows.front().margin;
    }
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t j = 1; j < rows.size(); ++j) {
        m = std::min(m, rows[j].margin);
    }
    return m;
}

double EnergyTrace::max_mean_drift() const
{
    double d = 0.0;
    for (const auto& r : rows) {
        d = std::max(d, std::abs(r.mean - rows.front().mean));
    }
    return d;
}

EnergyTrace energy_trace(const Trajectory& traj)
{
    const EnergyFunctional energy(traj.grid, traj.model);
    const auto& cfg = traj.config;
    EnergyTrace trace;
    trace.guaranteed = traj.energy_inequality_guaranteed;
    trace.initial_energy = energy(traj.steps.front());

    double cum_l2 = 0.0;
    double cum_h1 = 0.0;
    for (std::size_t j = 0; j < traj.steps.size(); ++j) {
        const ScalarField& u = traj.steps[j];
        if (j > 0) {
            const ScalarField d = u - traj.steps[j - 1];
            cum_l2 += cfg.rate() * l2_norm_squared(traj.grid, d);
            cum_h1 += (cfg.epsilon - cfg.gamma) * cfg.rate() * energy.quadrature().dirichlet_energy(d);
        }
        EnergyTraceRow row;
        row.step = j;
        row.t = traj.time(j);
        row.energy = energy(u);
        row.cum_l2 = cum_l2;
        row.cum_h1 = cum_h1;
        row.mean = mean(traj.grid, u);
        row.margin = trace.initial_energy - (row.energy + cum_l2 + cum_h1);
        trace.rows.push_back(row);
    }
    return trace;
}

CsvTable to_csv(const EnergyTrace& trace)
{
    CsvTable table;
    table.header = {"step", "t", "energy", "cum_l2", "cum_h1", "mean", "margin"};
    for (const auto& r : trace.rows) {
        table.rows.push_back({static_cast<double>(r.step), r.t, r.energy, r.cum_l2, r.cum_h1, r.mean, r.margin});
    }
    return table;
}

double WeakResidual::max_abs() const
{
    double m = 0.0;
    for (double r : residuals) {
        m = std::max(m, r);
    }
    return m;
}

double WeakResidual::max_relative() const
{
    double m = 0.0;
    for (std::size_t i = 0; i < residuals.size(); ++i) {
        if (scales[i] > 0.0) {
            m = std::max(m, residuals[i] / scales[i]);
        }
    }
    return m;
}

namespace {

constexpr std::array<double, 5> kGaussNodes{-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                                            0.9061798459386640};
constexpr std::array<double, 5> kGaussWeights{0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                              0.4786286704993665, 0.2369268850561891};

template <class F>
double integrate(F&& g, double a, double b)
{
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double s = 0.0;
    for (std::size_t i = 0; i < kGaussNodes.size(); ++i) {
        s += kGaussWeights[i] * g(mid + half * kGaussNodes[i]);
    }
    return s * half;
}

}  // namespace

WeakResidual weak_residual(const Trajectory& traj, std::span<const SeparableTest> tests)
{
    WeakResidual out;
    out.flagged = !traj.complete();
    for (const auto& r : traj.results) {
        if (!(r.residual_norm <= traj.config.newton_tol)) {
            out.flagged = true;
        }
    }
    const Grid& grid = traj.grid;
    const EnergyFunctional energy(grid, traj.model);
    const auto& quad = energy.quadrature();
    const auto samples = quad.samples();
    const auto& cfg = traj.config;
    const double vol = grid.cell_volume();

    for (const auto& test : tests) {
        if (test.zeta.size() != grid.node_count()) {
            throw std::invalid_argument("weak_residual: test field does not match grid");
        }
        const auto grad_zeta = quad.evaluate(test.zeta);
        double total = 0.0;
        double scale = 0.0;
        for (std::size_t j = 1; j < traj.steps.size(); ++j) {
            const double t0 = traj.time(j - 1);
            const double t1 = traj.time(j);
            const double eta_int = integrate(test.eta, t0, t1);
            const double eta_abs = integrate([&](double t) { return std::abs(test.eta(t)); }, t0, t1);

            const ScalarField dudt = cfg.rate() * (traj.steps[j] - traj.steps[j - 1]);
            const auto flux = energy.fluxes(traj.steps[j]);
            const auto grad_dudt = quad.evaluate(dudt);

            double space = 0.0;
            double space_abs = 0.0;
            for (std::size_t i = 0; i < dudt.size(); ++i) {
                const double v = vol * dudt[i] * test.zeta[i];
                space += v;
                space_abs += std::abs(v);
            }
            for (std::size_t k = 0; k < samples.size(); ++k) {
                const double a = samples[k].weight * flux[k].dot(grad_zeta[k]);
                const double b = samples[k].weight * cfg.epsilon * grad_dudt[k].dot(grad_zeta[k]);
                space += a + b;
                space_abs += std::abs(a) + std::abs(b);
            }
            total += eta_int * space;
            scale += eta_abs * space_abs;
        }
        out.residuals.push_back(std::abs(total));
        out.scales.push_back(scale);
    }
    return out;
}

double mean_drift_residual(const Trajectory& traj)
{
    const double drift = mean(traj.grid, traj.steps.back()) - mean(traj.grid, traj.steps.front());
    return domain_measure(traj.grid) * std::abs(drift);
}

namespace {

struct LineStats {
    std::size_t sign_changes = 0;
    double max_peak = 0.0;
    double min_peak = std::numeric_limits<double>::infinity();
};

void scan_line(std::span<const double> g, double dead_band, LineStats& stats)
{
    int last = 0;
    for (double v : g) {
        if (std::abs(v) <= dead_band) {
            continue;
        }
        const int s = v > 0.0 ? 1 : -1;
        if (last != 0 && s != last) {
            ++stats.sign_changes;
        }
        last = s;
    }
    const std::size_t n = g.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double a = std::abs(g[i]);
        if (a <= dead_band) {
            continue;
        }
        const bool left = i == 0 || a > std::abs(g[i - 1]);
        const bool right = i + 1 == n || a >= std::abs(g[i + 1]);
        if (left && right) {
            stats.max_peak = std::max(stats.max_peak, a);
            stats.min_peak = std::min(stats.min_peak, a);
        }
    }
}

}  // namespace

StaircaseReport staircase_report(const ScalarField& u, const Grid& grid)
{
    const EdgeField g = gradient(grid, u);
    StaircaseReport report;
    report.max_abs_gradient = std::max(max_abs(g.axis[0]), max_abs(g.axis[1]));
    const double dead_band = 1e-6 * report.max_abs_gradient;
    if (report.max_abs_gradient == 0.0) {
        return report;
    }

    LineStats stats;
    const std::size_t nx = grid.nx();
    const std::size_t ny = grid.ny();
    for (std::size_t j = 0; j < ny; ++j) {
        scan_line(std::span<const double>(g.axis[0]).subspan(j * (nx - 1), nx - 1), dead_band, stats);
    }
    if (grid.dim() == 2) {
        std::vector<double> column(ny - 1);
        for (std::size_t i = 0; i < nx; ++i) {
            for (std::size_t j = 0; j + 1 < ny; ++j) {
                column[j] = g.axis[1][i + nx * j];
            }
            scan_line(column, dead_band, stats);
        }
    }
    report.sign_change_count = stats.sign_changes;
    report.gradient_range_width = stats.max_peak >= stats.min_peak ? stats.max_peak - stats.min_peak : 0.0;
    return report;
}

}  // namespace fbpm
