#include "fbpm/rothe.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <sstream>

namespace fbpm {

void RotheConfig::validate() const
{
    if (!(T > 0.0) || !std::isfinite(T)) {
        throw std::invalid_argument("rothe: T must be positive");
    }
    if (m < 1) {
        throw std::invalid_argument("rothe: m must be >= 1");
    }
    if (!(epsilon > 0.0 && epsilon < 1.0)) {
        throw std::invalid_argument("rothe: epsilon must lie in (0, 1)");
    }
    if (!(gamma > 0.0 && gamma < epsilon)) {
        throw std::invalid_argument("rothe: gamma must lie in (0, epsilon)");
    }
    if (!(newton_tol > 0.0)) {
        throw std::invalid_argument("rothe: newton_tol must be positive");
    }
    if (newton_max_iter < 0) {
        throw std::invalid_argument("rothe: newton_max_iter must be >= 0");
    }
}

namespace {

std::size_t ceil_tolerant(double x)
{
    const double r = std::round(x);
    if (std::abs(x - r) <= 1e-9 * std::max(1.0, std::abs(x))) {
        return static_cast<std::size_t>(std::max(r, 0.0));
    }
    return static_cast<std::size_t>(std::max(std::ceil(x), 0.0));
}

}  // namespace

std::size_t min_steps(double K, double T, double epsilon, double gamma)
{
    if (!(K > 0.0 && T > 0.0 && epsilon > 0.0 && gamma > 0.0)) {
        throw std::invalid_argument("min_steps: all inputs must be positive");
    }
    if (!(gamma < epsilon)) {
        throw std::invalid_argument("min_steps: gamma must be below epsilon");
    }
    return ceil_tolerant(std::max(K * T / (2.0 * gamma), K * T / epsilon));
}

std::size_t convexity_steps(double K, double T, double epsilon) { return ceil_tolerant(K * T / epsilon); }

EnergyFunctional::EnergyFunctional(const Grid& grid, FluxModel model) : model_(std::move(model)), quad_(grid)
{
    if (model_.exponent().size() != grid.node_count()) {
        throw std::invalid_argument("energy: exponent field does not match grid");
    }
    p_ = quad_.sample_exponents(model_.exponent().values());
}

double EnergyFunctional::operator()(const ScalarField& u) const
{
    const auto xi = quad_.evaluate(u);
    const auto samples = quad_.samples();
    double e = 0.0;
    for (std::size_t k = 0; k < xi.size(); ++k) {
        e += samples[k].weight * model_.potential_at(p_[k], xi[k]);
    }
    return e;
}

std::vector<Eigen::Vector2d> EnergyFunctional::fluxes(const ScalarField& u) const
{
    auto xi = quad_.evaluate(u);
    for (std::size_t k = 0; k < xi.size(); ++k) {
        xi[k] = model_.flux_at(p_[k], xi[k]);
    }
    return xi;
}

StepProblem::StepProblem(const EnergyFunctional& energy, const RotheConfig& config, ScalarField u_prev)
    : energy_(energy), config_(config), u_prev_(std::move(u_prev))
{
    if (u_prev_.size() != energy.grid().node_count()) {
        throw std::invalid_argument("step: previous state does not match grid");
    }
}

double StepProblem::value(const ScalarField& u) const
{
    const Grid& grid = energy_.grid();
    const ScalarField diff = u - u_prev_;
    const double rate = config_.rate();
    return energy_(u) + 0.5 * rate * l2_norm_squared(grid, diff) +
           0.5 * config_.epsilon * rate * energy_.quadrature().dirichlet_energy(diff);
}

ScalarField StepProblem::residual(const ScalarField& u) const
{
    const Grid& grid = energy_.grid();
    const GradientQuadrature& quad = energy_.quadrature();
    const double rate = config_.rate();
    const ScalarField diff = u - u_prev_;

    auto flux = energy_.fluxes(u);
    const auto xi_diff = quad.evaluate(diff);
    for (std::size_t k = 0; k < flux.size(); ++k) {
        flux[k] += config_.epsilon * rate * xi_diff[k];
    }
    ScalarField r = rate * diff;
    r -= divergence(grid, quad.scatter(flux));
    return r;
}

Eigen::SparseMatrix<double> StepProblem::hessian(const ScalarField& u) const { return assemble(&u); }

Eigen::SparseMatrix<double> StepProblem::metric() const { return assemble(nullptr); }

Eigen::SparseMatrix<double> StepProblem::assemble(const ScalarField* u) const
{
    const Grid& grid = energy_.grid();
    const GradientQuadrature& quad = energy_.quadrature();
    const FluxModel& model = energy_.model();
    const auto p = energy_.sample_exponents();
    const double rate = config_.rate();
    const double inv_h = 1.0 / grid.spacing();
    const double inv_vol = 1.0 / grid.cell_volume();
    const auto n = static_cast<Eigen::Index>(grid.node_count());

    const auto xi = u != nullptr ? quad.evaluate(*u) : std::vector<Eigen::Vector2d>{};
    const auto samples = quad.samples();

    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(samples.size() * 16 + grid.node_count());
    for (Eigen::Index i = 0; i < n; ++i) {
        triplets.emplace_back(i, i, rate);
    }
    for (std::size_t k = 0; k < samples.size(); ++k) {
        Eigen::Matrix2d block = u != nullptr ? model.jacobian_at(p[k], xi[k]) : Eigen::Matrix2d::Zero();
        block.diagonal().array() += config_.epsilon * rate;
        block *= samples[k].weight * inv_vol;

        // Each gradient component is (u[hi] - u[lo]) / h on its edge.
        std::array<std::array<std::size_t, 2>, 2> ends{};
        std::array<bool, 2> present{};
        for (int a = 0; a < 2; ++a) {
            present[a] = samples[k].edge[a] >= 0;
            if (present[a]) {
                ends[a] = grid.edge_nodes(a, static_cast<std::size_t>(samples[k].edge[a]));
            }
        }
        for (int a = 0; a < 2; ++a) {
            if (!present[a]) {
                continue;
            }
            for (int b = 0; b < 2; ++b) {
                if (!present[b]) {
                    continue;
                }
                const double c = block(a, b) * inv_h * inv_h;
                if (c == 0.0) {
                    continue;
                }
                const auto [alo, ahi] = ends[a];
                const auto [blo, bhi] = ends[b];
                const auto I = [](std::size_t v) { return static_cast<Eigen::Index>(v); };
                triplets.emplace_back(I(ahi), I(bhi), c);
                triplets.emplace_back(I(ahi), I(blo), -c);
                triplets.emplace_back(I(alo), I(bhi), -c);
                triplets.emplace_back(I(alo), I(blo), c);
            }
        }
    }
    Eigen::SparseMatrix<double> h(n, n);
    h.setFromTriplets(triplets.begin(), triplets.end());
    return h;
}

double step_functional(const ScalarField& u, const ScalarField& u_prev, const RotheConfig& config,
                       const FluxModel& model, const Grid& grid)
{
    const EnergyFunctional energy(grid, model);
    return StepProblem(energy, config, u_prev).value(u);
}

ScalarField step_gradient(const ScalarField& u, const ScalarField& u_prev, const RotheConfig& config,
                          const FluxModel& model, const Grid& grid)
{
    const EnergyFunctional energy(grid, model);
    return StepProblem(energy, config, u_prev).residual(u);
}

namespace {

enum class CgStatus { converged, indefinite, max_iterations };

// Jacobi-preconditioned conjugate gradients. Reports indefiniteness as soon
// as a search direction has non-positive curvature.
CgStatus conjugate_gradient(const Eigen::SparseMatrix<double>& a, const Eigen::VectorXd& b, Eigen::VectorXd& x,
                            double rel_tol, Eigen::Index max_iter)
{
    const Eigen::VectorXd inv_diag = a.diagonal().cwiseInverse();
    x.setZero(b.size());
    Eigen::VectorXd r = b;
    Eigen::VectorXd z = inv_diag.cwiseProduct(r);
    Eigen::VectorXd p = z;
    double rz = r.dot(z);
    const double target = rel_tol * b.norm();
    if (b.norm() == 0.0) {
        return CgStatus::converged;
    }
    for (Eigen::Index it = 0; it < max_iter; ++it) {
        const Eigen::VectorXd ap = a * p;
        const double curvature = p.dot(ap);
        if (!(curvature > 0.0)) {
            return CgStatus::indefinite;
        }
        const double alpha = rz / curvature;
        x += alpha * p;
        r -= alpha * ap;
        if (r.norm() <= target) {
            return CgStatus::converged;
        }
        z = inv_diag.cwiseProduct(r);
        const double rz_next = r.dot(z);
        p = z + (rz_next / rz) * p;
        rz = rz_next;
    }
    return CgStatus::max_iterations;
}

double roundoff_floor(const Eigen::SparseMatrix<double>& h, const ScalarField& u)
{
    double row_max = 0.0;
    for (Eigen::Index c = 0; c < h.outerSize(); ++c) {
        double row = 0.0;
        for (Eigen::SparseMatrix<double>::InnerIterator it(h, c); it; ++it) {
            row += std::abs(it.value());
        }
        row_max = std::max(row_max, row);
    }
    return 64.0 * std::numeric_limits<double>::epsilon() * row_max * std::max(1.0, max_abs(u.values()));
}

constexpr int kMaxBacktracks = 30;
constexpr double kArmijo = 1e-4;

double inf_norm(const ScalarField& r) { return max_abs(r.values()); }
double sq_norm(const ScalarField& r) { return r.eigen().squaredNorm(); }

}  // namespace

StepResult solve_step(const StepProblem& problem, const RotheConfig& config)
{
    StepResult result;
    ScalarField u = problem.previous();
    ScalarField r = problem.residual(u);
    double merit = sq_norm(r);
    const auto n = static_cast<Eigen::Index>(u.size());

    // The residual cannot be resolved below ~ ||H|| ulp(u). When Newton
    // stalls within that floor the iterate is accepted as converged.
    double floor = 0.0;
    double previous = std::numeric_limits<double>::infinity();
    Eigen::SparseMatrix<double> metric;
    const auto stalled = [&] { return inf_norm(r) <= floor && inf_norm(r) > 0.5 * previous; };

    int it = 0;
    for (; inf_norm(r) > config.newton_tol && !stalled(); ++it) {
        if (it >= config.newton_max_iter) {
            result.u = u;
            result.iterations = it;
            result.residual_norm = inf_norm(r);
            result.energy = problem.energy()(u);
            std::ostringstream msg;
            msg << "Newton iteration cap hit with residual " << result.residual_norm;
            throw NonConvergence(msg.str(), std::move(result), 0);
        }

        const Eigen::SparseMatrix<double> hess = problem.hessian(u);
        floor = roundoff_floor(hess, u);
        previous = inf_norm(r);
        Eigen::VectorXd dir;
        const double forcing = std::clamp(inf_norm(r), 1e-14, 1e-6);
        const CgStatus status = conjugate_gradient(hess, -r.eigen(), dir, forcing, 10 * n + 100);

        bool accepted = false;
        if (status != CgStatus::indefinite) {
            double step = 1.0;
            for (int bt = 0; bt <= kMaxBacktracks; ++bt, step *= 0.5) {
                ScalarField trial = u;
                trial.eigen() += step * dir;
                ScalarField r_trial = problem.residual(trial);
                const double m_trial = sq_norm(r_trial);
                if (m_trial <= (1.0 - 2.0 * kArmijo * step) * merit) {
                    u = std::move(trial);
                    r = std::move(r_trial);
                    merit = m_trial;
                    accepted = true;
                    break;
                }
            }
        }
        if (!accepted && inf_norm(r) <= floor) {
            // No representable improvement left.
            ++it;
            break;
        }
        if (!accepted) {
            // Steepest descent on J in the metric of its quadratic penalty,
            // d = -M^{-1} R. M is SPD, so d is a descent direction even
            // where the Hessian is indefinite.
            ++result.descent_steps;
            if (metric.size() == 0) {
                metric = problem.metric();
            }
            Eigen::VectorXd d;
            conjugate_gradient(metric, -r.eigen(), d, 1e-10, 10 * n + 100);
            const double j0 = problem.value(u);
            const double slope = r.eigen().dot(d) * problem.energy().grid().cell_volume();
            double step = 1.0;
            for (int bt = 0; bt <= 2 * kMaxBacktracks && slope < 0.0; ++bt, step *= 0.5) {
                ScalarField trial = u;
                trial.eigen() += step * d;
                if (problem.value(trial) <= j0 + kArmijo * step * slope) {
                    u = std::move(trial);
                    r = problem.residual(u);
                    merit = sq_norm(r);
                    accepted = true;
                    break;
                }
            }
        }
        if (!accepted) {
            result.u = u;
            result.iterations = it + 1;
            result.residual_norm = inf_norm(r);
            result.energy = problem.energy()(u);
            std::ostringstream msg;
            msg << "line search failed with residual " << result.residual_norm;
            throw NonConvergence(msg.str(), std::move(result), 0);
        }
    }
    result.iterations = it;
    result.residual_norm = inf_norm(r);
    result.roundoff_limited = result.residual_norm > config.newton_tol;
    result.energy = problem.energy()(u);
    result.u = std::move(u);
    return result;
}

StepResult solve_step(const ScalarField& u_prev, const RotheConfig& config, const FluxModel& model, const Grid& grid)
{
    config.validate();
    const EnergyFunctional energy(grid, model);
    return solve_step(StepProblem(energy, config, u_prev), config);
}

Trajectory evolve(const ScalarField& f, const RotheConfig& config, const FluxModel& model, const Grid& grid)
{
    if (f.size() != grid.node_count()) {
        throw std::invalid_argument("evolve: initial data does not match grid");
    }
    for (double v : f) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("evolve: initial data must be finite");
        }
    }
    Trajectory traj{grid, model, config, {f}, {}, true, true};
    if (config.m == 0) {
        return traj;
    }
    config.validate();

    const double K = monotonicity_defect(model);
    traj.energy_inequality_guaranteed = config.m >= min_steps(K, config.T, config.epsilon, config.gamma);
    traj.convex_steps = config.m >= convexity_steps(K, config.T, config.epsilon);
    if (!traj.energy_inequality_guaranteed) {
        std::clog << "warning: m = " << config.m << " is below m0 = "
                  << min_steps(K, config.T, config.epsilon, config.gamma)
                  << "; the discrete energy inequality is not guaranteed\n";
    }

    const EnergyFunctional energy(grid, model);
    traj.steps.reserve(config.m + 1);
    traj.results.reserve(config.m);
    for (std::size_t j = 1; j <= config.m; ++j) {
        try {
            StepResult step = solve_step(StepProblem(energy, config, traj.steps.back()), config);
            traj.steps.push_back(step.u);
            traj.results.push_back(std::move(step));
        } catch (const NonConvergence& e) {
            throw EvolveFailure(NonConvergence(e.what(), e.last(), j), std::move(traj));
        }
    }
    return traj;
}

Interpolants interpolants(const Trajectory& traj, double t)
{
    const double T = traj.config.T;
    if (!(t >= 0.0 && t <= T)) {
        throw std::out_of_range("interpolants: t outside [0, T]");
    }
    if (!traj.complete() || traj.config.m == 0) {
        throw std::invalid_argument("interpolants: trajectory is incomplete");
    }
    const std::size_t m = traj.config.m;
    double scaled = traj.config.rate() * t;
    if (std::abs(scaled - std::round(scaled)) <= 1e-12 * static_cast<double>(m)) {
        scaled = std::round(scaled);
    }
    auto j = static_cast<std::size_t>(std::floor(scaled)) + 1;
    j = std::min(j, m);
    const double lambda = scaled - static_cast<double>(j - 1);

    const ScalarField& lo = traj.steps[j - 1];
    const ScalarField& hi = traj.steps[j];
    ScalarField linear = lo;
    for (std::size_t i = 0; i < linear.size(); ++i) {
        linear[i] += lambda * (hi[i] - lo[i]);
    }
    return {std::move(linear), hi};
}

}  // namespace fbpm
