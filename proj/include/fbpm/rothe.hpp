#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/SparseCore>

#include "fbpm/flux.hpp"
#include "fbpm/grid.hpp"

namespace fbpm {

struct RotheConfig {
    double T = 1.0;
    std::size_t m = 1;
    double epsilon = 0.1;
    double gamma = 0.05;
    double newton_tol = 1e-10;
    int newton_max_iter = 50;

    /// Throws std::invalid_argument unless T > 0, m >= 1, 0 < gamma < epsilon < 1
    /// and newton_tol > 0.
    void validate() const;
    double rate() const { return static_cast<double>(m) / T; }
    double tau() const { return T / static_cast<double>(m); }
};

/// ceil(max(K T / (2 gamma), K T / epsilon)). Quotients within 1e-9 relative
/// of an integer are treated as that integer, so rounding noise in e.g.
/// 0.25 / 0.01 does not add a step.
std::size_t min_steps(double K, double T, double epsilon, double gamma);

/// Smallest m for which every step functional is convex: ceil(K T / epsilon).
std::size_t convexity_steps(double K, double T, double epsilon);

/// Discrete energy sum_k w_k phi(x_k, xi_k) over the gradient quadrature.
class EnergyFunctional {
public:
    EnergyFunctional(const Grid& grid, FluxModel model);

    const Grid& grid() const { return quad_.grid(); }
    const FluxModel& model() const { return model_; }
    const GradientQuadrature& quadrature() const { return quad_; }
    std::span<const double> sample_exponents() const { return p_; }

    double operator()(const ScalarField& u) const;
    /// Per-sample flux q(x_k, xi_k).
    std::vector<Eigen::Vector2d> fluxes(const ScalarField& u) const;

private:
    FluxModel model_;
    GradientQuadrature quad_;
    std::vector<double> p_;
};

/// The functional minimised at one time step,
///   J(u) = E(u) + (m/2T) ||u - u_prev||^2 + eps (m/2T) sum_k w_k |xi_k(u - u_prev)|^2,
/// together with its node-weight-scaled gradient (the Euler-Lagrange
/// residual) and Hessian.
class StepProblem {
public:
    StepProblem(const EnergyFunctional& energy, const RotheConfig& config, ScalarField u_prev);

    double value(const ScalarField& u) const;
    /// R(u) = (m/T)(u - u_prev) - div F, with F the scattered flux
    /// q(xi(u)) + eps (m/T) xi(u - u_prev). Equals grad J / h^dim.
    ScalarField residual(const ScalarField& u) const;
    /// Jacobian of residual().
    Eigen::SparseMatrix<double> hessian(const ScalarField& u) const;
    /// Jacobian of the two penalty terms alone, (m/T)(I - eps div grad):
    /// symmetric positive definite for any u.
    Eigen::SparseMatrix<double> metric() const;

    const ScalarField& previous() const { return u_prev_; }
    const EnergyFunctional& energy() const { return energy_; }

private:
    Eigen::SparseMatrix<double> assemble(const ScalarField* u) const;

    const EnergyFunctional& energy_;
    RotheConfig config_;
    ScalarField u_prev_;
};

double step_functional(const ScalarField& u, const ScalarField& u_prev, const RotheConfig& config,
                       const FluxModel& model, const Grid& grid);
ScalarField step_gradient(const ScalarField& u, const ScalarField& u_prev, const RotheConfig& config,
                          const FluxModel& model, const Grid& grid);

struct StepResult {
    ScalarField u;
    int iterations = 0;
    double residual_norm = 0.0;
    double energy = 0.0;
    /// Steepest-descent fallbacks taken.
    int descent_steps = 0;
    /// Stopped above newton_tol because Newton stalled below the rounding
    /// floor 64 eps ||H||_inf max(1, ||u||_inf).
    bool roundoff_limited = false;
};

class NonConvergence : public std::runtime_error {
public:
    NonConvergence(const std::string& what, StepResult last, std::size_t step)
        : std::runtime_error(what), last_(std::move(last)), step_(step)
    {
    }
    const StepResult& last() const { return last_; }
    double residual() const { return last_.residual_norm; }
    /// One-based index of the failing step.
    std::size_t step() const { return step_; }

private:
    StepResult last_;
    std::size_t step_;
};

/// Damped Newton on the residual with conjugate-gradient linear solves,
/// Armijo backtracking on ||R||^2, and a fallback of steepest descent on J
/// in the metric() inner product when the Hessian is indefinite or the
/// line search fails.
/// Starts from u_prev. Stops once ||R||_inf <= newton_tol, or when a step
/// fails to halve a residual that is already below the rounding floor of the
/// current Hessian.
/// Throws NonConvergence on hitting the iteration cap.
StepResult solve_step(const StepProblem& problem, const RotheConfig& config);
StepResult solve_step(const ScalarField& u_prev, const RotheConfig& config, const FluxModel& model, const Grid& grid);

struct Trajectory {
    Grid grid;
    FluxModel model;
    RotheConfig config;
    /// u^0 = f, u^1, ..., u^m.
    std::vector<ScalarField> steps;
    /// results[j - 1] belongs to steps[j].
    std::vector<StepResult> results;
    /// m >= min_steps(K, T, eps, gamma): the discrete energy inequality holds.
    bool energy_inequality_guaranteed = true;
    /// m >= K T / eps: every step functional is convex.
    bool convex_steps = true;

    double time(std::size_t j) const { return static_cast<double>(j) * config.tau(); }
    bool complete() const { return steps.size() == config.m + 1; }
};

class EvolveFailure : public std::runtime_error {
public:
    EvolveFailure(const NonConvergence& cause, Trajectory partial)
        : std::runtime_error(cause.what()), cause_(cause), partial_(std::move(partial))
    {
    }
    const NonConvergence& cause() const { return cause_; }
    const Trajectory& partial() const { return partial_; }

private:
    NonConvergence cause_;
    Trajectory partial_;
};

/// Runs all m steps from f. A zero-step config (m == 0) returns [f].
/// Warns on std::clog when m is below the energy-inequality threshold.
/// Throws EvolveFailure carrying the partial trajectory.
Trajectory evolve(const ScalarField& f, const RotheConfig& config, const FluxModel& model, const Grid& grid);

struct Interpolants {
    ScalarField linear;    // u_m(t)
    ScalarField constant;  // bar u_m(t)
};

/// Piecewise-linear and piecewise-constant interpolants at time t in [0, T].
/// On [(j-1)T/m, jT/m) the linear one runs from u^{j-1} to u^j and the
/// constant one equals u^j; at t = T both are u^m.
Interpolants interpolants(const Trajectory& traj, double t);

}  // namespace fbpm
