#include "fbpm/flux.hpp"

#include <cmath>
#include <stdexcept>

namespace fbpm {

namespace {

constexpr double kTinyNorm = 1e-300;

// |xi|^e evaluated as exp(e log |xi|) with |xi| clamped below.
double power(double norm, double e) { return std::exp(e * std::log(std::max(norm, kTinyNorm))); }

// |xi|^{p-2}; the limit at the origin is 1 for p == 2 and 0 otherwise.
double p_weight(double norm, double p)
{
    if (p == 2.0) {
        return 1.0;
    }
    if (norm == 0.0) {
        return 0.0;
    }
    return power(norm, p - 2.0);
}

}  // namespace

FluxModel::FluxModel(double delta, ExponentField exponent) : delta_(delta), exponent_(std::move(exponent))
{
    if (!(delta >= 0.0) || !std::isfinite(delta)) {
        throw std::invalid_argument("flux model: delta must be finite and >= 0");
    }
}

double FluxModel::potential_at(double p, const Eigen::Vector2d& xi) const
{
    const double s2 = xi.squaredNorm();
    double phi = 0.5 * std::log1p(s2);
    if (delta_ != 0.0 && s2 != 0.0) {
        phi += delta_ / p * power(std::sqrt(s2), p);
    }
    return phi;
}

Eigen::Vector2d FluxModel::flux_at(double p, const Eigen::Vector2d& xi) const
{
    const double s2 = xi.squaredNorm();
    const double coeff = 1.0 / (1.0 + s2) + delta_ * p_weight(std::sqrt(s2), p);
    return coeff * xi;
}

Eigen::Matrix2d FluxModel::jacobian_at(double p, const Eigen::Vector2d& xi) const
{
    const double s2 = xi.squaredNorm();
    const double s = std::sqrt(s2);
    const double denom = 1.0 + s2;
    // Perona-Malik part: I/(1+s^2) - 2 xi xi^T/(1+s^2)^2.
    Eigen::Matrix2d jac = Eigen::Matrix2d::Identity() / denom - (2.0 / (denom * denom)) * (xi * xi.transpose());
    if (delta_ != 0.0) {
        const double w = p_weight(s, p);
        if (s == 0.0) {
            jac += delta_ * w * Eigen::Matrix2d::Identity();
        } else {
            jac += delta_ * w * (Eigen::Matrix2d::Identity() + (p - 2.0) / s2 * (xi * xi.transpose()));
        }
    }
    return jac;
}

double monotonicity_defect(const FluxModel&) { return kMonotonicityDefect; }

StructureConstants growth_constants(const FluxModel& model)
{
    if (model.delta() > 1.0) {
        throw std::invalid_argument("growth_constants: delta must be <= 1");
    }
    StructureConstants c;
    c.lambda2 = 0.5 * (1.0 + model.delta());
    c.K = kMonotonicityDefect;
    if (model.delta() == 0.0) {
        c.lambda1 = kLambda1Floor;
        c.coercive = false;
    } else {
        c.lambda1 = model.delta() / model.exponent().p_plus();
    }
    return c;
}

}  // namespace fbpm
