#pragma once

#include <Eigen/Core>

#include "fbpm/exponent_field.hpp"

namespace fbpm {

/// Structure constants of the flux: growth bounds lambda1, lambda2 and the
/// monotonicity defect K.
struct StructureConstants {
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    double K = 0.0;
    /// False when delta == 0: the lower growth bound then fails for any
    /// positive lambda1 and lambda1 holds a floor value instead.
    bool coercive = true;
};

/// Heat flux q(x, xi) = xi / (1 + |xi|^2) + delta |xi|^{p(x) - 2} xi and its
/// potential phi(x, xi) = log(1 + |xi|^2) / 2 + (delta / p(x)) |xi|^{p(x)}.
///
/// The point-wise kernels take the exponent directly so that callers holding
/// per-edge or per-sample exponents can use them; the node overloads read
/// p from the exponent field.
class FluxModel {
public:
    FluxModel(double delta, ExponentField exponent);

    double delta() const { return delta_; }
    const ExponentField& exponent() const { return exponent_; }

    double potential_at(double p, const Eigen::Vector2d& xi) const;
    Eigen::Vector2d flux_at(double p, const Eigen::Vector2d& xi) const;
    Eigen::Matrix2d jacobian_at(double p, const Eigen::Vector2d& xi) const;

    double potential(std::size_t node, const Eigen::Vector2d& xi) const { return potential_at(exponent_[node], xi); }
    Eigen::Vector2d flux(std::size_t node, const Eigen::Vector2d& xi) const { return flux_at(exponent_[node], xi); }
    Eigen::Matrix2d flux_jacobian(std::size_t node, const Eigen::Vector2d& xi) const
    {
        return jacobian_at(exponent_[node], xi);
    }

private:
    double delta_;
    ExponentField exponent_;
};

/// Floor reported as lambda1 when delta == 0.
inline constexpr double kLambda1Floor = 1e-12;

/// Sharp lower bound of the Perona-Malik radial slope (1 - s^2)/(1 + s^2)^2,
/// attained at s = sqrt(3). The p-term is monotone, so this bounds the
/// monotonicity defect in every dimension.
inline constexpr double kMonotonicityDefect = 0.125;

double monotonicity_defect(const FluxModel& model);

/// lambda1 = delta / p_plus, lambda2 = (1 + delta) / 2, K = 1/8. Requires
/// delta <= 1; throws std::invalid_argument otherwise.
StructureConstants growth_constants(const FluxModel& model);

}  // namespace fbpm
