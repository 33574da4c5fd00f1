#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <iosfwd>
#include <variant>
#include <vector>

namespace biasamp {

using Vector = Eigen::VectorXd;

inline constexpr double kUnitTolerance = 1e-12;

/// L(theta) = 1/2 (theta - target)^T diag(scale) (theta - target).
struct QuadraticLoss {
    Vector target;
    Vector scale;  ///< diagonal of the positive-definite scaling

    double value(const Vector& theta) const;
    Vector gradient(const Vector& theta) const;
};

/// L(theta) = g^T theta: a fixed gradient, for plug-in scenarios.
struct LinearLoss {
    Vector gradient_vector;

    double value(const Vector& theta) const;
    Vector gradient(const Vector& theta) const;
};

using Loss = std::variant<QuadraticLoss, LinearLoss>;

double loss_value(const Loss& loss, const Vector& theta);
Vector loss_gradient(const Loss& loss, const Vector& theta);

enum class UpdateRule { projected, full_gradient };

struct ProjectionConfig {
    Vector u;  ///< bias direction, unit norm
    double eta = 0.1;
    Loss loss;
    std::size_t steps = 0;
    UpdateRule rule = UpdateRule::projected;

    void validate() const;
};

struct Decomposition {
    Vector unbiased;  ///< orthogonal to u
    Vector biased;    ///< (theta . u) u
};

struct ProjectionState {
    Vector theta;
    Vector theta_unbiased;
    Vector theta_biased;
    Vector u;
    double bias_magnitude = 0.0;  ///< |theta_biased . u|
    double c_t = 0.0;             ///< coefficient of the step that produced this state
    bool flipped = false;         ///< that step pushed the biased component through zero
};

Decomposition decompose(const Vector& theta, const Vector& u);
ProjectionState make_state(const Vector& theta, const Vector& u);

/// (theta_biased / |theta_biased|)^T gradient.
double bias_coefficient(const ProjectionState& state, const Vector& gradient);

/// theta_unbiased + theta_biased - eta * (theta_biased / |theta_biased|) * c_t.
/// A step with eta * c_t >= |theta_biased| is taken as written and flagged.
ProjectionState projected_update(const ProjectionState& state, const Vector& gradient, double eta);

/// theta - eta * gradient. c_t is filled when the biased component is non-zero.
ProjectionState full_gradient_update(const ProjectionState& state, const Vector& gradient, double eta);

struct ProjectionStep {
    std::size_t step;  ///< 1-based
    double c_t;
    double bias_magnitude;  ///< after the step
    double loss;            ///< after the step
    bool flipped;
};

struct ProjectionTrajectory {
    ProjectionState initial;
    std::vector<ProjectionStep> steps;
    std::vector<ProjectionState> states;  ///< state after each step
};

ProjectionTrajectory run_projection_sim(const ProjectionConfig& config, const Vector& theta0);

/// step,c_t,bias_magnitude,loss,flip_flag
void write_projection_csv(std::ostream& out, const ProjectionTrajectory& trajectory);

}  // namespace biasamp
