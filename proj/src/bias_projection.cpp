#include "biasamp/bias_projection.hpp"

#include <charconv>
#include <cmath>
#include <ostream>
#include <limits>
#include <sstream>

#include "biasamp/errors.hpp"

namespace biasamp {

namespace {

void require_same_dim(const Vector& a, const Vector& b, const char* what) {
    if (a.size() != b.size()) {
        std::ostringstream msg;
        msg << what << ": dimension mismatch (" << a.size() << " vs " << b.size() << ")";
        throw ArgumentError(msg.str());
    }
}

void require_unit(const Vector& u) {
    if (u.size() == 0) throw ArgumentError("bias direction is empty");
    const double norm = u.norm();
    if (!(std::abs(norm - 1.0) <= kUnitTolerance)) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "bias direction must have unit norm (got " << norm << ")";
        throw ArgumentError(msg.str());
    }
}

}  // namespace

double QuadraticLoss::value(const Vector& theta) const {
    require_same_dim(theta, target, "quadratic loss");
    const Vector d = theta - target;
    return 0.5 * d.dot(scale.cwiseProduct(d));
}

Vector QuadraticLoss::gradient(const Vector& theta) const {
    require_same_dim(theta, target, "quadratic loss");
    return scale.cwiseProduct(theta - target);
}

double LinearLoss::value(const Vector& theta) const {
    require_same_dim(theta, gradient_vector, "linear loss");
    return gradient_vector.dot(theta);
}

Vector LinearLoss::gradient(const Vector& theta) const {
    require_same_dim(theta, gradient_vector, "linear loss");
    return gradient_vector;
}

double loss_value(const Loss& loss, const Vector& theta) {
    return std::visit([&](const auto& l) { return l.value(theta); }, loss);
}

Vector loss_gradient(const Loss& loss, const Vector& theta) {
    return std::visit([&](const auto& l) { return l.gradient(theta); }, loss);
}

void ProjectionConfig::validate() const {
    require_unit(u);
    if (!(eta > 0.0) || !std::isfinite(eta)) throw ArgumentError("learning rate must be positive");
    if (const auto* q = std::get_if<QuadraticLoss>(&loss)) {
        require_same_dim(q->target, u, "quadratic loss target");
        require_same_dim(q->scale, u, "quadratic loss scale");
        for (Eigen::Index i = 0; i < q->scale.size(); ++i) {
            if (!(q->scale[i] > 0.0)) throw ArgumentError("quadratic loss scale must be positive");
        }
    } else {
        require_same_dim(std::get<LinearLoss>(loss).gradient_vector, u, "linear loss gradient");
    }
}

Decomposition decompose(const Vector& theta, const Vector& u) {
    require_unit(u);
    require_same_dim(theta, u, "decompose");
    Vector biased = theta.dot(u) * u;
    Vector unbiased = theta - biased;
    return {std::move(unbiased), std::move(biased)};
}

ProjectionState make_state(const Vector& theta, const Vector& u) {
    auto [unbiased, biased] = decompose(theta, u);
    ProjectionState s;
    s.theta = theta;
    s.theta_unbiased = std::move(unbiased);
    s.theta_biased = std::move(biased);
    s.u = u;
    s.bias_magnitude = std::abs(theta.dot(u));
    return s;
}

double bias_coefficient(const ProjectionState& state, const Vector& gradient) {
    require_same_dim(state.theta_biased, gradient, "bias_coefficient");
    const double norm = state.theta_biased.norm();
    if (!(norm > 0.0)) {
        throw UndefinedCoefficientError("bias projection coefficient undefined: biased component is zero");
    }
    return state.theta_biased.dot(gradient) / norm;
}

ProjectionState projected_update(const ProjectionState& state, const Vector& gradient, double eta) {
    const double c = bias_coefficient(state, gradient);
    const double norm = state.theta_biased.norm();
    Vector theta = state.theta_unbiased + state.theta_biased - eta * (state.theta_biased / norm) * c;
    ProjectionState next = make_state(theta, state.u);
    next.c_t = c;
    next.flipped = eta * c >= norm;
    return next;
}

ProjectionState full_gradient_update(const ProjectionState& state, const Vector& gradient, double eta) {
    require_same_dim(state.theta, gradient, "full_gradient_update");
    const double c = state.theta_biased.norm() > 0.0 ? bias_coefficient(state, gradient)
                                                     : std::numeric_limits<double>::quiet_NaN();
    ProjectionState next = make_state(state.theta - eta * gradient, state.u);
    next.c_t = c;
    // Sign change of the u-component means the step crossed zero.
    next.flipped = state.theta.dot(state.u) * next.theta.dot(state.u) < 0.0;
    return next;
}

ProjectionTrajectory run_projection_sim(const ProjectionConfig& config, const Vector& theta0) {
    config.validate();
    require_same_dim(theta0, config.u, "initial theta");
    ProjectionTrajectory traj;
    traj.initial = make_state(theta0, config.u);
    traj.steps.reserve(config.steps);
    traj.states.reserve(config.steps);

    const ProjectionState* current = &traj.initial;
    for (std::size_t step = 1; step <= config.steps; ++step) {
        const Vector grad = loss_gradient(config.loss, current->theta);
        ProjectionState next = [&] {
            try {
                return config.rule == UpdateRule::projected
                           ? projected_update(*current, grad, config.eta)
                           : full_gradient_update(*current, grad, config.eta);
            } catch (const UndefinedCoefficientError& e) {
                throw UndefinedCoefficientError("step " + std::to_string(step) + ": " + e.what());
            }
        }();
        traj.steps.push_back(ProjectionStep{step, next.c_t, next.bias_magnitude,
                                            loss_value(config.loss, next.theta), next.flipped});
        traj.states.push_back(std::move(next));
        current = &traj.states.back();
    }
    return traj;
}

void write_projection_csv(std::ostream& out, const ProjectionTrajectory& trajectory) {
    out << "step,c_t,bias_magnitude,loss,flip_flag\n";
    char buf[32];
    auto put = [&](double v) {
        auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
        out.write(buf, end - buf);
    };
    for (const auto& s : trajectory.steps) {
        out << s.step << ',';
        put(s.c_t);
        out << ',';
        put(s.bias_magnitude);
        out << ',';
        put(s.loss);
        out << ',' << (s.flipped ? 1 : 0) << '\n';
    }
}

}  // namespace biasamp
