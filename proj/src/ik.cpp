#include "skelbd/ik.hpp"

#include <cmath>

namespace skelbd {
namespace {

double wrap_angle(double a) {
    double r = std::remainder(a, 2.0 * M_PI);  // [-pi, pi]
    if (r <= -M_PI) r += 2.0 * M_PI;
    return r;
}

/// The default learning rate of 0.1 maps to relaxation 1.0, i.e. the step
/// length that minimizes the linearized residual along the transpose
/// direction; smaller rates take proportionally shorter steps.
constexpr double kRelaxationPerUnitRate = 10.0;

/// Per-iteration angle cap; keeps steps inside the region where the
/// linearization is trustworthy, in particular near singular poses where the
/// optimal step length blows up.
constexpr double kMaxStepRadians = 0.5;

void check_config(const IkConfig& cfg) {
    if (!(cfg.learning_rate > 0) || !(cfg.tolerance > 0) || !(cfg.jacobian_step > 0) ||
        cfg.max_iterations < 1)
        throw Error("invalid IK configuration");
}

}  // namespace

Eigen::MatrixXd jacobian(const SkeletonFrame& frame, const SkeletonTopology& topo,
                         const std::vector<JointId>& chain_joints, const AngleVector& theta,
                         const std::vector<RotationAxes>& axes, double step) {
    if (!(step > 0)) throw Error("jacobian step must be positive");
    const Eigen::Index params = theta.size();
    Eigen::MatrixXd jac(3, params);
    AngleVector probe = theta;
    for (Eigen::Index d = 0; d < params; ++d) {
        const double saved = probe[d];
        probe[d] = saved + step;
        const Vec3 forward = key_position(frame, topo, chain_joints, probe, axes);
        probe[d] = saved - step;
        const Vec3 backward = key_position(frame, topo, chain_joints, probe, axes);
        probe[d] = saved;
        jac.col(d) = (forward - backward) / (2.0 * step);
    }
    return jac;
}

IkResult solve_ik(const SkeletonFrame& frame, const SkeletonTopology& topo,
                  const std::vector<JointId>& chain_joints, const Vec3& target,
                  const std::vector<RotationAxes>& axes, const IkConfig& cfg) {
    check_config(cfg);
    if (!target.allFinite()) throw NonFiniteTarget("IK target has non-finite coordinates");
    if (chain_joints.size() < 2) throw ChainMismatch("IK chain needs at least one bone");

    IkResult result;
    result.theta = AngleVector::Zero(2 * static_cast<Eigen::Index>(chain_joints.size() - 1));
    result.residual_history.reserve(static_cast<std::size_t>(cfg.max_iterations) + 1);

    const double relaxation = cfg.learning_rate * kRelaxationPerUnitRate;
    for (int iter = 0;; ++iter) {
        const Vec3 current = key_position(frame, topo, chain_joints, result.theta, axes);
        const Vec3 error = target - current;
        result.residual = error.norm();
        result.residual_history.push_back(result.residual);
        result.iterations_used = iter;
        if (result.residual <= cfg.tolerance) {
            result.converged = true;
            return result;
        }
        if (iter == cfg.max_iterations) return result;

        const Eigen::MatrixXd jac =
            jacobian(frame, topo, chain_joints, result.theta, axes, cfg.jacobian_step);
        const AngleVector direction = jac.transpose() * error;
        if (direction.squaredNorm() < 1e-24) return result;  // stationary (e.g. full extension)

        // Step length minimizing the linearized residual along the transpose
        // direction, scaled by the configured relaxation and capped.
        const Vec3 image = jac * direction;
        const double image_norm2 = image.squaredNorm();
        if (image_norm2 < 1e-300) return result;
        double step = relaxation * error.dot(image) / image_norm2;
        const double largest = direction.cwiseAbs().maxCoeff();
        if (step * largest > kMaxStepRadians) step = kMaxStepRadians / largest;

        // Backtrack until the true residual decreases; together with the
        // tolerance check above this makes the recorded residuals
        // non-increasing for any learning rate.
        bool moved = false;
        for (int attempt = 0; attempt < 30; ++attempt, step *= 0.5) {
            AngleVector next = result.theta + step * direction;
            for (Eigen::Index d = 0; d < next.size(); ++d) next[d] = wrap_angle(next[d]);
            if (!next.allFinite()) continue;
            const Vec3 moved_pos = key_position(frame, topo, chain_joints, next, axes);
            if ((target - moved_pos).norm() < result.residual) {
                result.theta = std::move(next);
                moved = true;
                break;
            }
        }
        if (!moved) return result;  // no decreasing step exists numerically
    }
}

}  // namespace skelbd
