#pragma once

#include <Eigen/Core>
#include <vector>

#include "skelbd/kinematics.hpp"

namespace skelbd {

struct IkConfig {
    /// Gain of the Jacobian-transpose step. The applied step length is
    /// 10 * learning_rate times the length that minimizes the linearized
    /// residual along K^T e, so the default 0.1 takes the full optimal step
    /// and convergence does not depend on limb scale.
    double learning_rate = 0.1;
    int max_iterations = 500;
    double tolerance = 1e-3;      // meters
    double jacobian_step = 1e-4;  // radians
};

struct IkResult {
    AngleVector theta;
    double residual = 0.0;  // meters, |target - F(theta)|
    int iterations_used = 0;
    bool converged = false;
    /// Residual before each update plus the final one; useful for
    /// convergence diagnostics.
    std::vector<double> residual_history;
};

/// Central-difference Jacobian of the key-joint position with respect to the
/// chain angles: column d is (F(theta + h e_d) - F(theta - h e_d)) / (2 h).
Eigen::MatrixXd jacobian(const SkeletonFrame& frame, const SkeletonTopology& topo,
                         const std::vector<JointId>& chain_joints, const AngleVector& theta,
                         const std::vector<RotationAxes>& axes, double step);

/// Jacobian-transpose iteration
///   theta <- theta + lambda K^T(theta) (target - F(theta))
/// starting from all-zero angles, stopping when the residual drops to the
/// tolerance or the iteration budget runs out. The scalar step is chosen per
/// iteration (optimal linearized length scaled by the learning rate, capped,
/// and backtracked until the true residual decreases), so the recorded
/// residuals are non-increasing. Angles are wrapped to (-pi, pi] after each
/// update. Non-convergence is reported through the result, not an error.
IkResult solve_ik(const SkeletonFrame& frame, const SkeletonTopology& topo,
                  const std::vector<JointId>& chain_joints, const Vec3& target,
                  const std::vector<RotationAxes>& axes, const IkConfig& cfg);

}  // namespace skelbd
