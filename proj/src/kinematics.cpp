#include "skelbd/kinematics.hpp"

#include <array>
#include <cmath>

namespace skelbd {
namespace {

constexpr double kUnitTolerance = 1e-9;

void check_chain(const SkeletonTopology& topo, const std::vector<JointId>& chain_joints,
                 const AngleVector& theta, const std::vector<RotationAxes>& axes) {
    if (chain_joints.empty()) throw ChainMismatch("chain is empty");
    for (JointId j : chain_joints)
        if (!topo.valid_joint(j)) throw ChainMismatch("chain joint out of range");
    for (std::size_t i = 1; i < chain_joints.size(); ++i) {
        if (topo.parent_of(chain_joints[i]) != chain_joints[i - 1])
            throw ChainMismatch("chain joints are not parent-linked");
    }
    const std::size_t bones = chain_joints.size() - 1;
    if (static_cast<std::size_t>(theta.size()) != 2 * bones)
        throw ChainMismatch("angle vector has " + std::to_string(theta.size()) +
                            " entries, chain needs " + std::to_string(2 * bones));
    if (axes.size() != bones)
        throw ChainMismatch("axes list has " + std::to_string(axes.size()) +
                            " entries, chain needs " + std::to_string(bones));
}

bool is_identity(const Quaternion& q) {
    return q.w == 1.0 && q.x == 0.0 && q.y == 0.0 && q.z == 0.0;
}

struct ChainWalk {
    Mat3 rotation = Mat3::Identity();  // accumulated rotation at the key joint
    bool identity = true;              // no rotation happened anywhere on the chain
};

/// Walks the chain accumulating rotations and updated positions. While every
/// step quaternion is the exact identity the original positions are copied
/// bit-for-bit, which makes zero angles a true no-op.
ChainWalk accumulate_chain(const SkeletonFrame& frame, const std::vector<JointId>& chain_joints,
                           const AngleVector& theta, const std::vector<RotationAxes>& axes,
                           std::vector<Vec3>& out_pos) {
    out_pos.resize(chain_joints.size());
    out_pos[0] = frame.at(chain_joints[0]);
    ChainWalk walk;
    for (std::size_t t = 1; t < chain_joints.size(); ++t) {
        const Quaternion q =
            two_step_rotation(axes[t - 1], theta[2 * static_cast<Eigen::Index>(t - 1)],
                              theta[2 * static_cast<Eigen::Index>(t - 1) + 1]);
        if (!is_identity(q)) {
            walk.identity = false;
            walk.rotation = walk.rotation * rotation_matrix(q);
        }
        if (walk.identity) {
            out_pos[t] = frame.at(chain_joints[t]);
        } else {
            const Vec3 offset = frame.at(chain_joints[t]) - frame.at(chain_joints[t - 1]);
            out_pos[t] = out_pos[t - 1] + walk.rotation * offset;
        }
    }
    return walk;
}

}  // namespace

double Quaternion::norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }

Quaternion Quaternion::normalized() const {
    const double n = norm();
    return {w / n, x / n, y / n, z / n};
}

Quaternion quat_from_axis_angle(const Vec3& axis, double theta) {
    if (std::abs(axis.norm() - 1.0) > kUnitTolerance)
        throw NonUnitAxis("rotation axis must be unit length");
    const double half = 0.5 * theta;
    const double s = std::sin(half);
    return {std::cos(half), s * axis.x(), s * axis.y(), s * axis.z()};
}

Quaternion quat_multiply(const Quaternion& a, const Quaternion& b) {
    const Quaternion p{
        a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
        a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
        a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
        a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w,
    };
    return p.normalized();
}

Mat3 rotation_matrix(const Quaternion& q) {
    if (std::abs(q.norm() - 1.0) > kUnitTolerance)
        throw NonUnitQuaternion("rotation quaternion must be unit length");
    Mat3 m;
    m(0, 0) = 1 - 2 * (q.y * q.y + q.z * q.z);
    m(0, 1) = 2 * (q.x * q.y - q.z * q.w);
    m(0, 2) = 2 * (q.x * q.z + q.y * q.w);
    m(1, 0) = 2 * (q.x * q.y + q.z * q.w);
    m(1, 1) = 1 - 2 * (q.x * q.x + q.z * q.z);
    m(1, 2) = 2 * (q.y * q.z - q.x * q.w);
    m(2, 0) = 2 * (q.x * q.z - q.y * q.w);
    m(2, 1) = 2 * (q.y * q.z + q.x * q.w);
    m(2, 2) = 1 - 2 * (q.x * q.x + q.y * q.y);
    return m;
}

RotationAxes make_rotation_axes(const Vec3& bone) {
    const double length = bone.norm();
    if (length < 1e-12) return {Vec3::UnitX(), Vec3::UnitY()};
    const Vec3 dir = bone / length;

    // The two world basis vectors with the smallest |dot(dir, e)|, most
    // orthogonal first; ties resolved by axis index.
    std::array<int, 3> order{0, 1, 2};
    for (int pass = 0; pass < 2; ++pass) {
        for (int i = 0; i < 2 - pass; ++i) {
            const double a = std::abs(dir[order[static_cast<std::size_t>(i)]]);
            const double b = std::abs(dir[order[static_cast<std::size_t>(i + 1)]]);
            if (b < a) std::swap(order[static_cast<std::size_t>(i)],
                                 order[static_cast<std::size_t>(i + 1)]);
        }
    }
    const Vec3 e1 = Vec3::Unit(order[0]);
    const Vec3 e2 = Vec3::Unit(order[1]);

    RotationAxes axes;
    axes.u = (e1 - e1.dot(dir) * dir).normalized();
    const Vec3 v = e2 - e2.dot(dir) * dir - e2.dot(axes.u) * axes.u;
    axes.v = v.normalized();
    return axes;
}

Quaternion two_step_rotation(const RotationAxes& axes, double alpha, double beta) {
    const Quaternion q_alpha = quat_from_axis_angle(axes.u, alpha);
    const Quaternion q_beta = quat_from_axis_angle(axes.v, beta);
    return quat_multiply(q_beta, q_alpha);
}

Vec3 rotate_about_parent(const Vec3& p_j, const Vec3& p_i, const Quaternion& q) {
    if (is_identity(q)) return p_j;
    return p_i + rotation_matrix(q) * (p_j - p_i);
}

ChainTransforms chain_transforms(const std::vector<JointId>& chain_joints,
                                 const AngleVector& theta,
                                 const std::vector<RotationAxes>& axes) {
    if (chain_joints.empty()) throw ChainMismatch("chain is empty");
    const std::size_t bones = chain_joints.size() - 1;
    if (static_cast<std::size_t>(theta.size()) != 2 * bones || axes.size() != bones)
        throw ChainMismatch("angle/axes arity does not match chain");
    ChainTransforms transforms;
    transforms.rotation.resize(chain_joints.size());
    transforms.rotation[0] = Mat3::Identity();
    for (std::size_t t = 1; t < chain_joints.size(); ++t) {
        const Quaternion q =
            two_step_rotation(axes[t - 1], theta[2 * static_cast<Eigen::Index>(t - 1)],
                              theta[2 * static_cast<Eigen::Index>(t - 1) + 1]);
        transforms.rotation[t] = transforms.rotation[t - 1] * rotation_matrix(q);
    }
    return transforms;
}

SkeletonFrame forward_kinematics(const SkeletonFrame& frame, const SkeletonTopology& topo,
                                 const std::vector<JointId>& chain_joints,
                                 const AngleVector& theta, const std::vector<RotationAxes>& axes,
                                 const std::vector<JointId>& distant) {
    check_chain(topo, chain_joints, theta, axes);
    for (JointId l : distant)
        if (!topo.valid_joint(l)) throw ChainMismatch("distant joint out of range");

    std::vector<Vec3> chain_pos;
    const ChainWalk walk = accumulate_chain(frame, chain_joints, theta, axes, chain_pos);

    SkeletonFrame out = frame;
    for (std::size_t t = 0; t < chain_joints.size(); ++t) out.at(chain_joints[t]) = chain_pos[t];
    if (walk.identity) return out;  // distant joints are untouched as well

    const JointId key = chain_joints.back();
    const Vec3 key_old = frame.at(key);
    const Vec3 key_new = chain_pos.back();
    for (JointId l : distant) out.at(l) = key_new + walk.rotation * (frame.at(l) - key_old);
    return out;
}

Vec3 key_position(const SkeletonFrame& frame, const SkeletonTopology& topo,
                  const std::vector<JointId>& chain_joints, const AngleVector& theta,
                  const std::vector<RotationAxes>& axes) {
    check_chain(topo, chain_joints, theta, axes);
    // Same accumulation order as accumulate_chain, so the result is
    // bit-identical to the forward_kinematics output at the key joint.
    Vec3 pos = frame.at(chain_joints[0]);
    Mat3 rotation = Mat3::Identity();
    bool identity = true;
    for (std::size_t t = 1; t < chain_joints.size(); ++t) {
        const Quaternion q =
            two_step_rotation(axes[t - 1], theta[2 * static_cast<Eigen::Index>(t - 1)],
                              theta[2 * static_cast<Eigen::Index>(t - 1) + 1]);
        if (!is_identity(q)) {
            identity = false;
            rotation = rotation * rotation_matrix(q);
        }
        if (identity) {
            pos = frame.at(chain_joints[t]);
        } else {
            const Vec3 offset = frame.at(chain_joints[t]) - frame.at(chain_joints[t - 1]);
            pos = pos + rotation * offset;
        }
    }
    return pos;
}

std::vector<RotationAxes> chain_axes(const SkeletonFrame& frame,
                                     const std::vector<JointId>& chain_joints) {
    std::vector<RotationAxes> axes;
    axes.reserve(chain_joints.size() > 0 ? chain_joints.size() - 1 : 0);
    for (std::size_t t = 1; t < chain_joints.size(); ++t)
        axes.push_back(make_rotation_axes(frame.at(chain_joints[t]) - frame.at(chain_joints[t - 1])));
    return axes;
}

}  // namespace skelbd
