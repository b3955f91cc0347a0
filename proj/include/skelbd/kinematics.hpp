#pragma once

#include <Eigen/Core>
#include <vector>

#include "skelbd/skeleton.hpp"

namespace skelbd {

using Mat3 = Eigen::Matrix3d;

/// Unit rotation quaternion q = w + x i + y j + z k.
struct Quaternion {
    double w = 1.0, x = 0.0, y = 0.0, z = 0.0;

    double norm() const;
    Quaternion normalized() const;
    static Quaternion identity() { return {}; }
};

/// q = cos(theta/2) + sin(theta/2) (axis . [i j k]). Throws NonUnitAxis when
/// the axis is not unit length within 1e-9.
Quaternion quat_from_axis_angle(const Vec3& axis, double theta);

/// Hamilton product a (*) b: applying b first, then a. The result is
/// renormalized, which bounds drift when products accumulate along a chain.
Quaternion quat_multiply(const Quaternion& a, const Quaternion& b);

/// Entrywise rotation matrix of a unit quaternion:
///   | 1-2(y^2+z^2)  2(xy-zw)      2(xz+yw)     |
///   | 2(xy+zw)      1-2(x^2+z^2)  2(yz-xw)     |
///   | 2(xz-yw)      2(yz+xw)      1-2(x^2+y^2) |
Mat3 rotation_matrix(const Quaternion& q);

/// Orthogonal rotation axes of a parent joint: both unit, both perpendicular
/// to the bone leaving the joint, and mutually perpendicular.
struct RotationAxes {
    Vec3 u, v;
};

/// Axes for the bone direction i->child: the two world basis vectors most
/// orthogonal to the bone, Gram-Schmidt orthonormalized against it (ties
/// broken by axis index). A zero-length bone falls back to world x and y.
RotationAxes make_rotation_axes(const Vec3& bone);

/// Two-step joint rotation: first by alpha about u, then by beta about v,
/// composed as q_beta (*) q_alpha.
Quaternion two_step_rotation(const RotationAxes& axes, double alpha, double beta);

/// p_i + M(q) (p_j - p_i): rotates joint j about its parent i, preserving the
/// bone length.
Vec3 rotate_about_parent(const Vec3& p_j, const Vec3& p_i, const Quaternion& q);

/// Chain orientation vector [alpha_0, beta_0, alpha_1, beta_1, ...], one
/// (alpha, beta) pair per bone in root-to-key order.
using AngleVector = Eigen::VectorXd;

/// Accumulated transforms along a chain: rotation[0] is the identity at the
/// root and rotation[t] = rotation[t-1] * M(q_t) for each following joint.
struct ChainTransforms {
    std::vector<Mat3> rotation;
};

ChainTransforms chain_transforms(const std::vector<JointId>& chain_joints,
                                 const AngleVector& theta,
                                 const std::vector<RotationAxes>& axes);

/// Applies the chain rotations to a frame: the root stays fixed, each chain
/// joint moves by the accumulated rotation of its original offset from its
/// parent, and every joint in `distant` is carried rigidly with the key
/// joint's transform. Joints not on the chain or in `distant` are unchanged.
SkeletonFrame forward_kinematics(const SkeletonFrame& frame, const SkeletonTopology& topo,
                                 const std::vector<JointId>& chain_joints,
                                 const AngleVector& theta, const std::vector<RotationAxes>& axes,
                                 const std::vector<JointId>& distant);

/// Position of the key (last) chain joint under the chain rotations;
/// bit-identical to the forward_kinematics output at that joint.
Vec3 key_position(const SkeletonFrame& frame, const SkeletonTopology& topo,
                  const std::vector<JointId>& chain_joints, const AngleVector& theta,
                  const std::vector<RotationAxes>& axes);

/// Axes for every bone transition of a chain, derived from the frame's
/// current bone directions.
std::vector<RotationAxes> chain_axes(const SkeletonFrame& frame,
                                     const std::vector<JointId>& chain_joints);

}  // namespace skelbd
