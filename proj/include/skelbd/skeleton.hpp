#pragma once

#include <Eigen/Core>
#include <map>
#include <string>
#include <vector>

#include "skelbd/error.hpp"

namespace skelbd {

using Vec3 = Eigen::Vector3d;

/// Joint ids are 1-based throughout the public API, matching the 25-joint
/// capture numbering; they are converted to 0-based offsets only when
/// indexing storage.
using JointId = int;

/// Parent map and joint labels of a skeleton body model. Exactly one joint is
/// the root (parent 0); the parent relation is acyclic and connects every
/// joint to the root.
struct SkeletonTopology {
    int joint_count = 0;
    std::vector<JointId> parent;      // parent[j-1]; 0 means no parent
    std::vector<std::string> names;   // names[j-1]

    bool valid_joint(JointId j) const { return j >= 1 && j <= joint_count; }
    bool is_root(JointId j) const { return parent_of(j) == 0; }
    JointId parent_of(JointId j) const;
    JointId root() const;
    std::vector<JointId> children(JointId j) const;
    /// Joints of the subtree rooted at j (j first, parents before children).
    std::vector<JointId> subtree(JointId j) const;
    /// Joints in root-first order (every parent precedes its children).
    std::vector<JointId> topological_order() const;
};

/// The 25-joint body model. The spine/neck/arm chains follow the standard
/// Kinect V2 hierarchy; hand tips and thumbs (22-25) hang off the hands
/// (8, 12).
SkeletonTopology default_topology();

/// Ordered joints [root, ..., key] following parent links.
/// Throws NotOnChain when key is not a descendant of root.
std::vector<JointId> chain(const SkeletonTopology& topo, JointId root, JointId key);

struct SkeletonFrame {
    std::vector<Vec3> positions;  // meters

    int joint_count() const { return static_cast<int>(positions.size()); }
    const Vec3& at(JointId j) const { return positions[static_cast<std::size_t>(j - 1)]; }
    Vec3& at(JointId j) { return positions[static_cast<std::size_t>(j - 1)]; }
};

/// Vector from the parent of `child` to `child`. Throws RootHasNoBone for the
/// root joint.
Vec3 bone_vector(const SkeletonFrame& frame, const SkeletonTopology& topo, JointId child);
double bone_length(const SkeletonFrame& frame, const SkeletonTopology& topo, JointId child);

struct SkeletonSequence {
    std::vector<SkeletonFrame> frames;
    int label = -1;  // class index; -1 = unlabeled
    std::map<std::string, std::string> meta;  // free-form; not persisted on disk

    int frame_count() const { return static_cast<int>(frames.size()); }
    int joint_count() const { return frames.empty() ? 0 : frames.front().joint_count(); }
};

enum class FindingKind { NonFinite, ZeroLengthBone, JointCountMismatch, EmptySequence };

struct Finding {
    FindingKind kind;
    int frame = -1;     // -1 when not frame-specific
    JointId joint = 0;  // 0 when not joint-specific
    std::string message;
};

/// Structural health report; an empty list means the sequence is sound.
/// Zero-length bones and NaNs are findings rather than errors because real
/// capture data contains them.
std::vector<Finding> validate_sequence(const SkeletonSequence& seq, const SkeletonTopology& topo);

struct ManifestRecord {
    std::string id;
    std::string path;  // relative to the dataset directory
    int label = -1;
    bool poisoned = false;
    std::string trigger;  // empty when not poisoned
};

struct Dataset {
    std::vector<SkeletonSequence> sequences;
    std::vector<ManifestRecord> manifest;

    std::size_t size() const { return sequences.size(); }
};

}  // namespace skelbd
