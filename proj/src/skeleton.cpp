#include "skelbd/skeleton.hpp"

#include <algorithm>
#include <cmath>

namespace skelbd {

JointId SkeletonTopology::parent_of(JointId j) const {
    if (!valid_joint(j)) throw Error("joint id out of range: " + std::to_string(j));
    return parent[static_cast<std::size_t>(j - 1)];
}

JointId SkeletonTopology::root() const {
    for (JointId j = 1; j <= joint_count; ++j)
        if (parent[static_cast<std::size_t>(j - 1)] == 0) return j;
    throw Error("topology has no root joint");
}

std::vector<JointId> SkeletonTopology::children(JointId j) const {
    std::vector<JointId> out;
    for (JointId c = 1; c <= joint_count; ++c)
        if (parent[static_cast<std::size_t>(c - 1)] == j) out.push_back(c);
    return out;
}

std::vector<JointId> SkeletonTopology::subtree(JointId j) const {
    std::vector<JointId> out{j};
    for (std::size_t i = 0; i < out.size(); ++i)
        for (JointId c : children(out[i])) out.push_back(c);
    return out;
}

std::vector<JointId> SkeletonTopology::topological_order() const { return subtree(root()); }

SkeletonTopology default_topology() {
    SkeletonTopology topo;
    topo.joint_count = 25;
    // clang-format off
    topo.parent = {
        0,   // 1  SpineBase (root)
        1,   // 2  SpineMid
        21,  // 3  Neck
        3,   // 4  Head
        21,  // 5  ShoulderLeft
        5,   // 6  ElbowLeft
        6,   // 7  WristLeft
        7,   // 8  HandLeft
        21,  // 9  ShoulderRight
        9,   // 10 ElbowRight
        10,  // 11 WristRight
        11,  // 12 HandRight
        1,   // 13 HipLeft
        13,  // 14 KneeLeft
        14,  // 15 AnkleLeft
        15,  // 16 FootLeft
        1,   // 17 HipRight
        17,  // 18 KneeRight
        18,  // 19 AnkleRight
        19,  // 20 FootRight
        2,   // 21 SpineShoulder
        8,   // 22 HandTipLeft
        8,   // 23 ThumbLeft
        12,  // 24 HandTipRight
        12,  // 25 ThumbRight
    };
    topo.names = {
        "SpineBase",  "SpineMid",   "Neck",        "Head",        "ShoulderLeft",
        "ElbowLeft",  "WristLeft",  "HandLeft",    "ShoulderRight", "ElbowRight",
        "WristRight", "HandRight",  "HipLeft",     "KneeLeft",    "AnkleLeft",
        "FootLeft",   "HipRight",   "KneeRight",   "AnkleRight",  "FootRight",
        "SpineShoulder", "HandTipLeft", "ThumbLeft", "HandTipRight", "ThumbRight",
    };
    // clang-format on
    return topo;
}

std::vector<JointId> chain(const SkeletonTopology& topo, JointId root, JointId key) {
    if (!topo.valid_joint(root) || !topo.valid_joint(key))
        throw Error("chain endpoints out of range");
    std::vector<JointId> reversed;
    JointId j = key;
    for (int steps = 0; steps <= topo.joint_count; ++steps) {
        reversed.push_back(j);
        if (j == root) {
            std::reverse(reversed.begin(), reversed.end());
            return reversed;
        }
        j = topo.parent_of(j);
        if (j == 0) break;  // reached the topology root without meeting `root`
    }
    throw NotOnChain("joint " + std::to_string(key) + " is not a descendant of joint " +
                     std::to_string(root));
}

Vec3 bone_vector(const SkeletonFrame& frame, const SkeletonTopology& topo, JointId child) {
    const JointId p = topo.parent_of(child);
    if (p == 0) throw RootHasNoBone("joint " + std::to_string(child) + " is the root");
    return frame.at(child) - frame.at(p);
}

double bone_length(const SkeletonFrame& frame, const SkeletonTopology& topo, JointId child) {
    return bone_vector(frame, topo, child).norm();
}

std::vector<Finding> validate_sequence(const SkeletonSequence& seq, const SkeletonTopology& topo) {
    std::vector<Finding> findings;
    if (seq.frames.empty()) {
        findings.push_back({FindingKind::EmptySequence, -1, 0, "sequence has no frames"});
        return findings;
    }
    for (int t = 0; t < seq.frame_count(); ++t) {
        const SkeletonFrame& frame = seq.frames[static_cast<std::size_t>(t)];
        if (frame.joint_count() != topo.joint_count) {
            findings.push_back({FindingKind::JointCountMismatch, t, 0,
                                "frame " + std::to_string(t) + " has " +
                                    std::to_string(frame.joint_count()) + " joints, expected " +
                                    std::to_string(topo.joint_count)});
            continue;
        }
        for (JointId j = 1; j <= topo.joint_count; ++j) {
            const Vec3& p = frame.at(j);
            if (!p.allFinite()) {
                findings.push_back({FindingKind::NonFinite, t, j,
                                    "non-finite coordinate at frame " + std::to_string(t) +
                                        " joint " + std::to_string(j)});
            }
        }
        for (JointId j = 1; j <= topo.joint_count; ++j) {
            if (topo.is_root(j)) continue;
            const Vec3 b = bone_vector(frame, topo, j);
            if (b.allFinite() && b.norm() < 1e-12) {
                findings.push_back({FindingKind::ZeroLengthBone, t, j,
                                    "zero-length bone at frame " + std::to_string(t) + " joint " +
                                        std::to_string(j)});
            }
        }
    }
    return findings;
}

}  // namespace skelbd
