#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "skelbd/ik.hpp"
#include "skelbd/kinematics.hpp"
#include "skelbd/skeleton.hpp"

namespace skelbd {

enum class TriggerAction { Nodding, BendingSideways, CrossingHands };

/// One kinematic chain a trigger drives: the IK chain from root to key plus
/// the joints carried rigidly with the key.
struct ChainSpec {
    JointId root = 0;
    JointId key = 0;
    std::vector<JointId> ik_joints;  // [root, ..., key]
    std::vector<JointId> distant;
};

struct TriggerActionSpec {
    std::string name;
    TriggerAction action = TriggerAction::Nodding;
    std::vector<ChainSpec> chains;
    double phi_min = 0.0, phi_max = 0.0;  // radians for the rotational actions,
                                          // meters of forward offset for crossing
    int duration_min = 1, duration_max = 1;  // frames
    double apex_fraction = 0.5;
    /// Joint paths whose interior angles feed the stealth metrics. Single-bone
    /// IK chains (nodding, bending) are extended by one adjacent bone so an
    /// interior angle exists.
    std::vector<std::vector<JointId>> metric_paths;
};

/// Built-in actions: "nodding", "bending_sideways", "crossing_hands"
/// (short aliases "bending" and "crossing" are accepted).
/// Throws UnknownTrigger for anything else.
TriggerActionSpec builtin_trigger(const std::string& name);
std::vector<std::string> builtin_trigger_names();

/// The spec's tunable fields as a key=value block, the format used by the
/// CLI config file.
std::string trigger_config_text(const TriggerActionSpec& spec);

/// One concrete sampled realization of a trigger action.
struct TriggerInstance {
    TriggerActionSpec spec;
    double phi = 0.0;
    int tau_s = 0, tau_e = 0;  // inclusive window, 0 <= tau_s < tau_e < T
    std::uint64_t seed = 0;
};

/// Draws duration, start frame and amplitude uniformly (in that order) from
/// the spec's ranges; deterministic for a given seed. The duration is capped
/// at frame_count - 1. Throws SequenceTooShort when even the minimum duration
/// does not fit.
TriggerInstance sample_trigger_instance(const TriggerActionSpec& spec, int frame_count,
                                        std::uint64_t seed);

/// Frame where the motion reaches full amplitude.
int apex_frame(const TriggerInstance& inst);

/// Blend weight of the end orientation at frame tau: rises linearly 0 -> 1
/// over [tau_s, apex], falls 1 -> 0 over [apex, tau_e], 0 outside.
double trigger_phase(const TriggerInstance& inst, int tau);

/// Pose-derived body directions used to aim the trigger motions.
struct BodyAxes {
    Vec3 lateral;  // left shoulder minus right shoulder, normalized
    Vec3 forward;  // lateral x world-up
};
BodyAxes body_axes(const SkeletonFrame& frame);

/// Start and end positions of the chain's key joint for one trigger
/// realization. Nodding rotates the head about the neck by phi around the
/// lateral axis; bending rotates the mid-spine about the spine base by phi
/// around the forward axis; crossing aims each hand at a point phi in front
/// of the spine-shoulder joint, the two targets mirrored 0.05 m apart so the
/// hands cross.
std::pair<Vec3, Vec3> estimate_key_positions(const SkeletonFrame& frame,
                                             const SkeletonTopology& topo, const ChainSpec& chain,
                                             const TriggerActionSpec& spec, double phi);

/// Implants the trigger into the sequence: for every frame in the window the
/// chain angles are solved toward the start and end targets of that frame,
/// blended by the go-and-return phase, and applied with forward kinematics
/// (distant joints included). Frames outside the window are untouched, as is
/// the label. Chains whose IK residual exceeds 10x the tolerance are reported
/// through `warnings` when given.
SkeletonSequence inject_trigger(const SkeletonSequence& seq, const TriggerInstance& inst,
                                const IkConfig& cfg, std::vector<std::string>* warnings = nullptr);

}  // namespace skelbd
