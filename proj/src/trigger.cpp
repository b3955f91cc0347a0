#include "skelbd/trigger.hpp"

#include <Eigen/Geometry>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "skelbd/rng.hpp"

namespace skelbd {
namespace {

constexpr JointId kSpineBase = 1;
constexpr JointId kSpineMid = 2;
constexpr JointId kNeck = 3;
constexpr JointId kHead = 4;
constexpr JointId kShoulderLeft = 5;
constexpr JointId kHandLeft = 8;
constexpr JointId kShoulderRight = 9;
constexpr JointId kHandRight = 12;
constexpr JointId kHipLeft = 13;
constexpr JointId kSpineShoulder = 21;

/// Lateral separation of the two crossing-hands targets.
constexpr double kCrossSeparation = 0.05;

const SkeletonTopology& body_topology() {
    static const SkeletonTopology topo = default_topology();
    return topo;
}

TriggerActionSpec nodding_spec() {
    TriggerActionSpec spec;
    spec.name = "nodding";
    spec.action = TriggerAction::Nodding;
    spec.chains = {{kNeck, kHead, {kNeck, kHead}, {}}};
    spec.phi_min = 0.3;
    spec.phi_max = 0.7;
    spec.duration_min = 20;
    spec.duration_max = 45;
    spec.metric_paths = {{kSpineShoulder, kNeck, kHead}};
    return spec;
}

TriggerActionSpec bending_spec() {
    TriggerActionSpec spec;
    spec.name = "bending_sideways";
    spec.action = TriggerAction::BendingSideways;
    ChainSpec chain{kSpineBase, kSpineMid, {kSpineBase, kSpineMid}, {}};
    for (JointId j = 3; j <= 12; ++j) chain.distant.push_back(j);
    for (JointId j = 21; j <= 25; ++j) chain.distant.push_back(j);
    spec.chains = {chain};
    spec.phi_min = 0.25;
    spec.phi_max = 0.6;
    spec.duration_min = 20;
    spec.duration_max = 45;
    spec.metric_paths = {{kSpineMid, kSpineBase, kHipLeft}};
    return spec;
}

TriggerActionSpec crossing_spec() {
    TriggerActionSpec spec;
    spec.name = "crossing_hands";
    spec.action = TriggerAction::CrossingHands;
    spec.chains = {{kShoulderLeft, kHandLeft, {5, 6, 7, 8}, {22, 23}},
                   {kShoulderRight, kHandRight, {9, 10, 11, 12}, {24, 25}}};
    spec.phi_min = 0.25;  // meters in front of the chest
    spec.phi_max = 0.40;
    spec.duration_min = 20;
    spec.duration_max = 45;
    spec.metric_paths = {{5, 6, 7, 8}, {9, 10, 11, 12}};
    return spec;
}

}  // namespace

TriggerActionSpec builtin_trigger(const std::string& name) {
    std::string key = name;
    std::replace(key.begin(), key.end(), '-', '_');
    if (key == "nodding") return nodding_spec();
    if (key == "bending" || key == "bending_sideways") return bending_spec();
    if (key == "crossing" || key == "crossing_hands") return crossing_spec();
    throw UnknownTrigger("unknown trigger: " + name);
}

std::vector<std::string> builtin_trigger_names() {
    return {"nodding", "bending_sideways", "crossing_hands"};
}

std::string trigger_config_text(const TriggerActionSpec& spec) {
    std::ostringstream out;
    out << "trigger=" << spec.name << "\n";
    out << "phi_min=" << spec.phi_min << "\n";
    out << "phi_max=" << spec.phi_max << "\n";
    out << "duration_min=" << spec.duration_min << "\n";
    out << "duration_max=" << spec.duration_max << "\n";
    out << "apex_fraction=" << spec.apex_fraction << "\n";
    return out.str();
}

TriggerInstance sample_trigger_instance(const TriggerActionSpec& spec, int frame_count,
                                        std::uint64_t seed) {
    if (spec.duration_min < 1 || spec.duration_max < spec.duration_min)
        throw Error("invalid trigger duration range");
    if (!(spec.phi_min <= spec.phi_max)) throw Error("invalid trigger amplitude range");
    if (frame_count < spec.duration_min + 1)
        throw SequenceTooShort("sequence of " + std::to_string(frame_count) +
                               " frames cannot hold a trigger of at least " +
                               std::to_string(spec.duration_min) + " frames");

    SplitMix64 rng(seed);
    const int max_duration = std::min(spec.duration_max, frame_count - 1);
    const int duration = static_cast<int>(rng.uniform_int(spec.duration_min, max_duration));
    const int start = static_cast<int>(rng.uniform_int(0, frame_count - 1 - duration));
    const double phi = rng.uniform(spec.phi_min, spec.phi_max);

    TriggerInstance inst;
    inst.spec = spec;
    inst.phi = phi;
    inst.tau_s = start;
    inst.tau_e = start + duration;
    inst.seed = seed;
    return inst;
}

int apex_frame(const TriggerInstance& inst) {
    const int duration = inst.tau_e - inst.tau_s;
    if (duration < 2) return inst.tau_e;
    const int offset = static_cast<int>(std::llround(inst.spec.apex_fraction * duration));
    return inst.tau_s + std::clamp(offset, 1, duration - 1);
}

double trigger_phase(const TriggerInstance& inst, int tau) {
    if (tau < inst.tau_s || tau > inst.tau_e) return 0.0;
    const int duration = inst.tau_e - inst.tau_s;
    if (duration < 2) return 0.0;  // no room to move and return
    const int apex = apex_frame(inst);
    if (tau <= apex) return static_cast<double>(tau - inst.tau_s) / (apex - inst.tau_s);
    return static_cast<double>(inst.tau_e - tau) / (inst.tau_e - apex);
}

BodyAxes body_axes(const SkeletonFrame& frame) {
    const Vec3 shoulder_axis = frame.at(kShoulderLeft) - frame.at(kShoulderRight);
    if (shoulder_axis.norm() < 1e-9)
        throw DegenerateBone("shoulder axis has zero length; body orientation undefined");
    BodyAxes axes;
    axes.lateral = shoulder_axis.normalized();
    const Vec3 fwd = axes.lateral.cross(Vec3::UnitY());
    if (fwd.norm() < 1e-9)
        throw DegenerateBone("shoulder axis is vertical; forward direction undefined");
    axes.forward = fwd.normalized();
    return axes;
}

std::pair<Vec3, Vec3> estimate_key_positions(const SkeletonFrame& frame,
                                             const SkeletonTopology& topo, const ChainSpec& chain,
                                             const TriggerActionSpec& spec, double phi) {
    if (!topo.valid_joint(chain.root) || !topo.valid_joint(chain.key) ||
        frame.joint_count() != topo.joint_count)
        throw ChainMismatch("trigger chain does not fit the frame");
    const Vec3 p_start = frame.at(chain.key);
    switch (spec.action) {
        case TriggerAction::Nodding:
        case TriggerAction::BendingSideways: {
            const Vec3 pivot = frame.at(chain.root);
            if ((p_start - pivot).norm() < 1e-12)
                throw DegenerateBone("key joint coincides with the chain root");
            const BodyAxes axes = body_axes(frame);
            const Vec3 rotation_axis =
                spec.action == TriggerAction::Nodding ? axes.lateral : axes.forward;
            const Quaternion q = quat_from_axis_angle(rotation_axis, phi);
            return {p_start, rotate_about_parent(p_start, pivot, q)};
        }
        case TriggerAction::CrossingHands: {
            const BodyAxes axes = body_axes(frame);
            const Vec3 anchor = frame.at(kSpineShoulder);
            // Hands cross: each hand's target sits slightly on the opposite side.
            const double side = chain.key == kHandLeft ? -1.0 : 1.0;
            const Vec3 p_end =
                anchor + phi * axes.forward + side * (0.5 * kCrossSeparation) * axes.lateral;
            return {p_start, p_end};
        }
    }
    throw Error("unhandled trigger action");
}

SkeletonSequence inject_trigger(const SkeletonSequence& seq, const TriggerInstance& inst,
                                const IkConfig& cfg, std::vector<std::string>* warnings) {
    const SkeletonTopology& topo = body_topology();
    const int frames = seq.frame_count();
    if (frames < 1) throw SequenceTooShort("sequence has no frames");
    if (seq.joint_count() != topo.joint_count)
        throw ChainMismatch("sequence has " + std::to_string(seq.joint_count()) +
                            " joints, trigger actions assume " +
                            std::to_string(topo.joint_count));
    if (inst.tau_s < 0 || inst.tau_e >= frames || inst.tau_s >= inst.tau_e)
        throw SequenceTooShort("trigger window [" + std::to_string(inst.tau_s) + ", " +
                               std::to_string(inst.tau_e) + "] does not fit " +
                               std::to_string(frames) + " frames");

    struct ChainStats {
        int slow_frames = 0;
        double worst_residual = 0.0;
    };
    std::vector<ChainStats> stats(inst.spec.chains.size());

    SkeletonSequence out = seq;
    for (int tau = inst.tau_s; tau <= inst.tau_e; ++tau) {
        const SkeletonFrame& src = seq.frames[static_cast<std::size_t>(tau)];
        const double s = trigger_phase(inst, tau);
        SkeletonFrame dst = src;
        for (std::size_t c = 0; c < inst.spec.chains.size(); ++c) {
            const ChainSpec& chain = inst.spec.chains[c];
            const std::vector<RotationAxes> axes = chain_axes(src, chain.ik_joints);
            const auto [p_start, p_end] =
                estimate_key_positions(src, topo, chain, inst.spec, inst.phi);

            const IkResult start_fit = solve_ik(src, topo, chain.ik_joints, p_start, axes, cfg);
            const IkResult end_fit = solve_ik(src, topo, chain.ik_joints, p_end, axes, cfg);
            if (end_fit.residual > 10.0 * cfg.tolerance ||
                start_fit.residual > 10.0 * cfg.tolerance) {
                ++stats[c].slow_frames;
                stats[c].worst_residual = std::max(
                    stats[c].worst_residual, std::max(end_fit.residual, start_fit.residual));
            }

            const AngleVector theta = (1.0 - s) * start_fit.theta + s * end_fit.theta;
            dst = forward_kinematics(dst, topo, chain.ik_joints, theta, axes, chain.distant);
        }
        out.frames[static_cast<std::size_t>(tau)] = dst;
    }

    if (warnings) {
        for (std::size_t c = 0; c < stats.size(); ++c) {
            if (stats[c].slow_frames == 0) continue;
            const ChainSpec& chain = inst.spec.chains[c];
            std::ostringstream msg;
            msg << "trigger " << inst.spec.name << " chain " << chain.root << "->" << chain.key
                << ": IK residual above 10x tolerance in " << stats[c].slow_frames << "/"
                << (inst.tau_e - inst.tau_s + 1) << " frames (max " << stats[c].worst_residual
                << " m)";
            warnings->push_back(msg.str());
        }
    }
    return out;
}

}  // namespace skelbd
