#include "skelbd/synth.hpp"

#include <cmath>
#include <cstdio>

#include "skelbd/kinematics.hpp"
#include "skelbd/rng.hpp"

namespace skelbd {
namespace {

const SkeletonTopology& body_topology() {
    static const SkeletonTopology topo = default_topology();
    return topo;
}

/// Rotates every joint of `joints` about the pivot joint's position.
void swing(SkeletonFrame& frame, const SkeletonTopology& topo, JointId pivot, JointId subtree_root,
           const Vec3& axis, double angle) {
    const Vec3 center = frame.at(pivot);
    const Mat3 rot = rotation_matrix(quat_from_axis_angle(axis, angle));
    for (JointId j : topo.subtree(subtree_root)) frame.at(j) = center + rot * (frame.at(j) - center);
}

}  // namespace

SkeletonFrame reference_pose() {
    SkeletonFrame frame;
    frame.positions = {
        {0.00, 1.00, 0.00},   // 1  SpineBase
        {0.00, 1.26, 0.00},   // 2  SpineMid
        {0.00, 1.60, 0.00},   // 3  Neck
        {0.00, 1.75, 0.00},   // 4  Head
        {0.20, 1.48, 0.00},   // 5  ShoulderLeft
        {0.22, 1.20, 0.00},   // 6  ElbowLeft
        {0.24, 0.95, 0.00},   // 7  WristLeft
        {0.25, 0.87, 0.00},   // 8  HandLeft
        {-0.20, 1.48, 0.00},  // 9  ShoulderRight
        {-0.22, 1.20, 0.00},  // 10 ElbowRight
        {-0.24, 0.95, 0.00},  // 11 WristRight
        {-0.25, 0.87, 0.00},  // 12 HandRight
        {0.09, 0.97, 0.00},   // 13 HipLeft
        {0.10, 0.52, 0.00},   // 14 KneeLeft
        {0.11, 0.09, 0.00},   // 15 AnkleLeft
        {0.11, 0.03, 0.12},   // 16 FootLeft
        {-0.09, 0.97, 0.00},  // 17 HipRight
        {-0.10, 0.52, 0.00},  // 18 KneeRight
        {-0.11, 0.09, 0.00},  // 19 AnkleRight
        {-0.11, 0.03, 0.12},  // 20 FootRight
        {0.00, 1.50, 0.00},   // 21 SpineShoulder
        {0.26, 0.79, 0.00},   // 22 HandTipLeft
        {0.21, 0.84, 0.03},   // 23 ThumbLeft
        {-0.26, 0.79, 0.00},  // 24 HandTipRight
        {-0.21, 0.84, 0.03},  // 25 ThumbRight
    };
    return frame;
}

SkeletonSequence make_synthetic_sequence(int label, int frames, std::uint64_t seed, double noise) {
    if (frames < 1) throw Error("synthetic sequence needs at least one frame");
    const SkeletonTopology& topo = body_topology();
    SplitMix64 rng(seed);

    // Class-dependent gait parameters plus a little per-sequence variation.
    const double frequency = (0.8 + 0.25 * (label % 4)) * (0.95 + 0.1 * rng.uniform());
    const double arm_amp = (0.25 + 0.08 * (label % 3)) * (0.9 + 0.2 * rng.uniform());
    const double leg_amp = 0.5 * arm_amp;
    const double head_amp = 0.06 + 0.02 * (label % 2);
    const double phase0 = 2.0 * M_PI * rng.uniform();

    SkeletonSequence seq;
    seq.label = label;
    seq.meta["subject"] = "synthetic";
    seq.frames.reserve(static_cast<std::size_t>(frames));

    for (int t = 0; t < frames; ++t) {
        const double phase = phase0 + 2.0 * M_PI * frequency * t / 30.0;  // 30 fps
        SkeletonFrame frame = reference_pose();

        // Opposite-phase arm and leg swings about the lateral axis keep the
        // motion walk-like; all swings are rigid, so bone lengths stay exact.
        swing(frame, topo, 5, 6, Vec3::UnitX(), arm_amp * std::sin(phase));
        swing(frame, topo, 9, 10, Vec3::UnitX(), -arm_amp * std::sin(phase));
        swing(frame, topo, 13, 14, Vec3::UnitX(), -leg_amp * std::sin(phase));
        swing(frame, topo, 17, 18, Vec3::UnitX(), leg_amp * std::sin(phase));
        swing(frame, topo, 3, 4, Vec3::UnitX(), head_amp * std::sin(phase * 0.5));

        const Vec3 sway(0.01 * std::sin(phase * 0.5), 0.005 * std::sin(phase),
                        0.004 * std::cos(phase * 0.5));
        for (Vec3& p : frame.positions) p += sway;

        if (noise > 0.0)
            for (Vec3& p : frame.positions)
                p += noise * Vec3(rng.gaussian(), rng.gaussian(), rng.gaussian());

        seq.frames.push_back(std::move(frame));
    }
    return seq;
}

Dataset make_synthetic_dataset(const SynthConfig& cfg) {
    if (cfg.sequences < 1 || cfg.classes < 1) throw Error("synthetic dataset needs n >= 1, classes >= 1");
    Dataset dataset;
    dataset.sequences.reserve(static_cast<std::size_t>(cfg.sequences));
    dataset.manifest.reserve(static_cast<std::size_t>(cfg.sequences));
    SplitMix64 seed_stream(cfg.seed);
    for (int i = 0; i < cfg.sequences; ++i) {
        const int label = i % cfg.classes;
        dataset.sequences.push_back(
            make_synthetic_sequence(label, cfg.frames, seed_stream.next(), cfg.noise));

        char name[32];
        std::snprintf(name, sizeof(name), "seq_%05d", i);
        ManifestRecord record;
        record.id = name;
        record.path = std::string(name) + ".skseq";
        record.label = label;
        dataset.manifest.push_back(std::move(record));
        dataset.sequences.back().meta["id"] = name;
    }
    return dataset;
}

}  // namespace skelbd
