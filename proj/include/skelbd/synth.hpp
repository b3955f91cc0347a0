#pragma once

#include <cstdint>

#include "skelbd/skeleton.hpp"

namespace skelbd {

struct SynthConfig {
    int sequences = 10;
    int frames = 60;
    int classes = 3;
    std::uint64_t seed = 0;
    double noise = 0.002;  // meters, per-joint Gaussian
};

/// Standing 25-joint template pose (meters, y up, facing +z).
SkeletonFrame reference_pose();

/// One synthetic standing/locomotion sequence: class-dependent sinusoidal
/// limb swings (rigid rotations of the arm, leg and head subtrees), a small
/// whole-body sway, then per-joint sensor noise. Deterministic for a seed.
SkeletonSequence make_synthetic_sequence(int label, int frames, std::uint64_t seed, double noise);

/// Labeled dataset of such sequences (labels round-robin over the classes)
/// with manifest ids seq_00000, seq_00001, ...
Dataset make_synthetic_dataset(const SynthConfig& cfg);

}  // namespace skelbd
