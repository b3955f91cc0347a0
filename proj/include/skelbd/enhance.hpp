#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>

#include "skelbd/skeleton.hpp"

namespace skelbd {

/// Linear softmax classifier over root-centered, temporally downsampled joint
/// coordinates. Deliberately small and exactly differentiable; it stands in
/// for a full action-recognition network when generating clean-label
/// perturbations.
struct SurrogateModel {
    Eigen::MatrixXd weights;  // classes x feature_dim
    Eigen::VectorXd bias;     // classes
    int t_d = 16;             // downsampled frame count
    int joints = 25;

    int classes() const { return static_cast<int>(bias.size()); }
    int feature_dim() const { return t_d * joints * 3; }
};

/// Nearest-frame resampling to t_d frames, root-centered per frame (joint 1
/// subtracted), flattened frame-major then joint-major then x/y/z.
Eigen::VectorXd featurize(const SkeletonSequence& seq, int t_d);

/// Index of the source frame for each downsampled slot.
std::vector<int> resample_indices(int frame_count, int t_d);

/// Full-batch gradient descent on the softmax cross-entropy. Weights start
/// near zero (1e-8 seeded Gaussian), so the convex objective gives the same
/// optimum for any seed; epochs = 0 returns the near-uniform initial model.
SurrogateModel train_surrogate(const Dataset& data, int num_classes, int epochs, double lr,
                               std::uint64_t seed, int t_d = 16);

struct LossGrad {
    double loss = 0.0;
    /// d loss / d joint coordinate over the whole sequence, laid out
    /// frame-major, joint-major, x/y/z (frames the resampling drops get
    /// exact zeros).
    Eigen::VectorXd grad;
};

LossGrad loss_and_grad(const SurrogateModel& model, const SkeletonSequence& seq, int label);
double surrogate_loss(const SurrogateModel& model, const SkeletonSequence& seq, int label);

/// Training accuracy of the model on a dataset; handy for sanity checks.
double surrogate_accuracy(const SurrogateModel& model, const Dataset& data);

/// Untargeted PGD in bone-length space: each step projects the coordinate
/// gradient onto per-bone radial scalings (a scaled bone translates its whole
/// subtree), takes a sign-ascent step of epsilon/steps in scale space, and
/// projects the cumulative joint displacement back onto the L2 ball of radius
/// epsilon. Bone directions never change, so every adjacent-bone angle is
/// preserved; the surrogate loss never decreases (steps that would lower it
/// are shrunk or skipped).
SkeletonSequence pgd_enhance(const SurrogateModel& model, const SkeletonSequence& seq,
                             int target_class, double epsilon, int steps,
                             const SkeletonTopology& topo);

/// Text serialization: `SURR 1 classes=<C> td=<T_d> joints=<J>`, one weight
/// row per line, then the bias line, all at 17 significant digits.
void save_surrogate(const SurrogateModel& model, const std::string& path);
SurrogateModel load_surrogate(const std::string& path);

}  // namespace skelbd
