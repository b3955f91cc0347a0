#pragma once

#include <Eigen/Core>
#include <cmath>
#include <iosfwd>
#include <limits>
#include <vector>

#include "skelbd/skeleton.hpp"
#include "skelbd/trigger.hpp"

namespace skelbd {

/// Probability histogram of adjacent-bone angles over uniform bins on [0, pi].
struct AngleHistogram {
    int bin_count = 0;
    Eigen::VectorXd masses;  // sums to 1

    double bin_width() const { return M_PI / bin_count; }
};

/// Interior angles along a joint path, one per frame and interior joint:
/// the angle between the incoming and outgoing bone directions, so 0 means a
/// straight continuation and pi a full fold-back. Consecutive path joints
/// must share a bone (parent-child in either direction). Paths with fewer
/// than two bones yield no angles; bones of zero length are skipped and
/// counted into `skipped` when given.
std::vector<double> adjacent_bone_angles(const SkeletonSequence& seq, const SkeletonTopology& topo,
                                         const std::vector<JointId>& path,
                                         std::size_t* skipped = nullptr);

/// Uniform binning on [0, pi] with 1e-9 additive smoothing per bin before
/// normalization, which keeps the KL divergence finite when a bin is empty.
/// Throws EmptyAngles when there is nothing to bin.
AngleHistogram histogram(const std::vector<double>& angles, int bin_count);

/// Kullback-Leibler divergence sum_b P(b) ln(P(b)/Q(b)), in nats.
double kld(const AngleHistogram& p, const AngleHistogram& q);

/// 1-D optimal transport cost: bin_width * sum_b |CDF_P(b) - CDF_Q(b)|,
/// in radians.
double emd(const AngleHistogram& p, const AngleHistogram& q);

struct StealthReport {
    std::string trigger;
    double ratio = std::numeric_limits<double>::quiet_NaN();  // echoed by the caller when known
    double kld_nats = 0.0;
    double emd_radians = 0.0;
    std::size_t clean_angle_count = 0;
    std::size_t poisoned_angle_count = 0;
};

/// Pools adjacent-bone angles over each dataset on the trigger's metric
/// paths and compares the two distributions: kld is D(poisoned || clean).
/// The pooled histograms are exposed through the optional out-parameters.
/// Angle extraction runs on `threads` workers with a deterministic merge.
StealthReport stealth_report(const Dataset& clean, const Dataset& poisoned,
                             const TriggerActionSpec& spec, int bin_count,
                             AngleHistogram* clean_hist = nullptr,
                             AngleHistogram* poisoned_hist = nullptr, int threads = 1);

/// Header line plus one row: trigger, ratio, kld, emd and the sample counts,
/// tab-separated.
void write_report(const StealthReport& report, std::ostream& out);

/// Per-bin dump for external plotting: bin center, clean mass, poisoned mass.
void write_histograms(const AngleHistogram& clean, const AngleHistogram& poisoned,
                      std::ostream& out);

}  // namespace skelbd
