#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <vector>

#include "skelbd/enhance.hpp"
#include "skelbd/ik.hpp"
#include "skelbd/skeleton.hpp"
#include "skelbd/trigger.hpp"

namespace skelbd {

enum class PoisonMode { PoisonLabel, CleanLabel };

/// Clean-label perturbation settings (surrogate + PGD).
struct EnhanceConfig {
    double epsilon = 0.05;  // meters, L2 budget on the joint displacement
    int steps = 5;
    int t_d = 16;
    int epochs = 200;
    double lr = 0.1;
};

struct PoisonPolicy {
    PoisonMode mode = PoisonMode::PoisonLabel;
    int target_class = 0;
    double ratio = 0.0;  // fraction of the selection base in [0, 1]
    TriggerActionSpec trigger;
    std::uint64_t master_seed = 0;
    bool enhance = false;  // clean-label only
    EnhanceConfig enhance_cfg;
};

struct PoisonedSample {
    std::size_t index = 0;
    std::string id;
    int original_label = -1;
    TriggerInstance instance;
};

struct PoisonReport {
    std::vector<std::size_t> poisoned_indices;
    std::vector<PoisonedSample> samples;
    std::map<int, int> class_counts;  // labels of the output dataset
    std::vector<std::string> warnings;
};

/// round(ratio * base) half away from zero, at least 1 whenever the ratio is
/// positive and the base non-empty, never more than the base.
std::size_t poison_count(double ratio, std::size_t base);

/// Uniform draw without replacement from the whole dataset (poison-label
/// selection base). Deterministic for a seed, and prefixes are nested as the
/// ratio grows. Returned indices are sorted.
std::vector<std::size_t> select_poison_label(const Dataset& dataset, const PoisonPolicy& policy);

/// Same, restricted to sequences whose label is the target class.
std::vector<std::size_t> select_clean_label(const Dataset& dataset, const PoisonPolicy& policy);

/// Builds the poisoned training set: every selected sequence gets one freshly
/// sampled trigger instance (seeded master_seed XOR index), poison-label mode
/// relabels it to the target class, clean-label mode keeps the label and
/// optionally pipes it through the PGD enhancer (surrogate trained on the
/// input dataset). Unselected sequences are copied bit-identically. Injection
/// runs data-parallel over the selected sequences; per-sequence failures are
/// collected as report warnings rather than aborting the batch.
std::pair<Dataset, PoisonReport> build_poisoned_dataset(const Dataset& dataset,
                                                        const PoisonPolicy& policy,
                                                        const IkConfig& ik_cfg, int threads = 1);

/// Tab-separated report: one row per poisoned sequence plus `#` summary lines.
void write_report(const PoisonReport& report, std::ostream& out);

}  // namespace skelbd
