#include "skelbd/poison.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "skelbd/parallel.hpp"
#include "skelbd/rng.hpp"

namespace skelbd {
namespace {

void check_policy(const PoisonPolicy& policy) {
    if (!(policy.ratio >= 0.0 && policy.ratio <= 1.0))
        throw Error("poison ratio must lie in [0, 1]");
    if (policy.enhance && policy.mode != PoisonMode::CleanLabel)
        throw Error("enhancement applies to clean-label poisoning only");
    if (policy.target_class < 0) throw Error("target class must be non-negative");
}

std::vector<std::size_t> draw_prefix(std::vector<std::size_t> pool, double ratio,
                                     std::uint64_t seed) {
    const std::size_t count = poison_count(ratio, pool.size());
    SplitMix64 rng(seed);
    shuffle(pool, rng);
    pool.resize(count);
    std::sort(pool.begin(), pool.end());
    return pool;
}

}  // namespace

std::size_t poison_count(double ratio, std::size_t base) {
    if (base == 0 || ratio <= 0.0) return 0;
    std::size_t count = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(base) + 0.5));
    if (count == 0) count = 1;  // a positive ratio must poison something
    return std::min(count, base);
}

std::vector<std::size_t> select_poison_label(const Dataset& dataset, const PoisonPolicy& policy) {
    check_policy(policy);
    if (policy.mode != PoisonMode::PoisonLabel) throw Error("policy mode is not poison-label");
    if (dataset.sequences.empty()) throw EmptyDataset("cannot poison an empty dataset");
    std::vector<std::size_t> pool(dataset.sequences.size());
    for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = i;
    return draw_prefix(std::move(pool), policy.ratio, policy.master_seed);
}

std::vector<std::size_t> select_clean_label(const Dataset& dataset, const PoisonPolicy& policy) {
    check_policy(policy);
    if (policy.mode != PoisonMode::CleanLabel) throw Error("policy mode is not clean-label");
    if (dataset.sequences.empty()) throw EmptyDataset("cannot poison an empty dataset");
    std::vector<std::size_t> pool;
    for (std::size_t i = 0; i < dataset.sequences.size(); ++i)
        if (dataset.sequences[i].label == policy.target_class) pool.push_back(i);
    if (pool.empty())
        throw TargetClassEmpty("no sequences with target class " +
                               std::to_string(policy.target_class));
    return draw_prefix(std::move(pool), policy.ratio, policy.master_seed);
}

std::pair<Dataset, PoisonReport> build_poisoned_dataset(const Dataset& dataset,
                                                        const PoisonPolicy& policy,
                                                        const IkConfig& ik_cfg, int threads) {
    check_policy(policy);
    if (dataset.manifest.size() != dataset.sequences.size())
        throw Error("manifest length does not match sequence count");

    const std::vector<std::size_t> selected = policy.mode == PoisonMode::PoisonLabel
                                                  ? select_poison_label(dataset, policy)
                                                  : select_clean_label(dataset, policy);

    SurrogateModel surrogate;
    const SkeletonTopology topo = default_topology();
    if (policy.enhance && !selected.empty()) {
        int num_classes = 0;
        for (const SkeletonSequence& seq : dataset.sequences)
            num_classes = std::max(num_classes, seq.label + 1);
        surrogate = train_surrogate(dataset, num_classes, policy.enhance_cfg.epochs,
                                    policy.enhance_cfg.lr, policy.master_seed,
                                    policy.enhance_cfg.t_d);
    }

    Dataset out = dataset;
    struct Slot {
        SkeletonSequence sequence;
        PoisonedSample sample;
        std::vector<std::string> warnings;
        bool ok = false;
    };
    std::vector<Slot> slots(selected.size());

    parallel_for(selected.size(), threads, [&](std::size_t k) {
        const std::size_t index = selected[k];
        Slot& slot = slots[k];
        const SkeletonSequence& original = dataset.sequences[index];
        slot.sample.index = index;
        slot.sample.id = dataset.manifest[index].id;
        slot.sample.original_label = original.label;
        try {
            const std::uint64_t seed = policy.master_seed ^ static_cast<std::uint64_t>(index);
            const TriggerInstance instance =
                sample_trigger_instance(policy.trigger, original.frame_count(), seed);
            slot.sample.instance = instance;
            SkeletonSequence poisoned =
                inject_trigger(original, instance, ik_cfg, &slot.warnings);
            if (policy.mode == PoisonMode::PoisonLabel) poisoned.label = policy.target_class;
            if (policy.enhance)
                poisoned = pgd_enhance(surrogate, poisoned, policy.target_class,
                                       policy.enhance_cfg.epsilon, policy.enhance_cfg.steps, topo);
            slot.sequence = std::move(poisoned);
            slot.ok = true;
        } catch (const std::exception& e) {
            slot.warnings.push_back("sequence " + slot.sample.id + ": " + e.what());
        }
    });

    PoisonReport report;
    for (Slot& slot : slots) {
        report.warnings.insert(report.warnings.end(), slot.warnings.begin(), slot.warnings.end());
        if (!slot.ok) continue;
        const std::size_t index = slot.sample.index;
        out.sequences[index] = std::move(slot.sequence);
        out.manifest[index].label = out.sequences[index].label;
        out.manifest[index].poisoned = true;
        out.manifest[index].trigger = policy.trigger.name;
        report.poisoned_indices.push_back(index);
        report.samples.push_back(std::move(slot.sample));
    }
    for (const SkeletonSequence& seq : out.sequences) ++report.class_counts[seq.label];
    return {std::move(out), std::move(report)};
}

void write_report(const PoisonReport& report, std::ostream& out) {
    out << "# id\toriginal_label\ttrigger\tphi\ttau_s\ttau_e\tseed\n";
    for (const PoisonedSample& s : report.samples) {
        out << s.id << '\t' << s.original_label << '\t' << s.instance.spec.name << '\t'
            << s.instance.phi << '\t' << s.instance.tau_s << '\t' << s.instance.tau_e << '\t'
            << s.instance.seed << "\n";
    }
    out << "# poisoned\t" << report.poisoned_indices.size() << "\n";
    out << "# class_counts";
    for (const auto& [label, count] : report.class_counts) out << '\t' << label << ':' << count;
    out << "\n";
    out << "# warnings\t" << report.warnings.size() << "\n";
    for (const std::string& w : report.warnings) out << "# warning\t" << w << "\n";
}

}  // namespace skelbd
