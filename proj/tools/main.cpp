#include <CLI11.hpp>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <thread>

#include "skelbd/formats.hpp"
#include "skelbd/metrics.hpp"
#include "skelbd/parallel.hpp"
#include "skelbd/poison.hpp"
#include "skelbd/synth.hpp"
#include "skelbd/trigger.hpp"

namespace {

using namespace skelbd;

int default_threads() {
    const unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : static_cast<int>(n);
}

const char* finding_kind_name(FindingKind kind) {
    switch (kind) {
        case FindingKind::NonFinite: return "non_finite";
        case FindingKind::ZeroLengthBone: return "zero_length_bone";
        case FindingKind::JointCountMismatch: return "joint_count_mismatch";
        case FindingKind::EmptySequence: return "empty_sequence";
    }
    return "unknown";
}

struct TriggerOverrides {
    double phi_min = -1, phi_max = -1, apex_fraction = -1;
    int duration_min = -1, duration_max = -1;

    TriggerActionSpec resolve(const std::string& name) const {
        TriggerActionSpec spec = builtin_trigger(name);
        if (phi_min >= 0) spec.phi_min = phi_min;
        if (phi_max >= 0) spec.phi_max = phi_max;
        if (duration_min >= 0) spec.duration_min = duration_min;
        if (duration_max >= 0) spec.duration_max = duration_max;
        if (apex_fraction >= 0) spec.apex_fraction = apex_fraction;
        return spec;
    }
};

void add_trigger_options(CLI::App* cmd, std::string& name, TriggerOverrides& ovr) {
    cmd->add_option("--trigger", name, "trigger action: nodding, bending_sideways, crossing_hands")
        ->required();
    cmd->add_option("--phi-min", ovr.phi_min, "amplitude lower bound (rad, or m for crossing)");
    cmd->add_option("--phi-max", ovr.phi_max, "amplitude upper bound");
    cmd->add_option("--duration-min", ovr.duration_min, "shortest trigger window (frames)");
    cmd->add_option("--duration-max", ovr.duration_max, "longest trigger window (frames)");
    cmd->add_option("--apex-fraction", ovr.apex_fraction, "position of the apex inside the window");
}

void add_ik_options(CLI::App* cmd, IkConfig& ik) {
    cmd->add_option("--ik-lambda", ik.learning_rate, "IK learning rate");
    cmd->add_option("--ik-tolerance", ik.tolerance, "IK stop tolerance (m)");
    cmd->add_option("--ik-max-iter", ik.max_iterations, "IK iteration budget");
    cmd->add_option("--ik-step", ik.jacobian_step, "Jacobian finite-difference step (rad)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"skelbd - skeleton sequence backdoor poisoning toolkit"};
    app.require_subcommand(1);
    app.fallthrough();  // top-level flags like --config may follow the subcommand
    app.set_config("--config", "", "key=value config file; command-line flags take precedence");

    // ---- synth ----
    auto* synth = app.add_subcommand("synth", "generate a synthetic labeled dataset");
    synth->configurable();
    SynthConfig synth_cfg;
    std::string synth_out;
    synth->add_option("--out", synth_out, "output dataset directory")->required();
    synth->add_option("--n", synth_cfg.sequences, "number of sequences");
    synth->add_option("--frames", synth_cfg.frames, "frames per sequence");
    synth->add_option("--classes", synth_cfg.classes, "number of classes");
    synth->add_option("--seed", synth_cfg.seed, "master seed");
    synth->add_option("--noise", synth_cfg.noise, "per-joint sensor noise (m)");
    const std::function<void()> run_synth = [&] {
        const Dataset data = make_synthetic_dataset(synth_cfg);
        save_dataset(data, synth_out);
        std::cout << "synth\t" << data.size() << "\t" << synth_out << "\n";
    };

    // ---- inject ----
    auto* inject = app.add_subcommand("inject", "implant a trigger into every sequence");
    inject->configurable();
    std::string inject_in, inject_out, inject_trigger_name;
    TriggerOverrides inject_ovr;
    IkConfig inject_ik;
    std::uint64_t inject_seed = 0;
    int inject_threads = default_threads();
    inject->add_option("--in", inject_in, "input dataset directory")->required();
    inject->add_option("--out", inject_out, "output dataset directory")->required();
    add_trigger_options(inject, inject_trigger_name, inject_ovr);
    add_ik_options(inject, inject_ik);
    inject->add_option("--seed", inject_seed, "master seed");
    inject->add_option("--threads", inject_threads, "worker threads");
    const std::function<void()> run_inject = [&] {
        const TriggerActionSpec spec = inject_ovr.resolve(inject_trigger_name);
        Dataset data = load_dataset(inject_in);
        std::vector<std::vector<std::string>> warnings(data.size());
        parallel_for(data.size(), inject_threads, [&](std::size_t i) {
            const TriggerInstance inst = sample_trigger_instance(
                spec, data.sequences[i].frame_count(),
                inject_seed ^ static_cast<std::uint64_t>(i));
            data.sequences[i] = inject_trigger(data.sequences[i], inst, inject_ik, &warnings[i]);
            data.manifest[i].poisoned = true;
            data.manifest[i].trigger = spec.name;
        });
        save_dataset(data, inject_out);
        std::size_t warning_count = 0;
        for (const auto& w : warnings) {
            warning_count += w.size();
            for (const std::string& msg : w) std::cerr << "warning: " << msg << "\n";
        }
        std::cout << "inject\t" << spec.name << "\t" << data.size() << "\t" << warning_count
                  << "\n";
    };

    // ---- poison ----
    auto* poison = app.add_subcommand("poison", "build a poisoned training dataset");
    poison->configurable();
    std::string poison_in, poison_out, poison_trigger_name, poison_mode = "poison-label";
    TriggerOverrides poison_ovr;
    IkConfig poison_ik;
    PoisonPolicy policy;
    int poison_threads = default_threads();
    poison->add_option("--in", poison_in, "input dataset directory")->required();
    poison->add_option("--out", poison_out, "output dataset directory")->required();
    add_trigger_options(poison, poison_trigger_name, poison_ovr);
    add_ik_options(poison, poison_ik);
    poison->add_option("--mode", poison_mode, "poison-label or clean-label")
        ->check(CLI::IsMember({"poison-label", "clean-label"}));
    poison->add_option("--ratio", policy.ratio, "poisoning ratio in [0, 1]")->required();
    poison->add_option("--target", policy.target_class, "target class");
    poison->add_option("--seed", policy.master_seed, "master seed");
    poison->add_flag("--enhance", policy.enhance, "apply PGD enhancement (clean-label only)");
    poison->add_option("--epsilon", policy.enhance_cfg.epsilon, "PGD displacement budget (m)");
    poison->add_option("--steps", policy.enhance_cfg.steps, "PGD steps");
    poison->add_option("--td", policy.enhance_cfg.t_d, "surrogate downsampled frame count");
    poison->add_option("--epochs", policy.enhance_cfg.epochs, "surrogate training epochs");
    poison->add_option("--lr", policy.enhance_cfg.lr, "surrogate learning rate");
    poison->add_option("--threads", poison_threads, "worker threads");
    const std::function<void()> run_poison = [&] {
        policy.mode =
            poison_mode == "clean-label" ? PoisonMode::CleanLabel : PoisonMode::PoisonLabel;
        policy.trigger = poison_ovr.resolve(poison_trigger_name);
        const Dataset data = load_dataset(poison_in);
        auto [poisoned, report] = build_poisoned_dataset(data, policy, poison_ik, poison_threads);
        save_dataset(poisoned, poison_out);
        write_report(report, std::cout);
    };

    // ---- enhance ----
    auto* enhance = app.add_subcommand(
        "enhance", "apply PGD perturbations to the poisoned sequences of a dataset");
    enhance->configurable();
    std::string enhance_in, enhance_out, surrogate_in, surrogate_out;
    EnhanceConfig enhance_cfg;
    int enhance_target = 0, enhance_threads = default_threads();
    std::uint64_t enhance_seed = 0;
    enhance->add_option("--in", enhance_in, "input dataset directory")->required();
    enhance->add_option("--out", enhance_out, "output dataset directory")->required();
    enhance->add_option("--target", enhance_target, "target class")->required();
    enhance->add_option("--epsilon", enhance_cfg.epsilon, "PGD displacement budget (m)");
    enhance->add_option("--steps", enhance_cfg.steps, "PGD steps");
    enhance->add_option("--td", enhance_cfg.t_d, "surrogate downsampled frame count");
    enhance->add_option("--epochs", enhance_cfg.epochs, "surrogate training epochs");
    enhance->add_option("--lr", enhance_cfg.lr, "surrogate learning rate");
    enhance->add_option("--seed", enhance_seed, "surrogate init seed");
    enhance->add_option("--surrogate-in", surrogate_in, "load a surrogate instead of training");
    enhance->add_option("--surrogate-out", surrogate_out, "save the surrogate used");
    enhance->add_option("--threads", enhance_threads, "worker threads");
    const std::function<void()> run_enhance = [&] {
        Dataset data = load_dataset(enhance_in);
        SurrogateModel model;
        if (!surrogate_in.empty()) {
            model = load_surrogate(surrogate_in);
        } else {
            // Train on the clean part of the dataset only.
            Dataset clean;
            for (std::size_t i = 0; i < data.size(); ++i) {
                if (data.manifest[i].poisoned) continue;
                clean.sequences.push_back(data.sequences[i]);
                clean.manifest.push_back(data.manifest[i]);
            }
            if (clean.sequences.empty()) throw EmptyDataset("no clean sequences to train on");
            int classes = 0;
            for (const SkeletonSequence& s : clean.sequences) classes = std::max(classes, s.label + 1);
            model = train_surrogate(clean, classes, enhance_cfg.epochs, enhance_cfg.lr,
                                    enhance_seed, enhance_cfg.t_d);
        }
        if (!surrogate_out.empty()) save_surrogate(model, surrogate_out);

        const SkeletonTopology topo = default_topology();
        std::vector<std::size_t> targets;
        for (std::size_t i = 0; i < data.size(); ++i)
            if (data.manifest[i].poisoned) targets.push_back(i);
        parallel_for(targets.size(), enhance_threads, [&](std::size_t k) {
            const std::size_t i = targets[k];
            data.sequences[i] = pgd_enhance(model, data.sequences[i], enhance_target,
                                            enhance_cfg.epsilon, enhance_cfg.steps, topo);
        });
        save_dataset(data, enhance_out);
        std::cout << "enhance\t" << targets.size() << "\t" << enhance_out << "\n";
    };

    // ---- metrics ----
    auto* metrics = app.add_subcommand("metrics", "stealth metrics between two datasets");
    metrics->configurable();
    std::string metrics_clean, metrics_poisoned, metrics_trigger_name, dump_hist;
    TriggerOverrides metrics_ovr;
    int bin_count = 64;
    int metrics_threads = default_threads();
    double metrics_ratio = std::numeric_limits<double>::quiet_NaN();
    metrics->add_option("--clean", metrics_clean, "clean dataset directory")->required();
    metrics->add_option("--poisoned", metrics_poisoned, "poisoned dataset directory")->required();
    add_trigger_options(metrics, metrics_trigger_name, metrics_ovr);
    metrics->add_option("--bins", bin_count, "histogram bin count");
    metrics->add_option("--ratio", metrics_ratio, "poisoning ratio echoed into the report");
    metrics->add_option("--dump-hist", dump_hist, "write per-bin histogram masses to this file");
    metrics->add_option("--threads", metrics_threads, "worker threads");
    const std::function<void()> run_metrics = [&] {
        const TriggerActionSpec spec = metrics_ovr.resolve(metrics_trigger_name);
        const Dataset clean = load_dataset(metrics_clean);
        const Dataset poisoned = load_dataset(metrics_poisoned);
        AngleHistogram clean_hist, poisoned_hist;
        StealthReport report = stealth_report(clean, poisoned, spec, bin_count, &clean_hist,
                                              &poisoned_hist, metrics_threads);
        report.ratio = metrics_ratio;
        write_report(report, std::cout);
        if (!dump_hist.empty()) {
            std::ofstream out(dump_hist, std::ios::binary);
            if (!out) throw IoError("cannot open for writing: " + dump_hist);
            write_histograms(clean_hist, poisoned_hist, out);
        }
    };

    // ---- validate ----
    auto* validate = app.add_subcommand("validate", "structural checks over a dataset");
    validate->configurable();
    std::string validate_in;
    bool validate_failed = false;
    validate->add_option("--in", validate_in, "dataset directory")->required();
    const std::function<void()> run_validate = [&] {
        const Dataset data = load_dataset(validate_in);
        const SkeletonTopology topo = default_topology();
        std::size_t total = 0;
        for (std::size_t i = 0; i < data.size(); ++i) {
            for (const Finding& f : validate_sequence(data.sequences[i], topo)) {
                std::cout << data.manifest[i].id << '\t' << f.frame << '\t' << f.joint << '\t'
                          << finding_kind_name(f.kind) << '\t' << f.message << "\n";
                ++total;
            }
        }
        std::cout << "# findings\t" << total << "\n";
        validate_failed = total > 0;
    };

    try {
        app.parse(argc, argv);
        // Dispatch exactly once on the subcommand named on the command line
        // (configurable subcommands can also be activated by config sections).
        if (synth->parsed()) run_synth();
        else if (inject->parsed()) run_inject();
        else if (poison->parsed()) run_poison();
        else if (enhance->parsed()) run_enhance();
        else if (metrics->parsed()) run_metrics();
        else if (validate->parsed()) run_validate();
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;  // help exits cleanly, usage errors exit 2
    } catch (const UnknownTrigger& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return validate_failed ? 1 : 0;
}
