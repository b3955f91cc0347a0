// Acceptance suite: one line per criterion, nonzero exit if any fail.
// Runs the full battery on synthetic data; expected wall time well under two
// minutes on a laptop.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "skelbd/enhance.hpp"
#include "skelbd/formats.hpp"
#include "skelbd/ik.hpp"
#include "skelbd/metrics.hpp"
#include "skelbd/poison.hpp"
#include "skelbd/rng.hpp"
#include "skelbd/synth.hpp"
#include "skelbd/trigger.hpp"

using namespace skelbd;
namespace fs = std::filesystem;

namespace {

struct Check {
    bool ok = true;
    std::string detail;

    void fail(const std::string& why) {
        if (ok) detail = why;
        ok = false;
    }
    void require(bool condition, const std::string& why) {
        if (!condition) fail(why);
    }
};

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

const SkeletonTopology& topo() {
    static const SkeletonTopology t = default_topology();
    return t;
}

Vec3 random_direction(SplitMix64& rng) {
    Vec3 v(rng.gaussian(), rng.gaussian(), rng.gaussian());
    while (v.norm() < 1e-6) v = Vec3(rng.gaussian(), rng.gaussian(), rng.gaussian());
    return v.normalized();
}

Quaternion random_unit_quaternion(SplitMix64& rng) {
    Quaternion q{rng.gaussian(), rng.gaussian(), rng.gaussian(), rng.gaussian()};
    return q.normalized();
}

bool frames_identical(const SkeletonFrame& a, const SkeletonFrame& b) {
    for (int j = 1; j <= 25; ++j)
        if (a.at(j) != b.at(j)) return false;
    return true;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream body;
    body << in.rdbuf();
    return body.str();
}

bool dataset_dirs_identical(const fs::path& a, const fs::path& b) {
    if (slurp(a / "manifest.tsv") != slurp(b / "manifest.tsv")) return false;
    for (const ManifestRecord& record : load_manifest((a / "manifest.tsv").string()))
        if (slurp(a / record.path) != slurp(b / record.path)) return false;
    return true;
}

// ---------------------------------------------------------------------------
// 1. Kinematic soundness of 1000 random injections, single-threaded.
Check criterion_kinematic_soundness(double* elapsed) {
    Check check;
    const auto start = std::chrono::steady_clock::now();
    const std::vector<std::string> names{"nodding", "bending_sideways", "crossing_hands"};
    SplitMix64 rng(1001);

    // A pool of synthetic sequences, reused round-robin.
    std::vector<SkeletonSequence> pool;
    for (int i = 0; i < 50; ++i)
        pool.push_back(make_synthetic_sequence(i % 5, 60, rng.next(), 0.002));

    for (int run = 0; run < 1000 && check.ok; ++run) {
        const SkeletonSequence& seq = pool[static_cast<std::size_t>(run) % pool.size()];
        const TriggerActionSpec spec = builtin_trigger(names[static_cast<std::size_t>(run) % 3]);
        const TriggerInstance inst = sample_trigger_instance(spec, 60, rng.next());
        const SkeletonSequence out = inject_trigger(seq, inst, IkConfig{});

        for (int t = 0; t < 60 && check.ok; ++t) {
            if (t < inst.tau_s || t > inst.tau_e) {
                check.require(frames_identical(out.frames[t], seq.frames[t]),
                              "frame outside the window changed (run " + std::to_string(run) +
                                  ", frame " + std::to_string(t) + ")");
                continue;
            }
            for (JointId j = 2; j <= 25; ++j) {
                const double before = bone_length(seq.frames[t], topo(), j);
                const double after = bone_length(out.frames[t], topo(), j);
                if (std::abs(after - before) > 1e-6 * before) {
                    check.fail("bone " + std::to_string(j) + " length drifted by " +
                               std::to_string(std::abs(after - before)) + " at run " +
                               std::to_string(run));
                    break;
                }
            }
        }
    }
    *elapsed = seconds_since(start);
    check.require(*elapsed < 30.0,
                  "runtime " + std::to_string(*elapsed) + " s exceeds the 30 s budget");
    return check;
}

// ---------------------------------------------------------------------------
// 2. Rotation validity over 10^4 random unit quaternions.
Check criterion_rotation_validity() {
    Check check;
    SplitMix64 rng(1002);
    for (int i = 0; i < 10000 && check.ok; ++i) {
        const Quaternion q = random_unit_quaternion(rng);
        const Mat3 m = rotation_matrix(q);
        check.require((m.transpose() * m - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-9,
                      "M^T M deviates from the identity");
        const double det = m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
                           m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
                           m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
        check.require(std::abs(det - 1.0) < 1e-9, "det(M) is not 1");

        const Quaternion p = random_unit_quaternion(rng);
        const Mat3 composed = rotation_matrix(quat_multiply(p, q));
        check.require(
            (composed - rotation_matrix(p) * rotation_matrix(q)).cwiseAbs().maxCoeff() < 1e-9,
            "M(qb*qa) != M(qb) M(qa)");
    }
    return check;
}

// ---------------------------------------------------------------------------
// 3. IK against the two-link law-of-cosines oracle plus the Richardson check.
Check criterion_ik_correctness() {
    Check check;
    SkeletonFrame frame;
    frame.positions.assign(25, Vec3(5, 5, 5));
    frame.at(1) = Vec3(0, 0, 0);
    frame.at(2) = Vec3(0, 1, 0);
    frame.at(21) = Vec3(0, 2, 0);
    const std::vector<JointId> chain_joints{1, 2, 21};
    const std::vector<RotationAxes> axes = chain_axes(frame, chain_joints);

    SplitMix64 rng(1003);
    for (int i = 0; i < 100 && check.ok; ++i) {
        const double distance = rng.uniform(0.35, 1.85);
        const Vec3 target = distance * random_direction(rng);
        // The law of cosines certifies the target is reachable: the elbow
        // interior angle acos((l1^2+l2^2-d^2)/(2 l1 l2)) exists for d in
        // [|l1-l2|, l1+l2].
        const double cos_elbow = (2.0 - distance * distance) / 2.0;
        check.require(cos_elbow >= -1.0 && cos_elbow <= 1.0, "oracle rejected a sampled target");

        const IkResult result = solve_ik(frame, topo(), chain_joints, target, axes, IkConfig{});
        check.require(result.converged, "reachable target did not converge");
        const Vec3 reached = key_position(frame, topo(), chain_joints, result.theta, axes);
        check.require((reached - target).norm() <= 1e-3, "key joint missed the target");
    }

    for (int i = 0; i < 10 && check.ok; ++i) {
        const Vec3 target = 3.0 * random_direction(rng);
        const IkResult result = solve_ik(frame, topo(), chain_joints, target, axes, IkConfig{});
        check.require(!result.converged, "unreachable target reported convergence");
        check.require(std::abs(result.residual - 1.0) <= 1e-3,
                      "unreachable residual " + std::to_string(result.residual) +
                          " is not within 1e-3 of distance - reach");
    }

    // Richardson order-2 agreement of the central-difference Jacobian.
    const SkeletonFrame pose = reference_pose();
    const std::vector<JointId> arm = chain(topo(), 5, 8);
    const std::vector<RotationAxes> arm_axes = chain_axes(pose, arm);
    AngleVector theta(6);
    theta << 0.4, -0.3, 0.2, 0.5, -0.6, 0.1;
    const double h = 1e-3;
    const Eigen::MatrixXd j1 = jacobian(pose, topo(), arm, theta, arm_axes, h);
    const Eigen::MatrixXd j2 = jacobian(pose, topo(), arm, theta, arm_axes, h / 2);
    const Eigen::MatrixXd j4 = jacobian(pose, topo(), arm, theta, arm_axes, h / 4);
    const double disagreement =
        (((4.0 * j2 - j1) / 3.0) - ((4.0 * j4 - j2) / 3.0)).cwiseAbs().maxCoeff();
    check.require(disagreement < 1e-8, "Richardson extrapolants disagree by " +
                                           std::to_string(disagreement));
    return check;
}

// ---------------------------------------------------------------------------
// 4. Injection geometry for 100 random bending instances.
Check criterion_injection_geometry() {
    Check check;
    SplitMix64 rng(1004);
    const TriggerActionSpec spec = builtin_trigger("bending_sideways");
    for (int i = 0; i < 100 && check.ok; ++i) {
        const SkeletonSequence seq = make_synthetic_sequence(i % 5, 60, rng.next(), 0.002);
        const TriggerInstance inst = sample_trigger_instance(spec, 60, rng.next());
        const SkeletonSequence out = inject_trigger(seq, inst, IkConfig{});

        const int apex = apex_frame(inst);
        const auto [p_start, p_end] =
            estimate_key_positions(seq.frames[apex], topo(), spec.chains[0], spec, inst.phi);
        const double apex_miss = (out.frames[apex].at(2) - p_end).norm();
        check.require(apex_miss <= 1e-3,
                      "apex missed the estimated target by " + std::to_string(apex_miss));

        const double home_start =
            (out.frames[inst.tau_s].at(2) - seq.frames[inst.tau_s].at(2)).norm();
        const double home_end =
            (out.frames[inst.tau_e].at(2) - seq.frames[inst.tau_e].at(2)).norm();
        check.require(home_start <= 2e-3 && home_end <= 2e-3,
                      "key joint failed to return home (" + std::to_string(home_end) + ")");
    }
    return check;
}

// ---------------------------------------------------------------------------
// 5. Poisoning contracts: counts, labels, determinism, thread independence.
Check criterion_poisoning_contracts(const fs::path& scratch) {
    Check check;
    SynthConfig synth_cfg;
    synth_cfg.sequences = 1000;
    synth_cfg.frames = 60;
    synth_cfg.classes = 3;
    synth_cfg.seed = 1005;
    const Dataset data = make_synthetic_dataset(synth_cfg);

    std::size_t target_class_count = 0;
    for (const SkeletonSequence& seq : data.sequences)
        if (seq.label == 0) ++target_class_count;

    for (double ratio : {0.0, 0.001, 0.01, 0.02, 0.05, 0.3, 0.5, 0.9}) {
        PoisonPolicy policy;
        policy.ratio = ratio;
        policy.trigger = builtin_trigger("bending_sideways");
        policy.master_seed = 9;

        policy.mode = PoisonMode::PoisonLabel;
        check.require(select_poison_label(data, policy).size() == poison_count(ratio, data.size()),
                      "poison-label count wrong at ratio " + std::to_string(ratio));
        policy.mode = PoisonMode::CleanLabel;
        check.require(
            select_clean_label(data, policy).size() == poison_count(ratio, target_class_count),
            "clean-label count wrong at ratio " + std::to_string(ratio));
    }
    // Spot-check the rounding rule itself.
    check.require(poison_count(0.001, 1000) == 1, "round(0.001 * 1000) should be 1");
    check.require(poison_count(0.0015, 1000) == 2, "round half away from zero failed");
    check.require(poison_count(0.001, 100) == 1, "positive ratios must poison at least one");

    PoisonPolicy policy;
    policy.mode = PoisonMode::PoisonLabel;
    policy.ratio = 0.05;
    policy.target_class = 0;
    policy.trigger = builtin_trigger("nodding");
    policy.master_seed = 11;
    const auto [poisoned, report] = build_poisoned_dataset(data, policy, IkConfig{}, 2);
    check.require(report.poisoned_indices.size() == 50, "expected 50 poisoned sequences");
    for (std::size_t index : report.poisoned_indices)
        check.require(poisoned.sequences[index].label == 0, "poison-label did not relabel");

    PoisonPolicy clean_policy = policy;
    clean_policy.mode = PoisonMode::CleanLabel;
    clean_policy.ratio = 0.3;
    const auto [clean_poisoned, clean_report] =
        build_poisoned_dataset(data, clean_policy, IkConfig{}, 2);
    std::multiset<int> before, after;
    for (const SkeletonSequence& seq : data.sequences) before.insert(seq.label);
    for (const SkeletonSequence& seq : clean_poisoned.sequences) after.insert(seq.label);
    check.require(before == after, "clean-label changed the label multiset");
    check.require(clean_report.poisoned_indices.size() == poison_count(0.3, target_class_count),
                  "clean-label count wrong in the built dataset");

    // Determinism: same seed twice and threads 1 vs 4 give identical bytes.
    const auto [run_a, report_a] = build_poisoned_dataset(data, policy, IkConfig{}, 1);
    const auto [run_b, report_b] = build_poisoned_dataset(data, policy, IkConfig{}, 4);
    const fs::path dir_a = scratch / "poison_a";
    const fs::path dir_b = scratch / "poison_b";
    const fs::path dir_c = scratch / "poison_c";
    save_dataset(run_a, dir_a.string());
    save_dataset(run_b, dir_b.string());
    save_dataset(poisoned, dir_c.string());
    check.require(dataset_dirs_identical(dir_a, dir_b), "threads 1 vs 4 bytes differ");
    check.require(dataset_dirs_identical(dir_a, dir_c), "same-seed runs differ");
    return check;
}

// ---------------------------------------------------------------------------
// 6. Enhancement: exact gradients and bone-constrained PGD.
Check criterion_enhancement() {
    Check check;

    // Two classes separated by body scale (scale survives root-centering).
    Dataset data;
    SplitMix64 rng(1006);
    for (int i = 0; i < 40; ++i) {
        const int label = i % 2;
        const double scale = (label == 0 ? 0.7 : 1.4) * (1.0 + 0.03 * rng.uniform());
        SkeletonSequence seq;
        seq.label = label;
        for (int t = 0; t < 10; ++t) {
            SkeletonFrame frame = reference_pose();
            const Vec3 root = frame.at(1);
            for (Vec3& p : frame.positions)
                p = root + scale * (p - root) +
                    0.002 * Vec3(rng.gaussian(), rng.gaussian(), rng.gaussian());
            seq.frames.push_back(std::move(frame));
        }
        data.sequences.push_back(std::move(seq));
        data.manifest.push_back({"s" + std::to_string(i), "", label, false, ""});
    }
    const SurrogateModel model = train_surrogate(data, 2, 150, 0.1, 3, 8);

    // Analytic gradient vs central finite differences on 20 random
    // coordinates of resampled frames.
    SkeletonSequence probe = data.sequences[0];
    const LossGrad lg = loss_and_grad(model, probe, probe.label);
    const std::vector<int> sources = resample_indices(probe.frame_count(), model.t_d);
    int checked = 0;
    while (checked < 20 && check.ok) {
        const int t = sources[static_cast<std::size_t>(rng.below(sources.size()))];
        const int j = static_cast<int>(rng.below(25));
        const int c = static_cast<int>(rng.below(3));
        const double h = 1e-5;
        SkeletonSequence plus = probe, minus = probe;
        plus.frames[t].positions[j][c] += h;
        minus.frames[t].positions[j][c] -= h;
        const double fd = (surrogate_loss(model, plus, probe.label) -
                           surrogate_loss(model, minus, probe.label)) /
                          (2 * h);
        if (std::abs(fd) < 1e-10) continue;
        const Eigen::Index k = (static_cast<Eigen::Index>(t) * 25 + j) * 3 + c;
        check.require(std::abs(lg.grad[k] - fd) / std::abs(fd) < 1e-4,
                      "gradient mismatch vs finite differences");
        ++checked;
    }

    // 5-step PGD at epsilon = 0.05 on a handful of sequences.
    for (int i = 0; i < 6 && check.ok; ++i) {
        const SkeletonSequence& seq = data.sequences[static_cast<std::size_t>(i)];
        const SkeletonSequence out = pgd_enhance(model, seq, seq.label, 0.05, 5, topo());

        check.require(
            surrogate_loss(model, out, seq.label) >= surrogate_loss(model, seq, seq.label),
            "PGD lowered the surrogate loss");

        double displacement2 = 0.0;
        for (int t = 0; t < seq.frame_count(); ++t)
            for (int j = 1; j <= 25; ++j)
                displacement2 += (out.frames[t].at(j) - seq.frames[t].at(j)).squaredNorm();
        check.require(std::sqrt(displacement2) <= 0.05 + 1e-9, "PGD exceeded its L2 budget");

        double worst_angle = 0.0;
        for (int t = 0; t < seq.frame_count(); ++t) {
            for (JointId j = 2; j <= 25; ++j) {
                const Vec3 in_a = seq.frames[t].at(j) - seq.frames[t].at(topo().parent_of(j));
                const Vec3 out_a = out.frames[t].at(j) - out.frames[t].at(topo().parent_of(j));
                for (JointId child : topo().children(j)) {
                    const Vec3 in_b = seq.frames[t].at(child) - seq.frames[t].at(j);
                    const Vec3 out_b = out.frames[t].at(child) - out.frames[t].at(j);
                    const double in_angle = std::acos(std::clamp(
                        in_a.dot(in_b) / (in_a.norm() * in_b.norm()), -1.0, 1.0));
                    const double out_angle = std::acos(std::clamp(
                        out_a.dot(out_b) / (out_a.norm() * out_b.norm()), -1.0, 1.0));
                    worst_angle = std::max(worst_angle, std::abs(out_angle - in_angle));
                }
            }
        }
        check.require(worst_angle < 1e-6, "PGD changed an adjacent-bone angle by " +
                                              std::to_string(worst_angle));
    }
    return check;
}

// ---------------------------------------------------------------------------
// 7. Stealth metrics: fixed values, metric axioms, monotone trend in the
//    poisoning ratio on a 2000-sequence synthetic set.
Check criterion_stealth_metrics(double* elapsed) {
    Check check;
    const auto start = std::chrono::steady_clock::now();

    {
        const AngleHistogram p = histogram({0.1, 2.0}, 2);
        const AngleHistogram q = histogram({0.1, 2.0, 2.0, 2.0}, 2);
        check.require(kld(p, p) < 1e-12, "kld(P,P) not ~0");
        check.require(emd(p, p) == 0.0, "emd(P,P) not 0");
        check.require(std::abs(kld(p, q) - 0.14384) < 1e-5,
                      "two-bin KLD " + std::to_string(kld(p, q)) + " != 0.14384");
    }

    SplitMix64 rng(1007);
    for (int i = 0; i < 100 && check.ok; ++i) {
        auto random_hist = [&rng] {
            std::vector<double> angles;
            const int n = 30 + static_cast<int>(rng.below(100));
            for (int k = 0; k < n; ++k) angles.push_back(rng.uniform(0.0, M_PI));
            return histogram(angles, 32);
        };
        const AngleHistogram a = random_hist(), b = random_hist(), c = random_hist();
        check.require(std::abs(emd(a, b) - emd(b, a)) < 1e-12, "EMD asymmetry");
        check.require(emd(a, c) <= emd(a, b) + emd(b, c) + 1e-9, "EMD triangle inequality");
    }

    SynthConfig synth_cfg;
    synth_cfg.sequences = 2000;
    synth_cfg.frames = 40;
    synth_cfg.classes = 4;
    synth_cfg.seed = 1070;
    const Dataset clean = make_synthetic_dataset(synth_cfg);

    for (const char* name : {"nodding", "bending_sideways", "crossing_hands"}) {
        double last_kld = -1.0, last_emd = -1.0;
        for (double ratio : {0.001, 0.002, 0.005, 0.01, 0.02, 0.05}) {
            PoisonPolicy policy;
            policy.mode = PoisonMode::PoisonLabel;
            policy.ratio = ratio;
            policy.target_class = 0;
            policy.trigger = builtin_trigger(name);
            policy.master_seed = 31;
            const auto [poisoned, report] = build_poisoned_dataset(clean, policy, IkConfig{}, 2);
            const StealthReport stealth = stealth_report(clean, poisoned, policy.trigger, 64);
            if (stealth.kld_nats < last_kld || stealth.emd_radians < last_emd) {
                check.fail(std::string(name) + ": metrics not monotone at ratio " +
                           std::to_string(ratio));
            }
            last_kld = stealth.kld_nats;
            last_emd = stealth.emd_radians;
        }
        check.require(last_kld > 0.0 && last_emd > 0.0,
                      std::string(name) + ": metrics stayed at zero");
    }
    *elapsed = seconds_since(start);
    return check;
}

// ---------------------------------------------------------------------------
// 8. Parsing: canonical round trips and the raw capture-file fixtures.
Check criterion_parsing(const fs::path& scratch) {
    Check check;

    SkeletonSequence seq = make_synthetic_sequence(2, 7, 1008, 0.002);
    const fs::path first = scratch / "roundtrip_a.skseq";
    const fs::path second = scratch / "roundtrip_b.skseq";
    save_canonical(seq, first.string());
    save_canonical(load_canonical(first.string()), second.string());
    check.require(slurp(first) == slurp(second), "canonical round trip is not byte-identical");

    auto fixture = [](int frames, int bodies) {
        std::ostringstream out;
        out << frames << "\n";
        for (int f = 0; f < frames; ++f) {
            out << bodies << "\n";
            for (int b = 0; b < bodies; ++b) {
                out << (1000 + b);
                for (int i = 0; i < 9; ++i) out << " 0";
                out << "\n25\n";
                for (int j = 0; j < 25; ++j) {
                    out << (b + 1) << " " << f << " " << j;
                    for (int i = 0; i < 9; ++i) out << " 0.5";
                    out << "\n";
                }
            }
        }
        return out.str();
    };

    {
        std::istringstream in(fixture(1, 1));
        const auto bodies = parse_ntu_skeleton(in, "S001C001P001R001A009.skeleton");
        check.require(bodies.size() == 1, "1-body fixture: wrong sequence count");
        check.require(bodies[0].frame_count() == 1, "1-body fixture: wrong frame count");
        check.require(bodies[0].label == 8, "1-body fixture: label should be A009 - 1");
        check.require(bodies[0].frames[0].positions[7] == Vec3(1, 0, 7),
                      "1-body fixture: wrong coordinates");
    }
    {
        std::istringstream in(fixture(3, 2));
        const auto bodies = parse_ntu_skeleton(in, "clip.skeleton");
        check.require(bodies.size() == 2, "2-body fixture: wrong sequence count");
        check.require(bodies[0].frame_count() == 3 && bodies[1].frame_count() == 3,
                      "2-body fixture: wrong frame counts");
        check.require(bodies[1].frames[2].positions[0] == Vec3(2, 2, 0),
                      "2-body fixture: wrong coordinates");
    }
    {
        std::string bad = fixture(1, 1);
        bad.erase(bad.rfind(" 0.5"));
        bad += "\n";
        std::istringstream in(bad);
        try {
            parse_ntu_skeleton(in, "x.skeleton");
            check.fail("malformed joint line was accepted");
        } catch (const ParseError& e) {
            check.require(e.line == 29, "wrong line number in the parse error: " +
                                            std::to_string(e.line));
        }
    }
    {
        std::istringstream in("SKSEQ 1 joints=2 frames=3 label=0\n0 0 0\n0 1 0\n");
        try {
            load_canonical(in);
            check.fail("truncated canonical file was accepted");
        } catch (const ParseError& e) {
            check.require(e.line == 4, "wrong truncation line: " + std::to_string(e.line));
        }
    }
    return check;
}

// ---------------------------------------------------------------------------
// 9. Throughput: 1000 sequences, ratio 0.02, four workers, under five seconds.
Check criterion_throughput(double* elapsed) {
    Check check;
    SynthConfig synth_cfg;
    synth_cfg.sequences = 1000;
    synth_cfg.frames = 60;
    synth_cfg.classes = 3;
    synth_cfg.seed = 1009;
    const Dataset data = make_synthetic_dataset(synth_cfg);

    PoisonPolicy policy;
    policy.mode = PoisonMode::PoisonLabel;
    policy.ratio = 0.02;
    policy.trigger = builtin_trigger("crossing_hands");
    policy.master_seed = 5;

    const auto start = std::chrono::steady_clock::now();
    const auto [poisoned, report] = build_poisoned_dataset(data, policy, IkConfig{}, 4);
    *elapsed = seconds_since(start);
    check.require(report.poisoned_indices.size() == 20, "expected 20 poisoned sequences");
    check.require(*elapsed < 5.0,
                  "poisoning took " + std::to_string(*elapsed) + " s, budget is 5 s");
    return check;
}

}  // namespace

int main() {
    const fs::path scratch =
        fs::temp_directory_path() / ("skelbd_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(scratch);

    struct Row {
        int number;
        std::string title;
        Check check;
        double elapsed = -1.0;
    };
    std::vector<Row> rows;

    {
        Row row{1, "kinematic soundness: 1000 injections, bones within 1e-6, window-local", {}, 0};
        row.check = criterion_kinematic_soundness(&row.elapsed);
        rows.push_back(row);
    }
    rows.push_back({2, "rotation validity: 1e4 quaternions, orthogonality/det/composition 1e-9",
                    criterion_rotation_validity(), -1.0});
    rows.push_back({3, "IK correctness: law-of-cosines oracle, max reach, Richardson 1e-8",
                    criterion_ik_correctness(), -1.0});
    rows.push_back({4, "injection geometry: apex within 1e-3, go-and-return within 2e-3",
                    criterion_injection_geometry(), -1.0});
    rows.push_back({5, "poisoning contracts: counts, labels, determinism, threads",
                    criterion_poisoning_contracts(scratch), -1.0});
    rows.push_back({6, "enhancement: exact gradients, 5-step PGD budget and angles",
                    criterion_enhancement(), -1.0});
    {
        Row row{7, "stealth metrics: fixed values, axioms, monotone trend in the ratio", {}, 0};
        row.check = criterion_stealth_metrics(&row.elapsed);
        rows.push_back(row);
    }
    rows.push_back({8, "parsing: canonical round trip and raw fixtures with line numbers",
                    criterion_parsing(scratch), -1.0});
    {
        Row row{9, "throughput: 1000 sequences at ratio 0.02 on 4 workers in under 5 s", {}, 0};
        row.check = criterion_throughput(&row.elapsed);
        rows.push_back(row);
    }

    int failures = 0;
    for (const Row& row : rows) {
        std::string line = row.check.ok ? "[PASS]" : "[FAIL]";
        line += " criterion " + std::to_string(row.number) + ": " + row.title;
        if (row.elapsed >= 0.0) {
            char buf[32];
            std::snprintf(buf, sizeof(buf), " (%.2f s)", row.elapsed);
            line += buf;
        }
        if (!row.check.ok) {
            line += " -- " + row.check.detail;
            ++failures;
        }
        std::printf("%s\n", line.c_str());
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(rows.size()) - failures,
                rows.size());

    std::error_code ec;
    fs::remove_all(scratch, ec);
    return failures == 0 ? 0 : 1;
}
