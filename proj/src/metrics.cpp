#include "skelbd/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "skelbd/parallel.hpp"

namespace skelbd {
namespace {

void check_path(const SkeletonTopology& topo, const std::vector<JointId>& path) {
    for (JointId j : path)
        if (!topo.valid_joint(j)) throw ChainMismatch("metric path joint out of range");
    for (std::size_t i = 1; i < path.size(); ++i) {
        const JointId a = path[i - 1], b = path[i];
        if (topo.parent_of(a) != b && topo.parent_of(b) != a)
            throw ChainMismatch("metric path joints " + std::to_string(a) + " and " +
                                std::to_string(b) + " do not share a bone");
    }
}

/// Extraction runs data-parallel per sequence; per-sequence results land in
/// indexed slots and merge in dataset order, so the pool is identical for any
/// thread count.
std::vector<double> pooled_angles(const Dataset& data, const SkeletonTopology& topo,
                                  const TriggerActionSpec& spec, int threads) {
    std::vector<std::vector<double>> slots(data.sequences.size());
    parallel_for(data.sequences.size(), threads, [&](std::size_t i) {
        for (const std::vector<JointId>& path : spec.metric_paths) {
            const std::vector<double> a = adjacent_bone_angles(data.sequences[i], topo, path);
            slots[i].insert(slots[i].end(), a.begin(), a.end());
        }
    });
    std::vector<double> angles;
    for (const std::vector<double>& slot : slots)
        angles.insert(angles.end(), slot.begin(), slot.end());
    return angles;
}

}  // namespace

std::vector<double> adjacent_bone_angles(const SkeletonSequence& seq, const SkeletonTopology& topo,
                                         const std::vector<JointId>& path, std::size_t* skipped) {
    check_path(topo, path);
    std::vector<double> angles;
    if (path.size() < 3) return angles;  // needs two bones for an interior angle
    angles.reserve(seq.frames.size() * (path.size() - 2));
    for (const SkeletonFrame& frame : seq.frames) {
        for (std::size_t i = 1; i + 1 < path.size(); ++i) {
            const Vec3 incoming = frame.at(path[i]) - frame.at(path[i - 1]);
            const Vec3 outgoing = frame.at(path[i + 1]) - frame.at(path[i]);
            const double norms = incoming.norm() * outgoing.norm();
            if (norms < 1e-24) {
                if (skipped) ++*skipped;
                continue;
            }
            const double cosine = std::clamp(incoming.dot(outgoing) / norms, -1.0, 1.0);
            angles.push_back(std::acos(cosine));
        }
    }
    return angles;
}

AngleHistogram histogram(const std::vector<double>& angles, int bin_count) {
    if (bin_count < 2) throw Error("histogram needs at least two bins");
    if (angles.empty()) throw EmptyAngles("no angles to bin");
    AngleHistogram hist;
    hist.bin_count = bin_count;
    hist.masses = Eigen::VectorXd::Constant(bin_count, 1e-9);  // smoothing
    const double scale = bin_count / M_PI;
    for (double a : angles) {
        const int bin = std::clamp(static_cast<int>(a * scale), 0, bin_count - 1);
        hist.masses[bin] += 1.0;
    }
    hist.masses /= hist.masses.sum();
    return hist;
}

double kld(const AngleHistogram& p, const AngleHistogram& q) {
    if (p.bin_count != q.bin_count) throw BinMismatch("histograms have different bin counts");
    double sum = 0.0;
    for (int b = 0; b < p.bin_count; ++b) {
        const double pb = p.masses[b];
        if (pb > 0.0) sum += pb * std::log(pb / q.masses[b]);
    }
    return sum;
}

double emd(const AngleHistogram& p, const AngleHistogram& q) {
    if (p.bin_count != q.bin_count) throw BinMismatch("histograms have different bin counts");
    double cdf_gap = 0.0, total = 0.0;
    for (int b = 0; b < p.bin_count; ++b) {
        cdf_gap += p.masses[b] - q.masses[b];
        total += std::abs(cdf_gap);
    }
    return p.bin_width() * total;
}

StealthReport stealth_report(const Dataset& clean, const Dataset& poisoned,
                             const TriggerActionSpec& spec, int bin_count,
                             AngleHistogram* clean_hist, AngleHistogram* poisoned_hist,
                             int threads) {
    if (clean.sequences.empty() || poisoned.sequences.empty())
        throw EmptyDataset("stealth metrics need non-empty datasets");
    const SkeletonTopology topo = default_topology();
    const std::vector<double> clean_angles = pooled_angles(clean, topo, spec, threads);
    const std::vector<double> poisoned_angles = pooled_angles(poisoned, topo, spec, threads);

    const AngleHistogram p = histogram(poisoned_angles, bin_count);
    const AngleHistogram q = histogram(clean_angles, bin_count);

    StealthReport report;
    report.trigger = spec.name;
    report.kld_nats = kld(p, q);
    report.emd_radians = emd(p, q);
    report.clean_angle_count = clean_angles.size();
    report.poisoned_angle_count = poisoned_angles.size();
    if (clean_hist) *clean_hist = q;
    if (poisoned_hist) *poisoned_hist = p;
    return report;
}

void write_report(const StealthReport& report, std::ostream& out) {
    out << "# trigger\tratio\tkld_nats\temd_rad\tn_clean_angles\tn_poisoned_angles\n";
    out << report.trigger << '\t';
    if (std::isnan(report.ratio))
        out << '-';
    else
        out << report.ratio;
    out << '\t' << report.kld_nats << '\t' << report.emd_radians << '\t'
        << report.clean_angle_count << '\t' << report.poisoned_angle_count << "\n";
}

void write_histograms(const AngleHistogram& clean, const AngleHistogram& poisoned,
                      std::ostream& out) {
    if (clean.bin_count != poisoned.bin_count)
        throw BinMismatch("histograms have different bin counts");
    out << "# bin_center_rad\tclean_mass\tpoisoned_mass\n";
    for (int b = 0; b < clean.bin_count; ++b) {
        out << (b + 0.5) * clean.bin_width() << '\t' << clean.masses[b] << '\t'
            << poisoned.masses[b] << "\n";
    }
}

}  // namespace skelbd
