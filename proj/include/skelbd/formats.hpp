#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "skelbd/skeleton.hpp"

namespace skelbd {

/// Canonical sequence format (text, UTF-8, LF):
///   SKSEQ 1 joints=<J> frames=<T> label=<int>
/// followed by T blocks of J lines `<x> <y> <z>`, 17 significant digits.
/// save followed by load reproduces the sequence exactly, and re-saving is
/// byte-identical. `meta` is transient and not written.
void save_canonical(const SkeletonSequence& seq, const std::string& path);
void save_canonical(const SkeletonSequence& seq, std::ostream& out);
SkeletonSequence load_canonical(const std::string& path);
SkeletonSequence load_canonical(std::istream& in);

/// Dataset manifest: one tab-separated record per line,
///   <id> <relative-path> <label> <poisoned:0|1> <trigger-name-or-->
void save_manifest(const std::vector<ManifestRecord>& records, const std::string& path);
std::vector<ManifestRecord> load_manifest(const std::string& path);

/// A dataset directory holds `manifest.tsv` plus one canonical file per
/// sequence at the manifest's relative paths.
void save_dataset(const Dataset& dataset, const std::string& dir);
Dataset load_dataset(const std::string& dir);

/// Parser for the raw NTU `.skeleton` layout: frame count; per frame a body
/// count; per body one 10-value info line, a joint-count line (must be 25),
/// then 25 lines of 12 floats of which only x y z are kept. Returns one
/// sequence per tracked body id, covering the frames where that body is
/// present. The label is taken from an `A<digits>` action code in the file
/// name (0-based, i.e. code minus one) or -1 when absent.
std::vector<SkeletonSequence> parse_ntu_skeleton(const std::string& path);
std::vector<SkeletonSequence> parse_ntu_skeleton(std::istream& in, const std::string& filename);

}  // namespace skelbd
