#include "skelbd/formats.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace skelbd {
namespace {

std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> tokens;
    std::istringstream iss(line);
    std::string tok;
    while (iss >> tok) tokens.push_back(tok);
    return tokens;
}

bool parse_double(const std::string& tok, double& out) {
    const char* begin = tok.c_str();
    char* end = nullptr;
    out = std::strtod(begin, &end);
    return end == begin + tok.size() && !tok.empty();
}

bool parse_int(const std::string& tok, long& out) {
    const char* begin = tok.c_str();
    char* end = nullptr;
    out = std::strtol(begin, &end, 10);
    return end == begin + tok.size() && !tok.empty();
}

/// Reads lines while keeping a 1-based counter for ParseError reporting.
class LineReader {
public:
    explicit LineReader(std::istream& in) : in_(in) {}

    bool next(std::string& line) {
        if (!std::getline(in_, line)) return false;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        ++count_;
        return true;
    }

    std::string require(const std::string& what) {
        std::string line;
        if (!next(line)) throw ParseError("unexpected end of file, expected " + what, count_ + 1);
        return line;
    }

    int count() const { return count_; }

private:
    std::istream& in_;
    int count_ = 0;
};

std::string format_coord(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

long header_field(const std::vector<std::string>& tokens, std::size_t index,
                  const std::string& name, int line) {
    if (index >= tokens.size() || tokens[index].rfind(name + "=", 0) != 0)
        throw ParseError("missing " + name, line);
    long value = 0;
    if (!parse_int(tokens[index].substr(name.size() + 1), value))
        throw ParseError("malformed " + name + " field", line);
    return value;
}

}  // namespace

void save_canonical(const SkeletonSequence& seq, std::ostream& out) {
    out << "SKSEQ 1 joints=" << seq.joint_count() << " frames=" << seq.frame_count()
        << " label=" << seq.label << "\n";
    for (const SkeletonFrame& frame : seq.frames) {
        for (const Vec3& p : frame.positions) {
            out << format_coord(p.x()) << ' ' << format_coord(p.y()) << ' '
                << format_coord(p.z()) << "\n";
        }
    }
}

void save_canonical(const SkeletonSequence& seq, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    save_canonical(seq, out);
    if (!out) throw IoError("write failed: " + path);
}

SkeletonSequence load_canonical(std::istream& in) {
    LineReader reader(in);
    const std::string header = reader.require("header");
    const std::vector<std::string> tokens = split_ws(header);
    if (tokens.size() < 2 || tokens[0] != "SKSEQ") throw ParseError("missing SKSEQ magic", 1);
    if (tokens[1] != "1") throw ParseError("unsupported version: " + tokens[1], 1);
    const long joints = header_field(tokens, 2, "joints", 1);
    const long frames = header_field(tokens, 3, "frames", 1);
    const long label = header_field(tokens, 4, "label", 1);
    if (tokens.size() > 5) throw ParseError("trailing header content", 1);
    if (joints < 1) throw ParseError("joint count must be positive", 1);
    if (frames < 1) throw ParseError("frame count must be positive", 1);

    SkeletonSequence seq;
    seq.label = static_cast<int>(label);
    seq.frames.resize(static_cast<std::size_t>(frames));
    for (long t = 0; t < frames; ++t) {
        SkeletonFrame& frame = seq.frames[static_cast<std::size_t>(t)];
        frame.positions.resize(static_cast<std::size_t>(joints));
        for (long j = 0; j < joints; ++j) {
            const std::string line = reader.require("coordinate line");
            const std::vector<std::string> coords = split_ws(line);
            if (coords.size() != 3)
                throw ParseError("expected 3 coordinates, got " + std::to_string(coords.size()),
                                 reader.count());
            Vec3 p;
            for (int c = 0; c < 3; ++c) {
                if (!parse_double(coords[static_cast<std::size_t>(c)], p[c]))
                    throw ParseError("malformed coordinate: " + coords[static_cast<std::size_t>(c)],
                                     reader.count());
            }
            frame.positions[static_cast<std::size_t>(j)] = p;
        }
    }
    std::string extra;
    while (reader.next(extra)) {
        if (!extra.empty()) throw ParseError("trailing content after frames", reader.count());
    }
    return seq;
}

SkeletonSequence load_canonical(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path);
    SkeletonSequence seq = load_canonical(in);
    seq.meta["source"] = path;
    return seq;
}

void save_manifest(const std::vector<ManifestRecord>& records, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    for (const ManifestRecord& r : records) {
        if (r.poisoned != !r.trigger.empty())
            throw Error("manifest record " + r.id + ": poisoned flag must match the trigger name");
        out << r.id << '\t' << r.path << '\t' << r.label << '\t' << (r.poisoned ? 1 : 0) << '\t'
            << (r.trigger.empty() ? "-" : r.trigger) << "\n";
    }
    if (!out) throw IoError("write failed: " + path);
}

std::vector<ManifestRecord> load_manifest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path);
    std::vector<ManifestRecord> records;
    LineReader reader(in);
    std::string line;
    while (reader.next(line)) {
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::size_t start = 0;
        for (;;) {
            const std::size_t tab = line.find('\t', start);
            fields.push_back(line.substr(start, tab - start));
            if (tab == std::string::npos) break;
            start = tab + 1;
        }
        if (fields.size() != 5) throw ParseError("expected 5 tab-separated fields", reader.count());
        ManifestRecord r;
        r.id = fields[0];
        r.path = fields[1];
        long label = 0;
        if (!parse_int(fields[2], label)) throw ParseError("malformed label", reader.count());
        r.label = static_cast<int>(label);
        if (fields[3] == "0")
            r.poisoned = false;
        else if (fields[3] == "1")
            r.poisoned = true;
        else
            throw ParseError("poisoned flag must be 0 or 1", reader.count());
        r.trigger = fields[4] == "-" ? "" : fields[4];
        if (r.poisoned != !r.trigger.empty())
            throw ParseError("poisoned flag inconsistent with trigger name", reader.count());
        records.push_back(std::move(r));
    }
    return records;
}

void save_dataset(const Dataset& dataset, const std::string& dir) {
    if (dataset.manifest.size() != dataset.sequences.size())
        throw Error("manifest length does not match sequence count");
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory: " + dir);
    for (std::size_t i = 0; i < dataset.sequences.size(); ++i) {
        const ManifestRecord& r = dataset.manifest[i];
        save_canonical(dataset.sequences[i], (fs::path(dir) / r.path).string());
    }
    save_manifest(dataset.manifest, (fs::path(dir) / "manifest.tsv").string());
}

Dataset load_dataset(const std::string& dir) {
    namespace fs = std::filesystem;
    Dataset dataset;
    dataset.manifest = load_manifest((fs::path(dir) / "manifest.tsv").string());
    dataset.sequences.reserve(dataset.manifest.size());
    for (const ManifestRecord& r : dataset.manifest) {
        SkeletonSequence seq = load_canonical((fs::path(dir) / r.path).string());
        if (seq.label != r.label)
            throw Error("label mismatch for " + r.id + ": manifest says " +
                        std::to_string(r.label) + ", file says " + std::to_string(seq.label));
        seq.meta["id"] = r.id;
        dataset.sequences.push_back(std::move(seq));
    }
    return dataset;
}

namespace {

int action_code_from_filename(const std::string& filename) {
    const std::string stem = std::filesystem::path(filename).stem().string();
    // Last 'A' followed by digits, e.g. S001C002P003R002A023 -> 23.
    for (std::size_t i = stem.size(); i-- > 0;) {
        if ((stem[i] == 'A' || stem[i] == 'a') && i + 1 < stem.size() &&
            std::isdigit(static_cast<unsigned char>(stem[i + 1]))) {
            return std::atoi(stem.c_str() + i + 1);
        }
    }
    return 0;
}

}  // namespace

std::vector<SkeletonSequence> parse_ntu_skeleton(std::istream& in, const std::string& filename) {
    constexpr int kExpectedJoints = 25;
    constexpr std::size_t kBodyInfoFields = 10;
    constexpr std::size_t kJointFields = 12;

    LineReader reader(in);
    long frame_count = 0;
    const std::vector<std::string> fc = split_ws(reader.require("frame count"));
    if (fc.size() != 1 || !parse_int(fc[0], frame_count) || frame_count < 0)
        throw ParseError("malformed frame count", reader.count());

    const int code = action_code_from_filename(filename);
    const int label = code > 0 ? code - 1 : -1;

    std::map<std::string, SkeletonSequence> bodies;
    std::vector<std::string> body_order;

    for (long f = 0; f < frame_count; ++f) {
        long body_count = 0;
        const std::vector<std::string> bc = split_ws(reader.require("body count"));
        if (bc.size() != 1 || !parse_int(bc[0], body_count) || body_count < 0)
            throw ParseError("malformed body count", reader.count());
        for (long b = 0; b < body_count; ++b) {
            const std::vector<std::string> info = split_ws(reader.require("body info"));
            if (info.size() != kBodyInfoFields)
                throw ParseError("expected " + std::to_string(kBodyInfoFields) +
                                     " body info values, got " + std::to_string(info.size()),
                                 reader.count());
            const std::string body_id = info[0];

            long joints = 0;
            const std::vector<std::string> jc = split_ws(reader.require("joint count"));
            if (jc.size() != 1 || !parse_int(jc[0], joints))
                throw ParseError("malformed joint count", reader.count());
            if (joints != kExpectedJoints)
                throw UnsupportedJointCount("body declares " + std::to_string(joints) +
                                            " joints, expected 25");

            SkeletonFrame frame;
            frame.positions.resize(kExpectedJoints);
            for (int j = 0; j < kExpectedJoints; ++j) {
                const std::vector<std::string> vals = split_ws(reader.require("joint line"));
                if (vals.size() != kJointFields)
                    throw ParseError("expected " + std::to_string(kJointFields) +
                                         " joint values, got " + std::to_string(vals.size()),
                                     reader.count());
                Vec3 p;
                for (int c = 0; c < 3; ++c) {
                    if (!parse_double(vals[static_cast<std::size_t>(c)], p[c]))
                        throw ParseError("malformed joint coordinate", reader.count());
                }
                frame.positions[static_cast<std::size_t>(j)] = p;
            }

            auto it = bodies.find(body_id);
            if (it == bodies.end()) {
                SkeletonSequence seq;
                seq.label = label;
                seq.meta["source"] = filename;
                seq.meta["body"] = body_id;
                it = bodies.emplace(body_id, std::move(seq)).first;
                body_order.push_back(body_id);
            }
            it->second.frames.push_back(std::move(frame));
        }
    }

    std::vector<SkeletonSequence> out;
    out.reserve(body_order.size());
    for (const std::string& id : body_order) out.push_back(std::move(bodies[id]));
    return out;
}

std::vector<SkeletonSequence> parse_ntu_skeleton(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path);
    return parse_ntu_skeleton(in, path);
}

}  // namespace skelbd
