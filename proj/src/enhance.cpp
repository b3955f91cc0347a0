#include "skelbd/enhance.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "skelbd/rng.hpp"

namespace skelbd {
namespace {

Eigen::VectorXd softmax(const Eigen::VectorXd& logits) {
    const double peak = logits.maxCoeff();
    Eigen::VectorXd p = (logits.array() - peak).exp();
    return p / p.sum();
}

void check_feature_shape(const SurrogateModel& model, const SkeletonSequence& seq) {
    if (seq.frame_count() < 1) throw Error("sequence has no frames");
    if (seq.joint_count() != model.joints)
        throw Error("sequence has " + std::to_string(seq.joint_count()) +
                    " joints, surrogate expects " + std::to_string(model.joints));
}

}  // namespace

std::vector<int> resample_indices(int frame_count, int t_d) {
    if (frame_count < 1 || t_d < 1) throw Error("resampling needs at least one frame");
    std::vector<int> indices(static_cast<std::size_t>(t_d));
    for (int d = 0; d < t_d; ++d) {
        const int src =
            t_d == 1 ? 0
                     : static_cast<int>(std::llround(static_cast<double>(d) * (frame_count - 1) /
                                                     (t_d - 1)));
        indices[static_cast<std::size_t>(d)] = std::min(src, frame_count - 1);
    }
    return indices;
}

Eigen::VectorXd featurize(const SkeletonSequence& seq, int t_d) {
    if (seq.frame_count() < 1) throw Error("cannot featurize an empty sequence");
    const int joints = seq.joint_count();
    const std::vector<int> indices = resample_indices(seq.frame_count(), t_d);
    Eigen::VectorXd features(static_cast<Eigen::Index>(t_d) * joints * 3);
    Eigen::Index k = 0;
    for (int d = 0; d < t_d; ++d) {
        const SkeletonFrame& frame = seq.frames[static_cast<std::size_t>(indices[d])];
        const Vec3 root = frame.positions[0];
        for (int j = 0; j < joints; ++j) {
            const Vec3 centered = frame.positions[static_cast<std::size_t>(j)] - root;
            features[k++] = centered.x();
            features[k++] = centered.y();
            features[k++] = centered.z();
        }
    }
    return features;
}

SurrogateModel train_surrogate(const Dataset& data, int num_classes, int epochs, double lr,
                               std::uint64_t seed, int t_d) {
    if (data.sequences.empty()) throw EmptyDataset("cannot train a surrogate on an empty dataset");
    if (num_classes < 2) throw Error("surrogate needs at least two classes");

    const int joints = data.sequences.front().joint_count();
    const Eigen::Index n = static_cast<Eigen::Index>(data.sequences.size());
    const Eigen::Index dim = static_cast<Eigen::Index>(t_d) * joints * 3;

    Eigen::MatrixXd features(n, dim);
    Eigen::VectorXi labels(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const SkeletonSequence& seq = data.sequences[static_cast<std::size_t>(i)];
        if (seq.label < 0 || seq.label >= num_classes)
            throw LabelOutOfRange("label " + std::to_string(seq.label) + " outside [0, " +
                                  std::to_string(num_classes) + ")");
        if (seq.joint_count() != joints) throw Error("sequences have inconsistent joint counts");
        features.row(i) = featurize(seq, t_d).transpose();
        labels[i] = seq.label;
    }

    SurrogateModel model;
    model.t_d = t_d;
    model.joints = joints;
    model.weights.resize(num_classes, dim);
    model.bias.resize(num_classes);
    SplitMix64 rng(seed);
    for (Eigen::Index c = 0; c < num_classes; ++c) {
        for (Eigen::Index f = 0; f < dim; ++f) model.weights(c, f) = 1e-8 * rng.gaussian();
        model.bias[c] = 1e-8 * rng.gaussian();
    }

    for (int epoch = 0; epoch < epochs; ++epoch) {
        Eigen::MatrixXd grad_w = Eigen::MatrixXd::Zero(num_classes, dim);
        Eigen::VectorXd grad_b = Eigen::VectorXd::Zero(num_classes);
        for (Eigen::Index i = 0; i < n; ++i) {
            const Eigen::VectorXd logits = model.weights * features.row(i).transpose() + model.bias;
            Eigen::VectorXd p = softmax(logits);
            p[labels[i]] -= 1.0;
            grad_w.noalias() += p * features.row(i);
            grad_b += p;
        }
        model.weights -= (lr / static_cast<double>(n)) * grad_w;
        model.bias -= (lr / static_cast<double>(n)) * grad_b;
    }
    return model;
}

LossGrad loss_and_grad(const SurrogateModel& model, const SkeletonSequence& seq, int label) {
    check_feature_shape(model, seq);
    if (label < 0 || label >= model.classes())
        throw LabelOutOfRange("label " + std::to_string(label) + " outside [0, " +
                              std::to_string(model.classes()) + ")");

    const Eigen::VectorXd features = featurize(seq, model.t_d);
    const Eigen::VectorXd logits = model.weights * features + model.bias;
    Eigen::VectorXd p = softmax(logits);

    LossGrad out;
    out.loss = -std::log(std::max(p[label], 1e-300));

    p[label] -= 1.0;  // d loss / d logits
    const Eigen::VectorXd grad_features = model.weights.transpose() * p;

    const int joints = model.joints;
    out.grad = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(seq.frame_count()) * joints * 3);
    const std::vector<int> indices = resample_indices(seq.frame_count(), model.t_d);
    for (int d = 0; d < model.t_d; ++d) {
        const Eigen::Index frame_base = static_cast<Eigen::Index>(indices[d]) * joints * 3;
        const Eigen::Index feat_base = static_cast<Eigen::Index>(d) * joints * 3;
        for (int j = 0; j < joints; ++j) {
            for (int c = 0; c < 3; ++c) {
                const double g = grad_features[feat_base + 3 * j + c];
                out.grad[frame_base + 3 * j + c] += g;
                out.grad[frame_base + c] -= g;  // root-centering pulls on joint 1
            }
        }
    }
    return out;
}

double surrogate_loss(const SurrogateModel& model, const SkeletonSequence& seq, int label) {
    check_feature_shape(model, seq);
    const Eigen::VectorXd features = featurize(seq, model.t_d);
    const Eigen::VectorXd p = softmax(model.weights * features + model.bias);
    return -std::log(std::max(p[label], 1e-300));
}

double surrogate_accuracy(const SurrogateModel& model, const Dataset& data) {
    if (data.sequences.empty()) throw EmptyDataset("empty dataset");
    int hits = 0;
    for (const SkeletonSequence& seq : data.sequences) {
        const Eigen::VectorXd logits = model.weights * featurize(seq, model.t_d) + model.bias;
        Eigen::Index best = 0;
        logits.maxCoeff(&best);
        if (static_cast<int>(best) == seq.label) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(data.sequences.size());
}

namespace {

Eigen::VectorXd flatten(const SkeletonSequence& seq) {
    const int joints = seq.joint_count();
    Eigen::VectorXd flat(static_cast<Eigen::Index>(seq.frame_count()) * joints * 3);
    Eigen::Index k = 0;
    for (const SkeletonFrame& frame : seq.frames)
        for (const Vec3& p : frame.positions) {
            flat[k++] = p.x();
            flat[k++] = p.y();
            flat[k++] = p.z();
        }
    return flat;
}

void unflatten(const Eigen::VectorXd& flat, SkeletonSequence& seq) {
    Eigen::Index k = 0;
    for (SkeletonFrame& frame : seq.frames)
        for (Vec3& p : frame.positions) {
            p.x() = flat[k++];
            p.y() = flat[k++];
            p.z() = flat[k++];
        }
}

}  // namespace

SkeletonSequence pgd_enhance(const SurrogateModel& model, const SkeletonSequence& seq,
                             int target_class, double epsilon, int steps,
                             const SkeletonTopology& topo) {
    if (epsilon <= 0.0 || steps <= 0) return seq;
    check_feature_shape(model, seq);
    if (seq.joint_count() != topo.joint_count)
        throw Error("sequence joint count does not match the topology");

    const int joints = topo.joint_count;
    const int frames = seq.frame_count();
    const std::vector<JointId> order = topo.topological_order();

    const Eigen::VectorXd base = flatten(seq);
    SkeletonSequence current = seq;
    double current_loss = surrogate_loss(model, current, target_class);
    const double step_size = epsilon / steps;

    for (int step = 0; step < steps; ++step) {
        const LossGrad lg = loss_and_grad(model, current, target_class);

        // Gradient with respect to each bone's scale offset: scaling bone j
        // translates j's whole subtree along the bone vector, so the scale
        // gradient is the bone vector dotted with the subtree gradient sum.
        Eigen::MatrixXd scale_grad = Eigen::MatrixXd::Zero(frames, joints + 1);
        std::vector<Vec3> subtree_sum(static_cast<std::size_t>(joints + 1));
        for (int t = 0; t < frames; ++t) {
            const SkeletonFrame& frame = current.frames[static_cast<std::size_t>(t)];
            const Eigen::Index frame_base = static_cast<Eigen::Index>(t) * joints * 3;
            for (auto it = order.rbegin(); it != order.rend(); ++it) {
                const JointId j = *it;
                Vec3 sum(lg.grad[frame_base + 3 * (j - 1)], lg.grad[frame_base + 3 * (j - 1) + 1],
                         lg.grad[frame_base + 3 * (j - 1) + 2]);
                for (JointId c : topo.children(j)) sum += subtree_sum[static_cast<std::size_t>(c)];
                subtree_sum[static_cast<std::size_t>(j)] = sum;
                if (!topo.is_root(j)) {
                    const Vec3 bone = frame.at(j) - frame.at(topo.parent_of(j));
                    scale_grad(t, j) = bone.dot(sum);
                }
            }
        }

        // Sign ascent in scale space, shrinking the step if the projected
        // candidate would lower the loss.
        bool accepted = false;
        double scale = 1.0;
        for (int attempt = 0; attempt < 8 && !accepted; ++attempt, scale *= 0.5) {
            SkeletonSequence candidate = current;
            for (int t = 0; t < frames; ++t) {
                const SkeletonFrame& src = current.frames[static_cast<std::size_t>(t)];
                SkeletonFrame& dst = candidate.frames[static_cast<std::size_t>(t)];
                for (JointId j : order) {
                    if (topo.is_root(j)) {
                        dst.at(j) = src.at(j);
                        continue;
                    }
                    const double g = scale_grad(t, j);
                    const double delta =
                        g > 0.0 ? step_size * scale : (g < 0.0 ? -step_size * scale : 0.0);
                    // Never let a bone collapse through its parent.
                    const double factor = std::max(1.0 + delta, 0.5);
                    dst.at(j) = dst.at(topo.parent_of(j)) + factor * (src.at(j) - src.at(topo.parent_of(j)));
                }
            }

            Eigen::VectorXd displacement = flatten(candidate) - base;
            const double norm = displacement.norm();
            if (norm > epsilon) {
                displacement *= epsilon / norm;
                Eigen::VectorXd projected = base + displacement;
                unflatten(projected, candidate);
            }

            const double candidate_loss = surrogate_loss(model, candidate, target_class);
            if (candidate_loss >= current_loss) {
                current = std::move(candidate);
                current_loss = candidate_loss;
                accepted = true;
            }
        }
        // A step where no shrink helps leaves the sequence untouched.
    }
    return current;
}

void save_surrogate(const SurrogateModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << "SURR 1 classes=" << model.classes() << " td=" << model.t_d
        << " joints=" << model.joints << "\n";
    char buf[48];
    for (Eigen::Index c = 0; c < model.weights.rows(); ++c) {
        for (Eigen::Index f = 0; f < model.weights.cols(); ++f) {
            std::snprintf(buf, sizeof(buf), "%.17g", model.weights(c, f));
            out << (f ? " " : "") << buf;
        }
        out << "\n";
    }
    for (Eigen::Index c = 0; c < model.bias.size(); ++c) {
        std::snprintf(buf, sizeof(buf), "%.17g", model.bias[c]);
        out << (c ? " " : "") << buf;
    }
    out << "\n";
    if (!out) throw IoError("write failed: " + path);
}

SurrogateModel load_surrogate(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path);
    std::string line;
    if (!std::getline(in, line)) throw ParseError("missing surrogate header", 1);
    std::istringstream header(line);
    std::string magic, version, classes_kv, td_kv, joints_kv;
    header >> magic >> version >> classes_kv >> td_kv >> joints_kv;
    if (magic != "SURR" || version != "1") throw ParseError("missing SURR magic", 1);
    auto field = [&](const std::string& kv, const char* name) {
        const std::string prefix = std::string(name) + "=";
        if (kv.rfind(prefix, 0) != 0) throw ParseError(std::string("missing ") + name, 1);
        return std::atoi(kv.c_str() + prefix.size());
    };
    const int classes = field(classes_kv, "classes");
    const int t_d = field(td_kv, "td");
    const int joints = field(joints_kv, "joints");
    if (classes < 2 || t_d < 1 || joints < 1) throw ParseError("bad surrogate shape", 1);

    SurrogateModel model;
    model.t_d = t_d;
    model.joints = joints;
    model.weights.resize(classes, static_cast<Eigen::Index>(t_d) * joints * 3);
    model.bias.resize(classes);
    int line_no = 1;
    for (Eigen::Index c = 0; c < classes; ++c) {
        if (!std::getline(in, line)) throw ParseError("missing weight row", line_no + 1);
        ++line_no;
        std::istringstream row(line);
        for (Eigen::Index f = 0; f < model.weights.cols(); ++f)
            if (!(row >> model.weights(c, f))) throw ParseError("short weight row", line_no);
    }
    if (!std::getline(in, line)) throw ParseError("missing bias row", line_no + 1);
    ++line_no;
    std::istringstream row(line);
    for (Eigen::Index c = 0; c < classes; ++c)
        if (!(row >> model.bias[c])) throw ParseError("short bias row", line_no);
    return model;
}

}  // namespace skelbd
