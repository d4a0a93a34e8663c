#include "mip/gbdt.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "mip/parallel.hpp"
#include "mip/rng.hpp"

namespace mip {

void GbdtHyper::validate() const {
    if (n_trees < 0) throw std::invalid_argument("gbdt: n_trees must be >= 0");
    if (max_depth < 1) throw std::invalid_argument("gbdt: max_depth must be >= 1");
    if (learning_rate <= 0) throw std::invalid_argument("gbdt: learning_rate must be > 0");
    if (min_samples_leaf < 1) {
        throw std::invalid_argument("gbdt: min_samples_leaf must be >= 1");
    }
    if (histogram_bins < 2 || histogram_bins > 256) {
        throw std::invalid_argument("gbdt: histogram_bins must lie in [2, 256]");
    }
    if (subsample <= 0 || subsample > 1) {
        throw std::invalid_argument("gbdt: subsample must lie in (0, 1]");
    }
    if (l2_leaf < 0) throw std::invalid_argument("gbdt: l2_leaf must be >= 0");
}

double Tree::predict(std::span<const double> x) const {
    int cur = 0;
    while (nodes[cur].feature >= 0) {
        cur = x[nodes[cur].feature] <= nodes[cur].threshold ? nodes[cur].left
                                                            : nodes[cur].right;
    }
    return nodes[cur].value;
}

namespace {

constexpr double kMinGain = 1e-12;
constexpr double kHessFloor = 1e-12;

struct BinnedData {
    size_t n = 0;
    size_t width = 0;
    int bins = 0;
    std::vector<uint8_t> codes;              // column-major: width x n
    std::vector<std::vector<double>> edges;  // cut values per feature
};

BinnedData bin_features(const std::vector<double>& xs, size_t n, size_t width,
                        int bins) {
    BinnedData bd;
    bd.n = n;
    bd.width = width;
    bd.bins = bins;
    bd.codes.assign(width * n, 0);
    bd.edges.resize(width);
    parallel_for(width, [&](size_t f) {
        std::vector<double> vals(n);
        for (size_t i = 0; i < n; ++i) vals[i] = xs[i * width + f];
        std::sort(vals.begin(), vals.end());
        std::vector<double>& edges = bd.edges[f];
        for (int q = 1; q < bins; ++q) {
            double v = vals[(static_cast<size_t>(q) * n) / bins];
            if (edges.empty() || v > edges.back()) edges.push_back(v);
        }
        if (!edges.empty() && edges.back() >= vals.back()) edges.pop_back();
        uint8_t* col = bd.codes.data() + f * n;
        for (size_t i = 0; i < n; ++i) {
            double x = xs[i * width + f];
            col[i] = static_cast<uint8_t>(
                std::lower_bound(edges.begin(), edges.end(), x) - edges.begin());
        }
    });
    return bd;
}

struct BuiltTree {
    Tree tree;
    std::vector<int> bin_threshold;  // per node, -1 for leaves
};

struct Split {
    double gain = 0.0;
    int feature = -1;
    int bin = -1;
    double gl = 0.0, hl = 0.0;
    double cl = 0.0;
};

class TreeBuilder {
public:
    TreeBuilder(const BinnedData& bd, const GbdtHyper& hy, bool feature_parallel)
        : bd_(bd), hy_(hy), feature_parallel_(feature_parallel) {}

    // g, h indexed by sample id; samples lists the rows this tree trains on.
    BuiltTree build(const double* g, const double* h,
                    const std::vector<uint32_t>& samples,
                    std::vector<double>& gain_by_feature) {
        struct BNode {
            size_t begin, end;
            double g_sum, h_sum;
            int depth;
            int tree_node;
            std::vector<double> hist;
        };
        BuiltTree out;
        idx_ = samples;
        out.tree.nodes.emplace_back();
        out.bin_threshold.push_back(-1);

        std::deque<BNode> queue;
        {
            BNode root{0, idx_.size(), 0.0, 0.0, 0, 0, {}};
            root.hist = make_hist(g, h, root.begin, root.end);
            for (size_t f0 = 0; f0 < 1; ++f0) {
                // totals from feature 0's histogram row
                const double* o = root.hist.data();
                for (int b = 0; b < bd_.bins; ++b) {
                    root.g_sum += o[b * 3];
                    root.h_sum += o[b * 3 + 1];
                }
            }
            queue.push_back(std::move(root));
        }

        while (!queue.empty()) {
            BNode node = std::move(queue.front());
            queue.pop_front();
            size_t count = node.end - node.begin;
            Split best;
            if (node.depth < hy_.max_depth &&
                count >= 2 * static_cast<size_t>(hy_.min_samples_leaf)) {
                best = find_best(node.hist, node.g_sum, node.h_sum);
            }
            if (best.feature < 0 || best.gain <= kMinGain) {
                out.tree.nodes[node.tree_node].feature = -1;
                out.tree.nodes[node.tree_node].value =
                    -hy_.learning_rate * node.g_sum / (node.h_sum + hy_.l2_leaf);
                continue;
            }
            gain_by_feature[best.feature] += best.gain;

            size_t mid = partition(best, node.begin, node.end);
            int left_id = static_cast<int>(out.tree.nodes.size());
            out.tree.nodes.emplace_back();
            out.bin_threshold.push_back(-1);
            int right_id = static_cast<int>(out.tree.nodes.size());
            out.tree.nodes.emplace_back();
            out.bin_threshold.push_back(-1);

            TreeNode& tn = out.tree.nodes[node.tree_node];
            tn.feature = best.feature;
            tn.threshold = bd_.edges[best.feature][best.bin];
            tn.left = left_id;
            tn.right = right_id;
            out.bin_threshold[node.tree_node] = best.bin;

            BNode left{node.begin, mid, best.gl, best.hl, node.depth + 1, left_id, {}};
            BNode right{mid, node.end, node.g_sum - best.gl, node.h_sum - best.hl,
                        node.depth + 1, right_id, {}};
            // histograms only where a further split is possible; build the
            // smaller child's and derive the sibling's from the parent
            auto can_split = [this](const BNode& c) {
                return c.depth < hy_.max_depth &&
                       c.end - c.begin >= 2 * static_cast<size_t>(hy_.min_samples_leaf);
            };
            BNode& small = (mid - node.begin <= node.end - mid) ? left : right;
            BNode& large = (mid - node.begin <= node.end - mid) ? right : left;
            if (can_split(small) || can_split(large)) {
                small.hist = make_hist(g, h, small.begin, small.end);
                if (can_split(large)) {
                    large.hist = std::move(node.hist);
                    for (size_t j = 0; j < large.hist.size(); ++j) {
                        large.hist[j] -= small.hist[j];
                    }
                }
                if (!can_split(small)) small.hist.clear();
            }
            queue.push_back(std::move(left));
            queue.push_back(std::move(right));
        }
        return out;
    }

private:
    std::vector<double> make_hist(const double* g, const double* h, size_t b, size_t e) {
        std::vector<double> hist(bd_.width * bd_.bins * 3, 0.0);
        auto work = [&](size_t f) {
            const uint8_t* col = bd_.codes.data() + f * bd_.n;
            double* o = hist.data() + f * bd_.bins * 3;
            for (size_t i = b; i < e; ++i) {
                uint32_t u = idx_[i];
                double* cell = o + col[u] * 3;
                cell[0] += g[u];
                cell[1] += h[u];
                cell[2] += 1.0;
            }
        };
        if (feature_parallel_) {
            parallel_for(bd_.width, work);
        } else {
            for (size_t f = 0; f < bd_.width; ++f) work(f);
        }
        return hist;
    }

    Split find_best(const std::vector<double>& hist, double g_sum, double h_sum) const {
        double parent = g_sum * g_sum / (h_sum + hy_.l2_leaf);
        double total_cnt = 0.0;
        for (int b = 0; b < bd_.bins; ++b) total_cnt += hist[b * 3 + 2];
        Split best;
        double min_leaf = static_cast<double>(hy_.min_samples_leaf);
        for (size_t f = 0; f < bd_.width; ++f) {
            const double* o = hist.data() + f * bd_.bins * 3;
            int usable = static_cast<int>(bd_.edges[f].size());  // split bins 0..usable-1
            double gl = 0.0, hl = 0.0, cl = 0.0;
            for (int b = 0; b < usable; ++b) {
                gl += o[b * 3];
                hl += o[b * 3 + 1];
                cl += o[b * 3 + 2];
                if (cl < min_leaf) continue;
                if (total_cnt - cl < min_leaf) break;
                double gr = g_sum - gl;
                double hr = h_sum - hl;
                double gain = gl * gl / (hl + hy_.l2_leaf) +
                              gr * gr / (hr + hy_.l2_leaf) - parent;
                if (gain > best.gain) {
                    best = {gain, static_cast<int>(f), b, gl, hl, cl};
                }
            }
        }
        return best;
    }

    size_t partition(const Split& s, size_t b, size_t e) {
        const uint8_t* col = bd_.codes.data() + static_cast<size_t>(s.feature) * bd_.n;
        scratch_.clear();
        size_t write = b;
        for (size_t i = b; i < e; ++i) {
            uint32_t u = idx_[i];
            if (col[u] <= s.bin) {
                idx_[write++] = u;
            } else {
                scratch_.push_back(u);
            }
        }
        std::copy(scratch_.begin(), scratch_.end(), idx_.begin() + write);
        return write;
    }

    const BinnedData& bd_;
    const GbdtHyper& hy_;
    bool feature_parallel_;
    std::vector<uint32_t> idx_;
    std::vector<uint32_t> scratch_;
};

// Applies one built tree to every sample via the binned codes.
void apply_tree(const BuiltTree& bt, const BinnedData& bd, double* f_scores,
                size_t stride, size_t offset) {
    parallel_for(bd.n, [&](size_t i) {
        int cur = 0;
        while (bt.tree.nodes[cur].feature >= 0) {
            const TreeNode& tn = bt.tree.nodes[cur];
            uint8_t c = bd.codes[static_cast<size_t>(tn.feature) * bd.n + i];
            cur = c <= bt.bin_threshold[cur] ? tn.left : tn.right;
        }
        f_scores[i * stride + offset] += bt.tree.nodes[cur].value;
    });
}

void check_trainable(const LabeledDataset& ds) {
    if (ds.rows() == 0) throw std::invalid_argument("empty dataset");
    std::set<int> distinct(ds.labels.begin(), ds.labels.end());
    if (distinct.size() < 2) {
        throw std::invalid_argument("training requires at least 2 distinct labels");
    }
    for (double v : ds.x) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("non-finite feature value in dataset");
        }
    }
}

}  // namespace

std::unique_ptr<ProbabilisticModel> train_gbdt(const LabeledDataset& data,
                                               const GbdtHyper& hyper, uint64_t seed) {
    hyper.validate();
    check_trainable(data);

    auto model = std::make_unique<GbdtModel>();
    model->schema_ = data.schema;
    model->label_order_ = data.label_order;
    model->scaler_ = Scaler::fit(data);
    model->hyper = hyper;

    size_t n = data.rows();
    size_t width = data.schema.size();
    size_t k_count = data.label_order.size();
    bool binary = k_count == 2;
    model->binary = binary;
    size_t n_class_trees = binary ? 1 : k_count;
    model->gain_by_feature.assign(width, 0.0);

    std::vector<double> xs = data.x;
    for (size_t i = 0; i < n; ++i) model->scaler_.transform_row(xs.data() + i * width);
    BinnedData bd = bin_features(xs, n, width, hyper.histogram_bins);

    // smoothed prior base scores
    std::vector<double> counts(k_count, 0.0);
    for (int y : data.labels) counts[y] += 1.0;
    if (binary) {
        model->base_scores = {std::log((counts[0] + 1.0) / (counts[1] + 1.0))};
    } else {
        model->base_scores.resize(k_count);
        for (size_t k = 0; k < k_count; ++k) {
            model->base_scores[k] =
                std::log((counts[k] + 1.0) / (static_cast<double>(n) + k_count));
        }
    }

    size_t f_stride = binary ? 1 : k_count;
    std::vector<double> f_scores(n * f_stride);
    for (size_t i = 0; i < n; ++i) {
        for (size_t k = 0; k < f_stride; ++k) {
            f_scores[i * f_stride + k] = model->base_scores[k];
        }
    }

    std::vector<double> probs(n * f_stride);
    std::vector<double> row_loss(n);
    auto compute_probs_and_loss = [&]() {
        parallel_for(n, [&](size_t i) {
            if (binary) {
                double p = 1.0 / (1.0 + std::exp(-f_scores[i]));
                probs[i] = p;
                bool pos = data.labels[i] == 0;
                double py = pos ? p : 1.0 - p;
                row_loss[i] = -std::log(std::max(py, 1e-300));
            } else {
                const double* f = f_scores.data() + i * k_count;
                double* p = probs.data() + i * k_count;
                double zmax = *std::max_element(f, f + k_count);
                double sum = 0.0;
                for (size_t k = 0; k < k_count; ++k) {
                    p[k] = std::exp(f[k] - zmax);
                    sum += p[k];
                }
                for (size_t k = 0; k < k_count; ++k) p[k] /= sum;
                row_loss[i] = -std::log(std::max(p[data.labels[i]], 1e-300));
            }
        });
        double total = 0.0;
        for (double l : row_loss) total += l;
        return total / static_cast<double>(n);
    };

    RngStream rng = RngStream::root(seed);
    std::vector<std::vector<double>> class_gains(n_class_trees,
                                                 std::vector<double>(width, 0.0));

    for (int round = 0; round < hyper.n_trees; ++round) {
        model->train_loss_curve_.push_back(compute_probs_and_loss());

        std::vector<uint32_t> samples;
        if (hyper.subsample < 1.0) {
            RngStream rs = rng.child(static_cast<uint64_t>(round));
            for (size_t i = 0; i < n; ++i) {
                if (rs.bernoulli(hyper.subsample)) samples.push_back(static_cast<uint32_t>(i));
            }
            if (samples.empty()) samples.push_back(0);
        } else {
            samples.resize(n);
            for (size_t i = 0; i < n; ++i) samples[i] = static_cast<uint32_t>(i);
        }

        std::vector<std::vector<BuiltTree>> built(n_class_trees);
        auto fit_class = [&](size_t k) {
            std::vector<double> g(n), h(n);
            if (binary) {
                for (size_t i = 0; i < n; ++i) {
                    double p = probs[i];
                    g[i] = p - (data.labels[i] == 0 ? 1.0 : 0.0);
                    h[i] = std::max(p * (1.0 - p), kHessFloor);
                }
            } else {
                for (size_t i = 0; i < n; ++i) {
                    double p = probs[i * k_count + k];
                    g[i] = p - (data.labels[i] == static_cast<int>(k) ? 1.0 : 0.0);
                    h[i] = std::max(p * (1.0 - p), kHessFloor);
                }
            }
            TreeBuilder builder(bd, hyper, /*feature_parallel=*/n_class_trees == 1);
            built[k].push_back(builder.build(g.data(), h.data(), samples, class_gains[k]));
        };
        if (n_class_trees == 1) {
            fit_class(0);
        } else {
            parallel_for(n_class_trees, fit_class);
        }

        std::vector<Tree> round_trees;
        for (size_t k = 0; k < n_class_trees; ++k) {
            apply_tree(built[k][0], bd, f_scores.data(), f_stride, binary ? 0 : k);
            round_trees.push_back(std::move(built[k][0].tree));
            built[k].clear();
        }
        model->rounds_.push_back(std::move(round_trees));
    }
    model->train_loss_curve_.push_back(compute_probs_and_loss());
    for (size_t k = 0; k < n_class_trees; ++k) {
        for (size_t f = 0; f < width; ++f) model->gain_by_feature[f] += class_gains[k][f];
    }
    return model;
}

std::vector<double> GbdtModel::scores_to_distribution(std::vector<double> raw) const {
    if (binary) {
        double p = 1.0 / (1.0 + std::exp(-raw[0]));
        return {p, 1.0 - p};
    }
    double zmax = *std::max_element(raw.begin(), raw.end());
    double sum = 0.0;
    for (double& v : raw) {
        v = std::exp(v - zmax);
        sum += v;
    }
    for (double& v : raw) v /= sum;
    return raw;
}

std::vector<double> GbdtModel::predict_std(std::span<const double> x) const {
    std::vector<double> raw = base_scores;
    for (const auto& round : rounds_) {
        for (size_t k = 0; k < round.size(); ++k) raw[k] += round[k].predict(x);
    }
    return scores_to_distribution(std::move(raw));
}

std::vector<double> GbdtModel::predict_distribution_truncated(std::span<const double> x,
                                                              int t) const {
    if (x.size() != schema_.size()) {
        throw std::invalid_argument("feature vector width mismatch");
    }
    std::vector<double> xstd = scaler_.transform(x);
    std::vector<double> raw = base_scores;
    int limit = std::clamp(t, 0, rounds());
    for (int r = 0; r < limit; ++r) {
        for (size_t k = 0; k < rounds_[r].size(); ++k) {
            raw[k] += rounds_[r][k].predict(xstd);
        }
    }
    return scores_to_distribution(std::move(raw));
}

std::map<std::string, double> GbdtModel::feature_importances() const {
    std::map<std::string, double> out;
    for (size_t f = 0; f < schema_.names.size(); ++f) {
        out[schema_.names[f]] = gain_by_feature[f];
    }
    return out;
}

void GbdtModel::payload_to_json(void* json_out) const {
    auto& j = *static_cast<nlohmann::json*>(json_out);
    j["binary"] = binary;
    j["base_scores"] = base_scores;
    j["gain_by_feature"] = gain_by_feature;
    j["hyper"] = {{"n_trees", hyper.n_trees},
                  {"max_depth", hyper.max_depth},
                  {"learning_rate", hyper.learning_rate},
                  {"min_samples_leaf", hyper.min_samples_leaf},
                  {"histogram_bins", hyper.histogram_bins},
                  {"subsample", hyper.subsample},
                  {"l2_leaf", hyper.l2_leaf}};
    nlohmann::json rounds = nlohmann::json::array();
    for (const auto& round : rounds_) {
        nlohmann::json trees = nlohmann::json::array();
        for (const Tree& t : round) {
            nlohmann::json nodes = nlohmann::json::array();
            for (const TreeNode& nd : t.nodes) {
                nodes.push_back({{"f", nd.feature},
                                 {"t", nd.threshold},
                                 {"l", nd.left},
                                 {"r", nd.right},
                                 {"v", nd.value}});
            }
            trees.push_back({{"nodes", std::move(nodes)}});
        }
        rounds.push_back(std::move(trees));
    }
    j["rounds"] = std::move(rounds);
}

}  // namespace mip
