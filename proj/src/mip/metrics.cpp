#include "mip/metrics.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "mip/model.hpp"
#include "mip/rng.hpp"

namespace mip {

std::vector<std::vector<int64_t>> grouped_kfold(std::span<const int64_t> groups, int k,
                                                uint64_t seed) {
    if (k < 2) throw std::invalid_argument("grouped_kfold: k must be >= 2");
    std::set<int64_t> distinct(groups.begin(), groups.end());
    if (static_cast<int>(distinct.size()) < k) {
        throw std::invalid_argument("grouped_kfold: fewer groups than folds");
    }
    std::vector<int64_t> ids(distinct.begin(), distinct.end());
    RngStream rng = RngStream::root(seed).child(0x4B464F4C);
    for (size_t i = ids.size(); i > 1; --i) {
        std::swap(ids[i - 1], ids[rng.uniform_int(i)]);
    }
    std::vector<std::vector<int64_t>> folds(k);
    size_t n = ids.size();
    for (int f = 0; f < k; ++f) {
        size_t begin = n * f / k;
        size_t end = n * (f + 1) / k;
        folds[f].assign(ids.begin() + begin, ids.begin() + end);
        std::sort(folds[f].begin(), folds[f].end());
    }
    return folds;
}

double topk_recall(std::span<const int> labels, const std::vector<double>& dists,
                   const std::vector<std::string>& label_order, int k, Averaging avg,
                   int excluded_label) {
    if (k < 1) throw std::invalid_argument("topk_recall: k must be >= 1");
    size_t n = labels.size();
    size_t kc = label_order.size();
    if (dists.size() != n * kc) {
        throw std::invalid_argument("topk_recall: distribution matrix size mismatch");
    }
    std::vector<double> support(kc, 0.0);
    std::vector<double> hits(kc, 0.0);
    for (size_t i = 0; i < n; ++i) {
        int y = labels[i];
        support[y] += 1.0;
        int rank = topk_rank({dists.data() + i * kc, kc}, label_order, y);
        if (rank < k) hits[y] += 1.0;
    }
    if (avg == Averaging::weighted) {
        double total = 0.0, acc = 0.0;
        for (size_t c = 0; c < kc; ++c) {
            if (support[c] == 0.0) continue;
            acc += support[c] * (hits[c] / support[c]);
            total += support[c];
        }
        return total > 0.0 ? acc / total : 0.0;
    }
    double acc = 0.0;
    int m = 0;
    for (size_t c = 0; c < kc; ++c) {
        if (static_cast<int>(c) == excluded_label || support[c] == 0.0) continue;
        acc += hits[c] / support[c];
        m += 1;
    }
    return m > 0 ? acc / m : 0.0;
}

double f1_score(std::span<const int> labels, std::span<const int> predicted,
                size_t label_count, const std::vector<std::string>& label_order,
                Averaging avg, int excluded_label) {
    (void)label_order;
    if (labels.size() != predicted.size()) {
        throw std::invalid_argument("f1_score: length mismatch");
    }
    std::vector<double> tp(label_count, 0.0), fp(label_count, 0.0), fn(label_count, 0.0),
        support(label_count, 0.0);
    for (size_t i = 0; i < labels.size(); ++i) {
        int y = labels[i], p = predicted[i];
        support[y] += 1.0;
        if (y == p) {
            tp[y] += 1.0;
        } else {
            fp[p] += 1.0;
            fn[y] += 1.0;
        }
    }
    auto f1_of = [&](size_t c) {
        double prec = tp[c] + fp[c] > 0 ? tp[c] / (tp[c] + fp[c]) : 0.0;
        double rec = tp[c] + fn[c] > 0 ? tp[c] / (tp[c] + fn[c]) : 0.0;
        return prec + rec > 0 ? 2.0 * prec * rec / (prec + rec) : 0.0;
    };
    if (avg == Averaging::weighted) {
        double total = 0.0, acc = 0.0;
        for (size_t c = 0; c < label_count; ++c) {
            if (support[c] == 0.0) continue;
            acc += support[c] * f1_of(c);
            total += support[c];
        }
        return total > 0.0 ? acc / total : 0.0;
    }
    double acc = 0.0;
    int m = 0;
    for (size_t c = 0; c < label_count; ++c) {
        if (static_cast<int>(c) == excluded_label || support[c] == 0.0) continue;
        acc += f1_of(c);
        m += 1;
    }
    return m > 0 ? acc / m : 0.0;
}

double accuracy(std::span<const int> labels, std::span<const int> predicted) {
    if (labels.size() != predicted.size()) {
        throw std::invalid_argument("accuracy: length mismatch");
    }
    if (labels.empty()) return 0.0;
    double hits = 0.0;
    for (size_t i = 0; i < labels.size(); ++i) hits += labels[i] == predicted[i];
    return hits / static_cast<double>(labels.size());
}

BinaryMetrics binary_metrics(std::span<const int> labels, std::span<const int> predicted,
                             int positive_label) {
    if (labels.size() != predicted.size()) {
        throw std::invalid_argument("binary_metrics: length mismatch");
    }
    double tp = 0, fp = 0, fn = 0, tn = 0;
    for (size_t i = 0; i < labels.size(); ++i) {
        bool y = labels[i] == positive_label;
        bool p = predicted[i] == positive_label;
        if (y && p) tp += 1;
        else if (!y && p) fp += 1;
        else if (y && !p) fn += 1;
        else tn += 1;
    }
    BinaryMetrics m;
    m.precision = tp + fp > 0 ? tp / (tp + fp) : 0.0;
    m.recall = tp + fn > 0 ? tp / (tp + fn) : 0.0;
    m.f1 = m.precision + m.recall > 0
               ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
               : 0.0;
    m.accuracy = labels.empty() ? 0.0 : (tp + tn) / static_cast<double>(labels.size());
    return m;
}

std::vector<int> argmax_predictions(const std::vector<double>& dists, size_t n,
                                    const std::vector<std::string>& label_order) {
    size_t kc = label_order.size();
    std::vector<int> out(n);
    for (size_t i = 0; i < n; ++i) {
        const double* p = dists.data() + i * kc;
        int best = 0;
        for (size_t c = 1; c < kc; ++c) {
            if (p[c] > p[best] || (p[c] == p[best] && label_order[c] < label_order[best])) {
                best = static_cast<int>(c);
            }
        }
        out[i] = best;
    }
    return out;
}

}  // namespace mip
