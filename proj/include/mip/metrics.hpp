#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace mip {

enum class Averaging { weighted, average };

// k disjoint test partitions over case ids; every id lands in exactly one
// fold. Throws when there are fewer distinct groups than folds.
std::vector<std::vector<int64_t>> grouped_kfold(std::span<const int64_t> groups, int k,
                                                uint64_t seed);

// Fraction of label-c samples whose true label ranks inside the top k of the
// predicted distribution (ties resolve by ascending label). `weighted`
// weights per-label recall by test support over all labels; `average` is the
// unweighted mean over labels with support, excluding `excluded_label`.
double topk_recall(std::span<const int> labels, const std::vector<double>& dists,
                   const std::vector<std::string>& label_order, int k, Averaging avg,
                   int excluded_label = -1);

// Per-label F1 with the 0/0 -> 0 convention, combined like topk_recall.
double f1_score(std::span<const int> labels, std::span<const int> predicted,
                size_t label_count, const std::vector<std::string>& label_order,
                Averaging avg, int excluded_label = -1);

double accuracy(std::span<const int> labels, std::span<const int> predicted);

struct BinaryMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double accuracy = 0.0;
};

// Metrics for the positive class `positive_label`.
BinaryMetrics binary_metrics(std::span<const int> labels, std::span<const int> predicted,
                             int positive_label);

// argmax with the same deterministic tie-break as predict_topk
std::vector<int> argmax_predictions(const std::vector<double>& dists, size_t n,
                                    const std::vector<std::string>& label_order);

}  // namespace mip
