#pragma once

#include <memory>

#include "mip/model.hpp"

namespace mip {

struct GbdtHyper {
    int n_trees = 300;  // boosting rounds
    int max_depth = 6;
    double learning_rate = 0.1;
    int min_samples_leaf = 20;
    int histogram_bins = 64;
    double subsample = 1.0;
    double l2_leaf = 1.0;  // ridge term in the Newton leaf value

    void validate() const;
};

struct TreeNode {
    int feature = -1;       // -1: leaf
    double threshold = 0.0; // go left when x[feature] <= threshold
    int left = -1;
    int right = -1;
    double value = 0.0;     // leaf output
};

struct Tree {
    std::vector<TreeNode> nodes;  // nodes[0] is the root
    double predict(std::span<const double> x) const;
};

// Histogram-based gradient boosting. Multiclass fits one tree per label per
// round against the softmax gradients; the binary task fits a single tree
// per round with the logistic objective. Deterministic at any thread count.
std::unique_ptr<ProbabilisticModel> train_gbdt(const LabeledDataset& data,
                                               const GbdtHyper& hyper, uint64_t seed);

class GbdtModel : public ProbabilisticModel {
public:
    std::string learner() const override { return "gbdt"; }
    std::map<std::string, double> feature_importances() const override;

    // prediction from the first `rounds` boosting rounds only
    std::vector<double> predict_distribution_truncated(std::span<const double> x,
                                                       int rounds) const;
    int rounds() const { return static_cast<int>(rounds_.size()); }

    std::vector<double> base_scores;                // per class (1 for binary)
    std::vector<std::vector<Tree>> rounds_;         // [round][class]
    std::vector<double> gain_by_feature;            // aligned with schema
    bool binary = false;
    GbdtHyper hyper;

protected:
    std::vector<double> predict_std(std::span<const double> x) const override;
    void payload_to_json(void* json_out) const override;

    friend std::unique_ptr<ProbabilisticModel> gbdt_from_json(const void* j);

private:
    std::vector<double> scores_to_distribution(std::vector<double> raw) const;
};

}  // namespace mip
