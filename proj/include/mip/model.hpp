#pragma once

#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "mip/features.hpp"

namespace mip {

struct LogisticHyper;
struct GbdtHyper;

// Per-column standardization fitted on training data only. Non-numeric
// columns (indicators) pass through unchanged.
struct Scaler {
    std::vector<double> mean;
    std::vector<double> scale;  // 1 where not standardized or zero variance

    static Scaler fit(const LabeledDataset& ds);
    static Scaler identity(size_t width);
    void transform_row(double* x) const;
    std::vector<double> transform(std::span<const double> x) const;
};

// A trained predictor: feature vector in, probability distribution over the
// label order out. Distributions are non-negative and sum to 1 within 1e-6.
class ProbabilisticModel {
public:
    virtual ~ProbabilisticModel() = default;

    virtual std::string learner() const = 0;

    // x is a raw (unstandardized) feature vector matching `schema`.
    std::vector<double> predict_distribution(std::span<const double> x) const;

    // Row-major raw matrix; out is n x label_count. Rows are independent, so
    // this runs the rows through parallel_for.
    void predict_batch(const double* x, size_t n, double* out) const;

    // Gain-based importances; only tree models have them.
    virtual std::map<std::string, double> feature_importances() const;

    const FeatureSchema& schema() const { return schema_; }
    const std::vector<std::string>& label_order() const { return label_order_; }
    const Scaler& scaler() const { return scaler_; }
    const std::vector<double>& train_loss_curve() const { return train_loss_curve_; }

    std::string to_json_string() const;
    static std::unique_ptr<ProbabilisticModel> from_json_string(const std::string&);
    void save(const std::string& path) const;
    static std::unique_ptr<ProbabilisticModel> load(const std::string& path);

protected:
    // distribution from an already standardized vector
    virtual std::vector<double> predict_std(std::span<const double> x) const = 0;
    virtual void payload_to_json(void* json_out) const = 0;

    FeatureSchema schema_;
    std::vector<std::string> label_order_;
    Scaler scaler_;
    std::vector<double> train_loss_curve_;

    friend std::unique_ptr<ProbabilisticModel> train_logistic(const LabeledDataset&,
                                                              const LogisticHyper&,
                                                              uint64_t);
    friend std::unique_ptr<ProbabilisticModel> train_gbdt(const LabeledDataset&,
                                                          const GbdtHyper&, uint64_t);
    friend std::unique_ptr<ProbabilisticModel> logistic_from_json(const void*);
    friend std::unique_ptr<ProbabilisticModel> gbdt_from_json(const void*);
};

// k labels by descending probability; ties resolve in ascending label order.
std::vector<std::pair<std::string, double>> predict_topk(
    const ProbabilisticModel& model, std::span<const double> x, int k);

// Rank of label `label_idx` under the same ordering rule; 0 = top.
int topk_rank(std::span<const double> probs,
              const std::vector<std::string>& label_order, int label_idx);

}  // namespace mip
