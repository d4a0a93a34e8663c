#pragma once

#include <memory>
#include <span>

#include "mip/model.hpp"

namespace mip {

struct LogisticHyper {
    double l2_penalty = 1e-4;
    double learning_rate = 0.1;  // decays as 1/sqrt(epoch)
    int max_epochs = 200;
    double tolerance = 1e-6;     // stop when the epoch loss delta falls below
    int batch_size = 256;

    void validate() const;
};

// Multinomial softmax regression trained by mini-batch gradient descent on
// the L2-regularized cross-entropy. Deterministic for fixed (data, hyper,
// seed) at any thread count. Requires >= 2 distinct labels and finite
// features. Input features are standardized internally (statistics from
// `data` itself).
std::unique_ptr<ProbabilisticModel> train_logistic(const LabeledDataset& data,
                                                   const LogisticHyper& hyper,
                                                   uint64_t seed);

// Full-batch objective and gradient for parameter vector `params`, laid out
// as label-major [K x (D+1)] with the bias in the last column. Exposed so
// tests can check the analytic gradient against finite differences.
double logistic_loss_grad(std::span<const double> params, const LabeledDataset& data,
                          double l2_penalty, std::span<double> grad_out);

class LogisticModel : public ProbabilisticModel {
public:
    std::string learner() const override { return "logit"; }

    std::vector<double> weights;  // K x (D+1), bias in the last column
    LogisticHyper hyper;

protected:
    std::vector<double> predict_std(std::span<const double> x) const override;
    void payload_to_json(void* json_out) const override;

    friend std::unique_ptr<ProbabilisticModel> logistic_from_json(const void* j);
    friend std::unique_ptr<ProbabilisticModel> train_logistic(const LabeledDataset&,
                                                              const LogisticHyper&,
                                                              uint64_t);
};

}  // namespace mip
