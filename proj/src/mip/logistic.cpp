#include "mip/logistic.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "mip/parallel.hpp"
#include "mip/rng.hpp"

namespace mip {

void LogisticHyper::validate() const {
    if (l2_penalty < 0 || learning_rate <= 0 || max_epochs <= 0 || tolerance <= 0 ||
        batch_size <= 0) {
        throw std::invalid_argument("logistic hyperparameters must be positive");
    }
}

namespace {

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

// probs: n_idx x K softmax rows; returns summed cross-entropy.
double forward(const double* w, const double* xs, size_t width, size_t k_count,
               const std::vector<uint32_t>& idx, const std::vector<int>& labels,
               std::vector<double>& probs) {
    size_t stride = width + 1;
    probs.assign(idx.size() * k_count, 0.0);
    std::vector<double> losses(idx.size());
    parallel_for(idx.size(), [&](size_t i) {
        const double* x = xs + static_cast<size_t>(idx[i]) * width;
        double* p = probs.data() + i * k_count;
        double zmax = -1e300;
        for (size_t k = 0; k < k_count; ++k) {
            const double* wk = w + k * stride;
            double z = wk[width];  // bias
            for (size_t d = 0; d < width; ++d) z += wk[d] * x[d];
            p[k] = z;
            zmax = std::max(zmax, z);
        }
        double sum = 0.0;
        for (size_t k = 0; k < k_count; ++k) {
            p[k] = std::exp(p[k] - zmax);
            sum += p[k];
        }
        for (size_t k = 0; k < k_count; ++k) p[k] /= sum;
        double py = p[labels[idx[i]]];
        losses[i] = -std::log(std::max(py, 1e-300));
    });
    double total = 0.0;
    for (double l : losses) total += l;
    return total;
}

// grad layout matches w: K x (width+1). Deterministic: each coordinate sums
// over the batch serially; parallelism is across classes.
void gradient(const double* w, const double* xs, size_t width, size_t k_count,
              const std::vector<uint32_t>& idx, const std::vector<int>& labels,
              const std::vector<double>& probs, double l2, double* grad) {
    size_t stride = width + 1;
    double inv_b = 1.0 / static_cast<double>(idx.size());
    parallel_for(k_count, [&](size_t k) {
        double* gk = grad + k * stride;
        std::fill(gk, gk + stride, 0.0);
        for (size_t i = 0; i < idx.size(); ++i) {
            const double* x = xs + static_cast<size_t>(idx[i]) * width;
            double coef =
                probs[i * k_count + k] - (labels[idx[i]] == static_cast<int>(k) ? 1.0 : 0.0);
            for (size_t d = 0; d < width; ++d) gk[d] += coef * x[d];
            gk[width] += coef;
        }
        const double* wk = w + k * stride;
        for (size_t d = 0; d < width; ++d) gk[d] = gk[d] * inv_b + l2 * wk[d];
        gk[width] *= inv_b;
    });
}

double l2_term(const double* w, size_t width, size_t k_count, double l2) {
    size_t stride = width + 1;
    double sq = 0.0;
    for (size_t k = 0; k < k_count; ++k) {
        const double* wk = w + k * stride;
        for (size_t d = 0; d < width; ++d) sq += wk[d] * wk[d];
    }
    return 0.5 * l2 * sq;
}

}  // namespace

double logistic_loss_grad(std::span<const double> params, const LabeledDataset& ds,
                          double l2, std::span<double> grad_out) {
    size_t width = ds.schema.size();
    size_t k_count = ds.label_order.size();
    if (params.size() != k_count * (width + 1)) {
        throw std::invalid_argument("parameter vector size mismatch");
    }
    std::vector<uint32_t> idx(ds.rows());
    for (size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<uint32_t>(i);
    std::vector<double> probs;
    double ce = forward(params.data(), ds.x.data(), width, k_count, idx, ds.labels, probs);
    if (!grad_out.empty()) {
        if (grad_out.size() != params.size()) {
            throw std::invalid_argument("gradient buffer size mismatch");
        }
        gradient(params.data(), ds.x.data(), width, k_count, idx, ds.labels, probs, l2,
                 grad_out.data());
    }
    return ce / static_cast<double>(ds.rows()) +
           l2_term(params.data(), width, k_count, l2);
}

std::unique_ptr<ProbabilisticModel> train_logistic(const LabeledDataset& data,
                                                   const LogisticHyper& hyper,
                                                   uint64_t seed) {
    hyper.validate();
    check_trainable(data);

    auto model = std::make_unique<LogisticModel>();
    model->schema_ = data.schema;
    model->label_order_ = data.label_order;
    model->scaler_ = Scaler::fit(data);
    model->hyper = hyper;

    size_t width = data.schema.size();
    size_t k_count = data.label_order.size();
    size_t n = data.rows();
    size_t stride = width + 1;

    // standardized working copy
    LabeledDataset std_data;
    std_data.schema = data.schema;
    std_data.label_order = data.label_order;
    std_data.labels = data.labels;
    std_data.x = data.x;
    for (size_t i = 0; i < n; ++i) {
        model->scaler_.transform_row(std_data.x.data() + i * width);
    }

    std::vector<double> w(k_count * stride, 0.0);
    std::vector<double> w_backup;
    std::vector<double> grad(w.size());
    std::vector<double> probs;
    std::vector<uint32_t> order(n);
    for (size_t i = 0; i < n; ++i) order[i] = static_cast<uint32_t>(i);

    auto full_loss = [&]() {
        return logistic_loss_grad(w, std_data, hyper.l2_penalty, {});
    };

    RngStream rng = RngStream::root(seed);
    double prev = full_loss();
    model->train_loss_curve_.push_back(prev);
    double backoff = 1.0;

    for (int epoch = 1; epoch <= hyper.max_epochs; ++epoch) {
        w_backup = w;
        double lr = hyper.learning_rate * backoff / std::sqrt(static_cast<double>(epoch));
        RngStream es = rng.child(static_cast<uint64_t>(epoch));
        for (size_t i = n; i > 1; --i) {
            std::swap(order[i - 1], order[es.uniform_int(i)]);
        }
        for (size_t start = 0; start < n; start += hyper.batch_size) {
            size_t stop = std::min(n, start + hyper.batch_size);
            std::vector<uint32_t> batch(order.begin() + start, order.begin() + stop);
            forward(w.data(), std_data.x.data(), width, k_count, batch, std_data.labels,
                    probs);
            gradient(w.data(), std_data.x.data(), width, k_count, batch, std_data.labels,
                     probs, hyper.l2_penalty, grad.data());
            for (size_t j = 0; j < w.size(); ++j) w[j] -= lr * grad[j];
        }
        double cur = full_loss();
        if (cur > prev + hyper.tolerance) {
            // reject the epoch and retry with smaller steps
            w = w_backup;
            backoff *= 0.5;
            model->train_loss_curve_.push_back(prev);
            if (backoff < 1e-6) break;
            continue;
        }
        model->train_loss_curve_.push_back(cur);
        double delta = prev - cur;
        prev = cur;
        if (delta >= 0 && delta < hyper.tolerance) break;
    }
    model->weights = std::move(w);
    return model;
}

std::vector<double> LogisticModel::predict_std(std::span<const double> x) const {
    size_t width = schema_.size();
    size_t k_count = label_order_.size();
    size_t stride = width + 1;
    std::vector<double> p(k_count);
    double zmax = -1e300;
    for (size_t k = 0; k < k_count; ++k) {
        const double* wk = weights.data() + k * stride;
        double z = wk[width];
        for (size_t d = 0; d < width; ++d) z += wk[d] * x[d];
        p[k] = z;
        zmax = std::max(zmax, z);
    }
    double sum = 0.0;
    for (size_t k = 0; k < k_count; ++k) {
        p[k] = std::exp(p[k] - zmax);
        sum += p[k];
    }
    for (size_t k = 0; k < k_count; ++k) p[k] /= sum;
    return p;
}

void LogisticModel::payload_to_json(void* json_out) const {
    auto& j = *static_cast<nlohmann::json*>(json_out);
    j["weights"] = weights;
    j["l2_penalty"] = hyper.l2_penalty;
    j["learning_rate"] = hyper.learning_rate;
    j["max_epochs"] = hyper.max_epochs;
    j["tolerance"] = hyper.tolerance;
    j["batch_size"] = hyper.batch_size;
}

}  // namespace mip
