#include "mip/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "mip/gbdt.hpp"
#include "mip/logistic.hpp"
#include "mip/parallel.hpp"

namespace mip {

using nlohmann::json;

Scaler Scaler::identity(size_t width) {
    Scaler s;
    s.mean.assign(width, 0.0);
    s.scale.assign(width, 1.0);
    return s;
}

Scaler Scaler::fit(const LabeledDataset& ds) {
    size_t width = ds.schema.size();
    Scaler s = identity(width);
    if (ds.rows() == 0) return s;
    for (size_t j = 0; j < width; ++j) {
        if (!ds.schema.numeric[j]) continue;
        double sum = 0.0, sq = 0.0;
        for (size_t i = 0; i < ds.rows(); ++i) {
            double v = ds.x[i * width + j];
            sum += v;
            sq += v * v;
        }
        double mean = sum / static_cast<double>(ds.rows());
        double var = sq / static_cast<double>(ds.rows()) - mean * mean;
        double sd = var > 1e-12 ? std::sqrt(var) : 1.0;
        s.mean[j] = mean;
        s.scale[j] = sd;
    }
    return s;
}

void Scaler::transform_row(double* x) const {
    for (size_t j = 0; j < mean.size(); ++j) x[j] = (x[j] - mean[j]) / scale[j];
}

std::vector<double> Scaler::transform(std::span<const double> x) const {
    std::vector<double> out(x.begin(), x.end());
    transform_row(out.data());
    return out;
}

std::vector<double> ProbabilisticModel::predict_distribution(
    std::span<const double> x) const {
    if (x.size() != schema_.size()) {
        throw std::invalid_argument("feature vector width mismatch");
    }
    return predict_std(scaler_.transform(x));
}

void ProbabilisticModel::predict_batch(const double* x, size_t n, double* out) const {
    size_t width = schema_.size();
    size_t k = label_order_.size();
    parallel_for(n, [&](size_t i) {
        auto dist = predict_std(scaler_.transform({x + i * width, width}));
        std::copy(dist.begin(), dist.end(), out + i * k);
    });
}

std::map<std::string, double> ProbabilisticModel::feature_importances() const {
    throw std::runtime_error("model '" + learner() + "' has no feature importances");
}

std::vector<std::pair<std::string, double>> predict_topk(
    const ProbabilisticModel& model, std::span<const double> x, int k) {
    if (k < 1) throw std::invalid_argument("predict_topk: k must be >= 1");
    std::vector<double> p = model.predict_distribution(x);
    const auto& labels = model.label_order();
    std::vector<size_t> order(p.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        if (p[a] != p[b]) return p[a] > p[b];
        return labels[a] < labels[b];
    });
    std::vector<std::pair<std::string, double>> out;
    for (size_t i = 0; i < order.size() && static_cast<int>(i) < k; ++i) {
        out.emplace_back(labels[order[i]], p[order[i]]);
    }
    return out;
}

int topk_rank(std::span<const double> probs, const std::vector<std::string>& labels,
              int label_idx) {
    int rank = 0;
    double pt = probs[label_idx];
    const std::string& lt = labels[label_idx];
    for (size_t c = 0; c < probs.size(); ++c) {
        if (static_cast<int>(c) == label_idx) continue;
        if (probs[c] > pt || (probs[c] == pt && labels[c] < lt)) ++rank;
    }
    return rank;
}

namespace {

json schema_to_json(const FeatureSchema& s) {
    return json{{"regime", s.regime.name()}, {"task", task_name(s.task)}};
}

FeatureSchema schema_from_json(const json& j) {
    return FeatureSchema::build(FeatureRegime::parse(j.at("regime")),
                                parse_task(j.at("task")));
}

}  // namespace

std::string ProbabilisticModel::to_json_string() const {
    json j;
    j["format_version"] = 1;
    j["learner"] = learner();
    j["schema"] = schema_to_json(schema_);
    j["feature_names"] = schema_.names;
    j["label_order"] = label_order_;
    j["scaler"] = {{"mean", scaler_.mean}, {"scale", scaler_.scale}};
    j["train_loss_curve"] = train_loss_curve_;
    json payload;
    payload_to_json(&payload);
    j["payload"] = std::move(payload);
    return j.dump();
}

void ProbabilisticModel::save(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << to_json_string() << '\n';
    if (!f) throw std::runtime_error("write failed: " + path);
}

std::unique_ptr<ProbabilisticModel> logistic_from_json(const void* jptr) {
    const json& j = *static_cast<const json*>(jptr);
    auto m = std::make_unique<LogisticModel>();
    const json& p = j.at("payload");
    m->weights = p.at("weights").get<std::vector<double>>();
    m->hyper.l2_penalty = p.at("l2_penalty").get<double>();
    m->hyper.learning_rate = p.at("learning_rate").get<double>();
    m->hyper.max_epochs = p.at("max_epochs").get<int>();
    m->hyper.tolerance = p.at("tolerance").get<double>();
    m->hyper.batch_size = p.at("batch_size").get<int>();
    return m;
}

std::unique_ptr<ProbabilisticModel> gbdt_from_json(const void* jptr) {
    const json& j = *static_cast<const json*>(jptr);
    auto m = std::make_unique<GbdtModel>();
    const json& p = j.at("payload");
    m->binary = p.at("binary").get<bool>();
    m->base_scores = p.at("base_scores").get<std::vector<double>>();
    m->gain_by_feature = p.at("gain_by_feature").get<std::vector<double>>();
    const json& hy = p.at("hyper");
    m->hyper.n_trees = hy.at("n_trees").get<int>();
    m->hyper.max_depth = hy.at("max_depth").get<int>();
    m->hyper.learning_rate = hy.at("learning_rate").get<double>();
    m->hyper.min_samples_leaf = hy.at("min_samples_leaf").get<int>();
    m->hyper.histogram_bins = hy.at("histogram_bins").get<int>();
    m->hyper.subsample = hy.at("subsample").get<double>();
    m->hyper.l2_leaf = hy.at("l2_leaf").get<double>();
    for (const json& round : p.at("rounds")) {
        std::vector<Tree> trees;
        for (const json& tj : round) {
            Tree t;
            for (const json& nj : tj.at("nodes")) {
                TreeNode n;
                n.feature = nj.at("f").get<int>();
                n.threshold = nj.at("t").get<double>();
                n.left = nj.at("l").get<int>();
                n.right = nj.at("r").get<int>();
                n.value = nj.at("v").get<double>();
                t.nodes.push_back(n);
            }
            trees.push_back(std::move(t));
        }
        m->rounds_.push_back(std::move(trees));
    }
    return m;
}

std::unique_ptr<ProbabilisticModel> ProbabilisticModel::from_json_string(
    const std::string& text) {
    json j = json::parse(text);
    if (j.at("format_version").get<int>() != 1) {
        throw std::runtime_error("unsupported model format version");
    }
    std::string learner = j.at("learner").get<std::string>();
    std::unique_ptr<ProbabilisticModel> m;
    if (learner == "logit") {
        m = logistic_from_json(&j);
    } else if (learner == "gbdt") {
        m = gbdt_from_json(&j);
    } else {
        throw std::runtime_error("unknown learner '" + learner + "'");
    }
    m->schema_ = schema_from_json(j.at("schema"));
    if (j.at("feature_names").get<std::vector<std::string>>() != m->schema_.names) {
        throw std::runtime_error("model feature names do not match its schema");
    }
    m->label_order_ = j.at("label_order").get<std::vector<std::string>>();
    m->scaler_.mean = j.at("scaler").at("mean").get<std::vector<double>>();
    m->scaler_.scale = j.at("scaler").at("scale").get<std::vector<double>>();
    m->train_loss_curve_ = j.at("train_loss_curve").get<std::vector<double>>();
    if (m->scaler_.mean.size() != m->schema_.size()) {
        throw std::runtime_error("model scaler width mismatch");
    }
    return m;
}

std::unique_ptr<ProbabilisticModel> ProbabilisticModel::load(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open: " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return from_json_string(ss.str());
}

}  // namespace mip
