#include "mip/benchmark.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "mip/model.hpp"
#include "mip/rng.hpp"

namespace mip {

std::string learner_name(LearnerKind k) {
    return k == LearnerKind::logit ? "logit" : "gbdt";
}

LearnerKind parse_learner(const std::string& s) {
    if (s == "logit" || s == "logistic") return LearnerKind::logit;
    if (s == "gbdt") return LearnerKind::gbdt;
    throw std::invalid_argument("unknown learner '" + s + "' (want logit|gbdt)");
}

namespace {

uint64_t fnv1a(uint64_t h, uint64_t v) {
    for (int b = 0; b < 8; ++b) {
        h ^= (v >> (b * 8)) & 0xFF;
        h *= 0x100000001B3ull;
    }
    return h;
}

LabeledDataset take_rows(const LabeledDataset& ds, const std::vector<size_t>& rows) {
    LabeledDataset out;
    out.schema = ds.schema;
    out.label_order = ds.label_order;
    size_t width = ds.schema.size();
    out.x.reserve(rows.size() * width);
    for (size_t r : rows) {
        out.x.insert(out.x.end(), ds.x.begin() + r * width,
                     ds.x.begin() + (r + 1) * width);
        out.labels.push_back(ds.labels[r]);
        out.groups.push_back(ds.groups[r]);
    }
    return out;
}

int label_index(const std::vector<std::string>& order, const std::string& label) {
    auto it = std::find(order.begin(), order.end(), label);
    return it == order.end() ? -1 : static_cast<int>(it - order.begin());
}

}  // namespace

std::pair<std::vector<size_t>, std::vector<size_t>> split_rows(
    const LabeledDataset& ds, const std::vector<int64_t>& test_groups) {
    std::set<int64_t> test(test_groups.begin(), test_groups.end());
    std::vector<size_t> train_rows, test_rows;
    for (size_t i = 0; i < ds.rows(); ++i) {
        (test.count(ds.groups[i]) ? test_rows : train_rows).push_back(i);
    }
    return {std::move(train_rows), std::move(test_rows)};
}

uint64_t fold_assignment_digest(const LabeledDataset& ds,
                                const std::vector<std::vector<int64_t>>& folds) {
    uint64_t h = 0xCBF29CE484222325ull;
    for (size_t f = 0; f < folds.size(); ++f) {
        auto [train_rows, test_rows] = split_rows(ds, folds[f]);
        h = fnv1a(h, f);
        h = fnv1a(h, train_rows.size());
        h = fnv1a(h, test_rows.size());
        for (size_t r : train_rows) h = fnv1a(h, r);
        for (size_t r : test_rows) h = fnv1a(h, ~static_cast<uint64_t>(r));
    }
    return h;
}

MetricsReport run_benchmark(const LabeledDataset& ds, LearnerKind learner,
                            const BenchmarkOptions& opt) {
    MetricsReport rep;
    rep.task = task_name(ds.schema.task);
    rep.learner = learner_name(learner);
    rep.regime = ds.schema.regime.name();
    rep.k_folds = opt.k_folds;
    rep.seed = opt.seed;

    auto folds = grouped_kfold(ds.groups, opt.k_folds, opt.seed);
    char digest[20];
    std::snprintf(digest, sizeof(digest), "%016llx",
                  static_cast<unsigned long long>(fold_assignment_digest(ds, folds)));
    rep.fold_digest = digest;

    int end_label = ds.schema.task == Task::next_activity
                        ? label_index(ds.label_order, kEndActivity)
                        : -1;
    int late_label = ds.schema.task == Task::lateness
                         ? label_index(ds.label_order, kLateLabel)
                         : -1;

    RngStream seeds = RngStream::root(opt.seed).child(0xF01D);
    for (size_t f = 0; f < folds.size(); ++f) {
        auto [train_rows, test_rows] = split_rows(ds, folds[f]);
        LabeledDataset train = take_rows(ds, train_rows);
        LabeledDataset test = take_rows(ds, test_rows);
        uint64_t fold_seed = seeds.child(f).next_u64();

        std::unique_ptr<ProbabilisticModel> model;
        if (learner == LearnerKind::logit) {
            model = train_logistic(train, opt.logit, fold_seed);
        } else {
            model = train_gbdt(train, opt.gbdt, fold_seed);
        }

        size_t kc = ds.label_order.size();
        std::vector<double> dists(test.rows() * kc);
        model->predict_batch(test.x.data(), test.rows(), dists.data());
        std::vector<int> preds = argmax_predictions(dists, test.rows(), ds.label_order);

        std::map<std::string, double> m;
        if (ds.schema.task == Task::next_activity) {
            m["accuracy"] = accuracy(test.labels, preds);
            m["weighted_top3_recall"] = topk_recall(test.labels, dists, ds.label_order,
                                                    3, Averaging::weighted, end_label);
            m["average_top3_recall"] = topk_recall(test.labels, dists, ds.label_order,
                                                   3, Averaging::average, end_label);
            m["weighted_f1"] = f1_score(test.labels, preds, kc, ds.label_order,
                                        Averaging::weighted, end_label);
            m["average_f1"] = f1_score(test.labels, preds, kc, ds.label_order,
                                       Averaging::average, end_label);
        } else {
            BinaryMetrics bm = binary_metrics(test.labels, preds, late_label);
            m["precision"] = bm.precision;
            m["recall"] = bm.recall;
            m["f1"] = bm.f1;
            m["accuracy"] = bm.accuracy;
        }
        rep.folds.push_back(std::move(m));
    }

    for (const auto& [key, value] : rep.folds[0]) {
        double sum = value;
        for (size_t f = 1; f < rep.folds.size(); ++f) sum += rep.folds[f].at(key);
        rep.mean[key] = sum / static_cast<double>(rep.folds.size());
    }
    return rep;
}

MetricsReport run_benchmark(const EventLog& log, Task task, LearnerKind learner,
                            FeatureRegime regime, const BusinessCalendar& cal,
                            const BenchmarkOptions& opt) {
    LabeledDataset ds = task == Task::next_activity
                            ? build_next_activity_dataset(log, regime, cal)
                            : build_lateness_dataset(log, regime, cal);
    return run_benchmark(ds, learner, opt);
}

std::vector<MetricsReport> run_matrix(const EventLog& log, Task task,
                                      const BusinessCalendar& cal,
                                      const BenchmarkOptions& opt) {
    std::vector<MetricsReport> out;
    for (LearnerKind learner : {LearnerKind::logit, LearnerKind::gbdt}) {
        for (const FeatureRegime& regime : FeatureRegime::all()) {
            out.push_back(run_benchmark(log, task, learner, regime, cal, opt));
        }
    }
    return out;
}

namespace {

std::string pretty_method(const MetricsReport& r) {
    std::string learner =
        r.learner == "logit" ? "Logistic Regression" : "Gradient Boosted Trees";
    std::string regime = r.regime;
    if (regime == "npa-conv") regime = "npa, conv";
    else if (regime == "pa-conv") regime = "pa, conv";
    else if (regime == "pa-user") regime = "pa, user";
    else if (regime == "pa-convuser") regime = "pa, conv+user";
    return learner + ", " + regime;
}

std::string fmt3(double v) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

}  // namespace

std::string reports_to_markdown(const std::vector<MetricsReport>& reports) {
    if (reports.empty()) return "";
    std::string out;
    bool next_task = reports[0].task == "next";
    if (next_task) {
        out += "| Prediction method | Weighted Top-3 Recall | Average Top-3 Recall | "
               "Weighted F1-score | Average F1-score | Accuracy |\n";
        out += "|---|---|---|---|---|---|\n";
        for (const auto& r : reports) {
            out += "| " + pretty_method(r) + " | " + fmt3(r.mean.at("weighted_top3_recall")) +
                   " | " + fmt3(r.mean.at("average_top3_recall")) + " | " +
                   fmt3(r.mean.at("weighted_f1")) + " | " + fmt3(r.mean.at("average_f1")) +
                   " | " + fmt3(r.mean.at("accuracy")) + " |\n";
        }
    } else {
        out += "| Prediction method | Precision | Recall | F1-score | Accuracy |\n";
        out += "|---|---|---|---|---|\n";
        for (const auto& r : reports) {
            out += "| " + pretty_method(r) + " | " + fmt3(r.mean.at("precision")) + " | " +
                   fmt3(r.mean.at("recall")) + " | " + fmt3(r.mean.at("f1")) + " | " +
                   fmt3(r.mean.at("accuracy")) + " |\n";
        }
    }
    return out;
}

std::string reports_to_json(const std::vector<MetricsReport>& reports) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : reports) {
        nlohmann::json folds = nlohmann::json::array();
        for (const auto& f : r.folds) folds.push_back(f);
        arr.push_back({{"task", r.task},
                       {"learner", r.learner},
                       {"regime", r.regime},
                       {"k_folds", r.k_folds},
                       {"seed", r.seed},
                       {"fold_digest", r.fold_digest},
                       {"folds", std::move(folds)},
                       {"mean", r.mean}});
    }
    return arr.dump(2) + "\n";
}

}  // namespace mip
