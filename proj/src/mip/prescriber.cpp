#include "mip/prescriber.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include <json.hpp>

#include "mip/parallel.hpp"

namespace mip {

namespace {

void check_model(const ProbabilisticModel& model, FeatureRegime regime, Task task) {
    if (model.schema().task != task) {
        throw std::invalid_argument("model was trained for task '" +
                                    task_name(model.schema().task) + "', requested '" +
                                    task_name(task) + "'");
    }
    if (!(model.schema().regime == regime)) {
        throw std::invalid_argument("model regime '" + model.schema().regime.name() +
                                    "' does not match requested '" + regime.name() + "'");
    }
}

std::map<int64_t, Timestamp> completion_times(const EventLog& log) {
    std::map<int64_t, Timestamp> done;
    for (const auto& [case_id, rows] : log.by_case()) {
        for (size_t idx : rows) {
            if (log[idx].activity == "submit_final_nominations") {
                done[case_id] = log[idx].timestamp;
            }
        }
    }
    return done;
}

}  // namespace

std::vector<std::pair<std::string, double>> filter_recommendations(
    const std::vector<double>& dist, const std::vector<std::string>& label_order,
    int k) {
    if (k < 1) throw std::invalid_argument("recommendation k must be >= 1");
    std::vector<std::pair<std::string, double>> keep;
    double sum = 0.0;
    for (size_t c = 0; c < label_order.size(); ++c) {
        if (is_undesirable_label(label_order[c])) continue;
        keep.emplace_back(label_order[c], dist[c]);
        sum += dist[c];
    }
    for (auto& [label, p] : keep) {
        p = sum > 0.0 ? p / sum : 1.0 / static_cast<double>(keep.size());
    }
    std::sort(keep.begin(), keep.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    if (static_cast<int>(keep.size()) > k) keep.resize(k);
    return keep;
}

Recommendation recommend_next(const ProbabilisticModel& model, const EventLog& log,
                              size_t row_index, FeatureRegime regime,
                              const BusinessCalendar& cal, int k) {
    check_model(model, regime, Task::next_activity);
    auto x = extract_features(log, row_index, regime, Task::next_activity, cal);
    auto dist = model.predict_distribution(x);
    Recommendation rec;
    rec.case_id = log[row_index].case_id;
    rec.session_id = log[row_index].session_id;
    rec.turn = log[row_index].turn;
    rec.items = filter_recommendations(dist, model.label_order(), k);
    return rec;
}

LatenessAssessment assess_lateness(const ProbabilisticModel& model, const EventLog& log,
                                   size_t row_index, FeatureRegime regime,
                                   const BusinessCalendar& cal, double threshold) {
    check_model(model, regime, Task::lateness);
    const TurnRecord& anchor = log[row_index];
    auto done = completion_times(log);
    auto it = done.find(anchor.case_id);
    if (it != done.end() && anchor.timestamp > it->second) {
        throw std::invalid_argument("anchor lies after case completion");
    }
    auto x = extract_features(log, row_index, regime, Task::lateness, cal);
    auto dist = model.predict_distribution(x);
    int late_idx = 0;
    for (size_t c = 0; c < model.label_order().size(); ++c) {
        if (model.label_order()[c] == kLateLabel) late_idx = static_cast<int>(c);
    }
    LatenessAssessment a;
    a.case_id = anchor.case_id;
    a.session_id = anchor.session_id;
    a.turn = anchor.turn;
    a.risk_probability = dist[late_idx];
    a.threshold = threshold;
    a.intervene = a.risk_probability >= threshold;
    return a;
}

PrescribeMode parse_mode(const std::string& s) {
    if (s == "crowd") return PrescribeMode::crowd;
    if (s == "goal") return PrescribeMode::goal;
    if (s == "both") return PrescribeMode::both;
    throw std::invalid_argument("unknown mode '" + s + "' (want crowd|goal|both)");
}

std::vector<std::string> prescribe_batch(const ProbabilisticModel* crowd_model,
                                         const ProbabilisticModel* goal_model,
                                         const EventLog& log, PrescribeMode mode,
                                         const BusinessCalendar& cal, int k,
                                         double threshold, bool flag_only) {
    bool want_crowd = mode == PrescribeMode::crowd || mode == PrescribeMode::both;
    bool want_goal = mode == PrescribeMode::goal || mode == PrescribeMode::both;
    if (want_crowd && !crowd_model) {
        throw std::invalid_argument("crowd mode requires a next-activity model");
    }
    if (want_goal && !goal_model) {
        throw std::invalid_argument("goal mode requires a lateness model");
    }
    if (want_crowd) {
        check_model(*crowd_model, crowd_model->schema().regime, Task::next_activity);
    }
    if (want_goal) {
        check_model(*goal_model, goal_model->schema().regime, Task::lateness);
    }

    std::vector<size_t> anchors = anchor_rows(log);
    auto done = completion_times(log);

    // one featurization pass per needed dataset, then batched prediction
    std::vector<double> crowd_dists, goal_dists;
    if (want_crowd) {
        LabeledDataset ds =
            build_next_activity_dataset(log, crowd_model->schema().regime, cal);
        crowd_dists.resize(ds.rows() * crowd_model->label_order().size());
        crowd_model->predict_batch(ds.x.data(), ds.rows(), crowd_dists.data());
    }
    if (want_goal) {
        LabeledDataset ds = build_lateness_dataset(log, goal_model->schema().regime, cal);
        goal_dists.resize(ds.rows() * goal_model->label_order().size());
        goal_model->predict_batch(ds.x.data(), ds.rows(), goal_dists.data());
    }

    int late_idx = 0;
    if (want_goal) {
        for (size_t c = 0; c < goal_model->label_order().size(); ++c) {
            if (goal_model->label_order()[c] == kLateLabel) late_idx = static_cast<int>(c);
        }
    }

    std::vector<std::string> lines;
    for (size_t i = 0; i < anchors.size(); ++i) {
        const TurnRecord& r = log[anchors[i]];
        nlohmann::json line;
        line["case_id"] = r.case_id;
        line["session_id"] = r.session_id;
        line["turn"] = r.turn;
        line["timestamp"] = format_timestamp(r.timestamp);
        line["user_id"] = r.user_id;
        bool intervene = false;
        if (want_crowd) {
            size_t kc = crowd_model->label_order().size();
            std::vector<double> dist(crowd_dists.begin() + i * kc,
                                     crowd_dists.begin() + (i + 1) * kc);
            nlohmann::json items = nlohmann::json::array();
            for (const auto& [label, p] :
                 filter_recommendations(dist, crowd_model->label_order(), k)) {
                items.push_back({{"activity", label}, {"probability", p}});
            }
            line["recommendation"] = {{"k", k}, {"items", std::move(items)}};
        }
        if (want_goal) {
            auto it = done.find(r.case_id);
            bool prescribable = it == done.end() || r.timestamp <= it->second;
            if (prescribable) {
                size_t kc = goal_model->label_order().size();
                double risk = goal_dists[i * kc + late_idx];
                intervene = risk >= threshold;
                nlohmann::json g = {{"risk_probability", risk},
                                    {"threshold", threshold},
                                    {"intervene", intervene}};
                if (intervene) {
                    g["action"] = {{"type", "reminder"}, {"recipient", r.user_id}};
                }
                line["lateness"] = std::move(g);
            }
        }
        if (flag_only && !intervene) continue;
        lines.push_back(line.dump());
    }
    return lines;
}

}  // namespace mip
