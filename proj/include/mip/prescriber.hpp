#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mip/features.hpp"
#include "mip/model.hpp"

namespace mip {

struct Recommendation {
    int64_t case_id = 0;
    std::string session_id;
    int turn = 0;
    // descending renormalized probability over desirable activities only
    std::vector<std::pair<std::string, double>> items;
};

struct LatenessAssessment {
    int64_t case_id = 0;
    std::string session_id;
    int turn = 0;
    double risk_probability = 0.0;
    double threshold = 0.5;
    bool intervene = false;
};

// Crowd-wisdom next actions at one anchor: the full label distribution with
// fallback, disambiguations and session end removed, renormalized, top k.
// The model's regime/task must match the request.
Recommendation recommend_next(const ProbabilisticModel& model, const EventLog& log,
                              size_t row_index, FeatureRegime regime,
                              const BusinessCalendar& cal, int k = 3);

// Goal-driven deadline-risk check at one anchor. Throws if the anchor lies
// after the case's completion (nothing left to prescribe).
LatenessAssessment assess_lateness(const ProbabilisticModel& model, const EventLog& log,
                                   size_t row_index, FeatureRegime regime,
                                   const BusinessCalendar& cal, double threshold = 0.5);

// Filtering applied by recommend_next, exposed for reuse: drops undesirable
// labels and renormalizes.
std::vector<std::pair<std::string, double>> filter_recommendations(
    const std::vector<double>& dist, const std::vector<std::string>& label_order, int k);

enum class PrescribeMode { crowd, goal, both };
PrescribeMode parse_mode(const std::string& s);

// One JSON line per anchor, ordered by (case_id, timestamp, turn). flag_only
// keeps only anchors whose assessment says intervene. Interventions are
// structured "reminder" records; nothing is executed.
std::vector<std::string> prescribe_batch(const ProbabilisticModel* crowd_model,
                                         const ProbabilisticModel* goal_model,
                                         const EventLog& log, PrescribeMode mode,
                                         const BusinessCalendar& cal, int k = 3,
                                         double threshold = 0.5, bool flag_only = false);

}  // namespace mip
