#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mip/domain.hpp"
#include "mip/log_io.hpp"

namespace mip {

enum class SessionDefinition { conv, user, conv_user };
enum class Task { next_activity, lateness };

// The four evaluated feature settings: npa pairs only with conv; pa pairs
// with all three session definitions.
struct FeatureRegime {
    bool process_aware = false;
    SessionDefinition session = SessionDefinition::conv;

    std::string name() const;                       // "npa-conv", "pa-convuser", ...
    static FeatureRegime parse(const std::string&);  // throws on unknown
    static const std::vector<FeatureRegime>& all();  // the 4 configurations
    bool operator==(const FeatureRegime&) const = default;
};

std::string task_name(Task t);            // "next" / "late"
Task parse_task(const std::string& s);

// Column layout for one (regime, task): previous-turn attributes, then
// per-activity counters for the active session definitions, then the
// working-days timestamp for the lateness task.
struct FeatureSchema {
    FeatureRegime regime;
    Task task = Task::next_activity;
    std::vector<std::string> names;
    std::vector<bool> numeric;  // standardized columns

    size_t size() const { return names.size(); }
    static FeatureSchema build(FeatureRegime regime, Task task);
};

struct LabeledDataset {
    FeatureSchema schema;
    std::vector<std::string> label_order;  // catalog labels or {late, on_time}
    std::vector<double> x;                 // row-major, n_rows x schema.size()
    std::vector<int> labels;               // index into label_order
    std::vector<int64_t> groups;           // case_id per row

    size_t rows() const { return labels.size(); }
    std::vector<double> row(size_t i) const {
        return {x.begin() + i * schema.size(), x.begin() + (i + 1) * schema.size()};
    }
};

// Anchor rows are the user turns: every row whose activity is a catalog
// label (welcome rows are excluded).
bool is_anchor_row(const TurnRecord& r);
std::vector<size_t> anchor_rows(const EventLog& log);

// Feature vector for one anchor, computed from the log prefix only.
// Throws if row_index is out of range or not an anchor.
std::vector<double> extract_features(const EventLog& log, size_t row_index,
                                     FeatureRegime regime, Task task,
                                     const BusinessCalendar& calendar);

// One labeled row per user turn; label = next user turn's activity in the
// same session, or "end". Undesirable activities are kept.
LabeledDataset build_next_activity_dataset(const EventLog& log, FeatureRegime regime,
                                           const BusinessCalendar& calendar);

// Binary deadline-violation labels; the case is late iff its final
// submit_final_nominations exceeds `deadline`. pre_deadline_only keeps only
// anchors at or before the deadline.
LabeledDataset build_lateness_dataset(const EventLog& log, FeatureRegime regime,
                                      const BusinessCalendar& calendar,
                                      std::optional<Timestamp> deadline = std::nullopt,
                                      bool pre_deadline_only = false);

void write_dataset_csv(const LabeledDataset& ds, const std::string& path);
LabeledDataset read_dataset_csv(const std::string& path);

inline constexpr const char* kLateLabel = "late";
inline constexpr const char* kOnTimeLabel = "on_time";

}  // namespace mip
