#include "mip/features.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "mip/parallel.hpp"

namespace mip {

std::string FeatureRegime::name() const {
    if (!process_aware) return "npa-conv";
    switch (session) {
        case SessionDefinition::conv: return "pa-conv";
        case SessionDefinition::user: return "pa-user";
        case SessionDefinition::conv_user: return "pa-convuser";
    }
    return "pa-conv";
}

FeatureRegime FeatureRegime::parse(const std::string& s) {
    if (s == "npa-conv") return {false, SessionDefinition::conv};
    if (s == "pa-conv") return {true, SessionDefinition::conv};
    if (s == "pa-user") return {true, SessionDefinition::user};
    if (s == "pa-convuser" || s == "pa-conv+user") {
        return {true, SessionDefinition::conv_user};
    }
    throw std::invalid_argument(
        "unknown regime '" + s + "' (want npa-conv|pa-conv|pa-user|pa-convuser)");
}

const std::vector<FeatureRegime>& FeatureRegime::all() {
    static const std::vector<FeatureRegime> v = {
        {false, SessionDefinition::conv},
        {true, SessionDefinition::conv},
        {true, SessionDefinition::user},
        {true, SessionDefinition::conv_user}};
    return v;
}

std::string task_name(Task t) { return t == Task::next_activity ? "next" : "late"; }

Task parse_task(const std::string& s) {
    if (s == "next") return Task::next_activity;
    if (s == "late") return Task::lateness;
    throw std::invalid_argument("unknown task '" + s + "' (want next|late)");
}

FeatureSchema FeatureSchema::build(FeatureRegime regime, Task task) {
    FeatureSchema s;
    s.regime = regime;
    s.task = task;
    auto add = [&s](const std::string& name, bool numeric) {
        s.names.push_back(name);
        s.numeric.push_back(numeric);
    };
    for (const auto& a : activity_catalog()) add("prev_activity=" + a.label, false);
    add("prev_activity=none", false);
    add("role_team_leader", false);
    add("intent_confidence", true);
    add("intent_confidence_missing", false);
    add("score", true);
    add("score_missing", false);
    add("expecting_response", false);
    add("turns_in_session", true);
    bool conv_block = regime.process_aware &&
                      (regime.session == SessionDefinition::conv ||
                       regime.session == SessionDefinition::conv_user);
    bool user_block = regime.process_aware &&
                      (regime.session == SessionDefinition::user ||
                       regime.session == SessionDefinition::conv_user);
    if (conv_block) {
        for (const auto& a : activity_catalog()) add("conv_count_" + a.label, true);
        add("conversation_number", true);
    }
    if (user_block) {
        for (const auto& a : activity_catalog()) add("user_count_" + a.label, true);
    }
    if (task == Task::lateness) add("elapsed_working_days", true);
    return s;
}

bool is_anchor_row(const TurnRecord& r) { return is_known_activity(r.activity); }

std::vector<size_t> anchor_rows(const EventLog& log) {
    std::vector<size_t> out;
    for (size_t i = 0; i < log.size(); ++i) {
        if (is_anchor_row(log[i])) out.push_back(i);
    }
    return out;
}

namespace {

constexpr size_t kCatalogSize = 36;

struct BlockOffsets {
    size_t prev_onehot = 0;  // 37 slots
    size_t role = 37;
    size_t confidence = 38;  // value, missing
    size_t score = 40;       // value, missing
    size_t expecting = 42;
    size_t turns = 43;
    size_t npa_size = 44;
    size_t conv = 0;     // 36 counts + conversation_number
    size_t user = 0;     // 36 counts
    size_t elapsed = 0;  // lateness only

    static BlockOffsets of(const FeatureSchema& s) {
        BlockOffsets b;
        size_t pos = b.npa_size;
        bool conv_block = s.regime.process_aware &&
                          (s.regime.session == SessionDefinition::conv ||
                           s.regime.session == SessionDefinition::conv_user);
        bool user_block = s.regime.process_aware &&
                          (s.regime.session == SessionDefinition::user ||
                           s.regime.session == SessionDefinition::conv_user);
        if (conv_block) {
            b.conv = pos;
            pos += kCatalogSize + 1;
        }
        if (user_block) {
            b.user = pos;
            pos += kCatalogSize;
        }
        if (s.task == Task::lateness) {
            b.elapsed = pos;
            pos += 1;
        }
        return b;
    }
};

// npa attributes of the anchor turn plus the supplied counter blocks.
void fill_row(double* out, const FeatureSchema& schema, const BlockOffsets& off,
              const TurnRecord& r, const int* conv_counts, int conv_number,
              const int* user_counts, const BusinessCalendar& cal) {
    std::fill(out, out + schema.size(), 0.0);
    int aidx = activity_index(r.activity);
    out[off.prev_onehot + (aidx >= 0 ? static_cast<size_t>(aidx) : kCatalogSize)] = 1.0;
    out[off.role] = r.role == Role::team_leader ? 1.0 : 0.0;
    if (r.intent_confidence) {
        out[off.confidence] = *r.intent_confidence;
    } else {
        out[off.confidence + 1] = 1.0;
    }
    if (r.score) {
        out[off.score] = *r.score;
    } else {
        out[off.score + 1] = 1.0;
    }
    out[off.expecting] = r.expecting_response ? 1.0 : 0.0;
    out[off.turns] = static_cast<double>(r.turn);
    if (conv_counts) {
        for (size_t a = 0; a < kCatalogSize; ++a) {
            out[off.conv + a] = static_cast<double>(conv_counts[a]);
        }
        out[off.conv + kCatalogSize] = static_cast<double>(conv_number);
    }
    if (user_counts) {
        for (size_t a = 0; a < kCatalogSize; ++a) {
            out[off.user + a] = static_cast<double>(user_counts[a]);
        }
    }
    if (schema.task == Task::lateness) {
        out[off.elapsed] = cal.working_days_between(
            static_cast<double>(cal.process_start), static_cast<double>(r.timestamp));
    }
}

// Row indices per (case_id, user_id), in log order.
std::vector<std::vector<size_t>> user_case_groups(const EventLog& log) {
    std::map<std::pair<int64_t, std::string>, size_t> slot;
    std::vector<std::vector<size_t>> groups;
    for (size_t i = 0; i < log.size(); ++i) {
        auto key = std::make_pair(log[i].case_id, log[i].user_id);
        auto it = slot.find(key);
        if (it == slot.end()) {
            it = slot.emplace(key, groups.size()).first;
            groups.emplace_back();
        }
        groups[it->second].push_back(i);
    }
    return groups;
}

std::map<int64_t, bool> lateness_by_case(const EventLog& log, Timestamp deadline) {
    std::map<int64_t, bool> late;
    for (const auto& [case_id, rows] : log.by_case()) {
        std::optional<Timestamp> final_ts;
        for (size_t idx : rows) {
            if (log[idx].activity == "submit_final_nominations") {
                final_ts = log[idx].timestamp;
            }
        }
        if (!final_ts) {
            throw std::runtime_error("malformed log: case " + std::to_string(case_id) +
                                     " lacks submit_final_nominations");
        }
        late[case_id] = *final_ts > deadline;
    }
    return late;
}

LabeledDataset build_dataset(const EventLog& log, FeatureRegime regime, Task task,
                             const BusinessCalendar& cal,
                             std::optional<Timestamp> deadline,
                             bool pre_deadline_only) {
    if (log.empty()) throw std::invalid_argument("empty log");
    LabeledDataset ds;
    ds.schema = FeatureSchema::build(regime, task);
    if (task == Task::next_activity) {
        for (const auto& a : activity_catalog()) ds.label_order.push_back(a.label);
    } else {
        ds.label_order = {kLateLabel, kOnTimeLabel};
    }
    BlockOffsets off = BlockOffsets::of(ds.schema);

    Timestamp dl = deadline.value_or(cal.regular_deadline);
    std::map<int64_t, bool> late;
    if (task == Task::lateness) late = lateness_by_case(log, dl);

    std::vector<size_t> anchors = anchor_rows(log);
    std::vector<char> keep(anchors.size(), 1);
    if (task == Task::lateness && pre_deadline_only) {
        for (size_t i = 0; i < anchors.size(); ++i) {
            keep[i] = log[anchors[i]].timestamp <= dl;
        }
    }
    std::vector<size_t> anchor_slot(log.size(), static_cast<size_t>(-1));
    size_t n_rows = 0;
    for (size_t i = 0; i < anchors.size(); ++i) {
        if (keep[i]) anchor_slot[anchors[i]] = n_rows++;
    }

    size_t width = ds.schema.size();
    ds.x.assign(n_rows * width, 0.0);
    ds.labels.assign(n_rows, 0);
    ds.groups.assign(n_rows, 0);

    auto groups = user_case_groups(log);
    bool want_conv = off.conv != 0;
    bool want_user = off.user != 0;
    int end_label = task == Task::next_activity ? activity_index(kEndActivity) : -1;

    parallel_for(groups.size(), [&](size_t g) {
        int conv_counts[kCatalogSize] = {0};
        int user_counts[kCatalogSize] = {0};
        int conv_number = 0;
        const std::string* cur_session = nullptr;
        const auto& rows = groups[g];
        for (size_t pos = 0; pos < rows.size(); ++pos) {
            const TurnRecord& r = log[rows[pos]];
            if (!cur_session || *cur_session != r.session_id) {
                cur_session = &r.session_id;
                conv_number += 1;
                std::fill(conv_counts, conv_counts + kCatalogSize, 0);
            }
            size_t slot = anchor_slot[rows[pos]];
            if (is_anchor_row(r) && slot != static_cast<size_t>(-1)) {
                fill_row(&ds.x[slot * width], ds.schema, off, r,
                         want_conv ? conv_counts : nullptr, conv_number,
                         want_user ? user_counts : nullptr, cal);
                ds.groups[slot] = r.case_id;
                if (task == Task::next_activity) {
                    int label = end_label;
                    if (pos + 1 < rows.size() &&
                        log[rows[pos + 1]].session_id == r.session_id) {
                        label = activity_index(log[rows[pos + 1]].activity);
                        if (label < 0) label = end_label;
                    }
                    ds.labels[slot] = label;
                } else {
                    ds.labels[slot] = late.at(r.case_id) ? 0 : 1;
                }
            }
            int aidx = activity_index(r.activity);
            if (aidx >= 0) {
                conv_counts[aidx] += 1;
                user_counts[aidx] += 1;
            }
        }
    });
    return ds;
}

}  // namespace

std::vector<double> extract_features(const EventLog& log, size_t row_index,
                                     FeatureRegime regime, Task task,
                                     const BusinessCalendar& cal) {
    if (row_index >= log.size()) throw std::out_of_range("row index out of range");
    const TurnRecord& anchor = log[row_index];
    if (!is_anchor_row(anchor)) {
        throw std::invalid_argument("row is not a user turn");
    }
    FeatureSchema schema = FeatureSchema::build(regime, task);
    BlockOffsets off = BlockOffsets::of(schema);

    int conv_counts[kCatalogSize] = {0};
    int user_counts[kCatalogSize] = {0};
    int conv_number = 0;
    std::string seen_session;
    // prefix scan over this (user, case): counts strictly before the anchor
    for (size_t i = 0; i <= row_index; ++i) {
        const TurnRecord& r = log[i];
        if (r.case_id != anchor.case_id || r.user_id != anchor.user_id) continue;
        if (seen_session != r.session_id) {
            seen_session = r.session_id;
            conv_number += 1;
            std::fill(conv_counts, conv_counts + kCatalogSize, 0);
        }
        if (i == row_index) break;
        int aidx = activity_index(r.activity);
        if (aidx >= 0 && r.session_id == anchor.session_id) conv_counts[aidx] += 1;
        if (aidx >= 0) user_counts[aidx] += 1;
    }
    std::vector<double> out(schema.size(), 0.0);
    bool want_conv = off.conv != 0;
    bool want_user = off.user != 0;
    fill_row(out.data(), schema, off, anchor, want_conv ? conv_counts : nullptr,
             conv_number, want_user ? user_counts : nullptr, cal);
    return out;
}

LabeledDataset build_next_activity_dataset(const EventLog& log, FeatureRegime regime,
                                           const BusinessCalendar& cal) {
    return build_dataset(log, regime, Task::next_activity, cal, std::nullopt, false);
}

LabeledDataset build_lateness_dataset(const EventLog& log, FeatureRegime regime,
                                      const BusinessCalendar& cal,
                                      std::optional<Timestamp> deadline,
                                      bool pre_deadline_only) {
    return build_dataset(log, regime, Task::lateness, cal, deadline, pre_deadline_only);
}

void write_dataset_csv(const LabeledDataset& ds, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    for (const auto& n : ds.schema.names) f << n << ',';
    f << "label,group\n";
    size_t width = ds.schema.size();
    for (size_t i = 0; i < ds.rows(); ++i) {
        for (size_t j = 0; j < width; ++j) f << format_double(ds.x[i * width + j]) << ',';
        f << ds.label_order[ds.labels[i]] << ',' << ds.groups[i] << '\n';
    }
    if (!f) throw std::runtime_error("write failed: " + path);
}

LabeledDataset read_dataset_csv(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open: " + path);
    std::string line;
    if (!std::getline(f, line)) throw std::runtime_error(path + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> cols;
    {
        std::stringstream ss(line);
        std::string c;
        while (std::getline(ss, c, ',')) cols.push_back(c);
    }
    if (cols.size() < 3 || cols[cols.size() - 2] != "label" || cols.back() != "group") {
        throw std::runtime_error(path + ": expected trailing 'label,group' columns");
    }
    std::vector<std::string> feats(cols.begin(), cols.end() - 2);

    // infer (regime, task) from the column set, then demand an exact match
    bool has_conv = false, has_user = false, has_elapsed = false;
    for (const auto& n : feats) {
        if (n.rfind("conv_count_", 0) == 0) has_conv = true;
        if (n.rfind("user_count_", 0) == 0) has_user = true;
        if (n == "elapsed_working_days") has_elapsed = true;
    }
    FeatureRegime regime;
    if (has_conv && has_user) regime = {true, SessionDefinition::conv_user};
    else if (has_conv) regime = {true, SessionDefinition::conv};
    else if (has_user) regime = {true, SessionDefinition::user};
    else regime = {false, SessionDefinition::conv};
    Task task = has_elapsed ? Task::lateness : Task::next_activity;

    LabeledDataset ds;
    ds.schema = FeatureSchema::build(regime, task);
    if (ds.schema.names != feats) {
        throw std::runtime_error(path + ": header does not match the " + regime.name() +
                                 "/" + task_name(task) + " layout");
    }
    if (task == Task::next_activity) {
        for (const auto& a : activity_catalog()) ds.label_order.push_back(a.label);
    } else {
        ds.label_order = {kLateLabel, kOnTimeLabel};
    }
    std::map<std::string, int> label_idx;
    for (size_t i = 0; i < ds.label_order.size(); ++i) {
        label_idx[ds.label_order[i]] = static_cast<int>(i);
    }

    size_t width = ds.schema.size();
    size_t row = 1;
    while (std::getline(f, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string c;
        while (std::getline(ss, c, ',')) cells.push_back(c);
        if (cells.size() != width + 2) {
            throw std::runtime_error(path + ": row " + std::to_string(row) +
                                     ": wrong field count");
        }
        for (size_t j = 0; j < width; ++j) {
            double v = 0.0;
            auto [p, ec] =
                std::from_chars(cells[j].data(), cells[j].data() + cells[j].size(), v);
            if (ec != std::errc() || p != cells[j].data() + cells[j].size()) {
                throw std::runtime_error(path + ": row " + std::to_string(row) +
                                         ": bad number '" + cells[j] + "'");
            }
            ds.x.push_back(v);
        }
        auto it = label_idx.find(cells[width]);
        if (it == label_idx.end()) {
            throw std::runtime_error(path + ": row " + std::to_string(row) +
                                     ": unknown label '" + cells[width] + "'");
        }
        ds.labels.push_back(it->second);
        ds.groups.push_back(std::stoll(cells[width + 1]));
    }
    return ds;
}

}  // namespace mip
