#include "mip/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

#include "mip/names.hpp"
#include "mip/parallel.hpp"
#include "mip/utterances.hpp"

namespace mip {

namespace {

constexpr uint64_t kNamesTag = 0x4E414D45;    // population names
constexpr uint64_t kCohortTag = 0x434F4852;   // cohort draws
constexpr uint64_t kCaseTag = 0x43415345;     // per-case streams
constexpr uint64_t kTokenFixTag = 0x544F4B46; // session-token collision repair

constexpr double kMinGapWd = 1.0 / 540.0;  // one working minute
constexpr double kMinTurnGapS = 1.0;
constexpr double kMaxTurnGapS = 300.0;

const char kTokenChars[] =
    "0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz";

std::string session_token(RngStream& rng) {
    std::string t(12, '0');
    for (char& c : t) c = kTokenChars[rng.uniform_int(62)];
    return t;
}

double round3(double v) { return std::round(v * 1000.0) / 1000.0; }

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

// Generates every turn of one case. All randomness comes from the case
// stream, consumed strictly sequentially.
class CaseRun {
public:
    CaseRun(const SimulationConfig& cfg, const CaseContext& ctx, RngStream stream)
        : cfg_(cfg), ctx_(ctx), cs_(stream) {
        for (const auto& sc : cfg_.scenarios) {
            for (const auto& rep : sc.report_activities) scenario_by_report_[rep] = &sc;
        }
        hardstop_day_ = (cfg_.calendar.hard_deadline / 86400) * 86400;
    }

    std::vector<TurnRecord> run() {
        auto tl_plan = build_team_leader_plan();
        double tl_end = emit_phase(tl_plan, ctx_.team_leader,
                                   static_cast<double>(cfg_.calendar.process_start));
        auto dm_plan = build_dept_manager_plan();
        emit_phase(dm_plan, ctx_.dept_manager, tl_end);
        return std::move(rows_);
    }

private:
    using Item = std::vector<PlannedTurn>;  // atomic group of planned turns

    bool bernoulli(double p) { return cs_.bernoulli(p); }

    int repeat_views() {
        return 1 + cs_.geometric_failures(1.0 - cfg_.sampling.repeat_view_success_prob);
    }

    void shuffle_items(std::vector<Item>& items) {
        for (size_t i = items.size(); i > 1; --i) {
            std::swap(items[i - 1], items[cs_.uniform_int(i)]);
        }
    }

    std::vector<PlannedTurn> flatten(const std::vector<Item>& items) {
        std::vector<PlannedTurn> plan;
        for (const auto& it : items) {
            plan.insert(plan.end(), it.begin(), it.end());
        }
        return plan;
    }

    std::vector<std::string> shuffled_nominees() {
        std::vector<std::string> noms = ctx_.nominees;
        for (size_t i = noms.size(); i > 1; --i) {
            std::swap(noms[i - 1], noms[cs_.uniform_int(i)]);
        }
        return noms;
    }

    // Nomination phase: report views (MIP criteria and yearly assessments
    // first-viewed before any nomination action), add/provide pairs per
    // nominee, optional nomination views, closing submit.
    std::vector<PlannedTurn> build_team_leader_plan() {
        std::vector<Item> items;
        std::vector<Item> mandatory_first;
        for (const auto& r : cfg_.reports) {
            if (!bernoulli(r.p_view_team_leader)) continue;
            int views = repeat_views();
            bool mandatory = r.activity == "report_mip_criteria" ||
                             r.activity == "report_yearly_assessments";
            if (mandatory) {
                mandatory_first.push_back({{r.activity, ""}});
                views -= 1;
            }
            for (int v = 0; v < views; ++v) items.push_back({{r.activity, ""}});
        }
        size_t first_block = items.size();
        std::vector<Item> blocks;
        for (const auto& name : shuffled_nominees()) {
            blocks.push_back({{"add_nomination", ""}, {"provide_candidate_name", name}});
        }
        for (auto& b : blocks) items.push_back(std::move(b));
        shuffle_items(items);
        first_block = 0;
        while (first_block < items.size() && items[first_block].size() == 1) {
            ++first_block;
        }
        for (auto& m : mandatory_first) {
            size_t pos = cs_.uniform_int(first_block + 1);
            items.insert(items.begin() + pos, std::move(m));
            ++first_block;
        }
        if (bernoulli(cfg_.sampling.view_nomination_prob)) {
            int count =
                1 + cs_.geometric_failures(1.0 - cfg_.sampling.view_nomination_success_prob);
            for (int v = 0; v < count; ++v) {
                size_t pos = first_block + 1 + cs_.uniform_int(items.size() - first_block);
                items.insert(items.begin() + pos,
                             Item{PlannedTurn{"view_nomination", ""}});
            }
        }
        auto plan = flatten(items);
        plan.push_back({"submit_nomination", ""});
        return plan;
    }

    // Approval phase: report views plus review/select/decide per nominee,
    // closing submit_final_nominations.
    std::vector<PlannedTurn> build_dept_manager_plan() {
        std::vector<Item> items;
        for (const auto& r : cfg_.reports) {
            if (!bernoulli(r.p_view_dept_manager)) continue;
            int views = repeat_views();
            for (int v = 0; v < views; ++v) items.push_back({{r.activity, ""}});
        }
        const double probs[3] = {cfg_.decision_probs.approve,
                                 cfg_.decision_probs.approve_with_correction,
                                 cfg_.decision_probs.reject};
        const char* decisions[3] = {"approve_nomination", "approve_with_correction",
                                    "reject_nomination"};
        for (const auto& name : shuffled_nominees()) {
            size_t d = cs_.categorical(probs);
            items.push_back({{"review_nominated_candidate", ""},
                             {"select_candidate_name", name},
                             {decisions[d], ""}});
        }
        shuffle_items(items);
        auto plan = flatten(items);
        plan.push_back({"submit_final_nominations", ""});
        return plan;
    }

    // Walks a user's plan through sessions: Poisson conversation count,
    // exponential working-time gaps, possible abandonment with rollover, and
    // the forced completion session on the hard-stop day.
    double emit_phase(const std::vector<PlannedTurn>& plan, const UserIdentity& user,
                      double phase_start) {
        const CohortProfile& prof = cfg_.cohort(user.role, user.cohort);
        size_t n_conv =
            1 + static_cast<size_t>(cs_.poisson(prof.mean_conversations_per_case - 1.0));
        n_conv = std::min(n_conv, plan.size());
        std::set<size_t> cuts;
        while (cuts.size() + 1 < n_conv) {
            cuts.insert(1 + cs_.uniform_int(plan.size() - 1));
        }
        std::vector<size_t> bounds(cuts.begin(), cuts.end());
        bounds.push_back(plan.size());

        size_t cursor = 0;
        size_t session_i = 0;
        double cur = phase_start;
        while (cursor < plan.size()) {
            double gap = std::max(cs_.exponential(prof.mean_intersession_interval_wd),
                                  kMinGapWd);
            double start = cfg_.calendar.add_working_time(cur, gap);
            bool forced = start >= static_cast<double>(hardstop_day_);
            size_t count;
            if (forced) {
                start = forced_start(user.role, start, cur);
                count = plan.size() - cursor;
            } else {
                size_t target =
                    session_i < bounds.size() ? bounds[session_i] : plan.size();
                if (target <= cursor) target = std::min(cursor + 1, plan.size());
                size_t chunk = target - cursor;
                count = bernoulli(prof.p_abandon_session) ? cs_.uniform_int(chunk) : chunk;
            }
            cur = emit_session(user, prof, plan, cursor, count, start);
            cursor += count;
            ++session_i;
        }
        return cur;
    }

    double forced_start(Role role, double computed, double prev_end) {
        double day = static_cast<double>(hardstop_day_);
        double lo = day + 8.5 * 3600.0 + cs_.uniform(0.0, 1800.0);
        double hi = day + (role == Role::team_leader ? 12.0 : 13.5) * 3600.0;
        double s = std::clamp(computed, lo, hi);
        if (prev_end > day) s = std::max(s, prev_end + cs_.uniform(900.0, 3600.0));
        return s;
    }

    double emit_session(const UserIdentity& user, const CohortProfile& prof,
                        const std::vector<PlannedTurn>& plan, size_t cursor,
                        size_t count, double start) {
        session_token_ = session_token(cs_);
        session_user_ = &user;
        turn_ = 0;
        clock_ = start;
        TurnRecord w = base_row();
        w.activity = kWelcomeActivity;
        w.chatbot_response = chatbot_response_stub(kWelcomeActivity);
        push_row(std::move(w), /*advance=*/false);
        for (size_t i = cursor; i < cursor + count; ++i) {
            emit_planned(plan[i], prof);
        }
        return clock_;
    }

    void emit_planned(const PlannedTurn& pt, const CohortProfile& prof) {
        const Activity& act = activity_by_label(pt.activity);
        auto it = act.kind == ActivityKind::report_view
                      ? scenario_by_report_.find(pt.activity)
                      : scenario_by_report_.end();
        if (it != scenario_by_report_.end() && bernoulli(cfg_.p_disambiguation)) {
            emit_fallbacks(prof);
            emit_disambiguation(*it->second);
        }
        emit_fallbacks(prof);
        switch (act.kind) {
            case ActivityKind::report_view:
                emit_intent_row(pt.activity, false);
                break;
            case ActivityKind::task:
                if (pt.activity == "provide_candidate_name" ||
                    pt.activity == "select_candidate_name") {
                    emit_slot_row(pt.activity, pt.entity);
                } else {
                    bool prompts = pt.activity == "add_nomination" ||
                                   pt.activity == "review_nominated_candidate";
                    emit_intent_row(pt.activity, prompts);
                }
                break;
            default:
                throw std::logic_error("unexpected planned activity " + pt.activity);
        }
    }

    void emit_fallbacks(const CohortProfile& prof) {
        int k = cs_.geometric_failures(prof.p_fallback_per_utterance,
                                       cfg_.sampling.fallback_cap);
        for (int j = 0; j < k; ++j) {
            TurnRecord r = base_row();
            r.activity = kFallbackActivity;
            r.user_utterance = compose_utterance(kFallbackActivity, cs_);
            r.chatbot_response = chatbot_response_stub(kFallbackActivity);
            double conf = round3(cs_.uniform(cfg_.sampling.fallback_confidence_min,
                                             cfg_.sampling.fallback_confidence_max));
            r.intent_confidence = conf;
            r.score = sample_score(conf);
            r.expecting_response = true;
            push_row(std::move(r));
        }
    }

    void emit_disambiguation(const DisambiguationScenario& sc) {
        TurnRecord r = base_row();
        r.activity = sc.disambiguation_activity;
        r.user_utterance = compose_utterance(sc.disambiguation_activity, cs_);
        r.chatbot_response = chatbot_response_stub(sc.disambiguation_activity);
        r.expecting_response = true;
        push_row(std::move(r));
    }

    void emit_intent_row(const std::string& activity, bool expecting) {
        TurnRecord r = base_row();
        r.activity = activity;
        r.user_utterance = compose_utterance(activity, cs_);
        r.chatbot_response = chatbot_response_stub(activity);
        r.intent = activity;
        double conf = round3(cs_.uniform(cfg_.sampling.intent_confidence_min,
                                         cfg_.sampling.intent_confidence_max));
        r.intent_confidence = conf;
        r.score = sample_score(conf);
        r.expecting_response = expecting;
        push_row(std::move(r));
    }

    void emit_slot_row(const std::string& activity, const std::string& entity) {
        TurnRecord r = base_row();
        r.activity = activity;
        r.user_utterance = entity;
        r.chatbot_response = chatbot_response_stub(activity);
        r.entity = entity;
        double econf = bernoulli(cfg_.sampling.entity_confidence_one_prob)
                           ? 1.0
                           : round3(cs_.uniform(cfg_.sampling.entity_confidence_min, 1.0));
        r.entity_confidence = econf;
        r.score = sample_score(econf);
        r.expecting_response = false;
        push_row(std::move(r));
    }

    double sample_score(double confidence) {
        double s = cfg_.sampling.score_scale * confidence +
                   cs_.normal(0.0, cfg_.sampling.score_noise_sd);
        return clamp01(round3(s));
    }

    TurnRecord base_row() {
        TurnRecord r;
        r.case_id = ctx_.case_id;
        r.session_id = session_token_;
        r.role = session_user_->role;
        r.user_id = session_user_->user_id;
        return r;
    }

    void push_row(TurnRecord r, bool advance = true) {
        if (advance) {
            double gap = std::clamp(
                cs_.lognormal_median(cfg_.sampling.turn_gap_median_seconds,
                                     cfg_.sampling.turn_gap_sigma),
                kMinTurnGapS, kMaxTurnGapS);
            clock_ += gap;
        }
        r.timestamp = static_cast<Timestamp>(std::floor(clock_));
        r.turn = turn_++;
        rows_.push_back(std::move(r));
    }

    const SimulationConfig& cfg_;
    const CaseContext& ctx_;
    RngStream cs_;
    std::map<std::string, const DisambiguationScenario*> scenario_by_report_;
    std::vector<TurnRecord> rows_;
    std::string session_token_;
    const UserIdentity* session_user_ = nullptr;
    int turn_ = 0;
    double clock_ = 0.0;
    int64_t hardstop_day_ = 0;
};

}  // namespace

Simulator::Simulator(SimulationConfig config, uint64_t seed, int case_limit)
    : config_(std::move(config)), seed_(seed), root_(RngStream::root(seed)) {
    config_.validate();
    int total = config_.total_cases();
    int n_cases = case_limit > 0 ? std::min(case_limit, total) : total;
    int n_dm =
        (n_cases + config_.teams_per_manager - 1) / config_.teams_per_manager;

    RngStream names = root_.child(kNamesTag);
    auto all_names = unique_full_names(static_cast<size_t>(n_dm) + n_cases, names);
    RngStream cohorts = root_.child(kCohortTag);
    for (int i = 0; i < n_dm; ++i) {
        Cohort c = cohorts.bernoulli(config_.struggling_fraction) ? Cohort::struggling
                                                                  : Cohort::successful;
        population_.dept_managers.push_back(
            {all_names[i], Role::department_manager, c});
    }
    for (int i = 0; i < n_cases; ++i) {
        Cohort c = cohorts.bernoulli(config_.struggling_fraction) ? Cohort::struggling
                                                                  : Cohort::successful;
        population_.team_leaders.push_back({all_names[n_dm + i], Role::team_leader, c});
    }

    cases_.reserve(n_cases);
    for (int i = 0; i < n_cases; ++i) {
        CaseContext ctx;
        ctx.case_id = i + 1;
        ctx.team_leader = population_.team_leaders[i];
        ctx.dept_manager = population_.dept_managers[i / config_.teams_per_manager];
        RngStream cs = root_.child(kCaseTag).child(static_cast<uint64_t>(ctx.case_id));
        int team = 0;
        for (int tries = 0; tries < 100; ++tries) {
            team = cs.poisson(config_.mean_team_size);
            if (team >= 4 && team <= 16) break;
            team = 0;
        }
        if (team == 0) team = std::clamp(static_cast<int>(config_.mean_team_size), 4, 16);
        std::set<std::string> used;
        while (static_cast<int>(ctx.employees.size()) < team) {
            std::string n = random_full_name(cs);
            if (used.insert(n).second) ctx.employees.push_back(std::move(n));
        }
        for (int tries = 0; tries < 100 && ctx.nominees.empty(); ++tries) {
            for (const auto& e : ctx.employees) {
                if (cs.bernoulli(config_.nomination_rate)) ctx.nominees.push_back(e);
            }
        }
        if (ctx.nominees.empty()) {
            ctx.nominees.push_back(ctx.employees[cs.uniform_int(ctx.employees.size())]);
        }
        cases_.push_back(std::move(ctx));
    }
}

std::vector<TurnRecord> Simulator::simulate_case(const CaseContext& ctx) const {
    // The context stream above consumed team/nominee draws; turn generation
    // uses a sibling stream so row output only depends on (seed, case_id).
    RngStream cs = root_.child(kCaseTag)
                       .child(static_cast<uint64_t>(ctx.case_id))
                       .child(0x524F5753);
    CaseRun run(config_, ctx, cs);
    return run.run();
}

EventLog Simulator::run() const {
    std::vector<std::vector<TurnRecord>> per_case(cases_.size());
    parallel_for(cases_.size(),
                 [&](size_t i) { per_case[i] = simulate_case(cases_[i]); });

    // concatenate in case order; repair the (astronomically unlikely)
    // session-token collision deterministically
    std::set<std::string> used_tokens;
    std::vector<TurnRecord> all;
    for (size_t i = 0; i < per_case.size(); ++i) {
        std::map<std::string, std::string> rename;
        uint64_t k = 0;
        for (auto& r : per_case[i]) {
            auto it = rename.find(r.session_id);
            if (it == rename.end()) {
                std::string tok = r.session_id;
                uint64_t attempt = 0;
                while (used_tokens.count(tok)) {
                    RngStream fix = root_.child(kTokenFixTag)
                                        .child(static_cast<uint64_t>(r.case_id))
                                        .child(k)
                                        .child(++attempt);
                    tok = session_token(fix);
                }
                used_tokens.insert(tok);
                it = rename.emplace(r.session_id, tok).first;
                ++k;
            }
            r.session_id = it->second;
            all.push_back(std::move(r));
        }
    }
    return EventLog(std::move(all));
}

EventLog simulate(const SimulationConfig& config, uint64_t seed, int case_limit) {
    Simulator sim(config, seed, case_limit);
    return sim.run();
}

}  // namespace mip
