#include "mip/utterances.hpp"

#include <map>
#include <stdexcept>

#include "mip/domain.hpp"

namespace mip {

namespace {

struct ReportPhrases {
    const char* label;
    const char* spoken;  // how users refer to it
    const char* stub;    // chatbot reply
};

// Spoken forms feed the template builder below; the lead-time entry keeps the
// canonical "view lead time table" phrasing.
const ReportPhrases kReports[] = {
    {"report_absence", "absence", "Absence Report"},
    {"report_bugs_fixed", "bugs fixed", "Bugs Fixed Report"},
    {"report_client_feedback", "client feedback", "Client Feedback Report"},
    {"report_code_churn", "code churn", "Code Churn Report"},
    {"report_compensation", "compensation", "Compensation Report"},
    {"report_defects_repair_time", "defects repair time", "Defects Repair Time Report"},
    {"report_features_shipped", "features shipped", "Features Shipped Report"},
    {"report_innovation_and_patents", "innovation and patents",
     "Innovation And Patents Report"},
    {"report_internal_feedback", "internal feedback", "Internal Feedback Report"},
    {"report_lead_time", "lead time", "Lead Time Report"},
    {"report_learning_activities", "learning activities", "Learning Activities Report"},
    {"report_mip_criteria", "MIP criteria", "MIP Criteria Report"},
    {"report_mip_history", "MIP history", "MIP History Report"},
    {"report_overtime", "overtime", "Overtime Report"},
    {"report_product_defects", "product defects", "Product Defects Report"},
    {"report_project_assessments", "project assessments", "Project Assessments Report"},
    {"report_project_costs", "project costs", "Project Costs Report"},
    {"report_pull_requests", "pull requests", "Pull Requests Report"},
    {"report_sprints_velocity", "sprints velocity", "Sprints Velocity Report"},
    {"report_yearly_assessments", "yearly assessments", "Yearly Assessments Report"},
};

std::map<std::string, std::vector<std::string>> build_templates() {
    std::map<std::string, std::vector<std::string>> t;
    for (const auto& r : kReports) {
        std::string n = r.spoken;
        t[r.label] = {"view " + n + " table", "show " + n + " report",
                      "open the " + n + " report", "I want to see " + n,
                      n + " report please", "display " + n + " data"};
    }
    t["disambig_defects"] = {"I need defects report", "defects report",
                             "show me defects", "open defects data",
                             "defects overview please"};
    t["disambig_feedback"] = {"show feedback report", "feedback report",
                              "I want to see feedback", "open feedback",
                              "feedback data please"};
    t["disambig_mip"] = {"MIP data", "show MIP report", "open MIP",
                         "I need the MIP numbers", "MIP overview please"};
    t["disambig_project"] = {"view project data", "project report",
                             "show me the project numbers", "open project overview",
                             "project data please"};
    t["fallback"] = {"hmm not sure what to do now", "asdf report maybe",
                     "can you do the thing", "where is the stuff",
                     "help me with this please", "what now"};
    t["add_nomination"] = {"add nomination", "I want to nominate someone",
                           "nominate a candidate", "start a new nomination",
                           "add a new nominee"};
    t["provide_candidate_name"] = {"Alex Morgan", "Jordan Lee", "Sam Carter",
                                   "Robin Blake", "Casey Reed"};
    t["view_nomination"] = {"view nomination", "show my nominations",
                            "list nominated candidates", "open nominations",
                            "see current nominations"};
    t["submit_nomination"] = {"submit nomination", "submit my nominations",
                              "finalize nomination", "send nominations",
                              "submit the nomination list"};
    t["select_candidate_name"] = {"Alex Morgan", "Jordan Lee", "Sam Carter",
                                  "Robin Blake", "Casey Reed"};
    t["review_nominated_candidate"] = {"review nominated candidate",
                                       "review a nomination", "open candidate review",
                                       "review next candidate",
                                       "let us review a nominee"};
    t["approve_nomination"] = {"approve nomination", "approve this candidate",
                               "approve", "approve the nomination",
                               "I approve this nominee"};
    t["approve_with_correction"] = {"approve with correction",
                                    "approve but change the amount",
                                    "approve with changes", "approve with an adjustment",
                                    "approve and correct the increase"};
    t["reject_nomination"] = {"reject nomination", "reject this candidate", "reject",
                              "decline the nomination", "do not approve this nominee"};
    t["submit_final_nominations"] = {"submit final nominations", "submit final decisions",
                                     "finalize and submit", "send final nominations",
                                     "submit all decisions"};
    t["end"] = {"bye", "done for now", "thanks that is all", "exit", "quit"};
    return t;
}

std::map<std::string, std::string> build_stubs() {
    std::map<std::string, std::string> s;
    for (const auto& r : kReports) s[r.label] = r.stub;
    s["disambig_defects"] = "Disambiguation Options";
    s["disambig_feedback"] = "Disambiguation Options";
    s["disambig_mip"] = "Disambiguation Options";
    s["disambig_project"] = "Disambiguation Options";
    s["fallback"] = "Fallback Message";
    s["add_nomination"] = "Candidate Name Prompt";
    s["provide_candidate_name"] = "Nomination Added";
    s["view_nomination"] = "Nomination List";
    s["submit_nomination"] = "Nomination Submitted";
    s["select_candidate_name"] = "Candidate Details";
    s["review_nominated_candidate"] = "Candidate Name Prompt";
    s["approve_nomination"] = "Nomination Approved";
    s["approve_with_correction"] = "Nomination Approved With Correction";
    s["reject_nomination"] = "Nomination Rejected";
    s["submit_final_nominations"] = "Final Nominations Submitted";
    s["end"] = "Session End";
    s[kWelcomeActivity] = "Welcome Message";
    return s;
}

}  // namespace

const std::vector<std::string>& utterance_templates(const std::string& activity) {
    static const auto templates = build_templates();
    auto it = templates.find(activity);
    if (it == templates.end()) {
        throw std::invalid_argument("no utterance templates for intent '" + activity + "'");
    }
    return it->second;
}

std::string compose_utterance(const std::string& activity, RngStream& rng) {
    const auto& t = utterance_templates(activity);
    return t[rng.uniform_int(t.size())];
}

const std::string& chatbot_response_stub(const std::string& activity) {
    static const auto stubs = build_stubs();
    auto it = stubs.find(activity);
    if (it == stubs.end()) {
        throw std::invalid_argument("no chatbot stub for activity '" + activity + "'");
    }
    return it->second;
}

}  // namespace mip
