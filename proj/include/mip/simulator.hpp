#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mip/domain.hpp"
#include "mip/log_io.hpp"
#include "mip/rng.hpp"

namespace mip {

struct UserIdentity {
    std::string user_id;  // synthetic full name, unique per user
    Role role = Role::team_leader;
    Cohort cohort = Cohort::successful;
};

struct CaseContext {
    int64_t case_id = 0;
    UserIdentity team_leader;
    UserIdentity dept_manager;
    std::vector<std::string> employees;
    std::vector<std::string> nominees;  // non-empty subset of employees
};

struct Population {
    std::vector<UserIdentity> dept_managers;
    std::vector<UserIdentity> team_leaders;
};

// One planned user action; slot-filling turns carry the candidate name.
struct PlannedTurn {
    std::string activity;
    std::string entity;
};

// Deterministic generator for the full synthetic log. Each case draws an
// independent counter-based stream from (seed, case_id), so cases can be
// produced on any number of threads with identical output.
class Simulator {
public:
    // case_limit > 0 scales the run down to the first case_limit cases
    // (the manager population shrinks proportionally).
    Simulator(SimulationConfig config, uint64_t seed, int case_limit = 0);

    const SimulationConfig& config() const { return config_; }
    const Population& population() const { return population_; }
    const std::vector<CaseContext>& cases() const { return cases_; }

    std::vector<TurnRecord> simulate_case(const CaseContext& ctx) const;
    EventLog run() const;

private:
    SimulationConfig config_;
    uint64_t seed_;
    RngStream root_;
    Population population_;
    std::vector<CaseContext> cases_;
};

// One-call form: full log for (config, seed).
EventLog simulate(const SimulationConfig& config, uint64_t seed, int case_limit = 0);

}  // namespace mip
