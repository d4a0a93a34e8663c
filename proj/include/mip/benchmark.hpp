#pragma once

#include <map>
#include <string>
#include <vector>

#include "mip/features.hpp"
#include "mip/gbdt.hpp"
#include "mip/logistic.hpp"
#include "mip/metrics.hpp"

namespace mip {

enum class LearnerKind { logit, gbdt };
std::string learner_name(LearnerKind k);
LearnerKind parse_learner(const std::string& s);

struct BenchmarkOptions {
    int k_folds = 5;
    uint64_t seed = 7;
    LogisticHyper logit;
    GbdtHyper gbdt;
};

struct MetricsReport {
    std::string task;
    std::string learner;
    std::string regime;
    int k_folds = 0;
    uint64_t seed = 0;
    std::string fold_digest;  // hex of the exact train/test row assignment
    std::vector<std::map<std::string, double>> folds;
    std::map<std::string, double> mean;  // arithmetic average of folds
};

// Grouped k-fold cross-validation of one learner on one prepared dataset.
// Per fold: train on k-1 folds (standardization statistics come from the
// training rows only, inside the trainers), evaluate on the held-out fold.
MetricsReport run_benchmark(const LabeledDataset& ds, LearnerKind learner,
                            const BenchmarkOptions& opt);

// Convenience: featurize the log, then run.
MetricsReport run_benchmark(const EventLog& log, Task task, LearnerKind learner,
                            FeatureRegime regime, const BusinessCalendar& cal,
                            const BenchmarkOptions& opt);

// All learner x regime configurations for one task.
std::vector<MetricsReport> run_matrix(const EventLog& log, Task task,
                                      const BusinessCalendar& cal,
                                      const BenchmarkOptions& opt);

std::string reports_to_markdown(const std::vector<MetricsReport>& reports);
std::string reports_to_json(const std::vector<MetricsReport>& reports);

// Exposed for the leakage check: the exact row split used per fold and the
// digest over it.
std::pair<std::vector<size_t>, std::vector<size_t>> split_rows(
    const LabeledDataset& ds, const std::vector<int64_t>& test_groups);
uint64_t fold_assignment_digest(const LabeledDataset& ds,
                                const std::vector<std::vector<int64_t>>& folds);

}  // namespace mip
