// Command-line workbench: simulate MIP chatbot event logs, validate and
// featurize them, train the two predictors, reproduce the benchmark tables,
// and emit next-action recommendations and deadline alerts.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "mip/benchmark.hpp"
#include "mip/parallel.hpp"
#include "mip/prescriber.hpp"
#include "mip/simulator.hpp"

namespace {

mip::SimulationConfig load_config(const std::string& path) {
    if (path.empty()) return mip::default_config();
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open config: " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return mip::SimulationConfig::from_json_string(ss.str());
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << text;
    if (!f) throw std::runtime_error("write failed: " + path);
}

void add_threads_option(CLI::App* cmd, int& threads) {
    cmd->add_option("--threads", threads,
                    "worker threads (1 = serial reference, 0 = hardware default)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"MIP chatbot process workbench"};
    app.require_subcommand(1);
    int threads = 0;

    // config init
    auto* config_cmd = app.add_subcommand("config", "configuration utilities");
    config_cmd->require_subcommand(1);
    auto* config_init = config_cmd->add_subcommand(
        "init", "write the default simulation configuration with explicit values");
    std::string config_out = "mip_config.json";
    config_init->add_option("--out", config_out, "output JSON path");

    // simulate
    auto* sim_cmd = app.add_subcommand("simulate", "generate a synthetic event log");
    std::string sim_config, sim_out = "mip_log.csv";
    uint64_t sim_seed = mip::default_config().master_seed;
    bool sim_seed_given = false;
    int sim_cases = 0;
    sim_cmd->add_option("--config", sim_config, "config JSON (default: built-in)");
    sim_cmd->add_option("--seed", sim_seed, "master seed")
        ->each([&](const std::string&) { sim_seed_given = true; });
    sim_cmd->add_option("--out", sim_out, "output CSV path")->required();
    sim_cmd->add_option("--cases", sim_cases, "scale down to this many cases");
    add_threads_option(sim_cmd, threads);

    // validate
    auto* val_cmd = app.add_subcommand("validate", "check a log against the invariants");
    std::string val_in;
    val_cmd->add_option("--in", val_in, "log CSV")->required();

    // featurize
    auto* feat_cmd = app.add_subcommand("featurize", "build a labeled dataset");
    std::string feat_in, feat_out, feat_task = "next", feat_regime = "pa-conv";
    std::string feat_config, feat_deadline;
    bool pre_deadline_only = false;
    feat_cmd->add_option("--in", feat_in, "log CSV")->required();
    feat_cmd->add_option("--task", feat_task, "next|late");
    feat_cmd->add_option("--regime", feat_regime,
                         "npa-conv|pa-conv|pa-user|pa-convuser");
    feat_cmd->add_option("--out", feat_out, "dataset CSV path")->required();
    feat_cmd->add_option("--config", feat_config, "config JSON for the calendar");
    feat_cmd->add_option("--deadline", feat_deadline,
                         "override deadline timestamp (late task)");
    feat_cmd->add_flag("--pre-deadline-only", pre_deadline_only,
                       "keep only anchors at or before the deadline");
    add_threads_option(feat_cmd, threads);

    // train
    auto* train_cmd = app.add_subcommand("train", "fit a probabilistic model");
    std::string train_data, train_out = "model.json", train_learner = "gbdt";
    uint64_t train_seed = 1;
    mip::LogisticHyper logit_hyper;
    mip::GbdtHyper gbdt_hyper;
    train_cmd->add_option("--data", train_data, "dataset CSV")->required();
    train_cmd->add_option("--learner", train_learner, "logit|gbdt");
    train_cmd->add_option("--out", train_out, "model JSON path");
    train_cmd->add_option("--seed", train_seed, "training seed");
    train_cmd->add_option("--l2", logit_hyper.l2_penalty, "logit: L2 penalty");
    train_cmd->add_option("--lr", logit_hyper.learning_rate, "logit: learning rate");
    train_cmd->add_option("--epochs", logit_hyper.max_epochs, "logit: max epochs");
    train_cmd->add_option("--batch", logit_hyper.batch_size, "logit: mini-batch size");
    train_cmd->add_option("--tol", logit_hyper.tolerance, "logit: loss tolerance");
    train_cmd->add_option("--trees", gbdt_hyper.n_trees, "gbdt: boosting rounds");
    train_cmd->add_option("--depth", gbdt_hyper.max_depth, "gbdt: max depth");
    train_cmd->add_option("--gbdt-lr", gbdt_hyper.learning_rate, "gbdt: learning rate");
    train_cmd->add_option("--min-leaf", gbdt_hyper.min_samples_leaf,
                          "gbdt: min samples per leaf");
    train_cmd->add_option("--bins", gbdt_hyper.histogram_bins, "gbdt: histogram bins");
    train_cmd->add_option("--subsample", gbdt_hyper.subsample, "gbdt: row subsample");
    train_cmd->add_option("--l2-leaf", gbdt_hyper.l2_leaf, "gbdt: leaf ridge term");
    add_threads_option(train_cmd, threads);

    // evaluate
    auto* eval_cmd = app.add_subcommand(
        "evaluate", "cross-validated goodness-of-fit tables");
    std::string eval_in, eval_task = "next", eval_config;
    std::string eval_learner = "gbdt", eval_regime = "pa-convuser";
    std::string eval_out_json, eval_out_md;
    bool eval_matrix = false;
    uint64_t eval_seed = 7;
    int eval_folds = 5;
    mip::LogisticHyper eval_logit;
    mip::GbdtHyper eval_gbdt;
    int eval_gbdt_trees = -1;
    int eval_epochs = -1;
    eval_cmd->add_option("--in", eval_in, "log CSV")->required();
    eval_cmd->add_option("--task", eval_task, "next|late");
    eval_cmd->add_flag("--matrix", eval_matrix, "run all learner x regime configurations");
    eval_cmd->add_option("--learner", eval_learner, "single run: logit|gbdt");
    eval_cmd->add_option("--regime", eval_regime, "single run: feature regime");
    eval_cmd->add_option("--seed", eval_seed, "fold seed");
    eval_cmd->add_option("--folds", eval_folds, "number of folds");
    eval_cmd->add_option("--config", eval_config, "config JSON for the calendar");
    eval_cmd->add_option("--out-json", eval_out_json, "write the JSON table here");
    eval_cmd->add_option("--out-md", eval_out_md, "write the Markdown table here");
    eval_cmd->add_option("--gbdt-trees", eval_gbdt_trees,
                         "override gbdt rounds for this run");
    eval_cmd->add_option("--epochs", eval_epochs, "override logit epochs for this run");
    add_threads_option(eval_cmd, threads);

    // recommend
    auto* rec_cmd = app.add_subcommand(
        "recommend", "crowd-wisdom recommendations and deadline alerts");
    std::string rec_in, rec_mode = "both", rec_out = "report.jsonl", rec_config;
    std::vector<std::string> rec_models;
    int rec_k = 3;
    double rec_threshold = 0.5;
    bool rec_flag_only = false;
    rec_cmd->add_option("--in", rec_in, "log CSV")->required();
    rec_cmd->add_option("--model", rec_models,
                        "model JSON (repeat for both tasks in mode 'both')")
        ->required();
    rec_cmd->add_option("--mode", rec_mode, "crowd|goal|both");
    rec_cmd->add_option("--k", rec_k, "recommendations per anchor");
    rec_cmd->add_option("--threshold", rec_threshold, "intervention threshold");
    rec_cmd->add_flag("--flag-only", rec_flag_only, "emit only intervene=true anchors");
    rec_cmd->add_option("--out", rec_out, "JSONL output path");
    rec_cmd->add_option("--config", rec_config, "config JSON for the calendar");
    add_threads_option(rec_cmd, threads);

    CLI11_PARSE(app, argc, argv);
    if (threads != 0) mip::set_max_threads(threads);

    try {
        if (*config_init) {
            write_text(config_out, mip::default_config().to_json_string());
            std::cout << "wrote " << config_out << "\n";
        } else if (*sim_cmd) {
            mip::SimulationConfig cfg = load_config(sim_config);
            uint64_t seed = sim_seed_given ? sim_seed : cfg.master_seed;
            mip::EventLog log = mip::simulate(cfg, seed, sim_cases);
            mip::write_csv(log, sim_out);
            std::cout << "wrote " << sim_out << " (" << log.size() << " turns, "
                      << log.by_case().size() << " cases)\n";
        } else if (*val_cmd) {
            mip::EventLog log = mip::read_csv_file(val_in);
            auto violations = mip::validate(log);
            for (const auto& v : violations) {
                std::cout << v.rule << ": case " << v.case_id << ", session "
                          << v.session_id << ", turn " << v.turn << ": " << v.detail
                          << "\n";
            }
            if (!violations.empty()) {
                std::cout << violations.size() << " violation(s)\n";
                return 1;
            }
            std::cout << "ok: " << log.size() << " turns, " << log.by_case().size()
                      << " cases\n";
        } else if (*feat_cmd) {
            mip::SimulationConfig cfg = load_config(feat_config);
            mip::EventLog log = mip::read_csv_file(feat_in);
            mip::FeatureRegime regime = mip::FeatureRegime::parse(feat_regime);
            mip::LabeledDataset ds;
            if (mip::parse_task(feat_task) == mip::Task::next_activity) {
                ds = mip::build_next_activity_dataset(log, regime, cfg.calendar);
            } else {
                std::optional<mip::Timestamp> deadline;
                if (!feat_deadline.empty()) {
                    deadline = mip::parse_timestamp(feat_deadline);
                }
                ds = mip::build_lateness_dataset(log, regime, cfg.calendar, deadline,
                                                 pre_deadline_only);
            }
            mip::write_dataset_csv(ds, feat_out);
            std::cout << "wrote " << feat_out << " (" << ds.rows() << " rows, "
                      << ds.schema.size() << " features)\n";
        } else if (*train_cmd) {
            mip::LabeledDataset ds = mip::read_dataset_csv(train_data);
            std::unique_ptr<mip::ProbabilisticModel> model;
            if (mip::parse_learner(train_learner) == mip::LearnerKind::logit) {
                model = mip::train_logistic(ds, logit_hyper, train_seed);
            } else {
                model = mip::train_gbdt(ds, gbdt_hyper, train_seed);
            }
            model->save(train_out);
            std::cout << "wrote " << train_out << " (train loss "
                      << model->train_loss_curve().back() << ")\n";
        } else if (*eval_cmd) {
            mip::SimulationConfig cfg = load_config(eval_config);
            mip::EventLog log = mip::read_csv_file(eval_in);
            mip::BenchmarkOptions opt;
            opt.seed = eval_seed;
            opt.k_folds = eval_folds;
            opt.logit = eval_logit;
            opt.gbdt = eval_gbdt;
            if (eval_gbdt_trees >= 0) opt.gbdt.n_trees = eval_gbdt_trees;
            if (eval_epochs > 0) opt.logit.max_epochs = eval_epochs;
            mip::Task task = mip::parse_task(eval_task);
            std::vector<mip::MetricsReport> reports;
            if (eval_matrix) {
                reports = mip::run_matrix(log, task, cfg.calendar, opt);
            } else {
                reports.push_back(mip::run_benchmark(
                    log, task, mip::parse_learner(eval_learner),
                    mip::FeatureRegime::parse(eval_regime), cfg.calendar, opt));
            }
            std::string md = mip::reports_to_markdown(reports);
            std::cout << md;
            if (!eval_out_md.empty()) write_text(eval_out_md, md);
            if (!eval_out_json.empty()) {
                write_text(eval_out_json, mip::reports_to_json(reports));
            }
        } else if (*rec_cmd) {
            mip::SimulationConfig cfg = load_config(rec_config);
            mip::EventLog log = mip::read_csv_file(rec_in);
            std::unique_ptr<mip::ProbabilisticModel> crowd, goal;
            for (const auto& path : rec_models) {
                auto m = mip::ProbabilisticModel::load(path);
                if (m->schema().task == mip::Task::next_activity) {
                    crowd = std::move(m);
                } else {
                    goal = std::move(m);
                }
            }
            auto lines = mip::prescribe_batch(crowd.get(), goal.get(), log,
                                              mip::parse_mode(rec_mode), cfg.calendar,
                                              rec_k, rec_threshold, rec_flag_only);
            std::ofstream f(rec_out, std::ios::binary);
            if (!f) throw std::runtime_error("cannot open for writing: " + rec_out);
            for (const auto& l : lines) f << l << '\n';
            std::cout << "wrote " << rec_out << " (" << lines.size() << " lines)\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
