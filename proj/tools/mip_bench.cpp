// Compares the serial reference path (--threads 1) against the OpenMP path
// on the four data-parallel kernels: simulation, featurization, and the two
// trainers.

#include <chrono>
#include <cstdio>
#include <functional>

#include "mip/benchmark.hpp"
#include "mip/parallel.hpp"
#include "mip/simulator.hpp"

namespace {

double time_s(const std::function<void()>& fn) {
    auto t0 = std::chrono::steady_clock::now();
    fn();
    auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(t1 - t0).count();
}

void report(const char* name, double serial, double parallel) {
    std::printf("%-28s %8.3fs %8.3fs %7.2fx\n", name, serial, parallel,
                serial / parallel);
}

}  // namespace

int main(int argc, char** argv) {
    int cases = argc > 1 ? std::atoi(argv[1]) : 200;
    int hw = mip::hardware_threads();
    std::printf("cases=%d, hardware threads=%d\n", cases, hw);
    std::printf("%-28s %9s %9s %8s\n", "kernel", "serial", "omp", "speedup");

    mip::SimulationConfig cfg = mip::default_config();
    mip::EventLog log;
    {
        mip::set_max_threads(1);
        double s = time_s([&] { log = mip::simulate(cfg, cfg.master_seed, cases); });
        mip::set_max_threads(hw);
        double p = time_s([&] { log = mip::simulate(cfg, cfg.master_seed, cases); });
        report("simulate", s, p);
    }

    mip::FeatureRegime regime = mip::FeatureRegime::parse("pa-convuser");
    mip::LabeledDataset next_ds, late_ds;
    {
        mip::set_max_threads(1);
        double s = time_s(
            [&] { next_ds = mip::build_next_activity_dataset(log, regime, cfg.calendar); });
        mip::set_max_threads(hw);
        double p = time_s(
            [&] { next_ds = mip::build_next_activity_dataset(log, regime, cfg.calendar); });
        report("featurize pa-convuser", s, p);
        late_ds = mip::build_lateness_dataset(log, regime, cfg.calendar);
    }

    {
        mip::LogisticHyper hy;
        hy.max_epochs = 5;
        mip::set_max_threads(1);
        double s = time_s([&] { mip::train_logistic(next_ds, hy, 1); });
        mip::set_max_threads(hw);
        double p = time_s([&] { mip::train_logistic(next_ds, hy, 1); });
        report("logistic (5 epochs)", s, p);
    }

    {
        mip::GbdtHyper hy;
        hy.n_trees = 5;
        mip::set_max_threads(1);
        double s = time_s([&] { mip::train_gbdt(next_ds, hy, 1); });
        mip::set_max_threads(hw);
        double p = time_s([&] { mip::train_gbdt(next_ds, hy, 1); });
        report("gbdt multiclass (5 rounds)", s, p);
    }

    {
        mip::GbdtHyper hy;
        hy.n_trees = 50;
        mip::set_max_threads(1);
        double s = time_s([&] { mip::train_gbdt(late_ds, hy, 1); });
        mip::set_max_threads(hw);
        double p = time_s([&] { mip::train_gbdt(late_ds, hy, 1); });
        report("gbdt binary (50 rounds)", s, p);
    }
    return 0;
}
