// Wall-time comparison of the serial and OpenMP paths of the hot kernels:
// batch gradient accumulation, ensemble training, probe evaluation and the
// session battery. Build target only, not part of ctest.

#include <chrono>
#include <cstdio>
#include <functional>

#include "gaze/config.hpp"
#include "gaze/harness.hpp"
#include "gaze/parallel.hpp"
#include "gaze/simulator.hpp"
#include "gaze/suite.hpp"

using namespace gaze;
using clock_type = std::chrono::steady_clock;

namespace {

double time_ms(const std::function<void()>& fn) {
    const auto start = clock_type::now();
    fn();
    const auto stop = clock_type::now();
    return std::chrono::duration<double, std::milli>(stop - start).count();
}

void row(const char* name, double serial_ms, double parallel_ms) {
    std::printf("%-28s %10.1f ms %10.1f ms %8.2fx\n", name, serial_ms, parallel_ms,
                serial_ms / parallel_ms);
}

}  // namespace

int main() {
    const Config cfg = default_config();
    std::printf("OpenMP %s, max threads %d\n\n",
                par::openmp_available() ? "enabled" : "disabled", par::max_threads());
    std::printf("%-28s %13s %13s %9s\n", "kernel", "serial", "parallel", "speedup");

    const SensorPreset& preset = cfg.sensor("depthcam");
    const SceneGeometry g = cfg.geometry_for(preset);
    const SessionTrace learn = synthesize_calibration(
        cfg.persona("average"), preset.model, g, CalibrationProtocol::learned, 1,
        cfg.method2_table, cfg.region_targets);
    const TrainingSet set = build_training_set(learn);

    TrainConfig tc = cfg.train;
    {
        par::set_force_serial(true);
        const double serial = time_ms([&] { (void)mlp_train(set, tc); });
        par::set_force_serial(false);
        const double parallel = time_ms([&] { (void)mlp_train(set, tc); });
        row("mlp_train (7 nets)", serial, parallel);
    }
    {
        par::set_force_serial(true);
        const double serial = time_ms([&] { (void)svm_train(set, tc); });
        par::set_force_serial(false);
        const double parallel = time_ms([&] { (void)svm_train(set, tc); });
        row("svm_train (21 pairs)", serial, parallel);
    }
    {
        const RegionSchedule schedule =
            aligned_schedule(2000.0 * 1000.0, 7, cfg.schedule_frequencies, 4000.0);
        const SessionTrace route = synthesize_session(
            cfg.persona("small"), preset.model, schedule, g, 4000.0, 8, cfg.region_targets);
        const SessionTrace cal = synthesize_calibration(
            cfg.persona("small"), preset.model, g, CalibrationProtocol::method2, 9,
            cfg.method2_table, cfg.region_targets);
        const Method2Profile profile = calibrate_method2(
            dwells_from_trace(cal, CalibrationProtocol::method2), g, cfg.method2_table);
        const Estimator estimator(profile, g, ScalingMode::corrective, cfg.method2_table);
        par::set_force_serial(true);
        const double serial = time_ms([&] {
            for (int i = 0; i < 20; ++i) (void)run_evaluation(route, estimator);
        });
        par::set_force_serial(false);
        const double parallel = time_ms([&] {
            for (int i = 0; i < 20; ++i) (void)run_evaluation(route, estimator);
        });
        row("run_evaluation x20 (500p)", serial, parallel);
    }
    {
        SuiteOptions opt;
        opt.seed = 42;
        opt.seed_count = 4;
        opt.session_s = 600.0;
        par::set_force_serial(true);
        const double serial = time_ms([&] { (void)run_suite(cfg, opt); });
        par::set_force_serial(false);
        const double parallel = time_ms([&] { (void)run_suite(cfg, opt); });
        row("suite battery (24 runs)", serial, parallel);
    }
    return 0;
}
