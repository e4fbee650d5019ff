#include "gaze/suite.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gaze/parallel.hpp"
#include "gaze/simulator.hpp"

namespace gaze {

namespace {

const std::vector<std::string> kSuitePersonas = {"small", "average", "large"};
const std::vector<std::string> kSuiteSensors = {"depthcam", "hmd"};

double error_rate(const EvaluationReport& r) { return 100.0 - r.overall_accuracy; }

SuiteRun one_run(const Config& cfg, const SuiteOptions& opt, const std::string& sensor_name,
                 const std::string& persona_name, std::uint64_t seed, std::uint64_t tag) {
    const Persona& persona = cfg.persona(persona_name);
    const SensorPreset& preset = cfg.sensor(sensor_name);
    const SceneGeometry geometry = cfg.geometry_for(preset);

    const SessionTrace cal1 =
        synthesize_calibration(persona, preset.model, geometry, CalibrationProtocol::method1,
                               derive_seed(seed, tag * 8 + 1), cfg.method2_table,
                               cfg.region_targets);
    const Method1Profile prof1 =
        calibrate_method1(dwells_from_trace(cal1, CalibrationProtocol::method1), geometry);

    const SessionTrace cal2 =
        synthesize_calibration(persona, preset.model, geometry, CalibrationProtocol::method2,
                               derive_seed(seed, tag * 8 + 2), cfg.method2_table,
                               cfg.region_targets);
    const Method2Profile prof2 = calibrate_method2(
        dwells_from_trace(cal2, CalibrationProtocol::method2), geometry, cfg.method2_table);

    const RegionSchedule schedule =
        aligned_schedule(opt.session_s * 1000.0, derive_seed(seed, tag * 8 + 3),
                         cfg.schedule_frequencies, opt.probe_period_ms);
    const SessionTrace route =
        synthesize_session(persona, preset.model, schedule, geometry, opt.probe_period_ms,
                           derive_seed(seed, tag * 8 + 4), cfg.region_targets);

    SuiteRun run;
    run.sensor = sensor_name;
    run.persona = persona_name;
    run.seed = seed;
    run.method1 = run_evaluation(
        route, Estimator(prof1, geometry, ScalingMode::corrective, cfg.method2_table));
    run.method2 = run_evaluation(
        route, Estimator(prof2, geometry, ScalingMode::corrective, cfg.method2_table));
    return run;
}

const SuiteRun& find_run(const std::vector<SuiteRun>& runs, const std::string& sensor,
                         const std::string& persona, std::uint64_t seed) {
    for (const SuiteRun& r : runs)
        if (r.sensor == sensor && r.persona == persona && r.seed == seed) return r;
    throw Error(ErrorKind::data, "suite run missing: " + sensor + "/" + persona);
}

bool region3_is_minimum(const EvaluationReport& r) {
    const double acc3 = r.per_region_accuracy[2];
    if (std::isnan(acc3)) return false;
    for (int reg = 0; reg < kRegionCount; ++reg) {
        const double acc = r.per_region_accuracy[static_cast<std::size_t>(reg)];
        if (std::isnan(acc)) return false;
        if (acc < acc3) return false;
    }
    return true;
}

std::string fixed2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

}  // namespace

SuiteResult run_suite(const Config& cfg, const SuiteOptions& opt) {
    require(opt.seed_count > 0, ErrorKind::usage, "suite needs at least one seed");
    require(opt.session_s > 0.0, ErrorKind::usage, "session duration must be positive");

    struct Combo {
        std::string sensor, persona;
        std::uint64_t seed;
        std::uint64_t tag;
    };
    std::vector<Combo> combos;
    std::uint64_t tag = 0;
    for (const std::string& sensor : kSuiteSensors)
        for (const std::string& persona : kSuitePersonas)
            for (int k = 0; k < opt.seed_count; ++k)
                combos.push_back({sensor, persona, opt.seed + static_cast<std::uint64_t>(k), tag++});

    SuiteResult result;
    result.seed_count = opt.seed_count;
    result.runs.resize(combos.size());
    std::exception_ptr failure;
    par::parallel_for(combos.size(), [&](std::size_t i) {
        try {
            result.runs[i] =
                one_run(cfg, opt, combos[i].sensor, combos[i].persona, combos[i].seed,
                        combos[i].tag);
        } catch (...) {
            failure = std::current_exception();
        }
    });
    if (failure) std::rethrow_exception(failure);

    for (const std::string& sensor : kSuiteSensors)
        for (const std::string& persona : kSuitePersonas)
            result.m2_le_m1[sensor + "/" + persona] = 0;
    for (const std::string& sensor : kSuiteSensors) result.small_ge_large_m1[sensor] = 0;
    for (const std::string& persona : kSuitePersonas)
        for (int m = 1; m <= 2; ++m)
            result.hmd_le_depthcam[persona + "/m" + std::to_string(m)] = 0;

    for (int k = 0; k < opt.seed_count; ++k) {
        const std::uint64_t seed = opt.seed + static_cast<std::uint64_t>(k);
        for (const std::string& sensor : kSuiteSensors) {
            for (const std::string& persona : kSuitePersonas) {
                const SuiteRun& run = find_run(result.runs, sensor, persona, seed);
                if (error_rate(run.method2) <= error_rate(run.method1))
                    ++result.m2_le_m1[sensor + "/" + persona];
            }
            const SuiteRun& small = find_run(result.runs, sensor, "small", seed);
            const SuiteRun& large = find_run(result.runs, sensor, "large", seed);
            if (error_rate(small.method1) >= error_rate(large.method1))
                ++result.small_ge_large_m1[sensor];
        }
        for (const std::string& persona : kSuitePersonas) {
            const SuiteRun& hmd = find_run(result.runs, "hmd", persona, seed);
            const SuiteRun& cam = find_run(result.runs, "depthcam", persona, seed);
            if (error_rate(hmd.method1) <= error_rate(cam.method1))
                ++result.hmd_le_depthcam[persona + "/m1"];
            if (error_rate(hmd.method2) <= error_rate(cam.method2))
                ++result.hmd_le_depthcam[persona + "/m2"];
        }
        const SuiteRun& probe = find_run(result.runs, "depthcam", "small", seed);
        if (region3_is_minimum(probe.method1)) ++result.region3_min_m1_small_depthcam;
    }

    std::ostringstream sum;
    sum << "suite seeds=" << opt.seed_count << " base_seed=" << opt.seed
        << " session_s=" << fixed2(opt.session_s) << "\n\n";
    sum << "mean error rates (%):\n";
    for (const std::string& sensor : kSuiteSensors) {
        for (const std::string& persona : kSuitePersonas) {
            double e1 = 0.0, e2 = 0.0;
            for (int k = 0; k < opt.seed_count; ++k) {
                const SuiteRun& run = find_run(result.runs, sensor, persona,
                                               opt.seed + static_cast<std::uint64_t>(k));
                e1 += error_rate(run.method1);
                e2 += error_rate(run.method2);
            }
            e1 /= opt.seed_count;
            e2 /= opt.seed_count;
            sum << "  " << sensor << "/" << persona << ": method1=" << fixed2(e1)
                << " method2=" << fixed2(e2) << "\n";
        }
    }
    sum << "\norderings (seeds satisfied / total):\n";
    for (const auto& [key, count] : result.m2_le_m1)
        sum << "  method2<=method1 " << key << ": " << count << "/" << opt.seed_count << "\n";
    for (const auto& [key, count] : result.small_ge_large_m1)
        sum << "  small>=large (method1) " << key << ": " << count << "/" << opt.seed_count
            << "\n";
    for (const auto& [key, count] : result.hmd_le_depthcam)
        sum << "  hmd<=depthcam " << key << ": " << count << "/" << opt.seed_count << "\n";
    sum << "  region3 minimum (method1, depthcam/small): "
        << result.region3_min_m1_small_depthcam << "/" << opt.seed_count << "\n";
    result.summary = sum.str();

    if (!opt.out_dir.empty()) {
        namespace fs = std::filesystem;
        fs::create_directories(opt.out_dir);
        for (const SuiteRun& run : result.runs) {
            const std::string stem = opt.out_dir + "/report_" + run.sensor + "_" + run.persona +
                                     "_seed" + std::to_string(run.seed);
            std::ofstream(stem + "_m1.json", std::ios::binary) << report_to_json(run.method1);
            std::ofstream(stem + "_m2.json", std::ios::binary) << report_to_json(run.method2);
        }
        std::ofstream(opt.out_dir + "/summary.txt", std::ios::binary) << result.summary;
    }
    return result;
}

}  // namespace gaze
