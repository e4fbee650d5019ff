#ifndef GAZE_SIMULATOR_HPP
#define GAZE_SIMULATOR_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "gaze/core.hpp"
#include "gaze/projection.hpp"
#include "gaze/rng.hpp"

namespace gaze {

// Synthetic driver parametrization. Gains are the fraction of the gaze
// angle executed by the head per axis; pitch_coupling_deg is the saturating
// pitch drop the head picks up while turned sideways (half of it at a
// 20 deg yaw target), which no global per-axis scale can represent.
struct Persona {
    std::string name = "custom";
    double head_gain_x = 0.8;
    double head_gain_y = 0.8;
    double transit_tau_ms = 120.0;
    double fixation_jitter_deg = 0.0;
    double pitch_coupling_deg = 0.0;
};

void validate_persona(const Persona& p);

struct FaceProxy {
    double px_per_cm = 1.0;
    double camera_cx_px = 640.0;
    double camera_cy_px = 360.0;
    double base_area_px2 = 10000.0;
};

// Simulated measurement channel standing in for the physical sensor.
struct SensorModel {
    std::string name = "custom";
    double frame_rate_hz = 30.0;
    double yaw_noise_std_deg = 0.0;
    double pitch_noise_std_deg = 0.0;
    FaceProxy face_proxy;
};

void validate_sensor(const SensorModel& m);

struct ScheduleEntry {
    Region region{1};
    double dwell_ms = 1000.0;
};

struct RegionSchedule {
    std::vector<ScheduleEntry> entries;

    double duration_ms() const;
};

// Normalized (dx/w, dy/h) gaze target inside each region; the scheduled
// gaze lands here. Index 0 is region 1.
using RegionTargets = std::array<std::array<double, 2>, kRegionCount>;

// Shipped targets: region 1 is the exact screen center; region 3 sits in
// its small mirror box and therefore has the tightest boundary margins.
const RegionTargets& default_region_targets();

// Stationary region frequencies, region 1 heaviest.
using RegionFrequencies = std::array<double, kRegionCount>;
const RegionFrequencies& default_region_frequencies();

// Free-running schedule: exponential dwell lengths around mean_dwell_ms,
// regions drawn from freq without immediate repeats, truncated so the total
// equals duration_ms exactly.
RegionSchedule natural_schedule(double duration_ms, std::uint64_t seed,
                                const RegionFrequencies& freq, double mean_dwell_ms = 6000.0);

// Probe-aligned schedule: a half-period lead-in on region 1, then dwells of
// 1..3 whole probe periods, so every probe lands at least half a period
// after a region switch.
RegionSchedule aligned_schedule(double duration_ms, std::uint64_t seed,
                                const RegionFrequencies& freq,
                                double probe_period_ms = 4000.0);

// First-order relaxation of the head angle toward gain * target.
double head_trajectory_step(double current_deg, double target_gaze_deg, double gain,
                            double tau_ms, double dt_ms);

// Adds per-axis Gaussian observation noise and synthesizes the
// face-rectangle proxy from the noisy angles.
HeadPoseSample sensor_observe(double true_yaw_deg, double true_pitch_deg, double true_roll_deg,
                              const SensorModel& model, double d_cm, Rng& rng);

// Integrates the head trajectory through the schedule at the sensor frame
// rate, labels every frame with the scheduled region and places
// frame-aligned probe markers every probe_period_ms. Fully deterministic
// per seed.
SessionTrace synthesize_session(const Persona& persona, const SensorModel& sensor,
                                const RegionSchedule& schedule, const SceneGeometry& geometry,
                                double probe_period_ms, std::uint64_t seed,
                                const RegionTargets& targets = default_region_targets());

enum class CalibrationProtocol { method1, method2, learned };

// Fixed protocol timing shared with the dwell segmentation below.
constexpr double kPointDwellMs = 3000.0;
constexpr double kLearnedRegionDwellMs = 10000.0;

// Emits the dwell sequence of the chosen calibration protocol:
// method1 = center + 4 border points, method2 = center + 23 points,
// learned = a central dwell before each of the 7 labeled region dwells.
SessionTrace synthesize_calibration(const Persona& persona, const SensorModel& sensor,
                                    const SceneGeometry& geometry, CalibrationProtocol protocol,
                                    std::uint64_t seed,
                                    const Method2Table& table = default_method2_table(),
                                    const RegionTargets& targets = default_region_targets());

// Splits a point-protocol calibration trace back into dwells using the
// fixed protocol windows. Windows without samples are simply absent.
std::vector<CalibrationDwell> dwells_from_trace(const SessionTrace& trace,
                                                CalibrationProtocol protocol);

}  // namespace gaze

#endif
