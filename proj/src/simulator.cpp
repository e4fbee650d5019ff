#include "gaze/simulator.hpp"

#include <algorithm>
#include <cmath>

namespace gaze {

void validate_persona(const Persona& p) {
    require(p.head_gain_x > 0.0 && p.head_gain_x <= 1.0, ErrorKind::data,
            "head_gain_x must be in (0, 1]");
    require(p.head_gain_y > 0.0 && p.head_gain_y <= 1.0, ErrorKind::data,
            "head_gain_y must be in (0, 1]");
    require(p.transit_tau_ms > 0.0, ErrorKind::data, "transit_tau_ms must be positive");
    require(p.fixation_jitter_deg >= 0.0, ErrorKind::data, "fixation jitter must be >= 0");
    require(p.pitch_coupling_deg >= 0.0, ErrorKind::data, "pitch coupling must be >= 0");
}

void validate_sensor(const SensorModel& m) {
    require(m.frame_rate_hz > 0.0, ErrorKind::data, "frame rate must be positive");
    require(m.yaw_noise_std_deg >= 0.0 && m.pitch_noise_std_deg >= 0.0, ErrorKind::data,
            "noise std must be >= 0");
    require(m.face_proxy.px_per_cm > 0.0 && m.face_proxy.base_area_px2 >= 0.0, ErrorKind::data,
            "face proxy parameters out of range");
}

double RegionSchedule::duration_ms() const {
    double total = 0.0;
    for (const ScheduleEntry& e : entries) total += e.dwell_ms;
    return total;
}

const RegionTargets& default_region_targets() {
    static const RegionTargets targets = {{
        {0.0, 0.0},      // 1 straight ahead
        {-0.35, -0.30},  // 2 speedometer
        {0.27, 0.17},    // 3 rear-view mirror
        {-0.35, 0.10},   // 4 left mirror / door glass
        {-0.075, -0.30}, // 5 steering wheel
        {0.125, -0.30},  // 6 rpm / gear
        {0.35, -0.30},   // 7 right dashboard
    }};
    return targets;
}

const RegionFrequencies& default_region_frequencies() {
    static const RegionFrequencies freq = {0.50, 0.0667, 0.10, 0.10, 0.10, 0.0667, 0.0666};
    return freq;
}

namespace {

Region draw_region(Rng& rng, const RegionFrequencies& freq, int avoid_id) {
    double total = 0.0;
    for (int r = 0; r < kRegionCount; ++r)
        if (r + 1 != avoid_id) total += freq[static_cast<std::size_t>(r)];
    double u = rng.uniform01() * total;
    for (int r = 0; r < kRegionCount; ++r) {
        if (r + 1 == avoid_id) continue;
        u -= freq[static_cast<std::size_t>(r)];
        if (u <= 0.0) return Region(r + 1);
    }
    return Region(avoid_id == kRegionCount ? 1 : kRegionCount);
}

}  // namespace

RegionSchedule natural_schedule(double duration_ms, std::uint64_t seed,
                                const RegionFrequencies& freq, double mean_dwell_ms) {
    require(duration_ms > 0.0 && mean_dwell_ms > 0.0, ErrorKind::usage,
            "schedule durations must be positive");
    Rng rng(derive_seed(seed, 0x5ec0du));
    RegionSchedule schedule;
    double t = 0.0;
    int prev = 0;
    while (t < duration_ms) {
        const Region region = draw_region(rng, freq, prev);
        double dwell = -mean_dwell_ms * std::log(1.0 - rng.uniform01());
        dwell = std::clamp(dwell, 1500.0, 20000.0);
        dwell = std::min(dwell, duration_ms - t);
        schedule.entries.push_back({region, dwell});
        t += dwell;
        prev = region.id();
    }
    return schedule;
}

RegionSchedule aligned_schedule(double duration_ms, std::uint64_t seed,
                                const RegionFrequencies& freq, double probe_period_ms) {
    require(duration_ms > 0.0 && probe_period_ms > 0.0, ErrorKind::usage,
            "schedule durations must be positive");
    Rng rng(derive_seed(seed, 0xa119edu));
    RegionSchedule schedule;
    double t = std::min(probe_period_ms / 2.0, duration_ms);
    schedule.entries.push_back({Region(1), t});
    int prev = 1;
    while (t < duration_ms) {
        const Region region = draw_region(rng, freq, prev);
        const double u = rng.uniform01();
        const int periods = u < 0.5 ? 1 : (u < 0.8 ? 2 : 3);
        double dwell = static_cast<double>(periods) * probe_period_ms;
        dwell = std::min(dwell, duration_ms - t);
        schedule.entries.push_back({region, dwell});
        t += dwell;
        prev = region.id();
    }
    return schedule;
}

double head_trajectory_step(double current_deg, double target_gaze_deg, double gain,
                            double tau_ms, double dt_ms) {
    require(dt_ms > 0.0, ErrorKind::usage, "dt must be positive");
    require(tau_ms > 0.0, ErrorKind::usage, "tau must be positive");
    const double blend = 1.0 - std::exp(-dt_ms / tau_ms);
    return current_deg + (gain * target_gaze_deg - current_deg) * blend;
}

HeadPoseSample sensor_observe(double true_yaw_deg, double true_pitch_deg, double true_roll_deg,
                              const SensorModel& model, double d_cm, Rng& rng) {
    validate_sensor(model);
    require(d_cm > 0.0, ErrorKind::data, "distance must be positive");
    HeadPoseSample s;
    s.yaw_deg = true_yaw_deg + rng.gaussian(0.0, model.yaw_noise_std_deg);
    s.pitch_deg = true_pitch_deg + rng.gaussian(0.0, model.pitch_noise_std_deg);
    s.roll_deg = true_roll_deg;
    const double yaw_rad = deg_to_rad(s.yaw_deg);
    const double pitch_rad = deg_to_rad(s.pitch_deg);
    s.face_cx_px = model.face_proxy.camera_cx_px + model.face_proxy.px_per_cm * d_cm * std::tan(yaw_rad);
    s.face_cy_px = model.face_proxy.camera_cy_px + model.face_proxy.px_per_cm * d_cm * std::tan(pitch_rad);
    s.face_area_px2 = model.face_proxy.base_area_px2 * std::cos(yaw_rad) * std::cos(pitch_rad);
    return s;
}

namespace {

struct GazeTargetDeg {
    double yaw = 0.0;
    double pitch = 0.0;
};

// Gaze angles of a screen position (cm from center) and the head's
// steady-state orientation while fixating it.
GazeTargetDeg gaze_angles(double x_cm, double y_cm, const SceneGeometry& geometry) {
    return {rad_to_deg(std::atan(x_cm / geometry.distance_cm)),
            rad_to_deg(std::atan(y_cm / geometry.distance_cm))};
}

GazeTargetDeg head_target(const GazeTargetDeg& gaze, const Persona& persona) {
    // Bounded slouch: the drop grows quadratically for small yaw targets and
    // saturates at pitch_coupling_deg for large ones (half at 20 deg).
    const double u2 = (gaze.yaw / 20.0) * (gaze.yaw / 20.0);
    const double slouch = persona.pitch_coupling_deg * u2 / (1.0 + u2);
    return {persona.head_gain_x * gaze.yaw, persona.head_gain_y * gaze.pitch - slouch};
}

class HeadSimulator {
public:
    HeadSimulator(const Persona& persona, const SensorModel& sensor,
                  const SceneGeometry& geometry, std::uint64_t seed)
        : persona_(persona), sensor_(sensor), geometry_(geometry),
          rng_(derive_seed(seed, 0x4ead5u)) {
        validate_persona(persona);
        validate_sensor(sensor);
        validate_geometry(geometry);
        dt_ms_ = 1000.0 / sensor.frame_rate_hz;
        jitter_rho_ = std::exp(-dt_ms_ / kJitterTauMs);
        jitter_innov_ = persona.fixation_jitter_deg * std::sqrt(1.0 - jitter_rho_ * jitter_rho_);
    }

    double dt_ms() const { return dt_ms_; }

    void set_screen_target(double x_cm, double y_cm) {
        target_ = head_target(gaze_angles(x_cm, y_cm, geometry_), persona_);
    }

    HeadPoseSample step(double t_ms) {
        jitter_yaw_ = jitter_rho_ * jitter_yaw_ + jitter_innov_ * rng_.gaussian();
        jitter_pitch_ = jitter_rho_ * jitter_pitch_ + jitter_innov_ * rng_.gaussian();
        const double tau = persona_.transit_tau_ms;
        const double blend = 1.0 - std::exp(-dt_ms_ / tau);
        head_yaw_ += (target_.yaw + jitter_yaw_ - head_yaw_) * blend;
        head_pitch_ += (target_.pitch + jitter_pitch_ - head_pitch_) * blend;
        HeadPoseSample s = sensor_observe(head_yaw_, head_pitch_, 0.0, sensor_,
                                          geometry_.distance_cm, rng_);
        s.t_ms = t_ms;
        return s;
    }

private:
    static constexpr double kJitterTauMs = 300.0;

    Persona persona_;
    SensorModel sensor_;
    SceneGeometry geometry_;
    Rng rng_;
    double dt_ms_ = 0.0;
    GazeTargetDeg target_;
    double head_yaw_ = 0.0;
    double head_pitch_ = 0.0;
    double jitter_yaw_ = 0.0;
    double jitter_pitch_ = 0.0;
    double jitter_rho_ = 0.0;
    double jitter_innov_ = 0.0;
};

}  // namespace

SessionTrace synthesize_session(const Persona& persona, const SensorModel& sensor,
                                const RegionSchedule& schedule, const SceneGeometry& geometry,
                                double probe_period_ms, std::uint64_t seed,
                                const RegionTargets& targets) {
    require(!schedule.entries.empty(), ErrorKind::usage, "schedule must be non-empty");
    for (const ScheduleEntry& e : schedule.entries)
        require(e.dwell_ms > 0.0, ErrorKind::usage, "schedule dwells must be positive");
    require(probe_period_ms > 0.0, ErrorKind::usage, "probe period must be positive");

    HeadSimulator sim(persona, sensor, geometry, seed);
    const double dt = sim.dt_ms();
    const double duration = schedule.duration_ms();
    const std::size_t frames = static_cast<std::size_t>(std::ceil(duration / dt)) + 1;

    SessionTrace trace;
    trace.meta.sensor = sensor.name;
    trace.meta.persona = persona.name;
    trace.meta.seed = seed;
    trace.meta.fps = sensor.frame_rate_hz;
    trace.samples.reserve(frames);
    trace.labels.reserve(frames);

    std::size_t entry = 0;
    double entry_end = schedule.entries[0].dwell_ms;
    auto apply_target = [&](const Region& r) {
        const auto& t = targets[static_cast<std::size_t>(r.index())];
        sim.set_screen_target(t[0] * geometry.screen_w_cm, t[1] * geometry.screen_h_cm);
    };
    apply_target(schedule.entries[0].region);

    for (std::size_t k = 0; k < frames; ++k) {
        const double t = static_cast<double>(k) * dt;
        while (entry + 1 < schedule.entries.size() && t >= entry_end) {
            ++entry;
            entry_end += schedule.entries[entry].dwell_ms;
            apply_target(schedule.entries[entry].region);
        }
        trace.samples.push_back(sim.step(t));
        trace.labels.push_back(schedule.entries[entry].region);
    }

    const int probe_count = static_cast<int>(std::floor(duration / probe_period_ms));
    for (int k = 1; k <= probe_count; ++k) {
        const double nominal = static_cast<double>(k) * probe_period_ms;
        // Frame-aligned: the probe carries the timestamp of the at-or-before
        // frame so the trace format's per-sample flag round-trips exactly.
        auto it = std::upper_bound(trace.samples.begin(), trace.samples.end(), nominal,
                                   [](double t, const HeadPoseSample& s) { return t < s.t_ms; });
        require(it != trace.samples.begin(), ErrorKind::data, "probe before first sample");
        trace.probes_ms.push_back(std::prev(it)->t_ms);
    }
    trace.validate();
    return trace;
}

namespace {

struct DwellSpec {
    int point_id = 0;                 // point protocols
    std::optional<Region> label;      // learned protocol
    double x_cm = 0.0;
    double y_cm = 0.0;
    double duration_ms = kPointDwellMs;
};

std::vector<DwellSpec> protocol_dwells(CalibrationProtocol protocol,
                                       const SceneGeometry& geometry, const Method2Table& table,
                                       const RegionTargets& targets) {
    std::vector<DwellSpec> dwells;
    const double hw = geometry.screen_w_cm / 2.0;
    const double hh = geometry.screen_h_cm / 2.0;
    switch (protocol) {
        case CalibrationProtocol::method1:
            dwells.push_back({0, std::nullopt, 0.0, 0.0, kPointDwellMs});
            dwells.push_back({1, std::nullopt, hw, 0.0, kPointDwellMs});
            dwells.push_back({2, std::nullopt, -hw, 0.0, kPointDwellMs});
            dwells.push_back({3, std::nullopt, 0.0, hh, kPointDwellMs});
            dwells.push_back({4, std::nullopt, 0.0, -hh, kPointDwellMs});
            break;
        case CalibrationProtocol::method2:
            dwells.push_back({0, std::nullopt, 0.0, 0.0, kPointDwellMs});
            for (const BorderPoint& p : table.points)
                dwells.push_back({p.id, std::nullopt, p.u * geometry.screen_w_cm,
                                  p.v * geometry.screen_h_cm, kPointDwellMs});
            break;
        case CalibrationProtocol::learned:
            for (int r = 1; r <= kRegionCount; ++r) {
                dwells.push_back({0, std::nullopt, 0.0, 0.0, kPointDwellMs});
                const auto& t = targets[static_cast<std::size_t>(r - 1)];
                dwells.push_back({0, Region(r), t[0] * geometry.screen_w_cm,
                                  t[1] * geometry.screen_h_cm, kLearnedRegionDwellMs});
            }
            break;
    }
    return dwells;
}

}  // namespace

SessionTrace synthesize_calibration(const Persona& persona, const SensorModel& sensor,
                                    const SceneGeometry& geometry, CalibrationProtocol protocol,
                                    std::uint64_t seed, const Method2Table& table,
                                    const RegionTargets& targets) {
    HeadSimulator sim(persona, sensor, geometry, derive_seed(seed, 0xca11bu));
    const double dt = sim.dt_ms();
    const std::vector<DwellSpec> dwells = protocol_dwells(protocol, geometry, table, targets);

    SessionTrace trace;
    trace.meta.sensor = sensor.name;
    trace.meta.persona = persona.name;
    trace.meta.seed = seed;
    trace.meta.fps = sensor.frame_rate_hz;

    double total = 0.0;
    for (const DwellSpec& d : dwells) total += d.duration_ms;
    const std::size_t frames = static_cast<std::size_t>(std::ceil(total / dt));

    std::size_t dwell_idx = 0;
    double dwell_end = dwells[0].duration_ms;
    sim.set_screen_target(dwells[0].x_cm, dwells[0].y_cm);
    for (std::size_t k = 0; k < frames; ++k) {
        const double t = static_cast<double>(k) * dt;
        while (dwell_idx + 1 < dwells.size() && t >= dwell_end) {
            ++dwell_idx;
            dwell_end += dwells[dwell_idx].duration_ms;
            sim.set_screen_target(dwells[dwell_idx].x_cm, dwells[dwell_idx].y_cm);
        }
        trace.samples.push_back(sim.step(t));
        trace.labels.push_back(dwells[dwell_idx].label);
    }
    trace.validate();
    return trace;
}

std::vector<CalibrationDwell> dwells_from_trace(const SessionTrace& trace,
                                                CalibrationProtocol protocol) {
    require(protocol != CalibrationProtocol::learned, ErrorKind::usage,
            "learned-protocol traces are consumed by build_training_set");
    const int points = protocol == CalibrationProtocol::method1 ? 4 : 23;
    std::vector<CalibrationDwell> dwells;
    for (int id = 0; id <= points; ++id) {
        const double begin = static_cast<double>(id) * kPointDwellMs;
        const double end = begin + kPointDwellMs;
        CalibrationDwell dwell;
        dwell.point_id = id;
        for (const HeadPoseSample& s : trace.samples)
            if (s.t_ms >= begin && s.t_ms < end) dwell.samples.push_back(s);
        if (!dwell.samples.empty()) dwells.push_back(std::move(dwell));
    }
    return dwells;
}

}  // namespace gaze
