#ifndef GAZE_CONFIG_HPP
#define GAZE_CONFIG_HPP

#include <map>
#include <optional>
#include <string>

#include "gaze/core.hpp"
#include "gaze/learners.hpp"
#include "gaze/projection.hpp"
#include "gaze/simulator.hpp"

namespace gaze {

// A sensor preset together with its viewing geometry overrides. The HMD
// preset shortens the virtual viewing distance so that regions subtend
// larger angles, mirroring the wider headset FOV.
struct SensorPreset {
    SensorModel model;
    std::optional<double> screen_w_cm;
    std::optional<double> screen_h_cm;
    std::optional<double> distance_cm;
};

// The single declarative configuration document: geometry, the region rule
// tables, simulator presets, schedule distribution and training parameters.
struct Config {
    SceneGeometry geometry;
    Method2Table method2_table = default_method2_table();
    RegionTargets region_targets = default_region_targets();
    RegionFrequencies schedule_frequencies = default_region_frequencies();
    double schedule_mean_dwell_ms = 6000.0;
    std::map<std::string, Persona> personas;
    std::map<std::string, SensorPreset> sensors;
    TrainConfig train;

    const Persona& persona(const std::string& name) const;
    const SensorPreset& sensor(const std::string& name) const;
    SceneGeometry geometry_for(const SensorPreset& preset) const;
};

// Shipped defaults: geometry 260x195 cm at 250 cm, the default layout and
// point table, personas {unit, small, average, large} and sensors
// {depthcam, hmd, ideal}.
Config default_config();

// Loads a JSON config document; sections that are absent keep defaults.
Config load_config(const std::string& path);
Config config_from_json_text(const std::string& text);

}  // namespace gaze

#endif
