#include "gaze/config.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace gaze {

const Persona& Config::persona(const std::string& name) const {
    auto it = personas.find(name);
    require(it != personas.end(), ErrorKind::usage, "unknown persona: " + name);
    return it->second;
}

const SensorPreset& Config::sensor(const std::string& name) const {
    auto it = sensors.find(name);
    require(it != sensors.end(), ErrorKind::usage, "unknown sensor: " + name);
    return it->second;
}

SceneGeometry Config::geometry_for(const SensorPreset& preset) const {
    SceneGeometry g = geometry;
    if (preset.screen_w_cm) g.screen_w_cm = *preset.screen_w_cm;
    if (preset.screen_h_cm) g.screen_h_cm = *preset.screen_h_cm;
    if (preset.distance_cm) g.distance_cm = *preset.distance_cm;
    validate_geometry(g);
    return g;
}

Config default_config() {
    Config cfg;

    Persona unit;
    unit.name = "unit";
    unit.head_gain_x = unit.head_gain_y = 1.0;
    unit.transit_tau_ms = 20.0;
    unit.fixation_jitter_deg = 0.0;
    unit.pitch_coupling_deg = 0.0;
    cfg.personas["unit"] = unit;

    Persona large;
    large.name = "large";
    large.head_gain_x = large.head_gain_y = 0.95;
    large.transit_tau_ms = 100.0;
    large.fixation_jitter_deg = 0.25;
    large.pitch_coupling_deg = 2.4;
    cfg.personas["large"] = large;

    Persona average;
    average.name = "average";
    average.head_gain_x = average.head_gain_y = 0.80;
    average.transit_tau_ms = 120.0;
    average.fixation_jitter_deg = 0.35;
    average.pitch_coupling_deg = 2.8;
    cfg.personas["average"] = average;

    Persona small;
    small.name = "small";
    small.head_gain_x = small.head_gain_y = 0.50;
    small.transit_tau_ms = 150.0;
    small.fixation_jitter_deg = 0.45;
    small.pitch_coupling_deg = 4.2;
    cfg.personas["small"] = small;

    SensorPreset depthcam;
    depthcam.model.name = "depthcam";
    depthcam.model.frame_rate_hz = 30.0;
    depthcam.model.yaw_noise_std_deg = 1.5;
    depthcam.model.pitch_noise_std_deg = 1.2;
    depthcam.model.face_proxy = {1.0, 640.0, 360.0, 10000.0};
    cfg.sensors["depthcam"] = depthcam;

    SensorPreset hmd;
    hmd.model.name = "hmd";
    hmd.model.frame_rate_hz = 60.0;
    hmd.model.yaw_noise_std_deg = 0.15;
    hmd.model.pitch_noise_std_deg = 0.12;
    hmd.model.face_proxy = {1.0, 640.0, 400.0, 12000.0};
    hmd.distance_cm = 110.0;
    cfg.sensors["hmd"] = hmd;

    SensorPreset ideal;
    ideal.model.name = "ideal";
    ideal.model.frame_rate_hz = 30.0;
    ideal.model.yaw_noise_std_deg = 0.0;
    ideal.model.pitch_noise_std_deg = 0.0;
    ideal.model.face_proxy = {1.0, 640.0, 360.0, 10000.0};
    cfg.sensors["ideal"] = ideal;

    return cfg;
}

namespace {

using nlohmann::json;

HalfPlane halfplane_from_json(const json& j) {
    HalfPlane hp;
    const std::string axis = j.at("axis").get<std::string>();
    require(axis == "x" || axis == "y", ErrorKind::data, "layout axis must be x or y");
    hp.axis = axis == "x" ? 0 : 1;
    const std::string op = j.at("op").get<std::string>();
    require(op == ">" || op == "<", ErrorKind::data, "layout op must be > or <");
    hp.greater = op == ">";
    hp.bound = j.at("bound").get<double>();
    return hp;
}

void load_layout(const json& j, RegionLayout& layout) {
    if (j.contains("default_region")) layout.default_region = Region(j["default_region"].get<int>());
    if (!j.contains("rules")) return;
    layout.rules.clear();
    for (const json& jr : j["rules"]) {
        LayoutRule rule;
        rule.region = Region(jr.at("region").get<int>());
        for (const json& jt : jr.at("tests")) rule.tests.push_back(halfplane_from_json(jt));
        require(rule.tests.size() <= 4, ErrorKind::data, "layout rules take at most 4 tests");
        layout.rules.push_back(std::move(rule));
    }
}

void load_method2(const json& j, Method2Table& table) {
    if (j.contains("default_region")) table.default_region = Region(j["default_region"].get<int>());
    if (j.contains("points")) {
        const json& pts = j["points"];
        require(pts.size() == 23, ErrorKind::data, "method-2 table needs exactly 23 points");
        for (std::size_t i = 0; i < 23; ++i) {
            const json& jp = pts[i];
            BorderPoint p;
            p.id = jp.at("id").get<int>();
            require(p.id == static_cast<int>(i) + 1, ErrorKind::data,
                    "method-2 points must be listed in id order 1..23");
            p.u = jp.at("u").get<double>();
            p.v = jp.at("v").get<double>();
            table.points[i] = p;
        }
    }
    if (j.contains("rules")) {
        table.rules.clear();
        for (const json& jr : j["rules"]) {
            PointRule rule;
            rule.region = Region(jr.at("region").get<int>());
            for (const json& jt : jr.at("tests")) {
                PointRuleTest t;
                t.point_id = jt.at("point").get<int>();
                require(t.point_id >= 1 && t.point_id <= 23, ErrorKind::data,
                        "method-2 rule point out of range");
                const std::string op = jt.at("op").get<std::string>();
                require(op == ">" || op == "<", ErrorKind::data, "method-2 op must be > or <");
                t.greater = op == ">";
                rule.tests.push_back(t);
            }
            require(rule.tests.size() <= 4, ErrorKind::data,
                    "method-2 rules take at most 4 tests");
            table.rules.push_back(std::move(rule));
        }
    }
}

Persona persona_from_json(const std::string& name, const json& j, const Persona& base) {
    Persona p = base;
    p.name = name;
    if (j.contains("head_gain_x")) p.head_gain_x = j["head_gain_x"].get<double>();
    if (j.contains("head_gain_y")) p.head_gain_y = j["head_gain_y"].get<double>();
    if (j.contains("transit_tau_ms")) p.transit_tau_ms = j["transit_tau_ms"].get<double>();
    if (j.contains("fixation_jitter_deg"))
        p.fixation_jitter_deg = j["fixation_jitter_deg"].get<double>();
    if (j.contains("pitch_coupling_deg"))
        p.pitch_coupling_deg = j["pitch_coupling_deg"].get<double>();
    validate_persona(p);
    return p;
}

SensorPreset sensor_from_json(const std::string& name, const json& j, const SensorPreset& base) {
    SensorPreset s = base;
    s.model.name = name;
    if (j.contains("frame_rate_hz")) s.model.frame_rate_hz = j["frame_rate_hz"].get<double>();
    if (j.contains("yaw_noise_std_deg"))
        s.model.yaw_noise_std_deg = j["yaw_noise_std_deg"].get<double>();
    if (j.contains("pitch_noise_std_deg"))
        s.model.pitch_noise_std_deg = j["pitch_noise_std_deg"].get<double>();
    if (j.contains("face_proxy")) {
        const json& fp = j["face_proxy"];
        if (fp.contains("px_per_cm")) s.model.face_proxy.px_per_cm = fp["px_per_cm"].get<double>();
        if (fp.contains("camera_cx_px"))
            s.model.face_proxy.camera_cx_px = fp["camera_cx_px"].get<double>();
        if (fp.contains("camera_cy_px"))
            s.model.face_proxy.camera_cy_px = fp["camera_cy_px"].get<double>();
        if (fp.contains("base_area_px2"))
            s.model.face_proxy.base_area_px2 = fp["base_area_px2"].get<double>();
    }
    if (j.contains("screen_w_cm")) s.screen_w_cm = j["screen_w_cm"].get<double>();
    if (j.contains("screen_h_cm")) s.screen_h_cm = j["screen_h_cm"].get<double>();
    if (j.contains("distance_cm")) s.distance_cm = j["distance_cm"].get<double>();
    validate_sensor(s.model);
    return s;
}

}  // namespace

Config config_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::data, std::string("malformed config JSON: ") + e.what());
    }
    Config cfg = default_config();
    try {
        if (j.contains("geometry")) {
            const json& g = j["geometry"];
            if (g.contains("screen_w_cm")) cfg.geometry.screen_w_cm = g["screen_w_cm"].get<double>();
            if (g.contains("screen_h_cm")) cfg.geometry.screen_h_cm = g["screen_h_cm"].get<double>();
            if (g.contains("distance_cm")) cfg.geometry.distance_cm = g["distance_cm"].get<double>();
            validate_geometry(cfg.geometry);
        }
        if (j.contains("layout")) load_layout(j["layout"], cfg.geometry.layout);
        if (j.contains("method2")) load_method2(j["method2"], cfg.method2_table);
        if (j.contains("region_targets")) {
            const json& t = j["region_targets"];
            require(t.size() == kRegionCount, ErrorKind::data,
                    "region_targets needs exactly 7 entries");
            for (std::size_t r = 0; r < kRegionCount; ++r) {
                cfg.region_targets[r][0] = t[r].at("u").get<double>();
                cfg.region_targets[r][1] = t[r].at("v").get<double>();
            }
        }
        if (j.contains("schedule")) {
            const json& s = j["schedule"];
            if (s.contains("frequencies")) {
                const json& f = s["frequencies"];
                require(f.size() == kRegionCount, ErrorKind::data,
                        "schedule frequencies need exactly 7 entries");
                for (std::size_t r = 0; r < kRegionCount; ++r)
                    cfg.schedule_frequencies[r] = f[r].get<double>();
            }
            if (s.contains("mean_dwell_ms"))
                cfg.schedule_mean_dwell_ms = s["mean_dwell_ms"].get<double>();
        }
        if (j.contains("personas"))
            for (const auto& [name, jp] : j["personas"].items())
                cfg.personas[name] = persona_from_json(
                    name, jp,
                    cfg.personas.count(name) ? cfg.personas[name] : Persona{});
        if (j.contains("sensors"))
            for (const auto& [name, js] : j["sensors"].items())
                cfg.sensors[name] = sensor_from_json(
                    name, js,
                    cfg.sensors.count(name) ? cfg.sensors[name] : SensorPreset{});
        if (j.contains("train")) {
            const json& t = j["train"];
            if (t.contains("rng_seed")) cfg.train.rng_seed = t["rng_seed"].get<std::uint64_t>();
            if (t.contains("mlp")) {
                const json& m = t["mlp"];
                if (m.contains("max_iters")) cfg.train.mlp.max_iters = m["max_iters"].get<int>();
                if (m.contains("epsilon")) cfg.train.mlp.epsilon = m["epsilon"].get<double>();
                if (m.contains("gradient_strength"))
                    cfg.train.mlp.gradient_strength = m["gradient_strength"].get<double>();
                if (m.contains("weight_momentum"))
                    cfg.train.mlp.weight_momentum = m["weight_momentum"].get<double>();
            }
            if (t.contains("svm")) {
                const json& s = t["svm"];
                if (s.contains("max_iters")) cfg.train.svm.max_iters = s["max_iters"].get<long>();
                if (s.contains("epsilon")) cfg.train.svm.epsilon = s["epsilon"].get<double>();
                if (s.contains("c")) cfg.train.svm.c = s["c"].get<double>();
            }
        }
    } catch (const json::exception& e) {
        throw Error(ErrorKind::data, std::string("malformed config JSON: ") + e.what());
    }
    return cfg;
}

Config load_config(const std::string& path) {
    std::ifstream in(path);
    require(in.good(), ErrorKind::data, "cannot open config " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return config_from_json_text(buf.str());
}

}  // namespace gaze
