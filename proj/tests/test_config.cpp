#include "doctest.h"

#include "gaze/config.hpp"

using namespace gaze;

TEST_SUITE("config") {

TEST_CASE("defaults carry the shipped presets") {
    const Config cfg = default_config();
    CHECK(cfg.geometry.screen_w_cm == 260.0);
    CHECK(cfg.geometry.screen_h_cm == 195.0);
    CHECK(cfg.geometry.distance_cm == 250.0);
    for (const char* name : {"unit", "small", "average", "large"})
        CHECK_NOTHROW(cfg.persona(name));
    for (const char* name : {"depthcam", "hmd", "ideal"}) CHECK_NOTHROW(cfg.sensor(name));
    CHECK(cfg.persona("average").head_gain_x == doctest::Approx(0.8));
    CHECK(cfg.sensor("depthcam").model.frame_rate_hz == 30.0);
    CHECK(cfg.sensor("hmd").model.frame_rate_hz == 60.0);
    CHECK(cfg.train.mlp.max_iters == 1000);
    CHECK(cfg.train.mlp.epsilon == 0.001);
    CHECK(cfg.train.mlp.gradient_strength == 0.1);
    CHECK(cfg.train.mlp.weight_momentum == 0.1);
    CHECK(cfg.train.svm.max_iters == 100000);
    CHECK(cfg.train.svm.c == 1.0);
    CHECK_THROWS_AS(cfg.persona("nobody"), Error);
    CHECK_THROWS_AS(cfg.sensor("webcam"), Error);
}

TEST_CASE("the hmd preset widens the angular geometry") {
    const Config cfg = default_config();
    const SceneGeometry hmd = cfg.geometry_for(cfg.sensor("hmd"));
    const SceneGeometry cam = cfg.geometry_for(cfg.sensor("depthcam"));
    CHECK(hmd.distance_cm < cam.distance_cm);
    CHECK(horizontal_fov(hmd.screen_w_cm, hmd.distance_cm) >
          horizontal_fov(cam.screen_w_cm, cam.distance_cm));
}

TEST_CASE("json overrides merge over the defaults") {
    const char* text = R"json({
        "geometry": {"distance_cm": 300.0},
        "schedule": {"mean_dwell_ms": 4500.0},
        "personas": {
            "average": {"head_gain_x": 0.7},
            "extra": {"head_gain_x": 0.6, "head_gain_y": 0.6, "transit_tau_ms": 90.0}
        },
        "sensors": {"depthcam": {"yaw_noise_std_deg": 2.5}},
        "train": {"mlp": {"max_iters": 123}, "svm": {"c": 2.0}, "rng_seed": 9}
    })json";
    const Config cfg = config_from_json_text(text);
    CHECK(cfg.geometry.distance_cm == 300.0);
    CHECK(cfg.geometry.screen_w_cm == 260.0);
    CHECK(cfg.schedule_mean_dwell_ms == 4500.0);
    CHECK(cfg.persona("average").head_gain_x == doctest::Approx(0.7));
    CHECK(cfg.persona("average").head_gain_y == doctest::Approx(0.8));
    CHECK(cfg.persona("extra").transit_tau_ms == 90.0);
    CHECK(cfg.sensor("depthcam").model.yaw_noise_std_deg == 2.5);
    CHECK(cfg.train.mlp.max_iters == 123);
    CHECK(cfg.train.svm.c == 2.0);
    CHECK(cfg.train.rng_seed == 9);
}

TEST_CASE("layout and method-2 tables are overridable") {
    const char* text = R"json({
        "layout": {
            "default_region": 5,
            "rules": [
                {"region": 2, "tests": [{"axis": "x", "op": "<", "bound": -0.1}]}
            ]
        },
        "method2": {
            "rules": [
                {"region": 3, "tests": [{"point": 11, "op": ">"}, {"point": 22, "op": ">"}]}
            ]
        }
    })json";
    const Config cfg = config_from_json_text(text);
    CHECK(cfg.geometry.layout.default_region.id() == 5);
    CHECK(cfg.geometry.layout.rules.size() == 1);
    CHECK(cfg.geometry.layout.classify(-0.2, 0.0).id() == 2);
    CHECK(cfg.geometry.layout.classify(0.2, 0.0).id() == 5);
    CHECK(cfg.method2_table.rules.size() == 1);
}

TEST_CASE("malformed configuration is a data error") {
    CHECK_THROWS_AS(config_from_json_text("{"), Error);
    CHECK_THROWS_AS(config_from_json_text(R"({"geometry": {"distance_cm": -5}})"), Error);
    CHECK_THROWS_AS(
        config_from_json_text(R"({"personas": {"bad": {"head_gain_x": 1.5}}})"), Error);
    try {
        config_from_json_text("{");
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.exit_code() == 2);
    }
}

TEST_CASE("the example config in the repository loads") {
    const Config cfg = load_config(std::string(GAZE_SOURCE_DIR) + "/config.example.json");
    CHECK_NOTHROW(cfg.persona("average"));
    CHECK_NOTHROW(cfg.sensor("hmd"));
}

}  // TEST_SUITE
