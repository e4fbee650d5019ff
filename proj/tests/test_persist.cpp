#include "doctest.h"

#include <cmath>

#include "gaze/config.hpp"
#include "gaze/harness.hpp"
#include "gaze/rng.hpp"
#include "gaze/simulator.hpp"

using namespace gaze;

namespace {

SessionTrace sample_trace(int n, std::uint64_t seed) {
    Rng rng(seed);
    SessionTrace trace;
    trace.meta.sensor = "depthcam";
    trace.meta.persona = "average";
    trace.meta.seed = seed;
    trace.meta.fps = 30.0;
    for (int i = 0; i < n; ++i) {
        HeadPoseSample s;
        s.t_ms = i * (1000.0 / 30.0);
        s.yaw_deg = rng.uniform(-45, 45);
        s.pitch_deg = rng.uniform(-30, 30);
        s.roll_deg = rng.uniform(-5, 5);
        s.face_cx_px = rng.uniform(0, 1280);
        s.face_cy_px = rng.uniform(0, 720);
        s.face_area_px2 = rng.uniform(5000, 15000);
        trace.samples.push_back(s);
        trace.labels.push_back(i % 3 == 0 ? std::optional<Region>()
                                          : Region(1 + static_cast<int>(rng.next_u64() % 7)));
        if (i % 17 == 4) trace.probes_ms.push_back(s.t_ms);
    }
    return trace;
}

LearnedProfile trained_svm_profile() {
    Config cfg = default_config();
    const SensorPreset& preset = cfg.sensor("depthcam");
    const SessionTrace trace = synthesize_calibration(
        cfg.persona("average"), preset.model, cfg.geometry_for(preset),
        CalibrationProtocol::learned, 5150, cfg.method2_table, cfg.region_targets);
    const TrainingSet set = build_training_set(trace);
    LearnedProfile p;
    p.normalizer = set.normalizer;
    p.reference_face_cx = set.central_ref.cx_px;
    p.reference_face_cy = set.central_ref.cy_px;
    p.model = svm_train(set, cfg.train);
    return p;
}

}  // namespace

TEST_SUITE("persist") {

TEST_CASE("traces round-trip byte-identically") {
    SUBCASE("empty trace") {
        SessionTrace empty;
        const std::string text = trace_to_string(empty);
        const SessionTrace back = trace_from_string(text);
        CHECK(back.samples.empty());
        CHECK(trace_to_string(back) == text);
    }
    SUBCASE("1000-sample trace") {
        const SessionTrace trace = sample_trace(1000, 21);
        const std::string text = trace_to_string(trace);
        const SessionTrace back = trace_from_string(text);
        CHECK(back.samples.size() == trace.samples.size());
        CHECK(back.probes_ms == trace.probes_ms);
        CHECK(back.meta.sensor == trace.meta.sensor);
        CHECK(trace_to_string(back) == text);
    }
}

TEST_CASE("trace parse errors carry the line number") {
    const SessionTrace trace = sample_trace(10, 3);
    std::string text = trace_to_string(trace);

    SUBCASE("out-of-order timestamps") {
        // Swap the records on lines 4 and 5.
        std::vector<std::string> lines;
        std::size_t pos = 0;
        while (pos < text.size()) {
            const std::size_t next = text.find('\n', pos);
            lines.push_back(text.substr(pos, next - pos));
            pos = next + 1;
        }
        std::swap(lines[3], lines[4]);
        std::string shuffled;
        for (const std::string& l : lines) shuffled += l + "\n";
        CHECK_THROWS_WITH_AS(trace_from_string(shuffled), doctest::Contains("line 5"), Error);
    }
    SUBCASE("field-count violation") {
        text += "1 2 3\n";
        CHECK_THROWS_WITH_AS(trace_from_string(text), doctest::Contains("line"), Error);
    }
    SUBCASE("unknown version") {
        std::string bad = text;
        bad.replace(bad.find("v1"), 2, "v9");
        CHECK_THROWS_WITH_AS(trace_from_string(bad), doctest::Contains("version"), Error);
    }
}

TEST_CASE("method-1 profiles round-trip to 17 significant digits") {
    Method1Profile p;
    p.dx00_cm = 1.2345678901234567;
    p.dy00_cm = -0.000123456789012345;
    p.sx_pos = 0.98765432109876543;
    p.sx_neg = -1.0000000000000002;
    p.sy_pos = 0.5;
    p.sy_neg = -0.75;
    const std::string text = profile_to_string(p);
    const CalibrationProfile back = profile_from_string(text);
    const auto& q = std::get<Method1Profile>(back);
    CHECK(q.dx00_cm == p.dx00_cm);
    CHECK(q.dy00_cm == p.dy00_cm);
    CHECK(q.sx_pos == p.sx_pos);
    CHECK(q.sx_neg == p.sx_neg);
    CHECK(q.sy_pos == p.sy_pos);
    CHECK(q.sy_neg == p.sy_neg);
}

TEST_CASE("method-2 profiles round-trip exactly") {
    Method2Profile p;
    Rng rng(4);
    p.dx00_cm = rng.gaussian();
    p.dy00_cm = rng.gaussian();
    for (double& v : p.border_dx) v = rng.uniform(-130, 130);
    for (double& v : p.border_dy) v = rng.uniform(-97, 97);
    const CalibrationProfile back = profile_from_string(profile_to_string(p));
    const auto& q = std::get<Method2Profile>(back);
    CHECK(q.border_dx == p.border_dx);
    CHECK(q.border_dy == p.border_dy);
}

TEST_CASE("profile file corruption is reported distinctly") {
    Method1Profile p;
    const std::string text = profile_to_string(p);

    SUBCASE("truncation is malformed") {
        const std::string cut = text.substr(0, text.size() / 2);
        CHECK_THROWS_WITH_AS(profile_from_string(cut), doctest::Contains("truncated"), Error);
    }
    SUBCASE("version mismatch") {
        std::string bad = text;
        bad.replace(bad.find("v1"), 2, "v7");
        CHECK_THROWS_WITH_AS(profile_from_string(bad), doctest::Contains("version"), Error);
    }
    SUBCASE("checksum failure") {
        std::string bad = text;
        const std::size_t pos = bad.find("offsets 0");
        bad.replace(pos + 8, 1, "1");
        CHECK_THROWS_WITH_AS(profile_from_string(bad), doctest::Contains("checksum"), Error);
    }
}

TEST_CASE("a trained svm profile predicts identically after a round-trip") {
    const LearnedProfile profile = trained_svm_profile();
    const CalibrationProfile back =
        profile_from_string(profile_to_string(CalibrationProfile(profile)));
    const auto& q = std::get<LearnedProfile>(back);
    const SvmModel& a = std::get<SvmModel>(profile.model);
    const SvmModel& b = std::get<SvmModel>(q.model);
    Rng rng(6);
    for (int i = 0; i < 10000; ++i) {
        FeatureVector v{};
        for (std::size_t f = 0; f < 5; ++f) v[f] = rng.uniform(-3, 3);
        CHECK(svm_predict(a, v).id() == svm_predict(b, v).id());
    }
}

TEST_CASE("an mlp profile round-trips bit-exactly") {
    Config cfg = default_config();
    cfg.train.mlp.max_iters = 30;
    const SensorPreset& preset = cfg.sensor("depthcam");
    const SessionTrace trace = synthesize_calibration(
        cfg.persona("average"), preset.model, cfg.geometry_for(preset),
        CalibrationProtocol::learned, 515, cfg.method2_table, cfg.region_targets);
    const TrainingSet set = build_training_set(trace);
    LearnedProfile p;
    p.normalizer = set.normalizer;
    p.reference_face_cx = set.central_ref.cx_px;
    p.reference_face_cy = set.central_ref.cy_px;
    p.model = mlp_train(set, cfg.train);
    const auto& a = std::get<MlpModel>(p.model);
    const CalibrationProfile back = profile_from_string(profile_to_string(CalibrationProfile(p)));
    const auto& b = std::get<MlpModel>(std::get<LearnedProfile>(back).model);
    for (int r = 0; r < kRegionCount; ++r) {
        CHECK(a.nets[static_cast<std::size_t>(r)].w1 == b.nets[static_cast<std::size_t>(r)].w1);
        CHECK(a.nets[static_cast<std::size_t>(r)].b1 == b.nets[static_cast<std::size_t>(r)].b1);
        CHECK(a.nets[static_cast<std::size_t>(r)].w2 == b.nets[static_cast<std::size_t>(r)].w2);
        CHECK(a.nets[static_cast<std::size_t>(r)].b2 == b.nets[static_cast<std::size_t>(r)].b2);
    }
}

TEST_CASE("report json round-trips") {
    const SessionTrace trace = sample_trace(300, 7);
    SessionTrace labeled = trace;
    for (auto& l : labeled.labels)
        if (!l.has_value()) l = Region(3);
    const EvaluationReport rep = run_evaluation(
        labeled, [](const HeadPoseSample&) { return Region(2); }, 4);
    const EvaluationReport back = report_from_json(report_to_json(rep));
    CHECK(back.method == rep.method);
    CHECK(back.overall_accuracy == rep.overall_accuracy);
    CHECK(back.confusion.counts == rep.confusion.counts);
    CHECK(back.stats.yaw_std == rep.stats.yaw_std);
    CHECK_THROWS_AS(report_from_json("{not json"), Error);
}

}  // TEST_SUITE
