#include "doctest.h"

#include <cmath>
#include <limits>

#include "gaze/core.hpp"
#include "gaze/rng.hpp"
#include "oracle_helpers.hpp"

using namespace gaze;

TEST_SUITE("core") {

TEST_CASE("normalize_angle wraps the upper half-range") {
    CHECK(normalize_angle(350.0) == doctest::Approx(-10.0));
    CHECK(normalize_angle(0.0) == 0.0);
    CHECK(normalize_angle(179.5) == 179.5);
    CHECK(normalize_angle(180.0) == -180.0);
}

TEST_CASE("normalize_angle is idempotent on its output range") {
    Rng rng(11);
    for (int i = 0; i < 1000; ++i) {
        const double raw = rng.uniform(0.0, 360.0);
        const double once = normalize_angle(raw);
        CHECK(once >= -180.0);
        CHECK(once < 180.0);
        CHECK(normalize_angle(once) == once);
    }
}

TEST_CASE("normalize_angle rejects non-finite input") {
    CHECK_THROWS_AS(normalize_angle(std::numeric_limits<double>::quiet_NaN()), Error);
    CHECK_THROWS_AS(normalize_angle(std::numeric_limits<double>::infinity()), Error);
}

TEST_CASE("region ids outside 1..7 are rejected") {
    CHECK_THROWS_AS(Region(0), Error);
    CHECK_THROWS_AS(Region(8), Error);
    CHECK(Region(7).id() == 7);
}

TEST_CASE("default layout classification is total") {
    const RegionLayout layout = default_layout();
    Rng rng(77);
    for (int i = 0; i < 100000; ++i) {
        // Mix everyday displacements with huge off-screen ones.
        const double scale = (i % 10 == 0) ? 1e12 : 1.5;
        const double u = rng.uniform(-scale, scale);
        const double v = rng.uniform(-scale, scale);
        const Region r = layout.classify(u, v);
        CHECK(r.id() >= 1);
        CHECK(r.id() <= 7);
    }
    CHECK(layout.classify(1e308, 1e308).id() == 3);
    CHECK(layout.classify(-1e308, -1e308).id() == 2);
}

TEST_CASE("default layout matches the closed-form cell oracle") {
    const RegionLayout layout = default_layout();
    Rng rng(78);
    for (int i = 0; i < 20000; ++i) {
        const double u = rng.uniform(-0.75, 0.75);
        const double v = rng.uniform(-0.75, 0.75);
        CHECK(layout.classify(u, v).id() == oracle::default_layout_region(u, v));
    }
}

TEST_CASE("points exactly on a bound fall through to the default region") {
    const RegionLayout layout = default_layout();
    // Region 3's bound is strict, so sitting on it lands in region 1.
    CHECK(layout.classify(0.20, 0.15).id() == 1);
    CHECK(layout.classify(0.25, 0.10).id() == 1);
    CHECK(layout.classify(0.05, -0.30).id() == 1);
}

TEST_CASE("sample validation enforces ranges") {
    HeadPoseSample s;
    CHECK_NOTHROW(validate_sample(s));
    s.yaw_deg = 180.0;
    CHECK_THROWS_AS(validate_sample(s), Error);
    s.yaw_deg = 0.0;
    s.face_area_px2 = -1.0;
    CHECK_THROWS_AS(validate_sample(s), Error);
    s.face_area_px2 = 0.0;
    s.t_ms = -5.0;
    CHECK_THROWS_AS(validate_sample(s), Error);
}

TEST_CASE("trace validation checks ordering and probe span") {
    SessionTrace trace;
    trace.samples.push_back({0.0, 0, 0, 0, 0, 0, 0});
    trace.samples.push_back({10.0, 0, 0, 0, 0, 0, 0});
    CHECK_NOTHROW(trace.validate());
    trace.probes_ms.push_back(20.0);
    CHECK_THROWS_AS(trace.validate(), Error);
    trace.probes_ms.back() = 10.0;
    CHECK_NOTHROW(trace.validate());
    trace.samples.push_back({5.0, 0, 0, 0, 0, 0, 0});
    CHECK_THROWS_AS(trace.validate(), Error);
}

TEST_CASE("method-2 profile accessors enforce the point split") {
    Method2Profile p;
    CHECK_THROWS_AS(p.dx_at(13), Error);
    CHECK_THROWS_AS(p.dy_at(12), Error);
    p.border_dx[10] = 4.5;
    CHECK(p.dx_at(11) == 4.5);
    p.border_dy[9] = -3.0;
    CHECK(p.dy_at(22) == -3.0);
}

}  // TEST_SUITE
