#include "gaze/core.hpp"

#include <algorithm>
#include <cmath>

namespace gaze {

void validate_sample(const HeadPoseSample& s) {
    require_finite(s.t_ms, "t_ms");
    require(s.t_ms >= 0.0, ErrorKind::data, "t_ms must be non-negative");
    for (double a : {s.yaw_deg, s.pitch_deg, s.roll_deg}) {
        require_finite(a, "angle");
        require(a >= -180.0 && a < 180.0, ErrorKind::data, "angle outside [-180, 180)");
    }
    require_finite(s.face_cx_px, "face_cx_px");
    require_finite(s.face_cy_px, "face_cy_px");
    require_finite(s.face_area_px2, "face_area_px2");
    require(s.face_area_px2 >= 0.0, ErrorKind::data, "face_area_px2 must be >= 0");
}

double normalize_angle(double raw_deg) {
    require_finite(raw_deg, "angle");
    return raw_deg >= 180.0 ? raw_deg - 360.0 : raw_deg;
}

Region RegionLayout::classify(double nx, double ny) const {
    require_finite(nx, "normalized dx");
    require_finite(ny, "normalized dy");
    for (const LayoutRule& rule : rules) {
        bool all = true;
        for (const HalfPlane& t : rule.tests) {
            if (!t.passes(nx, ny)) {
                all = false;
                break;
            }
        }
        if (all) return rule.region;
    }
    return default_region;
}

RegionLayout default_layout() {
    // Bounds are fractions of screen width (axis 0) and height (axis 1);
    // +x is rightward, +y upward. First match wins, ties fall through.
    RegionLayout layout;
    layout.default_region = Region(1);
    auto gt = [](int axis, double bound) { return HalfPlane{axis, true, bound}; };
    auto lt = [](int axis, double bound) { return HalfPlane{axis, false, bound}; };

    // Rear-view mirror, up-right of center.
    layout.rules.push_back({Region(3), {gt(0, 0.20), gt(1, 0.10)}});
    // Speedometer, lower-left corner.
    layout.rules.push_back({Region(2), {lt(0, -0.20), lt(1, -0.10)}});
    // Left mirror and door glass: the remaining left band.
    layout.rules.push_back({Region(4), {lt(0, -0.20)}});
    // Right dashboard, lower-right corner.
    layout.rules.push_back({Region(7), {gt(0, 0.20), lt(1, -0.10)}});
    // Steering wheel, lower center-left.
    layout.rules.push_back({Region(5), {lt(0, 0.05), lt(1, -0.10)}});
    // Rpm meter and gear indicator, lower center-right.
    layout.rules.push_back({Region(6), {gt(0, 0.05), lt(1, -0.10)}});
    return layout;
}

void validate_geometry(const SceneGeometry& g) {
    require(g.screen_w_cm > 0.0 && g.screen_h_cm > 0.0 && g.distance_cm > 0.0,
            ErrorKind::data, "scene dimensions must be strictly positive");
}

double Method2Profile::dx_at(int point_id) const {
    require(point_id >= 1 && point_id <= 12, ErrorKind::usage,
            "x displacement defined for points 1..12");
    return border_dx[static_cast<std::size_t>(point_id - 1)];
}

double Method2Profile::dy_at(int point_id) const {
    require(point_id >= 13 && point_id <= 23, ErrorKind::usage,
            "y displacement defined for points 13..23");
    return border_dy[static_cast<std::size_t>(point_id - 13)];
}

std::array<double, 5> Normalizer::apply(const std::array<double, 5>& v) const {
    std::array<double, 5> out{};
    for (std::size_t i = 0; i < 5; ++i)
        out[i] = zero_variance[i] ? 0.0 : (v[i] - mean[i]) / scale[i];
    return out;
}

std::array<double, 5> Normalizer::invert(const std::array<double, 5>& v) const {
    std::array<double, 5> out{};
    for (std::size_t i = 0; i < 5; ++i)
        out[i] = zero_variance[i] ? mean[i] : v[i] * scale[i] + mean[i];
    return out;
}

int profile_method(const CalibrationProfile& p) {
    if (std::holds_alternative<Method1Profile>(p)) return 1;
    if (std::holds_alternative<Method2Profile>(p)) return 2;
    const auto& learned = std::get<LearnedProfile>(p);
    return std::holds_alternative<MlpModel>(learned.model) ? 3 : 4;
}

void SessionTrace::validate() const {
    if (!labels.empty())
        require(labels.size() == samples.size(), ErrorKind::data,
                "label list must match sample count");
    for (std::size_t i = 0; i < samples.size(); ++i) {
        validate_sample(samples[i]);
        if (i > 0)
            require(samples[i].t_ms > samples[i - 1].t_ms, ErrorKind::data,
                    "sample timestamps must be strictly increasing");
    }
    if (!samples.empty()) {
        const double t0 = samples.front().t_ms;
        const double t1 = samples.back().t_ms;
        for (double p : probes_ms)
            require(p >= t0 && p <= t1, ErrorKind::data,
                    "probe timestamp outside the sample time span");
    } else {
        require(probes_ms.empty(), ErrorKind::data, "probes require samples");
    }
}

}  // namespace gaze
