#include "gaze/projection.hpp"

#include <cmath>
#include <string>

namespace gaze {

Displacement angular_displacement(double yaw_deg, double pitch_deg, double d_cm) {
    require_finite(yaw_deg, "yaw");
    require_finite(pitch_deg, "pitch");
    require(d_cm > 0.0, ErrorKind::data, "distance must be positive");
    require(std::abs(yaw_deg) < 90.0 && std::abs(pitch_deg) < 90.0, ErrorKind::data,
            "angles must lie strictly inside (-90, 90) deg");
    return {std::tan(deg_to_rad(yaw_deg)) * d_cm, std::tan(deg_to_rad(pitch_deg)) * d_cm};
}

double horizontal_fov(double w_cm, double d_cm) {
    require(w_cm >= 0.0, ErrorKind::data, "width must be non-negative");
    require(d_cm > 0.0, ErrorKind::data, "distance must be positive");
    return rad_to_deg(2.0 * std::atan(w_cm / (2.0 * d_cm)));
}

Displacement center_offset(const Displacement& disp, const Displacement& center_ref) {
    require_finite(disp.dx_cm, "dx");
    require_finite(disp.dy_cm, "dy");
    require_finite(center_ref.dx_cm, "reference dx");
    require_finite(center_ref.dy_cm, "reference dy");
    return {disp.dx_cm - center_ref.dx_cm, disp.dy_cm - center_ref.dy_cm};
}

ScaleFactors fit_scaling(const Displacement& pt1, const Displacement& pt2,
                         const Displacement& pt3, const Displacement& pt4,
                         const SceneGeometry& geometry) {
    validate_geometry(geometry);
    require(pt1.dx_cm > 0.0, ErrorKind::calibration,
            "calibration point pt1: expected a rightward displacement");
    require(pt2.dx_cm < 0.0, ErrorKind::calibration,
            "calibration point pt2: expected a leftward displacement");
    require(pt3.dy_cm > 0.0, ErrorKind::calibration,
            "calibration point pt3: expected an upward displacement");
    require(pt4.dy_cm < 0.0, ErrorKind::calibration,
            "calibration point pt4: expected a downward displacement");
    ScaleFactors s;
    s.sx_pos = pt1.dx_cm / (geometry.screen_w_cm / 2.0);
    s.sx_neg = pt2.dx_cm / (geometry.screen_w_cm / 2.0);
    s.sy_pos = pt3.dy_cm / (geometry.screen_h_cm / 2.0);
    s.sy_neg = pt4.dy_cm / (geometry.screen_h_cm / 2.0);
    return s;
}

namespace {

double scale_one(double value, double s_pos, double s_neg, ScalingMode mode) {
    if (value == 0.0) return 0.0;
    const double s = value > 0.0 ? s_pos : s_neg;
    require(s != 0.0, ErrorKind::calibration, "zero scale factor");
    // Corrective mode divides by the factor magnitude so a calibration
    // border displacement lands exactly on the screen edge.
    return mode == ScalingMode::corrective ? value / std::abs(s) : value * s;
}

}  // namespace

Displacement apply_scaling(const Displacement& disp, const Method1Profile& profile,
                           ScalingMode mode) {
    return {scale_one(disp.dx_cm, profile.sx_pos, profile.sx_neg, mode),
            scale_one(disp.dy_cm, profile.sy_pos, profile.sy_neg, mode)};
}

Region static_decide(const Displacement& disp, const SceneGeometry& geometry) {
    require_finite(disp.dx_cm, "dx");
    require_finite(disp.dy_cm, "dy");
    return geometry.layout.classify(disp.dx_cm / geometry.screen_w_cm,
                                    disp.dy_cm / geometry.screen_h_cm);
}

Displacement aggregate_dwell(const CalibrationDwell& dwell, double d_cm) {
    require(!dwell.samples.empty(), ErrorKind::calibration,
            "calibration point " + std::to_string(dwell.point_id) + ": empty dwell");
    const double t0 = dwell.samples.front().t_ms + kDwellTrimMs;
    double sx = 0.0, sy = 0.0;
    std::size_t n = 0;
    for (const HeadPoseSample& s : dwell.samples) {
        if (s.t_ms < t0) continue;
        const Displacement d = angular_displacement(s.yaw_deg, s.pitch_deg, d_cm);
        sx += d.dx_cm;
        sy += d.dy_cm;
        ++n;
    }
    require(n > 0, ErrorKind::calibration,
            "calibration point " + std::to_string(dwell.point_id) +
                ": no samples after transit trimming");
    return {sx / static_cast<double>(n), sy / static_cast<double>(n)};
}

namespace {

const CalibrationDwell& find_dwell(const std::vector<CalibrationDwell>& dwells, int id) {
    for (const CalibrationDwell& d : dwells)
        if (d.point_id == id) return d;
    throw Error(ErrorKind::calibration,
                "missing calibration point " + std::to_string(id));
}

}  // namespace

namespace {

// Method 1 needs a settled second of data per point on top of the trim.
void require_dwell_span(const CalibrationDwell& dwell) {
    const double span =
        dwell.samples.empty()
            ? 0.0
            : dwell.samples.back().t_ms - dwell.samples.front().t_ms - kDwellTrimMs;
    require(span >= 1000.0, ErrorKind::calibration,
            "calibration point " + std::to_string(dwell.point_id) +
                ": dwell too short, need >= 1 s after transit");
}

}  // namespace

Method1Profile calibrate_method1(const std::vector<CalibrationDwell>& dwells,
                                 const SceneGeometry& geometry) {
    validate_geometry(geometry);
    const CalibrationDwell& center_dwell = find_dwell(dwells, 0);
    require_dwell_span(center_dwell);
    const Displacement center = aggregate_dwell(center_dwell, geometry.distance_cm);
    std::array<Displacement, 4> pts;
    for (int id = 1; id <= 4; ++id) {
        const CalibrationDwell& dwell = find_dwell(dwells, id);
        require_dwell_span(dwell);
        const Displacement raw = aggregate_dwell(dwell, geometry.distance_cm);
        pts[static_cast<std::size_t>(id - 1)] = center_offset(raw, center);
    }
    const ScaleFactors s = fit_scaling(pts[0], pts[1], pts[2], pts[3], geometry);
    Method1Profile profile;
    profile.dx00_cm = center.dx_cm;
    profile.dy00_cm = center.dy_cm;
    profile.sx_pos = s.sx_pos;
    profile.sx_neg = s.sx_neg;
    profile.sy_pos = s.sy_pos;
    profile.sy_neg = s.sy_neg;
    return profile;
}

const Method2Table& default_method2_table() {
    static const Method2Table table = [] {
        Method2Table t;
        t.default_region = Region(1);
        // Points 1..12 sit on vertical rule boundaries (x displacements),
        // points 13..23 on horizontal ones (y displacements). Positions are
        // normalized (u = dx/w, v = dy/h).
        t.points = {{
            {1, -0.20, 0.10},  {2, -0.20, 0.30},   {3, -0.20, -0.30}, {4, -0.20, -0.45},
            {5, 0.05, -0.30},  {6, 0.05, -0.45},   {7, 0.05, -0.20},  {8, 0.05, -0.40},
            {9, 0.20, -0.30},  {10, 0.20, -0.15},  {11, 0.20, 0.17},  {12, 0.20, 0.30},
            {13, -0.35, -0.10}, {14, -0.45, -0.10}, {15, -0.075, -0.10}, {16, 0.0, -0.10},
            {17, 0.125, -0.10}, {18, 0.18, -0.10},  {19, 0.35, -0.10}, {20, 0.45, -0.10},
            {21, 0.22, 0.10},   {22, 0.27, 0.10},   {23, 0.40, 0.10},
        }};
        auto gt = [](int id) { return PointRuleTest{id, true}; };
        auto lt = [](int id) { return PointRuleTest{id, false}; };
        t.rules.push_back({Region(3), {gt(11), gt(22)}});
        t.rules.push_back({Region(2), {lt(3), lt(13)}});
        t.rules.push_back({Region(4), {lt(1)}});
        t.rules.push_back({Region(7), {gt(9), lt(19)}});
        t.rules.push_back({Region(5), {lt(5), lt(15)}});
        t.rules.push_back({Region(6), {gt(7), lt(17)}});
        return t;
    }();
    return table;
}

Method2Profile calibrate_method2(const std::vector<CalibrationDwell>& dwells,
                                 const SceneGeometry& geometry, const Method2Table& table) {
    validate_geometry(geometry);
    (void)table;
    const Displacement center = aggregate_dwell(find_dwell(dwells, 0), geometry.distance_cm);
    Method2Profile profile;
    profile.dx00_cm = center.dx_cm;
    profile.dy00_cm = center.dy_cm;
    for (int id = 1; id <= 23; ++id) {
        const Displacement raw = aggregate_dwell(find_dwell(dwells, id), geometry.distance_cm);
        const Displacement c = center_offset(raw, center);
        if (id <= 12)
            profile.border_dx[static_cast<std::size_t>(id - 1)] = c.dx_cm;
        else
            profile.border_dy[static_cast<std::size_t>(id - 13)] = c.dy_cm;
    }
    return profile;
}

Region adapted_decide(const Displacement& centered, const Method2Profile& profile,
                      const Method2Table& table) {
    require_finite(centered.dx_cm, "dx");
    require_finite(centered.dy_cm, "dy");
    for (const PointRule& rule : table.rules) {
        bool all = true;
        for (const PointRuleTest& test : rule.tests) {
            const bool x_axis = test.point_id <= 12;
            const double value = x_axis ? centered.dx_cm : centered.dy_cm;
            const double bound = x_axis ? profile.dx_at(test.point_id)
                                        : profile.dy_at(test.point_id);
            const bool pass = test.greater ? (value > bound) : (value < bound);
            if (!pass) {
                all = false;
                break;
            }
        }
        if (all) return rule.region;
    }
    return table.default_region;
}

}  // namespace gaze
