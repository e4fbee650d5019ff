#ifndef GAZE_PROJECTION_HPP
#define GAZE_PROJECTION_HPP

#include <array>
#include <vector>

#include "gaze/core.hpp"

namespace gaze {

// Signed on-screen displacement from screen center, in cm.
struct Displacement {
    double dx_cm = 0.0;
    double dy_cm = 0.0;
};

// Samples captured while the user holds gaze on one calibration point.
struct CalibrationDwell {
    int point_id = 0;  // 0 = central point, 1..N = protocol points
    std::vector<HeadPoseSample> samples;
};

// Milliseconds discarded at the start of every dwell (head transit).
constexpr double kDwellTrimMs = 500.0;

// Projects head rotation onto the screen plane: dx = tan(yaw)*d,
// dy = tan(pitch)*d. Angles at or beyond +-90 deg are rejected.
Displacement angular_displacement(double yaw_deg, double pitch_deg, double d_cm);

// Full horizontal field of view of a screen of width w at distance d, deg.
double horizontal_fov(double w_cm, double d_cm);

// Subtracts the central-gaze displacement componentwise.
Displacement center_offset(const Displacement& disp, const Displacement& center_ref);

enum class ScalingMode {
    corrective,  // divide by |s| so calibration border points map to edges
    as_written,  // multiply by the signed factor exactly as calibrated
};

struct ScaleFactors {
    double sx_pos = 1.0;
    double sx_neg = -1.0;
    double sy_pos = 1.0;
    double sy_neg = -1.0;
};

// Border-point scale factors: s = centered displacement / half screen extent.
// Displacements with the wrong sign are a calibration-quality error.
ScaleFactors fit_scaling(const Displacement& pt1, const Displacement& pt2,
                         const Displacement& pt3, const Displacement& pt4,
                         const SceneGeometry& geometry);

// Applies the per-half-axis scaling to a centered displacement.
Displacement apply_scaling(const Displacement& disp, const Method1Profile& profile,
                           ScalingMode mode = ScalingMode::corrective);

// Rule-table decision on a scaled displacement, normalized by screen size.
Region static_decide(const Displacement& disp, const SceneGeometry& geometry);

// Mean displacement of a dwell after trimming the first kDwellTrimMs.
// Throws a calibration error if nothing remains.
Displacement aggregate_dwell(const CalibrationDwell& dwell, double d_cm);

// Five-point calibration: center, right, left, top, bottom.
Method1Profile calibrate_method1(const std::vector<CalibrationDwell>& dwells,
                                 const SceneGeometry& geometry);

// ---------------------------------------------------------------------------
// Method 2: 23 border points

// Normalized position of one protocol point on a layout rule boundary.
struct BorderPoint {
    int id = 0;      // 1..23
    double u = 0.0;  // dx / w
    double v = 0.0;  // dy / h
};

// One half-plane test bound to a calibrated point instead of a fixed
// fraction. Points 1..12 bound the x axis, 13..23 the y axis.
struct PointRuleTest {
    int point_id = 0;
    bool greater = true;
};

struct PointRule {
    Region region;
    std::vector<PointRuleTest> tests;
};

struct Method2Table {
    std::array<BorderPoint, 23> points{};
    std::vector<PointRule> rules;
    Region default_region{1};
};

// Shipped defaults: points sit on the default layout's rule boundaries and
// the rule list mirrors the static table bound-for-bound (region 3 uses
// points 11 and 22).
const Method2Table& default_method2_table();

// 24-dwell calibration: dwell 0 is the central point, dwells 1..23 the
// border points. Stores centered dx for 1..12 and centered dy for 13..23.
Method2Profile calibrate_method2(const std::vector<CalibrationDwell>& dwells,
                                 const SceneGeometry& geometry,
                                 const Method2Table& table = default_method2_table());

// Decision against the calibrated border displacements; first match wins,
// unmatched displacements fall back to the table's default region.
Region adapted_decide(const Displacement& centered, const Method2Profile& profile,
                      const Method2Table& table = default_method2_table());

}  // namespace gaze

#endif
