#ifndef GAZE_CORE_HPP
#define GAZE_CORE_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "gaze/common.hpp"

namespace gaze {

constexpr int kRegionCount = 7;

// One of the seven scene regions, identified 1..7.
class Region {
public:
    Region() : id_(1) {}
    explicit Region(int id) {
        require(id >= 1 && id <= kRegionCount, ErrorKind::data,
                "region id must be in 1..7, got " + std::to_string(id));
        id_ = id;
    }
    int id() const { return id_; }
    // 0-based index for array storage.
    int index() const { return id_ - 1; }

    friend bool operator==(Region a, Region b) { return a.id_ == b.id_; }
    friend bool operator!=(Region a, Region b) { return a.id_ != b.id_; }
    friend bool operator<(Region a, Region b) { return a.id_ < b.id_; }

private:
    int id_;
};

// One timestamped sensor frame. Angles are signed degrees in [-180, 180).
// Roll is carried for completeness but no estimator consumes it.
struct HeadPoseSample {
    double t_ms = 0.0;
    double yaw_deg = 0.0;
    double pitch_deg = 0.0;
    double roll_deg = 0.0;
    double face_cx_px = 0.0;
    double face_cy_px = 0.0;
    double face_area_px2 = 0.0;
};

// Validates the sample invariants; throws a data error on violation.
void validate_sample(const HeadPoseSample& s);

// Maps a raw sensor angle reported in [0, 360) onto the signed convention:
// values at or above 180 wrap down by 360. Idempotent on [-180, 180).
double normalize_angle(double raw_deg);

// One strict half-plane test on normalized screen displacement.
// axis 0 tests dx/w, axis 1 tests dy/h. `greater` selects the > direction.
struct HalfPlane {
    int axis = 0;
    bool greater = true;
    double bound = 0.0;

    bool passes(double nx, double ny) const {
        const double v = axis == 0 ? nx : ny;
        return greater ? (v > bound) : (v < bound);
    }
};

struct LayoutRule {
    Region region;
    std::vector<HalfPlane> tests;  // conjunction, at most 4 in shipped tables
};

// Ordered first-match rule table over normalized displacements plus a
// default region, which makes classification a total function.
struct RegionLayout {
    std::vector<LayoutRule> rules;
    Region default_region{1};

    Region classify(double nx, double ny) const;
};

// The shipped 7-region table. Region 3 uses the fixed bounds
// dx > 0.2*w, dy > 0.1*h (plus an upper box so the mirror stays small);
// the remaining cells tile the scene with region 1 as the default.
RegionLayout default_layout();

// Screen dimensions, viewing distance and the region partition.
struct SceneGeometry {
    double screen_w_cm = 260.0;
    double screen_h_cm = 195.0;
    double distance_cm = 250.0;
    RegionLayout layout = default_layout();
};

void validate_geometry(const SceneGeometry& g);

// ---------------------------------------------------------------------------
// Calibration profiles

// Method 1: central offsets plus per-half-axis border scale factors.
// Negative-direction factors are stored as computed (negative values).
struct Method1Profile {
    double dx00_cm = 0.0;
    double dy00_cm = 0.0;
    double sx_pos = 1.0;
    double sx_neg = -1.0;
    double sy_pos = 1.0;
    double sy_neg = -1.0;
};

// Method 2: centered border displacements for the 23-point protocol.
// border_dx holds points 1..12 (x axis), border_dy points 13..23 (y axis).
struct Method2Profile {
    double dx00_cm = 0.0;
    double dy00_cm = 0.0;
    std::array<double, 12> border_dx{};
    std::array<double, 11> border_dy{};

    double dx_at(int point_id) const;  // point_id in 1..12
    double dy_at(int point_id) const;  // point_id in 13..23
};

// Per-feature standardizer fitted on a training set.
struct Normalizer {
    std::array<double, 5> mean{};
    std::array<double, 5> scale{};           // strictly positive
    std::array<bool, 5> zero_variance{};     // guarded features map to 0

    std::array<double, 5> apply(const std::array<double, 5>& v) const;
    std::array<double, 5> invert(const std::array<double, 5>& v) const;
};

// One binary network of the ensemble: 5 -> 14 -> 1 with symmetric sigmoid
// activations beta*tanh(alpha*x) on both layers.
struct MlpNetwork {
    std::array<double, 14 * 5> w1{};
    std::array<double, 14> b1{};
    std::array<double, 14> w2{};
    double b2 = 0.0;
};

struct MlpModel {
    std::array<MlpNetwork, kRegionCount> nets{};
    double alpha = 2.0 / 3.0;
    double beta = 1.7159;
};

// One pairwise linear classifier of the one-vs-one decomposition.
// Decision value is w.x + b; positive favours `lo`, negative `hi`.
struct SvmBinary {
    int lo = 1;
    int hi = 2;
    std::array<double, 5> w{};
    double b = 0.0;
    std::vector<double> alpha;   // dual coefficients, 0 <= a <= C
    std::vector<int> sv_index;   // pattern indices the coefficients refer to
    bool converged = true;
};

struct SvmModel {
    std::vector<SvmBinary> pairs;  // 21 entries for 7 classes
    bool converged = true;
};

// Learned-method profile: feature normalizer, the central-gaze face
// reference, and one trained classifier.
struct LearnedProfile {
    Normalizer normalizer;
    double reference_face_cx = 0.0;
    double reference_face_cy = 0.0;
    std::vector<int> feature_subset{0, 1, 2, 3, 4};  // 0-based feature ids
    bool standardized = true;
    std::variant<MlpModel, SvmModel> model;
};

using CalibrationProfile = std::variant<Method1Profile, Method2Profile, LearnedProfile>;

// Method identifier of a profile: 1, 2, 3 (MLP) or 4 (SVM).
int profile_method(const CalibrationProfile& p);

// ---------------------------------------------------------------------------
// Session traces

struct TraceMeta {
    std::string sensor = "unknown";
    std::string persona = "unknown";
    std::uint64_t seed = 0;
    double fps = 30.0;
};

// Ordered sensor frames with optional ground-truth labels and probe marks.
// Probe timestamps always coincide with a sample timestamp (frame-aligned)
// so the line format's per-sample probe flag round-trips exactly.
struct SessionTrace {
    std::vector<HeadPoseSample> samples;
    std::vector<std::optional<Region>> labels;  // empty or one entry per sample
    std::vector<double> probes_ms;
    TraceMeta meta;

    bool has_labels() const { return !labels.empty(); }
    void validate() const;
};

}  // namespace gaze

#endif
