#ifndef GAZE_HARNESS_HPP
#define GAZE_HARNESS_HPP

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gaze/core.hpp"
#include "gaze/learners.hpp"
#include "gaze/projection.hpp"

namespace gaze {

// Rows are actual regions, columns predicted regions.
struct ConfusionMatrix {
    std::array<std::array<long long, kRegionCount>, kRegionCount> counts{};

    long long row_total(int region_index) const;
    long long total() const;
    long long diagonal() const;
    // Row-normalized percentage; 0 for empty rows.
    double percent(int actual_index, int predicted_index) const;
};

struct HeadPoseStats {
    double yaw_mean = 0.0, yaw_std = 0.0, yaw_max = 0.0, yaw_min = 0.0, yaw_rate = 0.0;
    double pitch_mean = 0.0, pitch_std = 0.0, pitch_max = 0.0, pitch_min = 0.0,
           pitch_rate = 0.0;
};

struct EvaluationReport {
    ConfusionMatrix confusion;
    double overall_accuracy = 0.0;  // percent
    // Percent per region; NaN when the region never occurs at a probe.
    std::array<double, kRegionCount> per_region_accuracy{};
    long long probe_count = 0;
    int method = 0;
    std::string sensor = "unknown";
    std::string persona = "unknown";
    std::uint64_t seed = 0;
    HeadPoseStats stats;
};

using RegionPredictor = std::function<Region(const HeadPoseSample&)>;

// A calibrated method bound to its scene geometry.
class Estimator {
public:
    Estimator(CalibrationProfile profile, SceneGeometry geometry,
              ScalingMode mode = ScalingMode::corrective,
              Method2Table table = default_method2_table());

    Region predict(const HeadPoseSample& sample) const;
    int method() const { return method_; }
    const CalibrationProfile& profile() const { return profile_; }

private:
    CalibrationProfile profile_;
    SceneGeometry geometry_;
    ScalingMode mode_;
    Method2Table table_;
    int method_ = 0;
};

// Throws when the profile's method does not match the requested one.
Estimator make_estimator(const CalibrationProfile& profile, const SceneGeometry& geometry,
                         std::optional<int> expected_method = std::nullopt,
                         ScalingMode mode = ScalingMode::corrective,
                         Method2Table table = default_method2_table());

// Pairs each probe with the nearest sample at-or-before it, predicts, and
// tallies (actual, predicted). The trace must carry labels and >= 1 probe.
EvaluationReport run_evaluation(const SessionTrace& trace, const RegionPredictor& predictor,
                                int method_id);

EvaluationReport run_evaluation(const SessionTrace& trace, const Estimator& estimator);

HeadPoseStats head_pose_stats(const SessionTrace& trace);

// Method-comparison table: per-region accuracy rows plus an overall row,
// and an error-rate summary with per-persona rows when personas differ.
struct ComparisonTable {
    std::vector<std::string> columns;  // one per report, in input order
    std::array<std::vector<double>, kRegionCount> region_acc;
    std::vector<double> overall_acc;
    std::vector<double> overall_err;
    std::vector<std::string> persona_rows;
    std::vector<std::vector<double>> persona_err;  // [persona_row][column]
};

ComparisonTable compare_report(const std::vector<EvaluationReport>& reports);

std::string render_comparison(const ComparisonTable& table);
std::string render_report(const EvaluationReport& report);
std::string render_stats(const HeadPoseStats& stats);

// ---------------------------------------------------------------------------
// Persistence

// Trace line format, one header plus one record per sample:
//   #gazetrace v1 sensor=<name> persona=<name> seed=<u64> fps=<f64>
//   t_ms yaw pitch roll face_cx face_cy face_area label probe
// Decimals carry 17 significant digits; label is 1..7 or '-'.
void write_trace(const SessionTrace& trace, const std::string& path);
SessionTrace read_trace(const std::string& path);

std::string trace_to_string(const SessionTrace& trace);
SessionTrace trace_from_string(const std::string& text);

// Versioned checksummed text format; load(save(p)) reproduces every
// estimator output exactly.
void save_profile(const CalibrationProfile& profile, const std::string& path);
CalibrationProfile load_profile(const std::string& path);

std::string profile_to_string(const CalibrationProfile& profile);
CalibrationProfile profile_from_string(const std::string& text);

// Report files consumed by the `report` subcommand.
std::string report_to_json(const EvaluationReport& report);
EvaluationReport report_from_json(const std::string& text);

}  // namespace gaze

#endif
