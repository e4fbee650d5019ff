#include "gaze/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "gaze/parallel.hpp"

namespace gaze {

long long ConfusionMatrix::row_total(int region_index) const {
    long long t = 0;
    for (long long v : counts[static_cast<std::size_t>(region_index)]) t += v;
    return t;
}

long long ConfusionMatrix::total() const {
    long long t = 0;
    for (int r = 0; r < kRegionCount; ++r) t += row_total(r);
    return t;
}

long long ConfusionMatrix::diagonal() const {
    long long t = 0;
    for (int r = 0; r < kRegionCount; ++r)
        t += counts[static_cast<std::size_t>(r)][static_cast<std::size_t>(r)];
    return t;
}

double ConfusionMatrix::percent(int actual_index, int predicted_index) const {
    const long long row = row_total(actual_index);
    if (row == 0) return 0.0;
    return 100.0 *
           static_cast<double>(
               counts[static_cast<std::size_t>(actual_index)][static_cast<std::size_t>(predicted_index)]) /
           static_cast<double>(row);
}

Estimator::Estimator(CalibrationProfile profile, SceneGeometry geometry, ScalingMode mode,
                     Method2Table table)
    : profile_(std::move(profile)), geometry_(std::move(geometry)), mode_(mode),
      table_(std::move(table)) {
    validate_geometry(geometry_);
    method_ = profile_method(profile_);
}

Region Estimator::predict(const HeadPoseSample& sample) const {
    if (const auto* m1 = std::get_if<Method1Profile>(&profile_)) {
        const Displacement raw =
            angular_displacement(sample.yaw_deg, sample.pitch_deg, geometry_.distance_cm);
        const Displacement centered = center_offset(raw, {m1->dx00_cm, m1->dy00_cm});
        return static_decide(apply_scaling(centered, *m1, mode_), geometry_);
    }
    if (const auto* m2 = std::get_if<Method2Profile>(&profile_)) {
        const Displacement raw =
            angular_displacement(sample.yaw_deg, sample.pitch_deg, geometry_.distance_cm);
        const Displacement centered = center_offset(raw, {m2->dx00_cm, m2->dy00_cm});
        return adapted_decide(centered, *m2, table_);
    }
    const auto& learned = std::get<LearnedProfile>(profile_);
    const FeatureVector raw = extract_features(
        sample, FaceReference{learned.reference_face_cx, learned.reference_face_cy});
    const FeatureVector input = model_input(learned.normalizer, learned.feature_subset,
                                            learned.standardized, raw);
    if (const auto* mlp = std::get_if<MlpModel>(&learned.model)) return mlp_predict(*mlp, input);
    return svm_predict(std::get<SvmModel>(learned.model), input);
}

Estimator make_estimator(const CalibrationProfile& profile, const SceneGeometry& geometry,
                         std::optional<int> expected_method, ScalingMode mode,
                         Method2Table table) {
    if (expected_method.has_value())
        require(profile_method(profile) == *expected_method, ErrorKind::usage,
                "profile is for method " + std::to_string(profile_method(profile)) +
                    ", expected method " + std::to_string(*expected_method));
    return Estimator(profile, geometry, mode, std::move(table));
}

EvaluationReport run_evaluation(const SessionTrace& trace, const RegionPredictor& predictor,
                                int method_id) {
    trace.validate();
    require(trace.has_labels(), ErrorKind::data, "evaluation trace must carry labels");
    require(!trace.probes_ms.empty(), ErrorKind::data, "evaluation trace has no probes");

    const std::size_t n = trace.probes_ms.size();
    std::vector<int> actual(n), predicted(n);
    std::exception_ptr failure;
    par::parallel_for(n, [&](std::size_t p) {
        try {
            const double probe = trace.probes_ms[p];
            auto it = std::upper_bound(
                trace.samples.begin(), trace.samples.end(), probe,
                [](double t, const HeadPoseSample& s) { return t < s.t_ms; });
            require(it != trace.samples.begin(), ErrorKind::data,
                    "probe precedes the first sample");
            const std::size_t sample_idx =
                static_cast<std::size_t>(std::distance(trace.samples.begin(), it)) - 1;
            const std::optional<Region>& label = trace.labels[sample_idx];
            require(label.has_value(), ErrorKind::data, "probe sample is unlabeled");
            actual[p] = label->index();
            predicted[p] = predictor(trace.samples[sample_idx]).index();
        } catch (...) {
            failure = std::current_exception();
        }
    });
    if (failure) std::rethrow_exception(failure);

    EvaluationReport report;
    report.method = method_id;
    report.sensor = trace.meta.sensor;
    report.persona = trace.meta.persona;
    report.seed = trace.meta.seed;
    report.probe_count = static_cast<long long>(n);
    for (std::size_t p = 0; p < n; ++p)
        ++report.confusion.counts[static_cast<std::size_t>(actual[p])]
                                 [static_cast<std::size_t>(predicted[p])];

    const long long total = report.confusion.total();
    report.overall_accuracy =
        100.0 * static_cast<double>(report.confusion.diagonal()) / static_cast<double>(total);
    double weighted = 0.0;
    for (int r = 0; r < kRegionCount; ++r) {
        const long long row = report.confusion.row_total(r);
        if (row == 0) {
            report.per_region_accuracy[static_cast<std::size_t>(r)] =
                std::numeric_limits<double>::quiet_NaN();
            continue;
        }
        const double acc = report.confusion.percent(r, r);
        report.per_region_accuracy[static_cast<std::size_t>(r)] = acc;
        weighted += acc * static_cast<double>(row) / static_cast<double>(total);
    }
    // Overall accuracy is the probe-frequency-weighted mean of the
    // per-region accuracies by construction; keep the identity checked.
    require(std::abs(weighted - report.overall_accuracy) < 1e-9, ErrorKind::data,
            "confusion bookkeeping violated the weighted-mean identity");
    report.stats = head_pose_stats(trace);
    return report;
}

EvaluationReport run_evaluation(const SessionTrace& trace, const Estimator& estimator) {
    return run_evaluation(
        trace, [&](const HeadPoseSample& s) { return estimator.predict(s); },
        estimator.method());
}

HeadPoseStats head_pose_stats(const SessionTrace& trace) {
    require(trace.samples.size() >= 2, ErrorKind::data,
            "head-pose statistics need at least 2 samples");
    HeadPoseStats st;
    const double n = static_cast<double>(trace.samples.size());
    double ysum = 0.0, psum = 0.0;
    st.yaw_max = st.yaw_min = trace.samples.front().yaw_deg;
    st.pitch_max = st.pitch_min = trace.samples.front().pitch_deg;
    for (const HeadPoseSample& s : trace.samples) {
        ysum += s.yaw_deg;
        psum += s.pitch_deg;
        st.yaw_max = std::max(st.yaw_max, s.yaw_deg);
        st.yaw_min = std::min(st.yaw_min, s.yaw_deg);
        st.pitch_max = std::max(st.pitch_max, s.pitch_deg);
        st.pitch_min = std::min(st.pitch_min, s.pitch_deg);
    }
    st.yaw_mean = ysum / n;
    st.pitch_mean = psum / n;
    double yvar = 0.0, pvar = 0.0, yrate = 0.0, prate = 0.0;
    for (std::size_t i = 0; i < trace.samples.size(); ++i) {
        const HeadPoseSample& s = trace.samples[i];
        yvar += (s.yaw_deg - st.yaw_mean) * (s.yaw_deg - st.yaw_mean);
        pvar += (s.pitch_deg - st.pitch_mean) * (s.pitch_deg - st.pitch_mean);
        if (i > 0) {
            const HeadPoseSample& prev = trace.samples[i - 1];
            const double dt_s = (s.t_ms - prev.t_ms) / 1000.0;
            yrate += std::abs(s.yaw_deg - prev.yaw_deg) / dt_s;
            prate += std::abs(s.pitch_deg - prev.pitch_deg) / dt_s;
        }
    }
    st.yaw_std = std::sqrt(yvar / n);
    st.pitch_std = std::sqrt(pvar / n);
    st.yaw_rate = yrate / (n - 1.0);
    st.pitch_rate = prate / (n - 1.0);
    return st;
}

ComparisonTable compare_report(const std::vector<EvaluationReport>& reports) {
    require(!reports.empty(), ErrorKind::usage, "no reports to compare");
    ComparisonTable table;
    bool personas_differ = false;
    for (const EvaluationReport& r : reports) {
        require(r.probe_count > 0, ErrorKind::data, "report without probes");
        table.columns.push_back("Method " + std::to_string(r.method));
        for (int reg = 0; reg < kRegionCount; ++reg)
            table.region_acc[static_cast<std::size_t>(reg)].push_back(
                r.per_region_accuracy[static_cast<std::size_t>(reg)]);
        table.overall_acc.push_back(r.overall_accuracy);
        table.overall_err.push_back(100.0 - r.overall_accuracy);
        if (r.persona != reports.front().persona) personas_differ = true;
    }
    if (personas_differ) {
        std::map<std::string, std::vector<double>> rows;
        for (std::size_t i = 0; i < reports.size(); ++i) {
            auto& row = rows[reports[i].persona];
            row.resize(reports.size(), std::numeric_limits<double>::quiet_NaN());
            row[i] = 100.0 - reports[i].overall_accuracy;
        }
        for (auto& [persona, row] : rows) {
            table.persona_rows.push_back(persona);
            table.persona_err.push_back(row);
        }
    }
    return table;
}

namespace {

std::string fixed2(double v) {
    if (std::isnan(v)) return "-";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string pct_int(double v) {
    if (std::isnan(v)) return "-";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.0f%%", v);
    return buf;
}

void render_row(std::ostringstream& out, const std::string& label,
                const std::vector<std::string>& cells) {
    out << label;
    for (const std::string& c : cells) {
        out << '\t' << c;
    }
    out << '\n';
}

}  // namespace

std::string render_comparison(const ComparisonTable& table) {
    std::ostringstream out;
    render_row(out, "", table.columns);
    for (int r = 0; r < kRegionCount; ++r) {
        std::vector<std::string> cells;
        for (double v : table.region_acc[static_cast<std::size_t>(r)])
            cells.push_back(pct_int(v));
        render_row(out, "Region " + std::to_string(r + 1), cells);
    }
    std::vector<std::string> overall;
    for (double v : table.overall_acc) overall.push_back(fixed2(v) + "%");
    render_row(out, "Overall accuracy", overall);
    std::vector<std::string> err;
    for (double v : table.overall_err) err.push_back(fixed2(v) + "%");
    render_row(out, "Overall error rate", err);
    for (std::size_t p = 0; p < table.persona_rows.size(); ++p) {
        std::vector<std::string> cells;
        for (double v : table.persona_err[p])
            cells.push_back(std::isnan(v) ? "-" : fixed2(v) + "%");
        render_row(out, "Error rate, persona " + table.persona_rows[p], cells);
    }
    return out.str();
}

std::string render_report(const EvaluationReport& report) {
    std::ostringstream out;
    out << "Method " << report.method << "  sensor=" << report.sensor
        << "  persona=" << report.persona << "  seed=" << report.seed << '\n';
    out << "Accuracy: " << fixed2(report.overall_accuracy)
        << "%  Error rate: " << fixed2(100.0 - report.overall_accuracy)
        << "%  Probes: " << report.probe_count << '\n';
    out << "actual\\predicted";
    for (int c = 1; c <= kRegionCount; ++c) out << '\t' << c;
    out << '\n';
    for (int r = 0; r < kRegionCount; ++r) {
        out << r + 1;
        for (int c = 0; c < kRegionCount; ++c) out << '\t' << pct_int(report.confusion.percent(r, c));
        out << '\n';
    }
    return out.str();
}

std::string render_stats(const HeadPoseStats& st) {
    std::ostringstream out;
    out << "Mean yaw (deg)\t" << fixed2(st.yaw_mean) << '\n'
        << "Standard deviation of yaw (deg)\t" << fixed2(st.yaw_std) << '\n'
        << "Largest yaw (deg)\t" << fixed2(st.yaw_max) << '\n'
        << "Lowest yaw (deg)\t" << fixed2(st.yaw_min) << '\n'
        << "Mean variation of yaw per second (deg/s)\t" << fixed2(st.yaw_rate) << '\n'
        << "Mean pitch (deg)\t" << fixed2(st.pitch_mean) << '\n'
        << "Standard deviation of pitch (deg)\t" << fixed2(st.pitch_std) << '\n'
        << "Largest pitch (deg)\t" << fixed2(st.pitch_max) << '\n'
        << "Lowest pitch (deg)\t" << fixed2(st.pitch_min) << '\n'
        << "Mean variation of pitch per second (deg/s)\t" << fixed2(st.pitch_rate) << '\n';
    return out.str();
}

}  // namespace gaze
