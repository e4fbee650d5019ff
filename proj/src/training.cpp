#include <algorithm>
#include <cmath>
#include <string>

#include "gaze/learners.hpp"

namespace gaze {

namespace {

struct LabelRun {
    std::optional<Region> label;
    std::size_t begin = 0;  // inclusive
    std::size_t end = 0;    // exclusive
};

std::vector<LabelRun> label_runs(const SessionTrace& trace) {
    std::vector<LabelRun> runs;
    for (std::size_t i = 0; i < trace.samples.size(); ++i) {
        const std::optional<Region>& l = trace.labels[i];
        if (runs.empty() || runs.back().label != l) runs.push_back({l, i, i + 1});
        else runs.back().end = i + 1;
    }
    return runs;
}

}  // namespace

TrainingSet build_training_set(const SessionTrace& trace) {
    trace.validate();
    require(trace.has_labels(), ErrorKind::calibration,
            "learned-protocol trace must carry region labels");
    require(trace.meta.fps > 0.0, ErrorKind::data, "trace frame rate must be positive");

    const int stride = std::max(1, static_cast<int>(std::lround(trace.meta.fps / kPatternRateHz)));
    const std::vector<LabelRun> runs = label_runs(trace);

    // Central reference: mean face center over the unlabeled segments,
    // trimming the transit window at the start of each segment.
    double ref_cx = 0.0, ref_cy = 0.0;
    std::size_t ref_n = 0;
    constexpr double kTrimMs = 500.0;
    for (const LabelRun& run : runs) {
        if (run.label.has_value()) continue;
        const double t0 = trace.samples[run.begin].t_ms + kTrimMs;
        for (std::size_t i = run.begin; i < run.end; ++i) {
            if (trace.samples[i].t_ms < t0) continue;
            ref_cx += trace.samples[i].face_cx_px;
            ref_cy += trace.samples[i].face_cy_px;
            ++ref_n;
        }
    }
    require(ref_n > 0, ErrorKind::calibration,
            "no central-gaze segment found in the learned-protocol trace");
    const FaceReference ref{ref_cx / static_cast<double>(ref_n),
                            ref_cy / static_cast<double>(ref_n)};

    TrainingSet out;
    out.central_ref = ref;
    std::array<bool, kRegionCount> seen{};
    for (const LabelRun& run : runs) {
        if (!run.label.has_value()) continue;
        const Region region = *run.label;
        require(!seen[static_cast<std::size_t>(region.index())], ErrorKind::calibration,
                "region " + std::to_string(region.id()) + " appears in more than one dwell");
        const std::size_t needed =
            static_cast<std::size_t>((kPatternsPerRegion - 1) * stride) + 1;
        require(run.end - run.begin >= needed, ErrorKind::calibration,
                "training dwell for region " + std::to_string(region.id()) +
                    " is too short: need " + std::to_string(needed) + " frames, got " +
                    std::to_string(run.end - run.begin));
        for (int k = 0; k < kPatternsPerRegion; ++k) {
            const std::size_t i = run.begin + static_cast<std::size_t>(k * stride);
            out.set.patterns.push_back(extract_features(trace.samples[i], ref));
            out.set.labels.push_back(region);
        }
        seen[static_cast<std::size_t>(region.index())] = true;
    }
    for (int r = 0; r < kRegionCount; ++r)
        require(seen[static_cast<std::size_t>(r)], ErrorKind::calibration,
                "training dwell missing for region " + std::to_string(r + 1));
    out.normalizer = fit_normalizer(out.set);
    return out;
}

Normalizer fit_normalizer(const LabeledSet& set) {
    require(!set.patterns.empty(), ErrorKind::calibration, "empty training set");
    Normalizer n;
    const double count = static_cast<double>(set.patterns.size());
    for (std::size_t f = 0; f < 5; ++f) {
        double mean = 0.0;
        for (const FeatureVector& v : set.patterns) mean += v[f];
        mean /= count;
        double var = 0.0;
        for (const FeatureVector& v : set.patterns) var += (v[f] - mean) * (v[f] - mean);
        var /= count;
        const double sd = std::sqrt(var);
        n.mean[f] = mean;
        if (sd <= 1e-12 * (1.0 + std::abs(mean))) {
            n.zero_variance[f] = true;
            n.scale[f] = 1.0;
        } else {
            n.zero_variance[f] = false;
            n.scale[f] = sd;
        }
    }
    return n;
}

FeatureVector standardize(const TrainingSet& set, const FeatureVector& v) {
    return set.normalizer.apply(v);
}

FeatureVector model_input(const Normalizer& normalizer, const std::vector<int>& subset,
                          bool standardized, const FeatureVector& v) {
    FeatureVector out = standardized ? normalizer.apply(v) : v;
    std::array<bool, 5> keep{};
    for (int f : subset) {
        require(f >= 0 && f < kFeatureCount, ErrorKind::usage, "feature index out of range");
        keep[static_cast<std::size_t>(f)] = true;
    }
    for (std::size_t f = 0; f < 5; ++f)
        if (!keep[f]) out[f] = 0.0;
    return out;
}

}  // namespace gaze
