#include "gaze/features.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

namespace gaze {

FeatureVector extract_features(const HeadPoseSample& sample,
                               const std::optional<FaceReference>& central_ref) {
    require(central_ref.has_value(), ErrorKind::calibration,
            "central face reference missing; run the central-gaze calibration first");
    return {sample.yaw_deg, sample.pitch_deg, sample.face_cx_px - central_ref->cx_px,
            sample.face_cy_px - central_ref->cy_px, sample.face_area_px2};
}

double ScatterMatrix::trace() const {
    double t = 0.0;
    for (std::size_t i = 0; i < dim; ++i) t += at(i, i);
    return t;
}

namespace {

ScatterMatrix zeros(std::size_t dim) {
    return ScatterMatrix{dim, std::vector<double>(dim * dim, 0.0)};
}

// Solves (A)X = B in place by Gaussian elimination with partial pivoting;
// returns false when A is singular to working precision.
bool solve_square(ScatterMatrix a, ScatterMatrix b, ScatterMatrix& x) {
    const std::size_t n = a.dim;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a.at(r, col)) > std::abs(a.at(pivot, col))) pivot = r;
        if (std::abs(a.at(pivot, col)) < 1e-300) return false;
        if (pivot != col) {
            for (std::size_t c = 0; c < n; ++c) {
                std::swap(a.a[pivot * n + c], a.a[col * n + c]);
                std::swap(b.a[pivot * n + c], b.a[col * n + c]);
            }
        }
        const double inv = 1.0 / a.at(col, col);
        for (std::size_t c = 0; c < n; ++c) {
            a.a[col * n + c] *= inv;
            b.a[col * n + c] *= inv;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const double f = a.at(r, col);
            if (f == 0.0) continue;
            for (std::size_t c = 0; c < n; ++c) {
                a.a[r * n + c] -= f * a.at(col, c);
                b.a[r * n + c] -= f * b.at(col, c);
            }
        }
    }
    x = b;
    return true;
}

void check_subset(const std::vector<int>& subset) {
    require(!subset.empty(), ErrorKind::usage, "feature subset must be non-empty");
    for (int f : subset)
        require(f >= 0 && f < kFeatureCount, ErrorKind::usage,
                "feature index out of range: " + std::to_string(f));
}

}  // namespace

ScatterPair scatter_matrices(const LabeledSet& set, const std::vector<int>& subset) {
    check_subset(subset);
    require(set.patterns.size() == set.labels.size(), ErrorKind::data,
            "pattern/label count mismatch");
    const std::size_t dim = subset.size();

    std::map<int, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < set.labels.size(); ++i)
        by_class[set.labels[i].id()].push_back(i);
    require(by_class.size() >= 2, ErrorKind::data,
            "separability needs at least 2 distinct classes");

    ScatterPair out{zeros(dim), zeros(dim)};
    std::vector<std::vector<double>> class_means;
    for (const auto& [label, indices] : by_class) {
        require(indices.size() >= 2, ErrorKind::data,
                "class " + std::to_string(label) + " has fewer than 2 patterns");
        std::vector<double> mean(dim, 0.0);
        for (std::size_t i : indices)
            for (std::size_t f = 0; f < dim; ++f)
                mean[f] += set.patterns[i][static_cast<std::size_t>(subset[f])];
        for (double& m : mean) m /= static_cast<double>(indices.size());

        ScatterMatrix cov = zeros(dim);
        for (std::size_t i : indices) {
            for (std::size_t r = 0; r < dim; ++r) {
                const double dr = set.patterns[i][static_cast<std::size_t>(subset[r])] - mean[r];
                for (std::size_t c = 0; c < dim; ++c) {
                    const double dc =
                        set.patterns[i][static_cast<std::size_t>(subset[c])] - mean[c];
                    cov.at(r, c) += dr * dc;
                }
            }
        }
        for (double& v : cov.a) v /= static_cast<double>(indices.size());
        for (std::size_t k = 0; k < cov.a.size(); ++k) out.within.a[k] += cov.a[k];
        class_means.push_back(std::move(mean));
    }
    const double k = static_cast<double>(class_means.size());
    for (double& v : out.within.a) v /= k;

    std::vector<double> grand(dim, 0.0);
    for (const auto& m : class_means)
        for (std::size_t f = 0; f < dim; ++f) grand[f] += m[f];
    for (double& g : grand) g /= k;
    for (const auto& m : class_means)
        for (std::size_t r = 0; r < dim; ++r)
            for (std::size_t c = 0; c < dim; ++c)
                out.between.at(r, c) += (m[r] - grand[r]) * (m[c] - grand[c]);
    for (double& v : out.between.a) v /= k;
    return out;
}

double separability_score(const LabeledSet& set, const std::vector<int>& subset) {
    ScatterPair s = scatter_matrices(set, subset);
    const double ridge = 1e-9 * s.within.trace() / static_cast<double>(s.within.dim);
    for (std::size_t i = 0; i < s.within.dim; ++i) s.within.at(i, i) += ridge;
    ScatterMatrix x;
    require(solve_square(s.within, s.between, x), ErrorKind::data,
            "within-class scatter is singular even after regularization");
    return x.trace();
}

FeatureRanking greedy_rank(const LabeledSet& set) {
    FeatureRanking out;
    std::vector<int> chosen;
    std::vector<bool> used(kFeatureCount, false);
    for (int step = 0; step < kFeatureCount; ++step) {
        int best = -1;
        double best_score = 0.0;
        for (int f = 0; f < kFeatureCount; ++f) {
            if (used[static_cast<std::size_t>(f)]) continue;
            std::vector<int> candidate = chosen;
            candidate.push_back(f);
            const double score = separability_score(set, candidate);
            if (best < 0 || score > best_score) {
                best = f;
                best_score = score;
            }
        }
        used[static_cast<std::size_t>(best)] = true;
        chosen.push_back(best);
        out.order.push_back(best + 1);
        out.cumulative.push_back(best_score);
    }
    return out;
}

FeatureRanking fixed_prefix_rank(const LabeledSet& set, const std::vector<int>& order) {
    require(!order.empty(), ErrorKind::usage, "feature order must be non-empty");
    FeatureRanking out;
    std::vector<int> prefix;
    for (int id : order) {
        require(id >= 1 && id <= kFeatureCount, ErrorKind::usage,
                "feature id out of range: " + std::to_string(id));
        prefix.push_back(id - 1);
        out.order.push_back(id);
        out.cumulative.push_back(separability_score(set, prefix));
    }
    return out;
}

}  // namespace gaze
