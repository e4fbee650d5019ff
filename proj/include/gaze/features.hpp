#ifndef GAZE_FEATURES_HPP
#define GAZE_FEATURES_HPP

#include <array>
#include <optional>
#include <vector>

#include "gaze/core.hpp"

namespace gaze {

// Feature order: [0] yaw deg, [1] pitch deg, [2] face-center x displacement
// px, [3] face-center y displacement px, [4] face-rectangle area px^2.
using FeatureVector = std::array<double, 5>;

constexpr int kFeatureCount = 5;

// Face-rectangle center captured while the user gazes at the scene center.
struct FaceReference {
    double cx_px = 0.0;
    double cy_px = 0.0;
};

struct LabeledSet {
    std::vector<FeatureVector> patterns;
    std::vector<Region> labels;

    std::size_t size() const { return patterns.size(); }
};

FeatureVector extract_features(const HeadPoseSample& sample,
                               const std::optional<FaceReference>& central_ref);

// Square row-major matrix sized by the selected feature subset.
struct ScatterMatrix {
    std::size_t dim = 0;
    std::vector<double> a;

    double& at(std::size_t r, std::size_t c) { return a[r * dim + c]; }
    double at(std::size_t r, std::size_t c) const { return a[r * dim + c]; }
    double trace() const;
};

struct ScatterPair {
    ScatterMatrix within;   // mean over classes of the per-class covariance
    ScatterMatrix between;  // covariance of class means, equal class priors
};

// Population (1/N) covariances throughout. Every class needs >= 2 patterns
// and the set >= 2 distinct labels.
ScatterPair scatter_matrices(const LabeledSet& set, const std::vector<int>& subset);

// Class separability tr(Sw^-1 * Sb) of the feature subset (0-based ids).
// Sw is ridge-regularized by 1e-9 * tr(Sw)/dim before inversion; a matrix
// still singular after that is rejected.
double separability_score(const LabeledSet& set, const std::vector<int>& subset);

struct FeatureRanking {
    std::vector<int> order;             // 1-based feature ids, best first
    std::vector<double> cumulative;     // score of each growing prefix
};

// Greedy forward selection: each step adds the feature maximizing the
// separability of the augmented subset; ties break toward the lowest id.
FeatureRanking greedy_rank(const LabeledSet& set);

// Comparison mode: scores the prefixes of a fixed feature order instead of
// selecting greedily.
FeatureRanking fixed_prefix_rank(const LabeledSet& set, const std::vector<int>& order);

}  // namespace gaze

#endif
