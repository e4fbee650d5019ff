#ifndef GAZE_LEARNERS_HPP
#define GAZE_LEARNERS_HPP

#include <cstdint>
#include <vector>

#include "gaze/core.hpp"
#include "gaze/features.hpp"

namespace gaze {

struct MlpConfig {
    int max_iters = 1000;
    double epsilon = 0.001;            // epoch-loss improvement threshold
    double gradient_strength = 0.1;    // learning rate
    double weight_momentum = 0.1;
};

struct SvmConfig {
    long max_iters = 100000;
    double epsilon = 0.001;  // maximum tolerated KKT violation
    double c = 1.0;          // outlier separation bound on the duals
};

struct TrainConfig {
    MlpConfig mlp;
    SvmConfig svm;
    std::uint64_t rng_seed = 0;
};

// Cross-cutting training switches: the 2-feature ablation reuses the same
// trainers through the subset mask, and --no-standardize feeds raw features.
struct TrainOptions {
    std::vector<int> feature_subset{0, 1, 2, 3, 4};  // 0-based feature ids
    bool standardize = true;
};

struct TrainingSet {
    LabeledSet set;             // exactly 150 patterns per region when built
    Normalizer normalizer;      // fitted on the full set
    FaceReference central_ref;  // central-gaze face center used for f3/f4
};

// Patterns per region produced by the learned-protocol calibration.
constexpr int kPatternsPerRegion = 150;
constexpr double kPatternRateHz = 15.0;

// Builds the training set from a learned-protocol trace: one labeled 10 s
// dwell per region, central (unlabeled) segments in between. Dwells are
// decimated to 15 Hz so every region yields exactly 150 patterns at any
// sensor frame rate.
TrainingSet build_training_set(const SessionTrace& trace);

Normalizer fit_normalizer(const LabeledSet& set);

FeatureVector standardize(const TrainingSet& set, const FeatureVector& v);

// Prepares a raw feature vector for a trained model: optional
// standardization, then zeroing of the features outside the subset.
FeatureVector model_input(const Normalizer& normalizer, const std::vector<int>& subset,
                          bool standardized, const FeatureVector& v);

// ---------------------------------------------------------------------------
// MLP ensemble (method 3)

// Raw outputs of the seven one-vs-rest networks.
std::array<double, kRegionCount> mlp_outputs(const MlpModel& model, const FeatureVector& v);

// Trains the seven binary networks by batch backpropagation with momentum.
// Deterministic for a fixed cfg.rng_seed; throws a calibration error naming
// the network if its loss diverges.
MlpModel mlp_train(const TrainingSet& set, const TrainConfig& cfg,
                   const TrainOptions& options = {});

// Argmax over the seven outputs, ties broken toward the lowest region id.
Region mlp_predict(const MlpModel& model, const FeatureVector& v);

// Mean squared error of one network against +-1 targets; exposed for the
// finite-difference gradient check.
double mlp_epoch_loss(const MlpNetwork& net, double alpha, double beta,
                      const std::vector<FeatureVector>& inputs,
                      const std::vector<double>& targets);

// Analytic batch gradient of mlp_epoch_loss, in MlpNetwork layout.
MlpNetwork mlp_epoch_gradient(const MlpNetwork& net, double alpha, double beta,
                              const std::vector<FeatureVector>& inputs,
                              const std::vector<double>& targets, double* loss_out);

// ---------------------------------------------------------------------------
// Linear SVM (method 4)

// Trains the 21 pairwise soft-margin problems by two-coordinate working-set
// dual ascent. Non-convergence within max_iters clears the converged flag
// rather than failing.
SvmModel svm_train(const TrainingSet& set, const TrainConfig& cfg,
                   const TrainOptions& options = {});

// Trains one binary problem; labels must be +-1. Exposed for the dual-QP
// oracle comparison.
SvmBinary svm_train_binary(const std::vector<FeatureVector>& x, const std::vector<int>& y,
                           const SvmConfig& cfg);

double svm_decision(const SvmBinary& bin, const FeatureVector& v);

// One-vs-one majority vote, ties broken toward the lowest region id.
Region svm_predict(const SvmModel& model, const FeatureVector& v);

// Largest remaining KKT violation of a trained binary problem on its
// training data; < epsilon after convergence.
double svm_kkt_violation(const SvmBinary& bin, const std::vector<FeatureVector>& x,
                         const std::vector<int>& y, double c);

}  // namespace gaze

#endif
