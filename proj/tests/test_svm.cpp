#include "doctest.h"

#include <cmath>

#include "gaze/config.hpp"
#include "gaze/learners.hpp"
#include "gaze/rng.hpp"
#include "gaze/simulator.hpp"
#include "oracle_helpers.hpp"

using namespace gaze;

namespace {

// Random 2-D two-class set embedded in features 0 and 1. `gap` > 0 gives a
// separable set, <= 0 lets the classes overlap.
void random_planar_set(Rng& rng, int n, double gap, std::vector<FeatureVector>& x,
                       std::vector<int>& y) {
    x.clear();
    y.clear();
    const double angle = rng.uniform(0.0, 3.14159);
    const double nx = std::cos(angle), ny = std::sin(angle);
    for (int i = 0; i < n; ++i) {
        const int label = i % 2 == 0 ? 1 : -1;
        const double along = rng.uniform(-2.0, 2.0);
        const double off = label * (gap / 2.0 + rng.uniform(0.0, 1.5));
        FeatureVector v{};
        v[0] = -ny * along + nx * off;
        v[1] = nx * along + ny * off;
        x.push_back(v);
        y.push_back(label);
    }
}

}  // namespace

TEST_SUITE("svm") {

TEST_CASE("symmetric two-point problem has a zero bias") {
    std::vector<FeatureVector> x = {{1.0, 0.5, 0, 0, 0}, {-1.0, -0.5, 0, 0, 0}};
    std::vector<int> y = {1, -1};
    SvmConfig cfg;
    const SvmBinary bin = svm_train_binary(x, y, cfg);
    CHECK(std::abs(bin.b) < 1e-6);
    CHECK(svm_decision(bin, x[0]) > 0.0);
    CHECK(svm_decision(bin, x[1]) < 0.0);
}

TEST_CASE("trained binary matches the projected-gradient QP oracle") {
    Rng rng(314);
    SvmConfig cfg;
    cfg.epsilon = 1e-8;
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<FeatureVector> x;
        std::vector<int> y;
        random_planar_set(rng, 10, trial < 3 ? 0.8 : -0.2, x, y);
        const SvmBinary bin = svm_train_binary(x, y, cfg);
        const oracle::QpSolution ref = oracle::qp_oracle(x, y, cfg.c);
        for (std::size_t f = 0; f < 5; ++f)
            CHECK(std::abs(bin.w[f] - ref.w[f]) < 1e-3);
        for (double a : bin.alpha) {
            CHECK(a >= 0.0);
            CHECK(a <= cfg.c);
        }
        int agree = 0, total = 0;
        for (int gx = 0; gx < 50; ++gx)
            for (int gy = 0; gy < 50; ++gy) {
                FeatureVector v{};
                v[0] = -3.0 + 6.0 * gx / 49.0;
                v[1] = -3.0 + 6.0 * gy / 49.0;
                double ref_val = ref.b;
                for (std::size_t f = 0; f < 5; ++f) ref_val += ref.w[f] * v[f];
                ++total;
                if ((svm_decision(bin, v) > 0.0) == (ref_val > 0.0)) ++agree;
            }
        CHECK(agree == total);
    }
}

TEST_CASE("kkt violation and weight reconstruction hold after training") {
    Rng rng(99);
    std::vector<FeatureVector> x;
    std::vector<int> y;
    random_planar_set(rng, 24, -0.5, x, y);  // overlapping: bounded SVs appear
    SvmConfig cfg;
    const SvmBinary bin = svm_train_binary(x, y, cfg);
    CHECK(bin.converged);
    CHECK(svm_kkt_violation(bin, x, y, cfg.c) < cfg.epsilon);
    std::array<double, 5> w{};
    for (std::size_t k = 0; k < bin.sv_index.size(); ++k) {
        const std::size_t i = static_cast<std::size_t>(bin.sv_index[k]);
        for (std::size_t f = 0; f < 5; ++f)
            w[f] += bin.alpha[k] * static_cast<double>(y[i]) * x[i][f];
    }
    for (std::size_t f = 0; f < 5; ++f) CHECK(bin.w[f] == doctest::Approx(w[f]).epsilon(1e-9));
}

TEST_CASE("iteration cap clears the convergence flag") {
    Rng rng(17);
    std::vector<FeatureVector> x;
    std::vector<int> y;
    random_planar_set(rng, 16, -0.5, x, y);
    SvmConfig cfg;
    cfg.max_iters = 1;
    const SvmBinary bin = svm_train_binary(x, y, cfg);
    CHECK_FALSE(bin.converged);
}

TEST_CASE("one-vs-one voting and tie-breaking") {
    SUBCASE("unanimous votes propagate") {
        SvmModel model;
        for (int lo = 1; lo <= kRegionCount; ++lo)
            for (int hi = lo + 1; hi <= kRegionCount; ++hi) {
                SvmBinary bin;
                bin.lo = lo;
                bin.hi = hi;
                bin.b = -1.0;  // every decision favours hi; region 7 sweeps
                model.pairs.push_back(bin);
            }
        CHECK(svm_predict(model, FeatureVector{}).id() == 7);
    }
    SUBCASE("three-way vote tie resolves to the lowest region") {
        SvmModel model;
        SvmBinary a;  // 2 beats 4
        a.lo = 2; a.hi = 4; a.b = 1.0;
        SvmBinary b;  // 4 beats 6
        b.lo = 4; b.hi = 6; b.b = 1.0;
        SvmBinary c;  // 6 beats 2
        c.lo = 2; c.hi = 6; c.b = -1.0;
        model.pairs = {a, b, c};
        CHECK(svm_predict(model, FeatureVector{}).id() == 2);
    }
}

TEST_CASE("full training set: duals bounded, every pair converges") {
    Config cfg = default_config();
    const SensorPreset& preset = cfg.sensor("depthcam");
    const SessionTrace trace = synthesize_calibration(
        cfg.persona("average"), preset.model, cfg.geometry_for(preset),
        CalibrationProtocol::learned, 606, cfg.method2_table, cfg.region_targets);
    const TrainingSet set = build_training_set(trace);
    const SvmModel model = svm_train(set, cfg.train);
    CHECK(model.converged);
    CHECK(model.pairs.size() == 21);
    for (const SvmBinary& bin : model.pairs) {
        CHECK(bin.converged);
        for (double a : bin.alpha) {
            CHECK(a >= 0.0);
            CHECK(a <= cfg.train.svm.c);
        }
    }
}

TEST_CASE("svm prediction is invariant to per-feature affine rescaling") {
    Config base_cfg = default_config();
    const SensorPreset& preset = base_cfg.sensor("depthcam");
    const SessionTrace trace = synthesize_calibration(
        base_cfg.persona("average"), preset.model, base_cfg.geometry_for(preset),
        CalibrationProtocol::learned, 607, base_cfg.method2_table, base_cfg.region_targets);
    const TrainingSet set = build_training_set(trace);
    const SvmModel model = svm_train(set, base_cfg.train);

    const FeatureVector scale{3.0, 0.5, 2.0, 8.0, 0.001};
    const FeatureVector shift{-20.0, 5.0, 64.0, -12.0, 1e4};
    TrainingSet mapped = set;
    for (FeatureVector& v : mapped.set.patterns)
        for (std::size_t f = 0; f < 5; ++f) v[f] = v[f] * scale[f] + shift[f];
    mapped.normalizer = fit_normalizer(mapped.set);
    const SvmModel remapped = svm_train(mapped, base_cfg.train);

    Rng rng(42);
    for (int i = 0; i < 300; ++i) {
        const FeatureVector& probe = set.set.patterns[rng.next_u64() % set.set.size()];
        FeatureVector probe_mapped{};
        for (std::size_t f = 0; f < 5; ++f) probe_mapped[f] = probe[f] * scale[f] + shift[f];
        CHECK(svm_predict(model, standardize(set, probe)).id() ==
              svm_predict(remapped, standardize(mapped, probe_mapped)).id());
    }
}

}  // TEST_SUITE
