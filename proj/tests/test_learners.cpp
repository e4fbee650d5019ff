#include "doctest.h"

#include <cmath>

#include "gaze/config.hpp"
#include "gaze/learners.hpp"
#include "gaze/rng.hpp"
#include "gaze/simulator.hpp"
#include "oracle_helpers.hpp"

using namespace gaze;

namespace {

SessionTrace learned_trace(double fps, std::uint64_t seed) {
    Config cfg = default_config();
    SensorPreset preset = cfg.sensor("depthcam");
    preset.model.frame_rate_hz = fps;
    return synthesize_calibration(cfg.persona("average"), preset.model,
                                  cfg.geometry_for(preset), CalibrationProtocol::learned, seed,
                                  cfg.method2_table, cfg.region_targets);
}

// Two-region set, margin >= 1 between the clusters along features 0 and 1.
TrainingSet toy_two_region_set(std::uint64_t seed) {
    Rng rng(seed);
    TrainingSet set;
    for (int c = 0; c < 2; ++c)
        for (int i = 0; i < 40; ++i) {
            FeatureVector v{};
            const double sign = c == 0 ? 1.0 : -1.0;
            v[0] = sign * (1.5 + rng.uniform01());
            v[1] = sign * (1.5 + rng.uniform01());
            v[2] = rng.gaussian();
            set.set.patterns.push_back(v);
            set.set.labels.push_back(Region(c + 1));
        }
    set.normalizer = fit_normalizer(set.set);
    return set;
}

bool nets_equal(const MlpModel& a, const MlpModel& b) {
    for (int r = 0; r < kRegionCount; ++r) {
        const MlpNetwork& na = a.nets[static_cast<std::size_t>(r)];
        const MlpNetwork& nb = b.nets[static_cast<std::size_t>(r)];
        if (na.w1 != nb.w1 || na.b1 != nb.b1 || na.w2 != nb.w2 || na.b2 != nb.b2) return false;
    }
    return true;
}

}  // namespace

TEST_SUITE("learners") {

TEST_CASE("training-set construction yields 150 patterns per region") {
    for (double fps : {30.0, 60.0}) {
        const SessionTrace trace = learned_trace(fps, 9000 + static_cast<int>(fps));
        const TrainingSet set = build_training_set(trace);
        CHECK(set.set.size() == 1050);
        std::array<int, kRegionCount> counts{};
        for (const Region& r : set.set.labels) ++counts[static_cast<std::size_t>(r.index())];
        for (int c : counts) CHECK(c == kPatternsPerRegion);
    }
}

TEST_CASE("a short region dwell is reported by region id") {
    SessionTrace trace = learned_trace(30.0, 77);
    // Truncate region 7's dwell (the last one) to ~9 seconds.
    std::size_t last_run_begin = trace.samples.size();
    for (std::size_t i = trace.samples.size(); i-- > 0;) {
        if (trace.labels[i].has_value() && trace.labels[i]->id() == 7) last_run_begin = i;
        else if (last_run_begin != trace.samples.size()) break;
    }
    const std::size_t keep = last_run_begin + 269;  // 269 frames < 150*2 needed
    trace.samples.resize(keep);
    trace.labels.resize(keep);
    CHECK_THROWS_WITH_AS(build_training_set(trace), doctest::Contains("region 7"), Error);
}

TEST_CASE("a trace without central segments is rejected") {
    SessionTrace trace = learned_trace(30.0, 78);
    for (auto& l : trace.labels)
        if (!l.has_value()) l = Region(1);
    CHECK_THROWS_AS(build_training_set(trace), Error);
}

TEST_CASE("standardize centers, guards constants, and inverts") {
    LabeledSet raw;
    Rng rng(41);
    for (int i = 0; i < 100; ++i) {
        FeatureVector v{};
        v[0] = rng.gaussian(5.0, 2.0);
        v[1] = rng.gaussian(-3.0, 0.5);
        v[2] = 7.25;  // constant feature
        v[3] = rng.uniform(0, 100);
        v[4] = rng.uniform(0, 1e5);
        raw.patterns.push_back(v);
        raw.labels.push_back(Region(1 + i % 7));
    }
    TrainingSet set;
    set.set = raw;
    set.normalizer = fit_normalizer(raw);

    FeatureVector means{};
    for (const FeatureVector& v : raw.patterns)
        for (std::size_t f = 0; f < 5; ++f) means[f] += v[f] / 100.0;
    const FeatureVector at_mean = standardize(set, means);
    for (std::size_t f = 0; f < 5; ++f) CHECK(at_mean[f] == doctest::Approx(0.0).epsilon(1e-9));

    const FeatureVector arbitrary = raw.patterns[3];
    const FeatureVector z = standardize(set, arbitrary);
    CHECK(z[2] == 0.0);  // constant feature maps to zero
    const FeatureVector back = set.normalizer.invert(z);
    for (std::size_t f = 0; f < 5; ++f)
        CHECK(back[f] == doctest::Approx(arbitrary[f]).epsilon(1e-12));
}

TEST_CASE("mlp reaches 100% training accuracy on a separable toy set") {
    const TrainingSet set = toy_two_region_set(7);
    // Certify separability with an independent linear classifier first.
    std::vector<FeatureVector> x;
    std::vector<int> y;
    for (std::size_t i = 0; i < set.set.size(); ++i) {
        x.push_back(set.set.patterns[i]);
        y.push_back(set.set.labels[i].id() == 1 ? 1 : -1);
    }
    REQUIRE(oracle::perceptron_separable(x, y));

    TrainConfig cfg;
    cfg.rng_seed = 2;
    const MlpModel model = mlp_train(set, cfg);
    int correct = 0;
    for (std::size_t i = 0; i < set.set.size(); ++i) {
        const FeatureVector input = standardize(set, set.set.patterns[i]);
        if (mlp_predict(model, input) == set.set.labels[i]) ++correct;
    }
    CHECK(correct == static_cast<int>(set.set.size()));
}

TEST_CASE("mlp training is deterministic and never zero-initialized") {
    const TrainingSet set = toy_two_region_set(8);
    TrainConfig cfg;
    cfg.rng_seed = 33;
    cfg.mlp.max_iters = 40;
    const MlpModel a = mlp_train(set, cfg);
    const MlpModel b = mlp_train(set, cfg);
    CHECK(nets_equal(a, b));
    double sum = 0.0;
    for (double w : a.nets[0].w1) sum += std::abs(w);
    CHECK(sum > 0.0);
    TrainConfig other = cfg;
    other.rng_seed = 34;
    CHECK_FALSE(nets_equal(a, mlp_train(set, other)));
}

TEST_CASE("analytic gradient matches central finite differences") {
    const TrainingSet set = toy_two_region_set(9);
    std::vector<FeatureVector> inputs;
    std::vector<double> targets;
    for (std::size_t i = 0; i < set.set.size(); ++i) {
        inputs.push_back(standardize(set, set.set.patterns[i]));
        targets.push_back(set.set.labels[i].id() == 1 ? 1.0 : -1.0);
    }
    MlpModel model;
    TrainConfig cfg;
    cfg.rng_seed = 5;
    cfg.mlp.max_iters = 3;
    model = mlp_train(set, cfg);
    MlpNetwork net = model.nets[0];
    const MlpNetwork grad =
        mlp_epoch_gradient(net, model.alpha, model.beta, inputs, targets, nullptr);
    auto loss = [&] { return mlp_epoch_loss(net, model.alpha, model.beta, inputs, targets); };

    Rng rng(60);
    for (int k = 0; k < 25; ++k) {
        double* param = nullptr;
        double analytic = 0.0;
        const int which = static_cast<int>(rng.next_u64() % 4);
        if (which == 0) {
            const std::size_t i = rng.next_u64() % net.w1.size();
            param = &net.w1[i];
            analytic = grad.w1[i];
        } else if (which == 1) {
            const std::size_t i = rng.next_u64() % net.b1.size();
            param = &net.b1[i];
            analytic = grad.b1[i];
        } else if (which == 2) {
            const std::size_t i = rng.next_u64() % net.w2.size();
            param = &net.w2[i];
            analytic = grad.w2[i];
        } else {
            param = &net.b2;
            analytic = grad.b2;
        }
        const double numeric = oracle::central_difference(param, 1e-5, loss);
        const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
        CHECK(std::abs(analytic - numeric) / denom < 1e-4);
    }
}

TEST_CASE("mlp outputs stay inside the sigmoid range") {
    const TrainingSet set = toy_two_region_set(10);
    TrainConfig cfg;
    cfg.rng_seed = 3;
    cfg.mlp.max_iters = 120;
    const MlpModel model = mlp_train(set, cfg);
    Rng rng(71);
    for (int i = 0; i < 2000; ++i) {
        FeatureVector v{};
        for (std::size_t f = 0; f < 5; ++f) v[f] = rng.uniform(-50.0, 50.0);
        for (double out : mlp_outputs(model, v)) {
            CHECK(out > -model.beta);
            CHECK(out < model.beta);
        }
    }
}

TEST_CASE("mlp argmax breaks ties toward the lowest region") {
    MlpModel model;  // all-zero weights: every output is identical
    CHECK(mlp_predict(model, FeatureVector{1, 2, 3, 4, 5}).id() == 1);
    // Push region 2 and 5 to the same positive output, others negative.
    for (int r : {1, 4}) {
        model.nets[static_cast<std::size_t>(r)].w1[0] = 1.0;
        model.nets[static_cast<std::size_t>(r)].w2[0] = 1.0;
    }
    for (int r : {0, 2, 3, 5, 6}) model.nets[static_cast<std::size_t>(r)].b2 = -1.0;
    const Region pick = mlp_predict(model, FeatureVector{1, 0, 0, 0, 0});
    CHECK(pick.id() == 2);
}

TEST_CASE("non-finite loss is reported with the network index") {
    TrainingSet set = toy_two_region_set(11);
    set.set.patterns[0][1] = std::numeric_limits<double>::quiet_NaN();
    set.normalizer = fit_normalizer(set.set);
    TrainConfig cfg;
    CHECK_THROWS_WITH_AS(mlp_train(set, cfg), doctest::Contains("network"), Error);
}

TEST_CASE("mlp prediction is invariant to per-feature affine rescaling") {
    const SessionTrace trace = learned_trace(30.0, 4242);
    const TrainingSet set = build_training_set(trace);
    TrainConfig cfg;
    cfg.rng_seed = 12;
    cfg.mlp.max_iters = 120;
    const MlpModel base = mlp_train(set, cfg);

    const FeatureVector scale{2.5, 0.4, 10.0, 3.0, 0.01};
    const FeatureVector shift{10.0, -4.0, 100.0, -50.0, 777.0};
    TrainingSet mapped = set;
    for (FeatureVector& v : mapped.set.patterns)
        for (std::size_t f = 0; f < 5; ++f) v[f] = v[f] * scale[f] + shift[f];
    mapped.normalizer = fit_normalizer(mapped.set);
    const MlpModel remapped = mlp_train(mapped, cfg);

    Rng rng(90);
    for (int i = 0; i < 300; ++i) {
        const FeatureVector& probe = set.set.patterns[rng.next_u64() % set.set.size()];
        FeatureVector probe_mapped{};
        for (std::size_t f = 0; f < 5; ++f) probe_mapped[f] = probe[f] * scale[f] + shift[f];
        const Region a = mlp_predict(base, standardize(set, probe));
        const Region b = mlp_predict(remapped, standardize(mapped, probe_mapped));
        CHECK(a.id() == b.id());
    }
}

}  // TEST_SUITE
