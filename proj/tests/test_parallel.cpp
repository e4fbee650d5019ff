#include "doctest.h"

#include "gaze/config.hpp"
#include "gaze/harness.hpp"
#include "gaze/learners.hpp"
#include "gaze/parallel.hpp"
#include "gaze/simulator.hpp"

using namespace gaze;

namespace {

struct SerialGuard {
    explicit SerialGuard(bool serial) { par::set_force_serial(serial); }
    ~SerialGuard() { par::set_force_serial(false); }
};

TrainingSet shared_training_set() {
    Config cfg = default_config();
    const SensorPreset& preset = cfg.sensor("depthcam");
    const SessionTrace trace = synthesize_calibration(
        cfg.persona("average"), preset.model, cfg.geometry_for(preset),
        CalibrationProtocol::learned, 808, cfg.method2_table, cfg.region_targets);
    return build_training_set(trace);
}

}  // namespace

TEST_SUITE("parallel") {

TEST_CASE("parallel_for covers every index exactly once") {
    std::vector<int> hits(5000, 0);
    par::parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; });
    for (int h : hits) CHECK(h == 1);
    CHECK(par::max_threads() >= 1);
}

TEST_CASE("blocked ranges tile the index space") {
    const std::size_t n = 1000;
    std::vector<int> hits(n, 0);
    par::for_each_block(n, [&](std::size_t, std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) hits[i] += 1;
    });
    for (int h : hits) CHECK(h == 1);
}

TEST_CASE("mlp training is bit-identical on the serial and parallel paths") {
    const TrainingSet set = shared_training_set();
    TrainConfig cfg;
    cfg.rng_seed = 5;
    cfg.mlp.max_iters = 60;
    MlpModel serial_model, parallel_model;
    {
        SerialGuard guard(true);
        serial_model = mlp_train(set, cfg);
    }
    {
        SerialGuard guard(false);
        parallel_model = mlp_train(set, cfg);
    }
    for (int r = 0; r < kRegionCount; ++r) {
        CHECK(serial_model.nets[static_cast<std::size_t>(r)].w1 ==
              parallel_model.nets[static_cast<std::size_t>(r)].w1);
        CHECK(serial_model.nets[static_cast<std::size_t>(r)].b1 ==
              parallel_model.nets[static_cast<std::size_t>(r)].b1);
        CHECK(serial_model.nets[static_cast<std::size_t>(r)].w2 ==
              parallel_model.nets[static_cast<std::size_t>(r)].w2);
        CHECK(serial_model.nets[static_cast<std::size_t>(r)].b2 ==
              parallel_model.nets[static_cast<std::size_t>(r)].b2);
    }
}

TEST_CASE("svm training is bit-identical on the serial and parallel paths") {
    const TrainingSet set = shared_training_set();
    TrainConfig cfg;
    SvmModel serial_model, parallel_model;
    {
        SerialGuard guard(true);
        serial_model = svm_train(set, cfg);
    }
    {
        SerialGuard guard(false);
        parallel_model = svm_train(set, cfg);
    }
    REQUIRE(serial_model.pairs.size() == parallel_model.pairs.size());
    for (std::size_t p = 0; p < serial_model.pairs.size(); ++p) {
        CHECK(serial_model.pairs[p].w == parallel_model.pairs[p].w);
        CHECK(serial_model.pairs[p].b == parallel_model.pairs[p].b);
        CHECK(serial_model.pairs[p].alpha == parallel_model.pairs[p].alpha);
    }
}

TEST_CASE("evaluation tallies identically on both paths") {
    Config cfg = default_config();
    const SensorPreset& preset = cfg.sensor("depthcam");
    const SceneGeometry g = cfg.geometry_for(preset);
    const RegionSchedule schedule =
        aligned_schedule(200000.0, 4, cfg.schedule_frequencies, 4000.0);
    const SessionTrace trace = synthesize_session(cfg.persona("small"), preset.model, schedule,
                                                  g, 4000.0, 5, cfg.region_targets);
    const SessionTrace cal = synthesize_calibration(
        cfg.persona("small"), preset.model, g, CalibrationProtocol::method1, 6,
        cfg.method2_table, cfg.region_targets);
    const Method1Profile profile =
        calibrate_method1(dwells_from_trace(cal, CalibrationProtocol::method1), g);
    const Estimator estimator(profile, g);

    EvaluationReport serial_rep, parallel_rep;
    {
        SerialGuard guard(true);
        serial_rep = run_evaluation(trace, estimator);
    }
    {
        SerialGuard guard(false);
        parallel_rep = run_evaluation(trace, estimator);
    }
    CHECK(serial_rep.confusion.counts == parallel_rep.confusion.counts);
    CHECK(serial_rep.overall_accuracy == parallel_rep.overall_accuracy);
}

TEST_CASE("gradient accumulation is block-order invariant") {
    const TrainingSet set = shared_training_set();
    std::vector<FeatureVector> inputs;
    std::vector<double> targets;
    for (std::size_t i = 0; i < set.set.size(); ++i) {
        inputs.push_back(standardize(set, set.set.patterns[i]));
        targets.push_back(set.set.labels[i].id() == 1 ? 1.0 : -1.0);
    }
    MlpModel model;
    double loss_serial = 0.0, loss_parallel = 0.0;
    MlpNetwork grad_serial, grad_parallel;
    {
        SerialGuard guard(true);
        grad_serial =
            mlp_epoch_gradient(model.nets[0], model.alpha, model.beta, inputs, targets,
                               &loss_serial);
    }
    {
        SerialGuard guard(false);
        grad_parallel =
            mlp_epoch_gradient(model.nets[0], model.alpha, model.beta, inputs, targets,
                               &loss_parallel);
    }
    CHECK(loss_serial == loss_parallel);
    CHECK(grad_serial.w1 == grad_parallel.w1);
    CHECK(grad_serial.b1 == grad_parallel.b1);
    CHECK(grad_serial.w2 == grad_parallel.w2);
    CHECK(grad_serial.b2 == grad_parallel.b2);
}

}  // TEST_SUITE
