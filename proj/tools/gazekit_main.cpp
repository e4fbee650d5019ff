#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gaze/config.hpp"
#include "gaze/harness.hpp"
#include "gaze/simulator.hpp"
#include "gaze/suite.hpp"

namespace {

using namespace gaze;

struct Common {
    std::string config_path;
    std::uint64_t seed = 42;
};

void add_common(CLI::App* cmd, Common& common) {
    cmd->add_option("--config", common.config_path, "JSON config file (defaults built in)");
    cmd->add_option("--seed", common.seed, "Deterministic seed")->capture_default_str();
}

Config resolve_config(const Common& common) {
    return common.config_path.empty() ? default_config() : load_config(common.config_path);
}

// Geometry for a recorded trace: the sensor preset's override when the name
// is known, the base geometry otherwise.
SceneGeometry geometry_for_trace(const Config& cfg, const SessionTrace& trace) {
    auto it = cfg.sensors.find(trace.meta.sensor);
    return it == cfg.sensors.end() ? cfg.geometry : cfg.geometry_for(it->second);
}

CalibrationProtocol protocol_from_name(const std::string& name) {
    if (name == "method1") return CalibrationProtocol::method1;
    if (name == "method2") return CalibrationProtocol::method2;
    if (name == "learned") return CalibrationProtocol::learned;
    throw Error(ErrorKind::usage, "unknown protocol: " + name);
}

std::vector<int> parse_feature_list(const std::string& csv) {
    std::vector<int> out;
    std::string tok;
    std::istringstream in(csv);
    while (std::getline(in, tok, ',')) {
        int id = 0;
        try {
            id = std::stoi(tok);
        } catch (...) {
            throw Error(ErrorKind::usage, "feature ids run 1..5, got " + tok);
        }
        require(id >= 1 && id <= kFeatureCount, ErrorKind::usage,
                "feature ids run 1..5, got " + tok);
        out.push_back(id - 1);
    }
    require(!out.empty(), ErrorKind::usage, "empty feature list");
    return out;
}

int run(int argc, char** argv) {
    CLI::App app{"Head-pose gaze-region estimation toolkit"};
    app.require_subcommand(1);

    // simulate ---------------------------------------------------------
    Common sim_common;
    std::string sim_sensor = "depthcam", sim_persona = "average", sim_protocol = "route";
    std::string sim_schedule = "natural", sim_out;
    double sim_duration_s = 2000.0;
    double sim_probe_s = 4.0;
    CLI::App* sim = app.add_subcommand("simulate", "Generate a synthetic session trace");
    add_common(sim, sim_common);
    sim->add_option("--sensor", sim_sensor, "Sensor preset")->capture_default_str();
    sim->add_option("--persona", sim_persona, "Persona preset")->capture_default_str();
    sim->add_option("--protocol", sim_protocol, "route|method1|method2|learned")
        ->capture_default_str();
    sim->add_option("--schedule", sim_schedule, "natural|aligned (route only)")
        ->capture_default_str();
    sim->add_option("--duration-s", sim_duration_s, "Route duration in seconds")
        ->capture_default_str();
    sim->add_option("--probe-period-s", sim_probe_s, "Probe period in seconds")
        ->capture_default_str();
    sim->add_option("--out", sim_out, "Output trace file")->required();

    // calibrate --------------------------------------------------------
    Common cal_common;
    std::string cal_protocol = "method1", cal_trace, cal_out;
    CLI::App* cal = app.add_subcommand("calibrate", "Fit a rule-based profile from a trace");
    add_common(cal, cal_common);
    cal->add_option("--protocol", cal_protocol, "method1|method2")->capture_default_str();
    cal->add_option("--trace", cal_trace, "Calibration trace file")->required();
    cal->add_option("--out", cal_out, "Output profile file")->required();

    // train ------------------------------------------------------------
    Common train_common;
    std::string train_model = "mlp", train_trace, train_out, train_features;
    bool train_no_standardize = false;
    CLI::App* train = app.add_subcommand("train", "Train a learned profile from a trace");
    add_common(train, train_common);
    train->add_option("--model", train_model, "mlp|svm")->capture_default_str();
    train->add_option("--trace", train_trace, "Learned-protocol trace file")->required();
    train->add_option("--out", train_out, "Output profile file")->required();
    train->add_option("--features", train_features,
                      "Comma-separated 1-based feature ids (e.g. 1,2)");
    train->add_flag("--no-standardize", train_no_standardize,
                    "Feed raw features to the classifier");

    // evaluate ---------------------------------------------------------
    Common eval_common;
    std::string eval_trace, eval_profile, eval_out;
    int eval_method = 0;
    bool eval_as_written = false;
    CLI::App* eval = app.add_subcommand("evaluate", "Run a calibrated method over probes");
    add_common(eval, eval_common);
    eval->add_option("--trace", eval_trace, "Labeled route trace")->required();
    eval->add_option("--profile", eval_profile, "Profile file")->required();
    eval->add_option("--method", eval_method, "Expected method id (validated)");
    eval->add_flag("--as-written", eval_as_written,
                   "Method 1 fidelity mode: multiply by the signed scale factors");
    eval->add_option("--out", eval_out, "Write the report as JSON");

    // rank-features ------------------------------------------------------
    Common rank_common;
    std::string rank_trace;
    bool rank_fixed_prefix = false;
    CLI::App* rank = app.add_subcommand("rank-features",
                                        "Scatter-criterion feature ranking of a training set");
    add_common(rank, rank_common);
    rank->add_option("--trace", rank_trace, "Learned-protocol trace file")->required();
    rank->add_flag("--fixed-prefix", rank_fixed_prefix,
                   "Score prefixes of the 1..5 order instead of greedy selection");

    // stats --------------------------------------------------------------
    Common stats_common;
    std::string stats_trace;
    CLI::App* stats = app.add_subcommand("stats", "Head-pose statistics of a trace");
    add_common(stats, stats_common);
    stats->add_option("--trace", stats_trace, "Trace file")->required();

    // report -------------------------------------------------------------
    Common report_common;
    std::vector<std::string> report_files;
    std::string report_out;
    CLI::App* report = app.add_subcommand("report", "Compare evaluation reports");
    add_common(report, report_common);
    report->add_option("reports", report_files, "Report JSON files")->required();
    report->add_option("--out", report_out, "Write the comparison table to a file");

    // suite --------------------------------------------------------------
    Common suite_common;
    std::string suite_out_dir = "suite_out";
    int suite_seeds = 10;
    double suite_session_s = 2000.0;
    CLI::App* suite = app.add_subcommand("suite", "Run the persona x sensor seed battery");
    add_common(suite, suite_common);
    suite->add_option("--out-dir", suite_out_dir, "Report output directory")
        ->capture_default_str();
    suite->add_option("--seeds", suite_seeds, "Seeds per configuration")->capture_default_str();
    suite->add_option("--session-s", suite_session_s, "Route length per run, seconds")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;  // usage error
    }

    if (sim->parsed()) {
        const Config cfg = resolve_config(sim_common);
        const Persona& persona = cfg.persona(sim_persona);
        const SensorPreset& preset = cfg.sensor(sim_sensor);
        const SceneGeometry geometry = cfg.geometry_for(preset);
        SessionTrace trace;
        if (sim_protocol == "route") {
            const double duration_ms = sim_duration_s * 1000.0;
            const double period_ms = sim_probe_s * 1000.0;
            const RegionSchedule schedule =
                sim_schedule == "aligned"
                    ? aligned_schedule(duration_ms, derive_seed(sim_common.seed, 1),
                                       cfg.schedule_frequencies, period_ms)
                    : natural_schedule(duration_ms, derive_seed(sim_common.seed, 1),
                                       cfg.schedule_frequencies, cfg.schedule_mean_dwell_ms);
            trace = synthesize_session(persona, preset.model, schedule, geometry, period_ms,
                                       derive_seed(sim_common.seed, 2), cfg.region_targets);
        } else {
            trace = synthesize_calibration(persona, preset.model, geometry,
                                           protocol_from_name(sim_protocol), sim_common.seed,
                                           cfg.method2_table, cfg.region_targets);
        }
        write_trace(trace, sim_out);
        std::cout << "wrote " << trace.samples.size() << " samples, " << trace.probes_ms.size()
                  << " probes to " << sim_out << "\n";
        return 0;
    }

    if (cal->parsed()) {
        const Config cfg = resolve_config(cal_common);
        const SessionTrace trace = read_trace(cal_trace);
        const CalibrationProtocol protocol = protocol_from_name(cal_protocol);
        require(protocol != CalibrationProtocol::learned, ErrorKind::usage,
                "the learned protocol is trained with the `train` subcommand");
        const SceneGeometry geometry = geometry_for_trace(cfg, trace);
        CalibrationProfile profile;
        if (protocol == CalibrationProtocol::method1)
            profile = calibrate_method1(dwells_from_trace(trace, protocol), geometry);
        else
            profile = calibrate_method2(dwells_from_trace(trace, protocol), geometry,
                                        cfg.method2_table);
        save_profile(profile, cal_out);
        std::cout << "wrote method-" << profile_method(profile) << " profile to " << cal_out
                  << "\n";
        return 0;
    }

    if (train->parsed()) {
        const Config cfg = resolve_config(train_common);
        const SessionTrace trace = read_trace(train_trace);
        TrainConfig tc = cfg.train;
        tc.rng_seed = train_common.seed;
        TrainOptions options;
        if (!train_features.empty()) options.feature_subset = parse_feature_list(train_features);
        options.standardize = !train_no_standardize;
        const TrainingSet set = build_training_set(trace);
        LearnedProfile profile;
        profile.normalizer = set.normalizer;
        profile.reference_face_cx = set.central_ref.cx_px;
        profile.reference_face_cy = set.central_ref.cy_px;
        profile.feature_subset = options.feature_subset;
        profile.standardized = options.standardize;
        if (train_model == "mlp") {
            profile.model = mlp_train(set, tc, options);
        } else if (train_model == "svm") {
            const SvmModel model = svm_train(set, tc, options);
            if (!model.converged)
                std::cerr << "warning: SVM stopped at the iteration cap before convergence\n";
            profile.model = model;
        } else {
            throw Error(ErrorKind::usage, "unknown model: " + train_model);
        }
        save_profile(CalibrationProfile(profile), train_out);
        std::cout << "wrote method-" << profile_method(CalibrationProfile(profile))
                  << " profile to " << train_out << "\n";
        return 0;
    }

    if (eval->parsed()) {
        const Config cfg = resolve_config(eval_common);
        const SessionTrace trace = read_trace(eval_trace);
        const CalibrationProfile profile = load_profile(eval_profile);
        const SceneGeometry geometry = geometry_for_trace(cfg, trace);
        const std::optional<int> expected =
            eval_method > 0 ? std::optional<int>(eval_method) : std::nullopt;
        const Estimator estimator = make_estimator(
            profile, geometry, expected,
            eval_as_written ? ScalingMode::as_written : ScalingMode::corrective,
            cfg.method2_table);
        const EvaluationReport rep = run_evaluation(trace, estimator);
        std::cout << render_report(rep);
        if (!eval_out.empty()) {
            std::ofstream out(eval_out, std::ios::binary);
            require(out.good(), ErrorKind::data, "cannot write " + eval_out);
            out << report_to_json(rep);
        }
        return 0;
    }

    if (rank->parsed()) {
        const SessionTrace trace = read_trace(rank_trace);
        const TrainingSet set = build_training_set(trace);
        const FeatureRanking ranking = rank_fixed_prefix
                                           ? fixed_prefix_rank(set.set, {1, 2, 3, 4, 5})
                                           : greedy_rank(set.set);
        std::cout << "Features from the most to the least discriminative: ";
        for (std::size_t i = 0; i < ranking.order.size(); ++i) {
            if (i) std::cout << (i + 1 == ranking.order.size() ? ", and " : ", ");
            std::cout << ranking.order[i];
        }
        std::cout << "\nwith weights ";
        char buf[32];
        for (std::size_t i = 0; i < ranking.cumulative.size(); ++i) {
            if (i) std::cout << (i + 1 == ranking.cumulative.size() ? ", and " : ", ");
            std::snprintf(buf, sizeof buf, "%.2f", ranking.cumulative[i]);
            std::cout << buf;
        }
        std::cout << ", respectively.\n";
        return 0;
    }

    if (stats->parsed()) {
        const SessionTrace trace = read_trace(stats_trace);
        std::cout << render_stats(head_pose_stats(trace));
        return 0;
    }

    if (report->parsed()) {
        std::vector<EvaluationReport> reports;
        for (const std::string& path : report_files) {
            std::ifstream in(path, std::ios::binary);
            require(in.good(), ErrorKind::data, "cannot open " + path);
            std::ostringstream buf;
            buf << in.rdbuf();
            reports.push_back(report_from_json(buf.str()));
        }
        const std::string table = render_comparison(compare_report(reports));
        std::cout << table;
        if (!report_out.empty()) {
            std::ofstream out(report_out, std::ios::binary);
            require(out.good(), ErrorKind::data, "cannot write " + report_out);
            out << table;
        }
        return 0;
    }

    if (suite->parsed()) {
        const Config cfg = resolve_config(suite_common);
        SuiteOptions opt;
        opt.seed = suite_common.seed;
        opt.seed_count = suite_seeds;
        opt.session_s = suite_session_s;
        opt.out_dir = suite_out_dir;
        const SuiteResult result = run_suite(cfg, opt);
        std::cout << result.summary;
        std::cout << "reports written to " << suite_out_dir << "\n";
        return 0;
    }

    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const gaze::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
