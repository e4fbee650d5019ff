#ifndef GAZE_SUITE_HPP
#define GAZE_SUITE_HPP

#include <map>
#include <string>
#include <vector>

#include "gaze/config.hpp"
#include "gaze/harness.hpp"

namespace gaze {

// The persona x sensor x seed battery behind the `suite` subcommand.
struct SuiteOptions {
    std::uint64_t seed = 42;
    int seed_count = 10;
    double session_s = 2000.0;
    double probe_period_ms = 4000.0;
    std::string out_dir;  // empty: keep results in memory only
};

struct SuiteRun {
    std::string sensor;
    std::string persona;
    std::uint64_t seed = 0;
    EvaluationReport method1;
    EvaluationReport method2;
};

struct SuiteResult {
    std::vector<SuiteRun> runs;
    int seed_count = 0;
    // Seeds (out of seed_count) satisfying each ordering.
    std::map<std::string, int> m2_le_m1;           // key "<sensor>/<persona>"
    std::map<std::string, int> small_ge_large_m1;  // key "<sensor>"
    std::map<std::string, int> hmd_le_depthcam;    // key "<persona>/m<1|2>"
    int region3_min_m1_small_depthcam = 0;
    std::string summary;
};

SuiteResult run_suite(const Config& cfg, const SuiteOptions& opt);

}  // namespace gaze

#endif
