#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cgl/errors.hpp"

namespace cgl {

enum class Experiment {
    shape,     // growth constant along rays vs the closed form
    direction, // interface direction limit (lambda <= rho)
    udist,     // speed-process uniformity in the fan (lambda > rho)
    clt,       // joint interface clt in the shock regime (lambda < rho)
    fluct,     // transverse fluctuation exponent around the limit ray
    coupling,  // exact growth <-> exclusion dictionary replay
    duality,   // local geodesic structure + reversed-weight law at equilibrium
    tasep,     // tagged second-class particle speed via the event-clock run
};

const char* experiment_name(Experiment e);
Experiment experiment_from_name(const std::string& name); // UsageError if unknown

struct ExperimentConfig {
    Experiment experiment = Experiment::shape;
    double lambda = -1.0; // < 0: use the experiment default
    double rho = -1.0;
    int32_t n = 0;   // box side; 0: experiment default
    double t = 0.0;  // time horizon; 0: experiment default
    int32_t replicas = 100;
    uint64_t seed = 1;
    int32_t threads = 0; // 0: all hardware threads
    std::string out;     // rows artifact; empty: "<experiment>.<format>"
    std::string format = "csv"; // csv | json
    bool resume = false;
};

struct Verdict {
    std::string name;
    bool pass = false;
    double observed = 0.0;
    double lo = 0.0; // admissible band
    double hi = 0.0;
    std::string note;
};

struct RunReport {
    ExperimentConfig config; // with defaults filled in
    std::vector<Verdict> verdicts;
    bool all_pass = false;
    int32_t replicas_completed = 0;
    int32_t replicas_retried = 0;
    std::vector<int32_t> replicas_failed;
    std::string rows_path;
    std::string report_path;
    double wall_seconds = 0.0;
};

// Parse "cglab <experiment> [flags]". Returns nullopt when help was printed.
// Flags override values from an optional `--config key = value` file;
// unknown keys and malformed values raise UsageError naming the token.
std::optional<ExperimentConfig> parse_config(const std::vector<std::string>& args);

// One-line-per-replica batch run: replica streams keyed (seed, index), rows
// aggregated in index order (thread-count independent), artifacts written
// via temp file + rename. Replicas whose box or caps run out are retried
// once at doubled geometry, then reported as failed. --resume reuses
// per-replica row files from "<out>.work/".
RunReport run_experiment(const ExperimentConfig& config);

// exit code contract: 0 all verdicts pass, 1 some verdict failed
inline int report_exit_code(const RunReport& r) { return r.all_pass ? 0 : 1; }

} // namespace cgl
