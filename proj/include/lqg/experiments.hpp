#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lqg/metric.hpp"

namespace lqg {

/// Exit-code contract: 0 = all checks pass, 2 = soft (statistical) criteria
/// missed, 3 = hard invariant violation.
enum ExitStatus : int { kPass = 0, kSoftMiss = 2, kHardFail = 3 };

struct RunConfig {
    double gamma = 1.6329931618554518;  // sqrt(8/3)
    double d_gamma = 4.0;
    int side_count = 256;
    double mesh = 0.0;           // 0 -> 4 / side_count (grid spans [-2,2)^2)
    double eps = 0.0;            // mollification; 0 -> 4 * mesh
    double measure_scale = 0.0;  // 0 -> 4 * mesh
    double slack = 0.0;          // corridor delta; 0 -> 2 x median edge cost
    double excision = 0.0;       // endpoint rho; 0 -> 5 x median vertex weight
    std::vector<std::uint64_t> seeds{1};
    std::string experiment;
    std::string out_dir = "out";
    int threads = 0;  // 0 -> hardware concurrency
    int pairs_per_seed = 10;
    int samples_per_seed = 5;

    double resolved_mesh() const { return mesh > 0.0 ? mesh : 4.0 / side_count; }
    double resolved_eps() const { return eps > 0.0 ? eps : 4.0 * resolved_mesh(); }
    double resolved_measure_scale() const {
        return measure_scale > 0.0 ? measure_scale : 4.0 * resolved_mesh();
    }
    GridSpec grid() const { return GridSpec::centered(side_count, resolved_mesh()); }
    MetricParams params() const { return MetricParams::with(gamma, d_gamma); }

    void validate() const;
    nlohmann::json to_json() const;
    static RunConfig from_json(const nlohmann::json& j);
};

struct SeedStatus {
    std::uint64_t seed = 0;
    std::string status;  // "ok" or an error note
    double ms = 0.0;
};

struct RunManifest {
    std::string run_id;
    std::string experiment;
    nlohmann::json config_snapshot;
    std::string code_version;
    std::vector<SeedStatus> per_seed;
    std::vector<std::string> outputs;  // paths, all carrying the run id
    double total_ms = 0.0;
    int exit_status = kPass;
    nlohmann::json summary;

    nlohmann::json to_json() const;
};

extern const char* kCodeVersion;

/// Known experiments: axioms, multiplicity-census, network-census,
/// confluence-census, dimension, bounds, perturbation.
RunManifest run_experiment(const RunConfig& config);

/// Re-emits the SVG plots derivable from a manifest's summary (log-log
/// curves for dimension runs, the (n,m) histogram for censuses).
std::vector<std::string> emit_plots(const RunManifest& manifest);

/// Deterministic run id (FNV-1a of the config snapshot).
std::string run_id_for(const RunConfig& config);

/// Bounded worker pool; fn(i) for i in [0, n), any thread, no ordering.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

/// Fixed calibration seeds for the empirical norm constant.
std::vector<std::uint64_t> calibration_seeds();

/// Calibrated params for a config (norm_constant from the 8 fixed seeds).
MetricParams calibrated_params(const RunConfig& config);

}  // namespace lqg
