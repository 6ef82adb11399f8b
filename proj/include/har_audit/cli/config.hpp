#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "har_audit/dataset.hpp"
#include "har_audit/prediction_log.hpp"

namespace har_audit::cli {

namespace fs = std::filesystem;

/// Settings shared by every subcommand. Precedence: built-in defaults,
/// then the --config JSON file, then explicit flags.
struct AuditConfig {
    std::vector<fs::path> recordings;
    std::vector<fs::path> logs;
    fs::path out;
    WindowConfig window;
    std::size_t max_k = 10;
    MergePolicy merge_policy = MergePolicy::majority;
    std::optional<fs::path> scenario;
    std::optional<std::uint64_t> seed;
    std::string dataset_id;  // empty: "synthetic" for synth, "dataset" for ingest
    std::size_t runs = 4;
    double sample_rate = 50.0;
};

/// Overlays keys present in a JSON config file onto `cfg`. Recognized keys:
/// recordings, logs, out, window_size, stride, label_policy, split_unit,
/// max_k, merge_policy, scenario, seed, dataset, runs, sample_rate.
void apply_config_file(AuditConfig& cfg, const fs::path& path);

/// Resolves `out` (falling back to $HAR_AUDIT_OUT) and checks that every
/// referenced input path exists. Throws std::invalid_argument otherwise.
void finalize_config(AuditConfig& cfg);

}  // namespace har_audit::cli
