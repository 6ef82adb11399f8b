#pragma once

#include <cstddef>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "har_audit/dataset.hpp"

namespace har_audit {

/// One model/run/fold prediction for one window.
struct PredictionRecord {
    std::string dataset_id;
    std::string model_id;
    std::string config_id;
    int run_id = 0;
    int fold_id = 0;
    WindowId window_id = 0;
    ClassId true_label = 0;
    std::vector<double> probs;

    friend bool operator==(const PredictionRecord&, const PredictionRecord&) = default;
};

/// Rejection of a prediction record; `index()` is the 0-based record index
/// in the stream (equal to the line index for JSONL input).
class RecordError : public std::runtime_error {
public:
    RecordError(std::size_t index, const std::string& what);
    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

constexpr double kSimplexTolerance = 1e-6;

/// Optional checks against a windowed dataset.
struct RecordValidation {
    std::optional<std::size_t> num_classes;
    std::optional<std::set<WindowId>> known_windows;
};

/// Throws RecordError for simplex violations, class-count mismatches,
/// duplicate (model, config, run, window) keys and unknown windows.
void validate_records(std::span<const PredictionRecord> records, const RecordValidation& v = {});

/// Parses JSONL, one record per non-empty line, and validates the result.
std::vector<PredictionRecord> read_records(std::istream& in, const RecordValidation& v = {});

/// Writes JSONL. Probabilities use shortest round-trip formatting, so
/// read_records(write_records(x)) == x.
void write_records(std::ostream& out, std::span<const PredictionRecord> records);

/// argmax(probs) == true_label, with argmax ties going to the lowest index.
bool is_correct(const PredictionRecord& record);

std::size_t argmax_lowest(std::span<const double> values);

using DatasetModel = std::pair<std::string, std::string>;

/// Per (dataset, model): the config with the highest mean out-of-fold
/// accuracy across runs (ties: lexicographically smallest config id).
/// Configs missing any fold of their dataset for any run are not eligible;
/// if no config is eligible an error names the missing folds.
std::map<DatasetModel, std::string> best_hyperparams(std::span<const PredictionRecord> records);

/// Keeps only records whose config is the selected one for their model.
std::vector<PredictionRecord> filter_to_configs(std::span<const PredictionRecord> records,
                                                const std::map<DatasetModel, std::string>& selection);

enum class MergePolicy { any, majority, all };

MergePolicy parse_merge_policy(const std::string& name);
std::string to_string(MergePolicy policy);

struct ConsolidatedCorrectness {
    std::string model_id;
    MergePolicy policy = MergePolicy::majority;
    std::size_t runs = 0;
    std::map<WindowId, bool> correct;
};

/// Combines the runs of one model into a single verdict per window.
/// any: correct in at least one run; majority: correct in more than half;
/// all: correct in every run. Every window must have the same run count.
ConsolidatedCorrectness merge_runs(std::span<const PredictionRecord> records, MergePolicy policy);

/// Groups records by model (ascending model id) and merges each.
std::vector<ConsolidatedCorrectness> merge_all_models(std::span<const PredictionRecord> records, MergePolicy policy);

}  // namespace har_audit
