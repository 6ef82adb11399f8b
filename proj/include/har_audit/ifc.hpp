#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "har_audit/dataset.hpp"
#include "har_audit/prediction_log.hpp"

namespace har_audit {

/// Raised when the direct IFC count and the closure form disagree.
class ConsistencyError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Per-model correctness over a common, ordered set of windows.
class CorrectnessMatrix {
public:
    CorrectnessMatrix() = default;
    CorrectnessMatrix(std::vector<std::string> model_ids, std::vector<WindowId> window_ids);

    std::size_t num_models() const noexcept { return model_ids_.size(); }
    std::size_t num_windows() const noexcept { return window_ids_.size(); }
    const std::vector<std::string>& model_ids() const noexcept { return model_ids_; }
    const std::vector<WindowId>& window_ids() const noexcept { return window_ids_; }

    bool operator()(std::size_t model, std::size_t window) const { return cells_[model * num_windows() + window] != 0; }
    void set(std::size_t model, std::size_t window, bool correct) {
        cells_[model * num_windows() + window] = correct ? 1 : 0;
    }

    /// Number of models correct on each window.
    std::vector<std::size_t> correct_counts() const;

    /// Returns a copy with an extra model row.
    CorrectnessMatrix with_row(const std::string& model_id, const std::vector<bool>& row) const;

private:
    std::vector<std::string> model_ids_;
    std::vector<WindowId> window_ids_;
    std::vector<std::uint8_t> cells_;
};

/// Row m, column w = merged correctness of model m on window w. Columns
/// follow `window_order` when given, otherwise the first model's windows in
/// ascending order. Any missing (model, window) cell is an error.
CorrectnessMatrix build_matrix(std::span<const ConsolidatedCorrectness> models,
                               std::optional<std::span<const WindowId>> window_order = std::nullopt);

/// Percentage of windows that exactly one model gets right, per model.
std::vector<double> single_contributions(const CorrectnessMatrix& m);

/// Percentage of windows that at least two models get right.
double common_ground(const CorrectnessMatrix& m);

struct IfcSummary {
    std::vector<std::string> model_ids;
    std::vector<double> single_contribution;  // percent, per model
    double common_ground = 0.0;               // percent
    double ifc = 0.0;                         // percent
    std::vector<bool> ifc_flags;              // per window: no model correct
    std::vector<WindowId> window_ids;
    std::size_t num_windows = 0;
    std::size_t ifc_windows = 0;
    std::optional<MergePolicy> policy;
};

/// Tolerance for the agreement of the two IFC routes and for closure.
constexpr double kClosureTolerance = 1e-9;

/// Counts windows no model gets right and cross-checks the result against
/// 100 - common ground - sum of single contributions.
IfcSummary compute_ifc(const CorrectnessMatrix& m);

/// Spreads window flags onto samples: a sample is set if any window that
/// covers it is set. Samples outside every window stay false.
std::vector<bool> merge_flags_to_samples(const std::vector<bool>& window_flags, const WindowedDataset& ds);

/// Generic window-to-sample merge taking the maximum value over covering
/// windows (0 for uncovered samples).
std::vector<int> merge_max_to_samples(std::span<const int> window_values, const WindowedDataset& ds);

struct Segment {
    std::size_t start_window = 0;
    std::size_t length = 0;
    friend bool operator==(const Segment&, const Segment&) = default;
};

struct HistogramBin {
    std::size_t lower = 0;
    std::size_t upper = 0;
    std::size_t count = 0;
    friend bool operator==(const HistogramBin&, const HistogramBin&) = default;
};

struct RunLengthHistogram {
    std::vector<Segment> segments;
    // Bins [1,1], [2,3], [4,7], ... up to the bin holding the longest run.
    std::vector<HistogramBin> bins;
};

/// Maximal runs of consecutive set flags. When `breaks` is given (one
/// recording id per window) a run never spans two recordings.
RunLengthHistogram run_lengths(const std::vector<bool>& flags,
                               std::optional<std::span<const std::size_t>> breaks = std::nullopt);

/// Recording index of each window, for use as run_lengths breaks.
std::vector<std::size_t> recording_breaks(const WindowedDataset& ds);

}  // namespace har_audit
