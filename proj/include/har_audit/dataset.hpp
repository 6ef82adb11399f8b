#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "har_audit/matrix.hpp"

namespace har_audit {

using ClassId = int;
using WindowId = std::int64_t;

/// Raised for malformed canonical recording files. `line()` is 1-based and
/// counts the header as line 1; 0 means the error is not tied to a line.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& what);
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// One continuous multichannel stream for a single (subject, session).
struct SensorRecording {
    Matrix channels;  // [num_samples x num_channels]
    double sample_rate = 50.0;
    std::vector<ClassId> labels;
    std::string subject_id;
    std::string session_id;
    std::vector<std::string> channel_names;

    std::size_t num_samples() const noexcept { return channels.rows(); }
    std::size_t num_channels() const noexcept { return channels.cols(); }
};

struct ParsedRecordings {
    std::vector<SensorRecording> recordings;
    std::size_t repair_count = 0;
};

struct RecordingParseOptions {
    double sample_rate = 50.0;
};

/// Reads the canonical CSV layout
/// `subject_id,session_id,label,<channel_0>,...`. Rows are grouped into one
/// recording per (subject_id, session_id) in order of first appearance.
/// Empty channel cells are repaired per channel by forward fill, then
/// backward fill; the number of repaired cells is reported.
ParsedRecordings parse_canonical_recording(std::istream& in, const RecordingParseOptions& opts = {});

void write_canonical_recording(std::ostream& out, std::span<const SensorRecording> recordings);

/// Remaps the label values used across all recordings onto 0..C-1 in
/// ascending order. Returns the original label for each dense id.
std::vector<ClassId> densify_labels(std::span<SensorRecording> recordings);

enum class LabelPolicy { majority, last_sample, strict_uniform };
enum class GroupUnit { subject, subject_session };

LabelPolicy parse_label_policy(const std::string& name);
std::string to_string(LabelPolicy policy);
GroupUnit parse_group_unit(const std::string& name);
std::string to_string(GroupUnit unit);

struct WindowConfig {
    std::size_t size = 200;
    std::size_t stride = 100;
    LabelPolicy label_policy = LabelPolicy::majority;
    GroupUnit group_unit = GroupUnit::subject;

    /// Throws std::invalid_argument unless 1 <= stride <= size.
    void validate() const;
};

struct WindowLabel {
    ClassId label = 0;
    bool transition = false;
};

WindowLabel assign_window_label(std::span<const ClassId> labels, LabelPolicy policy);

struct Window {
    WindowId window_id = 0;
    std::size_t recording = 0;
    // Sample indices into the concatenation of all recordings.
    std::size_t start_sample = 0;
    std::size_t end_sample = 0;
    ClassId label = 0;
    bool transition = false;
    std::string group_key;
    Matrix block;  // [size x num_channels]
};

struct NormStats {
    std::vector<double> mean;
    std::vector<double> std;
    // Divisor actually applied per channel (std, or 1 for flat channels).
    std::vector<double> divisor;
};

struct WindowedDataset {
    std::vector<Window> windows;
    std::size_t num_classes = 0;
    WindowConfig config;
    std::optional<NormStats> norm_stats;
    std::size_t total_samples = 0;
    // Offset of each recording in the concatenated sample index space.
    std::vector<std::size_t> recording_offsets;
    std::vector<std::string> warnings;

    std::size_t size() const noexcept { return windows.size(); }
};

/// Slices one recording. Windows start at multiples of `stride`; recordings
/// shorter than one window produce no windows and a warning.
WindowedDataset slice_windows(const SensorRecording& rec, const WindowConfig& cfg);

/// Slices a corpus. Window ids are dense in recording order and sample
/// indices are offsets into the concatenated stream.
WindowedDataset slice_windows(std::span<const SensorRecording> recs, const WindowConfig& cfg);

std::string group_key_for(const SensorRecording& rec, GroupUnit unit);

/// Per-channel mean and population standard deviation over the samples of
/// the given windows. Channels with std < 1e-9 get divisor 1.
NormStats fit_normalizer(const WindowedDataset& ds, std::span<const WindowId> train_windows);

WindowedDataset apply_normalizer(const WindowedDataset& ds, const NormStats& stats);
Matrix apply_normalizer(const Matrix& block, const NormStats& stats);
Matrix invert_normalizer(const Matrix& block, const NormStats& stats);

struct Fold {
    int fold_id = 0;
    std::vector<std::string> test_group_keys;
    std::vector<WindowId> test_window_ids;
};

struct FoldPlan {
    std::vector<Fold> folds;
    std::size_t k = 0;
};

struct GroupCount {
    std::string key;
    std::size_t windows = 0;
};

/// Assigns groups to at most `max_k` folds. With no more groups than
/// `max_k` each group becomes its own fold (input order). Otherwise groups
/// are taken by descending window count (ties: lexicographic key) and each
/// goes to the fold with the fewest windows (ties: lowest fold id).
/// Window ids are left empty; see plan_folds.
FoldPlan group_k_fold(std::span<const GroupCount> groups, std::size_t max_k = 10);

/// group_k_fold over the dataset's group keys, with test window ids filled.
FoldPlan plan_folds(const WindowedDataset& ds, std::size_t max_k = 10);

/// Window ids not in the given fold's test set, ascending.
std::vector<WindowId> train_windows_for(const FoldPlan& plan, std::size_t fold_index, const WindowedDataset& ds);

void write_fold_plan_json(std::ostream& out, const FoldPlan& plan);
FoldPlan read_fold_plan_json(std::istream& in);

}  // namespace har_audit
