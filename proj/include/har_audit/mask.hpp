#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "har_audit/confusion.hpp"
#include "har_audit/dataset.hpp"

namespace har_audit {

enum class MaskCategory : int { clean = 0, minor = 1, major = 2 };

/// Gaps closer than this to the largest gap count as ties; ties go to the
/// smallest index, i.e. towards major.
constexpr double kGapTieTolerance = 1e-12;

/// Non-IFC windows are clean. For IFC windows the probabilities are sorted
/// descending; if the largest drop between neighbours is the first one the
/// window is major, otherwise minor. Throws for fewer than two classes.
MaskCategory categorize(std::span<const double> mean_probs, bool is_ifc);

struct MaskDistribution {
    double clean_pct = 0.0;
    double minor_pct = 0.0;
    double major_pct = 0.0;
};

struct MaskWindow {
    WindowId window_id = 0;
    std::size_t start_sample = 0;
    std::size_t end_sample = 0;
    MaskCategory category = MaskCategory::clean;
    friend bool operator==(const MaskWindow&, const MaskWindow&) = default;
};

struct MaskSequence {
    std::vector<MaskWindow> window_mask;
    std::vector<MaskCategory> sample_mask;
    MaskDistribution distribution;
};

/// Categorizes every window and merges to samples by maximum severity.
/// Every IFC window needs a fused distribution.
MaskSequence build_mask(const std::vector<bool>& ifc_flags, std::span<const FusedDistribution> fused,
                        const WindowedDataset& ds);

MaskDistribution mask_distribution(std::span<const MaskWindow> windows);

void write_window_mask_csv(std::ostream& out, const MaskSequence& mask);
void write_sample_mask_csv(std::ostream& out, const MaskSequence& mask);

/// Reads both CSVs back; the distribution is recomputed from the windows.
MaskSequence read_mask_csv(std::istream& window_csv, std::istream& sample_csv);

}  // namespace har_audit
