#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "har_audit/dataset.hpp"
#include "har_audit/prediction_log.hpp"

namespace har_audit {

/// Mean class distribution over every (model, run) record of one window.
struct FusedDistribution {
    WindowId window_id = 0;
    ClassId true_label = 0;
    std::vector<double> mean_probs;
    ClassId confused_class = 0;
    // Set when the fused argmax is the true label even though every model
    // was wrong; confused_class is then the strongest other class.
    bool fused_agrees_with_truth = false;
};

/// Fuses the records of each requested window by unweighted mean over all
/// records (argmax ties to the lowest class). Every model present in
/// `records` must have at least one record for every requested window.
/// Output is ordered by window id.
std::vector<FusedDistribution> fuse_probabilities(std::span<const PredictionRecord> records,
                                                  std::span<const WindowId> windows);

struct ClassConfusionRow {
    ClassId class_id = 0;
    std::size_t windows = 0;
    std::size_t ifc_windows = 0;
    double distribution_pct = 0.0;
    // Absent when the class has no IFC windows.
    std::optional<double> relative_confusion_pct;
    std::optional<double> absolute_confusion_pct;
};

/// Per class: share of all windows, share of the class's windows that are
/// in the IFC, and dist * rel / 100 (the class's IFC share of all windows).
std::vector<ClassConfusionRow> confusion_table(const std::vector<bool>& ifc_flags, std::span<const ClassId> labels,
                                               std::size_t num_classes);

struct ChordEdge {
    ClassId true_class = 0;
    ClassId confused_class = 0;
    std::size_t weight = 0;
    friend bool operator==(const ChordEdge&, const ChordEdge&) = default;
};

/// Counts (true, confused) pairs; sorted by weight descending, then by
/// true class and confused class ascending.
std::vector<ChordEdge> chord_edges(std::span<const FusedDistribution> fused);

std::vector<std::string> default_class_names(std::size_t num_classes);

void write_confusion_csv(std::ostream& out, std::span<const ClassConfusionRow> rows,
                         std::span<const std::string> class_names);
void write_chord_json(std::ostream& out, std::span<const ChordEdge> edges, std::span<const std::string> class_names);

}  // namespace har_audit
