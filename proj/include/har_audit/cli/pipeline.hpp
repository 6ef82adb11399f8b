#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "har_audit/confusion.hpp"
#include "har_audit/dataset.hpp"
#include "har_audit/ifc.hpp"
#include "har_audit/mask.hpp"
#include "har_audit/metrics.hpp"
#include "har_audit/prediction_log.hpp"

namespace har_audit::cli {

inline constexpr const char* kBaselineConfigId = "lr0.1_ep200";

struct BaselinePlan {
    std::string dataset_id = "dataset";
    std::size_t runs = 4;
    std::uint64_t seed = 42;
};

/// Trains the baseline family per fold and returns out-of-fold prediction
/// records. Models: "logreg_all" on every channel's features and, with more
/// than one channel, "logreg_ch<i>" on channel i alone. Each fold fits its
/// own normalizer on its training windows. Run 0 trains on the full
/// training split; later runs on a bootstrap resample seeded from
/// (seed, fold, model, run).
std::vector<PredictionRecord> train_baseline_predictions(const WindowedDataset& ds, const FoldPlan& plan,
                                                         const BaselinePlan& opts);

/// Everything derived from a windowed dataset and its prediction log.
struct Audit {
    MergePolicy policy = MergePolicy::majority;
    std::map<DatasetModel, std::string> selection;
    std::vector<PredictionRecord> records;  // filtered to the selected configs
    std::vector<ConsolidatedCorrectness> consolidated;
    IfcSummary ifc;
    std::vector<FusedDistribution> fused;
    std::vector<ClassConfusionRow> confusion;
    std::vector<ChordEdge> edges;
    RunLengthHistogram histogram;
    MaskSequence mask;
    std::map<std::string, ModelScores> scores;
};

/// Best-config selection, run merging, IFC, fusion, confusion, run lengths
/// and mask, in that order. Window columns follow the dataset's window ids.
Audit run_audit(const WindowedDataset& ds, std::span<const PredictionRecord> records, MergePolicy policy);

/// Window-averaged channel values, one row per window.
Matrix window_means(const WindowedDataset& ds);

}  // namespace har_audit::cli
