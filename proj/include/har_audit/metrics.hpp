#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>

#include "har_audit/dataset.hpp"
#include "har_audit/prediction_log.hpp"

namespace har_audit {

double accuracy(std::span<const ClassId> truth, std::span<const ClassId> predicted);

/// Per-class F1 averaged with weights proportional to each class's support
/// in `truth`. Classes without support contribute nothing.
double weighted_f1(std::span<const ClassId> truth, std::span<const ClassId> predicted, std::size_t num_classes);

struct MeanStd {
    double mean = 0.0;
    double std = 0.0;  // population standard deviation
};

MeanStd mean_std(std::span<const double> values);

struct ModelScores {
    std::size_t runs = 0;
    MeanStd accuracy_pct;
    MeanStd weighted_f1_pct;
};

/// Out-of-fold accuracy and weighted F1 per run, summarized as mean and
/// spread over runs, keyed by model id. Records must already be filtered
/// to one config per model.
std::map<std::string, ModelScores> score_models(std::span<const PredictionRecord> records, std::size_t num_classes);

}  // namespace har_audit
