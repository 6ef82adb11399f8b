#include "har_audit/metrics.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace har_audit {

double accuracy(std::span<const ClassId> truth, std::span<const ClassId> predicted) {
    if (truth.size() != predicted.size()) throw std::invalid_argument("accuracy: length mismatch");
    if (truth.empty()) throw std::invalid_argument("accuracy: no examples");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) hits += truth[i] == predicted[i] ? 1 : 0;
    return static_cast<double>(hits) / static_cast<double>(truth.size());
}

double weighted_f1(std::span<const ClassId> truth, std::span<const ClassId> predicted, std::size_t num_classes) {
    if (truth.size() != predicted.size()) throw std::invalid_argument("weighted_f1: length mismatch");
    if (truth.empty()) throw std::invalid_argument("weighted_f1: no examples");
    std::vector<std::size_t> tp(num_classes, 0), fp(num_classes, 0), fn(num_classes, 0), support(num_classes, 0);
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const auto t = static_cast<std::size_t>(truth[i]);
        const auto p = static_cast<std::size_t>(predicted[i]);
        if (t >= num_classes || p >= num_classes) throw std::invalid_argument("weighted_f1: class id out of range");
        ++support[t];
        if (t == p) {
            ++tp[t];
        } else {
            ++fp[p];
            ++fn[t];
        }
    }
    double weighted = 0.0;
    for (std::size_t c = 0; c < num_classes; ++c) {
        if (support[c] == 0) continue;
        const double denom = static_cast<double>(2 * tp[c] + fp[c] + fn[c]);
        weighted += static_cast<double>(support[c]) * (2.0 * static_cast<double>(tp[c]) / denom);
    }
    return weighted / static_cast<double>(truth.size());
}

MeanStd mean_std(std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("mean_std: no values");
    double sum = 0.0;
    for (double v : values) sum += v;
    const double mean = sum / static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return {mean, std::sqrt(ss / static_cast<double>(values.size()))};
}

std::map<std::string, ModelScores> score_models(std::span<const PredictionRecord> records, std::size_t num_classes) {
    struct RunPreds {
        std::vector<ClassId> truth;
        std::vector<ClassId> predicted;
    };
    std::map<std::string, std::map<int, RunPreds>> grouped;
    for (const auto& r : records) {
        auto& run = grouped[r.model_id][r.run_id];
        run.truth.push_back(r.true_label);
        run.predicted.push_back(static_cast<ClassId>(argmax_lowest(r.probs)));
    }
    std::map<std::string, ModelScores> out;
    for (const auto& [model, runs] : grouped) {
        std::vector<double> acc, f1;
        for (const auto& [run, preds] : runs) {
            acc.push_back(100.0 * accuracy(preds.truth, preds.predicted));
            f1.push_back(100.0 * weighted_f1(preds.truth, preds.predicted, num_classes));
        }
        out[model] = {runs.size(), mean_std(acc), mean_std(f1)};
    }
    return out;
}

}  // namespace har_audit
