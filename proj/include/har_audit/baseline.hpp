#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "har_audit/dataset.hpp"
#include "har_audit/matrix.hpp"

namespace har_audit {

/// Per-channel mean and population standard deviation, interleaved by
/// channel: [mean_0, std_0, mean_1, std_1, ...].
std::vector<double> extract_features(const Matrix& block);

struct BaselineConfig {
    double step_size = 0.1;
    int epochs = 200;
    // Recorded with the model; full-batch descent from zero weights does
    // not consume randomness, so callers use it for resampling.
    std::uint64_t seed = 0;
};

/// Multinomial logistic regression: logits = weights * x + bias.
struct BaselineModel {
    Matrix weights;  // [classes x features]
    std::vector<double> bias;
    BaselineConfig config;

    std::size_t num_classes() const noexcept { return bias.size(); }
    std::size_t num_features() const noexcept { return weights.cols(); }
};

struct Gradient {
    Matrix weights;
    std::vector<double> bias;
};

/// Mean cross-entropy over the rows of `features`.
double cross_entropy_loss(const BaselineModel& model, const Matrix& features, std::span<const ClassId> labels);

/// Analytic gradient of cross_entropy_loss with respect to weights and bias.
Gradient cross_entropy_gradient(const BaselineModel& model, const Matrix& features, std::span<const ClassId> labels);

/// Full-batch gradient descent on mean cross-entropy from zero weights.
/// Every class in 0..num_classes-1 must appear in `labels`.
BaselineModel train_baseline(const Matrix& features, std::span<const ClassId> labels, std::size_t num_classes,
                             const BaselineConfig& config = {});

/// Softmax class probabilities for one feature vector.
std::vector<double> predict(const BaselineModel& model, std::span<const double> features);

}  // namespace har_audit
