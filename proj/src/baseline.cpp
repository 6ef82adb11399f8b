#include "har_audit/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace har_audit {

std::vector<double> extract_features(const Matrix& block) {
    if (block.rows() == 0) throw std::invalid_argument("cannot extract features from an empty window");
    const auto n = static_cast<double>(block.rows());
    std::vector<double> features;
    features.reserve(2 * block.cols());
    for (std::size_t c = 0; c < block.cols(); ++c) {
        double sum = 0.0;
        for (std::size_t r = 0; r < block.rows(); ++r) sum += block(r, c);
        const double mean = sum / n;
        double ss = 0.0;
        for (std::size_t r = 0; r < block.rows(); ++r) ss += (block(r, c) - mean) * (block(r, c) - mean);
        features.push_back(mean);
        features.push_back(std::sqrt(ss / n));
    }
    return features;
}

namespace {

void softmax_in_place(std::vector<double>& logits) {
    const double peak = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (auto& z : logits) {
        z = std::exp(z - peak);
        sum += z;
    }
    for (auto& z : logits) z /= sum;
}

void check_shapes(const BaselineModel& model, const Matrix& features, std::span<const ClassId> labels) {
    if (features.rows() != labels.size()) throw std::invalid_argument("feature rows and labels differ in count");
    if (features.rows() == 0) throw std::invalid_argument("no training examples");
    if (features.cols() != model.num_features()) throw std::invalid_argument("feature width differs from the model");
    for (ClassId y : labels) {
        if (y < 0 || static_cast<std::size_t>(y) >= model.num_classes()) {
            throw std::invalid_argument("label " + std::to_string(y) + " outside the model's classes");
        }
    }
}

}  // namespace

std::vector<double> predict(const BaselineModel& model, std::span<const double> features) {
    if (features.size() != model.num_features()) throw std::invalid_argument("feature width differs from the model");
    std::vector<double> logits(model.bias);
    for (std::size_t k = 0; k < logits.size(); ++k) {
        const auto w = model.weights.row(k);
        for (std::size_t f = 0; f < features.size(); ++f) logits[k] += w[f] * features[f];
    }
    softmax_in_place(logits);
    return logits;
}

double cross_entropy_loss(const BaselineModel& model, const Matrix& features, std::span<const ClassId> labels) {
    check_shapes(model, features, labels);
    double loss = 0.0;
    for (std::size_t i = 0; i < features.rows(); ++i) {
        const auto p = predict(model, features.row(i));
        loss -= std::log(std::max(p[static_cast<std::size_t>(labels[i])], 1e-300));
    }
    return loss / static_cast<double>(features.rows());
}

Gradient cross_entropy_gradient(const BaselineModel& model, const Matrix& features, std::span<const ClassId> labels) {
    check_shapes(model, features, labels);
    Gradient g{Matrix(model.num_classes(), model.num_features()), std::vector<double>(model.num_classes(), 0.0)};
    const auto n = static_cast<double>(features.rows());
    for (std::size_t i = 0; i < features.rows(); ++i) {
        auto p = predict(model, features.row(i));
        p[static_cast<std::size_t>(labels[i])] -= 1.0;
        const auto x = features.row(i);
        for (std::size_t k = 0; k < p.size(); ++k) {
            const double residual = p[k] / n;
            g.bias[k] += residual;
            auto gw = g.weights.row(k);
            for (std::size_t f = 0; f < x.size(); ++f) gw[f] += residual * x[f];
        }
    }
    return g;
}

BaselineModel train_baseline(const Matrix& features, std::span<const ClassId> labels, std::size_t num_classes,
                             const BaselineConfig& config) {
    if (num_classes < 2) throw std::invalid_argument("baseline needs at least two classes");
    std::vector<bool> present(num_classes, false);
    for (ClassId y : labels) {
        if (y >= 0 && static_cast<std::size_t>(y) < num_classes) present[static_cast<std::size_t>(y)] = true;
    }
    for (std::size_t c = 0; c < num_classes; ++c) {
        if (!present[c]) throw std::invalid_argument("class " + std::to_string(c) + " is absent from the training split");
    }

    BaselineModel model{Matrix(num_classes, features.cols()), std::vector<double>(num_classes, 0.0), config};
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        const auto g = cross_entropy_gradient(model, features, labels);
        for (std::size_t i = 0; i < model.weights.data().size(); ++i) {
            model.weights.data()[i] -= config.step_size * g.weights.data()[i];
        }
        for (std::size_t k = 0; k < num_classes; ++k) model.bias[k] -= config.step_size * g.bias[k];
    }
    for (double w : model.weights.data()) {
        if (!std::isfinite(w)) throw std::runtime_error("baseline training diverged");
    }
    return model;
}

}  // namespace har_audit
