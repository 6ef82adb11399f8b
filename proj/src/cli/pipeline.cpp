#include "har_audit/cli/pipeline.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>
#include <tuple>

#include "har_audit/baseline.hpp"

namespace har_audit::cli {

namespace {

struct FeatureView {
    std::string model_id;
    std::vector<std::size_t> columns;
};

std::vector<FeatureView> feature_views(std::size_t channels) {
    std::vector<FeatureView> views;
    FeatureView all{"logreg_all", {}};
    for (std::size_t f = 0; f < 2 * channels; ++f) all.columns.push_back(f);
    views.push_back(all);
    if (channels > 1) {
        for (std::size_t c = 0; c < channels; ++c) views.push_back({"logreg_ch" + std::to_string(c), {2 * c, 2 * c + 1}});
    }
    return views;
}

std::vector<double> select(std::span<const double> row, const std::vector<std::size_t>& columns) {
    std::vector<double> out;
    out.reserve(columns.size());
    for (std::size_t c : columns) out.push_back(row[c]);
    return out;
}

// Indices into `train` for one run: run 0 uses every example, later runs a
// bootstrap resample that still contains every class.
std::vector<std::size_t> run_sample(std::size_t n, std::span<const ClassId> labels, std::size_t num_classes,
                                    std::uint64_t seed, std::size_t fold, std::size_t view, std::size_t run) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    if (run == 0) return idx;

    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(fold), static_cast<std::uint32_t>(view), static_cast<std::uint32_t>(run)};
    std::mt19937_64 rng(seq);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (int attempt = 0; attempt < 100; ++attempt) {
        std::vector<bool> seen(num_classes, false);
        for (auto& i : idx) {
            i = pick(rng);
            seen[static_cast<std::size_t>(labels[i])] = true;
        }
        if (std::all_of(seen.begin(), seen.end(), [](bool b) { return b; })) return idx;
    }
    throw std::runtime_error("bootstrap resample keeps missing a class; training split is too small");
}

}  // namespace

std::vector<PredictionRecord> train_baseline_predictions(const WindowedDataset& ds, const FoldPlan& plan,
                                                         const BaselinePlan& opts) {
    if (ds.windows.empty()) throw std::invalid_argument("no windows to train on");
    const std::size_t channels = ds.windows.front().block.cols();
    const auto views = feature_views(channels);

    std::vector<PredictionRecord> records;
    for (std::size_t f = 0; f < plan.folds.size(); ++f) {
        const auto train_ids = train_windows_for(plan, f, ds);
        const auto stats = fit_normalizer(ds, train_ids);
        Matrix features(ds.windows.size(), 2 * channels);
        for (std::size_t w = 0; w < ds.windows.size(); ++w) {
            const auto feat = extract_features(apply_normalizer(ds.windows[w].block, stats));
            std::copy(feat.begin(), feat.end(), features.row(w).begin());
        }
        std::vector<ClassId> train_labels;
        for (WindowId id : train_ids) train_labels.push_back(ds.windows[static_cast<std::size_t>(id)].label);

        for (std::size_t v = 0; v < views.size(); ++v) {
            for (std::size_t run = 0; run < opts.runs; ++run) {
                const auto sample = run_sample(train_ids.size(), train_labels, ds.num_classes, opts.seed, f, v, run);
                Matrix x(sample.size(), views[v].columns.size());
                std::vector<ClassId> y;
                for (std::size_t i = 0; i < sample.size(); ++i) {
                    const auto row = select(features.row(static_cast<std::size_t>(train_ids[sample[i]])), views[v].columns);
                    std::copy(row.begin(), row.end(), x.row(i).begin());
                    y.push_back(train_labels[sample[i]]);
                }
                BaselineConfig cfg;
                cfg.seed = opts.seed + run;
                const auto model = train_baseline(x, y, ds.num_classes, cfg);

                for (WindowId id : plan.folds[f].test_window_ids) {
                    const auto& win = ds.windows[static_cast<std::size_t>(id)];
                    PredictionRecord r;
                    r.dataset_id = opts.dataset_id;
                    r.model_id = views[v].model_id;
                    r.config_id = kBaselineConfigId;
                    r.run_id = static_cast<int>(run);
                    r.fold_id = plan.folds[f].fold_id;
                    r.window_id = id;
                    r.true_label = win.label;
                    r.probs = predict(model, select(features.row(static_cast<std::size_t>(id)), views[v].columns));
                    records.push_back(std::move(r));
                }
            }
        }
    }
    std::sort(records.begin(), records.end(), [](const PredictionRecord& a, const PredictionRecord& b) {
        return std::tie(a.model_id, a.run_id, a.window_id) < std::tie(b.model_id, b.run_id, b.window_id);
    });
    return records;
}

Audit run_audit(const WindowedDataset& ds, std::span<const PredictionRecord> records, MergePolicy policy) {
    if (records.empty()) throw std::invalid_argument("prediction log is empty");
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto id = records[i].window_id;
        if (id < 0 || static_cast<std::size_t>(id) >= ds.windows.size()) {
            throw RecordError(i, "unknown window_id " + std::to_string(id));
        }
        if (records[i].true_label != ds.windows[static_cast<std::size_t>(id)].label) {
            throw RecordError(i, "label " + std::to_string(records[i].true_label) + " differs from window label " +
                                     std::to_string(ds.windows[static_cast<std::size_t>(id)].label));
        }
    }

    Audit a;
    a.policy = policy;
    a.selection = best_hyperparams(records);
    a.records = filter_to_configs(records, a.selection);
    a.consolidated = merge_all_models(a.records, policy);

    std::vector<WindowId> window_ids;
    std::vector<ClassId> labels;
    for (const auto& w : ds.windows) {
        window_ids.push_back(w.window_id);
        labels.push_back(w.label);
    }
    const auto matrix = build_matrix(a.consolidated, std::span<const WindowId>(window_ids));
    a.ifc = compute_ifc(matrix);
    a.ifc.policy = policy;

    std::vector<WindowId> ifc_windows;
    for (std::size_t w = 0; w < window_ids.size(); ++w) {
        if (a.ifc.ifc_flags[w]) ifc_windows.push_back(window_ids[w]);
    }
    a.fused = fuse_probabilities(a.records, ifc_windows);
    a.confusion = confusion_table(a.ifc.ifc_flags, labels, ds.num_classes);
    a.edges = chord_edges(a.fused);
    const auto breaks = recording_breaks(ds);
    a.histogram = run_lengths(a.ifc.ifc_flags, std::span<const std::size_t>(breaks));
    a.mask = build_mask(a.ifc.ifc_flags, a.fused, ds);
    a.scores = score_models(a.records, ds.num_classes);
    return a;
}

Matrix window_means(const WindowedDataset& ds) {
    const std::size_t channels = ds.windows.empty() ? 0 : ds.windows.front().block.cols();
    Matrix out(ds.windows.size(), channels);
    for (std::size_t w = 0; w < ds.windows.size(); ++w) {
        const auto& block = ds.windows[w].block;
        for (std::size_t c = 0; c < channels; ++c) {
            double sum = 0.0;
            for (std::size_t r = 0; r < block.rows(); ++r) sum += block(r, c);
            out(w, c) = sum / static_cast<double>(block.rows());
        }
    }
    return out;
}

}  // namespace har_audit::cli
