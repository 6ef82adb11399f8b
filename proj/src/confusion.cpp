#include "har_audit/confusion.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "har_audit/format.hpp"

namespace har_audit {

std::vector<FusedDistribution> fuse_probabilities(std::span<const PredictionRecord> records,
                                                  std::span<const WindowId> windows) {
    const std::set<WindowId> wanted(windows.begin(), windows.end());
    std::set<std::string> models;
    std::map<WindowId, std::vector<const PredictionRecord*>> by_window;
    std::map<WindowId, std::set<std::string>> models_of_window;
    for (const auto& r : records) {
        models.insert(r.model_id);
        if (!wanted.contains(r.window_id)) continue;
        by_window[r.window_id].push_back(&r);
        models_of_window[r.window_id].insert(r.model_id);
    }

    std::vector<FusedDistribution> out;
    for (WindowId w : wanted) {
        const auto it = by_window.find(w);
        if (it == by_window.end() || models_of_window[w] != models) {
            throw std::invalid_argument("window " + std::to_string(w) + " lacks records for some selected model");
        }
        const auto& recs = it->second;
        FusedDistribution f;
        f.window_id = w;
        f.true_label = recs.front()->true_label;
        f.mean_probs.assign(recs.front()->probs.size(), 0.0);
        for (const auto* r : recs) {
            if (r->probs.size() != f.mean_probs.size()) throw std::invalid_argument("class count differs within window");
            if (r->true_label != f.true_label) {
                throw std::invalid_argument("records disagree on the true label of window " + std::to_string(w));
            }
            for (std::size_t c = 0; c < f.mean_probs.size(); ++c) f.mean_probs[c] += r->probs[c];
        }
        for (auto& p : f.mean_probs) p /= static_cast<double>(recs.size());

        f.confused_class = static_cast<ClassId>(argmax_lowest(f.mean_probs));
        if (f.confused_class == f.true_label && f.mean_probs.size() > 1) {
            f.fused_agrees_with_truth = true;
            std::size_t best = f.true_label == 0 ? 1 : 0;
            for (std::size_t c = 0; c < f.mean_probs.size(); ++c) {
                if (static_cast<ClassId>(c) != f.true_label && f.mean_probs[c] > f.mean_probs[best]) best = c;
            }
            f.confused_class = static_cast<ClassId>(best);
        }
        out.push_back(std::move(f));
    }
    return out;
}

std::vector<ClassConfusionRow> confusion_table(const std::vector<bool>& ifc_flags, std::span<const ClassId> labels,
                                               std::size_t num_classes) {
    if (ifc_flags.size() != labels.size()) throw std::invalid_argument("confusion_table: flags and labels differ in length");
    if (labels.empty()) throw std::invalid_argument("confusion_table: no windows");
    std::vector<ClassConfusionRow> rows(num_classes);
    for (std::size_t c = 0; c < num_classes; ++c) rows[c].class_id = static_cast<ClassId>(c);
    for (std::size_t w = 0; w < labels.size(); ++w) {
        if (labels[w] < 0 || static_cast<std::size_t>(labels[w]) >= num_classes) {
            throw std::invalid_argument("confusion_table: label out of range at window " + std::to_string(w));
        }
        auto& row = rows[static_cast<std::size_t>(labels[w])];
        ++row.windows;
        row.ifc_windows += ifc_flags[w] ? 1 : 0;
    }
    const auto total = static_cast<double>(labels.size());
    for (auto& row : rows) {
        row.distribution_pct = 100.0 * static_cast<double>(row.windows) / total;
        if (row.ifc_windows == 0) continue;
        row.relative_confusion_pct = 100.0 * static_cast<double>(row.ifc_windows) / static_cast<double>(row.windows);
        row.absolute_confusion_pct = row.distribution_pct * *row.relative_confusion_pct / 100.0;
    }
    return rows;
}

std::vector<ChordEdge> chord_edges(std::span<const FusedDistribution> fused) {
    std::map<std::pair<ClassId, ClassId>, std::size_t> counts;
    for (const auto& f : fused) ++counts[{f.true_label, f.confused_class}];
    std::vector<ChordEdge> edges;
    for (const auto& [pair, n] : counts) edges.push_back({pair.first, pair.second, n});
    std::stable_sort(edges.begin(), edges.end(), [](const ChordEdge& a, const ChordEdge& b) { return a.weight > b.weight; });
    return edges;
}

std::vector<std::string> default_class_names(std::size_t num_classes) {
    std::vector<std::string> names;
    for (std::size_t c = 0; c < num_classes; ++c) names.push_back("class_" + std::to_string(c));
    return names;
}

void write_confusion_csv(std::ostream& out, std::span<const ClassConfusionRow> rows,
                         std::span<const std::string> class_names) {
    out << "class_id,name,dist_pct,rel_pct,abs_pct\n";
    for (const auto& row : rows) {
        out << row.class_id << ',' << class_names[static_cast<std::size_t>(row.class_id)] << ','
            << format_double(row.distribution_pct) << ','
            << (row.relative_confusion_pct ? format_double(*row.relative_confusion_pct) : "") << ','
            << (row.absolute_confusion_pct ? format_double(*row.absolute_confusion_pct) : "") << '\n';
    }
}

void write_chord_json(std::ostream& out, std::span<const ChordEdge> edges, std::span<const std::string> class_names) {
    nlohmann::ordered_json doc;
    doc["classes"] = std::vector<std::string>(class_names.begin(), class_names.end());
    doc["edges"] = nlohmann::ordered_json::array();
    for (const auto& e : edges) {
        nlohmann::ordered_json edge;
        edge["from"] = e.true_class;
        edge["to"] = e.confused_class;
        edge["weight"] = e.weight;
        doc["edges"].push_back(edge);
    }
    out << doc.dump(2) << '\n';
}

}  // namespace har_audit
