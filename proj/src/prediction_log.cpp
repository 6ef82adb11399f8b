#include "har_audit/prediction_log.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "har_audit/format.hpp"

namespace har_audit {

using ordered_json = nlohmann::ordered_json;

RecordError::RecordError(std::size_t index, const std::string& what)
    : std::runtime_error("record " + std::to_string(index) + ": " + what), index_(index) {}

std::size_t argmax_lowest(std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("argmax of an empty vector");
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i] > values[best]) best = i;
    }
    return best;
}

bool is_correct(const PredictionRecord& record) {
    return static_cast<ClassId>(argmax_lowest(record.probs)) == record.true_label;
}

void validate_records(std::span<const PredictionRecord> records, const RecordValidation& v) {
    std::set<std::tuple<std::string, std::string, int, WindowId>> seen;
    std::map<std::string, std::size_t> classes_per_dataset;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        if (r.probs.empty()) throw RecordError(i, "empty probability vector");
        double sum = 0.0;
        for (double p : r.probs) {
            if (!std::isfinite(p) || p < 0.0) throw RecordError(i, "simplex violation: negative or non-finite probability");
            sum += p;
        }
        if (std::abs(sum - 1.0) > kSimplexTolerance) {
            throw RecordError(i, "simplex violation: probabilities sum to " + format_double(sum));
        }
        const std::size_t c = r.probs.size();
        if (v.num_classes) {
            if (c != *v.num_classes) {
                throw RecordError(i, "expected " + std::to_string(*v.num_classes) + " class probabilities, found " +
                                         std::to_string(c));
            }
        } else {
            auto [it, inserted] = classes_per_dataset.try_emplace(r.dataset_id, c);
            if (!inserted && it->second != c) {
                throw RecordError(i, "class count " + std::to_string(c) + " differs from earlier records (" +
                                         std::to_string(it->second) + ")");
            }
        }
        if (r.true_label < 0 || static_cast<std::size_t>(r.true_label) >= c) {
            throw RecordError(i, "label " + std::to_string(r.true_label) + " outside 0.." + std::to_string(c - 1));
        }
        if (v.known_windows && !v.known_windows->contains(r.window_id)) {
            throw RecordError(i, "unknown window_id " + std::to_string(r.window_id));
        }
        if (!seen.emplace(r.model_id, r.config_id, r.run_id, r.window_id).second) {
            throw RecordError(i, "duplicate record for model '" + r.model_id + "' config '" + r.config_id + "' run " +
                                     std::to_string(r.run_id) + " window " + std::to_string(r.window_id));
        }
    }
}

std::vector<PredictionRecord> read_records(std::istream& in, const RecordValidation& v) {
    std::vector<PredictionRecord> records;
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        const std::size_t index = records.size();
        try {
            const auto doc = ordered_json::parse(line);
            PredictionRecord r;
            r.dataset_id = doc.at("dataset").get<std::string>();
            r.model_id = doc.at("model").get<std::string>();
            r.config_id = doc.at("config").get<std::string>();
            r.run_id = doc.at("run").get<int>();
            r.fold_id = doc.at("fold").get<int>();
            r.window_id = doc.at("window").get<WindowId>();
            r.true_label = doc.at("label").get<ClassId>();
            r.probs = doc.at("probs").get<std::vector<double>>();
            records.push_back(std::move(r));
        } catch (const nlohmann::json::exception& e) {
            throw RecordError(index, std::string("malformed record: ") + e.what());
        }
    }
    validate_records(records, v);
    return records;
}

void write_records(std::ostream& out, std::span<const PredictionRecord> records) {
    for (const auto& r : records) {
        ordered_json doc;
        doc["dataset"] = r.dataset_id;
        doc["model"] = r.model_id;
        doc["config"] = r.config_id;
        doc["run"] = r.run_id;
        doc["fold"] = r.fold_id;
        doc["window"] = r.window_id;
        doc["label"] = r.true_label;
        doc["probs"] = r.probs;
        out << doc.dump() << '\n';
    }
}

std::map<DatasetModel, std::string> best_hyperparams(std::span<const PredictionRecord> records) {
    struct RunTally {
        std::size_t correct = 0;
        std::size_t total = 0;
        std::set<int> folds;
    };
    std::map<std::string, std::set<int>> folds_of_dataset;
    // (dataset, model) -> config -> run -> tally
    std::map<DatasetModel, std::map<std::string, std::map<int, RunTally>>> tallies;
    for (const auto& r : records) {
        folds_of_dataset[r.dataset_id].insert(r.fold_id);
        auto& t = tallies[{r.dataset_id, r.model_id}][r.config_id][r.run_id];
        t.correct += is_correct(r) ? 1 : 0;
        ++t.total;
        t.folds.insert(r.fold_id);
    }

    std::map<DatasetModel, std::string> best;
    for (const auto& [key, configs] : tallies) {
        const auto& all_folds = folds_of_dataset.at(key.first);
        std::optional<double> best_acc;
        std::string best_config;
        std::ostringstream missing;
        for (const auto& [config, runs] : configs) {
            bool complete = true;
            double acc_sum = 0.0;
            for (const auto& [run, tally] : runs) {
                acc_sum += static_cast<double>(tally.correct) / static_cast<double>(tally.total);
                if (tally.folds.size() != all_folds.size()) {
                    complete = false;
                    missing << " config '" << config << "' run " << run << " lacks folds {";
                    bool first = true;
                    for (int f : all_folds) {
                        if (tally.folds.contains(f)) continue;
                        missing << (first ? "" : ",") << f;
                        first = false;
                    }
                    missing << "};";
                }
            }
            if (!complete) continue;
            const double mean_acc = acc_sum / static_cast<double>(runs.size());
            // Configs iterate in ascending order, so strict > keeps the smallest id on ties.
            if (!best_acc || mean_acc > *best_acc) {
                best_acc = mean_acc;
                best_config = config;
            }
        }
        if (!best_acc) {
            throw std::invalid_argument("dataset '" + key.first + "' model '" + key.second +
                                        "': no config has full out-of-fold coverage;" + missing.str());
        }
        best[key] = best_config;
    }
    return best;
}

std::vector<PredictionRecord> filter_to_configs(std::span<const PredictionRecord> records,
                                                const std::map<DatasetModel, std::string>& selection) {
    std::vector<PredictionRecord> out;
    for (const auto& r : records) {
        const auto it = selection.find({r.dataset_id, r.model_id});
        if (it != selection.end() && it->second == r.config_id) out.push_back(r);
    }
    return out;
}

MergePolicy parse_merge_policy(const std::string& name) {
    if (name == "any") return MergePolicy::any;
    if (name == "majority") return MergePolicy::majority;
    if (name == "all") return MergePolicy::all;
    throw std::invalid_argument("unknown merge policy '" + name + "' (expected any|majority|all)");
}

std::string to_string(MergePolicy policy) {
    switch (policy) {
        case MergePolicy::any: return "any";
        case MergePolicy::majority: return "majority";
        case MergePolicy::all: return "all";
    }
    return "majority";
}

ConsolidatedCorrectness merge_runs(std::span<const PredictionRecord> records, MergePolicy policy) {
    if (records.empty()) throw std::invalid_argument("merge_runs needs at least one record");
    const auto& model = records.front().model_id;
    const auto& config = records.front().config_id;

    std::map<WindowId, std::map<int, bool>> by_window;
    for (const auto& r : records) {
        if (r.model_id != model) throw std::invalid_argument("merge_runs expects records of a single model");
        if (r.config_id != config) {
            throw std::invalid_argument("model '" + model + "' has records for several configs; filter to one first");
        }
        if (!by_window[r.window_id].emplace(r.run_id, is_correct(r)).second) {
            throw std::invalid_argument("model '" + model + "' has two records for run " + std::to_string(r.run_id) +
                                        " window " + std::to_string(r.window_id));
        }
    }

    ConsolidatedCorrectness out;
    out.model_id = model;
    out.policy = policy;
    out.runs = by_window.begin()->second.size();
    for (const auto& [window, runs] : by_window) {
        if (runs.size() != out.runs) {
            throw std::invalid_argument("model '" + model + "': window " + std::to_string(window) + " has " +
                                        std::to_string(runs.size()) + " runs, expected " + std::to_string(out.runs));
        }
        std::size_t hits = 0;
        for (const auto& [run, ok] : runs) hits += ok ? 1 : 0;
        bool verdict = false;
        switch (policy) {
            case MergePolicy::any: verdict = hits >= 1; break;
            case MergePolicy::majority: verdict = 2 * hits > runs.size(); break;
            case MergePolicy::all: verdict = hits == runs.size(); break;
        }
        out.correct.emplace(window, verdict);
    }
    return out;
}

std::vector<ConsolidatedCorrectness> merge_all_models(std::span<const PredictionRecord> records, MergePolicy policy) {
    std::map<std::string, std::vector<PredictionRecord>> by_model;
    for (const auto& r : records) by_model[r.model_id].push_back(r);
    std::vector<ConsolidatedCorrectness> out;
    for (const auto& [model, recs] : by_model) out.push_back(merge_runs(recs, policy));
    return out;
}

}  // namespace har_audit
