#include "har_audit/cli/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace har_audit::cli {

namespace {

std::vector<fs::path> as_paths(const nlohmann::json& value) {
    std::vector<fs::path> out;
    if (value.is_string()) {
        out.emplace_back(value.get<std::string>());
    } else {
        for (const auto& v : value) out.emplace_back(v.get<std::string>());
    }
    return out;
}

}  // namespace

void apply_config_file(AuditConfig& cfg, const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file " + path.string());
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument("config file " + path.string() + " is not valid JSON: " + e.what());
    }
    static const std::vector<std::string> known = {"recordings", "logs",         "out",      "window_size", "stride",
                                                   "label_policy", "split_unit", "max_k",    "merge_policy", "scenario",
                                                   "seed",         "dataset",    "runs",     "sample_rate"};
    for (const auto& [key, value] : doc.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            throw std::invalid_argument("config file " + path.string() + ": unknown key '" + key + "'");
        }
    }
    if (doc.contains("recordings")) cfg.recordings = as_paths(doc["recordings"]);
    if (doc.contains("logs")) cfg.logs = as_paths(doc["logs"]);
    if (doc.contains("out")) cfg.out = doc["out"].get<std::string>();
    if (doc.contains("window_size")) cfg.window.size = doc["window_size"].get<std::size_t>();
    if (doc.contains("stride")) cfg.window.stride = doc["stride"].get<std::size_t>();
    if (doc.contains("label_policy")) cfg.window.label_policy = parse_label_policy(doc["label_policy"].get<std::string>());
    if (doc.contains("split_unit")) cfg.window.group_unit = parse_group_unit(doc["split_unit"].get<std::string>());
    if (doc.contains("max_k")) cfg.max_k = doc["max_k"].get<std::size_t>();
    if (doc.contains("merge_policy")) cfg.merge_policy = parse_merge_policy(doc["merge_policy"].get<std::string>());
    if (doc.contains("scenario")) cfg.scenario = fs::path(doc["scenario"].get<std::string>());
    if (doc.contains("seed")) cfg.seed = doc["seed"].get<std::uint64_t>();
    if (doc.contains("dataset")) cfg.dataset_id = doc["dataset"].get<std::string>();
    if (doc.contains("runs")) cfg.runs = doc["runs"].get<std::size_t>();
    if (doc.contains("sample_rate")) cfg.sample_rate = doc["sample_rate"].get<double>();
}

void finalize_config(AuditConfig& cfg) {
    if (cfg.out.empty()) {
        if (const char* env = std::getenv("HAR_AUDIT_OUT"); env != nullptr && *env != '\0') cfg.out = env;
    }
    if (cfg.out.empty()) throw std::invalid_argument("no output directory: pass --out or set HAR_AUDIT_OUT");
    for (const auto& p : cfg.recordings) {
        if (!fs::exists(p)) throw std::invalid_argument("recording file not found: " + p.string());
    }
    for (const auto& p : cfg.logs) {
        if (!fs::exists(p)) throw std::invalid_argument("prediction log not found: " + p.string());
    }
    if (cfg.scenario && !fs::exists(*cfg.scenario)) {
        throw std::invalid_argument("scenario file not found: " + cfg.scenario->string());
    }
    cfg.window.validate();
    if (cfg.max_k < 2) throw std::invalid_argument("--max-k must be at least 2");
    if (cfg.runs < 1) throw std::invalid_argument("runs must be at least 1");
    if (!(cfg.sample_rate > 0.0)) throw std::invalid_argument("sample rate must be positive");
}

}  // namespace har_audit::cli
