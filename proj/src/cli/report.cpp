#include "har_audit/cli/report.hpp"

#include <cmath>

namespace har_audit::cli {

ordered_json ifc_summary_json(const Audit& audit, const std::string& dataset_id) {
    ordered_json doc;
    doc["dataset"] = dataset_id;
    doc["policy"] = to_string(audit.policy);
    doc["num_windows"] = audit.ifc.num_windows;
    doc["ifc_windows"] = audit.ifc.ifc_windows;
    doc["models"] = ordered_json::array();
    for (std::size_t m = 0; m < audit.ifc.model_ids.size(); ++m) {
        const auto& id = audit.ifc.model_ids[m];
        ordered_json row;
        row["model"] = id;
        const auto sel = audit.selection.find({dataset_id, id});
        row["config"] = sel != audit.selection.end() ? sel->second : "";
        row["single_contribution_pct"] = audit.ifc.single_contribution[m];
        doc["models"].push_back(row);
    }
    doc["common_ground_pct"] = audit.ifc.common_ground;
    doc["ifc_pct"] = audit.ifc.ifc;
    return doc;
}

ordered_json mask_summary_json(const Audit& audit, std::size_t num_classes) {
    ordered_json doc;
    doc["clean_pct"] = audit.mask.distribution.clean_pct;
    doc["minor_pct"] = audit.mask.distribution.minor_pct;
    doc["major_pct"] = audit.mask.distribution.major_pct;
    doc["policy"] = to_string(audit.policy);
    // With two classes there is a single gap, so every IFC window is major.
    doc["binary_degenerate"] = num_classes == 2;
    return doc;
}

ordered_json build_report(const Audit& audit, const WindowedDataset& ds, std::span<const std::string> class_names,
                          const std::string& dataset_id) {
    ordered_json doc;
    doc["dataset"] = dataset_id;
    doc["policy"] = to_string(audit.policy);
    doc["num_windows"] = ds.windows.size();
    doc["num_classes"] = ds.num_classes;
    doc["ifc"] = ifc_summary_json(audit, dataset_id);
    doc["mask"] = mask_summary_json(audit, ds.num_classes);

    doc["confusion"] = ordered_json::array();
    for (const auto& row : audit.confusion) {
        ordered_json r;
        r["class_id"] = row.class_id;
        r["name"] = class_names[static_cast<std::size_t>(row.class_id)];
        r["windows"] = row.windows;
        r["ifc_windows"] = row.ifc_windows;
        r["dist_pct"] = row.distribution_pct;
        r["rel_pct"] = row.relative_confusion_pct ? ordered_json(*row.relative_confusion_pct) : ordered_json(nullptr);
        r["abs_pct"] = row.absolute_confusion_pct ? ordered_json(*row.absolute_confusion_pct) : ordered_json(nullptr);
        doc["confusion"].push_back(r);
    }

    std::size_t agrees = 0;
    for (const auto& f : audit.fused) agrees += f.fused_agrees_with_truth ? 1 : 0;
    doc["fused_agrees_with_truth"] = agrees;

    doc["scores"] = ordered_json::array();
    for (const auto& [model, s] : audit.scores) {
        ordered_json r;
        r["model"] = model;
        r["runs"] = s.runs;
        r["accuracy_mean_pct"] = s.accuracy_pct.mean;
        r["accuracy_std_pct"] = s.accuracy_pct.std;
        r["weighted_f1_mean_pct"] = s.weighted_f1_pct.mean;
        r["weighted_f1_std_pct"] = s.weighted_f1_pct.std;
        doc["scores"].push_back(r);
    }
    return doc;
}

namespace {

void expect_number(const nlohmann::json& obj, const std::string& key, const std::string& where,
                   std::vector<std::string>& errors, bool nullable = false) {
    if (!obj.contains(key)) {
        errors.push_back(where + ": missing '" + key + "'");
    } else if (!(obj[key].is_number() || (nullable && obj[key].is_null()))) {
        errors.push_back(where + ": '" + key + "' must be a number");
    } else if (obj[key].is_number() && !std::isfinite(obj[key].get<double>())) {
        errors.push_back(where + ": '" + key + "' is not finite");
    }
}

void expect_string(const nlohmann::json& obj, const std::string& key, const std::string& where,
                   std::vector<std::string>& errors) {
    if (!obj.contains(key) || !obj[key].is_string()) errors.push_back(where + ": '" + key + "' must be a string");
}

void expect_array(const nlohmann::json& obj, const std::string& key, const std::string& where,
                  std::vector<std::string>& errors) {
    if (!obj.contains(key) || !obj[key].is_array()) errors.push_back(where + ": '" + key + "' must be an array");
}

}  // namespace

std::vector<std::string> validate_report(const nlohmann::json& doc) {
    std::vector<std::string> errors;
    if (!doc.is_object()) return {"report must be a JSON object"};
    expect_string(doc, "dataset", "report", errors);
    expect_string(doc, "policy", "report", errors);
    expect_number(doc, "num_windows", "report", errors);
    expect_number(doc, "num_classes", "report", errors);
    expect_number(doc, "fused_agrees_with_truth", "report", errors);

    if (!doc.contains("ifc") || !doc["ifc"].is_object()) {
        errors.push_back("report: 'ifc' must be an object");
    } else {
        const auto& ifc = doc["ifc"];
        expect_number(ifc, "common_ground_pct", "ifc", errors);
        expect_number(ifc, "ifc_pct", "ifc", errors);
        expect_number(ifc, "num_windows", "ifc", errors);
        expect_number(ifc, "ifc_windows", "ifc", errors);
        expect_array(ifc, "models", "ifc", errors);
        if (ifc.contains("models") && ifc["models"].is_array()) {
            double total = ifc.value("common_ground_pct", 0.0) + ifc.value("ifc_pct", 0.0);
            for (const auto& m : ifc["models"]) {
                expect_string(m, "model", "ifc.models", errors);
                expect_number(m, "single_contribution_pct", "ifc.models", errors);
                if (m.contains("single_contribution_pct") && m["single_contribution_pct"].is_number()) {
                    total += m["single_contribution_pct"].get<double>();
                }
            }
            if (errors.empty() && std::abs(total - 100.0) > 1e-9) errors.push_back("ifc: percentages do not sum to 100");
        }
    }

    if (!doc.contains("mask") || !doc["mask"].is_object()) {
        errors.push_back("report: 'mask' must be an object");
    } else {
        for (const char* key : {"clean_pct", "minor_pct", "major_pct"}) expect_number(doc["mask"], key, "mask", errors);
        expect_string(doc["mask"], "policy", "mask", errors);
    }

    expect_array(doc, "confusion", "report", errors);
    if (doc.contains("confusion") && doc["confusion"].is_array()) {
        for (const auto& row : doc["confusion"]) {
            expect_number(row, "class_id", "confusion", errors);
            expect_string(row, "name", "confusion", errors);
            expect_number(row, "dist_pct", "confusion", errors);
            expect_number(row, "rel_pct", "confusion", errors, true);
            expect_number(row, "abs_pct", "confusion", errors, true);
        }
    }

    expect_array(doc, "scores", "report", errors);
    if (doc.contains("scores") && doc["scores"].is_array()) {
        for (const auto& row : doc["scores"]) {
            expect_string(row, "model", "scores", errors);
            for (const char* key : {"runs", "accuracy_mean_pct", "accuracy_std_pct", "weighted_f1_mean_pct",
                                    "weighted_f1_std_pct"}) {
                expect_number(row, key, "scores", errors);
            }
        }
    }
    return errors;
}

}  // namespace har_audit::cli
