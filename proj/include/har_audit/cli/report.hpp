#pragma once

#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "har_audit/cli/pipeline.hpp"

namespace har_audit::cli {

using ordered_json = nlohmann::ordered_json;

/// Per-model single contributions, common ground and IFC for one dataset.
ordered_json ifc_summary_json(const Audit& audit, const std::string& dataset_id);

/// {clean_pct, minor_pct, major_pct, policy}.
ordered_json mask_summary_json(const Audit& audit, std::size_t num_classes);

/// IFC summary, mask distribution, confusion table and model scores in one
/// document.
ordered_json build_report(const Audit& audit, const WindowedDataset& ds, std::span<const std::string> class_names,
                          const std::string& dataset_id);

/// Structural check of a report document. Returns one message per
/// problem; empty means valid.
std::vector<std::string> validate_report(const nlohmann::json& doc);

}  // namespace har_audit::cli
