#pragma once

#include <span>
#include <string>
#include <vector>

#include "har_audit/confusion.hpp"
#include "har_audit/ifc.hpp"
#include "har_audit/matrix.hpp"

namespace har_audit::cli {

/// One point per window (window-averaged channel values) drawn as a line
/// per channel over a green (correct) / red (IFC) band per window.
std::string condensed_view_svg(const Matrix& window_means, const std::vector<bool>& ifc_flags,
                               std::span<const std::string> channel_names);

/// Bars for the power-of-two run-length bins.
std::string histogram_svg(const RunLengthHistogram& histogram);

/// Classes on a circle, one ribbon per true -> confused edge with stroke
/// width proportional to its weight.
std::string chord_svg(std::span<const ChordEdge> edges, std::span<const std::string> class_names);

}  // namespace har_audit::cli
