#include "har_audit/mask.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <stdexcept>

#include "har_audit/format.hpp"
#include "har_audit/ifc.hpp"

namespace har_audit {

MaskCategory categorize(std::span<const double> mean_probs, bool is_ifc) {
    if (mean_probs.size() < 2) throw std::invalid_argument("mask categorization needs at least two classes");
    if (!is_ifc) return MaskCategory::clean;

    std::vector<double> sorted(mean_probs.begin(), mean_probs.end());
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    double max_gap = sorted[0] - sorted[1];
    for (std::size_t i = 1; i + 1 < sorted.size(); ++i) max_gap = std::max(max_gap, sorted[i] - sorted[i + 1]);
    const double first_gap = sorted[0] - sorted[1];
    return first_gap >= max_gap - kGapTieTolerance ? MaskCategory::major : MaskCategory::minor;
}

MaskDistribution mask_distribution(std::span<const MaskWindow> windows) {
    if (windows.empty()) throw std::invalid_argument("mask has no windows");
    std::size_t counts[3] = {0, 0, 0};
    for (const auto& w : windows) ++counts[static_cast<int>(w.category)];
    const auto total = static_cast<double>(windows.size());
    return {100.0 * static_cast<double>(counts[0]) / total, 100.0 * static_cast<double>(counts[1]) / total,
            100.0 * static_cast<double>(counts[2]) / total};
}

MaskSequence build_mask(const std::vector<bool>& ifc_flags, std::span<const FusedDistribution> fused,
                        const WindowedDataset& ds) {
    if (ifc_flags.size() != ds.windows.size()) throw std::invalid_argument("IFC flags do not match the window count");
    std::map<WindowId, const FusedDistribution*> by_window;
    for (const auto& f : fused) by_window[f.window_id] = &f;

    MaskSequence mask;
    std::vector<int> severity;
    for (std::size_t w = 0; w < ds.windows.size(); ++w) {
        const auto& win = ds.windows[w];
        MaskCategory cat = MaskCategory::clean;
        if (ifc_flags[w]) {
            const auto it = by_window.find(win.window_id);
            if (it == by_window.end()) {
                throw std::invalid_argument("IFC window " + std::to_string(win.window_id) + " has no fused distribution");
            }
            cat = categorize(it->second->mean_probs, true);
        }
        mask.window_mask.push_back({win.window_id, win.start_sample, win.end_sample, cat});
        severity.push_back(static_cast<int>(cat));
    }
    for (int s : merge_max_to_samples(severity, ds)) mask.sample_mask.push_back(static_cast<MaskCategory>(s));
    mask.distribution = mask_distribution(mask.window_mask);
    return mask;
}

void write_window_mask_csv(std::ostream& out, const MaskSequence& mask) {
    out << "window_id,start_sample,end_sample,category\n";
    for (const auto& w : mask.window_mask) {
        out << w.window_id << ',' << w.start_sample << ',' << w.end_sample << ',' << static_cast<int>(w.category) << '\n';
    }
}

void write_sample_mask_csv(std::ostream& out, const MaskSequence& mask) {
    out << "sample_index,category\n";
    for (std::size_t s = 0; s < mask.sample_mask.size(); ++s) out << s << ',' << static_cast<int>(mask.sample_mask[s]) << '\n';
}

namespace {

MaskCategory parse_category(std::string_view cell, std::size_t line) {
    const auto v = parse_int(cell);
    if (!v || *v < 0 || *v > 2) throw ParseError(line, "mask category must be 0, 1 or 2");
    return static_cast<MaskCategory>(*v);
}

std::vector<std::vector<std::string>> read_table(std::istream& in, const std::string& expected_header) {
    std::string line;
    if (!std::getline(in, line) || std::string(trim(line)) != expected_header) {
        throw ParseError(1, "expected header '" + expected_header + "'");
    }
    const auto width = split_csv_line(expected_header).size();
    std::vector<std::vector<std::string>> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto cells = split_csv_line(line);
        if (cells.size() != width) throw ParseError(line_no, "expected " + std::to_string(width) + " cells");
        rows.push_back(std::move(cells));
    }
    return rows;
}

std::size_t parse_index(std::string_view cell, std::size_t line) {
    const auto v = parse_int(cell);
    if (!v || *v < 0) throw ParseError(line, "expected a non-negative integer");
    return static_cast<std::size_t>(*v);
}

}  // namespace

MaskSequence read_mask_csv(std::istream& window_csv, std::istream& sample_csv) {
    MaskSequence mask;
    const auto windows = read_table(window_csv, "window_id,start_sample,end_sample,category");
    for (std::size_t i = 0; i < windows.size(); ++i) {
        const auto& row = windows[i];
        const std::size_t line = i + 2;
        mask.window_mask.push_back({static_cast<WindowId>(parse_index(row[0], line)), parse_index(row[1], line),
                                    parse_index(row[2], line), parse_category(row[3], line)});
    }
    const auto samples = read_table(sample_csv, "sample_index,category");
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (parse_index(samples[i][0], i + 2) != i) throw ParseError(i + 2, "sample indices must be dense and ordered");
        mask.sample_mask.push_back(parse_category(samples[i][1], i + 2));
    }
    if (!mask.window_mask.empty()) mask.distribution = mask_distribution(mask.window_mask);
    return mask;
}

}  // namespace har_audit
