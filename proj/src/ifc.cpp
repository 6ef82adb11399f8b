#include "har_audit/ifc.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace har_audit {

CorrectnessMatrix::CorrectnessMatrix(std::vector<std::string> model_ids, std::vector<WindowId> window_ids)
    : model_ids_(std::move(model_ids)),
      window_ids_(std::move(window_ids)),
      cells_(model_ids_.size() * window_ids_.size(), 0) {}

std::vector<std::size_t> CorrectnessMatrix::correct_counts() const {
    std::vector<std::size_t> counts(num_windows(), 0);
    for (std::size_t m = 0; m < num_models(); ++m) {
        for (std::size_t w = 0; w < num_windows(); ++w) counts[w] += (*this)(m, w) ? 1 : 0;
    }
    return counts;
}

CorrectnessMatrix CorrectnessMatrix::with_row(const std::string& model_id, const std::vector<bool>& row) const {
    if (row.size() != num_windows()) throw std::invalid_argument("row length differs from window count");
    auto ids = model_ids_;
    ids.push_back(model_id);
    CorrectnessMatrix out(std::move(ids), window_ids_);
    std::copy(cells_.begin(), cells_.end(), out.cells_.begin());
    for (std::size_t w = 0; w < row.size(); ++w) out.set(num_models(), w, row[w]);
    return out;
}

CorrectnessMatrix build_matrix(std::span<const ConsolidatedCorrectness> models,
                               std::optional<std::span<const WindowId>> window_order) {
    if (models.empty()) throw std::invalid_argument("correctness matrix needs at least one model");
    std::vector<WindowId> windows;
    if (window_order) {
        windows.assign(window_order->begin(), window_order->end());
    } else {
        for (const auto& [w, ok] : models.front().correct) windows.push_back(w);
    }
    std::vector<std::string> ids;
    for (const auto& m : models) ids.push_back(m.model_id);

    CorrectnessMatrix matrix(std::move(ids), windows);
    for (std::size_t m = 0; m < models.size(); ++m) {
        const auto& cells = models[m].correct;
        if (!window_order && cells.size() != windows.size()) {
            throw std::invalid_argument("model '" + models[m].model_id + "' covers " + std::to_string(cells.size()) +
                                        " windows, expected " + std::to_string(windows.size()));
        }
        for (std::size_t w = 0; w < windows.size(); ++w) {
            const auto it = cells.find(windows[w]);
            if (it == cells.end()) {
                throw std::invalid_argument("missing correctness for model '" + models[m].model_id + "' window " +
                                            std::to_string(windows[w]));
            }
            matrix.set(m, w, it->second);
        }
    }
    return matrix;
}

namespace {

double percent(std::size_t count, std::size_t total) {
    return 100.0 * static_cast<double>(count) / static_cast<double>(total);
}

void require_non_empty(const CorrectnessMatrix& m) {
    if (m.num_models() == 0 || m.num_windows() == 0) throw std::invalid_argument("correctness matrix is empty");
}

}  // namespace

std::vector<double> single_contributions(const CorrectnessMatrix& m) {
    require_non_empty(m);
    const auto counts = m.correct_counts();
    std::vector<std::size_t> singles(m.num_models(), 0);
    for (std::size_t w = 0; w < m.num_windows(); ++w) {
        if (counts[w] != 1) continue;
        for (std::size_t k = 0; k < m.num_models(); ++k) {
            if (m(k, w)) {
                ++singles[k];
                break;
            }
        }
    }
    std::vector<double> out;
    for (std::size_t s : singles) out.push_back(percent(s, m.num_windows()));
    return out;
}

double common_ground(const CorrectnessMatrix& m) {
    require_non_empty(m);
    const auto counts = m.correct_counts();
    const auto shared = std::count_if(counts.begin(), counts.end(), [](std::size_t c) { return c >= 2; });
    return percent(static_cast<std::size_t>(shared), m.num_windows());
}

IfcSummary compute_ifc(const CorrectnessMatrix& m) {
    require_non_empty(m);
    IfcSummary s;
    s.model_ids = m.model_ids();
    s.window_ids = m.window_ids();
    s.num_windows = m.num_windows();
    s.single_contribution = single_contributions(m);
    s.common_ground = common_ground(m);

    const auto counts = m.correct_counts();
    s.ifc_flags.resize(m.num_windows());
    for (std::size_t w = 0; w < counts.size(); ++w) {
        s.ifc_flags[w] = counts[w] == 0;
        s.ifc_windows += counts[w] == 0 ? 1 : 0;
    }
    s.ifc = percent(s.ifc_windows, m.num_windows());

    double closure = 100.0 - s.common_ground;
    for (double c : s.single_contribution) closure -= c;
    if (std::abs(closure - s.ifc) > kClosureTolerance) {
        throw ConsistencyError("IFC routes disagree: direct " + std::to_string(s.ifc) + " vs closure " +
                               std::to_string(closure));
    }
    return s;
}

std::vector<int> merge_max_to_samples(std::span<const int> window_values, const WindowedDataset& ds) {
    if (window_values.size() != ds.windows.size()) {
        throw std::invalid_argument("got " + std::to_string(window_values.size()) + " window values for " +
                                    std::to_string(ds.windows.size()) + " windows");
    }
    std::vector<int> samples(ds.total_samples, 0);
    for (std::size_t w = 0; w < ds.windows.size(); ++w) {
        const auto& win = ds.windows[w];
        for (std::size_t s = win.start_sample; s < win.end_sample; ++s) samples[s] = std::max(samples[s], window_values[w]);
    }
    return samples;
}

std::vector<bool> merge_flags_to_samples(const std::vector<bool>& window_flags, const WindowedDataset& ds) {
    std::vector<int> values(window_flags.begin(), window_flags.end());
    const auto merged = merge_max_to_samples(values, ds);
    return std::vector<bool>(merged.begin(), merged.end());
}

RunLengthHistogram run_lengths(const std::vector<bool>& flags, std::optional<std::span<const std::size_t>> breaks) {
    if (breaks && breaks->size() != flags.size()) throw std::invalid_argument("breaks length differs from flags length");
    RunLengthHistogram h;
    std::optional<Segment> open;
    for (std::size_t i = 0; i < flags.size(); ++i) {
        const bool boundary = breaks && i > 0 && (*breaks)[i] != (*breaks)[i - 1];
        if (open && (!flags[i] || boundary)) {
            h.segments.push_back(*open);
            open.reset();
        }
        if (flags[i]) {
            if (open) {
                ++open->length;
            } else {
                open = Segment{i, 1};
            }
        }
    }
    if (open) h.segments.push_back(*open);

    std::size_t longest = 0;
    for (const auto& seg : h.segments) longest = std::max(longest, seg.length);
    if (longest == 0) return h;
    // Bin b holds lengths [2^b, 2^(b+1) - 1].
    const auto num_bins = static_cast<std::size_t>(std::bit_width(longest));
    for (std::size_t b = 0; b < num_bins; ++b) {
        h.bins.push_back({std::size_t{1} << b, (std::size_t{1} << (b + 1)) - 1, 0});
    }
    for (const auto& seg : h.segments) ++h.bins[static_cast<std::size_t>(std::bit_width(seg.length)) - 1].count;
    return h;
}

std::vector<std::size_t> recording_breaks(const WindowedDataset& ds) {
    std::vector<std::size_t> out;
    out.reserve(ds.windows.size());
    for (const auto& w : ds.windows) out.push_back(w.recording);
    return out;
}

}  // namespace har_audit
