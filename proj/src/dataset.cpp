#include "har_audit/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>
#include <utility>

#include <json.hpp>

#include "har_audit/format.hpp"

namespace har_audit {

using json = nlohmann::json;

ParseError::ParseError(std::size_t line, const std::string& what)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

namespace {

constexpr double kFlatChannelStd = 1e-9;

struct PendingRecording {
    std::string subject_id;
    std::string session_id;
    std::vector<ClassId> labels;
    std::vector<std::vector<std::optional<double>>> rows;
    std::vector<std::size_t> line_numbers;
};

// Forward fill, then backward fill for the leading gap. Returns the number
// of cells filled; throws if a channel has no value at all.
std::size_t repair_channel(PendingRecording& rec, std::size_t channel, const std::string& channel_name) {
    std::size_t repaired = 0;
    std::optional<double> last;
    for (auto& row : rec.rows) {
        if (row[channel]) {
            last = row[channel];
        } else if (last) {
            row[channel] = last;
            ++repaired;
        }
    }
    if (!last) {
        throw ParseError(rec.line_numbers.front(),
                         "channel '" + channel_name + "' has no numeric value for subject '" + rec.subject_id +
                             "' session '" + rec.session_id + "'");
    }
    std::optional<double> next;
    for (auto it = rec.rows.rbegin(); it != rec.rows.rend(); ++it) {
        auto& cell = (*it)[channel];
        if (cell) {
            next = cell;
        } else {
            cell = next;
            ++repaired;
        }
    }
    return repaired;
}

std::size_t total_samples(std::span<const SensorRecording> recs) {
    std::size_t n = 0;
    for (const auto& r : recs) n += r.num_samples();
    return n;
}

}  // namespace

ParsedRecordings parse_canonical_recording(std::istream& in, const RecordingParseOptions& opts) {
    std::string line;
    if (!std::getline(in, line) || trim(line).empty()) throw ParseError(1, "empty file: missing header");

    auto header = split_csv_line(line);
    for (auto& cell : header) cell = std::string(trim(cell));
    if (header.size() < 4 || header[0] != "subject_id" || header[1] != "session_id" || header[2] != "label") {
        throw ParseError(1, "malformed header: expected subject_id,session_id,label,<channel>...");
    }
    std::vector<std::string> channel_names(header.begin() + 3, header.end());
    for (const auto& name : channel_names) {
        if (name.empty()) throw ParseError(1, "malformed header: empty channel name");
    }
    const std::size_t num_channels = channel_names.size();

    std::vector<PendingRecording> pending;
    std::map<std::pair<std::string, std::string>, std::size_t> index;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != header.size()) {
            throw ParseError(line_no, "expected " + std::to_string(header.size()) + " cells, found " +
                                          std::to_string(cells.size()));
        }
        const auto label = parse_int(cells[2]);
        if (!label || *label < 0) throw ParseError(line_no, "label must be a non-negative integer");

        std::vector<std::optional<double>> values(num_channels);
        for (std::size_t c = 0; c < num_channels; ++c) {
            const auto cell = trim(cells[3 + c]);
            if (cell.empty()) continue;
            values[c] = parse_double(cell);
            if (!values[c]) {
                throw ParseError(line_no, "non-numeric value '" + std::string(cell) + "' in channel '" +
                                              channel_names[c] + "'");
            }
        }

        auto key = std::make_pair(std::string(trim(cells[0])), std::string(trim(cells[1])));
        auto [it, inserted] = index.try_emplace(key, pending.size());
        if (inserted) pending.push_back({key.first, key.second, {}, {}, {}});
        auto& rec = pending[it->second];
        rec.labels.push_back(static_cast<ClassId>(*label));
        rec.rows.push_back(std::move(values));
        rec.line_numbers.push_back(line_no);
    }
    if (pending.empty()) throw ParseError(0, "empty file: no data rows");

    ParsedRecordings out;
    for (auto& p : pending) {
        for (std::size_t c = 0; c < num_channels; ++c) out.repair_count += repair_channel(p, c, channel_names[c]);
        SensorRecording rec;
        rec.channels = Matrix(p.rows.size(), num_channels);
        for (std::size_t r = 0; r < p.rows.size(); ++r) {
            for (std::size_t c = 0; c < num_channels; ++c) rec.channels(r, c) = *p.rows[r][c];
        }
        rec.sample_rate = opts.sample_rate;
        rec.labels = std::move(p.labels);
        rec.subject_id = std::move(p.subject_id);
        rec.session_id = std::move(p.session_id);
        rec.channel_names = channel_names;
        out.recordings.push_back(std::move(rec));
    }
    return out;
}

void write_canonical_recording(std::ostream& out, std::span<const SensorRecording> recordings) {
    if (recordings.empty()) throw std::invalid_argument("no recordings to write");
    const auto& names = recordings.front().channel_names;
    out << "subject_id,session_id,label";
    for (const auto& n : names) out << ',' << n;
    out << '\n';
    for (const auto& rec : recordings) {
        if (rec.channel_names != names) throw std::invalid_argument("recordings disagree on channel names");
        for (std::size_t r = 0; r < rec.num_samples(); ++r) {
            out << rec.subject_id << ',' << rec.session_id << ',' << rec.labels[r];
            for (double v : rec.channels.row(r)) out << ',' << format_double(v);
            out << '\n';
        }
    }
}

std::vector<ClassId> densify_labels(std::span<SensorRecording> recordings) {
    std::set<ClassId> seen;
    for (const auto& rec : recordings) seen.insert(rec.labels.begin(), rec.labels.end());
    std::vector<ClassId> original(seen.begin(), seen.end());
    std::unordered_map<ClassId, ClassId> dense;
    for (std::size_t i = 0; i < original.size(); ++i) dense[original[i]] = static_cast<ClassId>(i);
    for (auto& rec : recordings) {
        for (auto& l : rec.labels) l = dense.at(l);
    }
    return original;
}

LabelPolicy parse_label_policy(const std::string& name) {
    if (name == "majority") return LabelPolicy::majority;
    if (name == "last_sample") return LabelPolicy::last_sample;
    if (name == "strict_uniform") return LabelPolicy::strict_uniform;
    throw std::invalid_argument("unknown label policy '" + name + "'");
}

std::string to_string(LabelPolicy policy) {
    switch (policy) {
        case LabelPolicy::majority: return "majority";
        case LabelPolicy::last_sample: return "last_sample";
        case LabelPolicy::strict_uniform: return "strict_uniform";
    }
    return "majority";
}

GroupUnit parse_group_unit(const std::string& name) {
    if (name == "subject") return GroupUnit::subject;
    if (name == "subject+session" || name == "subject_session") return GroupUnit::subject_session;
    throw std::invalid_argument("unknown split unit '" + name + "'");
}

std::string to_string(GroupUnit unit) {
    return unit == GroupUnit::subject ? "subject" : "subject+session";
}

void WindowConfig::validate() const {
    if (stride < 1 || stride > size) {
        throw std::invalid_argument("window stride must satisfy 1 <= stride <= size (size " + std::to_string(size) +
                                    ", stride " + std::to_string(stride) + ")");
    }
}

WindowLabel assign_window_label(std::span<const ClassId> labels, LabelPolicy policy) {
    if (labels.empty()) throw std::invalid_argument("window label slice is empty");
    if (policy == LabelPolicy::last_sample) return {labels.back(), false};

    // std::map iterates in ascending class order, so the first maximum wins ties.
    std::map<ClassId, std::size_t> counts;
    for (ClassId l : labels) ++counts[l];
    auto best = counts.begin();
    for (auto it = counts.begin(); it != counts.end(); ++it) {
        if (it->second > best->second) best = it;
    }
    const bool transition = policy == LabelPolicy::strict_uniform && counts.size() > 1;
    return {best->first, transition};
}

std::string group_key_for(const SensorRecording& rec, GroupUnit unit) {
    return unit == GroupUnit::subject ? rec.subject_id : rec.subject_id + "/" + rec.session_id;
}

WindowedDataset slice_windows(const SensorRecording& rec, const WindowConfig& cfg) {
    return slice_windows(std::span<const SensorRecording>(&rec, 1), cfg);
}

WindowedDataset slice_windows(std::span<const SensorRecording> recs, const WindowConfig& cfg) {
    cfg.validate();
    WindowedDataset ds;
    ds.config = cfg;
    ds.total_samples = total_samples(recs);

    ClassId max_label = -1;
    std::size_t offset = 0;
    for (std::size_t r = 0; r < recs.size(); ++r) {
        const auto& rec = recs[r];
        if (rec.labels.size() != rec.num_samples()) {
            throw std::invalid_argument("recording " + std::to_string(r) + ": label track length differs from sample count");
        }
        for (ClassId l : rec.labels) max_label = std::max(max_label, l);
        ds.recording_offsets.push_back(offset);

        const std::size_t n = rec.num_samples();
        if (n < cfg.size) {
            ds.warnings.push_back("recording " + rec.subject_id + "/" + rec.session_id + " has " + std::to_string(n) +
                                  " samples, fewer than one window of " + std::to_string(cfg.size));
        } else {
            const std::size_t count = (n - cfg.size) / cfg.stride + 1;
            const std::string key = group_key_for(rec, cfg.group_unit);
            for (std::size_t w = 0; w < count; ++w) {
                const std::size_t start = w * cfg.stride;
                const auto wl = assign_window_label(
                    std::span<const ClassId>(rec.labels).subspan(start, cfg.size), cfg.label_policy);
                Window win;
                win.window_id = static_cast<WindowId>(ds.windows.size());
                win.recording = r;
                win.start_sample = offset + start;
                win.end_sample = offset + start + cfg.size;
                win.label = wl.label;
                win.transition = wl.transition;
                win.group_key = key;
                win.block = rec.channels.slice_rows(start, cfg.size);
                ds.windows.push_back(std::move(win));
            }
        }
        offset += n;
    }
    ds.num_classes = static_cast<std::size_t>(max_label + 1);
    return ds;
}

NormStats fit_normalizer(const WindowedDataset& ds, std::span<const WindowId> train_windows) {
    if (train_windows.empty()) throw std::invalid_argument("cannot fit normalizer on an empty training split");
    const auto& first = ds.windows.at(static_cast<std::size_t>(train_windows.front()));
    const std::size_t channels = first.block.cols();

    NormStats stats;
    stats.mean.assign(channels, 0.0);
    stats.std.assign(channels, 0.0);
    std::size_t n = 0;
    for (WindowId id : train_windows) {
        const auto& block = ds.windows.at(static_cast<std::size_t>(id)).block;
        for (std::size_t r = 0; r < block.rows(); ++r) {
            for (std::size_t c = 0; c < channels; ++c) stats.mean[c] += block(r, c);
        }
        n += block.rows();
    }
    for (auto& m : stats.mean) m /= static_cast<double>(n);
    for (WindowId id : train_windows) {
        const auto& block = ds.windows[static_cast<std::size_t>(id)].block;
        for (std::size_t r = 0; r < block.rows(); ++r) {
            for (std::size_t c = 0; c < channels; ++c) {
                const double d = block(r, c) - stats.mean[c];
                stats.std[c] += d * d;
            }
        }
    }
    stats.divisor.resize(channels);
    for (std::size_t c = 0; c < channels; ++c) {
        stats.std[c] = std::sqrt(stats.std[c] / static_cast<double>(n));
        stats.divisor[c] = stats.std[c] < kFlatChannelStd ? 1.0 : stats.std[c];
    }
    return stats;
}

Matrix apply_normalizer(const Matrix& block, const NormStats& stats) {
    if (block.cols() != stats.mean.size()) throw std::invalid_argument("normalizer channel count mismatch");
    Matrix out = block;
    for (std::size_t r = 0; r < out.rows(); ++r) {
        for (std::size_t c = 0; c < out.cols(); ++c) out(r, c) = (out(r, c) - stats.mean[c]) / stats.divisor[c];
    }
    return out;
}

Matrix invert_normalizer(const Matrix& block, const NormStats& stats) {
    if (block.cols() != stats.mean.size()) throw std::invalid_argument("normalizer channel count mismatch");
    Matrix out = block;
    for (std::size_t r = 0; r < out.rows(); ++r) {
        for (std::size_t c = 0; c < out.cols(); ++c) out(r, c) = out(r, c) * stats.divisor[c] + stats.mean[c];
    }
    return out;
}

WindowedDataset apply_normalizer(const WindowedDataset& ds, const NormStats& stats) {
    WindowedDataset out = ds;
    for (auto& w : out.windows) w.block = apply_normalizer(w.block, stats);
    out.norm_stats = stats;
    return out;
}

FoldPlan group_k_fold(std::span<const GroupCount> groups, std::size_t max_k) {
    if (groups.size() < 2) throw std::invalid_argument("group k-fold needs at least 2 groups, got " + std::to_string(groups.size()));
    if (max_k < 2) throw std::invalid_argument("max_k must be at least 2");
    {
        std::set<std::string> keys;
        for (const auto& g : groups) {
            if (!keys.insert(g.key).second) throw std::invalid_argument("duplicate group key '" + g.key + "'");
        }
    }

    FoldPlan plan;
    if (groups.size() <= max_k) {
        for (std::size_t i = 0; i < groups.size(); ++i) {
            plan.folds.push_back({static_cast<int>(i), {groups[i].key}, {}});
        }
        plan.k = plan.folds.size();
        return plan;
    }

    std::vector<std::size_t> order(groups.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (groups[a].windows != groups[b].windows) return groups[a].windows > groups[b].windows;
        return groups[a].key < groups[b].key;
    });

    plan.folds.resize(max_k);
    std::vector<std::size_t> load(max_k, 0);
    for (std::size_t f = 0; f < max_k; ++f) plan.folds[f].fold_id = static_cast<int>(f);
    for (std::size_t g : order) {
        const auto target = static_cast<std::size_t>(std::min_element(load.begin(), load.end()) - load.begin());
        plan.folds[target].test_group_keys.push_back(groups[g].key);
        load[target] += groups[g].windows;
    }
    plan.k = max_k;
    return plan;
}

FoldPlan plan_folds(const WindowedDataset& ds, std::size_t max_k) {
    std::vector<GroupCount> groups;
    std::unordered_map<std::string, std::size_t> pos;
    for (const auto& w : ds.windows) {
        auto [it, inserted] = pos.try_emplace(w.group_key, groups.size());
        if (inserted) groups.push_back({w.group_key, 0});
        ++groups[it->second].windows;
    }
    FoldPlan plan = group_k_fold(groups, max_k);

    std::unordered_map<std::string, std::size_t> fold_of;
    for (std::size_t f = 0; f < plan.folds.size(); ++f) {
        for (const auto& key : plan.folds[f].test_group_keys) fold_of[key] = f;
    }
    for (const auto& w : ds.windows) plan.folds[fold_of.at(w.group_key)].test_window_ids.push_back(w.window_id);
    return plan;
}

std::vector<WindowId> train_windows_for(const FoldPlan& plan, std::size_t fold_index, const WindowedDataset& ds) {
    const auto& test = plan.folds.at(fold_index).test_window_ids;
    const std::set<WindowId> held_out(test.begin(), test.end());
    std::vector<WindowId> train;
    for (const auto& w : ds.windows) {
        if (!held_out.contains(w.window_id)) train.push_back(w.window_id);
    }
    return train;
}

void write_fold_plan_json(std::ostream& out, const FoldPlan& plan) {
    json folds = json::array();
    for (const auto& f : plan.folds) {
        folds.push_back({{"fold_id", f.fold_id}, {"groups", f.test_group_keys}, {"test_windows", f.test_window_ids}});
    }
    const json doc = {{"k", plan.k}, {"folds", folds}};
    out << doc.dump(2) << '\n';
}

FoldPlan read_fold_plan_json(std::istream& in) {
    const json doc = json::parse(in);
    FoldPlan plan;
    plan.k = doc.at("k").get<std::size_t>();
    for (const auto& f : doc.at("folds")) {
        plan.folds.push_back({f.at("fold_id").get<int>(), f.at("groups").get<std::vector<std::string>>(),
                              f.at("test_windows").get<std::vector<WindowId>>()});
    }
    if (plan.folds.size() != plan.k) throw std::invalid_argument("split plan: k does not match the number of folds");
    return plan;
}

}  // namespace har_audit
