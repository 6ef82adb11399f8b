#include "har_audit/cli/commands.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "har_audit/cli/manifest.hpp"
#include "har_audit/cli/pipeline.hpp"
#include "har_audit/cli/plots.hpp"
#include "har_audit/cli/report.hpp"
#include "har_audit/baseline.hpp"
#include "har_audit/format.hpp"
#include "har_audit/synth.hpp"

namespace har_audit::cli {

namespace {

constexpr const char* kRecordings = "recordings.csv";
constexpr const char* kClasses = "classes.json";
constexpr const char* kWindowsMeta = "windows.json";
constexpr const char* kWindowsTable = "windows.csv";
constexpr const char* kSplit = "split.json";
constexpr const char* kPredictions = "predictions.jsonl";

std::ifstream open_input(const fs::path& path, const std::string& hint) {
    if (!fs::exists(path)) throw std::invalid_argument("missing input " + path.string() + " (" + hint + ")");
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot read " + path.string());
    return in;
}

template <typename Fn>
std::string render(Fn&& fn) {
    std::ostringstream out;
    fn(out);
    return out.str();
}

struct ClassInfo {
    std::string dataset_id;
    std::vector<std::string> names;
};

ClassInfo load_classes(const fs::path& dir) {
    auto in = open_input(dir / kClasses, "run `synth` or `ingest` first");
    const auto doc = nlohmann::json::parse(in);
    return {doc.at("dataset").get<std::string>(), doc.at("names").get<std::vector<std::string>>()};
}

std::string classes_json(const std::string& dataset_id, const std::vector<std::string>& names,
                         const std::vector<ClassId>& original) {
    ordered_json doc;
    doc["dataset"] = dataset_id;
    doc["names"] = names;
    doc["original_labels"] = original;
    return doc.dump(2) + "\n";
}

std::vector<SensorRecording> load_recordings(const AuditConfig& cfg) {
    auto in = open_input(cfg.out / kRecordings, "run `synth` or `ingest` first");
    return parse_canonical_recording(in, {cfg.sample_rate}).recordings;
}

WindowedDataset load_windows(const AuditConfig& cfg) {
    auto meta_in = open_input(cfg.out / kWindowsMeta, "run `windows` first");
    const auto meta = nlohmann::json::parse(meta_in);
    WindowConfig wc;
    wc.size = meta.at("window_size").get<std::size_t>();
    wc.stride = meta.at("stride").get<std::size_t>();
    wc.label_policy = parse_label_policy(meta.at("label_policy").get<std::string>());
    wc.group_unit = parse_group_unit(meta.at("split_unit").get<std::string>());

    const auto recs = load_recordings(cfg);
    auto ds = slice_windows(recs, wc);
    if (ds.windows.size() != meta.at("num_windows").get<std::size_t>()) {
        throw std::invalid_argument(std::string("schema mismatch: ") + kWindowsMeta + " lists " +
                                    std::to_string(meta.at("num_windows").get<std::size_t>()) +
                                    " windows but the recordings yield " + std::to_string(ds.windows.size()));
    }
    ds.num_classes = std::max(ds.num_classes, meta.at("num_classes").get<std::size_t>());
    return ds;
}

FoldPlan load_split(const AuditConfig& cfg, const WindowedDataset& ds) {
    auto in = open_input(cfg.out / kSplit, "run `split` first");
    auto plan = read_fold_plan_json(in);
    std::vector<int> seen(ds.windows.size(), 0);
    for (const auto& f : plan.folds) {
        for (WindowId id : f.test_window_ids) {
            if (id < 0 || static_cast<std::size_t>(id) >= seen.size()) {
                throw std::invalid_argument("schema mismatch: split.json references unknown window " + std::to_string(id));
            }
            ++seen[static_cast<std::size_t>(id)];
        }
    }
    for (std::size_t w = 0; w < seen.size(); ++w) {
        if (seen[w] != 1) throw std::invalid_argument("schema mismatch: window " + std::to_string(w) + " is not in exactly one fold");
    }
    return plan;
}

std::set<WindowId> window_id_set(const WindowedDataset& ds) {
    std::set<WindowId> ids;
    for (const auto& w : ds.windows) ids.insert(w.window_id);
    return ids;
}

struct AuditInputs {
    WindowedDataset ds;
    ClassInfo classes;
    Audit audit;
};

AuditInputs load_audit(const AuditConfig& cfg) {
    const fs::path log_path = cfg.out / kPredictions;
    if (!fs::exists(log_path)) {
        throw std::invalid_argument("missing prediction log " + log_path.string() +
                                    " (run `train-baseline` or `import-logs` first)");
    }
    AuditInputs in{load_windows(cfg), load_classes(cfg.out), {}};
    std::ifstream log(log_path);
    const auto records = read_records(log, {in.ds.num_classes, window_id_set(in.ds)});
    in.audit = run_audit(in.ds, records, cfg.merge_policy);
    return in;
}

std::string resolved_dataset(const AuditConfig& cfg, const std::string& fallback) {
    return cfg.dataset_id.empty() ? fallback : cfg.dataset_id;
}

// ---------------------------------------------------------------------------

void cmd_synth(const AuditConfig& cfg, ArtifactSet& out, std::ostream& log) {
    ScenarioSpec spec = default_scenario();
    if (cfg.scenario) {
        std::ifstream in(*cfg.scenario);
        spec = read_scenario_json(in);
    }
    if (cfg.seed) spec.seed = *cfg.seed;
    const auto result = generate(spec);

    out.add("scenario.json", render([&](std::ostream& o) { write_scenario_json(o, spec); }));
    out.add(kRecordings, render([&](std::ostream& o) { write_canonical_recording(o, result.recordings); }));
    out.add("annotations.json", render([&](std::ostream& o) { write_annotations_json(o, result.annotations); }));
    std::vector<ClassId> original;
    for (std::size_t c = 0; c < spec.num_classes; ++c) original.push_back(static_cast<ClassId>(c));
    out.add(kClasses, classes_json(resolved_dataset(cfg, "synthetic"), default_class_names(spec.num_classes), original));
    log << "synth: " << result.recordings.size() << " recordings, " << result.annotations.size()
        << " injections, seed " << spec.seed << '\n';
}

void cmd_ingest(const AuditConfig& cfg, ArtifactSet& out, std::ostream& log) {
    if (cfg.recordings.empty()) throw std::invalid_argument("ingest needs --recordings <csv>...");
    std::vector<SensorRecording> all;
    std::size_t repaired = 0;
    for (const auto& path : cfg.recordings) {
        std::ifstream in(path);
        try {
            auto parsed = parse_canonical_recording(in, {cfg.sample_rate});
            repaired += parsed.repair_count;
            for (auto& r : parsed.recordings) all.push_back(std::move(r));
        } catch (const ParseError& e) {
            throw std::invalid_argument(path.string() + ": " + e.what());
        }
    }
    const auto original = densify_labels(all);
    std::vector<std::string> names;
    for (ClassId l : original) names.push_back("label_" + std::to_string(l));

    std::size_t samples = 0;
    for (const auto& r : all) samples += r.num_samples();
    ordered_json summary;
    summary["files"] = ordered_json::array();
    for (const auto& p : cfg.recordings) summary["files"].push_back(p.filename().string());
    summary["recordings"] = all.size();
    summary["samples"] = samples;
    summary["channels"] = all.front().channel_names;
    summary["repair_count"] = repaired;

    out.add(kRecordings, render([&](std::ostream& o) { write_canonical_recording(o, all); }));
    out.add(kClasses, classes_json(resolved_dataset(cfg, "dataset"), names, original));
    out.add("ingest.json", summary.dump(2) + "\n");
    log << "ingest: " << all.size() << " recordings, " << samples << " samples, " << names.size() << " classes, "
        << repaired << " repaired cells\n";
}

void cmd_windows(const AuditConfig& cfg, ArtifactSet& out, std::ostream& log) {
    const auto recs = load_recordings(cfg);
    const auto classes = load_classes(cfg.out);
    const auto ds = slice_windows(recs, cfg.window);
    for (const auto& w : ds.warnings) log << "warning: " << w << '\n';

    ordered_json meta;
    meta["window_size"] = cfg.window.size;
    meta["stride"] = cfg.window.stride;
    meta["label_policy"] = to_string(cfg.window.label_policy);
    meta["split_unit"] = to_string(cfg.window.group_unit);
    meta["num_classes"] = std::max(ds.num_classes, classes.names.size());
    meta["num_windows"] = ds.windows.size();
    meta["total_samples"] = ds.total_samples;
    meta["warnings"] = ds.warnings;
    out.add(kWindowsMeta, meta.dump(2) + "\n");

    out.add(kWindowsTable, render([&](std::ostream& o) {
        o << "window_id,recording,start_sample,end_sample,label,transition,group_key\n";
        for (const auto& w : ds.windows) {
            o << w.window_id << ',' << w.recording << ',' << w.start_sample << ',' << w.end_sample << ',' << w.label << ','
              << (w.transition ? 1 : 0) << ',' << w.group_key << '\n';
        }
    }));
    log << "windows: " << ds.windows.size() << " windows of " << cfg.window.size << " samples, stride "
        << cfg.window.stride << '\n';
}

void cmd_split(const AuditConfig& cfg, ArtifactSet& out, std::ostream& log) {
    const auto ds = load_windows(cfg);
    const auto plan = plan_folds(ds, cfg.max_k);
    out.add(kSplit, render([&](std::ostream& o) { write_fold_plan_json(o, plan); }));
    log << "split: " << plan.k << " folds\n";
}

void cmd_train_baseline(const AuditConfig& cfg, ArtifactSet& out, std::ostream& log) {
    const auto ds = load_windows(cfg);
    const auto plan = load_split(cfg, ds);
    const auto classes = load_classes(cfg.out);
    BaselinePlan opts;
    opts.dataset_id = classes.dataset_id;
    opts.runs = cfg.runs;
    opts.seed = cfg.seed.value_or(42);
    const auto records = train_baseline_predictions(ds, plan, opts);
    out.add(kPredictions, render([&](std::ostream& o) { write_records(o, records); }));

    std::set<std::string> models;
    for (const auto& r : records) models.insert(r.model_id);
    const BaselineConfig defaults;
    ordered_json meta;
    meta["config"] = kBaselineConfigId;
    meta["step_size"] = defaults.step_size;
    meta["epochs"] = defaults.epochs;
    meta["runs"] = opts.runs;
    meta["seed"] = opts.seed;
    meta["models"] = std::vector<std::string>(models.begin(), models.end());
    out.add("baseline.json", meta.dump(2) + "\n");
    log << "train-baseline: " << models.size() << " models x " << opts.runs << " runs x " << plan.k << " folds, "
        << records.size() << " records\n";
}

void cmd_import_logs(const AuditConfig& cfg, ArtifactSet& out, std::ostream& log) {
    if (cfg.logs.empty()) throw std::invalid_argument("import-logs needs --logs <jsonl>...");
    const auto ds = load_windows(cfg);
    const RecordValidation v{ds.num_classes, window_id_set(ds)};
    std::vector<PredictionRecord> all;
    for (const auto& path : cfg.logs) {
        std::ifstream in(path);
        try {
            auto recs = read_records(in, v);
            all.insert(all.end(), recs.begin(), recs.end());
        } catch (const RecordError& e) {
            throw std::invalid_argument(path.string() + ": " + e.what());
        }
    }
    validate_records(all, v);
    out.add(kPredictions, render([&](std::ostream& o) { write_records(o, all); }));
    log << "import-logs: " << all.size() << " records from " << cfg.logs.size() << " file(s)\n";
}

void cmd_ifc(const AuditConfig& cfg, ArtifactSet& out, std::ostream& log) {
    const auto in = load_audit(cfg);
    const auto& ifc = in.audit.ifc;
    out.add("ifc_windows.csv", render([&](std::ostream& o) {
        o << "window_id,start_sample,end_sample,true_label,ifc_flag\n";
        for (std::size_t w = 0; w < in.ds.windows.size(); ++w) {
            const auto& win = in.ds.windows[w];
            o << win.window_id << ',' << win.start_sample << ',' << win.end_sample << ',' << win.label << ','
              << (ifc.ifc_flags[w] ? 1 : 0) << '\n';
        }
    }));
    out.add("ifc_summary.json", ifc_summary_json(in.audit, in.classes.dataset_id).dump(2) + "\n");
    log << "ifc: " << format_double(ifc.ifc) << "% of " << ifc.num_windows << " windows, common ground "
        << format_double(ifc.common_ground) << "% (policy " << to_string(cfg.merge_policy) << ")\n";
}

void cmd_confusion(const AuditConfig& cfg, ArtifactSet& out, std::ostream& log) {
    const auto in = load_audit(cfg);
    out.add("confusion_table.csv",
            render([&](std::ostream& o) { write_confusion_csv(o, in.audit.confusion, in.classes.names); }));
    out.add("chord.json", render([&](std::ostream& o) { write_chord_json(o, in.audit.edges, in.classes.names); }));
    out.add("fused.csv", render([&](std::ostream& o) {
        o << "window_id,true_label,confused_class,fused_agrees_with_truth";
        for (std::size_t c = 0; c < in.ds.num_classes; ++c) o << ",p" << c;
        o << '\n';
        for (const auto& f : in.audit.fused) {
            o << f.window_id << ',' << f.true_label << ',' << f.confused_class << ',' << (f.fused_agrees_with_truth ? 1 : 0);
            for (double p : f.mean_probs) o << ',' << format_double(p);
            o << '\n';
        }
    }));
    log << "confusion: " << in.audit.edges.size() << " confusion edges over " << in.audit.fused.size()
        << " IFC windows\n";
}

void cmd_histogram(const AuditConfig& cfg, ArtifactSet& out, std::ostream& log) {
    const auto in = load_audit(cfg);
    const auto& h = in.audit.histogram;
    out.add("histogram.csv", render([&](std::ostream& o) {
        o << "bin_lower,bin_upper,count\n";
        for (const auto& b : h.bins) o << b.lower << ',' << b.upper << ',' << b.count << '\n';
    }));
    out.add("segments.csv", render([&](std::ostream& o) {
        o << "start_window,length\n";
        for (const auto& s : h.segments) o << s.start_window << ',' << s.length << '\n';
    }));
    log << "histogram: " << h.segments.size() << " IFC segments\n";
}

void cmd_mask(const AuditConfig& cfg, ArtifactSet& out, std::ostream& log) {
    const auto in = load_audit(cfg);
    const auto& mask = in.audit.mask;
    out.add("mask_windows.csv", render([&](std::ostream& o) { write_window_mask_csv(o, mask); }));
    out.add("mask_samples.csv", render([&](std::ostream& o) { write_sample_mask_csv(o, mask); }));
    out.add("mask_summary.json", mask_summary_json(in.audit, in.ds.num_classes).dump(2) + "\n");
    if (in.ds.num_classes == 2) log << "warning: two classes, so every IFC window is categorized major\n";
    log << "mask: clean " << format_double(mask.distribution.clean_pct) << "%, minor "
        << format_double(mask.distribution.minor_pct) << "%, major " << format_double(mask.distribution.major_pct) << "%\n";
}

void cmd_plot(const AuditConfig& cfg, ArtifactSet& out, std::ostream& log) {
    const auto in = load_audit(cfg);
    const auto means = window_means(in.ds);
    const auto recs = load_recordings(cfg);
    const auto& channel_names = recs.front().channel_names;
    out.add("condensed.csv", render([&](std::ostream& o) {
        o << "window_id,ifc_flag";
        for (const auto& n : channel_names) o << ',' << n;
        o << '\n';
        for (std::size_t w = 0; w < means.rows(); ++w) {
            o << in.ds.windows[w].window_id << ',' << (in.audit.ifc.ifc_flags[w] ? 1 : 0);
            for (double v : means.row(w)) o << ',' << format_double(v);
            o << '\n';
        }
    }));
    out.add("plot_condensed.svg", condensed_view_svg(means, in.audit.ifc.ifc_flags, channel_names));
    out.add("plot_histogram.svg", histogram_svg(in.audit.histogram));
    out.add("plot_chord.svg", chord_svg(in.audit.edges, in.classes.names));
    log << "plot: 3 SVG files\n";
}

void cmd_report(const AuditConfig& cfg, ArtifactSet& out, std::ostream& log) {
    const auto in = load_audit(cfg);
    const auto doc = build_report(in.audit, in.ds, in.classes.names, in.classes.dataset_id);
    const auto problems = validate_report(nlohmann::json::parse(doc.dump()));
    if (!problems.empty()) throw std::logic_error("report failed validation: " + problems.front());
    out.add("report.json", doc.dump(2) + "\n");
    log << "report: IFC " << format_double(in.audit.ifc.ifc) << "%, clean "
        << format_double(in.audit.mask.distribution.clean_pct) << "%\n";
}

using CommandFn = std::function<void(const AuditConfig&, ArtifactSet&, std::ostream&)>;

const std::map<std::string, CommandFn>& command_table() {
    static const std::map<std::string, CommandFn> table = {
        {"synth", cmd_synth},       {"ingest", cmd_ingest},       {"windows", cmd_windows},
        {"split", cmd_split},       {"train-baseline", cmd_train_baseline}, {"import-logs", cmd_import_logs},
        {"ifc", cmd_ifc},           {"confusion", cmd_confusion}, {"histogram", cmd_histogram},
        {"mask", cmd_mask},         {"plot", cmd_plot},           {"report", cmd_report},
    };
    return table;
}

}  // namespace

void run_command(const std::string& name, const AuditConfig& cfg, std::ostream& log) {
    const auto& table = command_table();
    const auto it = table.find(name);
    if (it == table.end()) throw std::invalid_argument("unknown command '" + name + "'");
    ArtifactSet artifacts;
    it->second(cfg, artifacts, log);
    artifacts.commit(cfg.out);
    write_manifest(cfg.out);
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Audit windowed time-series classification datasets for windows no model classifies"};
    app.require_subcommand(1, 1);
    app.fallthrough();

    std::string config_path, out_dir, merge_policy, label_policy, split_unit, scenario, dataset;
    std::size_t window_size = 200, stride = 100, max_k = 10, runs = 4;
    std::uint64_t seed = 42;
    double sample_rate = 50.0;
    std::vector<std::string> recordings, logs;

    auto* o_config = app.add_option("--config", config_path, "JSON file with audit settings")->check(CLI::ExistingFile);
    auto* o_out = app.add_option("--out", out_dir, "Run directory (default: $HAR_AUDIT_OUT)");
    auto* o_size = app.add_option("--window-size", window_size, "Samples per window (default 200)");
    auto* o_stride = app.add_option("--stride", stride, "Samples between window starts (default 100)");
    auto* o_maxk = app.add_option("--max-k", max_k, "Maximum number of folds (default 10)");
    auto* o_policy = app.add_option("--merge-policy", merge_policy, "Run merge policy: any|majority|all (default majority)")
                         ->check(CLI::IsMember({"any", "majority", "all"}));
    auto* o_seed = app.add_option("--seed", seed, "Random seed for synth and train-baseline");
    auto* o_label = app.add_option("--label-policy", label_policy, "Window label policy: majority|last_sample|strict_uniform")
                        ->check(CLI::IsMember({"majority", "last_sample", "strict_uniform"}));
    auto* o_unit = app.add_option("--split-unit", split_unit, "Group unit: subject|subject+session")
                       ->check(CLI::IsMember({"subject", "subject+session"}));
    auto* o_recs = app.add_option("--recordings", recordings, "Canonical recording CSV files (ingest)");
    auto* o_logs = app.add_option("--logs", logs, "Prediction log JSONL files (import-logs)");
    auto* o_scenario = app.add_option("--scenario", scenario, "Scenario JSON (synth)");
    auto* o_dataset = app.add_option("--dataset", dataset, "Dataset id written into classes.json");
    auto* o_runs = app.add_option("--runs", runs, "Training runs per model and fold (train-baseline, default 4)");
    auto* o_rate = app.add_option("--sample-rate", sample_rate, "Sample rate of ingested recordings in Hz");

    app.add_subcommand("ingest", "Parse canonical recording CSVs into the run directory");
    app.add_subcommand("windows", "Slice recordings into labeled sliding windows");
    app.add_subcommand("split", "Plan grouped cross-validation folds");
    app.add_subcommand("synth", "Generate a synthetic scenario with annotated ambiguities");
    app.add_subcommand("train-baseline", "Train the logistic-regression baselines per fold");
    app.add_subcommand("import-logs", "Validate and import external prediction logs");
    app.add_subcommand("ifc", "Compute single contributions, common ground and IFC");
    app.add_subcommand("confusion", "Fuse IFC probabilities; confusion table and chord data");
    app.add_subcommand("histogram", "Run lengths of continuous IFC windows");
    app.add_subcommand("mask", "Clean/minor/major mask per window and sample");
    app.add_subcommand("plot", "SVG views: condensed windows, histogram, chord");
    app.add_subcommand("report", "Bundle IFC, mask, confusion and scores into report.json");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }
    const std::string command = app.get_subcommands().front()->get_name();

    try {
        AuditConfig cfg;
        cfg.dataset_id.clear();
        if (*o_config) apply_config_file(cfg, config_path);
        if (*o_out) cfg.out = out_dir;
        if (*o_size) cfg.window.size = window_size;
        if (*o_stride) cfg.window.stride = stride;
        if (*o_maxk) cfg.max_k = max_k;
        if (*o_policy) cfg.merge_policy = parse_merge_policy(merge_policy);
        if (*o_seed) cfg.seed = seed;
        if (*o_label) cfg.window.label_policy = parse_label_policy(label_policy);
        if (*o_unit) cfg.window.group_unit = parse_group_unit(split_unit);
        if (*o_recs) cfg.recordings.assign(recordings.begin(), recordings.end());
        if (*o_logs) cfg.logs.assign(logs.begin(), logs.end());
        if (*o_scenario) cfg.scenario = fs::path(scenario);
        if (*o_dataset) cfg.dataset_id = dataset;
        if (*o_runs) cfg.runs = runs;
        if (*o_rate) cfg.sample_rate = sample_rate;
        finalize_config(cfg);
        run_command(command, cfg, out);
    } catch (const std::exception& e) {
        err << "har_audit " << command << ": error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

}  // namespace har_audit::cli
