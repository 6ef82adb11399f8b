// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Tolerances are fixed constants below.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "har_audit/baseline.hpp"
#include "har_audit/cli/commands.hpp"
#include "har_audit/confusion.hpp"
#include "har_audit/format.hpp"
#include "har_audit/ifc.hpp"
#include "har_audit/mask.hpp"
#include "har_audit/synth.hpp"
#include "oracles.hpp"

using namespace har_audit;
namespace fs = std::filesystem;

namespace {

constexpr double kClosureTol = 1e-9;
constexpr double kPublishedTol = 0.01;       // two-decimal published percentages
constexpr double kRoundingTol = 0.005;       // product of rounded published inputs
constexpr double kGradientRelTol = 1e-6;
constexpr double kFiniteDiffStep = 1e-5;
constexpr double kClosureBudgetSeconds = 10.0;
constexpr double kPipelineBudgetSeconds = 60.0;
constexpr double kTransientIfcMin = 0.80;    // windows overlapping the transient that are IFC
constexpr double kInjectedFlaggedMin = 0.60; // injected-span windows categorized minor or major

struct Outcome {
    bool pass = true;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v, int precision = 6) {
    std::ostringstream s;
    s.precision(precision);
    s << v;
    return s.str();
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
    std::map<std::string, std::string> files;
    for (const auto& e : fs::directory_iterator(dir)) files[e.path().filename().string()] = slurp(e.path());
    return files;
}

const std::vector<oracle::BreakdownRow>& published_rows() {
    static const std::vector<oracle::BreakdownRow> rows{
        {"PAMAP2", {0.72, 1.42, 0.76, 0.96, 3.04, 0.59}, 80.77},
        {"Oppo-Loco", {0.60, 0.78, 0.78, 0.64, 1.79, 1.25}, 88.85},
        {"MM-FIT", {0.06, 0.13, 0.10, 0.05, 0.19, 0.06}, 98.97},
    };
    return rows;
}

const std::map<std::string, double>& published_ifc() {
    static const std::map<std::string, double> ifc{{"PAMAP2", 11.74}, {"Oppo-Loco", 5.31}, {"MM-FIT", 0.44}};
    return ifc;
}

// Runs the default synthetic pipeline once into `dir`.
void run_pipeline(const fs::path& dir) {
    cli::AuditConfig cfg;
    cfg.out = dir;
    std::ostringstream log;
    for (const char* c : {"synth", "windows", "split", "train-baseline", "ifc", "confusion", "histogram", "mask", "plot",
                          "report"}) {
        cli::run_command(c, cfg, log);
    }
}

struct PipelineRun {
    fs::path dir;
    double seconds = 0.0;
};

const PipelineRun& synthetic_run() {
    static const PipelineRun run = [] {
        PipelineRun r;
        r.dir = fs::temp_directory_path() / "har_audit_acceptance" / "default";
        fs::remove_all(r.dir);
        const auto t0 = Clock::now();
        run_pipeline(r.dir);
        r.seconds = seconds_since(t0);
        return r;
    }();
    return run;
}

// --- 1 --------------------------------------------------------------------
Outcome closure_property() {
    std::mt19937_64 rng(1);
    const auto t0 = Clock::now();
    double worst = 0.0;
    std::size_t mismatched = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const auto models = std::uniform_int_distribution<std::size_t>(1, 8)(rng);
        const auto windows = std::uniform_int_distribution<std::size_t>(1, 5000)(rng);
        const auto rows = oracle::random_rows(rng, models, windows);
        const auto s = compute_ifc(oracle::to_matrix(rows));
        double total = s.common_ground + s.ifc;
        for (double c : s.single_contribution) total += c;
        worst = std::max(worst, std::abs(total - 100.0));
        if (s.ifc_flags != oracle::ifc_by_counting(rows).flags) ++mismatched;
    }
    const double secs = seconds_since(t0);
    return {worst <= kClosureTol && mismatched == 0 && secs < kClosureBudgetSeconds,
            "1000 matrices, max |sum-100| = " + fmt(worst) + ", flag mismatches " + std::to_string(mismatched) +
                ", " + fmt(secs, 3) + " s (budget " + fmt(kClosureBudgetSeconds) + " s)"};
}

// --- 2 --------------------------------------------------------------------
Outcome table_reconstruction() {
    Outcome out;
    for (const auto& row : published_rows()) {
        const auto s = compute_ifc(oracle::to_matrix(oracle::realize_breakdown(row, 10000)));
        const double want = published_ifc().at(row.name);
        const bool ok = std::abs(s.ifc - want) <= kPublishedTol;
        out.pass = out.pass && ok;
        out.detail += row.name + " IFC " + fmt(s.ifc) + " (expect " + fmt(want) + ") ";
    }
    out.detail += "tol " + fmt(kPublishedTol);
    return out;
}

// --- 3 --------------------------------------------------------------------
// Gives IFC windows fused distributions so that `minor` of them fall under
// the minor rule and the rest under the major rule.
MaskSequence mask_for(const IfcSummary& s, std::size_t minor) {
    const auto ds = oracle::toy_dataset(std::vector<ClassId>(s.num_windows, 0), 2, 1, 3);
    std::vector<FusedDistribution> fused;
    std::size_t seen = 0;
    for (std::size_t w = 0; w < s.num_windows; ++w) {
        if (!s.ifc_flags[w]) continue;
        FusedDistribution f;
        f.window_id = static_cast<WindowId>(w);
        f.mean_probs = seen++ < minor ? std::vector<double>{0.25, 0.4, 0.35} : std::vector<double>{0.1, 0.7, 0.2};
        f.confused_class = 1;
        fused.push_back(f);
    }
    return build_mask(s.ifc_flags, fused, ds);
}

Outcome mask_consistency() {
    Outcome out;
    double worst = 0.0;
    for (const auto& row : published_rows()) {
        const auto s = compute_ifc(oracle::to_matrix(oracle::realize_breakdown(row, 10000)));
        const auto mask = mask_for(s, s.ifc_windows / 2);
        worst = std::max(worst, std::abs(mask.distribution.clean_pct - (100.0 - s.ifc)));
        if (row.name == "PAMAP2") {
            // Published split of the PAMAP2 IFC windows: minor 8.16, major 3.58.
            const auto split = mask_for(s, 816);
            const bool ok = std::abs(split.distribution.clean_pct - 88.26) <= kPublishedTol &&
                            std::abs(split.distribution.minor_pct - 8.16) <= kPublishedTol &&
                            std::abs(split.distribution.major_pct - 3.58) <= kPublishedTol;
            out.pass = out.pass && ok;
            out.detail += "PAMAP2 clean/minor/major " + fmt(split.distribution.clean_pct) + "/" +
                          fmt(split.distribution.minor_pct) + "/" + fmt(split.distribution.major_pct) +
                          " (expect 88.26/8.16/3.58); ";
        }
    }
    const auto synth = nlohmann::json::parse(slurp(synthetic_run().dir / "report.json"));
    worst = std::max(worst, std::abs(synth["mask"]["clean_pct"].get<double>() - (100.0 - synth["ifc"]["ifc_pct"].get<double>())));
    out.pass = out.pass && worst <= kClosureTol;
    out.detail += "max |clean-(100-IFC)| over 3 reconstructions + synthetic = " + fmt(worst);
    return out;
}

// --- 4 --------------------------------------------------------------------
Outcome mask_rules() {
    bool ok = categorize(std::vector<double>{0.7, 0.2, 0.1}, true) == MaskCategory::major &&
              categorize(std::vector<double>{0.4, 0.35, 0.25}, true) == MaskCategory::minor &&
              categorize(std::vector<double>{0.5, 0.3, 0.2}, false) == MaskCategory::clean;
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::size_t binary_major = 0;
    for (int i = 0; i < 1000; ++i) {
        const double p = u(rng);
        binary_major += categorize(std::vector<double>{p, 1.0 - p}, true) == MaskCategory::major ? 1 : 0;
    }
    ok = ok && binary_major == 1000;
    return {ok, "3 fixed cases + " + std::to_string(binary_major) + "/1000 two-class IFC windows major"};
}

// --- 5 --------------------------------------------------------------------
Outcome run_length_oracle() {
    std::mt19937_64 rng(5);
    std::size_t mismatches = 0;
    for (int trial = 0; trial < 10000; ++trial) {
        const auto n = std::uniform_int_distribution<std::size_t>(0, 400)(rng);
        std::bernoulli_distribution coin(std::uniform_real_distribution<double>(0.0, 1.0)(rng));
        std::vector<bool> flags(n);
        for (std::size_t i = 0; i < n; ++i) flags[i] = coin(rng);
        const auto got = run_lengths(flags);
        const auto want = oracle::rle(flags);
        const auto bins = oracle::power_bins(want);
        bool same = got.segments.size() == want.size() && got.bins.size() == bins.size();
        for (std::size_t i = 0; same && i < want.size(); ++i) {
            same = got.segments[i].start_window == want[i].start && got.segments[i].length == want[i].length;
        }
        for (std::size_t i = 0; same && i < got.bins.size(); ++i) {
            const auto it = bins.find(got.bins[i].lower);
            same = it != bins.end() && it->second == got.bins[i].count;
        }
        mismatches += same ? 0 : 1;
    }
    return {mismatches == 0, "10000 random vectors, " + std::to_string(mismatches) + " mismatches"};
}

// --- 6 --------------------------------------------------------------------
Outcome confusion_consistency() {
    std::size_t audits = 0, product_violations = 0;
    double worst_sum = 0.0;
    auto check = [&](const std::vector<ClassConfusionRow>& rows, double ifc_pct) {
        ++audits;
        double abs_sum = 0.0;
        for (const auto& r : rows) {
            if (!r.absolute_confusion_pct) continue;
            if (*r.absolute_confusion_pct != r.distribution_pct * *r.relative_confusion_pct / 100.0) ++product_violations;
            abs_sum += *r.absolute_confusion_pct;
        }
        worst_sum = std::max(worst_sum, std::abs(abs_sum - ifc_pct));
    };

    std::ifstream ifc_csv(synthetic_run().dir / "ifc_windows.csv");
    std::string line;
    std::getline(ifc_csv, line);
    std::vector<bool> flags;
    std::vector<ClassId> labels;
    while (std::getline(ifc_csv, line)) {
        const auto cells = split_csv_line(line);
        labels.push_back(static_cast<ClassId>(*parse_int(cells[3])));
        flags.push_back(cells[4] == "1");
    }
    const auto summary = nlohmann::json::parse(slurp(synthetic_run().dir / "ifc_summary.json"));
    check(confusion_table(flags, labels, 3), summary["ifc_pct"].get<double>());

    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 500; ++trial) {
        const auto classes = std::uniform_int_distribution<std::size_t>(2, 12)(rng);
        const auto n = std::uniform_int_distribution<std::size_t>(1, 3000)(rng);
        std::uniform_int_distribution<ClassId> cls(0, static_cast<ClassId>(classes - 1));
        std::bernoulli_distribution coin(std::uniform_real_distribution<double>(0.0, 0.5)(rng));
        std::vector<bool> f(n);
        std::vector<ClassId> l(n);
        std::size_t ifc = 0;
        for (std::size_t i = 0; i < n; ++i) {
            l[i] = cls(rng);
            f[i] = coin(rng);
            ifc += f[i] ? 1 : 0;
        }
        check(confusion_table(f, l, classes), 100.0 * static_cast<double>(ifc) / static_cast<double>(n));
    }

    // Published MotionSense "Upstairs" row: dist 10.77, rel 2.109, abs 0.229.
    const double published = 10.77 * 2.109 / 100.0;
    const bool rounding_ok = std::abs(published - 0.229) <= kRoundingTol;
    return {product_violations == 0 && worst_sum <= kClosureTol && rounding_ok,
            std::to_string(audits) + " audits, " + std::to_string(product_violations) +
                " abs != dist*rel/100, max |sum abs - IFC| = " + fmt(worst_sum) + "; published row " + fmt(published, 4) +
                " vs 0.229 (tol " + fmt(kRoundingTol) + ")"};
}

// --- 7 --------------------------------------------------------------------
Outcome gradient_check() {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> n(0.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const auto classes = std::uniform_int_distribution<std::size_t>(2, 5)(rng);
        const auto features = std::uniform_int_distribution<std::size_t>(1, 6)(rng);
        const auto rows = std::uniform_int_distribution<std::size_t>(2, 10)(rng);
        BaselineModel model;
        model.weights = Matrix(classes, features);
        model.bias.resize(classes);
        for (double& w : model.weights.data()) w = n(rng);
        for (double& b : model.bias) b = n(rng);
        Matrix x(rows, features);
        for (double& v : x.data()) v = n(rng);
        std::vector<ClassId> y(rows);
        std::uniform_int_distribution<ClassId> cls(0, static_cast<ClassId>(classes - 1));
        for (auto& label : y) label = cls(rng);

        const auto grad = cross_entropy_gradient(model, x, y);
        double diff2 = 0.0, norm2 = 0.0;
        auto probe = [&](double& param, double analytic) {
            const double saved = param;
            param = saved + kFiniteDiffStep;
            const double up = cross_entropy_loss(model, x, y);
            param = saved - kFiniteDiffStep;
            const double down = cross_entropy_loss(model, x, y);
            param = saved;
            const double numeric = (up - down) / (2.0 * kFiniteDiffStep);
            diff2 += (numeric - analytic) * (numeric - analytic);
            norm2 += analytic * analytic;
        };
        for (std::size_t i = 0; i < model.weights.data().size(); ++i) probe(model.weights.data()[i], grad.weights.data()[i]);
        for (std::size_t c = 0; c < classes; ++c) probe(model.bias[c], grad.bias[c]);
        worst = std::max(worst, std::sqrt(diff2) / std::max(std::sqrt(norm2), 1e-300));
    }
    return {worst <= kGradientRelTol, "20 instances, max relative error " + fmt(worst) + " (tol " + fmt(kGradientRelTol) + ")"};
}

// --- 8 --------------------------------------------------------------------
Outcome synthetic_recovery() {
    const auto& run = synthetic_run();
    std::ifstream ann_in(run.dir / "annotations.json");
    const auto annotations = read_annotations_json(ann_in);
    std::ifstream mask_in(run.dir / "mask_windows.csv"), samples_in(run.dir / "mask_samples.csv");
    const auto mask = read_mask_csv(mask_in, samples_in);

    std::size_t transient = 0, transient_ifc = 0, transient_major = 0, transient_minor = 0;
    std::size_t injected = 0, injected_flagged = 0;
    for (const auto& w : mask.window_mask) {
        bool in_transient = false, in_any = false;
        for (const auto& a : annotations) {
            if (w.start_sample < a.global_end && a.global_start < w.end_sample) {
                in_any = true;
                in_transient = in_transient || a.kind == InjectionKind::transient_irregularity;
            }
        }
        const bool flagged = w.category != MaskCategory::clean;
        if (in_any) {
            ++injected;
            injected_flagged += flagged ? 1 : 0;
        }
        if (in_transient) {
            ++transient;
            transient_ifc += flagged ? 1 : 0;  // IFC windows are exactly the non-clean ones
            transient_major += w.category == MaskCategory::major ? 1 : 0;
            transient_minor += w.category == MaskCategory::minor ? 1 : 0;
        }
    }
    const double ifc_share = transient ? static_cast<double>(transient_ifc) / static_cast<double>(transient) : 0.0;
    const double flagged_share = injected ? static_cast<double>(injected_flagged) / static_cast<double>(injected) : 0.0;
    const bool ok = transient > 0 && ifc_share >= kTransientIfcMin && flagged_share >= kInjectedFlaggedMin &&
                    transient_major > transient_minor && run.seconds < kPipelineBudgetSeconds;
    return {ok, "transient windows IFC " + std::to_string(transient_ifc) + "/" + std::to_string(transient) +
                    " (min " + fmt(kTransientIfcMin) + "), injected windows minor|major " +
                    std::to_string(injected_flagged) + "/" + std::to_string(injected) + " (min " +
                    fmt(kInjectedFlaggedMin) + "), transient major/minor " + std::to_string(transient_major) + "/" +
                    std::to_string(transient_minor) + ", pipeline " + fmt(run.seconds, 3) + " s (budget " +
                    fmt(kPipelineBudgetSeconds) + " s)"};
}

// --- 9 --------------------------------------------------------------------
Outcome split_invariants() {
    ScenarioSpec spec = default_scenario();
    spec.injections.clear();
    spec.num_subjects = 24;
    spec.num_segments = 3;
    const auto data = generate(spec);
    const auto ds = slice_windows(data.recordings, WindowConfig{});
    const auto plan = plan_folds(ds, 10);
    std::vector<int> hits(ds.windows.size(), 0);
    std::map<std::string, std::set<std::size_t>> group_folds;
    for (std::size_t f = 0; f < plan.folds.size(); ++f) {
        for (auto id : plan.folds[f].test_window_ids) {
            ++hits[static_cast<std::size_t>(id)];
            group_folds[ds.windows[static_cast<std::size_t>(id)].group_key].insert(f);
        }
    }
    const bool once = std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; });
    const bool unsplit = std::all_of(group_folds.begin(), group_folds.end(), [](const auto& g) { return g.second.size() == 1; });
    return {plan.k == 10 && plan.folds.size() == 10 && once && unsplit && group_folds.size() == 24,
            std::to_string(group_folds.size()) + " groups -> " + std::to_string(plan.folds.size()) + " folds, " +
                std::to_string(ds.windows.size()) + " windows each tested once: " + (once ? "yes" : "no") +
                ", groups unsplit: " + (unsplit ? "yes" : "no")};
}

// --- 10 -------------------------------------------------------------------
Outcome round_trips() {
    const auto& run = synthetic_run();
    std::ifstream log_in(run.dir / "predictions.jsonl");
    const auto records = read_records(log_in);
    std::ostringstream rewritten;
    write_records(rewritten, records);
    std::istringstream reread(rewritten.str());
    const bool jsonl = read_records(reread) == records && rewritten.str() == slurp(run.dir / "predictions.jsonl");

    std::ifstream mw(run.dir / "mask_windows.csv"), ms(run.dir / "mask_samples.csv");
    const auto mask = read_mask_csv(mw, ms);
    std::ostringstream mw2, ms2;
    write_window_mask_csv(mw2, mask);
    write_sample_mask_csv(ms2, mask);
    const bool mask_ok = mw2.str() == slurp(run.dir / "mask_windows.csv") && ms2.str() == slurp(run.dir / "mask_samples.csv");

    const fs::path again = run.dir.parent_path() / "rerun";
    fs::remove_all(again);
    run_pipeline(again);
    const auto a = snapshot(run.dir), b = snapshot(again);
    std::size_t differing = 0;
    for (const auto& [name, content] : a) differing += (b.count(name) && b.at(name) == content) ? 0 : 1;
    differing += b.size() > a.size() ? b.size() - a.size() : 0;
    return {jsonl && mask_ok && differing == 0,
            std::to_string(records.size()) + " JSONL records lossless: " + (jsonl ? "yes" : "no") +
                ", mask CSV lossless: " + (mask_ok ? "yes" : "no") + ", rerun: " + std::to_string(a.size()) +
                " artifacts, " + std::to_string(differing) + " differ"};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"IFC closure on random correctness matrices", closure_property},
        {"published per-model breakdown reconstruction", table_reconstruction},
        {"mask clean share equals 100 - IFC", mask_consistency},
        {"mask rule cases", mask_rules},
        {"run-length oracle agreement", run_length_oracle},
        {"confusion self-consistency", confusion_consistency},
        {"baseline gradient check", gradient_check},
        {"synthetic injection recovery", synthetic_recovery},
        {"group k-fold split invariants", split_invariants},
        {"round trips and byte-identical reruns", round_trips},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += o.pass ? 0 : 1;
        std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << (i + 1) << ": " << criteria[i].first << " | "
                  << o.detail << std::endl;
    }
    std::cout << (criteria.size() - static_cast<std::size_t>(failures)) << "/" << criteria.size() << " criteria passed"
              << std::endl;
    fs::remove_all(fs::temp_directory_path() / "har_audit_acceptance");
    return failures == 0 ? 0 : 1;
}
