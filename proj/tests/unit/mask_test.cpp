#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "har_audit/mask.hpp"
#include "oracles.hpp"

using namespace har_audit;

namespace {

std::vector<double> v(std::initializer_list<double> xs) { return xs; }

FusedDistribution fused_for(WindowId id, std::vector<double> probs) {
    FusedDistribution f;
    f.window_id = id;
    f.mean_probs = std::move(probs);
    return f;
}

}  // namespace

TEST(Categorize, GapRule) {
    EXPECT_EQ(categorize(v({0.7, 0.2, 0.1}), true), MaskCategory::major);
    EXPECT_EQ(categorize(v({0.4, 0.35, 0.25}), true), MaskCategory::minor);
    EXPECT_EQ(categorize(v({0.5, 0.3, 0.2}), false), MaskCategory::clean);
    EXPECT_EQ(categorize(v({0.25, 0.4, 0.35}), true), MaskCategory::minor);
}

TEST(Categorize, TwoClassesAlwaysMajor) {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 500; ++i) {
        const double p = u(rng);
        EXPECT_EQ(categorize(v({p, 1.0 - p}), true), MaskCategory::major);
    }
    EXPECT_EQ(categorize(v({0.5, 0.5}), true), MaskCategory::major);
}

TEST(Categorize, TiesResolveToFirstGap) {
    EXPECT_EQ(categorize(v({0.6, 0.3, 0.0, 0.1}), true), MaskCategory::major);  // gaps 0.3, 0.2, 0.1
    EXPECT_EQ(categorize(v({0.5, 0.25, 0.0, 0.25}), true), MaskCategory::major);  // gaps 0.25, 0, 0.25
    EXPECT_THROW(categorize(v({1.0}), true), std::invalid_argument);
}

TEST(Categorize, MatchesOracleAndIsPermutationFree) {
    std::mt19937_64 rng(12);
    std::gamma_distribution<double> g(0.5, 1.0);
    for (int trial = 0; trial < 2000; ++trial) {
        const auto classes = std::uniform_int_distribution<std::size_t>(2, 8)(rng);
        std::vector<double> p(classes);
        double sum = 0;
        for (double& x : p) sum += (x = g(rng));
        for (double& x : p) x /= sum;
        const auto cat = categorize(p, true);
        EXPECT_EQ(static_cast<int>(cat), oracle::gap_rule(p, true));
        std::shuffle(p.begin(), p.end(), rng);
        EXPECT_EQ(categorize(p, true), cat);
    }
}

TEST(BuildMask, AllClean) {
    const auto ds = oracle::toy_dataset({0, 1, 2});
    const auto mask = build_mask({false, false, false}, {}, ds);
    EXPECT_DOUBLE_EQ(mask.distribution.clean_pct, 100.0);
    EXPECT_DOUBLE_EQ(mask.distribution.minor_pct, 0.0);
    EXPECT_DOUBLE_EQ(mask.distribution.major_pct, 0.0);
    EXPECT_EQ(mask.sample_mask, std::vector<MaskCategory>(400, MaskCategory::clean));
}

TEST(BuildMask, OverlapTakesMaxSeverity) {
    const auto ds = oracle::toy_dataset({0, 0});
    const std::vector<FusedDistribution> fused{fused_for(0, {0.4, 0.35, 0.25}), fused_for(1, {0.7, 0.2, 0.1})};
    const auto mask = build_mask({true, true}, fused, ds);
    EXPECT_EQ(mask.window_mask[0].category, MaskCategory::minor);
    EXPECT_EQ(mask.window_mask[1].category, MaskCategory::major);
    EXPECT_EQ(mask.sample_mask[50], MaskCategory::minor);
    EXPECT_EQ(mask.sample_mask[150], MaskCategory::major);
    EXPECT_EQ(mask.sample_mask[250], MaskCategory::major);
    EXPECT_DOUBLE_EQ(mask.distribution.minor_pct, 50.0);
}

TEST(BuildMask, MissingFusedDistributionThrows) {
    const auto ds = oracle::toy_dataset({0});
    EXPECT_THROW(build_mask({true}, {}, ds), std::invalid_argument);
}

TEST(BuildMask, SeverityMergeIsMonotone) {
    std::mt19937_64 rng(6);
    std::uniform_int_distribution<int> cat(0, 2);
    const auto ds = oracle::toy_dataset(std::vector<ClassId>(40, 0), 6, 3);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<int> values(40);
        for (int& x : values) x = cat(rng);
        const auto before = merge_max_to_samples(values, ds);
        const auto w = std::uniform_int_distribution<std::size_t>(0, 39)(rng);
        values[w] = std::min(2, values[w] + 1);
        const auto after = merge_max_to_samples(values, ds);
        for (std::size_t s = 0; s < before.size(); ++s) EXPECT_GE(after[s], before[s]);
    }
}

TEST(MaskCsv, ThreeWindowsRoundTrip) {
    const auto ds = oracle::toy_dataset({0, 0, 0});
    const std::vector<FusedDistribution> fused{fused_for(1, {0.4, 0.35, 0.25}), fused_for(2, {0.7, 0.2, 0.1})};
    const auto mask = build_mask({false, true, true}, fused, ds);
    std::stringstream wcsv, scsv;
    write_window_mask_csv(wcsv, mask);
    write_sample_mask_csv(scsv, mask);
    EXPECT_EQ(wcsv.str(), "window_id,start_sample,end_sample,category\n0,0,200,0\n1,100,300,1\n2,200,400,2\n");
    const auto back = read_mask_csv(wcsv, scsv);
    EXPECT_EQ(back.window_mask, mask.window_mask);
    EXPECT_EQ(back.sample_mask, mask.sample_mask);
    EXPECT_DOUBLE_EQ(back.distribution.major_pct, mask.distribution.major_pct);
}

TEST(MaskCsv, TenThousandWindowLineCount) {
    std::mt19937_64 rng(10);
    std::bernoulli_distribution coin(0.1);
    const auto ds = oracle::toy_dataset(std::vector<ClassId>(10000, 0), 2, 1, 3);
    std::vector<bool> flags(10000);
    std::vector<FusedDistribution> fused;
    for (std::size_t w = 0; w < flags.size(); ++w) {
        flags[w] = coin(rng);
        if (flags[w]) fused.push_back(fused_for(static_cast<WindowId>(w), w % 3 ? v({0.7, 0.2, 0.1}) : v({0.4, 0.35, 0.25})));
    }
    const auto mask = build_mask(flags, fused, ds);
    std::stringstream out;
    write_window_mask_csv(out, mask);
    const auto text = out.str();
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 10001);
}

TEST(MaskCsv, RejectsBadCategory) {
    std::istringstream w("window_id,start_sample,end_sample,category\n0,0,200,3\n");
    std::istringstream s("sample_index,category\n");
    EXPECT_THROW(read_mask_csv(w, s), ParseError);
}
