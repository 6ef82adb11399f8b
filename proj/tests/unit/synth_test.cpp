#include <gtest/gtest.h>

#include <sstream>

#include "har_audit/synth.hpp"

using namespace har_audit;

namespace {

std::string recordings_text(const SynthResult& r) {
    std::ostringstream out;
    write_canonical_recording(out, r.recordings);
    return out.str();
}

}  // namespace

TEST(Synth, NoInjectionsNoAnnotations) {
    ScenarioSpec spec;
    spec.num_classes = 2;
    spec.num_channels = 1;
    spec.signatures = {{-1.0}, {1.0}};
    spec.num_segments = 4;
    const auto r = generate(spec);
    EXPECT_TRUE(r.annotations.empty());
    ASSERT_EQ(r.recordings.size(), spec.num_subjects);
    for (const auto& rec : r.recordings) {
        EXPECT_EQ(rec.num_samples(), spec.samples_per_subject());
        EXPECT_EQ(rec.labels.size(), rec.num_samples());
    }
}

TEST(Synth, TransitionShiftAnnotation) {
    ScenarioSpec spec = default_scenario();
    spec.injections = {{InjectionKind::transition_shift, 2, 1200, 150, std::nullopt}};
    const auto r = generate(spec);
    ASSERT_EQ(r.annotations.size(), 1u);
    const auto& a = r.annotations[0];
    EXPECT_EQ(a.end - a.start, 150u);
    EXPECT_EQ(a.global_start, 2 * spec.samples_per_subject() + 1200);
    // The label keeps the previous segment's class over the shifted span.
    const auto& labels = r.recordings[2].labels;
    EXPECT_EQ(labels[1200], labels[1199]);
    EXPECT_EQ(labels[1349], labels[1199]);
    EXPECT_NE(labels[1350], labels[1199]);
}

TEST(Synth, TransientKeepsLabelAndAddsEnergy) {
    ScenarioSpec spec = default_scenario();
    spec.noise_std = 0.0;
    spec.injections = {{InjectionKind::transient_irregularity, 1, 3600, 400, std::nullopt}};
    const auto r = generate(spec);
    const auto& rec = r.recordings[1];
    const ClassId label = rec.labels[3600];
    EXPECT_EQ(spec.class_amplitudes[static_cast<std::size_t>(label)], 0.0);  // injected into a static class
    for (std::size_t s = 3600; s < 4000; ++s) EXPECT_EQ(rec.labels[s], label);
    double energy_in = 0, energy_out = 0;
    const double base = spec.signatures[static_cast<std::size_t>(label)][0];
    for (std::size_t s = 3600; s < 4000; ++s) energy_in += (rec.channels(s, 0) - base) * (rec.channels(s, 0) - base);
    for (std::size_t s = 4000; s < 4200; ++s) energy_out += (rec.channels(s, 0) - base) * (rec.channels(s, 0) - base);
    EXPECT_GT(energy_in, 100.0);
    EXPECT_NEAR(energy_out, 0.0, 1e-18);
}

TEST(Synth, CompositeOverlapRendersOtherClass) {
    ScenarioSpec spec = default_scenario();
    spec.noise_std = 0.0;
    spec.injections = {{InjectionKind::composite_overlap, 0, 100, 200, ClassId{2}}};
    const auto r = generate(spec);
    const auto& rec = r.recordings[0];
    EXPECT_EQ(rec.labels[150], 0);
    EXPECT_NEAR(rec.channels(150, 0), spec.signatures[2][0], 1e-12);
    EXPECT_NEAR(rec.channels(350, 0), spec.signatures[0][0], 1e-12);
}

TEST(Synth, SameSeedIsByteIdentical) {
    const auto spec = default_scenario();
    EXPECT_EQ(recordings_text(generate(spec)), recordings_text(generate(spec)));
    auto other = spec;
    other.seed = 43;
    EXPECT_NE(recordings_text(generate(spec)), recordings_text(generate(other)));
}

TEST(Synth, InvalidSpecs) {
    auto spec = default_scenario();
    spec.injections = {{InjectionKind::transition_shift, 0, 1000, 100, std::nullopt}};
    EXPECT_THROW(generate(spec), std::invalid_argument);
    spec.injections = {{InjectionKind::transient_irregularity, 0, 5300, 200, std::nullopt}};
    EXPECT_THROW(generate(spec), std::invalid_argument);
    spec.injections = {{InjectionKind::transient_irregularity, 9, 0, 10, std::nullopt}};
    EXPECT_THROW(generate(spec), std::invalid_argument);
}

TEST(Synth, ScenarioAndAnnotationJsonRoundTrip) {
    const auto spec = default_scenario();
    std::stringstream io;
    write_scenario_json(io, spec);
    const auto back = read_scenario_json(io);
    EXPECT_EQ(recordings_text(generate(back)), recordings_text(generate(spec)));

    const auto r = generate(spec);
    std::stringstream aio;
    write_annotations_json(aio, r.annotations);
    const auto annotations = read_annotations_json(aio);
    ASSERT_EQ(annotations.size(), r.annotations.size());
    for (std::size_t i = 0; i < annotations.size(); ++i) {
        EXPECT_EQ(annotations[i].kind, r.annotations[i].kind);
        EXPECT_EQ(annotations[i].global_start, r.annotations[i].global_start);
        EXPECT_EQ(annotations[i].global_end, r.annotations[i].global_end);
    }
}
