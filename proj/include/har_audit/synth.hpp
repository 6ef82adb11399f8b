#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "har_audit/dataset.hpp"

namespace har_audit {

enum class InjectionKind {
    composite_overlap,       // span rendered with another class's signature, label kept
    transient_irregularity,  // high-frequency burst added, label kept
    transition_shift,        // label boundary lags the signal change by `extent` samples
};

InjectionKind parse_injection_kind(const std::string& name);
std::string to_string(InjectionKind kind);

struct Injection {
    InjectionKind kind = InjectionKind::transient_irregularity;
    std::size_t subject = 0;
    // Sample index within the subject's recording. For transition_shift it
    // must be a segment boundary.
    std::size_t location = 0;
    std::size_t extent = 0;
    // composite_overlap only: class whose signature is borrowed. Defaults
    // to the next class after the true one.
    std::optional<ClassId> as_class;
};

/// Each subject gets one recording of `num_segments` segments; segment j
/// carries class j mod num_classes. A class renders as its channel-mean
/// signature plus an optional sinusoid and Gaussian noise.
struct ScenarioSpec {
    std::size_t num_classes = 3;
    std::size_t num_channels = 2;
    std::size_t num_subjects = 4;
    std::size_t samples_per_segment = 600;
    std::size_t num_segments = 9;
    std::vector<std::vector<double>> signatures;  // [class][channel]
    std::vector<double> class_amplitudes;         // oscillation amplitude per class
    std::size_t oscillation_period = 8;
    double noise_std = 0.3;
    double burst_amplitude = 3.0;
    std::size_t burst_period = 4;
    double sample_rate = 50.0;
    std::vector<Injection> injections;
    std::uint64_t seed = 42;

    /// Throws std::invalid_argument for inconsistent shapes or injections
    /// that do not fit their recording.
    void validate() const;
    std::size_t samples_per_subject() const { return samples_per_segment * num_segments; }
};

/// 3 classes, 2 channels, seed 42: a static class, an oscillating class at
/// the same mean, and an offset static class. One transient burst inside a
/// static span and one 150-sample transition shift.
ScenarioSpec default_scenario();

struct InjectionAnnotation {
    InjectionKind kind = InjectionKind::transient_irregularity;
    std::size_t subject = 0;
    std::size_t start = 0;  // within the subject's recording
    std::size_t end = 0;
    std::size_t global_start = 0;  // within the concatenation of recordings
    std::size_t global_end = 0;
};

struct SynthResult {
    std::vector<SensorRecording> recordings;
    std::vector<InjectionAnnotation> annotations;
};

SynthResult generate(const ScenarioSpec& spec);

ScenarioSpec read_scenario_json(std::istream& in);
void write_scenario_json(std::ostream& out, const ScenarioSpec& spec);
void write_annotations_json(std::ostream& out, const std::vector<InjectionAnnotation>& annotations);
std::vector<InjectionAnnotation> read_annotations_json(std::istream& in);

}  // namespace har_audit
