#include "har_audit/synth.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include <json.hpp>

namespace har_audit {

using ordered_json = nlohmann::ordered_json;

InjectionKind parse_injection_kind(const std::string& name) {
    if (name == "composite_overlap") return InjectionKind::composite_overlap;
    if (name == "transient_irregularity") return InjectionKind::transient_irregularity;
    if (name == "transition_shift") return InjectionKind::transition_shift;
    throw std::invalid_argument("unknown injection kind '" + name + "'");
}

std::string to_string(InjectionKind kind) {
    switch (kind) {
        case InjectionKind::composite_overlap: return "composite_overlap";
        case InjectionKind::transient_irregularity: return "transient_irregularity";
        case InjectionKind::transition_shift: return "transition_shift";
    }
    return "transient_irregularity";
}

void ScenarioSpec::validate() const {
    if (num_classes < 2) throw std::invalid_argument("scenario needs at least 2 classes");
    if (num_channels < 1) throw std::invalid_argument("scenario needs at least 1 channel");
    if (num_subjects < 1 || num_segments < 1 || samples_per_segment < 1) {
        throw std::invalid_argument("scenario needs at least one subject, segment and sample");
    }
    if (signatures.size() != num_classes) throw std::invalid_argument("one signature per class is required");
    for (const auto& s : signatures) {
        if (s.size() != num_channels) throw std::invalid_argument("signature width must equal num_channels");
    }
    if (!class_amplitudes.empty() && class_amplitudes.size() != num_classes) {
        throw std::invalid_argument("class_amplitudes must be empty or hold one value per class");
    }
    if (oscillation_period < 2 || burst_period < 2) throw std::invalid_argument("periods must be at least 2 samples");
    if (noise_std < 0.0) throw std::invalid_argument("noise_std must be non-negative");

    const std::size_t length = samples_per_subject();
    for (std::size_t i = 0; i < injections.size(); ++i) {
        const auto& inj = injections[i];
        const std::string where = "injection " + std::to_string(i) + ": ";
        if (inj.subject >= num_subjects) throw std::invalid_argument(where + "subject out of range");
        if (inj.extent == 0) throw std::invalid_argument(where + "extent must be positive");
        if (inj.location + inj.extent > length) throw std::invalid_argument(where + "span exceeds the recording");
        if (inj.kind == InjectionKind::transition_shift) {
            if (inj.location == 0 || inj.location % samples_per_segment != 0) {
                throw std::invalid_argument(where + "transition_shift location must be an inner segment boundary");
            }
            if (inj.extent > samples_per_segment) {
                throw std::invalid_argument(where + "transition_shift extent exceeds one segment");
            }
        }
        if (inj.as_class && (*inj.as_class < 0 || static_cast<std::size_t>(*inj.as_class) >= num_classes)) {
            throw std::invalid_argument(where + "as_class out of range");
        }
    }
}

ScenarioSpec default_scenario() {
    ScenarioSpec spec;
    spec.signatures = {{0.0, 0.0}, {0.0, 0.0}, {1.5, -1.5}};
    spec.class_amplitudes = {0.0, 2.0, 0.0};
    // Subject 1, segment 6 (class 0, samples 3600..4200): burst over 3600..4000.
    spec.injections.push_back({InjectionKind::transient_irregularity, 1, 3600, 400, std::nullopt});
    // Subject 2, boundary between segment 1 (class 1) and segment 2 (class 2).
    spec.injections.push_back({InjectionKind::transition_shift, 2, 1200, 150, std::nullopt});
    return spec;
}

SynthResult generate(const ScenarioSpec& spec) {
    spec.validate();
    const std::size_t length = spec.samples_per_subject();
    const double two_pi = 2.0 * std::numbers::pi;
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> noise(0.0, 1.0);

    SynthResult out;
    for (std::size_t subject = 0; subject < spec.num_subjects; ++subject) {
        std::vector<ClassId> labels(length);
        for (std::size_t t = 0; t < length; ++t) {
            labels[t] = static_cast<ClassId>((t / spec.samples_per_segment) % spec.num_classes);
        }
        std::vector<ClassId> rendered = labels;
        std::vector<double> burst(length, 0.0);

        for (const auto& inj : spec.injections) {
            if (inj.subject != subject) continue;
            const std::size_t begin = inj.location;
            const std::size_t end = inj.location + inj.extent;
            switch (inj.kind) {
                case InjectionKind::composite_overlap:
                    for (std::size_t t = begin; t < end; ++t) {
                        rendered[t] = inj.as_class ? *inj.as_class
                                                   : static_cast<ClassId>((labels[t] + 1) % spec.num_classes);
                    }
                    break;
                case InjectionKind::transient_irregularity:
                    for (std::size_t t = begin; t < end; ++t) {
                        burst[t] = spec.burst_amplitude *
                                   std::sin(two_pi * static_cast<double>(t) / static_cast<double>(spec.burst_period) +
                                            std::numbers::pi / 4.0);
                    }
                    break;
                case InjectionKind::transition_shift: {
                    const ClassId previous = labels[begin - 1];
                    for (std::size_t t = begin; t < end; ++t) labels[t] = previous;
                    break;
                }
            }
            const std::size_t offset = subject * length;
            out.annotations.push_back({inj.kind, subject, begin, end, offset + begin, offset + end});
        }

        SensorRecording rec;
        rec.channels = Matrix(length, spec.num_channels);
        for (std::size_t t = 0; t < length; ++t) {
            const auto c = static_cast<std::size_t>(rendered[t]);
            const double amp = spec.class_amplitudes.empty() ? 0.0 : spec.class_amplitudes[c];
            for (std::size_t ch = 0; ch < spec.num_channels; ++ch) {
                const double phase = static_cast<double>(ch) * std::numbers::pi / 2.0;
                const double wave =
                    amp * std::sin(two_pi * static_cast<double>(t) / static_cast<double>(spec.oscillation_period) + phase);
                rec.channels(t, ch) = spec.signatures[c][ch] + wave + burst[t] + spec.noise_std * noise(rng);
            }
        }
        rec.labels = std::move(labels);
        rec.sample_rate = spec.sample_rate;
        rec.subject_id = "subject" + std::to_string(subject);
        rec.session_id = "session0";
        for (std::size_t ch = 0; ch < spec.num_channels; ++ch) rec.channel_names.push_back("ch" + std::to_string(ch));
        out.recordings.push_back(std::move(rec));
    }
    return out;
}

ScenarioSpec read_scenario_json(std::istream& in) {
    const auto doc = ordered_json::parse(in);
    ScenarioSpec spec;
    spec.num_classes = doc.value("num_classes", spec.num_classes);
    spec.num_channels = doc.value("num_channels", spec.num_channels);
    spec.num_subjects = doc.value("num_subjects", spec.num_subjects);
    spec.samples_per_segment = doc.value("samples_per_segment", spec.samples_per_segment);
    spec.num_segments = doc.value("num_segments", spec.num_segments);
    spec.signatures = doc.at("signatures").get<std::vector<std::vector<double>>>();
    spec.class_amplitudes = doc.value("class_amplitudes", std::vector<double>{});
    spec.oscillation_period = doc.value("oscillation_period", spec.oscillation_period);
    spec.noise_std = doc.value("noise_std", spec.noise_std);
    spec.burst_amplitude = doc.value("burst_amplitude", spec.burst_amplitude);
    spec.burst_period = doc.value("burst_period", spec.burst_period);
    spec.sample_rate = doc.value("sample_rate", spec.sample_rate);
    spec.seed = doc.value("seed", spec.seed);
    if (doc.contains("injections")) {
        for (const auto& j : doc.at("injections")) {
            Injection inj;
            inj.kind = parse_injection_kind(j.at("kind").get<std::string>());
            inj.subject = j.value("subject", std::size_t{0});
            inj.location = j.at("location").get<std::size_t>();
            inj.extent = j.at("extent").get<std::size_t>();
            if (j.contains("as_class")) inj.as_class = j.at("as_class").get<ClassId>();
            spec.injections.push_back(inj);
        }
    }
    spec.validate();
    return spec;
}

void write_scenario_json(std::ostream& out, const ScenarioSpec& spec) {
    ordered_json doc;
    doc["num_classes"] = spec.num_classes;
    doc["num_channels"] = spec.num_channels;
    doc["num_subjects"] = spec.num_subjects;
    doc["samples_per_segment"] = spec.samples_per_segment;
    doc["num_segments"] = spec.num_segments;
    doc["signatures"] = spec.signatures;
    doc["class_amplitudes"] = spec.class_amplitudes;
    doc["oscillation_period"] = spec.oscillation_period;
    doc["noise_std"] = spec.noise_std;
    doc["burst_amplitude"] = spec.burst_amplitude;
    doc["burst_period"] = spec.burst_period;
    doc["sample_rate"] = spec.sample_rate;
    doc["seed"] = spec.seed;
    doc["injections"] = ordered_json::array();
    for (const auto& inj : spec.injections) {
        ordered_json j;
        j["kind"] = to_string(inj.kind);
        j["subject"] = inj.subject;
        j["location"] = inj.location;
        j["extent"] = inj.extent;
        if (inj.as_class) j["as_class"] = *inj.as_class;
        doc["injections"].push_back(j);
    }
    out << doc.dump(2) << '\n';
}

void write_annotations_json(std::ostream& out, const std::vector<InjectionAnnotation>& annotations) {
    ordered_json doc = ordered_json::array();
    for (const auto& a : annotations) {
        ordered_json j;
        j["kind"] = to_string(a.kind);
        j["subject"] = a.subject;
        j["start"] = a.start;
        j["end"] = a.end;
        j["global_start"] = a.global_start;
        j["global_end"] = a.global_end;
        doc.push_back(j);
    }
    out << doc.dump(2) << '\n';
}

std::vector<InjectionAnnotation> read_annotations_json(std::istream& in) {
    const auto doc = ordered_json::parse(in);
    std::vector<InjectionAnnotation> out;
    for (const auto& j : doc) {
        out.push_back({parse_injection_kind(j.at("kind").get<std::string>()), j.at("subject").get<std::size_t>(),
                       j.at("start").get<std::size_t>(), j.at("end").get<std::size_t>(),
                       j.at("global_start").get<std::size_t>(), j.at("global_end").get<std::size_t>()});
    }
    return out;
}

}  // namespace har_audit
