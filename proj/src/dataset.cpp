#include "qeeg/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include <json.hpp>

#include "qeeg/format.hpp"
#include "qeeg/rng.hpp"
#include "qeeg/spectral.hpp"

namespace qeeg {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::array<std::string_view, 19> kStandardMontage{
    "Fp1", "Fp2", "F7", "F3", "Fz", "F4", "F8", "T7", "C3", "Cz",
    "C4",  "T8",  "P7", "P3", "Pz", "P4", "P8", "O1", "O2",
};

// Band-limited content must stay below Nyquist with margin.
constexpr double kMinSamplingRateHz = 2.0 * kAnalysisHighHz;

[[noreturn]] void fail(IngestIssue issue, const std::string& what) { throw IngestError(issue, what); }

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(IngestIssue::MissingFile, "cannot open " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = line.find(',', start);
        out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

/// One band component of a synthetic channel: a mixture of sinusoids with a
/// slow amplitude envelope.
struct ToneMixture {
    std::vector<double> frequency;
    std::vector<double> phase;
    double amplitude = 0.0;  // per component
    double envelope_hz = 0.0;
    double envelope_phase = 0.0;
};

const ClassProfile* find_profile(const SynthSpec& spec, Label label, Band band, const std::string& channel) {
    const ClassProfile* found = nullptr;
    for (const auto& p : spec.profiles) {
        if (p.label != label || parse_band(p.band) != band) continue;
        if (!p.channels_affected.empty() &&
            std::find(p.channels_affected.begin(), p.channels_affected.end(), channel) == p.channels_affected.end())
            continue;
        found = &p;
    }
    return found;
}

double channel_noise(const SynthSpec& spec, Label label, const std::string& channel) {
    double sigma = spec.noise_sigma;
    for (const auto& p : spec.profiles) {
        if (p.label != label || !p.noise_sigma) continue;
        if (p.channels_affected.empty() ||
            std::find(p.channels_affected.begin(), p.channels_affected.end(), channel) != p.channels_affected.end())
            sigma = *p.noise_sigma;
    }
    return sigma;
}

enum StreamTag : std::uint64_t { kSubjectStream = 1, kChannelStream = 2 };

}  // namespace

std::string_view to_string(Label label) noexcept { return label == Label::AD ? "AD" : "NonAD"; }

Label parse_label(std::string_view text) {
    if (text == "AD") return Label::AD;
    if (text == "NonAD") return Label::NonAD;
    throw ValidationError("unknown label '" + std::string(text) + "' (expected AD or NonAD)");
}

const std::array<std::string_view, 19>& standard_montage() noexcept { return kStandardMontage; }

bool is_standard_channel(std::string_view name) noexcept {
    return std::find(kStandardMontage.begin(), kStandardMontage.end(), name) != kStandardMontage.end();
}

void validate(const EegRecording& r) {
    const std::string who = r.key.subject_id + " session " + std::to_string(r.key.session_index);
    if (!(r.sampling_rate_hz > kMinSamplingRateHz) || !std::isfinite(r.sampling_rate_hz))
        fail(IngestIssue::InvalidSamplingRate,
             who + ": sampling rate " + std::to_string(r.sampling_rate_hz) + " Hz must exceed 60 Hz");
    if (r.channel_labels.empty() || r.samples.size() != r.channel_labels.size())
        fail(IngestIssue::EmptyRecording, who + ": channel labels and sample series disagree or are empty");
    std::set<std::string> seen;
    for (const auto& label : r.channel_labels) {
        if (!seen.insert(label).second) fail(IngestIssue::DuplicateLabel, who + ": duplicate channel label " + label);
        if (r.standard_montage && !is_standard_channel(label))
            fail(IngestIssue::UnknownMontageLabel, who + ": '" + label + "' is not a 10/20 montage channel");
    }
    const std::size_t n = r.samples.front().size();
    if (n == 0) fail(IngestIssue::EmptyRecording, who + ": no samples");
    for (std::size_t c = 0; c < r.samples.size(); ++c) {
        if (r.samples[c].size() != n)
            fail(IngestIssue::RaggedRow, who + ": channel " + r.channel_labels[c] + " has " +
                                             std::to_string(r.samples[c].size()) + " samples, expected " +
                                             std::to_string(n));
        for (std::size_t i = 0; i < n; ++i)
            if (!std::isfinite(r.samples[c][i]))
                fail(IngestIssue::NonFiniteSample,
                     who + ": non-finite sample at channel " + r.channel_labels[c] + ", index " + std::to_string(i));
    }
}

EegRecording load_recording(const fs::path& manifest_path) {
    const std::string manifest_text = read_file(manifest_path);
    EegRecording rec;
    fs::path data_path;
    try {
        const json m = json::parse(manifest_text);
        rec.key.subject_id = m.at("subject_id").get<std::string>();
        rec.key.session_index = m.at("session_index").get<int>();
        rec.key.label = parse_label(m.at("label").get<std::string>());
        rec.sampling_rate_hz = m.at("sampling_rate_hz").get<double>();
        data_path = manifest_path.parent_path() / m.at("data_file").get<std::string>();
        if (m.contains("montage")) {
            const auto montage = m.at("montage").get<std::string>();
            if (montage != "10-20" && montage != "custom")
                fail(IngestIssue::MalformedManifest, manifest_path.string() + ": unknown montage '" + montage + "'");
            rec.standard_montage = montage == "10-20";
        }
    } catch (const json::exception& e) {
        fail(IngestIssue::MalformedManifest, manifest_path.string() + ": " + e.what());
    } catch (const ValidationError& e) {
        if (dynamic_cast<const IngestError*>(&e)) throw;
        fail(IngestIssue::MalformedManifest, manifest_path.string() + ": " + e.what());
    }
    if (rec.key.session_index < 1)
        fail(IngestIssue::MalformedManifest, manifest_path.string() + ": session_index must be >= 1");

    const std::string data = read_file(data_path);
    std::string_view rest(data);
    std::size_t line_no = 0;
    auto next_line = [&](std::string_view& line) {
        if (rest.empty()) return false;
        const auto pos = rest.find('\n');
        line = rest.substr(0, pos);
        rest = pos == std::string_view::npos ? std::string_view{} : rest.substr(pos + 1);
        ++line_no;
        return true;
    };

    std::string_view line;
    if (!next_line(line) || trim(line).empty())
        fail(IngestIssue::MalformedHeader, data_path.string() + ": missing header row");
    for (auto field : split_fields(line)) {
        field = trim(field);
        if (field.empty()) fail(IngestIssue::MalformedHeader, data_path.string() + ": empty channel label in header");
        double probe;
        const auto res = std::from_chars(field.data(), field.data() + field.size(), probe);
        if (res.ec == std::errc{} && res.ptr == field.data() + field.size())
            fail(IngestIssue::MalformedHeader,
                 data_path.string() + ": header field '" + std::string(field) + "' looks numeric");
        rec.channel_labels.emplace_back(field);
    }
    rec.samples.assign(rec.channel_labels.size(), {});

    while (next_line(line)) {
        if (trim(line).empty()) continue;
        const auto fields = split_fields(line);
        if (fields.size() != rec.channel_labels.size())
            fail(IngestIssue::RaggedRow, data_path.string() + ":" + std::to_string(line_no) + ": " +
                                             std::to_string(fields.size()) + " values, expected " +
                                             std::to_string(rec.channel_labels.size()));
        for (std::size_t c = 0; c < fields.size(); ++c) {
            const auto field = trim(fields[c]);
            double v = 0.0;
            const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
            if (res.ec != std::errc{} || res.ptr != field.data() + field.size())
                fail(IngestIssue::MalformedValue,
                     data_path.string() + ":" + std::to_string(line_no) + ": cannot parse '" + std::string(field) + "'");
            if (!std::isfinite(v))
                fail(IngestIssue::NonFiniteSample, data_path.string() + ":" + std::to_string(line_no) +
                                                       ": non-finite sample in channel " + rec.channel_labels[c]);
            rec.samples[c].push_back(v);
        }
    }
    validate(rec);
    return rec;
}

fs::path save_recording(const EegRecording& recording, const fs::path& directory, const std::string& stem) {
    validate(recording);
    fs::create_directories(directory);
    const fs::path csv_path = directory / (stem + ".csv");
    const fs::path manifest_path = directory / (stem + ".json");

    std::string out;
    out.reserve(recording.sample_count() * recording.channel_labels.size() * 20);
    for (std::size_t c = 0; c < recording.channel_labels.size(); ++c) {
        if (c) out += ',';
        out += recording.channel_labels[c];
    }
    out += '\n';
    for (std::size_t i = 0; i < recording.sample_count(); ++i) {
        for (std::size_t c = 0; c < recording.samples.size(); ++c) {
            if (c) out += ',';
            append_double(out, recording.samples[c][i]);
        }
        out += '\n';
    }
    std::ofstream(csv_path, std::ios::binary) << out;

    json m;
    m["subject_id"] = recording.key.subject_id;
    m["session_index"] = recording.key.session_index;
    m["label"] = to_string(recording.key.label);
    m["sampling_rate_hz"] = recording.sampling_rate_hz;
    m["data_file"] = csv_path.filename().string();
    m["montage"] = recording.standard_montage ? "10-20" : "custom";
    std::ofstream(manifest_path, std::ios::binary) << m.dump(2) << '\n';
    if (!fs::exists(csv_path) || !fs::exists(manifest_path))
        throw IoError("failed to write recording into " + directory.string());
    return manifest_path;
}

std::vector<fs::path> list_manifests(const fs::path& directory) {
    if (!fs::is_directory(directory)) throw IoError(directory.string() + " is not a directory");
    std::vector<fs::path> out;
    for (const auto& entry : fs::directory_iterator(directory))
        if (entry.is_regular_file() && entry.path().extension() == ".json" &&
            entry.path().filename() != "run_manifest.json" && entry.path().filename() != "synth_spec.json")
            out.push_back(entry.path());
    std::sort(out.begin(), out.end());
    return out;
}

DatasetSplit session_split(std::span<const RecordingKey> recordings) {
    // subject -> indices by session, in first-appearance order of subjects
    std::vector<std::string> order;
    std::map<std::string, std::vector<std::size_t>> by_subject;
    for (std::size_t i = 0; i < recordings.size(); ++i) {
        auto [it, inserted] = by_subject.try_emplace(recordings[i].subject_id);
        if (inserted) order.push_back(recordings[i].subject_id);
        it->second.push_back(i);
    }
    DatasetSplit split;
    for (const auto& subject : order) {
        const auto& idx = by_subject[subject];
        std::array<std::size_t, 6> slot{};
        std::array<bool, 6> filled{};
        bool ok = idx.size() == 6;
        for (std::size_t i : idx) {
            const int s = recordings[i].session_index;
            if (s < 1 || s > 6 || filled[static_cast<std::size_t>(s - 1)]) {
                ok = false;
                break;
            }
            filled[static_cast<std::size_t>(s - 1)] = true;
            slot[static_cast<std::size_t>(s - 1)] = i;
        }
        if (!ok)
            throw ValidationError("subject " + subject + " has " + std::to_string(idx.size()) +
                                  " recordings; the split needs exactly sessions 1-6");
        for (std::size_t s = 0; s < 5; ++s) split.training.push_back(slot[s]);
        split.testing.push_back(slot[5]);
    }
    return split;
}

DatasetSplit session_split(std::span<const EegRecording> recordings) {
    std::vector<RecordingKey> keys;
    keys.reserve(recordings.size());
    for (const auto& r : recordings) keys.push_back(r.key);
    return session_split(keys);
}

SynthSpec default_synth_spec() {
    SynthSpec spec;
    spec.channels.assign(kStandardMontage.begin(), kStandardMontage.end());
    ClassProfile ad;
    ad.label = Label::AD;
    ad.channels_affected = {"F7", "F8", "T7", "T8", "P7", "P8", "P4"};
    ad.band = "alpha";
    ad.amplitude = 0.4;
    spec.profiles.push_back(ad);
    return spec;
}

void validate(const SynthSpec& spec) {
    auto bad = [](const std::string& what) { throw ValidationError("synth spec: " + what); };
    if (spec.subjects_ad < 0 || spec.subjects_nonad < 0 || spec.subjects_ad + spec.subjects_nonad == 0)
        bad("subject counts must be non-negative and not both zero");
    if (spec.subjects_ad + spec.subjects_nonad > 99) bad("at most 99 subjects");
    if (spec.sessions < 1) bad("sessions must be >= 1");
    if (spec.channels.empty()) bad("no channels");
    std::set<std::string> seen;
    for (const auto& c : spec.channels)
        if (!seen.insert(c).second) bad("duplicate channel " + c);
    if (!(spec.sampling_rate_hz > kMinSamplingRateHz)) bad("sampling rate must exceed 60 Hz");
    if (!(spec.duration_seconds > 0.0)) bad("duration must be positive");
    for (double a : spec.band_amplitudes)
        if (!(a >= 0.0) || !std::isfinite(a)) bad("band amplitudes must be finite and >= 0");
    if (spec.components_per_band < 1) bad("components_per_band must be >= 1");
    if (!(spec.envelope_depth >= 0.0 && spec.envelope_depth < 1.0)) bad("envelope_depth must lie in [0, 1)");
    if (!(spec.subject_jitter >= 0.0)) bad("subject_jitter must be >= 0");
    if (!(spec.noise_sigma >= 0.0)) bad("noise_sigma must be >= 0");
    for (const auto& p : spec.profiles) {
        try {
            (void)parse_band(p.band);
        } catch (const ParameterError& e) {
            bad(e.what());
        }
        if (!(p.amplitude >= 0.0) || !std::isfinite(p.amplitude)) bad("profile amplitude must be finite and >= 0");
        if (p.noise_sigma && !(*p.noise_sigma >= 0.0)) bad("profile noise_sigma must be >= 0");
        if (p.frequency_hz) {
            const auto& def = band_definition(parse_band(p.band));
            if (!(*p.frequency_hz >= def.low_hz && *p.frequency_hz < def.high_hz))
                bad("profile frequency_hz must lie inside its band");
        }
        for (const auto& c : p.channels_affected)
            if (!seen.count(c)) bad("profile channel " + c + " is not in the channel list");
    }
}

std::vector<EegRecording> synthesize_dataset(const SynthSpec& spec, std::uint64_t seed) {
    validate(spec);
    const auto n = static_cast<std::size_t>(std::llround(spec.duration_seconds * spec.sampling_rate_hz));
    const int subjects = spec.subjects_ad + spec.subjects_nonad;
    const bool standard = std::all_of(spec.channels.begin(), spec.channels.end(),
                                      [](const std::string& c) { return is_standard_channel(c); });
    const double two_pi = 2.0 * std::numbers::pi;

    std::vector<EegRecording> out;
    out.reserve(static_cast<std::size_t>(subjects * spec.sessions));
    for (int s = 0; s < subjects; ++s) {
        const Label label = s < spec.subjects_ad ? Label::AD : Label::NonAD;
        char id[16];
        std::snprintf(id, sizeof id, "S%02d", s + 1);

        // Per-subject band gains, shared across sessions and channels.
        Rng subject_rng(derive_seed(seed, {kSubjectStream, static_cast<std::uint64_t>(s)}));
        std::array<double, 4> gain{};
        for (double& g : gain) g = std::max(0.0, 1.0 + spec.subject_jitter * subject_rng.normal());

        for (int session = 1; session <= spec.sessions; ++session) {
            EegRecording rec;
            rec.key = {id, session, label};
            rec.sampling_rate_hz = spec.sampling_rate_hz;
            rec.channel_labels = spec.channels;
            rec.standard_montage = standard;
            rec.samples.reserve(spec.channels.size());
            for (std::size_t c = 0; c < spec.channels.size(); ++c) {
                const std::string& channel = spec.channels[c];
                Rng rng(derive_seed(seed, {kChannelStream, static_cast<std::uint64_t>(s),
                                           static_cast<std::uint64_t>(session), static_cast<std::uint64_t>(c)}));
                std::vector<ToneMixture> mixtures;
                for (std::size_t b = 0; b < kAllBands.size(); ++b) {
                    const Band band = kAllBands[b];
                    const auto& def = band_definition(band);
                    const ClassProfile* profile = find_profile(spec, label, band, channel);
                    const double rms = (profile ? profile->amplitude : spec.band_amplitudes[b]) * gain[b];
                    ToneMixture mix;
                    const int components = profile && profile->frequency_hz ? 1 : spec.components_per_band;
                    for (int k = 0; k < components; ++k) {
                        mix.frequency.push_back(profile && profile->frequency_hz
                                                    ? *profile->frequency_hz
                                                    : rng.uniform(def.low_hz, def.high_hz));
                        mix.phase.push_back(rng.uniform(0.0, two_pi));
                    }
                    mix.amplitude = rms * std::sqrt(2.0 / components);
                    mix.envelope_hz = rng.uniform(0.05, 0.25);
                    mix.envelope_phase = rng.uniform(0.0, two_pi);
                    if (rms > 0.0) mixtures.push_back(std::move(mix));
                }
                const double sigma = channel_noise(spec, label, channel);
                std::vector<double> x(n);
                for (std::size_t i = 0; i < n; ++i) {
                    const double t = static_cast<double>(i) / spec.sampling_rate_hz;
                    double v = 0.0;
                    for (const auto& mix : mixtures) {
                        const double env =
                            1.0 + spec.envelope_depth * std::sin(two_pi * mix.envelope_hz * t + mix.envelope_phase);
                        double tones = 0.0;
                        for (std::size_t k = 0; k < mix.frequency.size(); ++k)
                            tones += std::sin(two_pi * mix.frequency[k] * t + mix.phase[k]);
                        v += mix.amplitude * env * tones;
                    }
                    x[i] = v + (sigma > 0.0 ? sigma * rng.normal() : 0.0);
                }
                rec.samples.push_back(std::move(x));
            }
            out.push_back(std::move(rec));
        }
    }
    return out;
}

std::string synth_spec_to_json(const SynthSpec& spec) {
    json j;
    j["subjects_per_class"] = {{"AD", spec.subjects_ad}, {"NonAD", spec.subjects_nonad}};
    j["sessions"] = spec.sessions;
    j["channels"] = spec.channels;
    j["duration_seconds"] = spec.duration_seconds;
    j["sampling_rate_hz"] = spec.sampling_rate_hz;
    json bands;
    for (std::size_t b = 0; b < kAllBands.size(); ++b) bands[std::string(to_string(kAllBands[b]))] = spec.band_amplitudes[b];
    j["band_amplitudes"] = bands;
    j["components_per_band"] = spec.components_per_band;
    j["envelope_depth"] = spec.envelope_depth;
    j["subject_jitter"] = spec.subject_jitter;
    j["noise_sigma"] = spec.noise_sigma;
    j["profiles"] = json::array();
    for (const auto& p : spec.profiles) {
        json pj;
        pj["class"] = to_string(p.label);
        pj["channels_affected"] = p.channels_affected;
        pj["band"] = p.band;
        pj["amplitude"] = p.amplitude;
        pj["noise_sigma"] = p.noise_sigma ? json(*p.noise_sigma) : json(nullptr);
        if (p.frequency_hz) pj["frequency_hz"] = *p.frequency_hz;
        j["profiles"].push_back(pj);
    }
    return j.dump(2);
}

SynthSpec synth_spec_from_json(std::string_view text) {
    SynthSpec spec;
    try {
        const json j = json::parse(text);
        if (j.contains("subjects_per_class")) {
            const auto& c = j.at("subjects_per_class");
            spec.subjects_ad = c.value("AD", spec.subjects_ad);
            spec.subjects_nonad = c.value("NonAD", spec.subjects_nonad);
        }
        spec.sessions = j.value("sessions", spec.sessions);
        if (j.contains("channels")) {
            spec.channels = j.at("channels").get<std::vector<std::string>>();
        } else {
            spec.channels.assign(kStandardMontage.begin(), kStandardMontage.end());
        }
        spec.duration_seconds = j.value("duration_seconds", spec.duration_seconds);
        spec.sampling_rate_hz = j.value("sampling_rate_hz", spec.sampling_rate_hz);
        if (j.contains("band_amplitudes")) {
            const auto& b = j.at("band_amplitudes");
            for (std::size_t i = 0; i < kAllBands.size(); ++i)
                spec.band_amplitudes[i] = b.value(std::string(to_string(kAllBands[i])), spec.band_amplitudes[i]);
        }
        spec.components_per_band = j.value("components_per_band", spec.components_per_band);
        spec.envelope_depth = j.value("envelope_depth", spec.envelope_depth);
        spec.subject_jitter = j.value("subject_jitter", spec.subject_jitter);
        spec.noise_sigma = j.value("noise_sigma", spec.noise_sigma);
        for (const auto& pj : j.value("profiles", json::array())) {
            ClassProfile p;
            p.label = parse_label(pj.at("class").get<std::string>());
            p.channels_affected = pj.value("channels_affected", std::vector<std::string>{});
            p.band = pj.at("band").get<std::string>();
            p.amplitude = pj.at("amplitude").get<double>();
            if (pj.contains("noise_sigma") && !pj.at("noise_sigma").is_null())
                p.noise_sigma = pj.at("noise_sigma").get<double>();
            if (pj.contains("frequency_hz")) p.frequency_hz = pj.at("frequency_hz").get<double>();
            spec.profiles.push_back(std::move(p));
        }
    } catch (const json::exception& e) {
        throw ValidationError(std::string("synth spec: ") + e.what());
    }
    validate(spec);
    return spec;
}

}  // namespace qeeg
