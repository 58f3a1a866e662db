#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qeeg/error.hpp"

namespace qeeg {

enum class Label { AD, NonAD };

std::string_view to_string(Label label) noexcept;
/// Accepts "AD" and "NonAD"; throws ValidationError otherwise.
Label parse_label(std::string_view text);
/// Classifier target: AD is the positive class.
constexpr int label_sign(Label label) noexcept { return label == Label::AD ? +1 : -1; }

/// The 19 electrodes of the 10/20 montage, in canonical order.
const std::array<std::string_view, 19>& standard_montage() noexcept;
bool is_standard_channel(std::string_view name) noexcept;

/// Identity of one recording, shared by raw recordings and feature tables.
struct RecordingKey {
    std::string subject_id;
    int session_index = 0;  ///< 1-based
    Label label = Label::NonAD;

    friend bool operator==(const RecordingKey&, const RecordingKey&) = default;
};

/// One labeled multichannel session. Construct through `validate` (or the
/// loaders, which call it) so the invariants below hold:
/// equal-length channels, unique labels, finite samples, rate > 60 Hz.
struct EegRecording {
    RecordingKey key;
    double sampling_rate_hz = 0.0;
    std::vector<std::string> channel_labels;
    std::vector<std::vector<double>> samples;  ///< one series per channel
    bool standard_montage = false;             ///< labels restricted to the 10/20 set

    std::size_t sample_count() const noexcept { return samples.empty() ? 0 : samples.front().size(); }
    double duration_seconds() const noexcept {
        return static_cast<double>(sample_count()) / sampling_rate_hz;
    }

    friend bool operator==(const EegRecording&, const EegRecording&) = default;
};

enum class IngestIssue {
    MissingFile,
    MalformedManifest,
    MalformedHeader,
    RaggedRow,
    MalformedValue,
    NonFiniteSample,
    DuplicateLabel,
    UnknownMontageLabel,
    InvalidSamplingRate,
    EmptyRecording,
};

/// Ingestion failure carrying a machine-checkable category.
class IngestError : public ValidationError {
public:
    IngestError(IngestIssue issue, const std::string& what) : ValidationError(what), issue_(issue) {}
    IngestIssue issue() const noexcept { return issue_; }

private:
    IngestIssue issue_;
};

/// Throws IngestError on the first violated invariant.
void validate(const EegRecording& recording);

/// Reads a sidecar manifest
/// {subject_id, session_index, label, sampling_rate_hz, data_file[, montage]}
/// and the CSV it points to (header row of channel labels, one row per
/// sample instant). `data_file` is resolved relative to the manifest.
/// "montage": "10-20" declares the standard montage.
EegRecording load_recording(const std::filesystem::path& manifest_path);

/// Writes `<stem>.csv` and `<stem>.json` into `directory`; returns the
/// manifest path. Values are written in shortest round-trip form, so
/// load_recording reproduces samples bit-exactly.
std::filesystem::path save_recording(const EegRecording& recording, const std::filesystem::path& directory,
                                     const std::string& stem);

/// Manifests (*.json) directly inside `directory`, sorted by file name.
/// The run records run_manifest.json and synth_spec.json are skipped.
std::vector<std::filesystem::path> list_manifests(const std::filesystem::path& directory);

/// Indices into the recording list.
struct DatasetSplit {
    std::vector<std::size_t> training;
    std::vector<std::size_t> testing;
};

/// Sessions 1-5 of each subject train, session 6 tests. Every subject must
/// contribute exactly sessions 1..6; otherwise ValidationError naming the subject.
DatasetSplit session_split(std::span<const RecordingKey> recordings);
DatasetSplit session_split(std::span<const EegRecording> recordings);

/// Per-class spectral override for synthetic data.
struct ClassProfile {
    Label label = Label::AD;
    std::vector<std::string> channels_affected;  ///< empty = every channel
    std::string band;                            ///< delta | theta | alpha | beta
    double amplitude = 0.0;                      ///< RMS amplitude of the band component
    std::optional<double> noise_sigma;           ///< overrides the default noise on affected channels
    std::optional<double> frequency_hz;          ///< single tone instead of random components
};

/// Two-class synthetic dataset description. Each channel is a sum of
/// band-limited sinusoid mixtures (slowly amplitude-modulated) plus white
/// Gaussian noise.
struct SynthSpec {
    int subjects_ad = 5;
    int subjects_nonad = 6;
    int sessions = 6;
    std::vector<std::string> channels;
    double duration_seconds = 40.0;
    double sampling_rate_hz = 250.0;
    /// Background RMS amplitude per band, order delta, theta, alpha, beta.
    std::array<double, 4> band_amplitudes{1.0, 0.8, 1.0, 0.5};
    int components_per_band = 3;
    double envelope_depth = 0.5;  ///< slow amplitude modulation depth in [0, 1)
    double subject_jitter = 0.15;  ///< per-subject relative spread of band amplitudes
    double noise_sigma = 0.5;
    std::vector<ClassProfile> profiles;
};

/// 11 subjects (5 AD, 6 NonAD) x 6 sessions, 19 channels, 40 s at 250 Hz,
/// with reduced alpha amplitude (1.0 -> 0.4) on the temporal channels and P4
/// for the AD class.
SynthSpec default_synth_spec();

/// Throws ValidationError on an inconsistent spec.
void validate(const SynthSpec& spec);

/// Pure function of (spec, seed). Recordings are ordered by subject, then
/// session; subjects are S01.. with the AD subjects first.
std::vector<EegRecording> synthesize_dataset(const SynthSpec& spec, std::uint64_t seed);

/// JSON round-trip of SynthSpec (see README for the schema).
std::string synth_spec_to_json(const SynthSpec& spec);
SynthSpec synth_spec_from_json(std::string_view text);

}  // namespace qeeg
