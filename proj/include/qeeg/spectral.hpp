#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qeeg/dataset.hpp"

namespace qeeg {

enum class Band { Delta, Theta, Alpha, Beta };

inline constexpr std::array<Band, 4> kAllBands{Band::Delta, Band::Theta, Band::Alpha, Band::Beta};

/// Relative power is taken against [1, 30) Hz.
inline constexpr double kAnalysisLowHz = 1.0;
inline constexpr double kAnalysisHighHz = 30.0;

std::string_view to_string(Band band) noexcept;
/// Throws ParameterError for anything other than delta/theta/alpha/beta.
Band parse_band(std::string_view text);

/// Half-open frequency interval [low_hz, high_hz).
struct BandDefinition {
    Band name;
    double low_hz;
    double high_hz;
};

/// delta [1,4), theta [4,8), alpha [8,13), beta [13,30): an exact partition of
/// the analysis range.
const BandDefinition& band_definition(Band band) noexcept;

/// Relative band power of one channel over successive segments.
struct BandFeatureVector {
    std::string channel;
    Band band;
    std::vector<double> values;  ///< N_s values in [0, 1]
    double segment_seconds;
};

/// Boundaries of the non-overlapping segments of a recording.
///
/// Segment i covers samples [round(i L), round((i+1) L)) where
/// L = segment_seconds * sampling_rate; the trailing partial segment is
/// dropped, so N_s = floor(N_w / L). When L is not an integer the segment
/// lengths alternate between floor(L) and ceil(L).
struct SegmentLayout {
    std::vector<std::size_t> starts;
    std::vector<std::size_t> lengths;

    std::size_t count() const noexcept { return starts.size(); }
};

/// Throws ParameterError when a segment would hold fewer than 2 samples or
/// the recording is shorter than one segment.
SegmentLayout segment_layout(std::size_t sample_count, double sampling_rate_hz, double segment_seconds);

/// floor(N_w / (T_s f_w)), tolerant to the rounding of decimal T_s values.
std::size_t segment_count(std::size_t sample_count, double sampling_rate_hz, double segment_seconds);

/// Per channel, per segment views into the recording's samples.
std::vector<std::vector<std::span<const double>>> segment(const EegRecording& recording,
                                                          double segment_seconds);

/// BP_band / BP over [1, 30) Hz from a Hann-windowed periodogram of one
/// segment. Throws DegenerateError if the in-range power is zero and
/// ParameterError for segments shorter than 2 samples.
double relative_band_power(std::span<const double> segment, double sampling_rate_hz, const BandDefinition& band);

/// The four default bands from a single periodogram, in kAllBands order.
std::array<double, 4> relative_band_powers(std::span<const double> segment, double sampling_rate_hz);

/// One vector per (channel, band), channel-major, bands in kAllBands order.
/// Degenerate segments are reported with channel and segment index.
std::vector<BandFeatureVector> featurize(const EegRecording& recording, double segment_seconds);

}  // namespace qeeg
