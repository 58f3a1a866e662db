#include "qeeg/spectral.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

#include <unsupported/Eigen/FFT>

#include "qeeg/error.hpp"

namespace qeeg {

namespace {

constexpr std::array<BandDefinition, 4> kDefaultBands{{
    {Band::Delta, 1.0, 4.0},
    {Band::Theta, 4.0, 8.0},
    {Band::Alpha, 8.0, 13.0},
    {Band::Beta, 13.0, 30.0},
}};

// Decimal segment lengths such as 0.1 s do not multiply to exact integers.
constexpr double kIntegralSlack = 1e-9;

double samples_per_segment(double sampling_rate_hz, double segment_seconds) {
    if (!(segment_seconds > 0.0) || !std::isfinite(segment_seconds))
        throw ParameterError("segment length must be a positive number of seconds");
    if (!(sampling_rate_hz > 0.0)) throw ParameterError("sampling rate must be positive");
    return segment_seconds * sampling_rate_hz;
}

/// |X_k|^2 of the Hann-windowed segment for every bin inside [1, 30) Hz,
/// together with the bin frequencies.
struct Periodogram {
    std::vector<double> frequency;
    std::vector<double> power;
};

Periodogram periodogram(std::span<const double> segment, double sampling_rate_hz) {
    const std::size_t n = segment.size();
    if (n < 2) throw ParameterError("segment needs at least 2 samples");
    std::vector<double> windowed(n);
    const double denom = static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        const double w = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / denom));
        windowed[i] = segment[i] * w;
    }
    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> spectrum;
    fft.fwd(spectrum, windowed);

    Periodogram out;
    // One-sided scaling and the 1/(fs sum w^2) density factor are common to
    // every bin in range and cancel in the ratio.
    for (std::size_t k = 1; k <= n / 2; ++k) {
        const double f = static_cast<double>(k) * sampling_rate_hz / static_cast<double>(n);
        if (f < kAnalysisLowHz) continue;
        if (f >= kAnalysisHighHz) break;
        out.frequency.push_back(f);
        out.power.push_back(std::norm(spectrum[k]));
    }
    return out;
}

double in_range_total(const Periodogram& pg) {
    double total = 0.0;
    for (double p : pg.power) total += p;
    if (!(total > 0.0)) throw DegenerateError("segment has no power in 1-30 Hz (dead channel or dropout)");
    return total;
}

}  // namespace

std::string_view to_string(Band band) noexcept {
    switch (band) {
        case Band::Delta: return "delta";
        case Band::Theta: return "theta";
        case Band::Alpha: return "alpha";
        case Band::Beta: return "beta";
    }
    return "unknown";
}

Band parse_band(std::string_view text) {
    for (Band b : kAllBands)
        if (text == to_string(b)) return b;
    throw ParameterError("unknown band '" + std::string(text) + "' (expected delta, theta, alpha or beta)");
}

const BandDefinition& band_definition(Band band) noexcept { return kDefaultBands[static_cast<std::size_t>(band)]; }

std::size_t segment_count(std::size_t sample_count, double sampling_rate_hz, double segment_seconds) {
    const double length = samples_per_segment(sampling_rate_hz, segment_seconds);
    return static_cast<std::size_t>(std::floor(static_cast<double>(sample_count) / length + kIntegralSlack));
}

SegmentLayout segment_layout(std::size_t sample_count, double sampling_rate_hz, double segment_seconds) {
    const double length = samples_per_segment(sampling_rate_hz, segment_seconds);
    if (length < 2.0 - kIntegralSlack) {
        std::ostringstream os;
        os << "segment of " << segment_seconds << " s holds " << length << " samples at " << sampling_rate_hz
           << " Hz; at least 2 are needed";
        throw ParameterError(os.str());
    }
    const std::size_t count = segment_count(sample_count, sampling_rate_hz, segment_seconds);
    if (count == 0) {
        std::ostringstream os;
        os << "segment of " << segment_seconds << " s is longer than the recording ("
           << static_cast<double>(sample_count) / sampling_rate_hz << " s)";
        throw ParameterError(os.str());
    }
    SegmentLayout layout;
    layout.starts.reserve(count);
    layout.lengths.reserve(count);
    auto boundary = [&](std::size_t i) {
        const auto b = static_cast<std::size_t>(std::llround(static_cast<double>(i) * length));
        return std::min(b, sample_count);
    };
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t start = boundary(i);
        layout.starts.push_back(start);
        layout.lengths.push_back(boundary(i + 1) - start);
    }
    return layout;
}

std::vector<std::vector<std::span<const double>>> segment(const EegRecording& recording, double segment_seconds) {
    const auto layout = segment_layout(recording.sample_count(), recording.sampling_rate_hz, segment_seconds);
    std::vector<std::vector<std::span<const double>>> out;
    out.reserve(recording.samples.size());
    for (const auto& channel : recording.samples) {
        std::vector<std::span<const double>> segs;
        segs.reserve(layout.count());
        const std::span<const double> all(channel);
        for (std::size_t s = 0; s < layout.count(); ++s) segs.push_back(all.subspan(layout.starts[s], layout.lengths[s]));
        out.push_back(std::move(segs));
    }
    return out;
}

double relative_band_power(std::span<const double> segment, double sampling_rate_hz, const BandDefinition& band) {
    if (!(band.low_hz < band.high_hz)) throw ParameterError("band needs low_hz < high_hz");
    const Periodogram pg = periodogram(segment, sampling_rate_hz);
    const double total = in_range_total(pg);
    double in_band = 0.0;
    for (std::size_t i = 0; i < pg.power.size(); ++i)
        if (pg.frequency[i] >= band.low_hz && pg.frequency[i] < band.high_hz) in_band += pg.power[i];
    return in_band / total;
}

std::array<double, 4> relative_band_powers(std::span<const double> segment, double sampling_rate_hz) {
    const Periodogram pg = periodogram(segment, sampling_rate_hz);
    const double total = in_range_total(pg);
    std::array<double, 4> bands{};
    for (std::size_t i = 0; i < pg.power.size(); ++i) {
        for (std::size_t b = 0; b < kDefaultBands.size(); ++b) {
            if (pg.frequency[i] >= kDefaultBands[b].low_hz && pg.frequency[i] < kDefaultBands[b].high_hz) {
                bands[b] += pg.power[i];
                break;
            }
        }
    }
    for (double& v : bands) v /= total;
    return bands;
}

std::vector<BandFeatureVector> featurize(const EegRecording& recording, double segment_seconds) {
    const auto segments = segment(recording, segment_seconds);
    std::vector<BandFeatureVector> out;
    out.reserve(segments.size() * kAllBands.size());
    for (std::size_t c = 0; c < segments.size(); ++c) {
        std::array<std::vector<double>, 4> series;
        for (auto& s : series) s.reserve(segments[c].size());
        for (std::size_t s = 0; s < segments[c].size(); ++s) {
            std::array<double, 4> powers;
            try {
                powers = relative_band_powers(segments[c][s], recording.sampling_rate_hz);
            } catch (const DegenerateError& e) {
                std::ostringstream os;
                os << "channel " << recording.channel_labels[c] << " (index " << c << "), segment " << s << ": "
                   << e.what();
                throw DegenerateError(os.str());
            }
            for (std::size_t b = 0; b < 4; ++b) series[b].push_back(powers[b]);
        }
        for (std::size_t b = 0; b < 4; ++b)
            out.push_back({recording.channel_labels[c], kAllBands[b], std::move(series[b]), segment_seconds});
    }
    return out;
}

}  // namespace qeeg
