#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qeeg/dataset.hpp"
#include "qeeg/spectral.hpp"

namespace qeeg {

/// Relative band powers for a whole dataset: recordings x channels x bands,
/// each entry a series of N_s segment values. All recordings share one
/// montage and segment length.
class FeatureTable {
public:
    FeatureTable() = default;
    FeatureTable(double segment_seconds, std::vector<std::string> channels, std::size_t segments);

    double segment_seconds() const noexcept { return segment_seconds_; }
    std::size_t segments() const noexcept { return segments_; }
    const std::vector<std::string>& channels() const noexcept { return channels_; }
    const std::vector<RecordingKey>& recordings() const noexcept { return keys_; }
    std::size_t recording_count() const noexcept { return keys_.size(); }

    /// Throws ValidationError for an unknown channel name.
    std::size_t channel_index(const std::string& name) const;

    std::span<const double> values(std::size_t recording, std::size_t channel, Band band) const;

    /// Appends one recording; `features` holds one vector per (channel, band)
    /// in this table's channel order.
    void add(RecordingKey key, std::span<const BandFeatureVector> features);

    /// Copy restricted to the given recordings, in the given order.
    FeatureTable select(std::span<const std::size_t> recordings) const;

    /// FNV-1a over every stored value in storage order.
    std::string checksum() const;

    friend bool operator==(const FeatureTable&, const FeatureTable&) = default;

private:
    std::size_t offset(std::size_t recording, std::size_t channel, Band band) const;

    double segment_seconds_ = 0.0;
    std::vector<std::string> channels_;
    std::size_t segments_ = 0;
    std::vector<RecordingKey> keys_;
    std::vector<double> data_;
};

/// Featurizes every recording (in parallel, output in input order).
/// `channels`, when given, restricts the table to those montage channels.
FeatureTable build_feature_table(std::span<const EegRecording> recordings, double segment_seconds,
                                 std::size_t parallelism = 1,
                                 std::optional<std::vector<std::string>> channels = std::nullopt);

/// Feature cache CSV: optional '#' comment lines, then the header
/// subject_id,session_index,label,channel,band,segment_index,value
/// and one row per value (recording, channel, band, segment order).
/// The segment length travels in a "# segment_seconds=<v>" comment.
void write_feature_cache(const FeatureTable& table, std::ostream& out);
FeatureTable read_feature_cache(const std::filesystem::path& path);

}  // namespace qeeg
