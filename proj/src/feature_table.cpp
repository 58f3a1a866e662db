#include "qeeg/feature_table.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "qeeg/checksum.hpp"
#include "qeeg/error.hpp"
#include "qeeg/format.hpp"
#include "qeeg/parallel.hpp"

namespace qeeg {

namespace {

constexpr std::string_view kCacheHeader = "subject_id,session_index,label,channel,band,segment_index,value";
constexpr std::string_view kSegmentTag = "# segment_seconds=";

}  // namespace

FeatureTable::FeatureTable(double segment_seconds, std::vector<std::string> channels, std::size_t segments)
    : segment_seconds_(segment_seconds), channels_(std::move(channels)), segments_(segments) {}

std::size_t FeatureTable::channel_index(const std::string& name) const {
    const auto it = std::find(channels_.begin(), channels_.end(), name);
    if (it == channels_.end()) throw ValidationError("channel '" + name + "' is not in the feature table montage");
    return static_cast<std::size_t>(it - channels_.begin());
}

std::size_t FeatureTable::offset(std::size_t recording, std::size_t channel, Band band) const {
    return ((recording * channels_.size() + channel) * kAllBands.size() + static_cast<std::size_t>(band)) * segments_;
}

std::span<const double> FeatureTable::values(std::size_t recording, std::size_t channel, Band band) const {
    return {data_.data() + offset(recording, channel, band), segments_};
}

void FeatureTable::add(RecordingKey key, std::span<const BandFeatureVector> features) {
    if (features.size() != channels_.size() * kAllBands.size())
        throw ShapeError("feature table: expected " + std::to_string(channels_.size() * kAllBands.size()) +
                         " band vectors, got " + std::to_string(features.size()));
    const std::size_t base = data_.size();
    data_.resize(base + features.size() * segments_);
    for (const auto& f : features) {
        const std::size_t c = channel_index(f.channel);
        if (f.values.size() != segments_)
            throw ShapeError("feature table: channel " + f.channel + " has " + std::to_string(f.values.size()) +
                             " segments, expected " + std::to_string(segments_));
        const std::size_t at = base + (c * kAllBands.size() + static_cast<std::size_t>(f.band)) * segments_;
        std::copy(f.values.begin(), f.values.end(), data_.begin() + static_cast<std::ptrdiff_t>(at));
    }
    keys_.push_back(std::move(key));
}

FeatureTable FeatureTable::select(std::span<const std::size_t> recordings) const {
    FeatureTable out(segment_seconds_, channels_, segments_);
    const std::size_t block = channels_.size() * kAllBands.size() * segments_;
    out.data_.reserve(recordings.size() * block);
    for (std::size_t r : recordings) {
        if (r >= keys_.size()) throw ShapeError("feature table: recording index out of range");
        out.keys_.push_back(keys_[r]);
        const auto first = data_.begin() + static_cast<std::ptrdiff_t>(r * block);
        out.data_.insert(out.data_.end(), first, first + static_cast<std::ptrdiff_t>(block));
    }
    return out;
}

std::string FeatureTable::checksum() const {
    Fnv1a h;
    h.update(std::span<const double>(data_));
    return h.hex();
}

FeatureTable build_feature_table(std::span<const EegRecording> recordings, double segment_seconds,
                                 std::size_t parallelism, std::optional<std::vector<std::string>> channels) {
    if (recordings.empty()) throw ValidationError("no recordings to featurize");
    const auto& montage = recordings.front().channel_labels;
    for (const auto& r : recordings)
        if (r.channel_labels != montage)
            throw ValidationError("recording " + r.key.subject_id + " session " + std::to_string(r.key.session_index) +
                                  " uses a different channel order than the first recording");
    std::vector<std::size_t> selected;
    std::vector<std::string> names;
    if (channels) {
        for (const auto& name : *channels) {
            const auto it = std::find(montage.begin(), montage.end(), name);
            if (it == montage.end()) throw ValidationError("channel '" + name + "' is not in the recordings' montage");
            selected.push_back(static_cast<std::size_t>(it - montage.begin()));
            names.push_back(name);
        }
    } else {
        for (std::size_t c = 0; c < montage.size(); ++c) selected.push_back(c);
        names = montage;
    }

    std::vector<std::vector<BandFeatureVector>> per_recording(recordings.size());
    parallel_for(recordings.size(), parallelism, [&](std::size_t i) {
        const auto& src = recordings[i];
        EegRecording view;
        view.key = src.key;
        view.sampling_rate_hz = src.sampling_rate_hz;
        for (std::size_t c : selected) {
            view.channel_labels.push_back(src.channel_labels[c]);
            view.samples.push_back(src.samples[c]);
        }
        try {
            per_recording[i] = featurize(view, segment_seconds);
        } catch (const Error& e) {
            const std::string where = src.key.subject_id + " session " + std::to_string(src.key.session_index) + ": ";
            if (dynamic_cast<const DegenerateError*>(&e)) throw DegenerateError(where + e.what());
            if (dynamic_cast<const ParameterError*>(&e)) throw ParameterError(where + e.what());
            throw;
        }
    });

    const std::size_t segments = per_recording.front().front().values.size();
    FeatureTable table(segment_seconds, names, segments);
    for (std::size_t i = 0; i < recordings.size(); ++i) table.add(recordings[i].key, per_recording[i]);
    return table;
}

void write_feature_cache(const FeatureTable& table, std::ostream& out) {
    std::string buf;
    buf += kSegmentTag;
    append_double(buf, table.segment_seconds());
    buf += '\n';
    buf += kCacheHeader;
    buf += '\n';
    for (std::size_t r = 0; r < table.recording_count(); ++r) {
        const auto& key = table.recordings()[r];
        for (std::size_t c = 0; c < table.channels().size(); ++c) {
            for (Band band : kAllBands) {
                const auto values = table.values(r, c, band);
                for (std::size_t s = 0; s < values.size(); ++s) {
                    buf += key.subject_id;
                    buf += ',';
                    buf += std::to_string(key.session_index);
                    buf += ',';
                    buf += to_string(key.label);
                    buf += ',';
                    buf += table.channels()[c];
                    buf += ',';
                    buf += to_string(band);
                    buf += ',';
                    buf += std::to_string(s);
                    buf += ',';
                    append_double(buf, values[s]);
                    buf += '\n';
                }
            }
        }
    }
    out << buf;
}

FeatureTable read_feature_cache(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open feature cache " + path.string());

    struct Row {
        std::string channel;
        Band band;
        std::size_t segment;
        double value;
    };
    std::optional<double> segment_seconds;
    std::vector<RecordingKey> keys;
    std::vector<std::vector<Row>> rows;
    std::vector<std::string> channels;
    bool header_seen = false;
    std::string line;
    std::size_t line_no = 0;
    auto bad = [&](const std::string& what) {
        throw ValidationError(path.string() + ":" + std::to_string(line_no) + ": " + what);
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line.front() == '#') {
            if (line.rfind(kSegmentTag, 0) == 0) segment_seconds = std::stod(line.substr(kSegmentTag.size()));
            continue;
        }
        if (!header_seen) {
            if (line != kCacheHeader) bad("unexpected header");
            header_seen = true;
            continue;
        }
        std::vector<std::string> f;
        std::stringstream ss(line);
        for (std::string field; std::getline(ss, field, ',');) f.push_back(field);
        if (f.size() != 7) bad("expected 7 fields");
        RecordingKey key{f[0], std::stoi(f[1]), parse_label(f[2])};
        if (keys.empty() || !(keys.back() == key)) {
            keys.push_back(key);
            rows.emplace_back();
        }
        double value = 0.0;
        const auto res = std::from_chars(f[6].data(), f[6].data() + f[6].size(), value);
        if (res.ec != std::errc{}) bad("cannot parse value");
        rows.back().push_back({f[3], parse_band(f[4]), static_cast<std::size_t>(std::stoul(f[5])), value});
        if (keys.size() == 1 && std::find(channels.begin(), channels.end(), f[3]) == channels.end())
            channels.push_back(f[3]);
    }
    if (!segment_seconds) throw ValidationError(path.string() + ": missing '# segment_seconds=' line");
    if (keys.empty()) throw ValidationError(path.string() + ": no feature rows");

    const std::size_t expected = channels.size() * kAllBands.size();
    if (rows.front().size() % expected != 0) throw ValidationError(path.string() + ": incomplete first recording");
    const std::size_t segments = rows.front().size() / expected;
    FeatureTable table(*segment_seconds, channels, segments);
    for (std::size_t r = 0; r < keys.size(); ++r) {
        if (rows[r].size() != expected * segments)
            throw ValidationError(path.string() + ": recording " + keys[r].subject_id + " session " +
                          std::to_string(keys[r].session_index) + " has an incomplete feature block");
        std::map<std::pair<std::string, Band>, std::vector<double>> series;
        for (const auto& row : rows[r]) {
            auto& v = series[{row.channel, row.band}];
            if (v.empty()) v.assign(segments, 0.0);
            if (row.segment >= segments) throw ValidationError(path.string() + ": segment index out of range");
            v[row.segment] = row.value;
        }
        std::vector<BandFeatureVector> features;
        for (const auto& c : channels)
            for (Band b : kAllBands) {
                auto it = series.find({c, b});
                if (it == series.end()) throw ValidationError(path.string() + ": missing " + c + "/" + std::string(to_string(b)));
                features.push_back({c, b, std::move(it->second), *segment_seconds});
            }
        table.add(keys[r], features);
    }
    return table;
}

}  // namespace qeeg
