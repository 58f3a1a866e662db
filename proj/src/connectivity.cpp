#include "qeeg/connectivity.hpp"

#include <cmath>

#include <json.hpp>

#include "qeeg/error.hpp"
#include "qeeg/parallel.hpp"
#include "qeeg/search.hpp"

namespace qeeg {

using nlohmann::json;

std::string_view to_string(TupleMode mode) noexcept { return mode == TupleMode::Triple ? "triple" : "quadruple"; }

TupleMode parse_tuple_mode(std::string_view text) {
    if (text == "triple") return TupleMode::Triple;
    if (text == "quadruple") return TupleMode::Quadruple;
    throw ParameterError("unknown connectivity mode '" + std::string(text) + "' (expected triple or quadruple)");
}

std::size_t tuple_size(TupleMode mode) noexcept { return mode == TupleMode::Triple ? 3 : 4; }

QpcaModel fit_measure_basis(std::span<const QuaternionVector> pooled) {
    PcSelection one;
    one.fixed = 1;
    return fit(pooled, one);
}

std::vector<double> measure_values(const QpcaModel& basis, std::span<const QuaternionVector> samples) {
    std::vector<double> out;
    out.reserve(samples.size());
    for (const auto& s : samples) out.push_back(project(transform(basis, s).front(), Projection::Mean));
    return out;
}

double interclass_distance(std::span<const double> ns_measures, std::span<const double> ad_measures) {
    if (ns_measures.empty() || ad_measures.empty())
        throw ParameterError("interclass distance needs samples from both classes");
    auto mean = [](std::span<const double> v) {
        double s = 0.0;
        for (double x : v) s += x;
        return s / static_cast<double>(v.size());
    };
    return std::abs(mean(ns_measures) - mean(ad_measures));
}

std::vector<TupleMeasures> measure_tuples(const FeatureTable& table, std::span<const std::size_t> recordings,
                                          TupleMode mode, Band band, std::size_t parallelism) {
    const auto tuples = enumerate_tuples(table.channels().size(), tuple_size(mode), true);
    std::vector<TupleMeasures> out(tuples.size());
    parallel_for(tuples.size(), parallelism, [&](std::size_t i) {
        const auto& t = tuples[i];
        TupleMeasures& m = out[i];
        m.channels = t;
        std::vector<QuaternionVector> samples;
        samples.reserve(recordings.size());
        for (std::size_t r : recordings) {
            if (mode == TupleMode::Quadruple)
                samples.push_back(embed(table.values(r, t[0], band), table.values(r, t[1], band),
                                        table.values(r, t[2], band), table.values(r, t[3], band)));
            else
                samples.push_back(
                    embed_pure(table.values(r, t[0], band), table.values(r, t[1], band), table.values(r, t[2], band)));
        }
        try {
            const auto values = measure_values(fit_measure_basis(samples), samples);
            for (std::size_t s = 0; s < recordings.size(); ++s)
                (table.recordings()[recordings[s]].label == Label::AD ? m.ad : m.nonad).push_back(values[s]);
            m.distance = interclass_distance(m.nonad, m.ad);
            m.valid = true;
        } catch (const Error& e) {
            m.error = e.what();
            m.ad.clear();
            m.nonad.clear();
        }
    });
    return out;
}

ConnectivityTensor build_tensor(const FeatureTable& table, std::span<const TupleMeasures> measures, TupleMode mode,
                                Band band, Label label) {
    ConnectivityTensor tensor;
    tensor.mode = mode;
    tensor.band = band;
    tensor.label = label;
    tensor.axis_labels = table.channels();
    for (const auto& m : measures) {
        const auto& values = label == Label::AD ? m.ad : m.nonad;
        if (!m.valid || values.empty()) {
            ++tensor.missing;
            continue;
        }
        double s = 0.0;
        for (double v : values) s += v;
        tensor.values.emplace(m.channels, s / static_cast<double>(values.size()));
    }
    return tensor;
}

std::string tensor_json(const ConnectivityTensor& tensor) {
    json j;
    j["mode"] = to_string(tensor.mode);
    j["band"] = to_string(tensor.band);
    j["class"] = to_string(tensor.label);
    j["axis_labels"] = tensor.axis_labels;
    j["missing"] = tensor.missing;
    json entries = json::array();
    for (const auto& [key, value] : tensor.values) {
        std::vector<std::string> names;
        for (std::size_t c : key) names.push_back(tensor.axis_labels[c]);
        entries.push_back({{"channels", names}, {"value", value}});
    }
    j["entries"] = std::move(entries);
    return j.dump(2);
}

BandDistance band_distance(Band band, std::span<const TupleMeasures> measures) {
    BandDistance out;
    out.band = band;
    double sum = 0.0;
    for (const auto& m : measures) {
        if (!m.valid) {
            ++out.missing_tuples;
            continue;
        }
        ++out.valid_tuples;
        sum += m.distance;
        out.tuple_distances.push_back(m.distance);
        out.ad_measures.insert(out.ad_measures.end(), m.ad.begin(), m.ad.end());
        out.nonad_measures.insert(out.nonad_measures.end(), m.nonad.begin(), m.nonad.end());
    }
    if (out.valid_tuples > 0) out.dist = sum / static_cast<double>(out.valid_tuples);
    return out;
}

DistanceReport distance_report(const FeatureTable& table, std::span<const std::size_t> recordings, TupleMode mode,
                               std::size_t parallelism) {
    DistanceReport report;
    report.mode = mode;
    for (std::size_t r : recordings) {
        if (table.recordings()[r].label == Label::AD)
            ++report.ad_samples;
        else
            ++report.nonad_samples;
    }
    for (Band band : kAllBands)
        report.bands.push_back(band_distance(band, measure_tuples(table, recordings, mode, band, parallelism)));
    return report;
}

std::string distance_report_json(const DistanceReport& report) {
    json j;
    j["mode"] = to_string(report.mode);
    j["class_counts"] = {{"AD", report.ad_samples}, {"NonAD", report.nonad_samples}};
    json bands = json::array();
    for (const auto& b : report.bands) {
        bands.push_back({{"band", to_string(b.band)},
                         {"dist", b.dist},
                         {"valid_tuples", b.valid_tuples},
                         {"missing_tuples", b.missing_tuples},
                         {"tuple_distances", b.tuple_distances},
                         {"measures", {{"AD", b.ad_measures}, {"NonAD", b.nonad_measures}}}});
    }
    j["bands"] = std::move(bands);
    return j.dump(2);
}

}  // namespace qeeg
