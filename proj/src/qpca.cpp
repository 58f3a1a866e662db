#include "qeeg/qpca.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "qeeg/error.hpp"
#include "qeeg/json_io.hpp"

namespace qeeg {

using nlohmann::json;

ChannelQuadruple::ChannelQuadruple(std::array<std::string, 4> channels) : channels_(std::move(channels)) {
    const std::set<std::string> distinct(channels_.begin(), channels_.end());
    if (distinct.size() != 4 || distinct.count(""))
        throw ValidationError("channel quadruple needs 4 distinct non-empty names, got " + to_string());
}

ChannelQuadruple ChannelQuadruple::parse(std::string_view text) {
    std::array<std::string, 4> names;
    std::size_t n = 0;
    std::size_t start = 0;
    for (;;) {
        const auto pos = text.find(',', start);
        const auto field = text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start);
        if (n == 4) throw ValidationError("channel quadruple needs exactly 4 names: '" + std::string(text) + "'");
        names[n++] = std::string(field);
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    if (n != 4) throw ValidationError("channel quadruple needs exactly 4 names: '" + std::string(text) + "'");
    return ChannelQuadruple(std::move(names));
}

std::string ChannelQuadruple::to_string() const {
    return channels_[0] + "," + channels_[1] + "," + channels_[2] + "," + channels_[3];
}

QuaternionVector embed(std::span<const double> ch1, std::span<const double> ch2, std::span<const double> ch3,
                       std::span<const double> ch4) {
    const std::size_t n = ch1.size();
    if (ch2.size() != n || ch3.size() != n || ch4.size() != n)
        throw ValidationError("embed: channel feature vectors differ in length");
    QuaternionVector out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = Quaternion(ch1[i], ch2[i], ch3[i], ch4[i]);
    return out;
}

QuaternionVector embed(std::span<const BandFeatureVector> four_channels) {
    if (four_channels.size() != 4) throw ValidationError("embed: need exactly 4 channel feature vectors");
    for (const auto& f : four_channels)
        if (f.band != four_channels[0].band) throw ValidationError("embed: channel feature vectors differ in band");
    return embed(four_channels[0].values, four_channels[1].values, four_channels[2].values, four_channels[3].values);
}

QuaternionVector embed_pure(std::span<const double> ch1, std::span<const double> ch2, std::span<const double> ch3) {
    const std::size_t n = ch1.size();
    if (ch2.size() != n || ch3.size() != n) throw ValidationError("embed: channel feature vectors differ in length");
    QuaternionVector out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = Quaternion(0.0, ch1[i], ch2[i], ch3[i]);
    return out;
}

std::string_view to_string(Projection projection) noexcept {
    switch (projection) {
        case Projection::Mean: return "mean";
        case Projection::Absolute: return "absolute";
        case Projection::Norm: return "norm";
        case Projection::Phase: return "phase";
    }
    return "unknown";
}

Projection parse_projection(std::string_view text) {
    for (Projection p : kAllProjections)
        if (text == to_string(p)) return p;
    throw ParameterError("unknown projection '" + std::string(text) + "' (expected mean, absolute, norm or phase)");
}

CenteredData center(std::span<const QuaternionVector> training) {
    if (training.empty()) throw ValidationError("no training vectors");
    const std::size_t n = training.front().size();
    if (n == 0) throw ValidationError("training vectors are empty");
    for (const auto& v : training)
        if (v.size() != n) throw ValidationError("training vectors differ in length");

    const double m = static_cast<double>(training.size());
    CenteredData out;
    out.mean.assign(n, Quaternion{});
    for (const auto& v : training)
        for (std::size_t i = 0; i < n; ++i) out.mean[i] = out.mean[i] + v[i];
    for (auto& q : out.mean) q = q / m;

    out.centered = QuaternionMatrix(training.size(), n);
    for (std::size_t r = 0; r < training.size(); ++r)
        for (std::size_t i = 0; i < n; ++i) out.centered(r, i) = training[r][i] - out.mean[i];
    return out;
}

QuaternionMatrix covariance(const QuaternionMatrix& centered) {
    const std::size_t m = centered.rows();
    const std::size_t n = centered.cols();
    QuaternionMatrix c(n, n);
    // Upper triangle, then mirror; the diagonal of X^H X is real.
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a; b < n; ++b) {
            Quaternion acc;
            for (std::size_t r = 0; r < m; ++r) acc = acc + centered(r, a).conjugate() * centered(r, b);
            acc = acc / static_cast<double>(m);
            if (a == b) acc = Quaternion(acc.w());
            c(a, b) = acc;
            c(b, a) = acc.conjugate();
        }
    }
    return c;
}

std::size_t components_for_threshold(std::span<const double> eigenvalues, double threshold) {
    if (!(threshold > 0.0 && threshold <= 1.0)) throw ParameterError("eigenvalue threshold must lie in (0, 1]");
    double total = 0.0;
    for (double e : eigenvalues) total += e;
    if (!(total > 0.0)) return 1;
    double acc = 0.0;
    for (std::size_t i = 0; i < eigenvalues.size(); ++i) {
        acc += eigenvalues[i];
        if (acc / total >= threshold) return i + 1;
    }
    return eigenvalues.size();
}

QpcaModel fit(std::span<const QuaternionVector> training, const PcSelection& selection) {
    if (training.size() < 2)
        throw ValidationError("qpca fit needs at least 2 training vectors, got " + std::to_string(training.size()));
    CenteredData data = center(training);
    double scale = 0.0;
    for (const auto& v : training)
        for (const auto& q : v) scale += q.squared_norm();
    if (data.centered.frobenius_norm() <= 1e-12 * std::sqrt(scale))
        throw DegenerateError("qpca fit: all training vectors are identical (zero covariance)");

    const std::size_t m = training.size();
    const std::size_t n = data.mean.size();
    const std::size_t limit = std::min(m, n);

    const QSvdResult svd = qsvd(covariance(data.centered));

    QpcaModel model;
    model.eigenvalues = svd.singular_values;
    if (selection.fixed) {
        if (*selection.fixed < 1 || *selection.fixed > limit) {
            std::ostringstream os;
            os << "number of principal components " << *selection.fixed << " outside [1, " << limit << ']';
            throw ParameterError(os.str());
        }
        model.p = *selection.fixed;
    } else {
        model.p = std::min(limit, components_for_threshold(model.eigenvalues, selection.threshold));
    }
    if (model.p < model.eigenvalues.size()) {
        const double gap = model.eigenvalues[model.p - 1] - model.eigenvalues[model.p];
        model.spectrum_tie = gap <= 1e-12 * std::max(1.0, model.eigenvalues.front());
    }
    model.mean_vector = std::move(data.mean);
    model.basis = truncate(svd, model.p);
    return model;
}

QuaternionVector transform(const QpcaModel& model, std::span<const Quaternion> vector) {
    if (vector.size() != model.mean_vector.size())
        throw ShapeError("transform: vector length " + std::to_string(vector.size()) + " does not match model length " +
                         std::to_string(model.mean_vector.size()));
    QuaternionVector out(model.basis.cols());
    for (std::size_t i = 0; i < vector.size(); ++i) {
        const Quaternion centered = vector[i] - model.mean_vector[i];
        for (std::size_t c = 0; c < out.size(); ++c) out[c] = out[c] + centered * model.basis(i, c);
    }
    return out;
}

QuaternionMatrix transform(const QpcaModel& model, std::span<const QuaternionVector> vectors) {
    QuaternionMatrix out(vectors.size(), model.basis.cols());
    for (std::size_t r = 0; r < vectors.size(); ++r) {
        const auto row = transform(model, vectors[r]);
        for (std::size_t c = 0; c < row.size(); ++c) out(r, c) = row[c];
    }
    return out;
}

QpcaModel truncated(const QpcaModel& model, std::size_t p) {
    if (p < 1 || p > model.p) throw ParameterError("truncated: p must lie in [1, " + std::to_string(model.p) + "]");
    QpcaModel out = model;
    out.basis = model.basis.left_columns(p);
    out.p = p;
    if (p < out.eigenvalues.size()) {
        const double gap = out.eigenvalues[p - 1] - out.eigenvalues[p];
        out.spectrum_tie = gap <= 1e-12 * std::max(1.0, out.eigenvalues.front());
    }
    return out;
}

double project(const Quaternion& q, Projection method) {
    switch (method) {
        case Projection::Mean: return (q.w() + q.x() + q.y() + q.z()) / 4.0;
        case Projection::Absolute:
            return (std::abs(q.w()) + std::abs(q.x()) + std::abs(q.y()) + std::abs(q.z())) / 4.0;
        case Projection::Norm: return q.norm();
        case Projection::Phase:
            // atan2(0, 0) = 0: the zero quaternion has phase 0.
            return std::atan2(q.vector_norm(), q.w());
    }
    return 0.0;
}

RealFeatureMatrix project(const QuaternionMatrix& features, Projection method) {
    RealFeatureMatrix out(features.rows(), features.cols());
    for (std::size_t r = 0; r < features.rows(); ++r)
        for (std::size_t c = 0; c < features.cols(); ++c) out(r, c) = project(features(r, c), method);
    return out;
}

std::string to_json(const QpcaModel& model) {
    json j;
    j["band"] = to_string(model.band);
    j["quadruple"] = model.channels;
    j["segment_seconds"] = model.segment_seconds;
    j["p"] = model.p;
    j["projection"] = to_string(model.projection);
    json mean = json::array();
    for (const auto& q : model.mean_vector) mean.push_back(quaternion_to_json(q));
    j["mean_vector"] = std::move(mean);
    j["basis"] = matrix_to_json(model.basis);
    j["eigenvalues"] = model.eigenvalues;
    j["spectrum_tie"] = model.spectrum_tie;
    return j.dump(2);
}

QpcaModel qpca_model_from_json(std::string_view text) {
    try {
        const json j = json::parse(text);
        QpcaModel model;
        model.band = parse_band(j.at("band").get<std::string>());
        model.channels = j.at("quadruple").get<std::vector<std::string>>();
        model.segment_seconds = j.at("segment_seconds").get<double>();
        model.p = j.at("p").get<std::size_t>();
        model.projection = parse_projection(j.at("projection").get<std::string>());
        for (const auto& q : j.at("mean_vector")) model.mean_vector.push_back(quaternion_from_json(q));
        model.basis = matrix_from_json(j.at("basis"));
        model.eigenvalues = j.at("eigenvalues").get<std::vector<double>>();
        model.spectrum_tie = j.value("spectrum_tie", false);
        if (model.basis.rows() != model.mean_vector.size() || model.basis.cols() != model.p)
            throw ValidationError("qpca model: basis shape does not match mean vector length and p");
        return model;
    } catch (const json::exception& e) {
        throw ValidationError(std::string("qpca model: ") + e.what());
    }
}

}  // namespace qeeg
