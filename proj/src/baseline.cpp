#include "qeeg/baseline.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>
#include <json.hpp>

#include "qeeg/checksum.hpp"
#include "qeeg/error.hpp"
#include "qeeg/json_io.hpp"

namespace qeeg {

using nlohmann::json;

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::Map<const RowMatrix> as_eigen(const RealFeatureMatrix& m) {
    return {m.data().data(), static_cast<Eigen::Index>(m.rows()), static_cast<Eigen::Index>(m.cols())};
}

json outcome_json(const TrialOutcome& o) {
    json j;
    j["valid"] = o.valid;
    if (!o.valid) j["error"] = o.error;
    j["p_used"] = o.p_used;
    j["confusion"] = {{"tp", o.counts.tp}, {"tn", o.counts.tn}, {"fp", o.counts.fp}, {"fn", o.counts.fn}};
    j["acc"] = optional_to_json(o.metrics.acc);
    j["sen"] = optional_to_json(o.metrics.sen);
    j["spe"] = optional_to_json(o.metrics.spe);
    return j;
}

}  // namespace

RealPcaModel fit_real_pca(const RealFeatureMatrix& training, const PcSelection& selection) {
    const std::size_t m = training.rows();
    const std::size_t d = training.cols();
    if (m < 2) throw ValidationError("real pca fit needs at least 2 training vectors, got " + std::to_string(m));
    if (d == 0) throw ValidationError("training vectors are empty");

    const auto x = as_eigen(training);
    const Eigen::RowVectorXd mean = x.colwise().mean();
    const Eigen::MatrixXd centered = x.rowwise() - mean;
    if (centered.norm() <= 1e-12 * x.norm()) throw DegenerateError("real pca fit: all training vectors are identical");
    const Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(m);

    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    if (eig.info() != Eigen::Success) throw DegenerateError("real pca fit: eigen-decomposition failed");

    RealPcaModel model;
    model.mean.assign(mean.data(), mean.data() + d);
    for (Eigen::Index i = static_cast<Eigen::Index>(d); i-- > 0;)
        model.eigenvalues.push_back(std::max(0.0, eig.eigenvalues()(i)));

    const std::size_t limit = std::min(m, d);
    if (selection.fixed) {
        if (*selection.fixed < 1 || *selection.fixed > limit)
            throw ParameterError("number of principal components " + std::to_string(*selection.fixed) +
                                 " outside [1, " + std::to_string(limit) + "]");
        model.p = *selection.fixed;
    } else {
        model.p = std::min(limit, components_for_threshold(model.eigenvalues, selection.threshold));
    }

    model.basis = RealFeatureMatrix(d, model.p);
    for (std::size_t c = 0; c < model.p; ++c) {
        const auto v = eig.eigenvectors().col(static_cast<Eigen::Index>(d - 1 - c));
        Eigen::Index arg = 0;
        v.cwiseAbs().maxCoeff(&arg);
        const double sign = v(arg) < 0.0 ? -1.0 : 1.0;
        for (std::size_t r = 0; r < d; ++r) model.basis(r, c) = sign * v(static_cast<Eigen::Index>(r));
    }
    return model;
}

RealFeatureMatrix transform(const RealPcaModel& model, const RealFeatureMatrix& samples) {
    if (samples.cols() != model.mean.size())
        throw ShapeError("transform: vector length " + std::to_string(samples.cols()) +
                         " does not match model length " + std::to_string(model.mean.size()));
    const Eigen::Map<const Eigen::RowVectorXd> mean(model.mean.data(), static_cast<Eigen::Index>(model.mean.size()));
    const RowMatrix out = (as_eigen(samples).rowwise() - mean) * as_eigen(model.basis);
    return RealFeatureMatrix(samples.rows(), model.p, std::vector<double>(out.data(), out.data() + out.size()));
}

RealFeatureMatrix concatenate_channels(const FeatureTable& table, std::span<const std::size_t> recordings,
                                       const std::array<std::size_t, 4>& channels, Band band) {
    const std::size_t n = table.segments();
    RealFeatureMatrix out(recordings.size(), 4 * n);
    for (std::size_t i = 0; i < recordings.size(); ++i)
        for (std::size_t c = 0; c < 4; ++c) {
            const auto values = table.values(recordings[i], channels[c], band);
            for (std::size_t s = 0; s < n; ++s) out(i, c * n + s) = values[s];
        }
    return out;
}

TrialOutcome evaluate_real_pca(const RealFeatureMatrix& train, std::span<const int> train_labels,
                               const RealFeatureMatrix& test, std::span<const int> test_labels,
                               const PipelineParams& params) {
    try {
        PcSelection selection;
        switch (params.pcs.kind) {
            case PcPolicy::Kind::Fixed: selection.fixed = params.pcs.count; break;
            case PcPolicy::Kind::Threshold: selection.threshold = params.pcs.threshold; break;
            case PcPolicy::Kind::SweepBest:
                if (params.pcs.count < 1) throw ParameterError("component sweep limit must be >= 1");
                selection.fixed = std::min({params.pcs.count, train.rows(), train.cols()});
                break;
        }
        const RealPcaModel model = fit_real_pca(train, selection);
        const std::size_t first = params.pcs.kind == PcPolicy::Kind::SweepBest ? 1 : model.p;
        return best_over_components(transform(model, train), train_labels, transform(model, test), test_labels, first,
                                    model.p, params.svm_c);
    } catch (const Error& e) {
        TrialOutcome out;
        out.error = e.what();
        return out;
    }
}

ComparisonReport compare(const FeatureTable& table, const DatasetSplit& split,
                         const std::array<std::size_t, 4>& channels, Band band, const PipelineParams& params) {
    ComparisonReport report;
    report.band = band;
    report.params = params;
    for (std::size_t c = 0; c < 4; ++c) report.channels[c] = table.channels()[channels[c]];

    const EmbeddedSplit data = embed_split(table, split, channels, band);
    report.qpca = evaluate_qpca(data, params);
    {
        Fnv1a h;
        for (const auto* set : {&data.train, &data.test})
            for (const auto& v : *set)
                for (std::size_t c = 0; c < 4; ++c)
                    for (const auto& q : v) {
                        const double x = c == 0 ? q.w() : c == 1 ? q.x() : c == 2 ? q.y() : q.z();
                        h.update(std::span<const double>(&x, 1));
                    }
        report.qpca_input_checksum = h.hex();
    }

    const RealFeatureMatrix train = concatenate_channels(table, split.training, channels, band);
    const RealFeatureMatrix test = concatenate_channels(table, split.testing, channels, band);
    report.real_pca = evaluate_real_pca(train, data.train_labels, test, data.test_labels, params);
    {
        Fnv1a h;
        h.update(train.data());
        h.update(test.data());
        report.real_pca_input_checksum = h.hex();
    }
    return report;
}

std::string comparison_json(const ComparisonReport& report) {
    json j;
    j["qpca"] = outcome_json(report.qpca);
    j["real_pca"] = outcome_json(report.real_pca);
    j["params"] = {{"channels", report.channels},
                   {"band", to_string(report.band)},
                   {"segment_seconds", report.params.segment_seconds},
                   {"projection", to_string(report.params.projection)},
                   {"pcs", report.params.pcs.describe()},
                   {"svm_c", report.params.svm_c}};
    j["input_checksums"] = {{"qpca", report.qpca_input_checksum}, {"real_pca", report.real_pca_input_checksum}};
    return j.dump(2);
}

}  // namespace qeeg
