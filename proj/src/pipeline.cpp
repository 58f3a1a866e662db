#include "qeeg/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qeeg/error.hpp"
#include "qeeg/format.hpp"
#include "qeeg/parallel.hpp"

namespace qeeg {

namespace {

std::size_t count_errors(std::span<const int> truth, std::span<const int> predicted) {
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) wrong += truth[i] != predicted[i] ? 1 : 0;
    return wrong;
}

}  // namespace

std::string PcPolicy::describe() const {
    std::ostringstream os;
    switch (kind) {
        case Kind::Fixed: os << "fixed:" << count; break;
        case Kind::Threshold: os << "threshold:" << threshold; break;
        case Kind::SweepBest: os << "sweep:" << count; break;
    }
    return os.str();
}

EmbeddedSplit embed_split(const FeatureTable& table, const DatasetSplit& split, std::span<const std::size_t> channels,
                          Band band) {
    if (channels.size() != 3 && channels.size() != 4)
        throw ValidationError("embedding needs 3 or 4 channels, got " + std::to_string(channels.size()));
    auto embed_one = [&](std::size_t r) {
        if (channels.size() == 4)
            return embed(table.values(r, channels[0], band), table.values(r, channels[1], band),
                         table.values(r, channels[2], band), table.values(r, channels[3], band));
        return embed_pure(table.values(r, channels[0], band), table.values(r, channels[1], band),
                          table.values(r, channels[2], band));
    };
    EmbeddedSplit out;
    for (std::size_t r : split.training) {
        out.train.push_back(embed_one(r));
        out.train_labels.push_back(label_sign(table.recordings()[r].label));
    }
    for (std::size_t r : split.testing) {
        out.test.push_back(embed_one(r));
        out.test_labels.push_back(label_sign(table.recordings()[r].label));
    }
    return out;
}

TrainedPipeline train_pipeline(std::span<const QuaternionVector> train, std::span<const int> labels,
                               const PipelineParams& params) {
    PcSelection selection;
    switch (params.pcs.kind) {
        case PcPolicy::Kind::Fixed: selection.fixed = params.pcs.count; break;
        case PcPolicy::Kind::Threshold: selection.threshold = params.pcs.threshold; break;
        case PcPolicy::Kind::SweepBest:
            throw ParameterError("training a single model needs a fixed component count or an eigenvalue threshold");
    }
    TrainedPipeline out;
    out.qpca = fit(train, selection);
    out.qpca.projection = params.projection;
    out.qpca.segment_seconds = params.segment_seconds;
    out.svm = svm_fit(project(transform(out.qpca, train), params.projection), labels, params.svm_c);
    return out;
}

std::vector<int> predict(const TrainedPipeline& pipeline, std::span<const QuaternionVector> vectors) {
    return svm_predict(pipeline.svm, project(transform(pipeline.qpca, vectors), pipeline.qpca.projection));
}

TrialOutcome best_over_components(const RealFeatureMatrix& train, std::span<const int> train_labels,
                                  const RealFeatureMatrix& test, std::span<const int> test_labels, std::size_t first,
                                  std::size_t last, double svm_c) {
    TrialOutcome best;
    std::size_t best_wrong = 0;
    for (std::size_t p = first; p <= last; ++p) {
        const auto model = svm_fit(train.left_columns(p), train_labels, svm_c);
        const auto predicted = svm_predict(model, test.left_columns(p));
        const std::size_t wrong = count_errors(test_labels, predicted);
        if (!best.valid || wrong < best_wrong) {
            best.valid = true;
            best_wrong = wrong;
            best.p_used = p;
            best.counts = confusion(test_labels, predicted);
        }
    }
    best.metrics = metrics(best.counts);
    return best;
}

TrialOutcome evaluate_qpca(const EmbeddedSplit& data, const PipelineParams& params) {
    try {
        if (params.pcs.kind != PcPolicy::Kind::SweepBest) {
            const auto trained = train_pipeline(data.train, data.train_labels, params);
            TrialOutcome out;
            out.valid = true;
            out.p_used = trained.qpca.p;
            out.counts = confusion(data.test_labels, predict(trained, data.test));
            out.metrics = metrics(out.counts);
            return out;
        }
        if (data.train.empty() || data.test.empty()) throw ValidationError("empty training or testing set");
        if (params.pcs.count < 1) throw ParameterError("component sweep limit must be >= 1");
        const std::size_t limit = std::min({params.pcs.count, data.train.size(), data.train.front().size()});
        PcSelection selection;
        selection.fixed = limit;
        const QpcaModel model = fit(data.train, selection);
        return best_over_components(project(transform(model, data.train), params.projection), data.train_labels,
                                    project(transform(model, data.test), params.projection), data.test_labels, 1,
                                    limit, params.svm_c);
    } catch (const Error& e) {
        TrialOutcome out;
        out.error = e.what();
        return out;
    }
}

TrialOutcome evaluate_quadruple(const FeatureTable& table, const DatasetSplit& split,
                                const std::array<std::size_t, 4>& channels, Band band, const PipelineParams& params) {
    return evaluate_qpca(embed_split(table, split, channels, band), params);
}

std::string_view to_string(SweepKind kind) noexcept {
    switch (kind) {
        case SweepKind::SegmentSeconds: return "segment";
        case SweepKind::Projection: return "projection";
        case SweepKind::Components: return "pcs";
    }
    return "unknown";
}

SweepKind parse_sweep_kind(std::string_view text) {
    for (SweepKind k : {SweepKind::SegmentSeconds, SweepKind::Projection, SweepKind::Components})
        if (text == to_string(k)) return k;
    throw ParameterError("unknown sweep '" + std::string(text) + "' (expected segment, projection or pcs)");
}

std::vector<SweepRow> sweep_parameters(std::span<const EegRecording> recordings, const ChannelQuadruple& quadruple,
                                       Band band, const PipelineParams& params, const SweepGrid& grid,
                                       std::size_t parallelism) {
    if (grid.values.empty()) throw ParameterError("sweep grid is empty");
    const DatasetSplit split = session_split(recordings);
    const std::vector<std::string> names(quadruple.channels().begin(), quadruple.channels().end());
    const std::array<std::size_t, 4> local{0, 1, 2, 3};

    std::vector<SweepRow> rows(grid.values.size());
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i].kind = grid.kind;

    if (grid.kind == SweepKind::SegmentSeconds) {
        parallel_for(rows.size(), parallelism, [&](std::size_t i) {
            const double seconds = grid.values[i];
            rows[i].value = format_double(seconds);
            try {
                const FeatureTable table = build_feature_table(recordings, seconds, 1, names);
                PipelineParams p = params;
                p.segment_seconds = seconds;
                rows[i].outcome = evaluate_quadruple(table, split, local, band, p);
            } catch (const Error& e) {
                rows[i].outcome.error = e.what();
            }
        });
        return rows;
    }

    const FeatureTable table = build_feature_table(recordings, params.segment_seconds, parallelism, names);
    const EmbeddedSplit data = embed_split(table, split, local, band);
    parallel_for(rows.size(), parallelism, [&](std::size_t i) {
        PipelineParams p = params;
        const double v = grid.values[i];
        if (grid.kind == SweepKind::Projection) {
            const auto index = static_cast<long>(std::llround(v));
            if (index < 0 || index >= static_cast<long>(kAllProjections.size())) {
                rows[i].value = format_double(v);
                rows[i].outcome.error = "projection index out of range";
                return;
            }
            p.projection = kAllProjections[static_cast<std::size_t>(index)];
            rows[i].value = std::string(to_string(p.projection));
        } else {
            const auto count = static_cast<long>(std::llround(v));
            rows[i].value = std::to_string(count);
            if (count < 1) {
                rows[i].outcome.error = "component count must be >= 1";
                return;
            }
            p.pcs = PcPolicy::fixed(static_cast<std::size_t>(count));
        }
        rows[i].outcome = evaluate_qpca(data, p);
    });
    return rows;
}

}  // namespace qeeg
