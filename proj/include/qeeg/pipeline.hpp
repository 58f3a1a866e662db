#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "qeeg/classifier.hpp"
#include "qeeg/dataset.hpp"
#include "qeeg/feature_table.hpp"
#include "qeeg/qpca.hpp"

namespace qeeg {

/// Principal-component policy of a classification trial.
struct PcPolicy {
    enum class Kind {
        Fixed,      ///< use exactly `count` components
        Threshold,  ///< smallest count reaching `threshold` of the eigenvalue mass
        SweepBest,  ///< try 1..count and report the most accurate (ties: fewest)
    };
    Kind kind = Kind::SweepBest;
    std::size_t count = 20;
    double threshold = 0.90;

    static PcPolicy fixed(std::size_t p) { return {Kind::Fixed, p, 0.90}; }
    static PcPolicy by_threshold(double t) { return {Kind::Threshold, 0, t}; }
    static PcPolicy sweep(std::size_t limit) { return {Kind::SweepBest, limit, 0.90}; }

    std::string describe() const;
};

struct PipelineParams {
    double segment_seconds = 1.0;
    Projection projection = Projection::Mean;
    PcPolicy pcs = PcPolicy::sweep(20);
    double svm_c = 1.0;
};

/// Outcome of one train/test cycle. Failures are recorded, not thrown.
struct TrialOutcome {
    bool valid = false;
    std::string error;
    ConfusionCounts counts;
    Metrics metrics;
    std::size_t p_used = 0;
};

/// Embedded training and testing vectors for one channel tuple and band.
struct EmbeddedSplit {
    std::vector<QuaternionVector> train;
    std::vector<QuaternionVector> test;
    std::vector<int> train_labels;
    std::vector<int> test_labels;
};

/// Full (4 channels) or pure (3 channels) embedding of the split's recordings.
EmbeddedSplit embed_split(const FeatureTable& table, const DatasetSplit& split, std::span<const std::size_t> channels,
                          Band band);

/// Quaternion features and SVM trained on one split.
struct TrainedPipeline {
    QpcaModel qpca;
    LinearSvmModel svm;
};

/// Fits QPCA + SVM on training vectors. Requires a Fixed or Threshold policy
/// (choosing p by test accuracy needs labels the trainer does not see).
TrainedPipeline train_pipeline(std::span<const QuaternionVector> train, std::span<const int> labels,
                               const PipelineParams& params);

std::vector<int> predict(const TrainedPipeline& pipeline, std::span<const QuaternionVector> vectors);

/// QPCA classification trial on pre-embedded data.
TrialOutcome evaluate_qpca(const EmbeddedSplit& data, const PipelineParams& params);

/// Convenience: embed the quadruple (table channel indices) and evaluate.
TrialOutcome evaluate_quadruple(const FeatureTable& table, const DatasetSplit& split,
                                const std::array<std::size_t, 4>& channels, Band band, const PipelineParams& params);

/// Picks the best p given per-p projected features: shared by the QPCA and
/// real-PCA arms. `train` / `test` hold `limit` columns.
TrialOutcome best_over_components(const RealFeatureMatrix& train, std::span<const int> train_labels,
                                  const RealFeatureMatrix& test, std::span<const int> test_labels, std::size_t first,
                                  std::size_t last, double svm_c);

/// Segment lengths of the twelve segmentation cases (seconds).
inline constexpr std::array<double, 12> kSegmentGrid{0.1, 0.2, 0.4, 0.5, 0.8, 1.0, 1.25, 2.0, 2.5, 4.0, 5.0, 10.0};

enum class SweepKind { SegmentSeconds, Projection, Components };

std::string_view to_string(SweepKind kind) noexcept;
SweepKind parse_sweep_kind(std::string_view text);

/// One dimension varied around `PipelineParams`; `values` are seconds,
/// projection indices (kAllProjections order) or component counts.
struct SweepGrid {
    SweepKind kind = SweepKind::SegmentSeconds;
    std::vector<double> values;
};

struct SweepRow {
    SweepKind kind;
    std::string value;
    TrialOutcome outcome;
};

/// One full train/evaluate cycle per grid point, rows in grid order.
/// Component sweeps use a fixed p per row; the other sweeps keep
/// params.pcs. Per-point failures become invalid rows.
std::vector<SweepRow> sweep_parameters(std::span<const EegRecording> recordings, const ChannelQuadruple& quadruple,
                                       Band band, const PipelineParams& params, const SweepGrid& grid,
                                       std::size_t parallelism = 1);

}  // namespace qeeg
