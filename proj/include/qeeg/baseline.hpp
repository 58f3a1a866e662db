#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "qeeg/feature_table.hpp"
#include "qeeg/pipeline.hpp"
#include "qeeg/real_matrix.hpp"

namespace qeeg {

/// Classical PCA on real vectors.
struct RealPcaModel {
    std::vector<double> mean;
    RealFeatureMatrix basis;          ///< d x p, orthonormal columns
    std::vector<double> eigenvalues;  ///< all d covariance eigenvalues, descending, >= 0
    std::size_t p = 0;
};

/// Covariance (1/m) X^T X of the centered rows, eigen-decomposed. Each basis
/// column is signed so that its largest-magnitude entry is positive.
///
/// Errors: fewer than 2 rows -> ValidationError; identical rows ->
/// DegenerateError; fixed p outside [1, min(m, d)] -> ParameterError.
RealPcaModel fit_real_pca(const RealFeatureMatrix& training, const PcSelection& selection);

/// (x - mean) * basis per row.
RealFeatureMatrix transform(const RealPcaModel& model, const RealFeatureMatrix& samples);

/// One row per recording: the four channels' band vectors concatenated
/// channel after channel.
RealFeatureMatrix concatenate_channels(const FeatureTable& table, std::span<const std::size_t> recordings,
                                       const std::array<std::size_t, 4>& channels, Band band);

/// Real-PCA classification trial with the same p policy and SVM settings
/// as the quaternion pipeline.
TrialOutcome evaluate_real_pca(const RealFeatureMatrix& train, std::span<const int> train_labels,
                               const RealFeatureMatrix& test, std::span<const int> test_labels,
                               const PipelineParams& params);

struct ComparisonReport {
    std::array<std::string, 4> channels;
    Band band = Band::Alpha;
    PipelineParams params;
    TrialOutcome qpca;
    TrialOutcome real_pca;
    std::string qpca_input_checksum;  ///< over the values each arm consumed
    std::string real_pca_input_checksum;
};

/// Both arms on identical inputs. Failures are recorded per arm.
ComparisonReport compare(const FeatureTable& table, const DatasetSplit& split,
                         const std::array<std::size_t, 4>& channels, Band band, const PipelineParams& params);

std::string comparison_json(const ComparisonReport& report);

}  // namespace qeeg
