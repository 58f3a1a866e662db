#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "qeeg/real_matrix.hpp"

namespace qeeg {

/// f(x) = weights . x + bias
struct LinearSvmModel {
    std::vector<double> weights;
    double bias = 0.0;
    double regularization_c = 1.0;
};

/// Full dual solution, for inspection and tests.
struct SvmSolution {
    LinearSvmModel model;
    std::vector<double> alpha;  ///< dual variables, 0 <= alpha_i <= C
    double primal_objective = 0.0;
    double dual_objective = 0.0;
    double duality_gap = 0.0;
    std::size_t iterations = 0;
};

/// Soft-margin linear SVM (hinge loss + L2) solved on the dual by SMO with
/// second-order working-set selection, run until the duality gap is at most
/// 1e-6. Labels are +1 / -1.
///
/// Errors: ShapeError when labels and rows disagree; DegenerateError when
/// only one class is present; ParameterError for C <= 0 or labels not +-1.
SvmSolution svm_solve(const RealFeatureMatrix& features, std::span<const int> labels, double regularization_c = 1.0);
LinearSvmModel svm_fit(const RealFeatureMatrix& features, std::span<const int> labels, double regularization_c = 1.0);

double decision_value(const LinearSvmModel& model, std::span<const double> x);
/// sign(w.x + b), with an exact 0 mapped to +1.
std::vector<int> svm_predict(const LinearSvmModel& model, const RealFeatureMatrix& features);

/// AD (+1) is the positive class.
struct ConfusionCounts {
    std::size_t tp = 0;
    std::size_t tn = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;

    std::size_t total() const noexcept { return tp + tn + fp + fn; }
    friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

ConfusionCounts confusion(std::span<const int> truth, std::span<const int> predicted);

/// Percentages; std::nullopt where the denominator is zero.
struct Metrics {
    std::optional<double> acc;
    std::optional<double> sen;
    std::optional<double> spe;
};

Metrics metrics(const ConfusionCounts& counts);

/// Fold index of every sample: classes shuffled separately, then dealt
/// round-robin, so folds keep class proportions and differ in size by at most 1.
std::vector<std::size_t> stratified_folds(std::span<const int> labels, std::size_t k, std::uint64_t seed);

/// Misclassified count for one fold given train / test sample indices.
using FoldEvaluator = std::function<std::size_t(std::span<const std::size_t> train, std::span<const std::size_t> test)>;

struct CrossValidationResult {
    std::size_t k = 0;
    std::size_t repeats = 0;
    std::uint64_t seed = 0;
    double mean_score = 0.0;  ///< misclassification rate, lower is better
    double std_score = 0.0;   ///< sample standard deviation across repeats
    std::vector<double> repeat_scores;
    std::vector<std::vector<std::size_t>> folds;  ///< assignment per repeat
};

/// Repeated stratified k-fold cross-validation. Repeat r uses folds from a
/// seed derived from (seed, r); each repeat scores the mean per-fold
/// misclassification rate. Results do not depend on `parallelism`.
/// Throws ParameterError unless 2 <= k <= sample count and repeats >= 1.
CrossValidationResult cross_validate(std::span<const int> labels, std::size_t k, std::size_t repeats,
                                     std::uint64_t seed, const FoldEvaluator& evaluate, std::size_t parallelism = 1);

/// Cross-validation of the linear SVM on a fixed feature matrix.
CrossValidationResult cross_validate(const RealFeatureMatrix& features, std::span<const int> labels, std::size_t k,
                                     std::size_t repeats, std::uint64_t seed, double regularization_c = 1.0,
                                     std::size_t parallelism = 1);

}  // namespace qeeg
