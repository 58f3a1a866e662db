#include "qeeg/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "qeeg/error.hpp"
#include "qeeg/parallel.hpp"
#include "qeeg/rng.hpp"

namespace qeeg {

namespace {

constexpr double kTargetGap = 1e-6;
constexpr double kTau = 1e-12;
constexpr std::size_t kMaxIterations = 10'000'000;

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

/// SMO state over the Gram matrix Q_ij = y_i y_j x_i.x_j.
class SmoSolver {
public:
    SmoSolver(const RealFeatureMatrix& x, std::span<const int> y, double c)
        : x_(x), y_(y.begin(), y.end()), c_(c), n_(y.size()), q_(n_ * n_), alpha_(n_, 0.0), grad_(n_, -1.0) {
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = i; j < n_; ++j) {
                const double v = y_[i] * y_[j] * dot(x.row(i), x.row(j));
                q_[i * n_ + j] = v;
                q_[j * n_ + i] = v;
            }
    }

    /// Iterates until the maximal KKT violation drops below eps.
    void optimize(double eps) {
        while (iterations_ < kMaxIterations) {
            const auto [i, j] = select_working_set(eps);
            if (i < 0) return;
            update(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
            ++iterations_;
        }
    }

    SvmSolution solution() const {
        SvmSolution s;
        s.model.regularization_c = c_;
        s.model.weights.assign(x_.cols(), 0.0);
        for (std::size_t i = 0; i < n_; ++i) {
            if (alpha_[i] == 0.0) continue;
            const auto row = x_.row(i);
            for (std::size_t d = 0; d < row.size(); ++d) s.model.weights[d] += alpha_[i] * y_[i] * row[d];
        }
        s.model.bias = -rho();
        s.alpha = alpha_;

        const double w2 = dot(s.model.weights, s.model.weights);
        double hinge = 0.0;
        for (std::size_t i = 0; i < n_; ++i)
            hinge += std::max(0.0, 1.0 - y_[i] * (dot(s.model.weights, x_.row(i)) + s.model.bias));
        s.primal_objective = 0.5 * w2 + c_ * hinge;
        s.dual_objective = std::accumulate(alpha_.begin(), alpha_.end(), 0.0) - 0.5 * w2;
        s.duality_gap = s.primal_objective - s.dual_objective;
        s.iterations = iterations_;
        return s;
    }

private:
    bool in_up(std::size_t t) const { return (y_[t] == +1 && alpha_[t] < c_) || (y_[t] == -1 && alpha_[t] > 0.0); }
    bool in_low(std::size_t t) const { return (y_[t] == +1 && alpha_[t] > 0.0) || (y_[t] == -1 && alpha_[t] < c_); }

    std::pair<long, long> select_working_set(double eps) const {
        double gmax = -std::numeric_limits<double>::infinity();
        long i = -1;
        for (std::size_t t = 0; t < n_; ++t) {
            if (!in_up(t)) continue;
            const double v = -y_[t] * grad_[t];
            if (v > gmax) {
                gmax = v;
                i = static_cast<long>(t);
            }
        }
        if (i < 0) return {-1, -1};
        double gmin = std::numeric_limits<double>::infinity();
        double best = std::numeric_limits<double>::infinity();
        long j = -1;
        const auto ii = static_cast<std::size_t>(i);
        for (std::size_t t = 0; t < n_; ++t) {
            if (!in_low(t)) continue;
            const double v = -y_[t] * grad_[t];
            gmin = std::min(gmin, v);
            const double b = gmax - v;
            if (b > 0.0) {
                double a = q_[ii * n_ + ii] + q_[t * n_ + t] - 2.0 * y_[ii] * y_[t] * q_[ii * n_ + t];
                if (a <= 0.0) a = kTau;
                const double obj = -(b * b) / a;
                if (obj < best) {
                    best = obj;
                    j = static_cast<long>(t);
                }
            }
        }
        if (gmax - gmin < eps || j < 0) return {-1, -1};
        return {i, j};
    }

    void update(std::size_t i, std::size_t j) {
        const double old_i = alpha_[i];
        const double old_j = alpha_[j];
        const double qii = q_[i * n_ + i];
        const double qjj = q_[j * n_ + j];
        const double qij = q_[i * n_ + j];
        double& ai = alpha_[i];
        double& aj = alpha_[j];
        if (y_[i] != y_[j]) {
            double quad = qii + qjj + 2.0 * qij;
            if (quad <= 0.0) quad = kTau;
            const double delta = (-grad_[i] - grad_[j]) / quad;
            const double diff = ai - aj;
            ai += delta;
            aj += delta;
            if (diff > 0.0) {
                if (aj < 0.0) {
                    aj = 0.0;
                    ai = diff;
                }
            } else if (ai < 0.0) {
                ai = 0.0;
                aj = -diff;
            }
            if (diff > 0.0) {
                if (ai > c_) {
                    ai = c_;
                    aj = c_ - diff;
                }
            } else if (aj > c_) {
                aj = c_;
                ai = c_ + diff;
            }
        } else {
            double quad = qii + qjj - 2.0 * qij;
            if (quad <= 0.0) quad = kTau;
            const double delta = (grad_[i] - grad_[j]) / quad;
            const double sum = ai + aj;
            ai -= delta;
            aj += delta;
            if (sum > c_) {
                if (ai > c_) {
                    ai = c_;
                    aj = sum - c_;
                }
            } else if (aj < 0.0) {
                aj = 0.0;
                ai = sum;
            }
            if (sum > c_) {
                if (aj > c_) {
                    aj = c_;
                    ai = sum - c_;
                }
            } else if (ai < 0.0) {
                ai = 0.0;
                aj = sum;
            }
        }
        const double di = ai - old_i;
        const double dj = aj - old_j;
        for (std::size_t t = 0; t < n_; ++t) grad_[t] += q_[t * n_ + i] * di + q_[t * n_ + j] * dj;
    }

    /// Offset from free support vectors, or the midpoint of the feasible
    /// interval when every alpha sits at a bound.
    double rho() const {
        double ub = std::numeric_limits<double>::infinity();
        double lb = -std::numeric_limits<double>::infinity();
        double sum_free = 0.0;
        std::size_t free = 0;
        for (std::size_t t = 0; t < n_; ++t) {
            const double yg = y_[t] * grad_[t];
            if (alpha_[t] >= c_) {
                if (y_[t] == -1) ub = std::min(ub, yg);
                else lb = std::max(lb, yg);
            } else if (alpha_[t] <= 0.0) {
                if (y_[t] == +1) ub = std::min(ub, yg);
                else lb = std::max(lb, yg);
            } else {
                ++free;
                sum_free += yg;
            }
        }
        return free > 0 ? sum_free / static_cast<double>(free) : 0.5 * (ub + lb);
    }

    const RealFeatureMatrix& x_;
    std::vector<double> y_;
    double c_;
    std::size_t n_;
    std::vector<double> q_;
    std::vector<double> alpha_;
    std::vector<double> grad_;
    std::size_t iterations_ = 0;
};

}  // namespace

SvmSolution svm_solve(const RealFeatureMatrix& features, std::span<const int> labels, double regularization_c) {
    if (features.rows() != labels.size())
        throw ShapeError("svm_fit: " + std::to_string(features.rows()) + " feature rows but " +
                         std::to_string(labels.size()) + " labels");
    if (!(regularization_c > 0.0) || !std::isfinite(regularization_c))
        throw ParameterError("svm_fit: regularization C must be positive");
    bool pos = false;
    bool neg = false;
    for (int y : labels) {
        if (y == +1) pos = true;
        else if (y == -1) neg = true;
        else throw ParameterError("svm_fit: labels must be +1 or -1");
    }
    if (!pos || !neg) throw DegenerateError("svm_fit: training data holds a single class");
    for (double v : features.data())
        if (!std::isfinite(v)) throw ValidationError("svm_fit: non-finite feature value");

    SmoSolver solver(features, labels, regularization_c);
    SvmSolution best;
    for (double eps = 1e-6; eps >= 1e-14; eps *= 0.01) {
        solver.optimize(eps);
        best = solver.solution();
        if (best.duality_gap <= kTargetGap) break;
    }
    return best;
}

LinearSvmModel svm_fit(const RealFeatureMatrix& features, std::span<const int> labels, double regularization_c) {
    return svm_solve(features, labels, regularization_c).model;
}

double decision_value(const LinearSvmModel& model, std::span<const double> x) {
    if (x.size() != model.weights.size())
        throw ShapeError("svm_predict: feature width " + std::to_string(x.size()) + " does not match model width " +
                         std::to_string(model.weights.size()));
    return dot(model.weights, x) + model.bias;
}

std::vector<int> svm_predict(const LinearSvmModel& model, const RealFeatureMatrix& features) {
    if (features.cols() != model.weights.size())
        throw ShapeError("svm_predict: feature width " + std::to_string(features.cols()) +
                         " does not match model width " + std::to_string(model.weights.size()));
    std::vector<int> out(features.rows());
    for (std::size_t r = 0; r < features.rows(); ++r) out[r] = decision_value(model, features.row(r)) >= 0.0 ? +1 : -1;
    return out;
}

ConfusionCounts confusion(std::span<const int> truth, std::span<const int> predicted) {
    if (truth.size() != predicted.size()) throw ShapeError("confusion: label lists differ in length");
    ConfusionCounts c;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i] == +1) (predicted[i] == +1 ? c.tp : c.fn)++;
        else (predicted[i] == +1 ? c.fp : c.tn)++;
    }
    return c;
}

Metrics metrics(const ConfusionCounts& c) {
    auto ratio = [](std::size_t num, std::size_t den) -> std::optional<double> {
        if (den == 0) return std::nullopt;
        return 100.0 * static_cast<double>(num) / static_cast<double>(den);
    };
    return {ratio(c.tp + c.tn, c.total()), ratio(c.tp, c.tp + c.fn), ratio(c.tn, c.tn + c.fp)};
}

std::vector<std::size_t> stratified_folds(std::span<const int> labels, std::size_t k, std::uint64_t seed) {
    if (k < 2 || k > labels.size())
        throw ParameterError("cross-validation needs 2 <= k <= samples (k = " + std::to_string(k) + ", samples = " +
                             std::to_string(labels.size()) + ")");
    std::vector<std::size_t> positive;
    std::vector<std::size_t> negative;
    for (std::size_t i = 0; i < labels.size(); ++i) (labels[i] == +1 ? positive : negative).push_back(i);
    Rng rng(seed);
    rng.shuffle(positive);
    rng.shuffle(negative);
    std::vector<std::size_t> fold(labels.size());
    std::size_t next = 0;
    for (std::size_t i : positive) fold[i] = next++ % k;
    for (std::size_t i : negative) fold[i] = next++ % k;
    return fold;
}

CrossValidationResult cross_validate(std::span<const int> labels, std::size_t k, std::size_t repeats,
                                     std::uint64_t seed, const FoldEvaluator& evaluate, std::size_t parallelism) {
    if (repeats < 1) throw ParameterError("cross-validation needs at least one repeat");
    if (k < 2 || k > labels.size())
        throw ParameterError("cross-validation needs 2 <= k <= samples (k = " + std::to_string(k) + ", samples = " +
                             std::to_string(labels.size()) + ")");
    CrossValidationResult result;
    result.k = k;
    result.repeats = repeats;
    result.seed = seed;
    result.repeat_scores.assign(repeats, 0.0);
    result.folds.assign(repeats, {});

    parallel_for(repeats, parallelism, [&](std::size_t r) {
        auto fold = stratified_folds(labels, k, derive_seed(seed, {static_cast<std::uint64_t>(r)}));
        double rate_sum = 0.0;
        for (std::size_t f = 0; f < k; ++f) {
            std::vector<std::size_t> train;
            std::vector<std::size_t> test;
            for (std::size_t i = 0; i < fold.size(); ++i) (fold[i] == f ? test : train).push_back(i);
            const std::size_t wrong = evaluate(train, test);
            rate_sum += static_cast<double>(wrong) / static_cast<double>(test.size());
        }
        result.repeat_scores[r] = rate_sum / static_cast<double>(k);
        result.folds[r] = std::move(fold);
    });

    const double n = static_cast<double>(repeats);
    result.mean_score = std::accumulate(result.repeat_scores.begin(), result.repeat_scores.end(), 0.0) / n;
    if (repeats > 1) {
        double ss = 0.0;
        for (double s : result.repeat_scores) ss += (s - result.mean_score) * (s - result.mean_score);
        result.std_score = std::sqrt(ss / (n - 1.0));
    }
    return result;
}

CrossValidationResult cross_validate(const RealFeatureMatrix& features, std::span<const int> labels, std::size_t k,
                                     std::size_t repeats, std::uint64_t seed, double regularization_c,
                                     std::size_t parallelism) {
    if (features.rows() != labels.size()) throw ShapeError("cross_validate: rows and labels differ");
    const FoldEvaluator evaluate = [&](std::span<const std::size_t> train, std::span<const std::size_t> test) {
        std::vector<int> train_labels;
        for (std::size_t i : train) train_labels.push_back(labels[i]);
        const auto model = svm_fit(features.select_rows(train), train_labels, regularization_c);
        const auto predicted = svm_predict(model, features.select_rows(test));
        std::size_t wrong = 0;
        for (std::size_t i = 0; i < test.size(); ++i) wrong += predicted[i] != labels[test[i]] ? 1 : 0;
        return wrong;
    };
    return cross_validate(labels, k, repeats, seed, evaluate, parallelism);
}

}  // namespace qeeg
