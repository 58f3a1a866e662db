#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

#include "qeeg/classifier.hpp"
#include "qeeg/error.hpp"

using namespace qeeg;

namespace {

struct Problem {
    RealFeatureMatrix x;
    std::vector<int> y;
};

Problem random_problem(std::size_t m, std::size_t d, double separation, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> n;
    Problem p{RealFeatureMatrix(m, d), {}};
    for (std::size_t r = 0; r < m; ++r) {
        const int y = r % 2 == 0 ? 1 : -1;
        p.y.push_back(y);
        for (std::size_t c = 0; c < d; ++c) p.x(r, c) = n(gen) + (c == 0 ? separation * y : 0.0);
    }
    return p;
}

/// Recomputes primal and dual objectives from the returned solution and
/// checks feasibility; a small gap certifies optimality.
void check_certificate(const Problem& p, double c) {
    const auto sol = svm_solve(p.x, p.y, c);
    const std::size_t m = p.x.rows();
    const std::size_t d = p.x.cols();
    double balance = 0.0;
    double alpha_sum = 0.0;
    std::vector<double> w(d, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        CHECK(sol.alpha[i] >= 0.0);
        CHECK(sol.alpha[i] <= c * (1.0 + 1e-12));
        balance += sol.alpha[i] * p.y[i];
        alpha_sum += sol.alpha[i];
        for (std::size_t k = 0; k < d; ++k) w[k] += sol.alpha[i] * p.y[i] * p.x(i, k);
    }
    CHECK(std::abs(balance) <= 1e-9 * std::max(1.0, alpha_sum));
    double ww = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
        CHECK(sol.model.weights[k] == doctest::Approx(w[k]).epsilon(1e-9));
        ww += w[k] * w[k];
    }
    double hinge = 0.0;
    for (std::size_t i = 0; i < m; ++i)
        hinge += std::max(0.0, 1.0 - p.y[i] * decision_value(sol.model, p.x.row(i)));
    const double primal = 0.5 * ww + c * hinge;
    const double dual = alpha_sum - 0.5 * ww;
    CHECK(primal - dual >= -1e-9);
    CHECK(primal - dual <= 1e-6 * std::max(1.0, std::abs(primal)));
    CHECK(sol.duality_gap <= 1e-6 * std::max(1.0, std::abs(sol.primal_objective)));
}

}  // namespace

TEST_CASE("two points: analytic solutions") {
    const RealFeatureMatrix x(2, 1, {1.0, -1.0});
    const std::vector<int> y{1, -1};
    const auto hard = svm_solve(x, y, 100.0);
    CHECK(hard.model.weights[0] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(hard.model.bias == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
    CHECK(hard.alpha[0] == doctest::Approx(0.5).epsilon(1e-9));

    const auto soft = svm_solve(x, y, 0.1);
    CHECK(soft.model.weights[0] == doctest::Approx(0.2).epsilon(1e-9));
    CHECK(soft.alpha[0] == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("optimality certificate on random problems") {
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        check_certificate(random_problem(40, 3, 2.0, seed), 1.0);
        check_certificate(random_problem(30, 5, 0.3, seed + 100), 1.0);
        check_certificate(random_problem(25, 2, 1.0, seed + 200), 10.0);
        check_certificate(random_problem(25, 4, 1.0, seed + 300), 0.05);
    }
}

TEST_CASE("rescaling features and C together leaves predictions unchanged") {
    const auto p = random_problem(40, 3, 1.0, 9);
    const double s = 8.0;
    RealFeatureMatrix scaled(p.x.rows(), p.x.cols());
    for (std::size_t r = 0; r < p.x.rows(); ++r)
        for (std::size_t c = 0; c < p.x.cols(); ++c) scaled(r, c) = s * p.x(r, c);
    const auto a = svm_fit(p.x, p.y, 1.0);
    const auto b = svm_fit(scaled, p.y, 1.0 / (s * s));
    CHECK(svm_predict(a, p.x) == svm_predict(b, scaled));
    for (std::size_t k = 0; k < 3; ++k) CHECK(b.weights[k] * s == doctest::Approx(a.weights[k]).epsilon(1e-5));
}

TEST_CASE("separable data is classified perfectly") {
    const auto p = random_problem(60, 2, 6.0, 4);
    const auto model = svm_fit(p.x, p.y, 10.0);
    CHECK(svm_predict(model, p.x) == p.y);
}

TEST_CASE("zero decision value predicts the positive class") {
    LinearSvmModel model;
    model.weights = {0.0, 0.0};
    model.bias = 0.0;
    const RealFeatureMatrix x(1, 2, {3.0, -1.0});
    CHECK(svm_predict(model, x) == std::vector<int>{1});
}

TEST_CASE("svm errors") {
    const RealFeatureMatrix x(3, 1, {1.0, 2.0, 3.0});
    CHECK_THROWS_AS(svm_fit(x, std::vector<int>{1, -1}, 1.0), ShapeError);
    CHECK_THROWS_AS(svm_fit(x, std::vector<int>{1, 1, 1}, 1.0), DegenerateError);
    CHECK_THROWS_AS(svm_fit(x, std::vector<int>{1, 0, -1}, 1.0), ParameterError);
    CHECK_THROWS_AS(svm_fit(x, std::vector<int>{1, -1, 1}, 0.0), ParameterError);
}

TEST_CASE("confusion and metrics") {
    const std::vector<int> truth{1, 1, 1, 1, 1, -1, -1, -1, -1, -1, -1};
    const std::vector<int> pred{1, 1, 1, 1, 1, -1, -1, -1, -1, -1, 1};
    const auto c = confusion(truth, pred);
    CHECK(c == ConfusionCounts{5, 5, 1, 0});
    const auto m = metrics(c);
    CHECK(*m.acc == doctest::Approx(100.0 * 10.0 / 11.0));
    CHECK(std::abs(*m.acc - 90.91) <= 0.01);
    CHECK(std::abs(*m.sen - 100.0) <= 0.01);
    CHECK(std::abs(*m.spe - 83.33) <= 0.01);

    const auto none = metrics(ConfusionCounts{0, 3, 1, 0});
    CHECK_FALSE(none.sen.has_value());
    CHECK(none.spe.has_value());
    CHECK_FALSE(metrics(ConfusionCounts{}).acc.has_value());
    CHECK_THROWS_AS(confusion(truth, std::vector<int>{1}), ShapeError);
}

TEST_CASE("accuracy is the class-weighted mean of sensitivity and specificity") {
    std::mt19937_64 gen(2);
    std::uniform_int_distribution<std::size_t> n(1, 50);
    for (int t = 0; t < 1000; ++t) {
        const ConfusionCounts c{n(gen), n(gen), n(gen), n(gen)};
        const auto m = metrics(c);
        const double pos = static_cast<double>(c.tp + c.fn);
        const double neg = static_cast<double>(c.tn + c.fp);
        CHECK(*m.acc == doctest::Approx((*m.sen * pos + *m.spe * neg) / (pos + neg)).epsilon(1e-13));
    }
}

TEST_CASE("stratified folds") {
    std::vector<int> labels;
    for (int i = 0; i < 30; ++i) labels.push_back(1);
    for (int i = 0; i < 36; ++i) labels.push_back(-1);
    const auto folds = stratified_folds(labels, 10, 5);
    CHECK(folds == stratified_folds(labels, 10, 5));
    CHECK(folds != stratified_folds(labels, 10, 6));
    std::map<std::size_t, std::pair<int, int>> per_fold;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        REQUIRE(folds[i] < 10);
        (labels[i] > 0 ? per_fold[folds[i]].first : per_fold[folds[i]].second)++;
    }
    int lo = 1000, hi = 0;
    for (const auto& [f, counts] : per_fold) {
        CHECK(counts.first >= 3);
        CHECK(counts.first <= 4);
        lo = std::min(lo, counts.first + counts.second);
        hi = std::max(hi, counts.first + counts.second);
    }
    CHECK(per_fold.size() == 10);
    CHECK(hi - lo <= 1);
}

TEST_CASE("cross-validation is reproducible and parallel-safe") {
    const auto p = random_problem(66, 3, 1.0, 12);
    const auto a = cross_validate(p.x, p.y, 10, 4, 99, 1.0, 1);
    const auto b = cross_validate(p.x, p.y, 10, 4, 99, 1.0, 4);
    CHECK(a.folds == b.folds);
    CHECK(a.repeat_scores == b.repeat_scores);
    CHECK(a.mean_score == b.mean_score);
    CHECK(a.std_score == b.std_score);
    CHECK(a.mean_score >= 0.0);
    CHECK(a.mean_score <= 1.0);

    double mean = 0.0;
    for (double s : a.repeat_scores) mean += s / 4.0;
    double ss = 0.0;
    for (double s : a.repeat_scores) ss += (s - mean) * (s - mean);
    CHECK(a.std_score == doctest::Approx(std::sqrt(ss / 3.0)));
}

TEST_CASE("cross-validation scoring and errors") {
    std::vector<int> labels(20, 1);
    for (std::size_t i = 10; i < 20; ++i) labels[i] = -1;
    // Misclassifies exactly one sample per fold.
    const auto cv = cross_validate(labels, 5, 1, 1, [](auto, auto) { return std::size_t{1}; });
    CHECK(cv.mean_score == doctest::Approx(0.25));
    CHECK(cv.std_score == 0.0);
    const FoldEvaluator none = [](auto, auto) { return std::size_t{0}; };
    CHECK_THROWS_AS(cross_validate(labels, 1, 1, 1, none), ParameterError);
    CHECK_THROWS_AS(cross_validate(labels, 21, 1, 1, none), ParameterError);
    CHECK_THROWS_AS(cross_validate(labels, 5, 0, 1, none), ParameterError);
}
