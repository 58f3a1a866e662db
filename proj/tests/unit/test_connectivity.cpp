#include <doctest.h>

#include <random>
#include <set>

#include <json.hpp>

#include "fixtures.hpp"
#include "qeeg/connectivity.hpp"
#include "qeeg/error.hpp"
#include "support.hpp"

using namespace qeeg;

namespace {

const FeatureTable& table() {
    static const auto t = build_feature_table(
        synthesize_dataset(test::reduced_spec({"F7", "T7", "T8", "P4", "Fz", "O1"}, 20.0), 8), 1.0);
    return t;
}

std::vector<std::size_t> training() { return session_split(table().recordings()).training; }

}  // namespace

TEST_CASE("interclass distance") {
    CHECK(interclass_distance(std::vector<double>{1, 2, 3}, std::vector<double>{4, 6}) == 3.0);
    CHECK(interclass_distance(std::vector<double>{1, 3}, std::vector<double>{2}) == 0.0);
    const std::vector<double> ns{0.3, -1.2, 2.5, 0.1};
    const std::vector<double> ad{1.5, 0.7, -0.2};
    const double d = interclass_distance(ns, ad);
    auto shifted = [](std::vector<double> v, double s, double k) {
        for (auto& x : v) x = k * x + s;
        return v;
    };
    CHECK(interclass_distance(shifted(ns, 4.0, 1.0), shifted(ad, 4.0, 1.0)) == doctest::Approx(d));
    CHECK(interclass_distance(shifted(ns, 0.0, 3.0), shifted(ad, 0.0, 3.0)) == doctest::Approx(3.0 * d));
    CHECK(d >= 0.0);
    CHECK_THROWS_AS(interclass_distance(std::vector<double>{}, ad), ParameterError);
    CHECK_THROWS_AS(interclass_distance(ns, std::vector<double>{}), ParameterError);
}

TEST_CASE("measure values") {
    std::mt19937_64 gen(4);
    std::vector<QuaternionVector> pooled(10, QuaternionVector(5));
    for (auto& v : pooled)
        for (auto& q : v) q = test::random_quaternion(gen);
    const auto basis = fit_measure_basis(pooled);
    CHECK(basis.p == 1);

    // Deviations of opposite sign give opposite measures.
    QuaternionVector plus(5), minus(5);
    for (std::size_t i = 0; i < 5; ++i) {
        const auto d = test::random_quaternion(gen);
        plus[i] = basis.mean_vector[i] + d;
        minus[i] = basis.mean_vector[i] - d;
    }
    const auto m = measure_values(basis, std::vector<QuaternionVector>{plus, minus, basis.mean_vector});
    CHECK(m[0] == doctest::Approx(-m[1]));
    CHECK(m[2] == 0.0);

    const std::vector<QuaternionVector> same(4, pooled[0]);
    CHECK_THROWS_AS(fit_measure_basis(same), DegenerateError);
}

TEST_CASE("tuples and tensors") {
    const auto rec = training();
    const auto measures = measure_tuples(table(), rec, TupleMode::Triple, Band::Alpha, 2);
    CHECK(measures.size() == 6 * 5 * 4);
    std::set<std::vector<std::size_t>> keys;
    for (const auto& m : measures) {
        CHECK(std::set(m.channels.begin(), m.channels.end()).size() == 3);
        keys.insert(m.channels);
        REQUIRE(m.valid);
        CHECK(m.ad.size() + m.nonad.size() == rec.size());
        CHECK(m.distance == doctest::Approx(interclass_distance(m.nonad, m.ad)));
    }
    CHECK(keys.size() == measures.size());

    const auto ad = build_tensor(table(), measures, TupleMode::Triple, Band::Alpha, Label::AD);
    CHECK(ad.values.size() == 120);
    CHECK(ad.missing == 0);
    for (const auto& [k, v] : ad.values) CHECK(std::isfinite(v));
    const auto j = nlohmann::json::parse(tensor_json(ad));
    CHECK(j["mode"] == "triple");
    CHECK(j["class"] == "AD");
    CHECK(j["axis_labels"].size() == 6);
    CHECK(j["entries"].size() == 120);
    CHECK(j["entries"][0]["channels"].size() == 3);

    const auto serial = measure_tuples(table(), rec, TupleMode::Triple, Band::Alpha, 1);
    for (std::size_t i = 0; i < serial.size(); ++i) CHECK(serial[i].ad == measures[i].ad);

    CHECK(measure_tuples(table(), rec, TupleMode::Quadruple, Band::Alpha).size() == 360);
}

TEST_CASE("alpha separates the classes most") {
    const auto report = distance_report(table(), training(), TupleMode::Quadruple, 2);
    REQUIRE(report.bands.size() == 4);
    CHECK(report.ad_samples == 25);
    CHECK(report.nonad_samples == 30);
    const double alpha = report.bands[2].dist;
    for (std::size_t b : {0u, 1u, 3u}) CHECK(alpha > report.bands[b].dist);

    const auto triple = distance_report(table(), training(), TupleMode::Triple, 2);
    CHECK(alpha >= triple.bands[2].dist);

    const auto j = nlohmann::json::parse(distance_report_json(report));
    CHECK(j["bands"][2]["band"] == "alpha");
    CHECK(j["class_counts"]["AD"] == 25);
}

TEST_CASE("modes") {
    CHECK(parse_tuple_mode("triple") == TupleMode::Triple);
    CHECK(tuple_size(TupleMode::Quadruple) == 4);
    CHECK_THROWS_AS(parse_tuple_mode("pair"), ParameterError);
}
