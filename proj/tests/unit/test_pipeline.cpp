#include <doctest.h>

#include "fixtures.hpp"
#include "qeeg/error.hpp"
#include "qeeg/pipeline.hpp"

using namespace qeeg;

namespace {

const std::vector<EegRecording>& dataset() {
    static const auto recs = synthesize_dataset(test::reduced_spec({"F7", "T7", "T8", "P4", "Fz", "O1"}, 12.0), 21);
    return recs;
}

const FeatureTable& table() {
    static const auto t = build_feature_table(dataset(), 1.0);
    return t;
}

}  // namespace

TEST_CASE("policy descriptions") {
    CHECK(PcPolicy::fixed(3).describe() == "fixed:3");
    CHECK(PcPolicy::by_threshold(0.9).describe() == "threshold:0.9");
    CHECK(PcPolicy::sweep(20).describe() == "sweep:20");
    CHECK(parse_sweep_kind("pcs") == SweepKind::Components);
    CHECK_THROWS_AS(parse_sweep_kind("band"), ParameterError);
}

TEST_CASE("embedded split follows the session split") {
    const auto split = session_split(table().recordings());
    const std::array<std::size_t, 4> quad{0, 1, 2, 3};
    const auto data = embed_split(table(), split, quad, Band::Alpha);
    CHECK(data.train.size() == 55);
    CHECK(data.test.size() == 11);
    CHECK(data.train.front().size() == 12);
    const std::array<std::size_t, 3> triple{0, 1, 2};
    for (const auto& v : embed_split(table(), split, triple, Band::Alpha).train)
        for (const auto& q : v) CHECK(q.w() == 0.0);
    const std::array<std::size_t, 2> pair{0, 1};
    CHECK_THROWS_AS(embed_split(table(), split, pair, Band::Alpha), ValidationError);
}

TEST_CASE("p sweep reports the best fixed-p outcome") {
    const auto split = session_split(table().recordings());
    const std::array<std::size_t, 4> quad{3, 0, 1, 2};
    PipelineParams params;
    params.pcs = PcPolicy::sweep(6);
    const auto best = evaluate_quadruple(table(), split, quad, Band::Alpha, params);
    REQUIRE(best.valid);
    CHECK(best.counts.total() == 11);

    double top = -1.0;
    std::size_t arg = 0;
    for (std::size_t p = 1; p <= 6; ++p) {
        params.pcs = PcPolicy::fixed(p);
        const auto o = evaluate_quadruple(table(), split, quad, Band::Alpha, params);
        REQUIRE(o.valid);
        CHECK(o.p_used == p);
        if (*o.metrics.acc > top) {
            top = *o.metrics.acc;
            arg = p;
        }
    }
    CHECK(*best.metrics.acc == top);
    CHECK(best.p_used == arg);
}

TEST_CASE("failures are recorded, not thrown") {
    const auto split = session_split(table().recordings());
    PipelineParams params;
    params.pcs = PcPolicy::fixed(40);
    const auto o = evaluate_quadruple(table(), split, {0, 1, 2, 3}, Band::Alpha, params);
    CHECK_FALSE(o.valid);
    CHECK_FALSE(o.error.empty());
}

TEST_CASE("training needs a label-free component policy") {
    const auto split = session_split(table().recordings());
    const auto data = embed_split(table(), split, std::array<std::size_t, 4>{0, 1, 2, 3}, Band::Alpha);
    PipelineParams params;
    CHECK_THROWS_AS(train_pipeline(data.train, data.train_labels, params), ParameterError);
    params.pcs = PcPolicy::by_threshold(0.9);
    const auto trained = train_pipeline(data.train, data.train_labels, params);
    CHECK(trained.svm.weights.size() == trained.qpca.p);
    CHECK(predict(trained, data.test).size() == 11);
}

TEST_CASE("segment sweep") {
    const auto quad = ChannelQuadruple::parse("F7,T7,T8,P4");
    PipelineParams params;
    params.pcs = PcPolicy::sweep(4);
    const auto rows = sweep_parameters(dataset(), quad, Band::Alpha, params, {SweepKind::SegmentSeconds, {1.0, 2.0, 20.0}}, 2);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].value == "1");
    CHECK(rows[1].value == "2");
    CHECK(rows[0].outcome.valid);
    CHECK(rows[1].outcome.valid);
    CHECK_FALSE(rows[2].outcome.valid);

    const auto serial = sweep_parameters(dataset(), quad, Band::Alpha, params, {SweepKind::SegmentSeconds, {1.0, 2.0}}, 1);
    CHECK(serial[1].outcome.counts == rows[1].outcome.counts);
    CHECK(serial[1].outcome.p_used == rows[1].outcome.p_used);
}

TEST_CASE("projection and component sweeps") {
    const auto quad = ChannelQuadruple::parse("F7,T7,T8,P4");
    PipelineParams params;
    params.pcs = PcPolicy::sweep(3);
    const auto proj = sweep_parameters(dataset(), quad, Band::Alpha, params, {SweepKind::Projection, {0, 1, 2, 3}});
    REQUIRE(proj.size() == 4);
    CHECK(proj[0].value == "mean");
    CHECK(proj[3].value == "phase");

    const auto pcs = sweep_parameters(dataset(), quad, Band::Alpha, params, {SweepKind::Components, {1, 2, 13}});
    CHECK(pcs[0].outcome.p_used == 1);
    CHECK(pcs[1].outcome.p_used == 2);
    CHECK_FALSE(pcs[2].outcome.valid);
    CHECK_THROWS_AS(sweep_parameters(dataset(), quad, Band::Alpha, params, {SweepKind::Components, {}}), ParameterError);
}
