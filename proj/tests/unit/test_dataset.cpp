#include <doctest.h>

#include <fstream>
#include <set>

#include "qeeg/dataset.hpp"
#include "qeeg/error.hpp"
#include "support.hpp"

using namespace qeeg;
namespace fs = std::filesystem;

namespace {

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

fs::path write_case(const fs::path& dir, const std::string& csv, const std::string& extra = "",
                    double rate = 250.0) {
    write_file(dir / "rec.csv", csv);
    write_file(dir / "rec.json", R"({"subject_id": "S01", "session_index": 1, "label": "AD", "sampling_rate_hz": )" +
                                     std::to_string(rate) + R"(, "data_file": "rec.csv")" + extra + "}");
    return dir / "rec.json";
}

IngestIssue issue_of(const fs::path& manifest) {
    try {
        load_recording(manifest);
    } catch (const IngestError& e) {
        return e.issue();
    }
    FAIL("expected an ingest error");
    return IngestIssue::MissingFile;
}

SynthSpec small_spec() {
    SynthSpec spec = default_synth_spec();
    spec.subjects_ad = 1;
    spec.subjects_nonad = 1;
    spec.sessions = 6;
    spec.duration_seconds = 4.0;
    spec.channels = {"F7", "T7", "O1", "Cz"};
    spec.profiles.front().channels_affected = {"F7", "T7"};
    return spec;
}

}  // namespace

TEST_CASE("standard montage") {
    const auto& m = standard_montage();
    CHECK(m.size() == 19);
    CHECK(m.front() == "Fp1");
    CHECK(m.back() == "O2");
    CHECK(std::set<std::string_view>(m.begin(), m.end()).size() == 19);
    CHECK(is_standard_channel("T7"));
    CHECK_FALSE(is_standard_channel("T3"));
}

TEST_CASE("labels") {
    CHECK(parse_label("AD") == Label::AD);
    CHECK(parse_label("NonAD") == Label::NonAD);
    CHECK_THROWS_AS(parse_label("ad"), ValidationError);
    CHECK(label_sign(Label::AD) == 1);
    CHECK(label_sign(Label::NonAD) == -1);
}

TEST_CASE("load a well-formed recording") {
    const auto dir = test::scratch_dir("dataset_ok");
    const auto rec = load_recording(write_case(dir, "Fp1,Fp2\n1.5,-2\n0,3e-1\n", R"(, "montage": "10-20")"));
    CHECK(rec.key.subject_id == "S01");
    CHECK(rec.key.label == Label::AD);
    CHECK(rec.channel_labels == std::vector<std::string>{"Fp1", "Fp2"});
    CHECK(rec.samples[0] == std::vector<double>{1.5, 0.0});
    CHECK(rec.samples[1] == std::vector<double>{-2.0, 0.3});
    CHECK(rec.standard_montage);
}

TEST_CASE("ingest errors carry their category") {
    const auto dir = test::scratch_dir("dataset_bad");
    CHECK(issue_of(dir / "absent.json") == IngestIssue::MissingFile);

    write_file(dir / "broken.json", "{ not json");
    CHECK(issue_of(dir / "broken.json") == IngestIssue::MalformedManifest);

    CHECK(issue_of(write_case(dir, "Fp1,1.0\n1,2\n")) == IngestIssue::MalformedHeader);
    CHECK(issue_of(write_case(dir, "Fp1,Fp2\n1,2\n3\n")) == IngestIssue::RaggedRow);
    CHECK(issue_of(write_case(dir, "Fp1,Fp2\n1,abc\n")) == IngestIssue::MalformedValue);
    CHECK(issue_of(write_case(dir, "Fp1,Fp2\n1,nan\n")) == IngestIssue::NonFiniteSample);
    CHECK(issue_of(write_case(dir, "Fp1,Fp1\n1,2\n")) == IngestIssue::DuplicateLabel);
    CHECK(issue_of(write_case(dir, "Fp1,X9\n1,2\n", R"(, "montage": "10-20")")) == IngestIssue::UnknownMontageLabel);
    CHECK(issue_of(write_case(dir, "Fp1,Fp2\n1,2\n", "", 50.0)) == IngestIssue::InvalidSamplingRate);
    CHECK(issue_of(write_case(dir, "Fp1,Fp2\n")) == IngestIssue::EmptyRecording);

    write_file(dir / "rec.json", R"({"subject_id": "S01", "session_index": 1, "label": "XX",)"
                                 R"( "sampling_rate_hz": 250, "data_file": "rec.csv"})");
    CHECK(issue_of(dir / "rec.json") == IngestIssue::MalformedManifest);
}

TEST_CASE("custom montage labels are accepted") {
    const auto dir = test::scratch_dir("dataset_custom");
    CHECK_NOTHROW(load_recording(write_case(dir, "A1,X9\n1,2\n", R"(, "montage": "custom")")));
}

TEST_CASE("save and load round-trip bit-exactly") {
    const auto recs = synthesize_dataset(small_spec(), 4);
    const auto dir = test::scratch_dir("dataset_roundtrip");
    const auto manifest = save_recording(recs[3], dir, "r3");
    CHECK(load_recording(manifest) == recs[3]);
    CHECK(list_manifests(dir) == std::vector<fs::path>{manifest});
}

TEST_CASE("session split") {
    const auto recs = synthesize_dataset(small_spec(), 1);
    REQUIRE(recs.size() == 12);
    const auto split = session_split(recs);
    CHECK(split.training.size() == 10);
    CHECK(split.testing.size() == 2);
    for (std::size_t t : split.testing) CHECK(recs[t].key.session_index == 6);
    for (std::size_t t : split.training) CHECK(recs[t].key.session_index <= 5);

    std::vector<RecordingKey> keys;
    for (const auto& r : recs) keys.push_back(r.key);
    keys.pop_back();
    try {
        session_split(keys);
        FAIL("expected a validation error");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find(keys.back().subject_id) != std::string::npos);
    }
}

TEST_CASE("default synthetic dataset dimensions") {
    SynthSpec spec = default_synth_spec();
    CHECK(spec.subjects_ad + spec.subjects_nonad == 11);
    CHECK(spec.sessions == 6);
    CHECK(spec.channels.size() == 19);
    CHECK(static_cast<std::size_t>(spec.duration_seconds * spec.sampling_rate_hz) == 10000);
}

TEST_CASE("synthesis is a pure function of spec and seed") {
    const auto spec = small_spec();
    const auto a = synthesize_dataset(spec, 77);
    const auto b = synthesize_dataset(spec, 77);
    const auto c = synthesize_dataset(spec, 78);
    CHECK(a == b);
    CHECK_FALSE(a == c);
    CHECK(a.front().key.label == Label::AD);
    CHECK(a.back().key.label == Label::NonAD);
    CHECK(a.front().sample_count() == 1000);
}

TEST_CASE("synth spec JSON round trip and validation") {
    const auto spec = default_synth_spec();
    const auto text = synth_spec_to_json(spec);
    CHECK(synth_spec_to_json(synth_spec_from_json(text)) == text);

    SynthSpec bad = spec;
    bad.sessions = 0;
    CHECK_THROWS_AS(validate(bad), ValidationError);
    bad = spec;
    bad.profiles.front().band = "gamma";
    CHECK_THROWS(validate(bad));
    CHECK_THROWS(synth_spec_from_json("[1, 2"));
}
