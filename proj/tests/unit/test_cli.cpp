#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli/commands.hpp"
#include "fixtures.hpp"
#include "support.hpp"

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = qeeg::cli::run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Small synthetic dataset written once per test binary.
const fs::path& data_dir() {
    static const fs::path dir = [] {
        const fs::path root = qeeg::test::scratch_dir("cli_data");
        const fs::path spec = root / "spec.json";
        std::ofstream(spec) << qeeg::synth_spec_to_json(qeeg::test::reduced_spec({"F7", "T7", "T8", "P4", "O1"}, 8.0));
        const auto r = run({"synth", "--spec", spec.string(), "--seed", "3", "--out", (root / "data").string()});
        REQUIRE(r.code == 0);
        return root / "data";
    }();
    return dir;
}

fs::path out_dir(const std::string& name) {
    static const fs::path root = qeeg::test::scratch_dir("cli_out");
    const fs::path p = root / name;
    fs::remove_all(p);
    return p;
}

}  // namespace

TEST_CASE("synth writes manifests and a run manifest") {
    const auto& data = data_dir();
    std::size_t manifests = 0;
    for (const auto& e : fs::directory_iterator(data))
        if (e.path().extension() == ".json" && e.path().filename() != "run_manifest.json" &&
            e.path().filename() != "synth_spec.json")
            ++manifests;
    CHECK(manifests == 66);
    const auto run_manifest = json::parse(slurp(data / "run_manifest.json"));
    CHECK(run_manifest["command"] == "synth");
    CHECK(run_manifest["outputs"].size() == 2 * 66 + 1);
}

TEST_CASE("train then eval") {
    const auto model_dir = out_dir("train");
    const auto a = run({"train", "--data", data_dir().string(), "--band", "alpha", "--channels", "F7,T7,T8,P4", "--out",
                        model_dir.string()});
    REQUIRE_MESSAGE(a.code == 0, a.err);
    const auto model = json::parse(slurp(model_dir / "model.json"));
    CHECK(model["training_samples"] == 55);
    CHECK(model["config"]["band"] == "alpha");
    CHECK(model.contains("checksum"));

    const auto eval_dir = out_dir("eval");
    const auto b = run({"eval", "--data", data_dir().string(), "--model", (model_dir / "model.json").string(), "--out",
                        eval_dir.string()});
    REQUIRE_MESSAGE(b.code == 0, b.err);
    const auto metrics = json::parse(slurp(eval_dir / "metrics.json"));
    const auto& c = metrics["confusion"];
    CHECK(c["tp"].get<int>() + c["tn"].get<int>() + c["fp"].get<int>() + c["fn"].get<int>() == 11);
    CHECK(metrics["test_samples"] == 11);

    const auto mismatch = run({"eval", "--data", data_dir().string(), "--model", (model_dir / "model.json").string(),
                               "--band", "beta", "--out", out_dir("eval2").string()});
    CHECK(mismatch.code == 1);
    CHECK(mismatch.err.find("band") != std::string::npos);
}

TEST_CASE("feature cache feeds later commands") {
    const auto dir = out_dir("features");
    REQUIRE(run({"features", "--data", data_dir().string(), "--out", dir.string()}).code == 0);
    const std::string cache = slurp(dir / "features.csv");
    CHECK(cache.rfind("# command=features\n", 0) == 0);

    const auto from_data = out_dir("base_data");
    const auto from_cache = out_dir("base_cache");
    REQUIRE(run({"baseline", "--data", data_dir().string(), "--band", "alpha", "--channels", "F7,T7,T8,P4",
                 "--pc-sweep", "6", "--out", from_data.string()})
                .code == 0);
    REQUIRE(run({"baseline", "--features", (dir / "features.csv").string(), "--band", "alpha", "--channels",
                 "F7,T7,T8,P4", "--pc-sweep", "6", "--out", from_cache.string()})
                .code == 0);
    const auto x = json::parse(slurp(from_data / "comparison.json"));
    const auto y = json::parse(slurp(from_cache / "comparison.json"));
    CHECK(x["qpca"] == y["qpca"]);
    CHECK(x["real_pca"] == y["real_pca"]);
    CHECK(x["input_checksums"]["qpca"] == x["input_checksums"]["real_pca"]);

    CHECK(run({"baseline", "--features", (dir / "features.csv").string(), "--segment-seconds", "2", "--band", "alpha",
               "--channels", "F7,T7,T8,P4", "--out", out_dir("base_bad").string()})
              .code == 1);
}

TEST_CASE("search output is independent of parallelism") {
    const auto one = out_dir("search1");
    const auto many = out_dir("search8");
    const std::vector<std::string> common{"search", "--data", data_dir().string(), "--band", "alpha", "--pc-sweep", "3"};
    auto with = [&](const std::string& p, const fs::path& dir) {
        auto args = common;
        args.insert(args.end(), {"--parallelism", p, "--out", dir.string()});
        return run(args);
    };
    REQUIRE(with("1", one).code == 0);
    REQUIRE(with("8", many).code == 0);
    for (const char* f : {"search_results.csv", "search_summary.csv", "search_ranked.json"})
        CHECK_MESSAGE(slurp(one / f) == slurp(many / f), f);
    const std::string results = slurp(one / "search_results.csv");
    CHECK(std::count(results.begin(), results.end(), '\n') == 3 + 1 + 120);

    // Reruns are byte-identical.
    const auto again = out_dir("search1b");
    REQUIRE(with("1", again).code == 0);
    CHECK(slurp(one / "search_results.csv") == slurp(again / "search_results.csv"));
    CHECK(slurp(one / "run_manifest.json").find("\"outputs\"") != std::string::npos);
}

TEST_CASE("connectivity writes tensors and distances") {
    const auto dir = out_dir("conn");
    const auto r = run({"connectivity", "--data", data_dir().string(), "--mode", "triple", "--band", "alpha", "--out",
                        dir.string()});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    const auto ad = json::parse(slurp(dir / "tensor_triple_alpha_AD.json"));
    CHECK(ad["entries"].size() == 60);
    CHECK(fs::exists(dir / "tensor_triple_alpha_NonAD.json"));
    const auto d = json::parse(slurp(dir / "distances_triple.json"));
    CHECK(d["bands"].size() == 1);
    CHECK(d["config"]["recordings"] == "training");
}

TEST_CASE("crossval and sweep") {
    const auto cv_dir = out_dir("cv");
    REQUIRE(run({"crossval", "--data", data_dir().string(), "--band", "alpha", "--channels", "F7,T7,T8,P4", "--folds",
                 "5", "--repeats", "2", "--seed", "9", "--out", cv_dir.string()})
                .code == 0);
    const auto cv = json::parse(slurp(cv_dir / "crossval.json"));
    CHECK(cv["repeat_scores"].size() == 2);
    CHECK(cv["mean_score"].get<double>() >= 0.0);
    CHECK(run({"crossval", "--data", data_dir().string(), "--band", "alpha", "--channels", "F7,T7,T8,P4",
               "--pc-sweep", "3", "--out", out_dir("cv2").string()})
              .code == 1);

    const auto sw = out_dir("sweep");
    const auto r = run({"sweep", "--data", data_dir().string(), "--band", "alpha", "--channels", "F7,T7,T8,P4",
                        "--grid", "segment", "--pc-sweep", "3", "--out", sw.string()});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    const std::string csv = slurp(sw / "sweep.csv");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3 + 1 + 12);
    CHECK(csv.find("segment,1.25,") != std::string::npos);
}

TEST_CASE("usage errors") {
    const auto empty = out_dir("empty");
    fs::create_directories(empty);
    CHECK(run({"features", "--data", empty.string(), "--out", out_dir("e1").string()}).code == 2);
    CHECK(run({"train", "--band", "alpha", "--channels", "F7,T7,T8,P4", "--out", out_dir("e2").string()}).code == 2);
    CHECK(run({"frobnicate"}).code == 2);
    CHECK(run({"search", "--pcs", "2", "--pc-threshold", "0.9"}).code == 2);
    CHECK(run({"train", "--data", data_dir().string(), "--band", "gamma", "--channels", "F7,T7,T8,P4", "--out",
               out_dir("e3").string()})
              .code == 1);
    CHECK(run({"train", "--data", data_dir().string(), "--band", "alpha", "--channels", "F7,T7,T7,P4", "--out",
               out_dir("e4").string()})
              .code == 1);
}
