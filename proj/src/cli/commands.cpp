#include "cli/commands.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "qeeg/baseline.hpp"
#include "qeeg/checksum.hpp"
#include "qeeg/classifier.hpp"
#include "qeeg/connectivity.hpp"
#include "qeeg/dataset.hpp"
#include "qeeg/error.hpp"
#include "qeeg/feature_table.hpp"
#include "qeeg/format.hpp"
#include "qeeg/json_io.hpp"
#include "qeeg/pipeline.hpp"
#include "qeeg/search.hpp"

namespace qeeg::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string data;
    std::string features;
    std::string band = "alpha";
    std::string channels;
    std::vector<std::string> montage;
    double segment_seconds = 1.0;
    std::string projection = "mean";
    std::size_t pcs = 0;
    double pc_threshold = 0.9;
    std::size_t pc_sweep = 20;
    double svm_c = 1.0;
    std::uint64_t seed = 1;
    std::size_t parallelism = 0;
    std::string out = ".";

    // command specific
    std::string model;
    std::string spec;
    std::string mode = "triple";
    bool all_recordings = false;
    std::size_t folds = 10;
    std::size_t repeats = 1;
    std::string grid = "segment";
    std::vector<std::string> values;

    // which optional flags were given
    bool band_given = false;
    bool segment_given = false;
    bool pcs_given = false;
    bool threshold_given = false;
    bool sweep_given = false;
};

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (!out) throw IoError("write failed: " + path.string());
}

/// Collects outputs of one command and writes run_manifest.json last.
class Run {
public:
    Run(std::string command, json config, fs::path dir)
        : command_(std::move(command)), config_(std::move(config)), dir_(std::move(dir)) {
        fs::create_directories(dir_);
    }

    const json& config() const { return config_; }

    void input(const std::string& name, const std::string& checksum) { inputs_[name] = checksum; }

    void write_json(const std::string& file, json body) {
        body["command"] = command_;
        body["config"] = config_;
        body["checksum"] = checksum_hex(body.dump());
        write(file, body.dump(2) + "\n");
    }

    void write_csv(const std::string& file, const std::string& body) {
        std::string text = "# command=" + command_ + "\n";
        text += "# config=" + config_.dump() + "\n";
        text += "# checksum=" + checksum_hex(body) + "\n";
        write(file, text + body);
    }

    void record(const std::string& file, const std::string& text) { outputs_.push_back({file, checksum_hex(text)}); }

    void write(const std::string& file, const std::string& text) {
        write_text(dir_ / file, text);
        record(file, text);
    }

    void finish() {
        json manifest;
        manifest["command"] = command_;
        manifest["config"] = config_;
        manifest["inputs"] = inputs_;
        json outputs = json::array();
        for (const auto& [file, sum] : outputs_) outputs.push_back({{"file", file}, {"checksum", sum}});
        manifest["outputs"] = std::move(outputs);
        write_text(dir_ / "run_manifest.json", manifest.dump(2) + "\n");
    }

    const fs::path& dir() const { return dir_; }

private:
    std::string command_;
    json config_;
    fs::path dir_;
    json inputs_ = json::object();
    std::vector<std::pair<std::string, std::string>> outputs_;
};

PcPolicy policy(const Options& o, PcPolicy fallback) {
    if (o.pcs_given) return PcPolicy::fixed(o.pcs);
    if (o.threshold_given) return PcPolicy::by_threshold(o.pc_threshold);
    if (o.sweep_given) return PcPolicy::sweep(o.pc_sweep);
    return fallback;
}

PipelineParams params_of(const Options& o, PcPolicy fallback) {
    PipelineParams p;
    p.segment_seconds = o.segment_seconds;
    p.projection = parse_projection(o.projection);
    p.pcs = policy(o, fallback);
    p.svm_c = o.svm_c;
    if (!(p.svm_c > 0.0)) throw ParameterError("--svm-c must be positive");
    if (p.pcs.kind == PcPolicy::Kind::Threshold && !(p.pcs.threshold > 0.0 && p.pcs.threshold <= 1.0))
        throw ParameterError("--pc-threshold must lie in (0, 1]");
    if (p.pcs.kind != PcPolicy::Kind::Threshold && p.pcs.count < 1)
        throw ParameterError("component count must be >= 1");
    return p;
}

/// Resolved configuration echoed into every output. Parallelism and the
/// output directory are left out so outputs compare equal across them.
json base_config(const std::string& command, const Options& o, const PipelineParams& p) {
    json c;
    c["command"] = command;
    c["data"] = o.data;
    c["features"] = o.features;
    c["band"] = o.band;
    c["channels"] = o.channels;
    c["montage"] = o.montage;
    c["segment_seconds"] = p.segment_seconds;
    c["projection"] = to_string(p.projection);
    c["pcs"] = p.pcs.describe();
    c["svm_c"] = p.svm_c;
    c["seed"] = o.seed;
    return c;
}

std::vector<EegRecording> load_dataset(const Options& o, Run& run) {
    if (o.data.empty()) throw UsageError("--data DIR is required");
    const auto manifests = list_manifests(o.data);
    if (manifests.empty()) throw UsageError("no recording manifests (*.json) in " + o.data);
    std::vector<EegRecording> recordings;
    recordings.reserve(manifests.size());
    Fnv1a h;
    for (const auto& m : manifests) {
        recordings.push_back(load_recording(m));
        h.update(m.filename().string());
        for (const auto& series : recordings.back().samples) h.update(series);
    }
    run.input("data", h.hex());
    return recordings;
}

FeatureTable restrict_channels(const FeatureTable& table, const std::vector<std::string>& names) {
    std::vector<std::size_t> idx;
    for (const auto& n : names) idx.push_back(table.channel_index(n));
    FeatureTable out(table.segment_seconds(), names, table.segments());
    for (std::size_t r = 0; r < table.recording_count(); ++r) {
        std::vector<BandFeatureVector> features;
        for (std::size_t c = 0; c < idx.size(); ++c)
            for (Band b : kAllBands) {
                const auto v = table.values(r, idx[c], b);
                features.push_back({names[c], b, {v.begin(), v.end()}, table.segment_seconds()});
            }
        out.add(table.recordings()[r], features);
    }
    return out;
}

FeatureTable load_table(const Options& o, Run& run, std::optional<std::vector<std::string>> channels) {
    if (!o.features.empty() && !o.data.empty()) throw UsageError("give either --data or --features, not both");
    if (!o.features.empty()) {
        FeatureTable table = read_feature_cache(o.features);
        run.input("features", table.checksum());
        if (o.segment_given && table.segment_seconds() != o.segment_seconds)
            throw ParameterError("--segment-seconds " + format_double(o.segment_seconds) +
                                 " does not match the feature cache (" + format_double(table.segment_seconds()) + ")");
        if (channels) return restrict_channels(table, *channels);
        return table;
    }
    if (o.data.empty()) throw UsageError("one of --data DIR or --features CSV is required");
    const auto recordings = load_dataset(o, run);
    return build_feature_table(recordings, o.segment_seconds, o.parallelism, std::move(channels));
}

ChannelQuadruple quadruple_of(const Options& o) {
    if (o.channels.empty()) throw UsageError("--channels A,B,C,D is required");
    return ChannelQuadruple::parse(o.channels);
}

std::vector<std::string> names_of(const ChannelQuadruple& q) { return {q.channels().begin(), q.channels().end()}; }

std::array<std::size_t, 4> indices_of(const FeatureTable& table, const ChannelQuadruple& q) {
    return {table.channel_index(q[0]), table.channel_index(q[1]), table.channel_index(q[2]),
            table.channel_index(q[3])};
}

json outcome_json(const TrialOutcome& o) {
    json j;
    j["valid"] = o.valid;
    if (!o.valid) j["error"] = o.error;
    j["p_used"] = o.p_used;
    j["confusion"] = {{"tp", o.counts.tp}, {"tn", o.counts.tn}, {"fp", o.counts.fp}, {"fn", o.counts.fn}};
    j["acc"] = optional_to_json(o.metrics.acc);
    j["sen"] = optional_to_json(o.metrics.sen);
    j["spe"] = optional_to_json(o.metrics.spe);
    return j;
}

std::string percent(const std::optional<double>& v) {
    if (!v) return "undefined";
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(2);
    os << *v << '%';
    return os.str();
}

int cmd_synth(const Options& o, std::ostream& out) {
    SynthSpec spec = o.spec.empty() ? default_synth_spec() : synth_spec_from_json(read_text(o.spec));
    validate(spec);
    json config;
    config["command"] = "synth";
    config["seed"] = o.seed;
    config["spec"] = json::parse(synth_spec_to_json(spec));
    Run run("synth", config, o.out);
    const auto recordings = synthesize_dataset(spec, o.seed);
    for (const auto& r : recordings) {
        const std::string stem = r.key.subject_id + "_s" + std::to_string(r.key.session_index);
        const fs::path manifest = save_recording(r, run.dir(), stem);
        run.record(manifest.filename().string(), read_text(manifest));
        run.record(stem + ".csv", read_text(run.dir() / (stem + ".csv")));
    }
    run.write_json("synth_spec.json", {{"spec", config["spec"]}, {"recordings", recordings.size()}});
    run.finish();
    out << "synth: " << recordings.size() << " recordings written to " << run.dir().string() << '\n';
    return 0;
}

int cmd_features(const Options& o, std::ostream& out) {
    const PipelineParams p = params_of(o, PcPolicy::by_threshold(0.9));
    json config = base_config("features", o, p);
    Run run("features", config, o.out);
    if (o.data.empty()) throw UsageError("--data DIR is required");
    const auto recordings = load_dataset(o, run);
    const FeatureTable table = build_feature_table(
        recordings, o.segment_seconds, o.parallelism,
        o.montage.empty() ? std::nullopt : std::optional<std::vector<std::string>>(o.montage));
    std::ostringstream body;
    write_feature_cache(table, body);
    run.write_csv("features.csv", body.str());
    run.finish();
    out << "features: " << table.recording_count() << " recordings x " << table.channels().size() << " channels x "
        << table.segments() << " segments -> " << (run.dir() / "features.csv").string() << '\n';
    return 0;
}

int cmd_train(const Options& o, std::ostream& out) {
    const PipelineParams p = params_of(o, PcPolicy::by_threshold(0.9));
    const Band band = parse_band(o.band);
    const ChannelQuadruple quad = quadruple_of(o);
    Run run("train", base_config("train", o, p), o.out);
    const FeatureTable table = load_table(o, run, names_of(quad));
    PipelineParams params = p;
    params.segment_seconds = table.segment_seconds();
    const DatasetSplit split = session_split(table.recordings());
    const EmbeddedSplit data = embed_split(table, split, indices_of(table, quad), band);
    TrainedPipeline trained = train_pipeline(data.train, data.train_labels, params);
    trained.qpca.band = band;
    trained.qpca.channels = names_of(quad);

    json body;
    body["qpca"] = json::parse(to_json(trained.qpca));
    body["svm"] = {{"weights", trained.svm.weights},
                   {"bias", trained.svm.bias},
                   {"regularization_c", trained.svm.regularization_c}};
    body["training_samples"] = data.train.size();
    run.write_json("model.json", body);
    run.finish();
    out << "train: " << quad.to_string() << ' ' << to_string(band) << ", p = " << trained.qpca.p << ", "
        << data.train.size() << " training samples -> " << (run.dir() / "model.json").string() << '\n';
    return 0;
}

int cmd_eval(const Options& o, std::ostream& out) {
    if (o.model.empty()) throw UsageError("--model FILE is required");
    const json model_file = json::parse(read_text(o.model), nullptr, false);
    if (model_file.is_discarded() || !model_file.contains("qpca") || !model_file.contains("svm"))
        throw ValidationError("not a model file: " + o.model);
    TrainedPipeline trained;
    trained.qpca = qpca_model_from_json(model_file.at("qpca").dump());
    trained.svm.weights = model_file.at("svm").at("weights").get<std::vector<double>>();
    trained.svm.bias = model_file.at("svm").at("bias").get<double>();
    trained.svm.regularization_c = model_file.at("svm").at("regularization_c").get<double>();
    if (trained.svm.weights.size() != trained.qpca.p)
        throw ValidationError("model file: classifier weights do not match the number of components");

    if (o.band_given && parse_band(o.band) != trained.qpca.band)
        throw ParameterError("--band " + o.band + " does not match the model band " +
                             std::string(to_string(trained.qpca.band)));
    if (o.segment_given && o.segment_seconds != trained.qpca.segment_seconds)
        throw ParameterError("--segment-seconds does not match the model (" +
                             format_double(trained.qpca.segment_seconds) + ")");
    if (trained.qpca.channels.size() != 4) throw ValidationError("model file: quadruple must name 4 channels");

    Options resolved = o;
    resolved.band = std::string(to_string(trained.qpca.band));
    resolved.segment_seconds = trained.qpca.segment_seconds;
    resolved.segment_given = true;
    resolved.channels = trained.qpca.channels[0] + "," + trained.qpca.channels[1] + "," + trained.qpca.channels[2] +
                        "," + trained.qpca.channels[3];
    PipelineParams p = params_of(resolved, PcPolicy::fixed(trained.qpca.p));
    p.projection = trained.qpca.projection;
    json config = base_config("eval", resolved, p);
    config["model"] = o.model;
    Run run("eval", config, o.out);
    run.input("model", checksum_hex(model_file.dump()));

    const ChannelQuadruple quad = quadruple_of(resolved);
    const FeatureTable table = load_table(resolved, run, names_of(quad));
    const DatasetSplit split = session_split(table.recordings());
    const EmbeddedSplit data = embed_split(table, split, indices_of(table, quad), trained.qpca.band);
    TrialOutcome outcome;
    outcome.valid = true;
    outcome.p_used = trained.qpca.p;
    outcome.counts = confusion(data.test_labels, predict(trained, data.test));
    outcome.metrics = metrics(outcome.counts);

    json body = outcome_json(outcome);
    body["test_samples"] = data.test.size();
    run.write_json("metrics.json", body);
    run.finish();
    out << "eval: " << data.test.size() << " test samples, ACC " << percent(outcome.metrics.acc) << ", SEN "
        << percent(outcome.metrics.sen) << ", SPE " << percent(outcome.metrics.spe) << '\n';
    return 0;
}

int cmd_search(const Options& o, std::ostream& out) {
    const PipelineParams p = params_of(o, PcPolicy::sweep(20));
    const Band band = parse_band(o.band);
    Run run("search", base_config("search", o, p), o.out);
    const FeatureTable table = load_table(
        o, run, o.montage.empty() ? std::nullopt : std::optional<std::vector<std::string>>(o.montage));
    PipelineParams params = p;
    params.segment_seconds = table.segment_seconds();
    const DatasetSplit split = session_split(table.recordings());
    const SearchResult result = run_search(table, split, band, params, o.parallelism);

    std::ostringstream results;
    write_results_csv(result, results);
    run.write_csv("search_results.csv", results.str());
    std::ostringstream summary;
    write_summary_csv(result, summary);
    run.write_csv("search_summary.csv", summary.str());
    const RankedReport report = rank(result);
    run.write_json("search_ranked.json", json::parse(ranked_report_json(report)));
    run.finish();

    out << "search: " << result.trials.size() << " trials over " << result.summaries.size() << " combinations, "
        << result.invalid_trials << " invalid\n";
    if (!report.combinations.empty()) {
        const auto& best = report.combinations.front();
        out << "best combination: " << best.combination[0] << ',' << best.combination[1] << ','
            << best.combination[2] << ',' << best.combination[3] << " mean ACC " << percent(best.mean_acc) << '\n';
    }
    return 0;
}

int cmd_connectivity(const Options& o, std::ostream& out) {
    const PipelineParams p = params_of(o, PcPolicy::fixed(1));
    const TupleMode mode = parse_tuple_mode(o.mode);
    std::vector<Band> bands(kAllBands.begin(), kAllBands.end());
    if (o.band_given) bands = {parse_band(o.band)};
    json config = base_config("connectivity", o, p);
    config["mode"] = to_string(mode);
    config["band"] = o.band_given ? o.band : "all";
    config["recordings"] = o.all_recordings ? "all" : "training";
    Run run("connectivity", config, o.out);
    const FeatureTable table = load_table(
        o, run, o.montage.empty() ? std::nullopt : std::optional<std::vector<std::string>>(o.montage));
    if (table.channels().size() < tuple_size(mode))
        throw ParameterError(std::string(to_string(mode)) + " mode needs at least " +
                             std::to_string(tuple_size(mode)) + " channels");

    std::vector<std::size_t> recordings;
    if (o.all_recordings) {
        for (std::size_t r = 0; r < table.recording_count(); ++r) recordings.push_back(r);
    } else {
        recordings = session_split(table.recordings()).training;
    }

    DistanceReport report;
    report.mode = mode;
    for (std::size_t r : recordings)
        (table.recordings()[r].label == Label::AD ? report.ad_samples : report.nonad_samples) += 1;
    for (Band band : bands) {
        const auto measures = measure_tuples(table, recordings, mode, band, o.parallelism);
        for (Label label : {Label::AD, Label::NonAD}) {
            const auto tensor = build_tensor(table, measures, mode, band, label);
            run.write_json("tensor_" + std::string(to_string(mode)) + "_" + std::string(to_string(band)) + "_" +
                               std::string(to_string(label)) + ".json",
                           json::parse(tensor_json(tensor)));
        }
        report.bands.push_back(band_distance(band, measures));
    }
    run.write_json("distances_" + std::string(to_string(mode)) + ".json",
                   json::parse(distance_report_json(report)));
    run.finish();

    for (const auto& b : report.bands)
        out << "connectivity: " << to_string(b.band) << " Dist " << format_double(b.dist) << " (" << b.valid_tuples
            << " tuples, " << b.missing_tuples << " missing)\n";
    return 0;
}

int cmd_crossval(const Options& o, std::ostream& out) {
    const PipelineParams p = params_of(o, PcPolicy::by_threshold(0.9));
    if (p.pcs.kind == PcPolicy::Kind::SweepBest)
        throw ParameterError("crossval needs --pcs or --pc-threshold (no per-fold accuracy search)");
    const Band band = parse_band(o.band);
    const ChannelQuadruple quad = quadruple_of(o);
    json config = base_config("crossval", o, p);
    config["folds"] = o.folds;
    config["repeats"] = o.repeats;
    Run run("crossval", config, o.out);
    const FeatureTable table = load_table(o, run, names_of(quad));

    DatasetSplit all;
    for (std::size_t r = 0; r < table.recording_count(); ++r) all.training.push_back(r);
    const EmbeddedSplit data = embed_split(table, all, indices_of(table, quad), band);

    const FoldEvaluator evaluate = [&](std::span<const std::size_t> train, std::span<const std::size_t> test) {
        std::vector<QuaternionVector> tv;
        std::vector<int> tl;
        for (std::size_t i : train) {
            tv.push_back(data.train[i]);
            tl.push_back(data.train_labels[i]);
        }
        std::vector<QuaternionVector> sv;
        for (std::size_t i : test) sv.push_back(data.train[i]);
        const auto predicted = predict(train_pipeline(tv, tl, p), sv);
        std::size_t wrong = 0;
        for (std::size_t i = 0; i < test.size(); ++i) wrong += predicted[i] != data.train_labels[test[i]] ? 1 : 0;
        return wrong;
    };
    const auto cv = cross_validate(data.train_labels, o.folds, o.repeats, o.seed, evaluate, o.parallelism);

    json body;
    body["k"] = cv.k;
    body["repeats"] = cv.repeats;
    body["seed"] = cv.seed;
    body["mean_score"] = cv.mean_score;
    body["std_score"] = cv.std_score;
    body["repeat_scores"] = cv.repeat_scores;
    body["folds"] = cv.folds;
    run.write_json("crossval.json", body);
    run.finish();
    out << "crossval: " << cv.k << "-fold x " << cv.repeats << ", mean score " << format_double(cv.mean_score)
        << ", std " << format_double(cv.std_score) << '\n';
    return 0;
}

SweepGrid grid_of(const Options& o) {
    SweepGrid grid;
    grid.kind = parse_sweep_kind(o.grid);
    if (o.values.empty()) {
        switch (grid.kind) {
            case SweepKind::SegmentSeconds: grid.values.assign(kSegmentGrid.begin(), kSegmentGrid.end()); break;
            case SweepKind::Projection:
                for (std::size_t i = 0; i < kAllProjections.size(); ++i) grid.values.push_back(static_cast<double>(i));
                break;
            case SweepKind::Components:
                for (int i = 1; i <= 20; ++i) grid.values.push_back(i);
                break;
        }
        return grid;
    }
    for (const auto& v : o.values) {
        if (grid.kind == SweepKind::Projection) {
            const Projection proj = parse_projection(v);
            const auto it = std::find(kAllProjections.begin(), kAllProjections.end(), proj);
            grid.values.push_back(static_cast<double>(it - kAllProjections.begin()));
            continue;
        }
        try {
            std::size_t used = 0;
            grid.values.push_back(std::stod(v, &used));
            if (used != v.size()) throw std::invalid_argument(v);
        } catch (const std::exception&) {
            throw ParameterError("bad sweep value '" + v + "'");
        }
    }
    return grid;
}

int cmd_sweep(const Options& o, std::ostream& out) {
    const PipelineParams p = params_of(o, PcPolicy::sweep(20));
    const Band band = parse_band(o.band);
    const ChannelQuadruple quad = quadruple_of(o);
    const SweepGrid grid = grid_of(o);
    json config = base_config("sweep", o, p);
    config["grid"] = to_string(grid.kind);
    config["values"] = grid.values;
    Run run("sweep", config, o.out);
    const auto recordings = load_dataset(o, run);
    const auto rows = sweep_parameters(recordings, quad, band, p, grid, o.parallelism);

    std::string body = "kind,value,p_used,acc,sen,spe,valid\n";
    std::size_t invalid = 0;
    for (const auto& r : rows) {
        body += std::string(to_string(r.kind)) + "," + r.value + "," + std::to_string(r.outcome.p_used) + "," +
                format_optional(r.outcome.metrics.acc) + "," + format_optional(r.outcome.metrics.sen) + "," +
                format_optional(r.outcome.metrics.spe) + (r.outcome.valid ? ",1\n" : ",0\n");
        invalid += r.outcome.valid ? 0 : 1;
    }
    run.write_csv("sweep.csv", body);
    run.finish();
    for (const auto& r : rows) {
        out << "sweep: " << to_string(r.kind) << '=' << r.value << " ACC " << percent(r.outcome.metrics.acc);
        if (!r.outcome.valid) out << " (invalid: " << r.outcome.error << ')';
        out << '\n';
    }
    out << "sweep: " << rows.size() << " points, " << invalid << " invalid\n";
    return 0;
}

int cmd_baseline(const Options& o, std::ostream& out) {
    const PipelineParams p = params_of(o, PcPolicy::sweep(20));
    const Band band = parse_band(o.band);
    const ChannelQuadruple quad = quadruple_of(o);
    Run run("baseline", base_config("baseline", o, p), o.out);
    const FeatureTable table = load_table(o, run, names_of(quad));
    PipelineParams params = p;
    params.segment_seconds = table.segment_seconds();
    const ComparisonReport report =
        compare(table, session_split(table.recordings()), indices_of(table, quad), band, params);
    run.write_json("comparison.json", json::parse(comparison_json(report)));
    run.finish();
    out << "baseline: QPCA ACC " << percent(report.qpca.metrics.acc) << ", real PCA ACC "
        << percent(report.real_pca.metrics.acc) << '\n';
    if (!report.qpca.valid) out << "qpca arm failed: " << report.qpca.error << '\n';
    if (!report.real_pca.valid) out << "real pca arm failed: " << report.real_pca.error << '\n';
    return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Quaternion PCA toolkit for multichannel EEG", "qeeg"};
    app.require_subcommand(1);

    struct Command {
        CLI::App* app;
        int (*run)(const Options&, std::ostream&);
    };
    std::vector<Command> commands;

    auto add_data = [&](CLI::App* sub) {
        sub->add_option("--data", o.data, "Directory of recording manifests");
        sub->add_option("--features", o.features, "Feature cache CSV")->check(CLI::ExistingFile);
    };
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--segment-seconds", o.segment_seconds, "Segment length in seconds")
            ->each([&](const std::string&) { o.segment_given = true; });
        sub->add_option("--seed", o.seed, "Random seed");
        sub->add_option("--parallelism", o.parallelism, "Worker threads (0 = all cores)");
        sub->add_option("--out", o.out, "Output directory");
    };
    auto add_model = [&](CLI::App* sub, bool channels) {
        sub->add_option("--band", o.band, "delta, theta, alpha or beta")
            ->each([&](const std::string&) { o.band_given = true; });
        if (channels) sub->add_option("--channels", o.channels, "Ordered channel quadruple A,B,C,D");
        sub->add_option("--projection", o.projection, "mean, absolute, norm or phase");
        auto* pcs = sub->add_option("--pcs", o.pcs, "Fixed number of principal components")
                        ->each([&](const std::string&) { o.pcs_given = true; });
        auto* thr = sub->add_option("--pc-threshold", o.pc_threshold, "Eigenvalue mass threshold")
                        ->each([&](const std::string&) { o.threshold_given = true; });
        auto* sweep = sub->add_option("--pc-sweep", o.pc_sweep, "Best of 1..L components by test accuracy")
                          ->each([&](const std::string&) { o.sweep_given = true; });
        pcs->excludes(thr)->excludes(sweep);
        thr->excludes(sweep);
        sub->add_option("--svm-c", o.svm_c, "SVM regularization constant");
    };

    auto* synth = app.add_subcommand("synth", "Write a synthetic two-class dataset");
    synth->add_option("--spec", o.spec, "Synthesis spec JSON (default: built-in)")->check(CLI::ExistingFile);
    synth->add_option("--seed", o.seed, "Random seed");
    synth->add_option("--out", o.out, "Output directory");
    commands.push_back({synth, cmd_synth});

    auto* features = app.add_subcommand("features", "Featurize recordings into a cache CSV");
    features->add_option("--data", o.data, "Directory of recording manifests");
    features->add_option("--montage", o.montage, "Restrict to these channels")->delimiter(',');
    add_common(features);
    commands.push_back({features, cmd_features});

    auto* train = app.add_subcommand("train", "Fit QPCA and the SVM on the training split");
    add_data(train);
    add_common(train);
    add_model(train, true);
    commands.push_back({train, cmd_train});

    auto* eval = app.add_subcommand("eval", "Evaluate a trained model on the test split");
    add_data(eval);
    add_common(eval);
    eval->add_option("--model", o.model, "Model JSON from train")->check(CLI::ExistingFile);
    eval->add_option("--band", o.band, "Expected band (must match the model)")
        ->each([&](const std::string&) { o.band_given = true; });
    commands.push_back({eval, cmd_eval});

    auto* search = app.add_subcommand("search", "Evaluate every ordered 4-channel tuple");
    add_data(search);
    add_common(search);
    add_model(search, false);
    search->add_option("--montage", o.montage, "Restrict the search to these channels")->delimiter(',');
    commands.push_back({search, cmd_search});

    auto* connectivity = app.add_subcommand("connectivity", "Connectivity tensors and interclass distances");
    add_data(connectivity);
    add_common(connectivity);
    connectivity->add_option("--band", o.band, "Single band (default: all four)")
        ->each([&](const std::string&) { o.band_given = true; });
    connectivity->add_option("--mode", o.mode, "triple or quadruple");
    connectivity->add_option("--montage", o.montage, "Restrict to these channels")->delimiter(',');
    connectivity->add_flag("--all-recordings", o.all_recordings, "Use every recording instead of the training split");
    commands.push_back({connectivity, cmd_connectivity});

    auto* crossval = app.add_subcommand("crossval", "Repeated stratified k-fold cross-validation");
    add_data(crossval);
    add_common(crossval);
    add_model(crossval, true);
    crossval->add_option("--folds", o.folds, "Number of folds");
    crossval->add_option("--repeats", o.repeats, "Number of repeats");
    commands.push_back({crossval, cmd_crossval});

    auto* sweep = app.add_subcommand("sweep", "Vary one pipeline parameter");
    sweep->add_option("--data", o.data, "Directory of recording manifests");
    add_common(sweep);
    add_model(sweep, true);
    sweep->add_option("--grid", o.grid, "segment, projection or pcs");
    sweep->add_option("--values", o.values, "Grid values (default: the standard grid)")->delimiter(',');
    commands.push_back({sweep, cmd_sweep});

    auto* baseline = app.add_subcommand("baseline", "Compare QPCA with real PCA on concatenated channels");
    add_data(baseline);
    add_common(baseline);
    add_model(baseline, true);
    commands.push_back({baseline, cmd_baseline});

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        for (const auto& c : commands)
            if (c.app->parsed()) return c.run(o, out);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const nlohmann::json::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}

}  // namespace qeeg::cli
