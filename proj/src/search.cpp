#include "qeeg/search.hpp"

#include <algorithm>
#include <map>
#include <ostream>

#include <json.hpp>

#include "qeeg/error.hpp"
#include "qeeg/format.hpp"
#include "qeeg/json_io.hpp"
#include "qeeg/parallel.hpp"

namespace qeeg {

using nlohmann::json;

std::uint64_t count_tuples(std::size_t n, std::size_t k, bool ordered) {
    if (k > n) throw ParameterError("tuple size " + std::to_string(k) + " exceeds montage size " + std::to_string(n));
    std::uint64_t count = 1;
    for (std::size_t i = 0; i < k; ++i) count = count * (n - i) / (ordered ? 1 : i + 1);
    return count;
}

TupleEnumerator::TupleEnumerator(std::size_t n, std::size_t k, bool ordered)
    : n_(n), k_(k), ordered_(ordered), size_(0) {
    if (k == 0) throw ParameterError("tuple size must be >= 1");
    size_ = static_cast<std::size_t>(count_tuples(n, k, ordered));
    combination_.resize(k);
    for (std::size_t i = 0; i < k; ++i) combination_[i] = i;
}

bool TupleEnumerator::advance_combination() {
    std::size_t i = k_;
    while (i > 0) {
        --i;
        if (combination_[i] < n_ - k_ + i) {
            ++combination_[i];
            for (std::size_t j = i + 1; j < k_; ++j) combination_[j] = combination_[j - 1] + 1;
            return true;
        }
    }
    return false;
}

std::optional<std::vector<std::size_t>> TupleEnumerator::next() {
    if (done_) return std::nullopt;
    if (!started_) {
        started_ = true;
        current_ = combination_;
        return current_;
    }
    if (ordered_ && std::next_permutation(current_.begin(), current_.end())) return current_;
    if (!advance_combination()) {
        done_ = true;
        return std::nullopt;
    }
    current_ = combination_;
    return current_;
}

std::vector<std::vector<std::size_t>> enumerate_tuples(std::size_t n, std::size_t k, bool ordered) {
    TupleEnumerator e(n, k, ordered);
    std::vector<std::vector<std::size_t>> out;
    out.reserve(e.size());
    while (auto t = e.next()) out.push_back(std::move(*t));
    return out;
}

SearchResult run_search(const FeatureTable& table, const DatasetSplit& split, Band band, const PipelineParams& params,
                        std::size_t parallelism) {
    const auto tuples = enumerate_tuples(table.channels().size(), 4, true);
    SearchResult result;
    result.band = band;
    result.trials.resize(tuples.size());
    parallel_for(tuples.size(), parallelism, [&](std::size_t i) {
        const auto& t = tuples[i];
        TrialResult& trial = result.trials[i];
        trial.trial_index = i;
        trial.band = band;
        for (std::size_t c = 0; c < 4; ++c) trial.channels[c] = table.channels()[t[c]];
        trial.outcome = evaluate_quadruple(table, split, {t[0], t[1], t[2], t[3]}, band, params);
    });
    for (const auto& t : result.trials) result.invalid_trials += t.outcome.valid ? 0 : 1;
    result.summaries = summarize(result.trials);
    return result;
}

std::vector<CombinationSummary> summarize(std::span<const TrialResult> trials) {
    std::map<std::array<std::string, 4>, std::size_t> slot;
    std::vector<CombinationSummary> out;
    std::vector<std::array<double, 3>> sums;
    std::vector<std::array<std::size_t, 3>> counts;
    for (const auto& trial : trials) {
        auto key = trial.channels;
        std::sort(key.begin(), key.end());
        key[0] += '\x1f' + std::string(to_string(trial.band));
        auto [it, inserted] = slot.try_emplace(key, out.size());
        if (inserted) {
            CombinationSummary s;
            s.combination = trial.channels;
            s.band = trial.band;
            out.push_back(s);
            sums.push_back({});
            counts.push_back({});
        }
        const std::size_t idx = it->second;
        CombinationSummary& s = out[idx];
        ++s.trials;
        if (!trial.outcome.valid) continue;
        ++s.valid_trials;
        const auto& m = trial.outcome.metrics;
        const std::array<std::optional<double>, 3> values{m.acc, m.sen, m.spe};
        for (std::size_t j = 0; j < 3; ++j) {
            if (!values[j]) continue;
            sums[idx][j] += *values[j];
            ++counts[idx][j];
        }
        if (m.acc && (!s.best_acc || *m.acc > *s.best_acc)) {
            s.best_acc = m.acc;
            s.best_permutation = trial.channels;
        }
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
        auto mean = [&](std::size_t j) -> std::optional<double> {
            if (counts[i][j] == 0) return std::nullopt;
            return sums[i][j] / static_cast<double>(counts[i][j]);
        };
        out[i].mean_acc = mean(0);
        out[i].mean_sen = mean(1);
        out[i].mean_spe = mean(2);
    }
    return out;
}

std::string_view to_string(Lobe lobe) noexcept {
    switch (lobe) {
        case Lobe::Frontal: return "frontal";
        case Lobe::Temporal: return "temporal";
        case Lobe::Parietal: return "parietal";
        case Lobe::Occipital: return "occipital";
        case Lobe::Other: return "other";
    }
    return "other";
}

Lobe lobe_of(std::string_view channel) noexcept {
    static constexpr std::pair<std::string_view, Lobe> kTable[] = {
        {"Fp1", Lobe::Frontal},  {"Fp2", Lobe::Frontal},  {"F3", Lobe::Frontal},    {"F4", Lobe::Frontal},
        {"Fz", Lobe::Frontal},   {"F7", Lobe::Temporal},  {"F8", Lobe::Temporal},   {"T7", Lobe::Temporal},
        {"T8", Lobe::Temporal},  {"P7", Lobe::Temporal},  {"P8", Lobe::Temporal},   {"C3", Lobe::Parietal},
        {"Cz", Lobe::Parietal},  {"C4", Lobe::Parietal},  {"Pz", Lobe::Parietal},   {"P3", Lobe::Parietal},
        {"P4", Lobe::Parietal},  {"O1", Lobe::Occipital}, {"O2", Lobe::Occipital},
    };
    for (const auto& [name, lobe] : kTable)
        if (name == channel) return lobe;
    return Lobe::Other;
}

namespace {

bool better(const std::optional<double>& a, const std::optional<double>& b) {
    if (a && b) return *a > *b;
    return a.has_value() && !b.has_value();
}

bool same(const std::optional<double>& a, const std::optional<double>& b) {
    return a.has_value() == b.has_value() && (!a || *a == *b);
}

std::array<std::string, 4> sorted(std::array<std::string, 4> names) {
    std::sort(names.begin(), names.end());
    return names;
}

json lobes_json(const std::array<std::string, 4>& channels) {
    json out = json::array();
    for (const auto& c : channels) out.push_back(to_string(lobe_of(c)));
    return out;
}

}  // namespace

RankedReport rank(const SearchResult& result, std::size_t top) {
    RankedReport report;
    report.band = result.band;
    report.invalid_trials = result.invalid_trials;
    report.combinations = result.summaries;
    std::stable_sort(report.combinations.begin(), report.combinations.end(),
                     [](const CombinationSummary& a, const CombinationSummary& b) {
                         if (!same(a.mean_acc, b.mean_acc)) return better(a.mean_acc, b.mean_acc);
                         return sorted(a.combination) < sorted(b.combination);
                     });
    for (const auto& t : result.trials)
        if (t.outcome.valid) report.best_permutations.push_back(t);
    std::stable_sort(report.best_permutations.begin(), report.best_permutations.end(),
                     [](const TrialResult& a, const TrialResult& b) {
                         if (!same(a.outcome.metrics.acc, b.outcome.metrics.acc))
                             return better(a.outcome.metrics.acc, b.outcome.metrics.acc);
                         return a.trial_index < b.trial_index;
                     });
    if (report.best_permutations.size() > top) report.best_permutations.resize(top);
    return report;
}

void write_results_csv(const SearchResult& result, std::ostream& out) {
    out << "trial_index,ch1,ch2,ch3,ch4,band,p_used,acc,sen,spe,valid\n";
    for (const auto& t : result.trials) {
        std::string line = std::to_string(t.trial_index);
        for (const auto& c : t.channels) line += "," + c;
        line += ",";
        line += to_string(t.band);
        line += "," + std::to_string(t.outcome.p_used);
        line += "," + format_optional(t.outcome.metrics.acc);
        line += "," + format_optional(t.outcome.metrics.sen);
        line += "," + format_optional(t.outcome.metrics.spe);
        line += t.outcome.valid ? ",1\n" : ",0\n";
        out << line;
    }
}

void write_summary_csv(const SearchResult& result, std::ostream& out) {
    out << "ch1,ch2,ch3,ch4,band,trials,valid_trials,mean_acc,mean_sen,mean_spe,best_acc,best1,best2,best3,best4\n";
    for (const auto& s : result.summaries) {
        std::string line;
        for (const auto& c : s.combination) line += c + ",";
        line += to_string(s.band);
        line += "," + std::to_string(s.trials) + "," + std::to_string(s.valid_trials);
        line += "," + format_optional(s.mean_acc) + "," + format_optional(s.mean_sen) + "," +
                format_optional(s.mean_spe) + "," + format_optional(s.best_acc);
        for (const auto& c : s.best_permutation) line += "," + c;
        out << line << '\n';
    }
}

std::string ranked_report_json(const RankedReport& report) {
    json j;
    j["band"] = to_string(report.band);
    j["invalid_trials"] = report.invalid_trials;
    json combos = json::array();
    for (const auto& s : report.combinations) {
        combos.push_back({{"channels", s.combination},
                          {"lobes", lobes_json(s.combination)},
                          {"trials", s.trials},
                          {"valid_trials", s.valid_trials},
                          {"mean_acc", optional_to_json(s.mean_acc)},
                          {"mean_sen", optional_to_json(s.mean_sen)},
                          {"mean_spe", optional_to_json(s.mean_spe)},
                          {"best_permutation", s.best_permutation},
                          {"best_acc", optional_to_json(s.best_acc)}});
    }
    j["combinations"] = std::move(combos);
    json perms = json::array();
    for (const auto& t : report.best_permutations) {
        perms.push_back({{"trial_index", t.trial_index},
                         {"channels", t.channels},
                         {"lobes", lobes_json(t.channels)},
                         {"p_used", t.outcome.p_used},
                         {"acc", optional_to_json(t.outcome.metrics.acc)},
                         {"sen", optional_to_json(t.outcome.metrics.sen)},
                         {"spe", optional_to_json(t.outcome.metrics.spe)}});
    }
    j["best_permutations"] = std::move(perms);
    return j.dump(2);
}

}  // namespace qeeg
