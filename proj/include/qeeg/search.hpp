#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qeeg/feature_table.hpp"
#include "qeeg/pipeline.hpp"

namespace qeeg {

/// Lazy lexicographic enumeration of k-channel tuples over a montage of n
/// channels (indices into the montage order). Unordered mode yields each
/// combination once, ascending; ordered mode yields all k! orderings of each
/// combination before moving to the next one.
class TupleEnumerator {
public:
    /// Throws ParameterError when k is 0 or exceeds n.
    TupleEnumerator(std::size_t n, std::size_t k, bool ordered);

    /// Next tuple, or std::nullopt when exhausted.
    std::optional<std::vector<std::size_t>> next();

    std::size_t size() const noexcept { return size_; }

private:
    bool advance_combination();

    std::size_t n_;
    std::size_t k_;
    bool ordered_;
    std::size_t size_;
    std::vector<std::size_t> combination_;
    std::vector<std::size_t> current_;
    bool started_ = false;
    bool done_ = false;
};

/// C(n, k), or n!/(n-k)! in ordered mode. Throws ParameterError when k > n.
std::uint64_t count_tuples(std::size_t n, std::size_t k, bool ordered);

/// All tuples, materialized.
std::vector<std::vector<std::size_t>> enumerate_tuples(std::size_t n, std::size_t k, bool ordered);

struct TrialResult {
    std::size_t trial_index = 0;
    std::array<std::string, 4> channels;
    Band band = Band::Alpha;
    TrialOutcome outcome;
};

struct CombinationSummary {
    std::array<std::string, 4> combination;  ///< montage order
    Band band = Band::Alpha;
    std::size_t trials = 0;
    std::size_t valid_trials = 0;
    std::optional<double> mean_acc;
    std::optional<double> mean_sen;
    std::optional<double> mean_spe;
    std::array<std::string, 4> best_permutation;
    std::optional<double> best_acc;
};

struct SearchResult {
    Band band = Band::Alpha;
    std::vector<TrialResult> trials;            ///< by trial_index
    std::vector<CombinationSummary> summaries;  ///< enumeration order
    std::size_t invalid_trials = 0;
};

/// Every ordered 4-channel tuple of the table's montage, one classification
/// trial each. Output does not depend on `parallelism`.
SearchResult run_search(const FeatureTable& table, const DatasetSplit& split, Band band, const PipelineParams& params,
                        std::size_t parallelism = 1);

/// Mean over trials of a combination, invalid trials and undefined metrics
/// excluded.
std::vector<CombinationSummary> summarize(std::span<const TrialResult> trials);

enum class Lobe { Frontal, Temporal, Parietal, Occipital, Other };

std::string_view to_string(Lobe lobe) noexcept;
Lobe lobe_of(std::string_view channel) noexcept;

struct RankedReport {
    Band band = Band::Alpha;
    std::vector<CombinationSummary> combinations;  ///< best first
    std::vector<TrialResult> best_permutations;    ///< valid trials, best first
    std::size_t invalid_trials = 0;
};

/// Descending mean accuracy (undefined last), ties broken by combination
/// names in lexicographic order.
RankedReport rank(const SearchResult& result, std::size_t top = 20);

void write_results_csv(const SearchResult& result, std::ostream& out);
void write_summary_csv(const SearchResult& result, std::ostream& out);
std::string ranked_report_json(const RankedReport& report);

}  // namespace qeeg
