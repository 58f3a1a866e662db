#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qeeg/dataset.hpp"
#include "qeeg/feature_table.hpp"
#include "qeeg/qpca.hpp"

namespace qeeg {

/// Triple: pure quaternion from 3 channels. Quadruple: full quaternion.
enum class TupleMode { Triple, Quadruple };

std::string_view to_string(TupleMode mode) noexcept;
TupleMode parse_tuple_mode(std::string_view text);
std::size_t tuple_size(TupleMode mode) noexcept;

/// p = 1 QPCA basis fitted on the pooled samples of both classes.
/// Throws DegenerateError when the pooled data carries no variance.
QpcaModel fit_measure_basis(std::span<const QuaternionVector> pooled);

/// Mean projection of each sample's first principal-component feature.
std::vector<double> measure_values(const QpcaModel& basis, std::span<const QuaternionVector> samples);

/// |mean(ns) - mean(ad)|. Throws ParameterError if either list is empty.
double interclass_distance(std::span<const double> ns_measures, std::span<const double> ad_measures);

/// Per-sample measures of one channel tuple, split by class.
struct TupleMeasures {
    std::vector<std::size_t> channels;  ///< table channel indices
    bool valid = false;
    std::string error;
    std::vector<double> ad;
    std::vector<double> nonad;
    double distance = 0.0;
};

/// Every ordered distinct tuple of the table's channels, in lexicographic
/// order, measured on the given recordings. Failed tuples stay in the list,
/// marked invalid.
std::vector<TupleMeasures> measure_tuples(const FeatureTable& table, std::span<const std::size_t> recordings,
                                          TupleMode mode, Band band, std::size_t parallelism = 1);

/// Sparse map from ordered channel tuples to class-mean measure values.
struct ConnectivityTensor {
    TupleMode mode = TupleMode::Triple;
    Band band = Band::Alpha;
    Label label = Label::AD;
    std::vector<std::string> axis_labels;
    std::map<std::vector<std::size_t>, double> values;
    std::size_t missing = 0;
};

ConnectivityTensor build_tensor(const FeatureTable& table, std::span<const TupleMeasures> measures, TupleMode mode,
                                Band band, Label label);

std::string tensor_json(const ConnectivityTensor& tensor);

/// Interclass distances of one band: mean of the per-tuple distances, plus
/// the raw per-class measures pooled over tuples.
struct BandDistance {
    Band band = Band::Alpha;
    double dist = 0.0;
    std::vector<double> tuple_distances;
    std::vector<double> ad_measures;
    std::vector<double> nonad_measures;
    std::size_t valid_tuples = 0;
    std::size_t missing_tuples = 0;
};

struct DistanceReport {
    TupleMode mode = TupleMode::Triple;
    std::size_t ad_samples = 0;
    std::size_t nonad_samples = 0;
    std::vector<BandDistance> bands;
};

BandDistance band_distance(Band band, std::span<const TupleMeasures> measures);

/// Distances for every band over the given recordings.
DistanceReport distance_report(const FeatureTable& table, std::span<const std::size_t> recordings, TupleMode mode,
                               std::size_t parallelism = 1);

std::string distance_report_json(const DistanceReport& report);

}  // namespace qeeg
