#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qeeg/quaternion_matrix.hpp"
#include "qeeg/real_matrix.hpp"
#include "qeeg/spectral.hpp"

namespace qeeg {

using QuaternionVector = std::vector<Quaternion>;

/// Four distinct montage channels. Order matters: the first feeds the scalar
/// part, then i, j, k.
class ChannelQuadruple {
public:
    /// Throws ValidationError if the names are not pairwise distinct.
    explicit ChannelQuadruple(std::array<std::string, 4> channels);
    /// Parses "A,B,C,D".
    static ChannelQuadruple parse(std::string_view text);

    const std::array<std::string, 4>& channels() const noexcept { return channels_; }
    const std::string& operator[](std::size_t i) const { return channels_[i]; }
    std::string to_string() const;

    friend bool operator==(const ChannelQuadruple&, const ChannelQuadruple&) = default;

private:
    std::array<std::string, 4> channels_;
};

/// Full quaternion series q(n) = c0(n) + c1(n) i + c2(n) j + c3(n) k.
/// Throws ValidationError unless all four series have the same length.
QuaternionVector embed(std::span<const double> ch1, std::span<const double> ch2, std::span<const double> ch3,
                       std::span<const double> ch4);
/// Same from band feature vectors; also requires a common band.
QuaternionVector embed(std::span<const BandFeatureVector> four_channels);
/// Pure quaternion series 0 + c0 i + c1 j + c2 k (three-channel embedding).
QuaternionVector embed_pure(std::span<const double> ch1, std::span<const double> ch2, std::span<const double> ch3);

enum class Projection { Mean, Absolute, Norm, Phase };

inline constexpr std::array<Projection, 4> kAllProjections{Projection::Mean, Projection::Absolute, Projection::Norm,
                                                           Projection::Phase};

std::string_view to_string(Projection projection) noexcept;
Projection parse_projection(std::string_view text);

/// How many principal components to keep: a fixed count, or the smallest
/// count whose eigenvalues reach `threshold` of the total.
struct PcSelection {
    std::optional<std::size_t> fixed;
    double threshold = 0.90;
};

/// Fitted quaternion PCA. The numerical part (mean, basis, eigenvalues, p)
/// comes from `fit`; the descriptive fields are filled in by callers that
/// persist the model.
struct QpcaModel {
    Band band = Band::Alpha;
    std::vector<std::string> channels;
    double segment_seconds = 0.0;
    Projection projection = Projection::Mean;

    QuaternionVector mean_vector;      ///< training mean, length N_s
    QuaternionMatrix basis;            ///< N_s x p leading eigenvectors
    std::vector<double> eigenvalues;   ///< all N_s covariance eigenvalues, descending
    std::size_t p = 0;
    bool spectrum_tie = false;         ///< eigenvalues p and p+1 coincide; subspace not unique
};

/// Training vectors stacked as rows after mean removal.
struct CenteredData {
    QuaternionVector mean;
    QuaternionMatrix centered;  ///< m x N_s
};

/// Throws ValidationError on ragged or empty input.
CenteredData center(std::span<const QuaternionVector> training);

/// (1/m) X^H X for the m x N_s centered matrix X: an N_s x N_s
/// quaternion-Hermitian matrix.
QuaternionMatrix covariance(const QuaternionMatrix& centered);

/// Eigenvalue count reaching `threshold` of the total (at least 1).
std::size_t components_for_threshold(std::span<const double> eigenvalues, double threshold);

/// Quaternion PCA of m training vectors.
///
/// Errors: m < 2 -> ValidationError (insufficient data); all vectors equal ->
/// DegenerateError; fixed p outside [1, min(m, N_s)] -> ParameterError.
QpcaModel fit(std::span<const QuaternionVector> training, const PcSelection& selection);

/// (vector - mean) * basis, centered data on the left. Length p.
QuaternionVector transform(const QpcaModel& model, std::span<const Quaternion> vector);
/// Row-wise transform of many vectors (rows x p).
QuaternionMatrix transform(const QpcaModel& model, std::span<const QuaternionVector> vectors);

/// Same model restricted to its first `p` components (p <= model.p).
QpcaModel truncated(const QpcaModel& model, std::size_t p);

double project(const Quaternion& q, Projection method);
/// Entrywise quaternion -> real collapse.
RealFeatureMatrix project(const QuaternionMatrix& features, Projection method);

/// JSON model file: {band, quadruple, segment_seconds, p, projection,
/// mean_vector: [[w,x,y,z]...], basis: {rows, cols, entries}, eigenvalues}.
std::string to_json(const QpcaModel& model);
QpcaModel qpca_model_from_json(std::string_view text);

}  // namespace qeeg
