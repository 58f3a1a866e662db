#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "qeeg/quaternion.hpp"

namespace qeeg {

/// Dense row-major quaternion matrix.
class QuaternionMatrix {
public:
    QuaternionMatrix() = default;
    /// Zero matrix of the given shape.
    QuaternionMatrix(std::size_t rows, std::size_t cols);
    /// Takes ownership of row-major entries; throws ShapeError on a size
    /// mismatch and ValidationError on non-finite entries.
    QuaternionMatrix(std::size_t rows, std::size_t cols, std::vector<Quaternion> entries);

    static QuaternionMatrix identity(std::size_t n);
    /// Single row built from a vector.
    static QuaternionMatrix row_vector(std::span<const Quaternion> values);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::span<const Quaternion> entries() const noexcept { return entries_; }

    const Quaternion& operator()(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }
    Quaternion& operator()(std::size_t r, std::size_t c) { return entries_[r * cols_ + c]; }

    std::span<const Quaternion> row(std::size_t r) const { return {entries_.data() + r * cols_, cols_}; }
    std::vector<Quaternion> column(std::size_t c) const;

    /// Leading `count` columns.
    QuaternionMatrix left_columns(std::size_t count) const;

    double frobenius_norm() const noexcept;

    friend bool operator==(const QuaternionMatrix&, const QuaternionMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Quaternion> entries_;
};

/// Matrix product with factor order preserved (entries do not commute).
QuaternionMatrix matmul(const QuaternionMatrix& a, const QuaternionMatrix& b);
/// Conjugate transpose A^H.
QuaternionMatrix hermitian_transpose(const QuaternionMatrix& a);
QuaternionMatrix operator-(const QuaternionMatrix& a, const QuaternionMatrix& b);
QuaternionMatrix operator*(double s, const QuaternionMatrix& a);

/// Result of Q = U diag(singular_values) V^H with U (rows x rows) and
/// V (cols x cols) quaternion-unitary.
struct QSvdResult {
    QuaternionMatrix u;
    std::vector<double> singular_values;  ///< min(rows, cols) values, descending
    QuaternionMatrix v;
};

/// Quaternion SVD through the complex adjoint representation.
///
/// Each column of U has its largest-norm entry rotated to a positive real;
/// the paired column of V is rotated by the same unit quaternion so the
/// factorization is unchanged. Throws ValidationError on non-finite input
/// and ShapeError on an empty matrix.
QSvdResult qsvd(const QuaternionMatrix& a);

/// Leading p left singular vectors (rows x p). Throws ParameterError unless
/// 1 <= p <= singular_values.size().
QuaternionMatrix truncate(const QSvdResult& svd, std::size_t p);

/// U diag(s) V^H rebuilt from a decomposition.
QuaternionMatrix reconstruct(const QSvdResult& svd);

}  // namespace qeeg
