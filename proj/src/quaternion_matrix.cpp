#include "qeeg/quaternion_matrix.hpp"

#include <algorithm>
#include <complex>
#include <limits>
#include <sstream>

#include <Eigen/Dense>

#include "qeeg/error.hpp"

namespace qeeg {

namespace {

std::string shape_string(const QuaternionMatrix& m) {
    std::ostringstream os;
    os << m.rows() << 'x' << m.cols();
    return os.str();
}

using QVector = std::vector<Quaternion>;

/// sum_i conj(a_i) b_i
Quaternion inner(const QVector& a, const QVector& b) {
    Quaternion acc;
    for (std::size_t i = 0; i < a.size(); ++i) acc = acc + a[i].conjugate() * b[i];
    return acc;
}

double vector_norm(const QVector& a) {
    double s = 0.0;
    for (const auto& q : a) s += q.squared_norm();
    return std::sqrt(s);
}

/// Complex adjoint chi(Q) = [[C1, C2], [-conj(C2), conj(C1)]] for Q = C1 + C2 j.
Eigen::MatrixXcd complex_adjoint(const QuaternionMatrix& a) {
    const auto m = static_cast<Eigen::Index>(a.rows());
    const auto n = static_cast<Eigen::Index>(a.cols());
    Eigen::MatrixXcd chi(2 * m, 2 * n);
    for (Eigen::Index r = 0; r < m; ++r) {
        for (Eigen::Index c = 0; c < n; ++c) {
            const auto& q = a(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
            const std::complex<double> c1(q.w(), q.x());
            const std::complex<double> c2(q.y(), q.z());
            chi(r, c) = c1;
            chi(r, c + n) = c2;
            chi(r + m, c) = -std::conj(c2);
            chi(r + m, c + n) = std::conj(c1);
        }
    }
    return chi;
}

/// The quaternion vector u whose adjoint chi(u) has `column` as its first column.
QVector fold_column(const Eigen::MatrixXcd& basis, Eigen::Index column, std::size_t length) {
    QVector out(length);
    const auto half = static_cast<Eigen::Index>(length);
    for (Eigen::Index i = 0; i < half; ++i) {
        const std::complex<double> top = basis(i, column);
        const std::complex<double> bottom = basis(i + half, column);
        // u1 = top, u2 = -conj(bottom)
        out[static_cast<std::size_t>(i)] = Quaternion(top.real(), top.imag(), -bottom.real(), bottom.imag());
    }
    return out;
}

/// Removes components along `basis` from `target` using right coefficients
/// taken from `target` itself; the same coefficients are applied to `partner`
/// (if any) against `partner_basis`. Two passes for numerical stability.
void orthogonalize(QVector& target, const std::vector<QVector>& basis, QVector* partner,
                   const std::vector<QVector>* partner_basis) {
    for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t t = 0; t < basis.size(); ++t) {
            const Quaternion coef = inner(basis[t], target);
            for (std::size_t i = 0; i < target.size(); ++i) target[i] = target[i] - basis[t][i] * coef;
            if (partner != nullptr) {
                const auto& pb = (*partner_basis)[t];
                for (std::size_t i = 0; i < partner->size(); ++i) (*partner)[i] = (*partner)[i] - pb[i] * coef;
            }
        }
    }
}

void scale(QVector& v, double s) {
    for (auto& q : v) q = q * s;
}

void right_multiply(QVector& v, const Quaternion& q) {
    for (auto& e : v) e = e * q;
}

/// Unit quaternion that rotates the first largest-norm entry of v to a positive real.
Quaternion phase_factor(const QVector& v) {
    std::size_t best = 0;
    double best_norm = -1.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double n = v[i].squared_norm();
        if (n > best_norm) {
            best_norm = n;
            best = i;
        }
    }
    const double n = std::sqrt(best_norm);
    if (n == 0.0) return Quaternion::one();
    return v[best].conjugate() / n;
}

/// Extends `accepted` to `target_count` orthonormal vectors. Each step takes
/// the column of `pool` with the largest component outside the current span.
void complete_basis(std::vector<QVector>& accepted, const Eigen::MatrixXcd& pool, std::size_t length,
                    std::size_t target_count) {
    std::vector<QVector> candidates;
    for (Eigen::Index c = 0; c < pool.cols(); ++c) {
        candidates.push_back(fold_column(pool, c, length));
        orthogonalize(candidates.back(), accepted, nullptr, nullptr);
    }
    while (accepted.size() < target_count) {
        std::size_t best = candidates.size();
        double best_norm = 1e-8;
        for (std::size_t c = 0; c < candidates.size(); ++c) {
            const double n = vector_norm(candidates[c]);
            if (n > best_norm) {
                best_norm = n;
                best = c;
            }
        }
        if (best == candidates.size()) throw Error("qsvd: failed to complete a unitary basis");
        QVector cand = candidates[best];
        orthogonalize(cand, accepted, nullptr, nullptr);
        scale(cand, 1.0 / vector_norm(cand));
        right_multiply(cand, phase_factor(cand));
        const std::vector<QVector> latest{cand};
        for (auto& c : candidates) orthogonalize(c, latest, nullptr, nullptr);
        accepted.push_back(std::move(cand));
    }
}

QuaternionMatrix from_columns(const std::vector<QVector>& cols, std::size_t rows) {
    QuaternionMatrix m(rows, cols.size());
    for (std::size_t c = 0; c < cols.size(); ++c)
        for (std::size_t r = 0; r < rows; ++r) m(r, c) = cols[c][r];
    return m;
}

}  // namespace

QuaternionMatrix::QuaternionMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), entries_(rows * cols) {}

QuaternionMatrix::QuaternionMatrix(std::size_t rows, std::size_t cols, std::vector<Quaternion> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
    if (entries_.size() != rows_ * cols_) {
        std::ostringstream os;
        os << "matrix " << rows_ << 'x' << cols_ << " needs " << rows_ * cols_ << " entries, got "
           << entries_.size();
        throw ShapeError(os.str());
    }
    for (const auto& q : entries_)
        if (!q.is_finite()) throw ValidationError("matrix entry is not finite");
}

QuaternionMatrix QuaternionMatrix::identity(std::size_t n) {
    QuaternionMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = Quaternion::one();
    return m;
}

QuaternionMatrix QuaternionMatrix::row_vector(std::span<const Quaternion> values) {
    return QuaternionMatrix(1, values.size(), std::vector<Quaternion>(values.begin(), values.end()));
}

std::vector<Quaternion> QuaternionMatrix::column(std::size_t c) const {
    std::vector<Quaternion> out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
    return out;
}

QuaternionMatrix QuaternionMatrix::left_columns(std::size_t count) const {
    if (count > cols_) throw ShapeError("left_columns: requested more columns than available");
    QuaternionMatrix out(rows_, count);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < count; ++c) out(r, c) = (*this)(r, c);
    return out;
}

double QuaternionMatrix::frobenius_norm() const noexcept {
    double s = 0.0;
    for (const auto& q : entries_) s += q.squared_norm();
    return std::sqrt(s);
}

QuaternionMatrix matmul(const QuaternionMatrix& a, const QuaternionMatrix& b) {
    if (a.cols() != b.rows())
        throw ShapeError("matmul: cannot multiply " + shape_string(a) + " by " + shape_string(b));
    QuaternionMatrix out(a.rows(), b.cols());
    for (std::size_t r = 0; r < a.rows(); ++r) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const Quaternion lhs = a(r, k);
            for (std::size_t c = 0; c < b.cols(); ++c) out(r, c) = out(r, c) + lhs * b(k, c);
        }
    }
    return out;
}

QuaternionMatrix hermitian_transpose(const QuaternionMatrix& a) {
    QuaternionMatrix out(a.cols(), a.rows());
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t c = 0; c < a.cols(); ++c) out(c, r) = a(r, c).conjugate();
    return out;
}

QuaternionMatrix operator-(const QuaternionMatrix& a, const QuaternionMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw ShapeError("subtract: shapes " + shape_string(a) + " and " + shape_string(b) + " differ");
    QuaternionMatrix out(a.rows(), a.cols());
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t c = 0; c < a.cols(); ++c) out(r, c) = a(r, c) - b(r, c);
    return out;
}

QuaternionMatrix operator*(double s, const QuaternionMatrix& a) {
    QuaternionMatrix out(a.rows(), a.cols());
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t c = 0; c < a.cols(); ++c) out(r, c) = s * a(r, c);
    return out;
}

QSvdResult qsvd(const QuaternionMatrix& a) {
    if (a.rows() == 0 || a.cols() == 0) throw ShapeError("qsvd: empty matrix");
    for (const auto& q : a.entries())
        if (!q.is_finite()) throw ValidationError("qsvd: matrix has non-finite entries");

    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    const std::size_t k = std::min(m, n);

    const Eigen::MatrixXcd chi = complex_adjoint(a);
    const Eigen::BDCSVD<Eigen::MatrixXcd> svd(chi, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Eigen::MatrixXcd& cu = svd.matrixU();
    const Eigen::MatrixXcd& cv = svd.matrixV();
    const Eigen::VectorXd& sv = svd.singularValues();

    QSvdResult result;
    result.singular_values.resize(k);
    for (std::size_t i = 0; i < k; ++i) {
        const auto e = static_cast<Eigen::Index>(2 * i);
        result.singular_values[i] = 0.5 * (sv(e) + sv(e + 1));
    }

    // Singular values at or below this are treated as zero: their vectors only
    // need to complete the unitary bases.
    const double tol =
        sv(0) * static_cast<double>(2 * std::max(m, n)) * std::numeric_limits<double>::epsilon() * 8.0;

    // Each complex column maps to an exact quaternion pair with Q v = sigma u.
    // The second column of every adjoint pair lies in the quaternion span of
    // the first and is rejected by the orthogonalization.
    std::vector<QVector> left;
    std::vector<QVector> right;
    for (Eigen::Index c = 0; c < static_cast<Eigen::Index>(2 * k) && left.size() < k; ++c) {
        if (!(sv(c) > tol)) break;
        QVector u = fold_column(cu, c, m);
        QVector v = fold_column(cv, c, n);
        orthogonalize(u, left, &v, &right);
        const double nu = vector_norm(u);
        if (nu < 0.5) continue;
        scale(u, 1.0 / nu);
        scale(v, 1.0 / vector_norm(v));
        const Quaternion phase = phase_factor(u);
        right_multiply(u, phase);
        right_multiply(v, phase);
        left.push_back(std::move(u));
        right.push_back(std::move(v));
    }

    complete_basis(left, cu, m, m);
    complete_basis(right, cv, n, n);

    result.u = from_columns(left, m);
    result.v = from_columns(right, n);
    return result;
}

QuaternionMatrix truncate(const QSvdResult& svd, std::size_t p) {
    if (p < 1 || p > svd.singular_values.size()) {
        std::ostringstream os;
        os << "truncate: p = " << p << " outside [1, " << svd.singular_values.size() << ']';
        throw ParameterError(os.str());
    }
    return svd.u.left_columns(p);
}

QuaternionMatrix reconstruct(const QSvdResult& svd) {
    const std::size_t m = svd.u.rows();
    const std::size_t n = svd.v.rows();
    QuaternionMatrix out(m, n);
    for (std::size_t s = 0; s < svd.singular_values.size(); ++s) {
        const double sigma = svd.singular_values[s];
        for (std::size_t r = 0; r < m; ++r) {
            const Quaternion lhs = sigma * svd.u(r, s);
            for (std::size_t c = 0; c < n; ++c) out(r, c) = out(r, c) + lhs * svd.v(c, s).conjugate();
        }
    }
    return out;
}

}  // namespace qeeg
