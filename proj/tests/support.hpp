#pragma once

// Independent reference implementations used by the unit and acceptance
// tests. Nothing here calls into the library's numerical code.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qeeg/quaternion_matrix.hpp"

namespace qeeg::test {

inline Quaternion random_quaternion(std::mt19937_64& gen, double scale = 1.0) {
    std::normal_distribution<double> n(0.0, scale);
    return {n(gen), n(gen), n(gen), n(gen)};
}

inline QuaternionMatrix random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& gen) {
    std::vector<Quaternion> e(rows * cols);
    for (auto& q : e) q = random_quaternion(gen);
    return QuaternionMatrix(rows, cols, std::move(e));
}

/// Left-multiplication matrix: L(a) * [b] = [a b] in (w, x, y, z) coordinates.
inline Eigen::Matrix4d left_matrix(const Quaternion& a) {
    Eigen::Matrix4d m;
    m << a.w(), -a.x(), -a.y(), -a.z(),  //
        a.x(), a.w(), -a.z(), a.y(),     //
        a.y(), a.z(), a.w(), -a.x(),     //
        a.z(), -a.y(), a.x(), a.w();
    return m;
}

inline Quaternion product_oracle(const Quaternion& a, const Quaternion& b) {
    const Eigen::Vector4d v = left_matrix(a) * Eigen::Vector4d(b.w(), b.x(), b.y(), b.z());
    return {v(0), v(1), v(2), v(3)};
}

/// 4m x 4n real matrix with blocks L(q_ij); multiplicative and
/// conjugate-transpose preserving.
inline Eigen::MatrixXd real_embedding(const QuaternionMatrix& q) {
    Eigen::MatrixXd out(4 * q.rows(), 4 * q.cols());
    for (std::size_t r = 0; r < q.rows(); ++r)
        for (std::size_t c = 0; c < q.cols(); ++c) out.block<4, 4>(4 * r, 4 * c) = left_matrix(q(r, c));
    return out;
}

/// [[A1, A2], [-conj(A2), conj(A1)]] for Q = A1 + A2 j.
inline Eigen::MatrixXcd complex_adjoint(const QuaternionMatrix& q) {
    const auto m = static_cast<Eigen::Index>(q.rows());
    const auto n = static_cast<Eigen::Index>(q.cols());
    Eigen::MatrixXcd chi(2 * m, 2 * n);
    for (Eigen::Index r = 0; r < m; ++r)
        for (Eigen::Index c = 0; c < n; ++c) {
            const Quaternion& e = q(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
            const std::complex<double> a1(e.w(), e.x());
            const std::complex<double> a2(e.y(), e.z());
            chi(r, c) = a1;
            chi(r, n + c) = a2;
            chi(m + r, c) = -std::conj(a2);
            chi(m + r, n + c) = std::conj(a1);
        }
    return chi;
}

/// Singular values from the adjoint (Jacobi SVD), keeping one of each equal pair.
inline std::vector<double> adjoint_singular_values(const QuaternionMatrix& q) {
    const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(complex_adjoint(q));
    const auto& s = svd.singularValues();
    std::vector<double> out;
    for (Eigen::Index i = 0; i < s.size(); i += 2) out.push_back(s(i));
    return out;
}

/// || U^H U - I ||_F through the real embedding.
inline double unitarity_residual(const QuaternionMatrix& u) {
    const Eigen::MatrixXd e = real_embedding(u);
    return (e.transpose() * e - Eigen::MatrixXd::Identity(e.cols(), e.cols())).norm() / 2.0;
}

inline double relative_difference(const QuaternionMatrix& a, const QuaternionMatrix& b) {
    const double scale = std::max(1.0, a.frobenius_norm());
    return (a - b).frobenius_norm() / scale;
}

/// Naive DFT periodogram with a symmetric Hann window; relative power of
/// bins f in [lo, hi) among bins in [1, 30) Hz.
inline double dft_relative_power(const std::vector<double>& x, double fs, double lo, double hi) {
    const std::size_t n = x.size();
    double in_band = 0.0;
    double total = 0.0;
    for (std::size_t k = 1; k <= n / 2; ++k) {
        const double f = static_cast<double>(k) * fs / static_cast<double>(n);
        if (f < 1.0 || f >= 30.0) continue;
        std::complex<double> acc = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            const double w = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(t) /
                                                  static_cast<double>(n - 1));
            const double angle = -2.0 * std::numbers::pi * static_cast<double>(k * t % n) / static_cast<double>(n);
            acc += x[t] * w * std::polar(1.0, angle);
        }
        const double p = std::norm(acc);
        total += p;
        if (f >= lo && f < hi) in_band += p;
    }
    return in_band / total;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("qeeg_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace qeeg::test
