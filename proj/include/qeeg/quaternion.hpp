#pragma once

#include <cmath>
#include <ostream>

namespace qeeg {

/// Real quaternion w + x i + y j + z k.
///
/// Immutable value type: every operation returns a new value. Finiteness is
/// checked where data enters the library (ingestion, matrix construction from
/// external input), not inside arithmetic.
class Quaternion {
public:
    constexpr Quaternion() noexcept = default;
    constexpr Quaternion(double w, double x, double y, double z) noexcept : w_(w), x_(x), y_(y), z_(z) {}
    constexpr explicit Quaternion(double real) noexcept : w_(real) {}

    static constexpr Quaternion i() noexcept { return {0, 1, 0, 0}; }
    static constexpr Quaternion j() noexcept { return {0, 0, 1, 0}; }
    static constexpr Quaternion k() noexcept { return {0, 0, 0, 1}; }
    static constexpr Quaternion one() noexcept { return {1, 0, 0, 0}; }

    constexpr double w() const noexcept { return w_; }
    constexpr double x() const noexcept { return x_; }
    constexpr double y() const noexcept { return y_; }
    constexpr double z() const noexcept { return z_; }

    constexpr bool is_pure() const noexcept { return w_ == 0.0; }
    bool is_finite() const noexcept {
        return std::isfinite(w_) && std::isfinite(x_) && std::isfinite(y_) && std::isfinite(z_);
    }

    constexpr Quaternion conjugate() const noexcept { return {w_, -x_, -y_, -z_}; }
    constexpr double squared_norm() const noexcept { return w_ * w_ + x_ * x_ + y_ * y_ + z_ * z_; }
    double norm() const noexcept { return std::sqrt(squared_norm()); }
    /// Norm of the imaginary part.
    double vector_norm() const noexcept { return std::sqrt(x_ * x_ + y_ * y_ + z_ * z_); }

    constexpr friend bool operator==(const Quaternion&, const Quaternion&) noexcept = default;

    constexpr friend Quaternion operator+(const Quaternion& a, const Quaternion& b) noexcept {
        return {a.w_ + b.w_, a.x_ + b.x_, a.y_ + b.y_, a.z_ + b.z_};
    }
    constexpr friend Quaternion operator-(const Quaternion& a, const Quaternion& b) noexcept {
        return {a.w_ - b.w_, a.x_ - b.x_, a.y_ - b.y_, a.z_ - b.z_};
    }
    constexpr friend Quaternion operator-(const Quaternion& a) noexcept { return {-a.w_, -a.x_, -a.y_, -a.z_}; }
    constexpr friend Quaternion operator*(double s, const Quaternion& a) noexcept {
        return {s * a.w_, s * a.x_, s * a.y_, s * a.z_};
    }
    constexpr friend Quaternion operator*(const Quaternion& a, double s) noexcept { return s * a; }
    constexpr friend Quaternion operator/(const Quaternion& a, double s) noexcept {
        return {a.w_ / s, a.x_ / s, a.y_ / s, a.z_ / s};
    }

    /// Hamilton product. Not commutative: i*j = k but j*i = -k.
    constexpr friend Quaternion operator*(const Quaternion& a, const Quaternion& b) noexcept {
        return {a.w_ * b.w_ - a.x_ * b.x_ - a.y_ * b.y_ - a.z_ * b.z_,
                a.w_ * b.x_ + a.x_ * b.w_ + a.y_ * b.z_ - a.z_ * b.y_,
                a.w_ * b.y_ - a.x_ * b.z_ + a.y_ * b.w_ + a.z_ * b.x_,
                a.w_ * b.z_ + a.x_ * b.y_ - a.y_ * b.x_ + a.z_ * b.w_};
    }

    friend std::ostream& operator<<(std::ostream& os, const Quaternion& q) {
        return os << '(' << q.w_ << ", " << q.x_ << ", " << q.y_ << ", " << q.z_ << ')';
    }

private:
    double w_ = 0.0;
    double x_ = 0.0;
    double y_ = 0.0;
    double z_ = 0.0;
};

constexpr Quaternion multiply(const Quaternion& a, const Quaternion& b) noexcept { return a * b; }
constexpr Quaternion conjugate(const Quaternion& q) noexcept { return q.conjugate(); }
inline double norm(const Quaternion& q) noexcept { return q.norm(); }

}  // namespace qeeg
