#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "qeeg/error.hpp"

namespace qeeg {

/// Row-major real matrix: one sample per row, one feature per column.
class RealFeatureMatrix {
public:
    RealFeatureMatrix() = default;
    RealFeatureMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
    RealFeatureMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
        : rows_(rows), cols_(cols), data_(std::move(data)) {
        if (data_.size() != rows_ * cols_) throw ShapeError("feature matrix data does not match its shape");
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> data() const noexcept { return data_; }

    /// Leading `count` columns.
    RealFeatureMatrix left_columns(std::size_t count) const {
        if (count > cols_) throw ShapeError("left_columns: requested more columns than available");
        RealFeatureMatrix out(rows_, count);
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t c = 0; c < count; ++c) out(r, c) = (*this)(r, c);
        return out;
    }

    /// Rows selected by index, in the given order.
    RealFeatureMatrix select_rows(std::span<const std::size_t> rows) const {
        RealFeatureMatrix out(rows.size(), cols_);
        for (std::size_t i = 0; i < rows.size(); ++i)
            for (std::size_t c = 0; c < cols_; ++c) out(i, c) = (*this)(rows[i], c);
        return out;
    }

    friend bool operator==(const RealFeatureMatrix&, const RealFeatureMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

}  // namespace qeeg
