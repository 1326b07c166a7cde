#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ncdrank/error.hpp"

namespace ncdrank {

/// Row-major dense matrix. Used for debugging dumps and test oracles only;
/// the ranking path never materializes an n x n operator.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static DenseMatrix identity(std::size_t n) {
        DenseMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
    std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }

    bool square() const noexcept { return rows_ == cols_; }

    friend DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
        if (a.cols_ != b.rows_) throw DimensionError("dense product: inner dimensions differ");
        DenseMatrix c(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i) {
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const double aik = a(i, k);
                if (aik == 0.0) continue;
                for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
            }
        }
        return c;
    }

    friend DenseMatrix operator+(const DenseMatrix& a, const DenseMatrix& b) {
        if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw DimensionError("dense sum: shapes differ");
        DenseMatrix c = a;
        for (std::size_t i = 0; i < c.data_.size(); ++i) c.data_[i] += b.data_[i];
        return c;
    }

    friend DenseMatrix operator*(double s, const DenseMatrix& a) {
        DenseMatrix c = a;
        for (double& x : c.data_) x *= s;
        return c;
    }

    /// y^T = x^T * this
    std::vector<double> left_multiply(std::span<const double> x) const {
        if (x.size() != rows_) throw DimensionError("dense left multiply: length mismatch");
        std::vector<double> y(cols_, 0.0);
        for (std::size_t i = 0; i < rows_; ++i) {
            const double xi = x[i];
            if (xi == 0.0) continue;
            for (std::size_t j = 0; j < cols_; ++j) y[j] += xi * (*this)(i, j);
        }
        return y;
    }

    double max_abs_diff(const DenseMatrix& other) const {
        if (rows_ != other.rows_ || cols_ != other.cols_) throw DimensionError("max_abs_diff: shapes differ");
        double m = 0.0;
        for (std::size_t i = 0; i < data_.size(); ++i) m = std::max(m, std::abs(data_[i] - other.data_[i]));
        return m;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Compressed sparse row matrix with double values. Column indices are
/// sorted within each row and stored entries are never structurally
/// duplicated.
class CsrMatrix {
public:
    CsrMatrix() : row_ptr_(1, 0) {}

    CsrMatrix(std::size_t rows, std::size_t cols, std::vector<std::size_t> row_ptr,
              std::vector<std::uint32_t> col_idx, std::vector<double> values)
        : rows_(rows), cols_(cols), row_ptr_(std::move(row_ptr)), col_idx_(std::move(col_idx)),
          values_(std::move(values)) {
        if (row_ptr_.size() != rows_ + 1 || col_idx_.size() != values_.size() ||
            row_ptr_.back() != col_idx_.size()) {
            throw DimensionError("csr: inconsistent storage arrays");
        }
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t nnz() const noexcept { return col_idx_.size(); }

    std::span<const std::uint32_t> row_indices(std::size_t i) const {
        return {col_idx_.data() + row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]};
    }
    std::span<const double> row_values(std::size_t i) const {
        return {values_.data() + row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]};
    }

    const std::vector<std::size_t>& row_ptr() const noexcept { return row_ptr_; }
    const std::vector<std::uint32_t>& col_idx() const noexcept { return col_idx_; }
    const std::vector<double>& values() const noexcept { return values_; }

    double at(std::size_t i, std::size_t j) const {
        const auto idx = row_indices(i);
        const auto it = std::lower_bound(idx.begin(), idx.end(), static_cast<std::uint32_t>(j));
        if (it == idx.end() || *it != j) return 0.0;
        return row_values(i)[static_cast<std::size_t>(it - idx.begin())];
    }

    /// y += x^T * this, rows visited in index order so the result is
    /// reproducible bit for bit.
    void left_multiply_add(std::span<const double> x, std::span<double> y, double scale = 1.0) const {
        if (x.size() != rows_ || y.size() != cols_) throw DimensionError("csr left multiply: length mismatch");
        for (std::size_t i = 0; i < rows_; ++i) {
            const double xi = scale * x[i];
            if (xi == 0.0) continue;
            for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) y[col_idx_[p]] += xi * values_[p];
        }
    }

    std::vector<double> left_multiply(std::span<const double> x) const {
        std::vector<double> y(cols_, 0.0);
        left_multiply_add(x, y);
        return y;
    }

    std::vector<double> row_sums() const {
        std::vector<double> s(rows_, 0.0);
        for (std::size_t i = 0; i < rows_; ++i)
            for (double v : row_values(i)) s[i] += v;
        return s;
    }

    DenseMatrix to_dense() const {
        DenseMatrix d(rows_, cols_);
        for (std::size_t i = 0; i < rows_; ++i) {
            const auto idx = row_indices(i);
            const auto val = row_values(i);
            for (std::size_t p = 0; p < idx.size(); ++p) d(i, idx[p]) = val[p];
        }
        return d;
    }

    /// Sparse product (Gustavson). Only structurally reachable entries are
    /// stored; with non-negative inputs every stored entry is positive.
    friend CsrMatrix operator*(const CsrMatrix& a, const CsrMatrix& b) {
        if (a.cols_ != b.rows_) throw DimensionError("csr product: inner dimensions differ");
        std::vector<std::size_t> row_ptr(a.rows_ + 1, 0);
        std::vector<std::uint32_t> col_idx;
        std::vector<double> values;
        std::vector<double> acc(b.cols_, 0.0);
        std::vector<char> seen(b.cols_, 0);
        std::vector<std::uint32_t> touched;
        for (std::size_t i = 0; i < a.rows_; ++i) {
            touched.clear();
            const auto ai = a.row_indices(i);
            const auto av = a.row_values(i);
            for (std::size_t p = 0; p < ai.size(); ++p) {
                const auto bi = b.row_indices(ai[p]);
                const auto bv = b.row_values(ai[p]);
                for (std::size_t q = 0; q < bi.size(); ++q) {
                    const auto j = bi[q];
                    if (!seen[j]) {
                        seen[j] = 1;
                        touched.push_back(j);
                    }
                    acc[j] += av[p] * bv[q];
                }
            }
            std::sort(touched.begin(), touched.end());
            for (const auto j : touched) {
                col_idx.push_back(j);
                values.push_back(acc[j]);
                acc[j] = 0.0;
                seen[j] = 0;
            }
            row_ptr[i + 1] = col_idx.size();
        }
        return CsrMatrix(a.rows_, b.cols_, std::move(row_ptr), std::move(col_idx), std::move(values));
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<std::size_t> row_ptr_;
    std::vector<std::uint32_t> col_idx_;
    std::vector<double> values_;
};

/// Incremental row-by-row CSR construction. Each row's column indices must
/// be appended in strictly increasing order.
class CsrBuilder {
public:
    CsrBuilder(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {
        row_ptr_.reserve(rows + 1);
        row_ptr_.push_back(0);
    }

    void push(std::uint32_t col, double value) {
        col_idx_.push_back(col);
        values_.push_back(value);
    }

    void end_row() { row_ptr_.push_back(col_idx_.size()); }

    CsrMatrix finish() && {
        return CsrMatrix(rows_, cols_, std::move(row_ptr_), std::move(col_idx_), std::move(values_));
    }

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<std::size_t> row_ptr_;
    std::vector<std::uint32_t> col_idx_;
    std::vector<double> values_;
};

}  // namespace ncdrank
