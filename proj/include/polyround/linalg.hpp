#ifndef POLYROUND_LINALG_HPP
#define POLYROUND_LINALG_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "polyround/errors.hpp"

namespace polyround {

/// Dense row-major real matrix. Small and well-scaled throughout this
/// library, so plain double with partial pivoting is enough.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix from_rows(const std::vector<std::vector<double>>& rows) {
        std::size_t r = rows.size();
        std::size_t c = r == 0 ? 0 : rows.front().size();
        Matrix m(r, c);
        for (std::size_t i = 0; i < r; ++i) {
            if (rows[i].size() != c) throw InvalidInputError("ragged rows in matrix literal");
            for (std::size_t j = 0; j < c; ++j) m(i, j) = rows[i][j];
        }
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    double max_abs() const {
        double m = 0.0;
        for (double v : data_) m = std::max(m, std::fabs(v));
        return m;
    }

    /// Induced infinity norm (max absolute row sum).
    double inf_norm() const {
        double m = 0.0;
        for (std::size_t i = 0; i < rows_; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < cols_; ++j) s += std::fabs((*this)(i, j));
            m = std::max(m, s);
        }
        return m;
    }

    bool all_finite() const {
        for (double v : data_)
            if (!std::isfinite(v)) return false;
        return true;
    }

    std::vector<double> multiply(const std::vector<double>& x) const {
        std::vector<double> y(rows_, 0.0);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) y[i] += (*this)(i, j) * x[j];
        return y;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

namespace detail {

/// Reduced row echelon form by Gaussian elimination with partial pivoting.
/// Returns the pivot column of each eliminated row, in order.
inline std::vector<std::size_t> rref_in_place(Matrix& a, double threshold) {
    std::vector<std::size_t> pivot_cols;
    std::size_t row = 0;
    for (std::size_t col = 0; col < a.cols() && row < a.rows(); ++col) {
        std::size_t best = row;
        for (std::size_t i = row + 1; i < a.rows(); ++i)
            if (std::fabs(a(i, col)) > std::fabs(a(best, col))) best = i;
        if (std::fabs(a(best, col)) <= threshold) continue;
        if (best != row)
            for (std::size_t j = 0; j < a.cols(); ++j) std::swap(a(best, j), a(row, j));
        double piv = a(row, col);
        for (std::size_t j = 0; j < a.cols(); ++j) a(row, j) /= piv;
        a(row, col) = 1.0;
        for (std::size_t i = 0; i < a.rows(); ++i) {
            if (i == row) continue;
            double f = a(i, col);
            if (f == 0.0) continue;
            for (std::size_t j = 0; j < a.cols(); ++j) a(i, j) -= f * a(row, j);
            a(i, col) = 0.0;
        }
        pivot_cols.push_back(col);
        ++row;
    }
    return pivot_cols;
}

} // namespace detail

/// Numerical rank at relative tolerance tol (threshold tol * max|entry|).
inline std::size_t rank(const Matrix& a, double tol = 1e-9) {
    if (tol <= 0) throw InvalidInputError("rank: tol must be positive");
    if (!a.all_finite()) throw InvalidInputError("rank: non-finite entries");
    double scale = a.max_abs();
    if (scale == 0.0) return 0;
    Matrix work = a;
    return detail::rref_in_place(work, tol * scale).size();
}

/// All nullspace basis vectors of A, one per free column of the reduced
/// echelon form, each normalized to unit infinity norm. The vector for free
/// column q has r[q] = 1 and -R[i][q] on the pivot columns. Order follows
/// ascending free-column index, so the first entry is the deterministic
/// choice used everywhere a single direction is needed.
inline std::vector<std::vector<double>> nullspace_basis(const Matrix& a, double tol = 1e-9) {
    if (tol <= 0) throw InvalidInputError("nullspace: tol must be positive");
    if (!a.all_finite()) throw InvalidInputError("nullspace: non-finite entries");
    if (a.cols() == 0) return {};
    Matrix work = a;
    double scale = a.max_abs();
    std::vector<std::size_t> pivots =
        scale == 0.0 ? std::vector<std::size_t>{} : detail::rref_in_place(work, tol * scale);

    std::vector<bool> is_pivot(a.cols(), false);
    for (std::size_t c : pivots) is_pivot[c] = true;

    std::vector<std::vector<double>> basis;
    for (std::size_t q = 0; q < a.cols(); ++q) {
        if (is_pivot[q]) continue;
        std::vector<double> r(a.cols(), 0.0);
        r[q] = 1.0;
        if (scale != 0.0)
            for (std::size_t i = 0; i < pivots.size(); ++i) r[pivots[i]] = -work(i, q);
        double m = 0.0;
        for (double v : r) m = std::max(m, std::fabs(v));
        for (double& v : r) v /= m;
        basis.push_back(std::move(r));
    }
    return basis;
}

/// One vector r with ||r||_inf = 1 and ||A r||_inf <= tol * ||A||_inf,
/// or nullopt when A has full column rank at tolerance tol.
inline std::optional<std::vector<double>> nullspace_vector(const Matrix& a, double tol = 1e-9) {
    if (a.cols() < 1) throw InvalidInputError("nullspace_vector: matrix has no columns");
    auto basis = nullspace_basis(a, tol);
    if (basis.empty()) return std::nullopt;
    return basis.front();
}

} // namespace polyround

#endif
