#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mfptmdp {

using DenseVector = std::vector<double>;

struct Triplet {
    std::size_t row;
    std::size_t col;
    double value;
};

/// Compressed sparse row matrix. Entries are sorted by row, then column,
/// with no duplicates and no stored zeros.
class SparseMatrix {
public:
    SparseMatrix() = default;
    SparseMatrix(std::size_t rows, std::size_t cols);

    /// Duplicate (row, col) pairs are summed; entries that end up exactly
    /// zero are dropped. Throws DimensionError on out-of-range indices.
    static SparseMatrix from_triplets(std::size_t rows, std::size_t cols,
                                      std::vector<Triplet> triplets);

    static SparseMatrix identity(std::size_t n);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t nonzeros() const noexcept { return values_.size(); }

    std::span<const std::size_t> row_columns(std::size_t r) const;
    std::span<const double> row_values(std::size_t r) const;

    /// Stored value or 0.
    double at(std::size_t r, std::size_t c) const;

    DenseVector multiply(std::span<const double> x) const;

    std::vector<Triplet> triplets() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<std::size_t> row_offsets_{0};
    std::vector<std::size_t> col_indices_;
    std::vector<double> values_;
};

/// Pivots with magnitude below this are treated as singular.
inline constexpr double kPivotThreshold = 1e-12;

/// Direct solve by Gaussian elimination with partial pivoting, restricted to
/// the band occupied by the matrix. Throws SingularMatrix or DimensionError.
DenseVector solve(const SparseMatrix& a, std::span<const double> b);

/// Gauss-Seidel sweeps until ‖Ax − b‖∞ ≤ tol. Throws ZeroDiagonal,
/// DimensionError, or NoConvergence after max_sweeps.
DenseVector solve_iterative(const SparseMatrix& a, std::span<const double> b, double tol,
                            std::size_t max_sweeps);

/// max_i |(Ax − b)_i|
double residual_norm(const SparseMatrix& a, std::span<const double> x,
                     std::span<const double> b);

}  // namespace mfptmdp
