#include "mfptmdp/linsolve.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "mfptmdp/errors.hpp"

namespace mfptmdp {

SparseMatrix::SparseMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), row_offsets_(rows + 1, 0) {}

SparseMatrix SparseMatrix::from_triplets(std::size_t rows, std::size_t cols,
                                         std::vector<Triplet> triplets) {
    for (const auto& t : triplets) {
        if (t.row >= rows || t.col >= cols) {
            throw DimensionError("triplet (" + std::to_string(t.row) + ", " +
                                 std::to_string(t.col) + ") outside " +
                                 std::to_string(rows) + "x" + std::to_string(cols));
        }
    }
    std::stable_sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });

    SparseMatrix m(rows, cols);
    m.col_indices_.reserve(triplets.size());
    m.values_.reserve(triplets.size());
    std::vector<std::size_t> counts(rows, 0);
    for (std::size_t i = 0; i < triplets.size();) {
        const std::size_t r = triplets[i].row;
        const std::size_t c = triplets[i].col;
        double sum = 0.0;
        for (; i < triplets.size() && triplets[i].row == r && triplets[i].col == c; ++i) {
            sum += triplets[i].value;
        }
        if (sum != 0.0) {
            m.col_indices_.push_back(c);
            m.values_.push_back(sum);
            ++counts[r];
        }
    }
    for (std::size_t r = 0; r < rows; ++r) {
        m.row_offsets_[r + 1] = m.row_offsets_[r] + counts[r];
    }
    return m;
}

SparseMatrix SparseMatrix::identity(std::size_t n) {
    std::vector<Triplet> t;
    t.reserve(n);
    for (std::size_t i = 0; i < n; ++i) t.push_back({i, i, 1.0});
    return from_triplets(n, n, std::move(t));
}

std::span<const std::size_t> SparseMatrix::row_columns(std::size_t r) const {
    return std::span<const std::size_t>(col_indices_)
        .subspan(row_offsets_[r], row_offsets_[r + 1] - row_offsets_[r]);
}

std::span<const double> SparseMatrix::row_values(std::size_t r) const {
    return std::span<const double>(values_).subspan(row_offsets_[r],
                                                    row_offsets_[r + 1] - row_offsets_[r]);
}

double SparseMatrix::at(std::size_t r, std::size_t c) const {
    const auto cols = row_columns(r);
    const auto it = std::lower_bound(cols.begin(), cols.end(), c);
    if (it == cols.end() || *it != c) return 0.0;
    return row_values(r)[static_cast<std::size_t>(it - cols.begin())];
}

DenseVector SparseMatrix::multiply(std::span<const double> x) const {
    if (x.size() != cols_) {
        throw DimensionError("multiply: vector length " + std::to_string(x.size()) +
                             " != cols " + std::to_string(cols_));
    }
    DenseVector y(rows_, 0.0);
    for (std::size_t r = 0; r < rows_; ++r) {
        double acc = 0.0;
        for (std::size_t k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) {
            acc += values_[k] * x[col_indices_[k]];
        }
        y[r] = acc;
    }
    return y;
}

std::vector<Triplet> SparseMatrix::triplets() const {
    std::vector<Triplet> out;
    out.reserve(values_.size());
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) {
            out.push_back({r, col_indices_[k], values_[k]});
        }
    }
    return out;
}

double residual_norm(const SparseMatrix& a, std::span<const double> x,
                     std::span<const double> b) {
    const DenseVector ax = a.multiply(x);
    double worst = 0.0;
    for (std::size_t i = 0; i < ax.size(); ++i) worst = std::max(worst, std::abs(ax[i] - b[i]));
    return worst;
}

namespace {

void check_square_system(const SparseMatrix& a, std::span<const double> b) {
    if (a.rows() != a.cols()) {
        throw DimensionError("matrix is " + std::to_string(a.rows()) + "x" +
                             std::to_string(a.cols()) + ", expected square");
    }
    if (b.size() != a.rows()) {
        throw DimensionError("right-hand side has length " + std::to_string(b.size()) +
                             ", expected " + std::to_string(a.rows()));
    }
}

// One row of the augmented system during elimination. Columns before `lo`
// have been eliminated; storage covers [base, base + v.size()).
struct WorkRow {
    std::size_t base = 0;
    std::size_t lo = 0;
    std::vector<double> v;
    double rhs = 0.0;

    std::size_t end() const noexcept { return base + v.size(); }
    double get(std::size_t c) const noexcept {
        return (c >= lo && c < end()) ? v[c - base] : 0.0;
    }
};

}  // namespace

DenseVector solve(const SparseMatrix& a, std::span<const double> b) {
    check_square_system(a, b);
    const std::size_t n = a.rows();

    std::vector<WorkRow> rows(n);
    std::size_t lower_bw = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto cols = a.row_columns(i);
        const auto vals = a.row_values(i);
        WorkRow& row = rows[i];
        row.rhs = b[i];
        if (cols.empty()) {
            row.base = row.lo = i;
            continue;
        }
        row.base = row.lo = cols.front();
        row.v.assign(cols.back() - cols.front() + 1, 0.0);
        for (std::size_t k = 0; k < cols.size(); ++k) row.v[cols[k] - row.base] = vals[k];
        if (cols.front() < i) lower_bw = std::max(lower_bw, i - cols.front());
    }

    // Rows at positions beyond k + lower_bw are untouched at step k, and
    // their first nonzero lies right of column k.
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t last = std::min(n - 1, k + lower_bw);
        std::size_t pivot_pos = k;
        double pivot_mag = std::abs(rows[k].get(k));
        for (std::size_t i = k + 1; i <= last; ++i) {
            const double mag = std::abs(rows[i].get(k));
            if (mag > pivot_mag) {
                pivot_mag = mag;
                pivot_pos = i;
            }
        }
        if (!(pivot_mag >= kPivotThreshold)) {
            throw SingularMatrix("pivot magnitude " + std::to_string(pivot_mag) +
                                 " below threshold at column " + std::to_string(k));
        }
        if (pivot_pos != k) std::swap(rows[k], rows[pivot_pos]);

        WorkRow& pivot = rows[k];
        pivot.lo = k;
        const double pivot_value = pivot.v[k - pivot.base];
        for (std::size_t i = k + 1; i <= last; ++i) {
            WorkRow& row = rows[i];
            const double entry = row.get(k);
            if (entry == 0.0) continue;
            const double factor = entry / pivot_value;
            if (pivot.end() > row.end()) row.v.resize(pivot.end() - row.base, 0.0);
            for (std::size_t c = k + 1; c < pivot.end(); ++c) {
                row.v[c - row.base] -= factor * pivot.v[c - pivot.base];
            }
            row.rhs -= factor * pivot.rhs;
            row.lo = k + 1;
        }
    }

    DenseVector x(n, 0.0);
    for (std::size_t k = n; k-- > 0;) {
        const WorkRow& row = rows[k];
        double acc = row.rhs;
        for (std::size_t c = k + 1; c < row.end(); ++c) acc -= row.v[c - row.base] * x[c];
        x[k] = acc / row.v[k - row.base];
    }
    return x;
}

DenseVector solve_iterative(const SparseMatrix& a, std::span<const double> b, double tol,
                            std::size_t max_sweeps) {
    check_square_system(a, b);
    if (!(tol > 0.0)) throw std::invalid_argument("solve_iterative: tol must be positive");
    const std::size_t n = a.rows();

    DenseVector diag(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        diag[i] = a.at(i, i);
        if (!(std::abs(diag[i]) >= kPivotThreshold)) {
            throw ZeroDiagonal("diagonal entry " + std::to_string(i) + " is (near) zero");
        }
    }

    DenseVector x(n, 0.0);
    for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
        for (std::size_t i = 0; i < n; ++i) {
            const auto cols = a.row_columns(i);
            const auto vals = a.row_values(i);
            double acc = b[i];
            for (std::size_t k = 0; k < cols.size(); ++k) {
                if (cols[k] != i) acc -= vals[k] * x[cols[k]];
            }
            x[i] = acc / diag[i];
        }
        if (residual_norm(a, x, b) <= tol) return x;
    }
    throw NoConvergence("Gauss-Seidel did not reach tolerance within " +
                        std::to_string(max_sweeps) + " sweeps");
}

}  // namespace mfptmdp
