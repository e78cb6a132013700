#pragma once

#include <cstddef>
#include <vector>

namespace scenedet::gae {

// Dense row-major matrix of doubles, sized for graphs of a few hundred to
// a few thousand nodes.
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> a;

    Matrix() = default;
    Matrix(int rows, int cols, double fill = 0.0)
        : rows(rows), cols(cols),
          a(static_cast<std::size_t>(rows) * cols, fill)
    {
    }

    double& at(int r, int c)
    {
        return a[static_cast<std::size_t>(r) * cols + c];
    }
    double at(int r, int c) const
    {
        return a[static_cast<std::size_t>(r) * cols + c];
    }
    double* row(int r) { return a.data() + static_cast<std::size_t>(r) * cols; }
    const double* row(int r) const
    {
        return a.data() + static_cast<std::size_t>(r) * cols;
    }

    bool same_shape(const Matrix& o) const
    {
        return rows == o.rows && cols == o.cols;
    }

    bool operator==(const Matrix&) const = default;
};

// Compressed sparse row matrix; symmetric by construction here (normalized
// adjacency), so no separate transpose is kept.
struct Csr {
    int n = 0;
    std::vector<int> row_ptr;
    std::vector<int> col_idx;
    std::vector<double> vals;

    Matrix to_dense() const;
};

Matrix matmul(const Matrix& a, const Matrix& b);
// out = A * m with A sparse.
Matrix spmm(const Csr& a, const Matrix& m);
Matrix transpose(const Matrix& m);

} // namespace scenedet::gae
