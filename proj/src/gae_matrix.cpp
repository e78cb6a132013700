#include "scenedet/gae/matrix.hpp"

#include "scenedet/common/errors.hpp"

namespace scenedet::gae {

Matrix Csr::to_dense() const
{
    Matrix m(n, n);
    for (int r = 0; r < n; ++r) {
        for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k)
            m.at(r, col_idx[k]) = vals[k];
    }
    return m;
}

Matrix matmul(const Matrix& a, const Matrix& b)
{
    if (a.cols != b.rows)
        throw ShapeMismatch("matmul shapes "
                            + std::to_string(a.rows) + "x"
                            + std::to_string(a.cols) + " * "
                            + std::to_string(b.rows) + "x"
                            + std::to_string(b.cols));
    Matrix out(a.rows, b.cols);
    for (int i = 0; i < a.rows; ++i) {
        const double* arow = a.row(i);
        double* orow = out.row(i);
        for (int k = 0; k < a.cols; ++k) {
            double v = arow[k];
            if (v == 0.0)
                continue;
            const double* brow = b.row(k);
            for (int j = 0; j < b.cols; ++j)
                orow[j] += v * brow[j];
        }
    }
    return out;
}

Matrix spmm(const Csr& a, const Matrix& m)
{
    if (a.n != m.rows)
        throw ShapeMismatch("spmm shape mismatch");
    Matrix out(a.n, m.cols);
    for (int r = 0; r < a.n; ++r) {
        double* orow = out.row(r);
        for (int k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k) {
            double v = a.vals[k];
            const double* mrow = m.row(a.col_idx[k]);
            for (int j = 0; j < m.cols; ++j)
                orow[j] += v * mrow[j];
        }
    }
    return out;
}

Matrix transpose(const Matrix& m)
{
    Matrix out(m.cols, m.rows);
    for (int r = 0; r < m.rows; ++r) {
        for (int c = 0; c < m.cols; ++c)
            out.at(c, r) = m.at(r, c);
    }
    return out;
}

} // namespace scenedet::gae
