#include "scenedet/gae/tape.hpp"

#include <cmath>

#include "scenedet/common/errors.hpp"

namespace scenedet::gae {

Tape::Id Tape::push(Matrix value, bool needs_grad, std::function<void()> back)
{
    nodes_.push_back({std::move(value), {}, needs_grad, std::move(back)});
    return static_cast<Id>(nodes_.size()) - 1;
}

Matrix& Tape::grad_buf(Id id)
{
    Node& n = nodes_[id];
    if (n.grad.rows == 0)
        n.grad = Matrix(n.value.rows, n.value.cols);
    return n.grad;
}

Tape::Id Tape::constant(Matrix value)
{
    return push(std::move(value), false, nullptr);
}

Tape::Id Tape::variable(Matrix value)
{
    return push(std::move(value), true, nullptr);
}

Tape::Id Tape::matmul(Id a, Id b)
{
    Matrix out = gae::matmul(nodes_[a].value, nodes_[b].value);
    bool ng = takes_grad(a) || takes_grad(b);
    Id id = push(std::move(out), ng, nullptr);
    nodes_[id].back = [this, a, b, id]() {
        const Matrix& dy = nodes_[id].grad;
        if (takes_grad(a)) {
            Matrix bt = transpose(nodes_[b].value);
            Matrix da = gae::matmul(dy, bt);
            Matrix& ga = grad_buf(a);
            for (std::size_t i = 0; i < ga.a.size(); ++i)
                ga.a[i] += da.a[i];
        }
        if (takes_grad(b)) {
            Matrix at = transpose(nodes_[a].value);
            Matrix db = gae::matmul(at, dy);
            Matrix& gb = grad_buf(b);
            for (std::size_t i = 0; i < gb.a.size(); ++i)
                gb.a[i] += db.a[i];
        }
    };
    return id;
}

Tape::Id Tape::spmm(const Csr& a, Id x)
{
    Matrix out = gae::spmm(a, nodes_[x].value);
    bool ng = takes_grad(x);
    Id id = push(std::move(out), ng, nullptr);
    if (ng) {
        // The adjacency is symmetric, so the backward product reuses it.
        nodes_[id].back = [this, a, x, id]() {
            Matrix dx = gae::spmm(a, nodes_[id].grad);
            Matrix& gx = grad_buf(x);
            for (std::size_t i = 0; i < gx.a.size(); ++i)
                gx.a[i] += dx.a[i];
        };
    }
    return id;
}

Tape::Id Tape::add(Id a, Id b)
{
    const Matrix& va = nodes_[a].value;
    const Matrix& vb = nodes_[b].value;
    if (!va.same_shape(vb))
        throw ShapeMismatch("add shape mismatch");
    Matrix out = va;
    for (std::size_t i = 0; i < out.a.size(); ++i)
        out.a[i] += vb.a[i];
    Id id = push(std::move(out), takes_grad(a) || takes_grad(b), nullptr);
    nodes_[id].back = [this, a, b, id]() {
        const Matrix& dy = nodes_[id].grad;
        for (Id in : {a, b}) {
            if (!takes_grad(in))
                continue;
            Matrix& g = grad_buf(in);
            for (std::size_t i = 0; i < g.a.size(); ++i)
                g.a[i] += dy.a[i];
        }
    };
    return id;
}

Tape::Id Tape::sub(Id a, Id b)
{
    const Matrix& va = nodes_[a].value;
    const Matrix& vb = nodes_[b].value;
    if (!va.same_shape(vb))
        throw ShapeMismatch("sub shape mismatch");
    Matrix out = va;
    for (std::size_t i = 0; i < out.a.size(); ++i)
        out.a[i] -= vb.a[i];
    Id id = push(std::move(out), takes_grad(a) || takes_grad(b), nullptr);
    nodes_[id].back = [this, a, b, id]() {
        const Matrix& dy = nodes_[id].grad;
        if (takes_grad(a)) {
            Matrix& g = grad_buf(a);
            for (std::size_t i = 0; i < g.a.size(); ++i)
                g.a[i] += dy.a[i];
        }
        if (takes_grad(b)) {
            Matrix& g = grad_buf(b);
            for (std::size_t i = 0; i < g.a.size(); ++i)
                g.a[i] -= dy.a[i];
        }
    };
    return id;
}

Tape::Id Tape::add_row_broadcast(Id m, Id row)
{
    const Matrix& vm = nodes_[m].value;
    const Matrix& vr = nodes_[row].value;
    if (vr.rows != 1 || vr.cols != vm.cols)
        throw ShapeMismatch("add_row_broadcast shape mismatch");
    Matrix out = vm;
    for (int r = 0; r < out.rows; ++r) {
        double* orow = out.row(r);
        for (int c = 0; c < out.cols; ++c)
            orow[c] += vr.at(0, c);
    }
    Id id = push(std::move(out), takes_grad(m) || takes_grad(row), nullptr);
    nodes_[id].back = [this, m, row, id]() {
        const Matrix& dy = nodes_[id].grad;
        if (takes_grad(m)) {
            Matrix& g = grad_buf(m);
            for (std::size_t i = 0; i < g.a.size(); ++i)
                g.a[i] += dy.a[i];
        }
        if (takes_grad(row)) {
            Matrix& g = grad_buf(row);
            for (int r = 0; r < dy.rows; ++r) {
                for (int c = 0; c < dy.cols; ++c)
                    g.at(0, c) += dy.at(r, c);
            }
        }
    };
    return id;
}

Tape::Id Tape::hadamard(Id a, Id b)
{
    const Matrix& va = nodes_[a].value;
    const Matrix& vb = nodes_[b].value;
    if (!va.same_shape(vb))
        throw ShapeMismatch("hadamard shape mismatch");
    Matrix out = va;
    for (std::size_t i = 0; i < out.a.size(); ++i)
        out.a[i] *= vb.a[i];
    Id id = push(std::move(out), takes_grad(a) || takes_grad(b), nullptr);
    nodes_[id].back = [this, a, b, id]() {
        const Matrix& dy = nodes_[id].grad;
        if (takes_grad(a)) {
            Matrix& g = grad_buf(a);
            const Matrix& vb2 = nodes_[b].value;
            for (std::size_t i = 0; i < g.a.size(); ++i)
                g.a[i] += dy.a[i] * vb2.a[i];
        }
        if (takes_grad(b)) {
            Matrix& g = grad_buf(b);
            const Matrix& va2 = nodes_[a].value;
            for (std::size_t i = 0; i < g.a.size(); ++i)
                g.a[i] += dy.a[i] * va2.a[i];
        }
    };
    return id;
}

Tape::Id Tape::relu(Id a)
{
    Matrix out = nodes_[a].value;
    for (auto& v : out.a)
        v = v > 0.0 ? v : 0.0;
    Id id = push(std::move(out), takes_grad(a), nullptr);
    if (takes_grad(a)) {
        nodes_[id].back = [this, a, id]() {
            const Matrix& dy = nodes_[id].grad;
            const Matrix& x = nodes_[a].value;
            Matrix& g = grad_buf(a);
            for (std::size_t i = 0; i < g.a.size(); ++i)
                g.a[i] += x.a[i] > 0.0 ? dy.a[i] : 0.0;
        };
    }
    return id;
}

Tape::Id Tape::row_softmax(Id a)
{
    Matrix out = nodes_[a].value;
    for (int r = 0; r < out.rows; ++r) {
        double* row = out.row(r);
        double mx = row[0];
        for (int c = 1; c < out.cols; ++c)
            mx = std::max(mx, row[c]);
        double sum = 0.0;
        for (int c = 0; c < out.cols; ++c) {
            row[c] = std::exp(row[c] - mx);
            sum += row[c];
        }
        for (int c = 0; c < out.cols; ++c)
            row[c] /= sum;
    }
    Id id = push(std::move(out), takes_grad(a), nullptr);
    if (takes_grad(a)) {
        nodes_[id].back = [this, a, id]() {
            const Matrix& dy = nodes_[id].grad;
            const Matrix& y = nodes_[id].value;
            Matrix& g = grad_buf(a);
            for (int r = 0; r < y.rows; ++r) {
                double dot = 0.0;
                for (int c = 0; c < y.cols; ++c)
                    dot += dy.at(r, c) * y.at(r, c);
                for (int c = 0; c < y.cols; ++c)
                    g.at(r, c) += y.at(r, c) * (dy.at(r, c) - dot);
            }
        };
    }
    return id;
}

Tape::Id Tape::sigmoid(Id a)
{
    Matrix out = nodes_[a].value;
    for (auto& v : out.a)
        v = 1.0 / (1.0 + std::exp(-v));
    Id id = push(std::move(out), takes_grad(a), nullptr);
    if (takes_grad(a)) {
        nodes_[id].back = [this, a, id]() {
            const Matrix& dy = nodes_[id].grad;
            const Matrix& y = nodes_[id].value;
            Matrix& g = grad_buf(a);
            for (std::size_t i = 0; i < g.a.size(); ++i)
                g.a[i] += dy.a[i] * y.a[i] * (1.0 - y.a[i]);
        };
    }
    return id;
}

Tape::Id Tape::clamp(Id a, double lo, double hi)
{
    Matrix out = nodes_[a].value;
    for (auto& v : out.a)
        v = v < lo ? lo : (v > hi ? hi : v);
    Id id = push(std::move(out), takes_grad(a), nullptr);
    if (takes_grad(a)) {
        nodes_[id].back = [this, a, id, lo, hi]() {
            const Matrix& dy = nodes_[id].grad;
            const Matrix& x = nodes_[a].value;
            Matrix& g = grad_buf(a);
            for (std::size_t i = 0; i < g.a.size(); ++i) {
                if (x.a[i] > lo && x.a[i] < hi)
                    g.a[i] += dy.a[i];
            }
        };
    }
    return id;
}

Tape::Id Tape::log(Id a)
{
    Matrix out = nodes_[a].value;
    for (auto& v : out.a)
        v = std::log(v);
    Id id = push(std::move(out), takes_grad(a), nullptr);
    if (takes_grad(a)) {
        nodes_[id].back = [this, a, id]() {
            const Matrix& dy = nodes_[id].grad;
            const Matrix& x = nodes_[a].value;
            Matrix& g = grad_buf(a);
            for (std::size_t i = 0; i < g.a.size(); ++i)
                g.a[i] += dy.a[i] / x.a[i];
        };
    }
    return id;
}

Tape::Id Tape::gather_rows(Id a, std::vector<int> rows)
{
    const Matrix& va = nodes_[a].value;
    Matrix out(static_cast<int>(rows.size()), va.cols);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const double* src = va.row(rows[r]);
        double* dst = out.row(static_cast<int>(r));
        for (int c = 0; c < va.cols; ++c)
            dst[c] = src[c];
    }
    Id id = push(std::move(out), takes_grad(a), nullptr);
    if (takes_grad(a)) {
        nodes_[id].back = [this, a, id, rows = std::move(rows)]() {
            const Matrix& dy = nodes_[id].grad;
            Matrix& g = grad_buf(a);
            for (std::size_t r = 0; r < rows.size(); ++r) {
                const double* src = dy.row(static_cast<int>(r));
                double* dst = g.row(rows[r]);
                for (int c = 0; c < dy.cols; ++c)
                    dst[c] += src[c];
            }
        };
    }
    return id;
}

Tape::Id Tape::mean_all(Id a)
{
    const Matrix& va = nodes_[a].value;
    double sum = 0.0;
    for (double v : va.a)
        sum += v;
    Matrix out(1, 1);
    double denom = static_cast<double>(va.a.size());
    out.at(0, 0) = sum / denom;
    Id id = push(std::move(out), takes_grad(a), nullptr);
    if (takes_grad(a)) {
        nodes_[id].back = [this, a, id, denom]() {
            double d = nodes_[id].grad.at(0, 0) / denom;
            Matrix& g = grad_buf(a);
            for (auto& v : g.a)
                v += d;
        };
    }
    return id;
}

Tape::Id Tape::scale(Id a, double s)
{
    Matrix out = nodes_[a].value;
    for (auto& v : out.a)
        v *= s;
    Id id = push(std::move(out), takes_grad(a), nullptr);
    if (takes_grad(a)) {
        nodes_[id].back = [this, a, id, s]() {
            const Matrix& dy = nodes_[id].grad;
            Matrix& g = grad_buf(a);
            for (std::size_t i = 0; i < g.a.size(); ++i)
                g.a[i] += s * dy.a[i];
        };
    }
    return id;
}

Tape::Id Tape::add_const(Id a, double c)
{
    Matrix out = nodes_[a].value;
    for (auto& v : out.a)
        v += c;
    Id id = push(std::move(out), takes_grad(a), nullptr);
    if (takes_grad(a)) {
        nodes_[id].back = [this, a, id]() {
            const Matrix& dy = nodes_[id].grad;
            Matrix& g = grad_buf(a);
            for (std::size_t i = 0; i < g.a.size(); ++i)
                g.a[i] += dy.a[i];
        };
    }
    return id;
}

Tape::Id Tape::mse(Id a, Id b)
{
    const Matrix& va = nodes_[a].value;
    const Matrix& vb = nodes_[b].value;
    if (!va.same_shape(vb))
        throw ShapeMismatch("mse shape mismatch");
    double sum = 0.0;
    for (std::size_t i = 0; i < va.a.size(); ++i) {
        double d = va.a[i] - vb.a[i];
        sum += d * d;
    }
    double denom = static_cast<double>(va.a.size());
    Matrix out(1, 1);
    out.at(0, 0) = sum / denom;
    Id id = push(std::move(out), takes_grad(a) || takes_grad(b), nullptr);
    nodes_[id].back = [this, a, b, id, denom]() {
        double dy = nodes_[id].grad.at(0, 0);
        const Matrix& va2 = nodes_[a].value;
        const Matrix& vb2 = nodes_[b].value;
        if (takes_grad(a)) {
            Matrix& g = grad_buf(a);
            for (std::size_t i = 0; i < g.a.size(); ++i)
                g.a[i] += dy * 2.0 * (va2.a[i] - vb2.a[i]) / denom;
        }
        if (takes_grad(b)) {
            Matrix& g = grad_buf(b);
            for (std::size_t i = 0; i < g.a.size(); ++i)
                g.a[i] -= dy * 2.0 * (va2.a[i] - vb2.a[i]) / denom;
        }
    };
    return id;
}

void Tape::backward(Id root)
{
    const Matrix& rv = nodes_[root].value;
    if (rv.rows != 1 || rv.cols != 1)
        throw ShapeMismatch("backward root must be scalar");
    grad_buf(root).at(0, 0) = 1.0;
    for (Id id = static_cast<Id>(nodes_.size()) - 1; id >= 0; --id) {
        Node& n = nodes_[id];
        if (n.grad.rows == 0 || !n.back)
            continue;
        n.back();
    }
}

} // namespace scenedet::gae
