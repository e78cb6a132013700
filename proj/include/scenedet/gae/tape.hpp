#pragma once

#include <functional>
#include <vector>

#include "scenedet/gae/matrix.hpp"

namespace scenedet::gae {

// Define-by-run reverse-mode tape over a fixed op set (matmul, ReLU,
// row-softmax, sigmoid, element-wise product, means, ...). Values are
// computed eagerly; backward() accumulates gradients for every node that
// transitively feeds the root and was created with requires-grad leaves.
class Tape {
public:
    using Id = int;

    Id constant(Matrix value);
    Id variable(Matrix value); // leaf with gradient

    Id matmul(Id a, Id b);
    Id spmm(const Csr& a, Id x); // a is constant and symmetric
    Id add(Id a, Id b);
    Id sub(Id a, Id b);
    Id add_row_broadcast(Id m, Id row); // m: K x C, row: 1 x C
    Id hadamard(Id a, Id b);
    Id relu(Id a);
    Id row_softmax(Id a);
    Id sigmoid(Id a);
    Id clamp(Id a, double lo, double hi);
    Id log(Id a);
    Id gather_rows(Id a, std::vector<int> rows);
    Id mean_all(Id a); // 1x1
    Id scale(Id a, double s);
    Id add_const(Id a, double c);
    Id mse(Id a, Id b); // 1x1, mean over entries

    const Matrix& value(Id id) const { return nodes_[id].value; }
    const Matrix& grad(Id id) const { return nodes_[id].grad; }

    // Root must be 1x1.
    void backward(Id root);

private:
    struct Node {
        Matrix value;
        Matrix grad; // empty until touched by backward
        bool needs_grad = false;
        std::function<void()> back;
    };

    Id push(Matrix value, bool needs_grad, std::function<void()> back);
    Matrix& grad_buf(Id id);
    bool takes_grad(Id id) const { return nodes_[id].needs_grad; }

    std::vector<Node> nodes_;
};

} // namespace scenedet::gae
