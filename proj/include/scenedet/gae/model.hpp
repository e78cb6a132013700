#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "scenedet/common/rng.hpp"
#include "scenedet/gae/matrix.hpp"
#include "scenedet/gae/tape.hpp"

namespace scenedet::gae {

// Attributed undirected graph for the auto-encoder. Directed input is
// symmetrized on load; the diagonal stays empty, self-connections enter
// only through normalization.
struct DenseGraph {
    int n = 0;
    std::vector<std::pair<int, int>> edges; // undirected, u < v, sorted
    Matrix features;                        // n x d

    static DenseGraph from_edges(int n,
                                 const std::vector<std::pair<int, int>>& raw,
                                 Matrix features);
};

struct MaskedView {
    std::vector<std::pair<int, int>> remaining_edges;
    std::vector<std::pair<int, int>> masked_edges;
    std::uint64_t seed = 0;
};

struct GaeShape {
    int in_dim = 160;
    int hidden = 64;   // H
    int out_dim = 32;  // F
};

struct GaeParams {
    GaeShape shape;
    Matrix w0;     // in_dim x hidden
    Matrix w1;     // hidden x out_dim
    Matrix mlp_w1; // out_dim x out_dim
    Matrix mlp_b1; // 1 x out_dim
    Matrix mlp_w2; // out_dim x 1
    Matrix mlp_b2; // 1 x 1

    bool operator==(const GaeParams&) const = default;
};

GaeParams init_params(const GaeShape& shape, std::uint64_t seed);

struct Hyper {
    double mask_p = 0.3;
    double alpha = 1.0;
    double lr = 0.01;
    int epochs = 200;
    double neg_ratio = 1.0;
    std::uint64_t seed = 0;
};

// D^-1/2 (A + I) D^-1/2 over the given undirected edge set.
Csr normalize_adjacency(int n, const std::vector<std::pair<int, int>>& edges);
Csr normalize_adjacency(const DenseGraph& g);

// Bernoulli(p) edge-wise mask; deterministic per seed.
MaskedView mask_edges(const DenseGraph& g, double p, std::uint64_t seed);

// Z = softmax(A_hat ReLU(A_hat X W0) W1), softmax row-wise.
Matrix encode(const Matrix& x, const Csr& a_hat, const GaeParams& params);

// Fixed input gain in front of the edge-decoder MLP (see model notes).
double decoder_gain(int out_dim);

// Sigmoid(MLP(zi o zj)); symmetric in its arguments.
double decode_edge(const std::vector<double>& zi,
                   const std::vector<double>& zj, const GaeParams& params);

// Uniform negative sampling from the complement of g's edge set (self
// pairs excluded), with replacement.
std::vector<std::pair<int, int>>
sample_negative_edges(const DenseGraph& g, std::size_t count,
                      std::uint64_t seed);

double local_loss(const MaskedView& view, const Matrix& z,
                  const GaeParams& params,
                  const std::vector<std::pair<int, int>>& neg_samples);

double global_loss(const Matrix& z, const Matrix& z_hat);

double total_loss(double local_a, double local_b, double global,
                  double alpha);

// Column-wise mean of Z; zero vector when Z has no rows.
std::vector<double> pool(const Matrix& z);

// Checkpoint file (versioned JSON, round-trip exact doubles).
void save_params(const GaeParams& params, const std::filesystem::path& path);
GaeParams load_params(const std::filesystem::path& path);
std::string params_digest(const GaeParams& params);

} // namespace scenedet::gae
