#pragma once

#include "scenedet/gae/model.hpp"

namespace scenedet::gae {

// One epoch's sampled inputs: two masked views plus their negative pairs.
struct EpochInputs {
    MaskedView view_a;
    MaskedView view_b;
    std::vector<std::pair<int, int>> neg_a;
    std::vector<std::pair<int, int>> neg_b;
};

struct LossValues {
    double local_a = 0.0;
    double local_b = 0.0;
    double global_v = 0.0;
    double total = 0.0;
};

struct GaeGrads {
    Matrix w0, w1, mlp_w1, mlp_b1, mlp_w2, mlp_b2;
};

enum class LossTerm { Local, Global, Total };

LossValues compute_loss(const DenseGraph& g, const EpochInputs& in,
                        const GaeParams& params, double alpha);

// Analytic gradients of the chosen loss term w.r.t. every trainable
// tensor, via the tape. LossTerm::Local means the view-averaged local
// term.
std::pair<LossValues, GaeGrads>
loss_and_grads(const DenseGraph& g, const EpochInputs& in,
               const GaeParams& params, double alpha, LossTerm term);

EpochInputs draw_epoch_inputs(const DenseGraph& g, const Hyper& hyper,
                              RandomStream& stream);

struct TrainStats {
    double initial_loss = 0.0;
    double final_loss = 0.0;
    std::vector<double> epoch_losses;
};

// Full-batch gradient descent on the total loss; deterministic per seed.
// Throws DivergenceError when the loss stops being finite.
GaeParams train(const DenseGraph& g, const Hyper& hyper,
                TrainStats* stats = nullptr);

} // namespace scenedet::gae
