#include "scenedet/gae/train.hpp"

#include <cmath>

#include "scenedet/common/errors.hpp"

namespace scenedet::gae {

namespace {

struct ParamIds {
    Tape::Id w0, w1, mlp_w1, mlp_b1, mlp_w2, mlp_b2;
};

Tape::Id encoder_forward(Tape& tape, Tape::Id x, const Csr& a_hat,
                         const ParamIds& ids)
{
    Tape::Id h = tape.relu(tape.spmm(a_hat, tape.matmul(x, ids.w0)));
    return tape.row_softmax(tape.spmm(a_hat, tape.matmul(h, ids.w1)));
}

Tape::Id decode_pairs(Tape& tape, Tape::Id z,
                      const std::vector<std::pair<int, int>>& pairs,
                      const ParamIds& ids)
{
    std::vector<int> us, vs;
    us.reserve(pairs.size());
    vs.reserve(pairs.size());
    for (const auto& [u, v] : pairs) {
        us.push_back(u);
        vs.push_back(v);
    }
    Tape::Id prod = tape.hadamard(tape.gather_rows(z, us),
                                  tape.gather_rows(z, vs));
    // Row-softmax embeddings put the element-wise product at O(1/F^2);
    // the fixed input gain keeps the MLP in a trainable range.
    prod = tape.scale(prod, decoder_gain(tape.value(z).cols));
    Tape::Id h1 = tape.relu(
            tape.add_row_broadcast(tape.matmul(prod, ids.mlp_w1),
                                   ids.mlp_b1));
    Tape::Id score = tape.add_row_broadcast(tape.matmul(h1, ids.mlp_w2),
                                            ids.mlp_b2);
    return tape.clamp(tape.sigmoid(score), 1e-7, 1.0 - 1e-7);
}

Tape::Id local_term(Tape& tape, Tape::Id z,
                    const std::vector<std::pair<int, int>>& pos,
                    const std::vector<std::pair<int, int>>& neg,
                    const ParamIds& ids)
{
    Tape::Id loss = tape.constant(Matrix(1, 1));
    if (!pos.empty()) {
        Tape::Id h = decode_pairs(tape, z, pos, ids);
        loss = tape.add(loss, tape.scale(tape.mean_all(tape.log(h)), -1.0));
    }
    if (!neg.empty()) {
        Tape::Id h = decode_pairs(tape, z, neg, ids);
        Tape::Id one_minus = tape.add_const(tape.scale(h, -1.0), 1.0);
        loss = tape.add(loss,
                        tape.scale(tape.mean_all(tape.log(one_minus)),
                                   -1.0));
    }
    return loss;
}

struct EpochTape {
    Tape tape;
    ParamIds ids;
    Tape::Id local_combined, global_id, total_id;
    LossValues values;
};

void build_epoch(EpochTape& et, const DenseGraph& g, const EpochInputs& in,
                 const GaeParams& params, double alpha)
{
    Tape& tape = et.tape;
    et.ids = {tape.variable(params.w0),     tape.variable(params.w1),
              tape.variable(params.mlp_w1), tape.variable(params.mlp_b1),
              tape.variable(params.mlp_w2), tape.variable(params.mlp_b2)};

    Tape::Id x = tape.constant(g.features);
    Csr a_hat_a = normalize_adjacency(g.n, in.view_a.remaining_edges);
    Csr a_hat_b = normalize_adjacency(g.n, in.view_b.remaining_edges);
    Tape::Id za = encoder_forward(tape, x, a_hat_a, et.ids);
    Tape::Id zb = encoder_forward(tape, x, a_hat_b, et.ids);

    Tape::Id la = local_term(tape, za, in.view_a.masked_edges, in.neg_a,
                             et.ids);
    Tape::Id lb = local_term(tape, zb, in.view_b.masked_edges, in.neg_b,
                             et.ids);
    et.local_combined = tape.scale(tape.add(la, lb), 0.5);
    et.global_id = tape.mse(za, zb);
    et.total_id = tape.add(et.local_combined,
                           tape.scale(et.global_id, alpha));

    et.values.local_a = tape.value(la).at(0, 0);
    et.values.local_b = tape.value(lb).at(0, 0);
    et.values.global_v = tape.value(et.global_id).at(0, 0);
    et.values.total = tape.value(et.total_id).at(0, 0);
}

} // namespace

LossValues compute_loss(const DenseGraph& g, const EpochInputs& in,
                        const GaeParams& params, double alpha)
{
    EpochTape et;
    build_epoch(et, g, in, params, alpha);
    return et.values;
}

std::pair<LossValues, GaeGrads>
loss_and_grads(const DenseGraph& g, const EpochInputs& in,
               const GaeParams& params, double alpha, LossTerm term)
{
    EpochTape et;
    build_epoch(et, g, in, params, alpha);
    Tape::Id root = et.total_id;
    if (term == LossTerm::Local)
        root = et.local_combined;
    else if (term == LossTerm::Global)
        root = et.global_id;
    et.tape.backward(root);

    auto grad_or_zero = [&](Tape::Id id, const Matrix& like) {
        const Matrix& m = et.tape.grad(id);
        return m.rows == 0 ? Matrix(like.rows, like.cols) : m;
    };
    GaeGrads grads{grad_or_zero(et.ids.w0, params.w0),
                   grad_or_zero(et.ids.w1, params.w1),
                   grad_or_zero(et.ids.mlp_w1, params.mlp_w1),
                   grad_or_zero(et.ids.mlp_b1, params.mlp_b1),
                   grad_or_zero(et.ids.mlp_w2, params.mlp_w2),
                   grad_or_zero(et.ids.mlp_b2, params.mlp_b2)};
    return {et.values, std::move(grads)};
}

EpochInputs draw_epoch_inputs(const DenseGraph& g, const Hyper& hyper,
                              RandomStream& stream)
{
    EpochInputs in;
    in.view_a = mask_edges(g, hyper.mask_p, stream.fork_seed());
    in.view_b = mask_edges(g, hyper.mask_p, stream.fork_seed());
    auto neg_count = [&](const MaskedView& v) {
        return static_cast<std::size_t>(
                std::llround(hyper.neg_ratio
                             * static_cast<double>(v.masked_edges.size())));
    };
    in.neg_a = sample_negative_edges(g, neg_count(in.view_a),
                                     stream.fork_seed());
    in.neg_b = sample_negative_edges(g, neg_count(in.view_b),
                                     stream.fork_seed());
    return in;
}

GaeParams train(const DenseGraph& g, const Hyper& hyper, TrainStats* stats)
{
    GaeShape shape{g.features.cols, 64, 32};
    GaeParams params = init_params(shape, hyper.seed);
    RandomStream epoch_stream(hyper.seed + 0x5eedu);

    auto step = [&](Matrix& w, const Matrix& grad) {
        for (std::size_t i = 0; i < w.a.size(); ++i)
            w.a[i] -= hyper.lr * grad.a[i];
    };

    for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
        EpochInputs in = draw_epoch_inputs(g, hyper, epoch_stream);
        auto [values, grads] =
                loss_and_grads(g, in, params, hyper.alpha, LossTerm::Total);
        if (!std::isfinite(values.total))
            throw DivergenceError("non-finite loss at epoch "
                                  + std::to_string(epoch));
        if (stats) {
            if (epoch == 0)
                stats->initial_loss = values.total;
            stats->final_loss = values.total;
            stats->epoch_losses.push_back(values.total);
        }
        step(params.w0, grads.w0);
        step(params.w1, grads.w1);
        step(params.mlp_w1, grads.mlp_w1);
        step(params.mlp_b1, grads.mlp_b1);
        step(params.mlp_w2, grads.mlp_w2);
        step(params.mlp_b2, grads.mlp_b2);
    }
    return params;
}

} // namespace scenedet::gae
