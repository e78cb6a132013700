#include "scenedet/gae/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "scenedet/common/errors.hpp"
#include "scenedet/common/hash.hpp"

namespace scenedet::gae {

using json = nlohmann::ordered_json;

double decoder_gain(int out_dim)
{
    // Row-softmax embeddings put the element-wise product at O(1/F^2);
    // without a fixed input gain the decoder MLP sees gradients too small
    // to move at the configured learning rate.
    return out_dim / 2.0;
}

DenseGraph DenseGraph::from_edges(int n,
                                  const std::vector<std::pair<int, int>>& raw,
                                  Matrix features)
{
    DenseGraph g;
    g.n = n;
    std::set<std::pair<int, int>> dedup;
    for (auto [u, v] : raw) {
        if (u == v)
            continue; // diagonal handled by normalization only
        if (u > v)
            std::swap(u, v);
        dedup.insert({u, v});
    }
    g.edges.assign(dedup.begin(), dedup.end());
    g.features = std::move(features);
    return g;
}

GaeParams init_params(const GaeShape& shape, std::uint64_t seed)
{
    RandomStream rng(seed);
    auto glorot = [&](int rows, int cols) {
        Matrix m(rows, cols);
        double limit = std::sqrt(6.0 / (rows + cols));
        for (auto& v : m.a)
            v = rng.next_range(-limit, limit);
        return m;
    };
    GaeParams p;
    p.shape = shape;
    p.w0 = glorot(shape.in_dim, shape.hidden);
    p.w1 = glorot(shape.hidden, shape.out_dim);
    p.mlp_w1 = glorot(shape.out_dim, shape.out_dim);
    p.mlp_b1 = Matrix(1, shape.out_dim);
    p.mlp_w2 = glorot(shape.out_dim, 1);
    p.mlp_b2 = Matrix(1, 1);
    return p;
}

Csr normalize_adjacency(int n, const std::vector<std::pair<int, int>>& edges)
{
    std::vector<std::set<int>> adj(n);
    for (auto [u, v] : edges) {
        if (u == v)
            continue;
        adj[u].insert(v);
        adj[v].insert(u);
    }
    std::vector<double> deg(n);
    for (int i = 0; i < n; ++i) {
        adj[i].insert(i); // self-connection
        deg[i] = static_cast<double>(adj[i].size());
    }
    Csr a;
    a.n = n;
    a.row_ptr.push_back(0);
    for (int i = 0; i < n; ++i) {
        for (int j : adj[i]) {
            a.col_idx.push_back(j);
            a.vals.push_back(1.0 / std::sqrt(deg[i] * deg[j]));
        }
        a.row_ptr.push_back(static_cast<int>(a.col_idx.size()));
    }
    return a;
}

Csr normalize_adjacency(const DenseGraph& g)
{
    return normalize_adjacency(g.n, g.edges);
}

MaskedView mask_edges(const DenseGraph& g, double p, std::uint64_t seed)
{
    MaskedView view;
    view.seed = seed;
    RandomStream rng(seed);
    for (const auto& e : g.edges) {
        if (rng.next_bernoulli(p))
            view.masked_edges.push_back(e);
        else
            view.remaining_edges.push_back(e);
    }
    return view;
}

namespace {

struct EncoderIds {
    Tape::Id w0, w1, z;
};

EncoderIds encode_on_tape(Tape& tape, const Matrix& x, const Csr& a_hat,
                          const GaeParams& params)
{
    if (x.cols != params.shape.in_dim || x.rows != a_hat.n)
        throw ShapeMismatch("encode: feature shape "
                            + std::to_string(x.rows) + "x"
                            + std::to_string(x.cols)
                            + " does not match params/adjacency");
    EncoderIds ids;
    Tape::Id xid = tape.constant(x);
    ids.w0 = tape.variable(params.w0);
    ids.w1 = tape.variable(params.w1);
    Tape::Id h = tape.relu(tape.spmm(a_hat, tape.matmul(xid, ids.w0)));
    ids.z = tape.row_softmax(tape.spmm(a_hat, tape.matmul(h, ids.w1)));
    return ids;
}

struct DecoderIds {
    Tape::Id w1, b1, w2, b2;
};

// h = sigmoid(MLP(zu o zv)) for a batch of pairs; returns the id of the
// clamped probability column.
Tape::Id decode_pairs_on_tape(Tape& tape, Tape::Id z,
                              const std::vector<std::pair<int, int>>& pairs,
                              DecoderIds& ids)
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
    // Same fixed input gain as the training-side decoder: row-softmax
    // embeddings put the element-wise product at O(1/F^2).
    prod = tape.scale(prod, decoder_gain(tape.value(z).cols));
    Tape::Id h1 = tape.relu(tape.add_row_broadcast(
            tape.matmul(prod, ids.w1), ids.b1));
    Tape::Id score = tape.add_row_broadcast(tape.matmul(h1, ids.w2), ids.b2);
    return tape.clamp(tape.sigmoid(score), 1e-7, 1.0 - 1e-7);
}

DecoderIds decoder_vars(Tape& tape, const GaeParams& params)
{
    return {tape.variable(params.mlp_w1), tape.variable(params.mlp_b1),
            tape.variable(params.mlp_w2), tape.variable(params.mlp_b2)};
}

} // namespace

Matrix encode(const Matrix& x, const Csr& a_hat, const GaeParams& params)
{
    Tape tape;
    EncoderIds ids = encode_on_tape(tape, x, a_hat, params);
    return tape.value(ids.z);
}

double decode_edge(const std::vector<double>& zi,
                   const std::vector<double>& zj, const GaeParams& params)
{
    const int f = params.shape.out_dim;
    if (static_cast<int>(zi.size()) != f
        || static_cast<int>(zj.size()) != f)
        throw ShapeMismatch("decode_edge operand length");
    Matrix z(2, f);
    for (int c = 0; c < f; ++c) {
        z.at(0, c) = zi[c];
        z.at(1, c) = zj[c];
    }
    Tape tape;
    Tape::Id zid = tape.constant(z);
    DecoderIds ids = decoder_vars(tape, params);
    Tape::Id h = decode_pairs_on_tape(tape, zid, {{0, 1}}, ids);
    return tape.value(h).at(0, 0);
}

std::vector<std::pair<int, int>>
sample_negative_edges(const DenseGraph& g, std::size_t count,
                      std::uint64_t seed)
{
    std::set<std::pair<int, int>> edge_set(g.edges.begin(), g.edges.end());
    std::vector<std::pair<int, int>> out;
    if (g.n < 2)
        return out;
    RandomStream rng(seed);
    while (out.size() < count) {
        int u = static_cast<int>(rng.next_below(g.n));
        int v = static_cast<int>(rng.next_below(g.n));
        if (u == v)
            continue;
        if (u > v)
            std::swap(u, v);
        if (edge_set.count({u, v}))
            continue;
        out.push_back({u, v});
    }
    return out;
}

namespace {

// -(mean over positives of log h) - (mean over negatives of log(1-h)),
// with h clamped away from {0,1}. Either side with no pairs contributes 0.
Tape::Id local_loss_on_tape(Tape& tape, Tape::Id z, DecoderIds& dec,
                            const std::vector<std::pair<int, int>>& pos,
                            const std::vector<std::pair<int, int>>& neg)
{
    Tape::Id loss = tape.constant(Matrix(1, 1));
    if (!pos.empty()) {
        Tape::Id h = decode_pairs_on_tape(tape, z, pos, dec);
        Tape::Id term = tape.scale(tape.mean_all(tape.log(h)), -1.0);
        loss = tape.add(loss, term);
    }
    if (!neg.empty()) {
        Tape::Id h = decode_pairs_on_tape(tape, z, neg, dec);
        Tape::Id one_minus = tape.add_const(tape.scale(h, -1.0), 1.0);
        Tape::Id term = tape.scale(tape.mean_all(tape.log(one_minus)), -1.0);
        loss = tape.add(loss, term);
    }
    return loss;
}

} // namespace

double local_loss(const MaskedView& view, const Matrix& z,
                  const GaeParams& params,
                  const std::vector<std::pair<int, int>>& neg_samples)
{
    Tape tape;
    Tape::Id zid = tape.constant(z);
    DecoderIds dec = decoder_vars(tape, params);
    Tape::Id loss = local_loss_on_tape(tape, zid, dec, view.masked_edges,
                                       neg_samples);
    return tape.value(loss).at(0, 0);
}

double global_loss(const Matrix& z, const Matrix& z_hat)
{
    if (!z.same_shape(z_hat))
        throw ShapeMismatch("global_loss shape mismatch");
    // Entry-wise mean of the squared difference (documented reading of the
    // per-N normalization).
    double sum = 0.0;
    for (std::size_t i = 0; i < z.a.size(); ++i) {
        double d = z.a[i] - z_hat.a[i];
        sum += d * d;
    }
    return sum / static_cast<double>(z.a.size());
}

double total_loss(double local_a, double local_b, double global,
                  double alpha)
{
    return 0.5 * (local_a + local_b) + alpha * global;
}

std::vector<double> pool(const Matrix& z)
{
    std::vector<double> out(z.cols, 0.0);
    if (z.rows == 0)
        return out;
    for (int r = 0; r < z.rows; ++r) {
        for (int c = 0; c < z.cols; ++c)
            out[c] += z.at(r, c);
    }
    for (auto& v : out)
        v /= z.rows;
    return out;
}

namespace {

json matrix_to_json(const Matrix& m)
{
    json j;
    j["rows"] = m.rows;
    j["cols"] = m.cols;
    j["data"] = m.a;
    return j;
}

Matrix matrix_from_json(const json& j, const std::string& path)
{
    if (!j.contains("rows") || !j.contains("cols") || !j.contains("data"))
        throw FormatError(path, "missing matrix fields");
    Matrix m(j["rows"].get<int>(), j["cols"].get<int>());
    auto data = j["data"].get<std::vector<double>>();
    if (data.size() != m.a.size())
        throw FormatError(path + ".data", "size mismatch");
    m.a = std::move(data);
    return m;
}

} // namespace

void save_params(const GaeParams& p, const std::filesystem::path& path)
{
    json j;
    j["version"] = "gae/1";
    j["shape"]["in_dim"] = p.shape.in_dim;
    j["shape"]["hidden"] = p.shape.hidden;
    j["shape"]["out_dim"] = p.shape.out_dim;
    j["w0"] = matrix_to_json(p.w0);
    j["w1"] = matrix_to_json(p.w1);
    j["mlp_w1"] = matrix_to_json(p.mlp_w1);
    j["mlp_b1"] = matrix_to_json(p.mlp_b1);
    j["mlp_w2"] = matrix_to_json(p.mlp_w2);
    j["mlp_b2"] = matrix_to_json(p.mlp_b2);
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot write " + path.string());
    out << j.dump(1) << "\n";
}

GaeParams load_params(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot read " + path.string());
    json j;
    try {
        in >> j;
    }
    catch (const json::exception& e) {
        throw FormatError("$", e.what());
    }
    if (!j.contains("version") || j["version"] != "gae/1")
        throw FormatError("$.version", "unsupported checkpoint version");
    GaeParams p;
    p.shape.in_dim = j["shape"]["in_dim"].get<int>();
    p.shape.hidden = j["shape"]["hidden"].get<int>();
    p.shape.out_dim = j["shape"]["out_dim"].get<int>();
    p.w0 = matrix_from_json(j["w0"], "$.w0");
    p.w1 = matrix_from_json(j["w1"], "$.w1");
    p.mlp_w1 = matrix_from_json(j["mlp_w1"], "$.mlp_w1");
    p.mlp_b1 = matrix_from_json(j["mlp_b1"], "$.mlp_b1");
    p.mlp_w2 = matrix_from_json(j["mlp_w2"], "$.mlp_w2");
    p.mlp_b2 = matrix_from_json(j["mlp_b2"], "$.mlp_b2");
    return p;
}

std::string params_digest(const GaeParams& p)
{
    std::string bytes;
    auto feed = [&](const Matrix& m) {
        const char* raw = reinterpret_cast<const char*>(m.a.data());
        bytes.append(raw, m.a.size() * sizeof(double));
    };
    feed(p.w0);
    feed(p.w1);
    feed(p.mlp_w1);
    feed(p.mlp_b1);
    feed(p.mlp_w2);
    feed(p.mlp_b2);
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(bytes)));
    return buf;
}

} // namespace scenedet::gae
