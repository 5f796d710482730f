#include "moverec/embed.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <numeric>
#include <random>

namespace moverec {

namespace {

constexpr std::string_view kEmbedderMagic = "MOVEREC-EMBEDDER";
constexpr std::uint32_t kEmbedderVersion = 1;

Matrix uniform_matrix(Eigen::Index rows, Eigen::Index cols, double fan_in, std::mt19937_64& rng) {
    const double scale = std::sqrt(3.0 / fan_in);
    std::uniform_real_distribution<double> dist(-scale, scale);
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = dist(rng);
    return m;
}

bool bits_equal(const double* a, const double* b, Eigen::Index n) {
    return std::memcmp(a, b, sizeof(double) * static_cast<std::size_t>(n)) == 0;
}

bool same_matrix(const Matrix& a, const Matrix& b) {
    return a.rows() == b.rows() && a.cols() == b.cols() && bits_equal(a.data(), b.data(), a.size());
}

bool same_vector(const Vector& a, const Vector& b) {
    return a.size() == b.size() && bits_equal(a.data(), b.data(), a.size());
}

// Forward state kept for the backward pass.
struct Forward {
    Matrix contexts;  // n x context_dim
    Matrix hidden;    // n x code_dim
    Vector weights;   // n
    Vector code;      // code_dim
};

Forward forward(std::span<const EncodedContext> ctxs, const EmbedderParams& p) {
    if (ctxs.empty()) throw EmptyBag("cannot embed an empty bag");
    const auto td = static_cast<Eigen::Index>(p.dims.token_dim);
    const auto pd = static_cast<Eigen::Index>(p.dims.path_dim);
    const auto n = static_cast<Eigen::Index>(ctxs.size());
    Forward f;
    f.contexts.resize(n, 2 * td + pd);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& c = ctxs[static_cast<std::size_t>(i)];
        f.contexts.row(i).segment(0, td) = p.token_embeddings.row(c.start);
        f.contexts.row(i).segment(td, pd) = p.path_embeddings.row(c.path);
        f.contexts.row(i).segment(td + pd, td) = p.token_embeddings.row(c.end);
    }
    f.hidden.noalias() = f.contexts * p.fc.transpose();
    f.hidden.rowwise() += p.fc_bias.transpose();
    f.hidden = f.hidden.array().tanh().matrix();

    Vector scores = f.hidden * p.attention;
    const double top = scores.maxCoeff();
    f.weights = (scores.array() - top).exp().matrix();
    f.weights /= f.weights.sum();
    f.code.noalias() = f.hidden.transpose() * f.weights;
    return f;
}

double log_softmax_at(const Vector& logits, std::size_t index, Vector* probs) {
    const double top = logits.maxCoeff();
    Vector e = (logits.array() - top).exp().matrix();
    const double total = e.sum();
    if (probs) *probs = e / total;
    return logits(static_cast<Eigen::Index>(index)) - top - std::log(total);
}

void write_vocab(BinaryWriter& out, const Vocab& v) {
    out.u32(v.has_unk() ? 1 : 0);
    // index 0 is implied for UNK
    const std::size_t first = v.has_unk() ? 1 : 0;
    out.u64(v.size() - first);
    for (std::size_t i = first; i < v.size(); ++i) out.str(v.at(i));
}

Vocab read_vocab(BinaryReader& in) {
    std::uint32_t unk = in.u32();
    if (unk > 1) in.corrupt("bad vocabulary flag");
    Vocab v(unk == 1);
    std::uint64_t n = in.u64();
    if (n > in.remaining() / sizeof(std::uint64_t)) in.corrupt("truncated vocabulary");
    for (std::uint64_t i = 0; i < n; ++i) {
        std::string s = in.str();
        if (v.find(s)) in.corrupt("duplicate vocabulary entry");
        v.add(s);
    }
    return v;
}

}  // namespace

Vocab::Vocab(bool with_unk) : with_unk_(with_unk) {
    if (with_unk_) add(kUnknownToken);
}

std::size_t Vocab::add(std::string_view entry) {
    auto [it, inserted] = index_.try_emplace(std::string(entry), entries_.size());
    if (inserted) entries_.emplace_back(entry);
    return it->second;
}

std::optional<std::size_t> Vocab::find(std::string_view entry) const {
    auto it = index_.find(std::string(entry));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::size_t Vocab::lookup(std::string_view entry) const {
    if (auto idx = find(entry)) return *idx;
    if (!with_unk_) throw NotFound("not in vocabulary: " + std::string(entry));
    return 0;
}

EmbedderParams EmbedderParams::initialize(const EmbedderDims& dims, std::size_t n_tokens, std::size_t n_paths,
                                          std::size_t n_names, std::uint64_t seed) {
    if (dims.token_dim == 0 || dims.path_dim == 0 || dims.code_dim == 0) {
        throw ConfigError("embedder dimensions must be positive");
    }
    std::mt19937_64 rng(seed);
    const auto td = static_cast<Eigen::Index>(dims.token_dim);
    const auto pd = static_cast<Eigen::Index>(dims.path_dim);
    const auto d = static_cast<Eigen::Index>(dims.code_dim);
    EmbedderParams p;
    p.dims = dims;
    p.token_embeddings = uniform_matrix(static_cast<Eigen::Index>(n_tokens), td, static_cast<double>(td), rng);
    p.path_embeddings = uniform_matrix(static_cast<Eigen::Index>(n_paths), pd, static_cast<double>(pd), rng);
    p.fc = uniform_matrix(d, 2 * td + pd, static_cast<double>(dims.context_dim()), rng);
    p.fc_bias = Vector::Zero(d);
    p.attention = uniform_matrix(d, 1, static_cast<double>(d), rng).col(0);
    p.output = uniform_matrix(d, static_cast<Eigen::Index>(n_names), static_cast<double>(d), rng);
    return p;
}

bool EmbedderParams::all_finite() const {
    return token_embeddings.allFinite() && path_embeddings.allFinite() && fc.allFinite() &&
           fc_bias.allFinite() && attention.allFinite() && output.allFinite();
}

void EmbedderParams::check_shapes() const {
    const auto td = static_cast<Eigen::Index>(dims.token_dim);
    const auto pd = static_cast<Eigen::Index>(dims.path_dim);
    const auto d = static_cast<Eigen::Index>(dims.code_dim);
    if (token_embeddings.cols() != td || path_embeddings.cols() != pd || fc.rows() != d ||
        fc.cols() != 2 * td + pd || fc_bias.size() != d || attention.size() != d || output.rows() != d) {
        throw DimMismatch("embedder parameter shapes do not match their dimensions");
    }
}

bool identical(const EmbedderParams& a, const EmbedderParams& b) {
    return a.dims == b.dims && same_matrix(a.token_embeddings, b.token_embeddings) &&
           same_matrix(a.path_embeddings, b.path_embeddings) && same_matrix(a.fc, b.fc) &&
           same_vector(a.fc_bias, b.fc_bias) && same_vector(a.attention, b.attention) &&
           same_matrix(a.output, b.output);
}

std::vector<EncodedContext> encode_bag(const ContextBag& bag, const Vocabularies& vocab) {
    std::vector<EncodedContext> out;
    out.reserve(bag.contexts.size());
    for (const auto& ctx : bag.contexts) {
        out.push_back({static_cast<std::uint32_t>(vocab.tokens.lookup(ctx.start)),
                       static_cast<std::uint32_t>(vocab.paths.lookup(path_to_string(ctx.path))),
                       static_cast<std::uint32_t>(vocab.tokens.lookup(ctx.end))});
    }
    return out;
}

AttentionResult attend(std::span<const EncodedContext> contexts, const EmbedderParams& params) {
    Forward f = forward(contexts, params);
    return {std::move(f.code), std::move(f.weights)};
}

CodeVector embed_bag(const ContextBag& bag, const EmbeddingModel& model) {
    if (bag.contexts.empty()) throw EmptyBag("empty context bag for " + bag.method_id);
    auto encoded = encode_bag(bag, model.vocab);
    return {attend(encoded, model.params).code, bag.method_id};
}

double name_loss(std::span<const EncodedContext> contexts, std::size_t name, const EmbedderParams& params,
                 ParamGradients* grad) {
    Forward f = forward(contexts, params);
    Vector logits = params.output.transpose() * f.code;
    Vector probs;
    const double loss = -log_softmax_at(logits, name, grad ? &probs : nullptr);
    if (!grad) return loss;

    Vector dlogits = probs;
    dlogits(static_cast<Eigen::Index>(name)) -= 1.0;
    grad->output.noalias() = f.code * dlogits.transpose();
    Vector dcode = params.output * dlogits;

    Vector dweights = f.hidden * dcode;
    const double mean = f.weights.dot(dweights);
    Vector dscores = f.weights.array() * (dweights.array() - mean);

    Matrix dhidden = f.weights * dcode.transpose();
    dhidden.noalias() += dscores * params.attention.transpose();
    grad->attention.noalias() = f.hidden.transpose() * dscores;

    Matrix dz = dhidden.array() * (1.0 - f.hidden.array().square());
    grad->fc.noalias() = dz.transpose() * f.contexts;
    grad->fc_bias = dz.colwise().sum().transpose();
    Matrix dctx = dz * params.fc;

    const auto td = static_cast<Eigen::Index>(params.dims.token_dim);
    const auto pd = static_cast<Eigen::Index>(params.dims.path_dim);
    grad->token_rows.clear();
    grad->path_rows.clear();
    for (std::size_t i = 0; i < contexts.size(); ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        grad->token_rows.emplace_back(contexts[i].start, dctx.row(r).segment(0, td).transpose());
        grad->path_rows.emplace_back(contexts[i].path, dctx.row(r).segment(td, pd).transpose());
        grad->token_rows.emplace_back(contexts[i].end, dctx.row(r).segment(td + pd, td).transpose());
    }
    return loss;
}

std::size_t predict_name(std::span<const EncodedContext> contexts, const EmbedderParams& params) {
    Forward f = forward(contexts, params);
    Vector logits = params.output.transpose() * f.code;
    Eigen::Index best = 0;
    logits.maxCoeff(&best);
    return static_cast<std::size_t>(best);
}

Vocabularies build_vocabularies(std::span<const NamedBag> corpus, std::size_t min_count) {
    std::map<std::string, std::size_t> token_counts;
    std::map<std::string, std::size_t> path_counts;
    std::vector<std::string> names;
    for (const auto& item : corpus) {
        if (item.bag.contexts.empty()) continue;
        names.push_back(item.name);
        for (const auto& ctx : item.bag.contexts) {
            ++token_counts[ctx.start];
            ++token_counts[ctx.end];
            ++path_counts[path_to_string(ctx.path)];
        }
    }
    Vocabularies v;
    for (const auto& [tok, n] : token_counts) {
        if (n >= min_count) v.tokens.add(tok);
    }
    for (const auto& [path, n] : path_counts) {
        if (n >= min_count) v.paths.add(path);
    }
    std::sort(names.begin(), names.end());
    for (const auto& name : names) v.names.add(name);
    return v;
}

namespace {

// Adam moment buffers for one dense tensor.
template <class T>
struct AdamSlot {
    T m;
    T v;

    explicit AdamSlot(const T& like) : m(T::Zero(like.rows(), like.cols())), v(T::Zero(like.rows(), like.cols())) {}

    void step(T& param, const T& grad, double lr, double bc1, double bc2) {
        constexpr double b1 = 0.9;
        constexpr double b2 = 0.999;
        constexpr double eps = 1e-8;
        m = b1 * m + (1.0 - b1) * grad;
        v = b2 * v + (1.0 - b2) * grad.cwiseProduct(grad);
        param.array() -= lr * (m.array() / bc1) / ((v.array() / bc2).sqrt() + eps);
    }
};

struct Example {
    std::vector<EncodedContext> contexts;
    std::size_t name;
};

double mean_loss(const std::vector<Example>& data, const EmbedderParams& params) {
    double total = 0.0;
    for (const auto& ex : data) total += name_loss(ex.contexts, ex.name, params);
    return total / static_cast<double>(data.size());
}

}  // namespace

TrainResult train_embedder(std::span<const NamedBag> corpus, const TrainConfig& config) {
    if (config.batch_size == 0) throw ConfigError("batch size must be positive");
    TrainResult result;
    result.vocab = build_vocabularies(corpus, config.min_count);
    if (result.vocab.names.size() < 2) {
        throw VocabTooSmall("name vocabulary has " + std::to_string(result.vocab.names.size()) +
                            " entries; at least 2 distinct method names are required");
    }

    std::vector<Example> data;
    for (const auto& item : corpus) {
        if (item.bag.contexts.empty()) continue;
        data.push_back({encode_bag(item.bag, result.vocab), result.vocab.names.lookup(item.name)});
    }

    result.params = EmbedderParams::initialize(config.dims, result.vocab.tokens.size(), result.vocab.paths.size(),
                                               result.vocab.names.size(), config.seed);
    EmbedderParams& p = result.params;

    AdamSlot<Matrix> tok_slot(p.token_embeddings), path_slot(p.path_embeddings), fc_slot(p.fc),
        out_slot(p.output);
    AdamSlot<Vector> bias_slot(p.fc_bias), att_slot(p.attention);

    Matrix g_tok, g_path, g_fc, g_out;
    Vector g_bias, g_att;
    ParamGradients grad;

    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(config.seed ^ 0x9e3779b97f4a7c15ULL);

    result.loss_history.push_back(mean_loss(data, p));
    std::size_t step = 0;
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size) {
            const std::size_t end = std::min(order.size(), begin + config.batch_size);
            const double scale = 1.0 / static_cast<double>(end - begin);
            g_tok.setZero(p.token_embeddings.rows(), p.token_embeddings.cols());
            g_path.setZero(p.path_embeddings.rows(), p.path_embeddings.cols());
            g_fc.setZero(p.fc.rows(), p.fc.cols());
            g_out.setZero(p.output.rows(), p.output.cols());
            g_bias.setZero(p.fc_bias.size());
            g_att.setZero(p.attention.size());
            for (std::size_t k = begin; k < end; ++k) {
                const Example& ex = data[order[k]];
                name_loss(ex.contexts, ex.name, p, &grad);
                g_fc += scale * grad.fc;
                g_out += scale * grad.output;
                g_bias += scale * grad.fc_bias;
                g_att += scale * grad.attention;
                for (const auto& [row, g] : grad.token_rows) g_tok.row(row) += scale * g.transpose();
                for (const auto& [row, g] : grad.path_rows) g_path.row(row) += scale * g.transpose();
            }
            ++step;
            const double bc1 = 1.0 - std::pow(0.9, static_cast<double>(step));
            const double bc2 = 1.0 - std::pow(0.999, static_cast<double>(step));
            const double lr = config.learning_rate;
            tok_slot.step(p.token_embeddings, g_tok, lr, bc1, bc2);
            path_slot.step(p.path_embeddings, g_path, lr, bc1, bc2);
            fc_slot.step(p.fc, g_fc, lr, bc1, bc2);
            out_slot.step(p.output, g_out, lr, bc1, bc2);
            bias_slot.step(p.fc_bias, g_bias, lr, bc1, bc2);
            att_slot.step(p.attention, g_att, lr, bc1, bc2);
        }
        result.loss_history.push_back(mean_loss(data, p));
    }

    std::size_t correct = 0;
    for (const auto& ex : data) correct += predict_name(ex.contexts, p) == ex.name ? 1 : 0;
    result.training_accuracy = static_cast<double>(correct) / static_cast<double>(data.size());
    return result;
}

void write_embedding_model(BinaryWriter& out, const EmbeddingModel& model) {
    out.u64(model.limits.max_length);
    out.u64(model.limits.max_width);
    out.u64(model.limits.max_contexts);
    out.u64(model.limits.seed);
    write_vocab(out, model.vocab.tokens);
    write_vocab(out, model.vocab.paths);
    write_vocab(out, model.vocab.names);
    const EmbedderParams& p = model.params;
    out.u64(p.dims.token_dim);
    out.u64(p.dims.path_dim);
    out.u64(p.dims.code_dim);
    out.mat(p.token_embeddings);
    out.mat(p.path_embeddings);
    out.mat(p.fc);
    out.vec(p.fc_bias);
    out.vec(p.attention);
    out.mat(p.output);
}

EmbeddingModel read_embedding_model(BinaryReader& in) {
    EmbeddingModel model;
    model.limits.max_length = in.u64();
    model.limits.max_width = in.u64();
    model.limits.max_contexts = in.u64();
    model.limits.seed = in.u64();
    model.vocab.tokens = read_vocab(in);
    model.vocab.paths = read_vocab(in);
    model.vocab.names = read_vocab(in);
    EmbedderParams& p = model.params;
    p.dims.token_dim = in.u64();
    p.dims.path_dim = in.u64();
    p.dims.code_dim = in.u64();
    p.token_embeddings = in.mat();
    p.path_embeddings = in.mat();
    p.fc = in.mat();
    p.fc_bias = in.vec();
    p.attention = in.vec();
    p.output = in.mat();
    try {
        p.check_shapes();
    } catch (const DimMismatch& e) {
        in.corrupt(e.what());
    }
    if (static_cast<std::size_t>(p.token_embeddings.rows()) != model.vocab.tokens.size() ||
        static_cast<std::size_t>(p.path_embeddings.rows()) != model.vocab.paths.size() ||
        static_cast<std::size_t>(p.output.cols()) != model.vocab.names.size()) {
        in.corrupt("vocabulary sizes do not match embedding tables");
    }
    return model;
}

void save_model(const EmbeddingModel& model, const std::filesystem::path& path) {
    BinaryWriter w;
    std::string bytes(kEmbedderMagic);
    w.u32(kEmbedderVersion);
    write_embedding_model(w, model);
    bytes += w.bytes();
    write_file(path, bytes);
}

EmbeddingModel load_model(const std::filesystem::path& path) {
    std::string bytes = read_file(path);
    BinaryReader in(bytes, path.string());
    in.expect_magic(kEmbedderMagic, kEmbedderVersion);
    EmbeddingModel model = read_embedding_model(in);
    if (!in.at_end()) in.corrupt("trailing bytes");
    return model;
}

}  // namespace moverec
