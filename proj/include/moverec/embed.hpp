#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "moverec/binary_io.hpp"
#include "moverec/linalg.hpp"
#include "moverec/pathctx.hpp"

namespace moverec {

class EmptyBag : public DataError {
public:
    using DataError::DataError;
};

class VocabTooSmall : public DataError {
public:
    using DataError::DataError;
};

inline constexpr std::string_view kUnknownToken = "<UNK>";

// Dense string -> index table. When `with_unk` is set, index 0 is reserved
// for out-of-vocabulary lookups.
class Vocab {
public:
    explicit Vocab(bool with_unk = true);

    std::size_t add(std::string_view entry);
    std::optional<std::size_t> find(std::string_view entry) const;
    std::size_t lookup(std::string_view entry) const;

    std::size_t size() const noexcept { return entries_.size(); }
    bool has_unk() const noexcept { return with_unk_; }
    const std::string& at(std::size_t i) const { return entries_.at(i); }
    const std::vector<std::string>& entries() const noexcept { return entries_; }

    friend bool operator==(const Vocab& a, const Vocab& b) {
        return a.with_unk_ == b.with_unk_ && a.entries_ == b.entries_;
    }

private:
    std::vector<std::string> entries_;
    std::unordered_map<std::string, std::size_t> index_;
    bool with_unk_;
};

struct Vocabularies {
    Vocab tokens{true};
    Vocab paths{true};
    Vocab names{false};

    friend bool operator==(const Vocabularies&, const Vocabularies&) = default;
};

struct EmbedderDims {
    std::size_t token_dim = 128;
    std::size_t path_dim = 128;
    std::size_t code_dim = 384;

    std::size_t context_dim() const noexcept { return 2 * token_dim + path_dim; }
    friend bool operator==(const EmbedderDims&, const EmbedderDims&) = default;
};

struct EmbedderParams {
    EmbedderDims dims;
    Matrix token_embeddings;  // |tokens| x token_dim
    Matrix path_embeddings;   // |paths| x path_dim
    Matrix fc;                // code_dim x context_dim
    Vector fc_bias;           // code_dim
    Vector attention;         // code_dim
    Matrix output;            // code_dim x |names|, name prediction only

    // Uniform in +-sqrt(3 / fan_in) per matrix; bias starts at zero.
    static EmbedderParams initialize(const EmbedderDims& dims, std::size_t n_tokens, std::size_t n_paths,
                                     std::size_t n_names, std::uint64_t seed);

    bool all_finite() const;
    void check_shapes() const;
};

// Bit-exact comparison of every parameter.
bool identical(const EmbedderParams& a, const EmbedderParams& b);

struct EncodedContext {
    std::uint32_t start = 0;
    std::uint32_t path = 0;
    std::uint32_t end = 0;
};

std::vector<EncodedContext> encode_bag(const ContextBag& bag, const Vocabularies& vocab);

struct AttentionResult {
    Vector code;
    Vector weights;
};

// Attention-pooled code vector of a non-empty bag:
//   h_i = tanh(fc * [tok(start); path; tok(end)] + bias)
//   alpha = softmax_i(<attention, h_i>)
//   code = sum_i alpha_i h_i
AttentionResult attend(std::span<const EncodedContext> contexts, const EmbedderParams& params);

struct EmbeddingModel {
    ExtractionLimits limits;
    Vocabularies vocab;
    EmbedderParams params;
};

struct CodeVector {
    Vector values;
    std::string source;
};

// Throws EmptyBag when the bag has no contexts.
CodeVector embed_bag(const ContextBag& bag, const EmbeddingModel& model);

// Gradients of the name-prediction loss. Embedding-row gradients are sparse
// (row, gradient) pairs; a row may appear more than once.
struct ParamGradients {
    Matrix fc;
    Vector fc_bias;
    Vector attention;
    Matrix output;
    std::vector<std::pair<std::uint32_t, Vector>> token_rows;
    std::vector<std::pair<std::uint32_t, Vector>> path_rows;
};

// Cross-entropy of softmax(output^T code) against `name`. Fills `grad` when
// non-null (it is overwritten, not accumulated).
double name_loss(std::span<const EncodedContext> contexts, std::size_t name, const EmbedderParams& params,
                 ParamGradients* grad = nullptr);

std::size_t predict_name(std::span<const EncodedContext> contexts, const EmbedderParams& params);

struct NamedBag {
    ContextBag bag;
    std::string name;
};

struct TrainConfig {
    EmbedderDims dims;
    std::size_t epochs = 20;
    std::size_t batch_size = 32;
    double learning_rate = 1e-3;
    std::size_t min_count = 2;
    std::uint64_t seed = 0;
};

struct TrainResult {
    Vocabularies vocab;
    EmbedderParams params;
    // Entry 0 is the mean loss before any update; entry e the mean loss over
    // the training bags after epoch e.
    std::vector<double> loss_history;
    double training_accuracy = 0.0;
};

// Tokens and paths seen fewer than `min_count` times map to UNK.
Vocabularies build_vocabularies(std::span<const NamedBag> corpus, std::size_t min_count);

// Adam on the mean cross-entropy of minibatches. Bags without contexts are
// skipped. Deterministic for a fixed seed.
TrainResult train_embedder(std::span<const NamedBag> corpus, const TrainConfig& config);

void write_embedding_model(BinaryWriter& out, const EmbeddingModel& model);
EmbeddingModel read_embedding_model(BinaryReader& in);

void save_model(const EmbeddingModel& model, const std::filesystem::path& path);
EmbeddingModel load_model(const std::filesystem::path& path);

}  // namespace moverec
