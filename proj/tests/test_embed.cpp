#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>

#include "moverec/embed.hpp"
#include "oracles.hpp"

using namespace moverec;

namespace {

PathContext ctx(std::string start, std::vector<NodeKind> nodes, std::string end) {
    AstPath p{std::move(nodes), 1};
    return {std::move(start), std::move(p), std::move(end)};
}

std::vector<NodeKind> kinds(std::initializer_list<NodeKind> k) { return k; }

// Five names, each with its own vocabulary of tokens and paths plus shared
// noise. Six methods per name.
std::vector<NamedBag> toy_corpus(std::uint64_t seed) {
    using K = NodeKind;
    const std::vector<std::string> names{"get", "put", "sum", "scan", "close"};
    const std::vector<std::vector<NodeKind>> paths{
        kinds({K::Name, K::ReturnStatement, K::Literal}),      kinds({K::Name, K::Assignment, K::Name}),
        kinds({K::Name, K::BinaryExpression, K::Name}),        kinds({K::Name, K::WhileStatement, K::Name}),
        kinds({K::Name, K::MethodCall, K::Name}),
    };
    const std::vector<std::string> noise{"x", "y", "tmp", "i"};
    std::mt19937_64 rng(seed);
    std::vector<NamedBag> out;
    for (std::size_t n = 0; n < names.size(); ++n) {
        for (int m = 0; m < 6; ++m) {
            NamedBag b;
            b.name = names[n];
            b.bag.method_id = "toy/T.java:T." + names[n] + std::to_string(m) + "/0";
            for (int c = 0; c < 4; ++c) {
                b.bag.contexts.push_back(ctx(names[n] + "Field", paths[n], noise[rng() % noise.size()]));
            }
            b.bag.contexts.push_back(ctx(noise[rng() % noise.size()], paths[rng() % paths.size()],
                                         noise[rng() % noise.size()]));
            out.push_back(std::move(b));
        }
    }
    return out;
}

struct MicroModel {
    EmbedderParams params;
    std::vector<EncodedContext> contexts;
};

MicroModel micro_model(std::uint64_t seed) {
    EmbedderDims dims{4, 3, 8};
    MicroModel m{EmbedderParams::initialize(dims, 5, 4, 2, seed), {{1, 2, 3}, {4, 1, 1}, {2, 3, 4}}};
    // Push the weights away from zero so every gradient group is exercised.
    std::mt19937_64 rng(seed + 1);
    std::uniform_real_distribution<double> u(-0.8, 0.8);
    for (auto* mat : {&m.params.token_embeddings, &m.params.path_embeddings, &m.params.fc, &m.params.output}) {
        for (Eigen::Index i = 0; i < mat->size(); ++i) mat->data()[i] = u(rng);
    }
    for (auto* vec : {&m.params.fc_bias, &m.params.attention}) {
        for (Eigen::Index i = 0; i < vec->size(); ++i) (*vec)[i] = u(rng);
    }
    return m;
}

template <class Get>
double finite_difference_error(MicroModel& m, std::size_t name, Eigen::Index size, Get element,
                               const std::vector<double>& analytic) {
    const double h = 1e-6;
    double diff = 0.0;
    double norm = 0.0;
    for (Eigen::Index i = 0; i < size; ++i) {
        double& x = element(i);
        const double saved = x;
        x = saved + h;
        const double up = name_loss(m.contexts, name, m.params);
        x = saved - h;
        const double down = name_loss(m.contexts, name, m.params);
        x = saved;
        const double numeric = (up - down) / (2.0 * h);
        diff += (numeric - analytic[static_cast<std::size_t>(i)]) * (numeric - analytic[static_cast<std::size_t>(i)]);
        norm += numeric * numeric + analytic[static_cast<std::size_t>(i)] * analytic[static_cast<std::size_t>(i)];
    }
    return std::sqrt(diff) / std::max(std::sqrt(norm), 1e-12);
}

std::vector<double> flat(const Eigen::Ref<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>& m) {
    return std::vector<double>(m.data(), m.data() + m.size());
}

std::vector<double> densify(const std::vector<std::pair<std::uint32_t, Vector>>& rows, const Matrix& shape) {
    Matrix dense = Matrix::Zero(shape.rows(), shape.cols());
    for (const auto& [r, g] : rows) dense.row(r) += g.transpose();
    return flat(dense);
}

double cosine(const Vector& a, const Vector& b) { return a.dot(b) / (a.norm() * b.norm()); }

}  // namespace

TEST_CASE("analytic gradients match central differences") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        for (std::size_t name : {0u, 1u}) {
            MicroModel m = micro_model(seed);
            ParamGradients g;
            name_loss(m.contexts, name, m.params, &g);
            CAPTURE(seed);
            CAPTURE(name);
            auto& p = m.params;
            CHECK(finite_difference_error(m, name, p.fc.size(), [&](auto i) -> double& { return p.fc.data()[i]; },
                                          flat(g.fc)) < 1e-4);
            CHECK(finite_difference_error(m, name, p.fc_bias.size(), [&](auto i) -> double& { return p.fc_bias[i]; },
                                          std::vector<double>(g.fc_bias.data(), g.fc_bias.data() + g.fc_bias.size())) <
                  1e-4);
            CHECK(finite_difference_error(m, name, p.attention.size(),
                                          [&](auto i) -> double& { return p.attention[i]; },
                                          std::vector<double>(g.attention.data(),
                                                              g.attention.data() + g.attention.size())) < 1e-4);
            CHECK(finite_difference_error(m, name, p.output.size(),
                                          [&](auto i) -> double& { return p.output.data()[i]; }, flat(g.output)) <
                  1e-4);
            CHECK(finite_difference_error(m, name, p.token_embeddings.size(),
                                          [&](auto i) -> double& { return p.token_embeddings.data()[i]; },
                                          densify(g.token_rows, p.token_embeddings)) < 1e-4);
            CHECK(finite_difference_error(m, name, p.path_embeddings.size(),
                                          [&](auto i) -> double& { return p.path_embeddings.data()[i]; },
                                          densify(g.path_rows, p.path_embeddings)) < 1e-4);
        }
    }
}

TEST_CASE("attention pooling") {
    MicroModel m = micro_model(11);
    std::vector<EncodedContext> five{{1, 2, 3}, {4, 1, 1}, {2, 3, 4}, {0, 0, 1}, {3, 3, 3}};
    AttentionResult r = attend(five, m.params);

    SUBCASE("weights are a distribution and the code has length d") {
        CHECK(r.weights.minCoeff() >= 0.0);
        CHECK(std::abs(r.weights.sum() - 1.0) < 1e-6);
        CHECK(r.code.size() == 8);
    }

    SUBCASE("matches a straight-line recomputation") {
        const auto& p = m.params;
        std::vector<oracle::NaiveContext> naive;
        auto row = [](const Matrix& mat, std::uint32_t i) {
            return std::vector<double>(mat.row(i).data(), mat.row(i).data() + mat.cols());
        };
        for (const auto& c : five) {
            naive.push_back({row(p.token_embeddings, c.start), row(p.path_embeddings, c.path), row(p.token_embeddings, c.end)});
        }
        std::vector<std::vector<double>> fc;
        for (Eigen::Index i = 0; i < p.fc.rows(); ++i) fc.push_back(row(p.fc, static_cast<std::uint32_t>(i)));
        const auto expected = oracle::naive_code_vector(
            naive, fc, std::vector<double>(p.fc_bias.data(), p.fc_bias.data() + p.fc_bias.size()),
            std::vector<double>(p.attention.data(), p.attention.data() + p.attention.size()));
        for (std::size_t i = 0; i < expected.size(); ++i) CHECK(std::abs(r.code[static_cast<Eigen::Index>(i)] - expected[i]) < 1e-10);
    }

    SUBCASE("a bag is unordered") {
        std::mt19937_64 rng(4);
        for (int k = 0; k < 20; ++k) {
            auto shuffled = five;
            std::shuffle(shuffled.begin(), shuffled.end(), rng);
            CHECK((attend(shuffled, m.params).code - r.code).cwiseAbs().maxCoeff() <= 1e-12);
        }
    }

    SUBCASE("singleton and duplicates") {
        std::vector<EncodedContext> one{five[2]};
        AttentionResult single = attend(one, m.params);
        CHECK(single.weights[0] == 1.0);
        Vector x(11);
        x << m.params.token_embeddings.row(2).transpose(), m.params.path_embeddings.row(3).transpose(),
            m.params.token_embeddings.row(4).transpose();
        const Vector h = (m.params.fc * x + m.params.fc_bias).array().tanh().matrix();
        CHECK((single.code - h).cwiseAbs().maxCoeff() < 1e-15);
        std::vector<EncodedContext> two{five[2], five[2]};
        CHECK((attend(two, m.params).code - single.code).cwiseAbs().maxCoeff() < 1e-15);
    }
}

TEST_CASE("default dimensions give a 384-long code vector") {
    TrainConfig cfg;
    cfg.epochs = 1;
    cfg.min_count = 1;
    const auto corpus = toy_corpus(1);
    TrainResult t = train_embedder(corpus, cfg);
    EmbeddingModel model{ExtractionLimits{}, t.vocab, t.params};
    CHECK(embed_bag(corpus[0].bag, model).values.size() == 384);
    CHECK(t.params.all_finite());
}

TEST_CASE("unseen tokens and paths fall back to UNK") {
    TrainConfig cfg;
    cfg.dims = {8, 8, 16};
    cfg.epochs = 1;
    const auto corpus = toy_corpus(1);
    TrainResult t = train_embedder(corpus, cfg);
    EmbeddingModel model{ExtractionLimits{}, t.vocab, t.params};
    ContextBag odd;
    odd.contexts.push_back(ctx("never", kinds({NodeKind::Type, NodeKind::Block, NodeKind::Type}), "seen"));
    auto enc = encode_bag(odd, t.vocab);
    CHECK(enc[0].start == 0);
    CHECK(enc[0].path == 0);
    CHECK(embed_bag(odd, model).values.allFinite());
    CHECK_THROWS_AS(embed_bag(ContextBag{}, model), EmptyBag);
}

TEST_CASE("training lowers the loss and separates a toy corpus") {
    TrainConfig cfg;
    cfg.dims = {16, 16, 32};
    cfg.epochs = 50;
    cfg.batch_size = 8;
    cfg.learning_rate = 1e-2;
    cfg.seed = 3;
    const auto corpus = toy_corpus(2);
    REQUIRE(corpus.size() == 30);
    TrainResult t = train_embedder(corpus, cfg);
    REQUIRE(t.loss_history.size() == 51);
    CHECK(t.loss_history.back() < t.loss_history.front());
    CHECK(t.vocab.names.size() == 5);

    SUBCASE("one distinctive path per name is learned exactly") {
        CHECK(t.training_accuracy == 1.0);
    }

    SUBCASE("same-name methods are closer than random pairs") {
        EmbeddingModel model{ExtractionLimits{}, t.vocab, t.params};
        std::vector<Vector> v;
        for (const auto& b : corpus) v.push_back(embed_bag(b.bag, model).values);
        double same = 0.0, all = 0.0;
        std::size_t n_same = 0, n_all = 0;
        for (std::size_t i = 0; i < v.size(); ++i) {
            for (std::size_t j = i + 1; j < v.size(); ++j) {
                const double c = cosine(v[i], v[j]);
                all += c;
                ++n_all;
                if (corpus[i].name == corpus[j].name) {
                    same += c;
                    ++n_same;
                }
            }
        }
        CHECK(same / n_same > all / n_all);
    }

    SUBCASE("training is deterministic") {
        TrainResult again = train_embedder(corpus, cfg);
        CHECK(identical(again.params, t.params));
        CHECK(again.loss_history == t.loss_history);
    }
}

TEST_CASE("a single name is rejected") {
    auto corpus = toy_corpus(1);
    for (auto& b : corpus) b.name = "get";
    CHECK_THROWS_AS(train_embedder(corpus, TrainConfig{}), VocabTooSmall);
}

TEST_CASE("model files") {
    TrainConfig cfg;
    cfg.dims = {8, 8, 16};
    cfg.epochs = 2;
    const auto corpus = toy_corpus(5);
    TrainResult t = train_embedder(corpus, cfg);
    EmbeddingModel model{ExtractionLimits{6, 3, 50, 9}, t.vocab, t.params};
    const auto dir = std::filesystem::temp_directory_path() / "moverec_test_embed";
    std::filesystem::create_directories(dir);
    const auto path = dir / "embedder.bin";
    save_model(model, path);

    SUBCASE("round trip is bit-exact") {
        EmbeddingModel back = load_model(path);
        CHECK(identical(back.params, model.params));
        CHECK(back.vocab == model.vocab);
        CHECK(back.limits.max_length == 6);
        CHECK(back.limits.seed == 9);
        const Vector a = embed_bag(corpus[3].bag, model).values;
        const Vector b = embed_bag(corpus[3].bag, back).values;
        CHECK(std::memcmp(a.data(), b.data(), sizeof(double) * a.size()) == 0);
    }

    std::string bytes;
    {
        std::ifstream in(path, std::ios::binary);
        bytes.assign(std::istreambuf_iterator<char>(in), {});
    }
    auto rewrite = [&](const std::string& b) {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        out << b;
    };

    SUBCASE("truncated file") {
        rewrite(bytes.substr(0, bytes.size() / 2));
        CHECK_THROWS_AS(load_model(path), CorruptFile);
    }

    SUBCASE("future version") {
        std::string b = bytes;
        b[std::string_view("MOVEREC-EMBEDDER").size()] = 2;
        rewrite(b);
        CHECK_THROWS_AS(load_model(path), VersionMismatch);
    }

    SUBCASE("missing file") {
        CHECK_THROWS_AS(load_model(dir / "absent.bin"), MissingArtifact);
    }
    std::filesystem::remove_all(dir);
}
