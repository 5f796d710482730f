// Parallel kernels against their serial references.

#include <random>

#include <benchmark/benchmark.h>

#include "moverec/kernels.hpp"
#include "moverec/synth.hpp"

using namespace moverec;

namespace {

Matrix gaussian(Eigen::Index n, Eigen::Index d, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    Matrix m(n, d);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = g(rng);
    return m;
}

struct MethodSet {
    Corpus corpus;
    std::vector<const MethodDecl*> methods;
};

const MethodSet& methods() {
    static const MethodSet s = [] {
        SynthOptions o;
        o.projects = 10;
        MethodSet out{generate_corpus(o), {}};
        for (const auto& u : out.corpus.units)
            for (const auto& c : u.classes)
                for (const auto& m : c.methods) out.methods.push_back(&m);
        return out;
    }();
    return s;
}

struct EmbedInput {
    std::vector<ContextBag> bags;
    EmbeddingModel model;
};

const EmbedInput& embed_input() {
    static const EmbedInput s = [] {
        EmbedInput out;
        out.bags = kernels::extract_all_serial(methods().methods, ExtractionLimits{});
        std::vector<NamedBag> named;
        for (const auto& b : out.bags) named.push_back({b, "m"});
        named.push_back({out.bags.front(), "n"});
        out.model.vocab = build_vocabularies(named, 2);
        out.model.params = EmbedderParams::initialize(EmbedderDims{}, out.model.vocab.tokens.size(),
                                                      out.model.vocab.paths.size(), out.model.vocab.names.size(), 1);
        return out;
    }();
    return s;
}

void BM_covariance(benchmark::State& state) {
    const Matrix x = gaussian(2000, state.range(0), 1);
    const Vector mean = x.colwise().mean().transpose();
    for (auto _ : state) benchmark::DoNotOptimize(kernels::covariance(x, mean));
}

void BM_covariance_serial(benchmark::State& state) {
    const Matrix x = gaussian(2000, state.range(0), 1);
    const Vector mean = x.colwise().mean().transpose();
    for (auto _ : state) benchmark::DoNotOptimize(kernels::covariance_serial(x, mean));
}

void BM_extract(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(kernels::extract_all(methods().methods, ExtractionLimits{}));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(methods().methods.size()));
}

void BM_extract_serial(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(kernels::extract_all_serial(methods().methods, ExtractionLimits{}));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(methods().methods.size()));
}

void BM_embed(benchmark::State& state) {
    const auto& in = embed_input();
    for (auto _ : state) benchmark::DoNotOptimize(kernels::embed_all(in.bags, in.model));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(in.bags.size()));
}

void BM_embed_serial(benchmark::State& state) {
    const auto& in = embed_input();
    for (auto _ : state) benchmark::DoNotOptimize(kernels::embed_all_serial(in.bags, in.model));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(in.bags.size()));
}

void BM_decisions(benchmark::State& state) {
    const Matrix x = gaussian(state.range(0), 64, 2);
    const Vector w = Vector::LinSpaced(64, -1.0, 1.0);
    for (auto _ : state) benchmark::DoNotOptimize(kernels::decision_values(x, w, 0.5));
}

void BM_decisions_serial(benchmark::State& state) {
    const Matrix x = gaussian(state.range(0), 64, 2);
    const Vector w = Vector::LinSpaced(64, -1.0, 1.0);
    for (auto _ : state) benchmark::DoNotOptimize(kernels::decision_values_serial(x, w, 0.5));
}

}  // namespace

BENCHMARK(BM_covariance)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_covariance_serial)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_extract)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_extract_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_embed)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_embed_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_decisions)->Arg(100000)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_decisions_serial)->Arg(100000)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
