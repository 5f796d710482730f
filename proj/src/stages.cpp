#include "moverec/stages.hpp"

#include <ostream>

#include "moverec/artifacts.hpp"
#include "moverec/kernels.hpp"

namespace moverec {

namespace {

using nlohmann::json;

const std::filesystem::path& require_path(const std::filesystem::path& p, const char* key) {
    if (p.empty()) throw ConfigError(std::string(key) + " is not set");
    return p;
}

Corpus load_train_corpus(const RunConfig& config) {
    return load_corpus(require_path(config.train_corpus, "train_corpus"));
}

std::vector<const MethodDecl*> all_methods(const Corpus& corpus) {
    std::vector<const MethodDecl*> out;
    for (const auto& u : corpus.units) {
        for (const auto& c : u.classes) {
            for (const auto& m : c.methods) out.push_back(&m);
        }
    }
    return out;
}

Matrix stack(const std::vector<const FeatureVector*>& rows) {
    if (rows.empty()) return Matrix();
    Matrix m(static_cast<Eigen::Index>(rows.size()), rows.front()->values.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i]->values.size() != m.cols()) throw DimMismatch("dataset rows differ in length");
        m.row(static_cast<Eigen::Index>(i)) = rows[i]->values.transpose();
    }
    return m;
}

double accuracy(const ModelBundle& b, const Matrix& x, std::span<const int> labels) {
    if (x.rows() == 0) return 0.0;
    std::size_t hits = 0;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        const int predicted = predict_proba(b.svm, b.platt, x.row(i).transpose()) > 0.5 ? 1 : 0;
        if (predicted == labels[static_cast<std::size_t>(i)]) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(x.rows());
}

}  // namespace

std::string method_name_of(std::string_view method_id) {
    const std::size_t colon = method_id.rfind(':');
    const std::size_t slash = method_id.rfind('/');
    const std::size_t dot = method_id.find('.', colon == std::string_view::npos ? 0 : colon);
    if (dot == std::string_view::npos || slash == std::string_view::npos || slash < dot) {
        throw DataError("malformed method id '" + std::string(method_id) + "'");
    }
    return std::string(method_id.substr(dot + 1, slash - dot - 1));
}

void stage_extract(const RunConfig& config, std::ostream& log) {
    const ArtifactPaths paths{config.output_dir};
    const Corpus corpus = load_train_corpus(config);
    const auto methods = all_methods(corpus);
    const auto bags = kernels::extract_all(methods, config.extraction_limits());
    std::size_t contexts = 0;
    for (const auto& b : bags) contexts += b.contexts.size();
    write_contexts(paths.contexts(), bags);
    log << "extract: " << corpus.units.size() << " files, " << bags.size() << " methods, " << contexts
        << " contexts -> " << paths.contexts().string() << "\n";
}

void stage_train_embed(const RunConfig& config, std::ostream& log) {
    const ArtifactPaths paths{config.output_dir};
    std::vector<NamedBag> named;
    for (auto& bag : read_contexts(paths.contexts())) {
        std::string name = method_name_of(bag.method_id);
        named.push_back({std::move(bag), std::move(name)});
    }
    const TrainResult result = train_embedder(named, config.embed_config());
    EmbeddingModel model{config.extraction_limits(), result.vocab, result.params};
    save_model(model, paths.embedder());
    log << "train-embed: " << named.size() << " bags, " << result.vocab.tokens.size() << " tokens, "
        << result.vocab.paths.size() << " paths, " << result.vocab.names.size() << " names; loss "
        << result.loss_history.front() << " -> " << result.loss_history.back() << ", name accuracy "
        << result.training_accuracy << " -> " << paths.embedder().string() << "\n";
}

void stage_build_dataset(const RunConfig& config, std::ostream& log) {
    const ArtifactPaths paths{config.output_dir};
    const EmbeddingModel model = load_model(paths.embedder());
    const Corpus corpus = load_train_corpus(config);
    const MethodVectors vectors = embed_corpus(corpus, model);
    const auto candidates = find_movable(corpus);
    std::vector<std::string> skipped;
    auto examples = build_dataset(corpus, vectors, candidates, &skipped);
    const std::size_t total = examples.size();
    DatasetSplit split = split_dataset(std::move(examples), config.split_seed());

    std::vector<DatasetRecord> records;
    for (auto& e : split.train) records.push_back({std::move(e), Partition::Train});
    for (auto& e : split.test) records.push_back({std::move(e), Partition::Test});
    for (auto& e : split.validate) records.push_back({std::move(e), Partition::Validate});
    write_dataset(paths.dataset(), records);
    log << "build-dataset: " << candidates.size() << " candidates, " << total << " examples ("
        << split.train.size() << "/" << split.test.size() << "/" << split.validate.size() << "), " << skipped.size()
        << " skipped -> " << paths.dataset().string() << "\n";
}

void stage_train_classifier(const RunConfig& config, std::ostream& log) {
    const ArtifactPaths paths{config.output_dir};
    const auto records = read_dataset(paths.dataset());
    ModelBundle bundle;
    bundle.embedder = load_model(paths.embedder());

    std::vector<const FeatureVector*> rows[3];
    std::vector<int> labels[3];
    for (const auto& r : records) {
        const auto k = static_cast<std::size_t>(r.partition);
        rows[k].push_back(&r.example.feature);
        labels[k].push_back(r.example.label);
    }
    constexpr auto kTrain = static_cast<std::size_t>(Partition::Train);
    constexpr auto kTest = static_cast<std::size_t>(Partition::Test);
    constexpr auto kValidate = static_cast<std::size_t>(Partition::Validate);
    if (rows[kTrain].empty() || rows[kValidate].empty()) throw TooFew("dataset lacks train or validation rows");

    const Matrix train_raw = stack(rows[kTrain]);
    if (static_cast<std::size_t>(train_raw.cols()) != 2 * bundle.embedder.params.dims.code_dim) {
        throw DimMismatch("dataset features do not match the embedder; rebuild the dataset");
    }
    bundle.pca = fit_pca(train_raw, config.pca);
    auto reduce = [&](const Matrix& raw) {
        if (raw.rows() == 0) return Matrix(0, static_cast<Eigen::Index>(bundle.pca.output_dim()));
        Matrix centered = raw.rowwise() - bundle.pca.mean.transpose();
        return Matrix(centered * bundle.pca.components.transpose());
    };
    const Matrix train = reduce(train_raw);
    const Matrix validate = reduce(stack(rows[kValidate]));
    const Matrix test = reduce(stack(rows[kTest]));

    bundle.svm = train_svm(train, labels[kTrain], config.svm_hyperparams());
    const PlattFit platt = fit_platt(bundle.svm, validate, labels[kValidate], config.platt_max_iterations);
    bundle.platt = platt.params;
    save_bundle(bundle, paths.bundle());

    json report = {{"pca_components", bundle.pca.output_dim()},
                   {"explained_variance", bundle.pca.explained_variance_ratio.sum()},
                   {"svm_objective", bundle.svm.objective_history.back()},
                   {"platt", {{"a", platt.params.a}, {"b", platt.params.b}, {"converged", platt.converged},
                              {"iterations", platt.iterations}}},
                   {"train_accuracy", accuracy(bundle, train, labels[kTrain])},
                   {"validate_accuracy", accuracy(bundle, validate, labels[kValidate])},
                   {"test_accuracy", accuracy(bundle, test, labels[kTest])}};
    write_file(paths.classifier_report(), report.dump(2) + "\n");
    log << "train-clf: k=" << bundle.pca.output_dim() << ", test accuracy " << report["test_accuracy"].get<double>()
        << ", Platt " << (platt.converged ? "converged" : "did not converge") << " -> " << paths.bundle().string()
        << "\n";
}

void stage_inject(const RunConfig& config, std::ostream& log) {
    const ArtifactPaths paths{config.output_dir};
    const Corpus corpus = load_corpus(require_path(config.eval_corpus, "eval_corpus"));
    const Injection injection = inject_moves(corpus, config.moves_per_project, config.injection_seed());
    std::filesystem::remove_all(paths.injected());
    write_corpus(injection.corpus, paths.injected());
    write_ground_truth(paths.ground_truth(), injection.ground_truth);
    log << "inject: " << injection.ground_truth.size() << " moves in " << corpus.projects().size()
        << " projects -> " << paths.injected().string() << "\n";
}

void stage_recommend(const RunConfig& config, std::ostream& log) {
    const ArtifactPaths paths{config.output_dir};
    const ModelBundle bundle = load_bundle(paths.bundle());
    const Corpus corpus = load_corpus(paths.injected());
    const RecommendationRun run = recommend_all(corpus, bundle, config.threshold);
    write_recommendations(paths.recommendations(), run.recommendations);
    std::size_t moves = 0;
    for (const auto& r : run.recommendations) moves += r.decision == Decision::Move;
    log << "recommend: " << run.recommendations.size() << " candidates, " << moves << " moves, "
        << run.skipped.size() << " skipped -> " << paths.recommendations().string() << "\n";
}

EvalReport stage_evaluate(const RunConfig& config, std::ostream& log) {
    const ArtifactPaths paths{config.output_dir};
    const auto recs = read_recommendations(paths.recommendations());
    const auto truth = read_ground_truth(paths.ground_truth());
    EvalReport report = evaluate(recs, truth);
    write_report(paths.report(), report);
    log << format_summary(report);
    log << "evaluate: -> " << paths.report().string() << "\n";
    return report;
}

EvalReport run_pipeline(const RunConfig& config, std::ostream& log) {
    stage_extract(config, log);
    stage_train_embed(config, log);
    stage_build_dataset(config, log);
    stage_train_classifier(config, log);
    stage_inject(config, log);
    stage_recommend(config, log);
    return stage_evaluate(config, log);
}

}  // namespace moverec
