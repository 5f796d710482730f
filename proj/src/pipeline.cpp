#include "moverec/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <map>

#include "moverec/kernels.hpp"

namespace moverec {

std::string serialize_bundle(const ModelBundle& bundle) {
    BinaryWriter w;
    w.u32(kBundleVersion);
    write_embedding_model(w, bundle.embedder);
    write_pca(w, bundle.pca);
    write_svm(w, bundle.svm, bundle.platt);
    return std::string(kBundleMagic) + w.bytes();
}

ModelBundle deserialize_bundle(std::string_view bytes, const std::string& source) {
    BinaryReader r(bytes, source);
    r.expect_magic(kBundleMagic, kBundleVersion);
    ModelBundle b;
    b.embedder = read_embedding_model(r);
    b.pca = read_pca(r);
    read_svm(r, b.svm, b.platt);
    if (!r.at_end()) r.corrupt("trailing bytes after bundle");
    if (b.pca.input_dim() != 2 * b.embedder.params.dims.code_dim) r.corrupt("PCA input does not match embedder");
    if (static_cast<std::size_t>(b.svm.weights.size()) != b.pca.output_dim()) r.corrupt("SVM does not match PCA");
    return b;
}

void save_bundle(const ModelBundle& bundle, const std::filesystem::path& path) {
    write_file(path, serialize_bundle(bundle));
}

ModelBundle load_bundle(const std::filesystem::path& path) {
    return deserialize_bundle(read_file(path), path.string());
}

MethodVectors embed_corpus(const Corpus& corpus, const EmbeddingModel& model) {
    std::vector<const MethodDecl*> methods;
    for (const auto& unit : corpus.units) {
        for (const auto& cls : unit.classes) {
            for (const auto& m : cls.methods) methods.push_back(&m);
        }
    }
    const auto bags = kernels::extract_all(methods, model.limits);
    const auto vecs = kernels::embed_all(bags, model);
    MethodVectors out;
    for (std::size_t i = 0; i < methods.size(); ++i) {
        if (vecs[i]) out.emplace(methods[i]->id, *vecs[i]);
    }
    return out;
}

std::string_view decision_name(Decision d) {
    switch (d) {
        case Decision::Move: return "move";
        case Decision::Stay: return "stay";
        case Decision::NoRecommendation: return "none";
    }
    return "none";
}

Decision decision_from_name(std::string_view name) {
    if (name == "move") return Decision::Move;
    if (name == "stay") return Decision::Stay;
    if (name == "none") return Decision::NoRecommendation;
    throw DataError("unknown decision '" + std::string(name) + "'");
}

Recommendation decide(std::string method_id, std::string origin_class_id, std::vector<ScoredClass> scores,
                      double threshold) {
    auto origin = std::find_if(scores.begin(), scores.end(),
                               [&](const ScoredClass& s) { return s.class_id == origin_class_id; });
    if (origin == scores.end()) throw NoCandidates(method_id + ": origin class missing from candidates");

    const ScoredClass* best = &*origin;
    for (const auto& s : scores) {
        if (s.probability > best->probability) {
            best = &s;
        } else if (s.probability == best->probability && best->class_id != origin_class_id &&
                   (s.class_id == origin_class_id || s.class_id < best->class_id)) {
            best = &s;
        }
    }

    Recommendation r;
    r.method_id = std::move(method_id);
    r.best_class_id = best->class_id;
    r.probability = best->probability;
    if (best->probability <= threshold) {
        r.decision = Decision::NoRecommendation;
    } else if (best->class_id == origin_class_id) {
        r.decision = Decision::Stay;
    } else {
        r.decision = Decision::Move;
    }
    r.origin_class_id = std::move(origin_class_id);
    r.candidates = std::move(scores);
    return r;
}

double pair_probability(const ModelBundle& bundle, const Vector& method_vec, const Vector& class_vec) {
    FeatureVector raw = make_pair_vector(method_vec, class_vec);
    return predict_proba(bundle.svm, bundle.platt, apply_pca(bundle.pca, raw.values));
}

Recommendation recommend(const Corpus& corpus, const MethodVectors& vectors, const ModelBundle& bundle,
                         const CandidateMove& candidate, double threshold) {
    auto mv = vectors.find(candidate.method_id);
    if (mv == vectors.end()) throw EmbeddingFailure(candidate.method_id + ": method has no contexts");
    const ClassRef origin = find_class(corpus, candidate.origin_class_id);
    Vector origin_vec;
    try {
        origin_vec = class_embedding(*origin.cls, vectors, candidate.method_id);
    } catch (const NoMethods&) {
        throw EmbeddingFailure(candidate.method_id + ": origin class has no other embedded method");
    }

    std::vector<ScoredClass> scores;
    scores.push_back({candidate.origin_class_id, pair_probability(bundle, mv->second, origin_vec)});
    for (const auto& tid : candidate.target_class_ids) {
        const ClassRef target = find_class(corpus, tid);
        try {
            scores.push_back({tid, pair_probability(bundle, mv->second, class_embedding(*target.cls, vectors))});
        } catch (const NoMethods&) {
        }
    }
    return decide(candidate.method_id, candidate.origin_class_id, std::move(scores), threshold);
}

RecommendationRun recommend_all(const Corpus& corpus, const ModelBundle& bundle, double threshold) {
    const MethodVectors vectors = embed_corpus(corpus, bundle.embedder);
    const auto candidates = find_movable(corpus, FilterOptions{.exclude_origin_state = false});

    std::vector<std::optional<Recommendation>> slots(candidates.size());
    std::vector<std::string> errors(candidates.size());
    const auto n = static_cast<long>(candidates.size());
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        try {
            slots[k] = recommend(corpus, vectors, bundle, candidates[k], threshold);
        } catch (const EmbeddingFailure& e) {
            errors[k] = e.what();
        }
    }

    RecommendationRun run;
    for (std::size_t i = 0; i < slots.size(); ++i) {
        if (slots[i]) {
            run.recommendations.push_back(std::move(*slots[i]));
        } else {
            run.skipped.push_back(std::move(errors[i]));
        }
    }
    return run;
}

double f1_score(double precision, double recall) {
    if (precision + recall <= 0.0) return 0.0;
    return 2.0 * precision * recall / (precision + recall);
}

Scores score_counts(double recommended, double correct, double moved) {
    Scores s;
    s.precision_undefined = recommended <= 0.0;
    s.precision = s.precision_undefined ? 0.0 : correct / recommended;
    s.recall = moved <= 0.0 ? 0.0 : correct / moved;
    s.f1 = f1_score(s.precision, s.recall);
    return s;
}

EvalReport evaluate(std::span<const Recommendation> recommendations, std::span<const GroundTruthEntry> ground_truth) {
    std::map<std::string, std::string, std::less<>> original;  // moved method -> original class
    for (const auto& g : ground_truth) original[g.moved_method_id] = g.original_class_id;

    struct Acc {
        ProjectReport row;
        double expected_recommended = 0.0;
        double expected_correct = 0.0;
    };
    std::map<std::string, Acc> acc;
    for (const auto& g : ground_truth) {
        auto& a = acc[project_of(g.moved_method_id)];
        ++a.row.moved;
    }
    for (const auto& r : recommendations) {
        auto& a = acc[project_of(r.method_id)];
        ++a.row.candidates;
        auto truth = original.find(r.method_id);
        if (r.decision == Decision::Move) {
            ++a.row.recommended;
            if (truth != original.end() && truth->second == r.best_class_id) ++a.row.correct;
        }
        const double k = static_cast<double>(r.candidates.size());
        if (k > 0.0) {
            a.expected_recommended += (k - 1.0) / k;
            if (truth != original.end()) {
                const bool reachable = std::any_of(r.candidates.begin(), r.candidates.end(), [&](const ScoredClass& c) {
                    return c.class_id == truth->second && c.class_id != r.origin_class_id;
                });
                if (reachable) a.expected_correct += 1.0 / k;
            }
        }
    }

    EvalReport report;
    for (auto& [project, a] : acc) {
        a.row.project = project;
        a.row.scores = score_counts(static_cast<double>(a.row.recommended), static_cast<double>(a.row.correct),
                                    static_cast<double>(a.row.moved));
        a.row.baseline = score_counts(a.expected_recommended, a.expected_correct, static_cast<double>(a.row.moved));
        report.recommended += a.row.recommended;
        report.correct += a.row.correct;
        report.moved += a.row.moved;
        report.projects.push_back(std::move(a.row));
    }
    if (!report.projects.empty()) {
        const double n = static_cast<double>(report.projects.size());
        for (const auto& p : report.projects) {
            report.macro.precision += p.scores.precision / n;
            report.macro.recall += p.scores.recall / n;
            report.macro.f1 += p.scores.f1 / n;
            report.macro.precision_undefined = report.macro.precision_undefined || p.scores.precision_undefined;
            report.baseline_macro.precision += p.baseline.precision / n;
            report.baseline_macro.recall += p.baseline.recall / n;
            report.baseline_macro.f1 += p.baseline.f1 / n;
        }
    }
    report.micro = score_counts(static_cast<double>(report.recommended), static_cast<double>(report.correct),
                                static_cast<double>(report.moved));
    return report;
}

std::string format_summary(const EvalReport& report) {
    std::string out;
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-16s %6s %6s %6s %9s %7s %6s %8s\n", "project", "moved", "recs", "hits",
                  "precision", "recall", "F1", "rand-F1");
    out += buf;
    auto row = [&](const std::string& name, std::size_t moved, std::size_t recs, std::size_t hits, const Scores& s,
                   double baseline) {
        std::snprintf(buf, sizeof buf, "%-16s %6zu %6zu %6zu %9.3f %7.3f %6.3f %8.3f\n", name.c_str(), moved, recs,
                      hits, s.precision, s.recall, s.f1, baseline);
        out += buf;
    };
    for (const auto& p : report.projects) row(p.project, p.moved, p.recommended, p.correct, p.scores, p.baseline.f1);
    row("macro", report.moved, report.recommended, report.correct, report.macro, report.baseline_macro.f1);
    row("micro", report.moved, report.recommended, report.correct, report.micro, report.baseline_macro.f1);
    return out;
}

}  // namespace moverec
