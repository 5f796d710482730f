#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "moverec/corpus.hpp"
#include "moverec/embed.hpp"
#include "moverec/featurize.hpp"
#include "moverec/injector.hpp"
#include "moverec/svm.hpp"

namespace moverec {

class NoCandidates : public DataError {
public:
    using DataError::DataError;
};

class EmbeddingFailure : public DataError {
public:
    using DataError::DataError;
};

// Everything needed to score a (method, class) pair.
struct ModelBundle {
    EmbeddingModel embedder;
    PcaModel pca;
    SvmModel svm;
    PlattParams platt;
};

inline constexpr std::string_view kBundleMagic = "MOVEREC-BUNDLE";
inline constexpr std::uint32_t kBundleVersion = 1;

std::string serialize_bundle(const ModelBundle& bundle);
ModelBundle deserialize_bundle(std::string_view bytes, const std::string& source);
void save_bundle(const ModelBundle& bundle, const std::filesystem::path& path);
ModelBundle load_bundle(const std::filesystem::path& path);

// Code vectors of every method in the corpus that has at least one context.
MethodVectors embed_corpus(const Corpus& corpus, const EmbeddingModel& model);

enum class Decision { Move, Stay, NoRecommendation };

std::string_view decision_name(Decision d);
Decision decision_from_name(std::string_view name);

struct ScoredClass {
    std::string class_id;
    double probability = 0.0;
};

struct Recommendation {
    std::string method_id;
    std::string origin_class_id;
    std::string best_class_id;
    double probability = 0.0;
    Decision decision = Decision::NoRecommendation;
    std::vector<ScoredClass> candidates;  // origin first
};

// Picks the most probable class (origin wins ties, then the smallest class
// id) and applies the threshold: a maximum at or below it gives
// NoRecommendation, the origin gives Stay, anything else Move.
// Throws NoCandidates when `scores` lacks the origin.
Recommendation decide(std::string method_id, std::string origin_class_id, std::vector<ScoredClass> scores,
                      double threshold);

double pair_probability(const ModelBundle& bundle, const Vector& method_vec, const Vector& class_vec);

// Scores one method against its origin (averaged without the method) and
// the given target classes. Targets without any embedded method are left
// out; throws EmbeddingFailure if the method or its origin cannot be embedded.
Recommendation recommend(const Corpus& corpus, const MethodVectors& vectors, const ModelBundle& bundle,
                         const CandidateMove& candidate, double threshold);

struct RecommendationRun {
    std::vector<Recommendation> recommendations;
    std::vector<std::string> skipped;  // "method_id: reason"
};

// Recommendations for every move candidate of the corpus, found without the
// origin-state filter.
RecommendationRun recommend_all(const Corpus& corpus, const ModelBundle& bundle, double threshold);

struct Scores {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    bool precision_undefined = false;  // nothing was recommended
};

double f1_score(double precision, double recall);
Scores score_counts(double recommended, double correct, double moved);

struct ProjectReport {
    std::string project;
    std::size_t candidates = 0;
    std::size_t recommended = 0;
    std::size_t correct = 0;
    std::size_t moved = 0;
    Scores scores;
    Scores baseline;  // uniform random choice among each method's candidate classes
};

struct EvalReport {
    std::vector<ProjectReport> projects;  // sorted by project
    Scores macro;                         // means of per-project values
    Scores micro;                         // from pooled counts
    Scores baseline_macro;
    std::size_t recommended = 0;
    std::size_t correct = 0;
    std::size_t moved = 0;
};

// A Move is correct when its class is the original class of a ground-truth
// entry for the same method. Recall is over all ground-truth moves.
EvalReport evaluate(std::span<const Recommendation> recommendations, std::span<const GroundTruthEntry> ground_truth);

// Fixed-width text table of the report.
std::string format_summary(const EvalReport& report);

}  // namespace moverec
