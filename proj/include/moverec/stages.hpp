#pragma once

#include <filesystem>
#include <iosfwd>

#include "moverec/config.hpp"
#include "moverec/pipeline.hpp"

namespace moverec {

// Fixed artifact layout under the output directory.
struct ArtifactPaths {
    std::filesystem::path dir;

    std::filesystem::path contexts() const { return dir / "contexts.tsv"; }
    std::filesystem::path embedder() const { return dir / "embedder.bin"; }
    std::filesystem::path dataset() const { return dir / "dataset.jsonl"; }
    std::filesystem::path bundle() const { return dir / "bundle.bin"; }
    std::filesystem::path classifier_report() const { return dir / "classifier.json"; }
    std::filesystem::path injected() const { return dir / "injected"; }
    std::filesystem::path ground_truth() const { return dir / "ground_truth.jsonl"; }
    std::filesystem::path recommendations() const { return dir / "recommendations.jsonl"; }
    std::filesystem::path report() const { return dir / "report.json"; }
};

// "file:Class.name/arity" -> "name"
std::string method_name_of(std::string_view method_id);

// Each stage reads the artifacts of earlier stages (MissingArtifact when one
// is absent), writes its own, and logs one-line progress to `log`.
void stage_extract(const RunConfig& config, std::ostream& log);
void stage_train_embed(const RunConfig& config, std::ostream& log);
void stage_build_dataset(const RunConfig& config, std::ostream& log);
void stage_train_classifier(const RunConfig& config, std::ostream& log);
void stage_inject(const RunConfig& config, std::ostream& log);
void stage_recommend(const RunConfig& config, std::ostream& log);
EvalReport stage_evaluate(const RunConfig& config, std::ostream& log);

// All stages in order.
EvalReport run_pipeline(const RunConfig& config, std::ostream& log);

}  // namespace moverec
