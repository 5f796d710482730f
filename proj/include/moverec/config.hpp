#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "moverec/embed.hpp"
#include "moverec/featurize.hpp"
#include "moverec/pathctx.hpp"
#include "moverec/svm.hpp"

#include <json.hpp>

namespace moverec {

inline constexpr std::string_view kConfigEnvVar = "MOVEREC_CONFIG";

struct RunConfig {
    std::filesystem::path train_corpus;
    std::filesystem::path eval_corpus;
    std::filesystem::path output_dir = "moverec-out";
    std::uint64_t seed = 0;
    int jobs = 0;  // 0 keeps the OpenMP default

    ExtractionLimits extraction;
    EmbedderDims dims;
    std::size_t embed_epochs = 20;
    std::size_t batch_size = 32;
    double learning_rate = 1e-3;
    std::size_t min_count = 2;

    PcaPolicy pca;
    double svm_c = 1.0;
    std::size_t svm_epochs = 200;
    std::size_t platt_max_iterations = 100;

    std::size_t moves_per_project = 6;
    double threshold = 0.5;

    // Throws ConfigError on out-of-range values.
    void validate() const;

    // Component settings with seeds derived from `seed`.
    ExtractionLimits extraction_limits() const;
    TrainConfig embed_config() const;
    SvmHyperparams svm_hyperparams() const;
    std::uint64_t split_seed() const { return seed + 2; }
    std::uint64_t injection_seed() const { return seed + 3; }
};

// Unknown keys and wrongly typed values raise ConfigError. Relative corpus
// and output paths are resolved against `base_dir`.
RunConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
nlohmann::json config_to_json(const RunConfig& config);

// Reads a JSON config file. A missing file is a ConfigError.
RunConfig load_config(const std::filesystem::path& path);

// The explicit path when given, else the MOVEREC_CONFIG variable, else none.
std::optional<std::filesystem::path> resolve_config_path(const std::optional<std::filesystem::path>& flag);

}  // namespace moverec
