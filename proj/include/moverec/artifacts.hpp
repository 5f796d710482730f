#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "moverec/injector.hpp"
#include "moverec/pathctx.hpp"
#include "moverec/pipeline.hpp"

#include <json.hpp>

namespace moverec {

// Every text artifact starts with a header naming its format and version;
// readers throw VersionMismatch on another version and CorruptFile on
// anything unparseable.
inline constexpr std::uint32_t kArtifactVersion = 1;

// Inverse of path_to_string.
AstPath parse_path(std::string_view text);
PathContext parse_context(std::string_view text);

// One line per bag: method id, then its contexts, tab separated.
void write_contexts(const std::filesystem::path& path, std::span<const ContextBag> bags);
std::vector<ContextBag> read_contexts(const std::filesystem::path& path);

enum class Partition { Train, Test, Validate };
std::string_view partition_name(Partition p);

struct DatasetRecord {
    LabeledExample example;
    Partition partition = Partition::Train;
};

void write_dataset(const std::filesystem::path& path, std::span<const DatasetRecord> records);
std::vector<DatasetRecord> read_dataset(const std::filesystem::path& path);

void write_ground_truth(const std::filesystem::path& path, std::span<const GroundTruthEntry> entries);
std::vector<GroundTruthEntry> read_ground_truth(const std::filesystem::path& path);

void write_recommendations(const std::filesystem::path& path, std::span<const Recommendation> recs);
std::vector<Recommendation> read_recommendations(const std::filesystem::path& path);

nlohmann::json report_to_json(const EvalReport& report);
void write_report(const std::filesystem::path& path, const EvalReport& report);

}  // namespace moverec
