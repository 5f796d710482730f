#include "moverec/artifacts.hpp"

#include <fstream>
#include <sstream>

#include "moverec/binary_io.hpp"

namespace moverec {

namespace {

using nlohmann::json;

constexpr std::string_view kUp = "\xe2\x86\x91";    // ↑
constexpr std::string_view kDown = "\xe2\x86\x93";  // ↓

constexpr std::string_view kContextsFormat = "moverec-contexts";
constexpr std::string_view kDatasetFormat = "moverec-dataset";
constexpr std::string_view kGroundTruthFormat = "moverec-ground-truth";
constexpr std::string_view kRecommendationsFormat = "moverec-recommendations";
constexpr std::string_view kReportFormat = "moverec-report";

json header(std::string_view format) { return {{"format", format}, {"version", kArtifactVersion}}; }

void check_header(const json& h, std::string_view format, const std::string& source) {
    if (!h.is_object() || !h.contains("format") || !h.contains("version") || h["format"] != format) {
        throw CorruptFile(source + ": not a " + std::string(format) + " file");
    }
    if (h["version"] != kArtifactVersion) {
        throw VersionMismatch(source + ": format version " + h["version"].dump() + ", expected " +
                              std::to_string(kArtifactVersion));
    }
}

std::string require(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw MissingArtifact(path.string());
    return read_file(path);
}

void write_jsonl(const std::filesystem::path& path, std::string_view format, const std::vector<json>& rows) {
    std::string out = header(format).dump() + "\n";
    for (const auto& r : rows) out += r.dump() + "\n";
    write_file(path, out);
}

std::vector<json> read_jsonl(const std::filesystem::path& path, std::string_view format) {
    const std::string text = require(path);
    std::istringstream in(text);
    std::string line;
    std::vector<json> rows;
    bool first = true;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error&) {
            throw CorruptFile(path.string() + ":" + std::to_string(lineno) + ": invalid JSON");
        }
        if (first) {
            check_header(j, format, path.string());
            first = false;
        } else {
            rows.push_back(std::move(j));
        }
    }
    if (first) throw CorruptFile(path.string() + ": empty file");
    return rows;
}

template <typename T>
T field(const json& j, const char* key, const std::string& source) {
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw CorruptFile(source + ": record lacks a valid '" + key + "'");
    }
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        std::size_t p = s.find(sep, start);
        out.push_back(s.substr(start, p == std::string_view::npos ? std::string_view::npos : p - start));
        if (p == std::string_view::npos) break;
        start = p + 1;
    }
    return out;
}

json scores_json(const Scores& s) {
    return {{"precision", s.precision},
            {"recall", s.recall},
            {"f1", s.f1},
            {"precision_undefined", s.precision_undefined}};
}

}  // namespace

AstPath parse_path(std::string_view text) {
    AstPath path;
    bool descending = false;
    std::size_t pos = 0;
    while (true) {
        const std::size_t up = text.find(kUp, pos);
        const std::size_t down = text.find(kDown, pos);
        const std::size_t next = std::min(up, down);
        auto kind = kind_from_name(text.substr(pos, next == std::string_view::npos ? next : next - pos));
        if (!kind) throw CorruptFile("bad node label in path '" + std::string(text) + "'");
        path.nodes.push_back(*kind);
        if (next == std::string_view::npos) break;
        if (next == up) {
            if (descending) throw CorruptFile("path goes up after going down: " + std::string(text));
            ++path.ascent;
            pos = next + kUp.size();
        } else {
            descending = true;
            pos = next + kDown.size();
        }
    }
    return path;
}

PathContext parse_context(std::string_view text) {
    const std::size_t a = text.find(',');
    const std::size_t b = text.rfind(',');
    if (a == std::string_view::npos || a == b) throw CorruptFile("bad context '" + std::string(text) + "'");
    return {std::string(text.substr(0, a)), parse_path(text.substr(a + 1, b - a - 1)), std::string(text.substr(b + 1))};
}

void write_contexts(const std::filesystem::path& path, std::span<const ContextBag> bags) {
    std::string out = std::string(kContextsFormat) + "\t" + std::to_string(kArtifactVersion) + "\n";
    for (const auto& bag : bags) {
        out += bag.method_id;
        for (const auto& ctx : bag.contexts) out += "\t" + context_to_string(ctx);
        out += "\n";
    }
    write_file(path, out);
}

std::vector<ContextBag> read_contexts(const std::filesystem::path& path) {
    const std::string text = require(path);
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw CorruptFile(path.string() + ": empty file");
    const auto head = split(line, '\t');
    if (head.size() != 2 || head[0] != kContextsFormat) throw CorruptFile(path.string() + ": not a contexts file");
    if (head[1] != std::to_string(kArtifactVersion)) {
        throw VersionMismatch(path.string() + ": format version " + std::string(head[1]) + ", expected " +
                              std::to_string(kArtifactVersion));
    }
    std::vector<ContextBag> bags;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto parts = split(line, '\t');
        ContextBag bag;
        bag.method_id = std::string(parts[0]);
        for (std::size_t i = 1; i < parts.size(); ++i) bag.contexts.push_back(parse_context(parts[i]));
        bag.empty_body = bag.contexts.empty();
        bags.push_back(std::move(bag));
    }
    return bags;
}

std::string_view partition_name(Partition p) {
    switch (p) {
        case Partition::Train: return "train";
        case Partition::Test: return "test";
        case Partition::Validate: return "validate";
    }
    return "train";
}

void write_dataset(const std::filesystem::path& path, std::span<const DatasetRecord> records) {
    std::vector<json> rows;
    rows.reserve(records.size());
    for (const auto& r : records) {
        const auto& f = r.example.feature;
        rows.push_back({{"method_id", f.method_id},
                        {"class_id", f.class_id},
                        {"label", r.example.label},
                        {"split", partition_name(r.partition)},
                        {"feature", std::vector<double>(f.values.data(), f.values.data() + f.values.size())}});
    }
    write_jsonl(path, kDatasetFormat, rows);
}

std::vector<DatasetRecord> read_dataset(const std::filesystem::path& path) {
    const std::string src = path.string();
    std::vector<DatasetRecord> out;
    for (const auto& j : read_jsonl(path, kDatasetFormat)) {
        DatasetRecord r;
        r.example.feature.method_id = field<std::string>(j, "method_id", src);
        r.example.feature.class_id = field<std::string>(j, "class_id", src);
        r.example.label = field<int>(j, "label", src);
        const auto values = field<std::vector<double>>(j, "feature", src);
        r.example.feature.values = Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
        const auto part = field<std::string>(j, "split", src);
        if (part == "train") {
            r.partition = Partition::Train;
        } else if (part == "test") {
            r.partition = Partition::Test;
        } else if (part == "validate") {
            r.partition = Partition::Validate;
        } else {
            throw CorruptFile(src + ": unknown split '" + part + "'");
        }
        out.push_back(std::move(r));
    }
    return out;
}

void write_ground_truth(const std::filesystem::path& path, std::span<const GroundTruthEntry> entries) {
    std::vector<json> rows;
    for (const auto& e : entries) {
        rows.push_back({{"moved_method_id", e.moved_method_id},
                        {"original_class_id", e.original_class_id},
                        {"injected_class_id", e.injected_class_id},
                        {"original_index", e.original_index}});
    }
    write_jsonl(path, kGroundTruthFormat, rows);
}

std::vector<GroundTruthEntry> read_ground_truth(const std::filesystem::path& path) {
    const std::string src = path.string();
    std::vector<GroundTruthEntry> out;
    for (const auto& j : read_jsonl(path, kGroundTruthFormat)) {
        out.push_back({field<std::string>(j, "moved_method_id", src), field<std::string>(j, "original_class_id", src),
                       field<std::string>(j, "injected_class_id", src), field<std::size_t>(j, "original_index", src)});
    }
    return out;
}

void write_recommendations(const std::filesystem::path& path, std::span<const Recommendation> recs) {
    std::vector<json> rows;
    for (const auto& r : recs) {
        json cands = json::array();
        for (const auto& c : r.candidates) cands.push_back({{"class_id", c.class_id}, {"probability", c.probability}});
        rows.push_back({{"method_id", r.method_id},
                        {"origin_class_id", r.origin_class_id},
                        {"best_class_id", r.best_class_id},
                        {"probability", r.probability},
                        {"decision", decision_name(r.decision)},
                        {"candidates", std::move(cands)}});
    }
    write_jsonl(path, kRecommendationsFormat, rows);
}

std::vector<Recommendation> read_recommendations(const std::filesystem::path& path) {
    const std::string src = path.string();
    std::vector<Recommendation> out;
    for (const auto& j : read_jsonl(path, kRecommendationsFormat)) {
        Recommendation r;
        r.method_id = field<std::string>(j, "method_id", src);
        r.origin_class_id = field<std::string>(j, "origin_class_id", src);
        r.best_class_id = field<std::string>(j, "best_class_id", src);
        r.probability = field<double>(j, "probability", src);
        try {
            r.decision = decision_from_name(field<std::string>(j, "decision", src));
        } catch (const CorruptFile&) {
            throw;
        } catch (const DataError& e) {
            throw CorruptFile(src + ": " + e.what());
        }
        for (const auto& c : field<json>(j, "candidates", src)) {
            r.candidates.push_back({field<std::string>(c, "class_id", src), field<double>(c, "probability", src)});
        }
        out.push_back(std::move(r));
    }
    return out;
}

json report_to_json(const EvalReport& report) {
    json j = header(kReportFormat);
    json rows = json::array();
    for (const auto& p : report.projects) {
        rows.push_back({{"project", p.project},
                        {"candidates", p.candidates},
                        {"recommended", p.recommended},
                        {"correct", p.correct},
                        {"moved", p.moved},
                        {"scores", scores_json(p.scores)},
                        {"random_baseline", scores_json(p.baseline)}});
    }
    j["projects"] = std::move(rows);
    j["macro"] = scores_json(report.macro);
    j["micro"] = scores_json(report.micro);
    j["random_baseline_macro"] = scores_json(report.baseline_macro);
    j["totals"] = {{"recommended", report.recommended}, {"correct", report.correct}, {"moved", report.moved}};
    return j;
}

void write_report(const std::filesystem::path& path, const EvalReport& report) {
    write_file(path, report_to_json(report).dump(2) + "\n");
}

}  // namespace moverec
