#include "moverec/config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>

namespace moverec {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::string& where, std::initializer_list<const char*> known) {
    if (!obj.is_object()) throw ConfigError(where + " must be an object");
    std::set<std::string, std::less<>> allowed(known.begin(), known.end());
    for (const auto& [key, value] : obj.items()) {
        if (!allowed.contains(key)) throw ConfigError("unknown config key '" + where + key + "'");
    }
}

template <typename T>
void read(const json& obj, const char* key, const std::string& where, T& out) {
    auto it = obj.find(key);
    if (it == obj.end()) return;
    try {
        if constexpr (std::is_same_v<T, std::size_t> || std::is_same_v<T, std::uint64_t>) {
            if (!it->is_number_unsigned()) throw ConfigError("");
        } else if constexpr (std::is_integral_v<T>) {
            if (!it->is_number_integer()) throw ConfigError("");
        } else if constexpr (std::is_floating_point_v<T>) {
            if (!it->is_number()) throw ConfigError("");
        }
        out = it->get<T>();
    } catch (const std::exception&) {
        throw ConfigError("config key '" + where + key + "' has the wrong type");
    }
}

void read_path(const json& obj, const char* key, const std::filesystem::path& base, std::filesystem::path& out) {
    auto it = obj.find(key);
    if (it == obj.end()) return;
    if (!it->is_string()) throw ConfigError(std::string("config key '") + key + "' must be a string");
    std::filesystem::path p = it->get<std::string>();
    out = p.is_relative() && !base.empty() ? base / p : p;
}

void positive(std::size_t v, const char* what) {
    if (v == 0) throw ConfigError(std::string(what) + " must be positive");
}

}  // namespace

void RunConfig::validate() const {
    extraction.validate();
    positive(dims.token_dim, "embedder.token_dim");
    positive(dims.path_dim, "embedder.path_dim");
    positive(dims.code_dim, "embedder.code_dim");
    positive(embed_epochs, "embedder.epochs");
    positive(batch_size, "embedder.batch_size");
    positive(min_count, "embedder.min_count");
    if (!(learning_rate > 0.0)) throw ConfigError("embedder.learning_rate must be positive");
    if (pca.fixed_k) {
        positive(*pca.fixed_k, "pca.components");
    } else if (!(pca.variance_threshold > 0.0 && pca.variance_threshold <= 1.0)) {
        throw ConfigError("pca.variance_threshold must be in (0, 1]");
    }
    if (!(svm_c > 0.0)) throw ConfigError("svm.c must be positive");
    positive(svm_epochs, "svm.epochs");
    positive(platt_max_iterations, "platt.max_iterations");
    positive(moves_per_project, "injection.moves_per_project");
    if (!(threshold >= 0.0 && threshold <= 1.0)) throw ConfigError("threshold must be in [0, 1]");
    if (jobs < 0) throw ConfigError("jobs must not be negative");
}

ExtractionLimits RunConfig::extraction_limits() const {
    ExtractionLimits l = extraction;
    l.seed = seed;
    return l;
}

TrainConfig RunConfig::embed_config() const {
    TrainConfig t;
    t.dims = dims;
    t.epochs = embed_epochs;
    t.batch_size = batch_size;
    t.learning_rate = learning_rate;
    t.min_count = min_count;
    t.seed = seed;
    return t;
}

SvmHyperparams RunConfig::svm_hyperparams() const { return {svm_c, svm_epochs, seed + 1}; }

RunConfig config_from_json(const json& j, const std::filesystem::path& base_dir) {
    reject_unknown(j, "", {"train_corpus", "eval_corpus", "output_dir", "seed", "jobs", "extraction", "embedder",
                           "pca", "svm", "platt", "injection", "threshold"});
    RunConfig c;
    read_path(j, "train_corpus", base_dir, c.train_corpus);
    read_path(j, "eval_corpus", base_dir, c.eval_corpus);
    read_path(j, "output_dir", base_dir, c.output_dir);
    read(j, "seed", "", c.seed);
    read(j, "jobs", "", c.jobs);
    read(j, "threshold", "", c.threshold);

    if (auto it = j.find("extraction"); it != j.end()) {
        reject_unknown(*it, "extraction.", {"max_length", "max_width", "max_contexts"});
        read(*it, "max_length", "extraction.", c.extraction.max_length);
        read(*it, "max_width", "extraction.", c.extraction.max_width);
        read(*it, "max_contexts", "extraction.", c.extraction.max_contexts);
    }
    if (auto it = j.find("embedder"); it != j.end()) {
        reject_unknown(*it, "embedder.",
                       {"token_dim", "path_dim", "code_dim", "epochs", "batch_size", "learning_rate", "min_count"});
        read(*it, "token_dim", "embedder.", c.dims.token_dim);
        read(*it, "path_dim", "embedder.", c.dims.path_dim);
        read(*it, "code_dim", "embedder.", c.dims.code_dim);
        read(*it, "epochs", "embedder.", c.embed_epochs);
        read(*it, "batch_size", "embedder.", c.batch_size);
        read(*it, "learning_rate", "embedder.", c.learning_rate);
        read(*it, "min_count", "embedder.", c.min_count);
    }
    if (auto it = j.find("pca"); it != j.end()) {
        reject_unknown(*it, "pca.", {"variance_threshold", "components"});
        read(*it, "variance_threshold", "pca.", c.pca.variance_threshold);
        if (auto k = it->find("components"); k != it->end() && !k->is_null()) {
            std::size_t v = 0;
            read(*it, "components", "pca.", v);
            c.pca.fixed_k = v;
        }
    }
    if (auto it = j.find("svm"); it != j.end()) {
        reject_unknown(*it, "svm.", {"c", "epochs"});
        read(*it, "c", "svm.", c.svm_c);
        read(*it, "epochs", "svm.", c.svm_epochs);
    }
    if (auto it = j.find("platt"); it != j.end()) {
        reject_unknown(*it, "platt.", {"max_iterations"});
        read(*it, "max_iterations", "platt.", c.platt_max_iterations);
    }
    if (auto it = j.find("injection"); it != j.end()) {
        reject_unknown(*it, "injection.", {"moves_per_project"});
        read(*it, "moves_per_project", "injection.", c.moves_per_project);
    }
    c.validate();
    return c;
}

json config_to_json(const RunConfig& c) {
    json j;
    j["train_corpus"] = c.train_corpus.string();
    j["eval_corpus"] = c.eval_corpus.string();
    j["output_dir"] = c.output_dir.string();
    j["seed"] = c.seed;
    j["jobs"] = c.jobs;
    j["threshold"] = c.threshold;
    j["extraction"] = {{"max_length", c.extraction.max_length},
                       {"max_width", c.extraction.max_width},
                       {"max_contexts", c.extraction.max_contexts}};
    j["embedder"] = {{"token_dim", c.dims.token_dim},   {"path_dim", c.dims.path_dim},
                     {"code_dim", c.dims.code_dim},     {"epochs", c.embed_epochs},
                     {"batch_size", c.batch_size},      {"learning_rate", c.learning_rate},
                     {"min_count", c.min_count}};
    j["pca"] = {{"variance_threshold", c.pca.variance_threshold},
                {"components", c.pca.fixed_k ? json(*c.pca.fixed_k) : json(nullptr)}};
    j["svm"] = {{"c", c.svm_c}, {"epochs", c.svm_epochs}};
    j["platt"] = {{"max_iterations", c.platt_max_iterations}};
    j["injection"] = {{"moves_per_project", c.moves_per_project}};
    return j;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return config_from_json(j, path.parent_path());
}

std::optional<std::filesystem::path> resolve_config_path(const std::optional<std::filesystem::path>& flag) {
    if (flag) return flag;
    if (const char* env = std::getenv(kConfigEnvVar.data()); env && *env) return std::filesystem::path(env);
    return std::nullopt;
}

}  // namespace moverec
