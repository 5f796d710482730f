#include "moverec/cli.hpp"

#include <cstdio>
#include <functional>
#include <ostream>

#include <CLI11.hpp>

#include "moverec/frontend.hpp"
#include "moverec/kernels.hpp"
#include "moverec/stages.hpp"
#include "moverec/synth.hpp"

namespace moverec {

namespace {

struct GlobalFlags {
    std::optional<std::string> config;
    std::optional<std::uint64_t> seed;
    std::optional<int> jobs;
    std::optional<double> threshold;
    std::optional<std::string> output;
};

RunConfig effective_config(const GlobalFlags& flags) {
    RunConfig config;
    std::optional<std::filesystem::path> flag;
    if (flags.config) flag = *flags.config;
    if (auto path = resolve_config_path(flag)) config = load_config(*path);
    if (flags.seed) config.seed = *flags.seed;
    if (flags.jobs) config.jobs = *flags.jobs;
    if (flags.threshold) config.threshold = *flags.threshold;
    if (flags.output) config.output_dir = *flags.output;
    config.validate();
    if (config.jobs > 0) kernels::set_threads(config.jobs);
    return config;
}

struct GenerateFlags {
    std::size_t projects = 20;
    std::size_t held_out = 5;
    std::string out;
};

void generate(const GenerateFlags& g, std::uint64_t seed, std::ostream& out) {
    if (g.held_out > g.projects) throw ConfigError("--held-out exceeds --projects");
    SynthOptions options;
    options.seed = seed;
    std::mt19937_64 seeder(seed);
    const std::filesystem::path root = g.out;
    for (std::size_t p = 0; p < g.projects; ++p) {
        char name[16];
        std::snprintf(name, sizeof name, "proj%02zu", p);
        const bool eval = p >= g.projects - g.held_out;
        const std::filesystem::path dir = root / (eval ? "eval" : "train");
        for (const auto& [path, text] : generate_project_sources(name, options, seeder())) {
            write_file(dir / path, text);
        }
    }
    out << "generate: " << g.projects - g.held_out << " training and " << g.held_out << " held-out projects -> "
        << root.string() << "\n";
}

int exit_code(const Error& e) {
    switch (e.category()) {
        case ErrorCategory::Config: return kExitConfig;
        case ErrorCategory::Data: return kExitData;
        case ErrorCategory::Internal: return kExitInternal;
    }
    return kExitInternal;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Move Method recommendation from learned code embeddings", "moverec"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_help_all_flag("--help-all", "Print help for every subcommand and exit");

    GlobalFlags flags;
    app.add_option("--config", flags.config, "JSON config file (default: $MOVEREC_CONFIG)");
    app.add_option("--seed", flags.seed, "Seed for every randomized step");
    app.add_option("--jobs", flags.jobs, "Worker threads for parallel stages")->check(CLI::NonNegativeNumber);
    app.add_option("--threshold", flags.threshold, "Minimum probability for a recommendation")
        ->check(CLI::Range(0.0, 1.0));
    app.add_option("--output", flags.output, "Artifact directory (overrides output_dir)");

    using Stage = std::function<void(const RunConfig&)>;
    std::vector<std::pair<CLI::App*, Stage>> stages;
    auto stage = [&](const char* name, const char* help, Stage fn) {
        stages.emplace_back(app.add_subcommand(name, help), std::move(fn));
    };
    stage("extract", "Extract path contexts from the training corpus",
          [&](const RunConfig& c) { stage_extract(c, out); });
    stage("train-embed", "Train the code embedder on the extracted contexts",
          [&](const RunConfig& c) { stage_train_embed(c, out); });
    stage("build-dataset", "Build and split the labeled (method, class) dataset",
          [&](const RunConfig& c) { stage_build_dataset(c, out); });
    stage("train-clf", "Fit PCA, the SVM and Platt scaling; write the model bundle",
          [&](const RunConfig& c) { stage_train_classifier(c, out); });
    stage("inject", "Move methods in the evaluation corpus and record ground truth",
          [&](const RunConfig& c) { stage_inject(c, out); });
    stage("recommend", "Recommend moves for the injected corpus",
          [&](const RunConfig& c) { stage_recommend(c, out); });
    stage("evaluate", "Score recommendations against the ground truth",
          [&](const RunConfig& c) { stage_evaluate(c, out); });
    stage("pipeline", "Run every stage in order", [&](const RunConfig& c) { run_pipeline(c, out); });

    GenerateFlags gen;
    CLI::App* generate_cmd = app.add_subcommand("generate", "Write a synthetic corpus split into train/ and eval/");
    generate_cmd->add_option("--projects", gen.projects, "Number of projects")->check(CLI::PositiveNumber);
    generate_cmd->add_option("--held-out", gen.held_out, "Projects written to eval/");
    generate_cmd->add_option("--out", gen.out, "Destination directory")->required();

    try {
        app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (generate_cmd->parsed()) {
            generate(gen, flags.seed.value_or(0), out);
            return kExitOk;
        }
        const RunConfig config = effective_config(flags);
        for (auto& [cmd, fn] : stages) {
            if (cmd->parsed()) fn(config);
        }
        return kExitOk;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_code(e);
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
}

}  // namespace moverec
