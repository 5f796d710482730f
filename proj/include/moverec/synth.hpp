#pragma once

#include <cstdint>
#include <random>
#include <string>

#include "moverec/corpus.hpp"

namespace moverec {

// Shape of a generated project. Data classes hold fields with getters,
// setters and small helpers; service classes hold multi-statement methods
// that work through data-class parameters. Service methods that leave their
// own class's state alone are the move candidates.
struct SynthOptions {
    std::size_t projects = 20;
    std::size_t data_classes = 6;
    std::size_t service_classes = 4;
    std::size_t movable_per_service = 4;
    std::size_t stateful_per_service = 2;
    std::uint64_t seed = 0;
};

// Projects are named proj00, proj01, ...; one file per class.
Corpus generate_corpus(const SynthOptions& options);

// Source of one project, as (relative path, text) pairs in file order.
std::vector<std::pair<std::string, std::string>> generate_project_sources(const std::string& project,
                                                                          const SynthOptions& options,
                                                                          std::uint64_t project_seed);

struct RandomCodeOptions {
    std::size_t max_statements = 4;
    std::size_t max_depth = 3;
};

// A single class with one method whose body is drawn from the whole
// statement and expression grammar, for round-trip and path-enumeration
// properties.
std::string random_class_source(std::mt19937_64& rng, const RandomCodeOptions& options = {});

}  // namespace moverec
