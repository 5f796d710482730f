#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "moverec/corpus.hpp"
#include "moverec/featurize.hpp"

namespace moverec {

class NotMovable : public DataError {
public:
    using DataError::DataError;
};

class UnresolvedTarget : public DataError {
public:
    using DataError::DataError;
};

class TooFew : public DataError {
public:
    using DataError::DataError;
};

struct CandidateMove {
    std::string method_id;
    std::string origin_class_id;
    std::vector<std::string> target_class_ids;  // parameter types, origin excluded, first occurrence order
};

// Why a method is not a move candidate; Movable when it is one.
enum class MoveFilter {
    Movable,
    Static,
    Constructor,
    Empty,
    Delegation,
    Parameterless,
    Getter,
    Setter,
    TouchesOriginState,
    NoTargets,
};

std::string_view filter_name(MoveFilter f);

struct FilterOptions {
    // Also drop methods that read or write fields of their own class or call
    // its methods unqualified. Required for injection; recommendation runs
    // without it because a smelly method typically does touch the state of
    // the class it was moved into.
    bool exclude_origin_state = true;
};

MoveFilter classify_method(const ClassDecl& origin, const MethodDecl& method, const ClassIndex& classes,
                           std::string_view project, const FilterOptions& options = {});

// Parameter-type classes of `method` that resolve within `project`, without
// the origin and without duplicates.
std::vector<std::string> target_classes(const ClassDecl& origin, const MethodDecl& method, const ClassIndex& classes,
                                        std::string_view project);

std::vector<CandidateMove> find_movable(const Corpus& corpus, const FilterOptions& options = {});

struct GroundTruthEntry {
    std::string moved_method_id;
    std::string original_class_id;
    std::string injected_class_id;
    std::size_t original_index = 0;  // position of the method in its original class

    friend bool operator==(const GroundTruthEntry&, const GroundTruthEntry&) = default;
};

struct MoveResult {
    Corpus corpus;
    GroundTruthEntry entry;
};

// Moves a method into the class of one of its parameters (the first one whose
// type is the target). The receiver and that parameter swap roles: accesses
// `p.m` become unqualified `m`, unqualified members of the old class become
// `p.m`, a bare `p` becomes `this` and a bare `this` becomes `p`; the
// parameter's declared type becomes the old class. The rewrite is an
// involution, so moving the method back restores the original corpus.
//
// Throws UnresolvedTarget when the target id is unknown and NotMovable when
// the move cannot be done without changing behavior.
MoveResult perform_move(const Corpus& corpus, std::string_view method_id, std::string_view target_class_id,
                        std::optional<std::size_t> insert_at = std::nullopt);

// Moves the method recorded in `entry` back to its original class and slot.
Corpus undo_move(const Corpus& corpus, const GroundTruthEntry& entry);

struct Injection {
    Corpus corpus;
    std::vector<GroundTruthEntry> ground_truth;  // in the order the moves were applied
};

// Applies up to `moves_per_project` moves per project, drawn in a seeded
// order from the candidates of the unmodified corpus. Each class receives at
// most one moved method and gives up at most two, so class embeddings keep
// their character. Undoing the entries in reverse order restores the input.
Injection inject_moves(const Corpus& corpus, std::size_t moves_per_project, std::uint64_t seed);

struct LabeledExample {
    FeatureVector feature;
    int label = 0;  // 1 iff feature.class_id is the method's original class
};

// For a candidate with t usable targets: t examples (method, target, 0)
// followed by t copies of (method, origin, 1). A target without an embedding
// drops one negative and one positive; a method or origin without one drops
// the candidate. Each drop is described in `skipped` when given.
std::vector<LabeledExample> build_dataset(const Corpus& corpus, const MethodVectors& method_vectors,
                                          std::span<const CandidateMove> candidates,
                                          std::vector<std::string>* skipped = nullptr);

struct DatasetSplit {
    std::vector<LabeledExample> train;
    std::vector<LabeledExample> test;
    std::vector<LabeledExample> validate;
};

// Groups examples by method id, sorts groups canonically, shuffles them with
// `seed`, then assigns round(G/5) groups each to test and validate and the
// rest to train.
DatasetSplit split_dataset(std::vector<LabeledExample> examples, std::uint64_t seed);

}  // namespace moverec
