#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "moverec/ast.hpp"

namespace moverec {

enum class Direction : std::uint8_t { Up, Down };

// Node labels from the start leaf to the end leaf, both included.
// nodes[ascent] is the lowest common ancestor; the first `ascent` arrows
// point up and the rest point down.
struct AstPath {
    std::vector<NodeKind> nodes;
    std::size_t ascent = 0;

    std::size_t length() const noexcept { return nodes.size(); }
    Direction arrow(std::size_t i) const noexcept { return i < ascent ? Direction::Up : Direction::Down; }

    friend auto operator<=>(const AstPath&, const AstPath&) = default;
    friend bool operator==(const AstPath&, const AstPath&) = default;
};

struct PathContext {
    std::string start;
    AstPath path;
    std::string end;

    friend auto operator<=>(const PathContext&, const PathContext&) = default;
    friend bool operator==(const PathContext&, const PathContext&) = default;
};

inline constexpr std::size_t kUnlimited = std::numeric_limits<std::size_t>::max();
inline constexpr std::string_view kMethodNamePlaceholder = "METHOD_NAME";

struct ExtractionLimits {
    std::size_t max_length = 8;
    std::size_t max_width = 2;
    std::size_t max_contexts = 200;
    std::uint64_t seed = 0;

    static ExtractionLimits unlimited() { return {kUnlimited, kUnlimited, kUnlimited, 0}; }
    void validate() const;
};

struct ContextBag {
    std::string method_id;
    std::vector<PathContext> contexts;
    bool empty_body = false;  // the body had fewer than two leaves
};

std::string normalize_token(const AstNode& leaf);

// "Name↑BinaryExpression↓Name" style rendering.
std::string path_to_string(const AstPath& path);

// "start,path,end"
std::string context_to_string(const PathContext& ctx);

// All leaf pairs of the method body, ordered by source position, whose path
// satisfies the length and width limits, down-sampled to max_contexts with a
// seed derived from limits.seed and the method id. Leaves spelling the
// method's own name are masked with METHOD_NAME.
ContextBag extract_contexts(const MethodDecl& method, const ExtractionLimits& limits);

// Stable 64-bit FNV-1a, used to derive per-method sampling seeds.
std::uint64_t stable_hash(std::string_view text);

}  // namespace moverec
