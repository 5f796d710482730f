#include "moverec/pathctx.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <random>

namespace moverec {

namespace {

constexpr std::string_view kUpArrow = "\xE2\x86\x91";    // ↑
constexpr std::string_view kDownArrow = "\xE2\x86\x93";  // ↓

struct Step {
    const AstNode* node;
    std::size_t child;
};

struct LeafSite {
    const AstNode* leaf;
    std::vector<Step> trail;  // root .. parent, with the child index taken at each
};

void collect_leaves(const AstNode& node, std::vector<Step>& trail, std::vector<LeafSite>& out) {
    if (node.is_leaf()) {
        out.push_back({&node, trail});
        return;
    }
    for (std::size_t i = 0; i < node.children.size(); ++i) {
        trail.push_back({&node, i});
        collect_leaves(node.children[i], trail, out);
        trail.pop_back();
    }
}

}  // namespace

void ExtractionLimits::validate() const {
    if (max_length == 0 || max_width == 0 || max_contexts == 0) {
        throw ConfigError("extraction limits must be positive");
    }
}

std::uint64_t stable_hash(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string normalize_token(const AstNode& leaf) {
    const std::string& t = leaf.text();
    if (leaf.kind == NodeKind::Literal && !t.empty()) {
        if (std::isdigit(static_cast<unsigned char>(t.front()))) return "NUM";
        if (t.front() == '"') return "STR";
    }
    return t;
}

std::string path_to_string(const AstPath& path) {
    std::string out;
    for (std::size_t i = 0; i < path.nodes.size(); ++i) {
        if (i > 0) out += path.arrow(i - 1) == Direction::Up ? kUpArrow : kDownArrow;
        out += kind_name(path.nodes[i]);
    }
    return out;
}

std::string context_to_string(const PathContext& ctx) {
    return ctx.start + "," + path_to_string(ctx.path) + "," + ctx.end;
}

ContextBag extract_contexts(const MethodDecl& method, const ExtractionLimits& limits) {
    limits.validate();
    ContextBag bag;
    bag.method_id = method.id;

    std::vector<LeafSite> leaves;
    std::vector<Step> trail;
    collect_leaves(method.body, trail, leaves);
    if (leaves.size() < 2) {
        bag.empty_body = true;
        return bag;
    }

    std::vector<std::string> tokens;
    tokens.reserve(leaves.size());
    for (const auto& site : leaves) {
        if (site.leaf->kind == NodeKind::Name && site.leaf->text() == method.name) {
            tokens.emplace_back(kMethodNamePlaceholder);
        } else {
            tokens.push_back(normalize_token(*site.leaf));
        }
    }

    for (std::size_t i = 0; i < leaves.size(); ++i) {
        const auto& a = leaves[i].trail;
        for (std::size_t j = i + 1; j < leaves.size(); ++j) {
            const auto& b = leaves[j].trail;
            std::size_t common = 0;
            while (common < a.size() && common < b.size() && a[common].node == b[common].node) ++common;
            // common >= 1: both trails start at the body root.
            const std::size_t lca = common - 1;
            const std::size_t below_a = a.size() - common;
            const std::size_t below_b = b.size() - common;
            const std::size_t length = below_a + below_b + 3;
            if (length > limits.max_length) continue;
            const std::size_t ca = a[lca].child;
            const std::size_t cb = b[lca].child;
            const std::size_t width = ca > cb ? ca - cb : cb - ca;
            if (width > limits.max_width) continue;

            PathContext ctx;
            ctx.start = tokens[i];
            ctx.end = tokens[j];
            ctx.path.nodes.reserve(length);
            ctx.path.nodes.push_back(leaves[i].leaf->kind);
            for (std::size_t k = a.size(); k-- > common;) ctx.path.nodes.push_back(a[k].node->kind);
            ctx.path.ascent = ctx.path.nodes.size();
            ctx.path.nodes.push_back(a[lca].node->kind);
            for (std::size_t k = common; k < b.size(); ++k) ctx.path.nodes.push_back(b[k].node->kind);
            ctx.path.nodes.push_back(leaves[j].leaf->kind);
            bag.contexts.push_back(std::move(ctx));
        }
    }

    if (bag.contexts.size() > limits.max_contexts) {
        std::vector<std::size_t> order(bag.contexts.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::mt19937_64 rng(limits.seed ^ stable_hash(method.id));
        std::shuffle(order.begin(), order.end(), rng);
        order.resize(limits.max_contexts);
        std::sort(order.begin(), order.end());
        std::vector<PathContext> kept;
        kept.reserve(order.size());
        for (std::size_t idx : order) kept.push_back(std::move(bag.contexts[idx]));
        bag.contexts = std::move(kept);
    }
    return bag;
}

}  // namespace moverec
