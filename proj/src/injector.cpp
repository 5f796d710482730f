#include "moverec/injector.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "moverec/pathctx.hpp"

namespace moverec {

namespace {

constexpr std::string_view kThis = "this";

using NameSet = std::set<std::string, std::less<>>;

bool is_name(const AstNode& n) { return n.kind == NodeKind::Name && n.is_leaf(); }

bool is_name(const AstNode& n, std::string_view token) { return is_name(n) && n.text() == token; }

void collect_locals(const AstNode& node, NameSet& out) {
    if (node.kind == NodeKind::VariableDeclaration && node.children.size() >= 2) out.insert(node.children[1].text());
    for (const auto& c : node.children) collect_locals(c, out);
}

NameSet local_names(const MethodDecl& m) {
    NameSet names;
    for (const auto& p : m.params) names.insert(p.name);
    collect_locals(m.body, names);
    return names;
}

// How a Name leaf is used. Member names after a dot and declared names are
// not references and are never rewritten.
enum class Role { Value, Callee, Member, Declared };

template <typename Fn>
void visit_names(const AstNode& node, Role role, Fn&& fn) {
    if (is_name(node)) {
        fn(node, role);
        return;
    }
    for (std::size_t i = 0; i < node.children.size(); ++i) {
        const AstNode& c = node.children[i];
        Role r = Role::Value;
        if (node.kind == NodeKind::FieldAccess && i == 1) r = Role::Member;
        if (node.kind == NodeKind::MethodCall && i == 0 && is_name(c)) r = Role::Callee;
        if (node.kind == NodeKind::VariableDeclaration && i == 1) r = Role::Declared;
        if (c.kind == NodeKind::Type) continue;
        visit_names(c, r, fn);
    }
}

template <typename Fn>
void visit_names(const AstNode& node, Fn&& fn) {
    visit_names(node, Role::Value, std::forward<Fn>(fn));
}

bool touches_state(const ClassDecl& origin, const MethodDecl& m) {
    const NameSet locals = local_names(m);
    bool hit = false;
    visit_names(m.body, [&](const AstNode& n, Role role) {
        const std::string& t = n.text();
        if (role == Role::Value && (t == kThis || (!locals.contains(t) && origin.has_field(t)))) hit = true;
        if (role == Role::Callee && origin.has_method_named(t)) hit = true;
    });
    return hit;
}

// A Name or `this.name` naming a field of `cls` that no local shadows.
bool is_own_field_ref(const AstNode& n, const ClassDecl& cls, const NameSet& locals) {
    if (is_name(n)) return !locals.contains(n.text()) && cls.has_field(n.text());
    return n.kind == NodeKind::FieldAccess && n.children.size() == 2 && is_name(n.children[0], kThis) &&
           cls.has_field(n.children[1].text());
}

const AstNode* single_statement(const MethodDecl& m) {
    return m.body.children.size() == 1 ? &m.body.children[0] : nullptr;
}

bool is_getter(const ClassDecl& origin, const MethodDecl& m, const NameSet& locals) {
    const AstNode* s = single_statement(m);
    return s && s->kind == NodeKind::ReturnStatement && s->children.size() == 1 &&
           is_own_field_ref(s->children[0], origin, locals);
}

bool is_setter(const ClassDecl& origin, const MethodDecl& m, const NameSet& locals) {
    const AstNode* s = single_statement(m);
    if (!s || s->kind != NodeKind::ExpressionStatement || s->children.size() != 1) return false;
    const AstNode& e = s->children[0];
    return e.kind == NodeKind::Assignment && is_own_field_ref(e.children[0], origin, locals);
}

// One call, returned or evaluated, whose direct arguments include every parameter.
bool is_delegation(const MethodDecl& m) {
    const AstNode* s = single_statement(m);
    if (!s || (s->kind != NodeKind::ReturnStatement && s->kind != NodeKind::ExpressionStatement)) return false;
    if (s->children.size() != 1 || s->children[0].kind != NodeKind::MethodCall) return false;
    const AstNode& call = s->children[0];
    for (const auto& p : m.params) {
        const bool forwarded = std::any_of(call.children.begin() + 1, call.children.end(),
                                           [&](const AstNode& a) { return is_name(a, p.name); });
        if (!forwarded) return false;
    }
    return true;
}

struct Located {
    std::size_t unit = 0;
    std::size_t cls = 0;
    std::size_t method = 0;
};

Located locate_method(const Corpus& corpus, std::string_view method_id) {
    for (std::size_t u = 0; u < corpus.units.size(); ++u) {
        const auto& classes = corpus.units[u].classes;
        for (std::size_t c = 0; c < classes.size(); ++c) {
            const auto& methods = classes[c].methods;
            for (std::size_t m = 0; m < methods.size(); ++m) {
                if (methods[m].id == method_id) return {u, c, m};
            }
        }
    }
    throw NotFound("no method with id " + std::string(method_id));
}

std::optional<std::pair<std::size_t, std::size_t>> locate_class(const Corpus& corpus, std::string_view class_id) {
    for (std::size_t u = 0; u < corpus.units.size(); ++u) {
        const auto& classes = corpus.units[u].classes;
        for (std::size_t c = 0; c < classes.size(); ++c) {
            if (classes[c].id == class_id) return std::pair{u, c};
        }
    }
    return std::nullopt;
}

// Rewrites a body for the swap of receiver and parameter `param`.
// `from` is the class the method leaves, `to` the class it enters.
class SwapRewriter {
public:
    SwapRewriter(const ClassDecl& from, const ClassDecl& to, std::string param, NameSet locals)
        : from_(from), to_(to), param_(std::move(param)), locals_(std::move(locals)) {}

    // Throws NotMovable when the rewritten body would not mean the same thing.
    void check(const MethodDecl& m) const {
        check_node(m.body, m);
        visit_names(m.body, [&](const AstNode& n, Role role) {
            const std::string& t = n.text();
            if (role == Role::Callee && t == m.name) {
                throw NotMovable(m.id + " calls a method of its own name");
            }
            if (role == Role::Value && t != kThis && t != param_ && !locals_.contains(t) && !from_.has_field(t) &&
                to_.has_field(t)) {
                throw NotMovable(m.id + ": name '" + t + "' would be captured by a field of " + to_.name);
            }
            if (role == Role::Callee && !from_.has_method_named(t) && to_.has_method_named(t)) {
                throw NotMovable(m.id + ": call '" + t + "' would be captured by a method of " + to_.name);
            }
        });
    }

    AstNode rewrite(const AstNode& node, Role role = Role::Value) const {
        if (is_name(node)) return rewrite_name(node, role);
        // p.member and p.method(...) lose their qualifier
        if (node.kind == NodeKind::FieldAccess && is_name(node.children[0], param_)) {
            AstNode out = node.children[1];
            out.pos = node.pos;
            return out;
        }
        AstNode out = node;
        for (std::size_t i = 0; i < node.children.size(); ++i) {
            const AstNode& c = node.children[i];
            if (c.kind == NodeKind::Type) continue;
            Role r = Role::Value;
            if (node.kind == NodeKind::FieldAccess && i == 1) r = Role::Member;
            if (node.kind == NodeKind::MethodCall && i == 0 && is_name(c)) r = Role::Callee;
            if (node.kind == NodeKind::VariableDeclaration && i == 1) r = Role::Declared;
            out.children[i] = rewrite(c, r);
        }
        return out;
    }

private:
    void check_node(const AstNode& node, const MethodDecl& m) const {
        if (node.kind == NodeKind::FieldAccess && node.children.size() == 2) {
            const AstNode& q = node.children[0];
            const std::string& member = node.children[1].text();
            if (is_name(q, kThis)) throw NotMovable(m.id + " uses an explicit this-qualified member");
            if (is_name(q, param_)) {
                if (member == m.name) throw NotMovable(m.id + " calls a method of its own name");
                if (!to_.has_field(member) && !to_.has_method_named(member)) {
                    throw NotMovable(m.id + ": " + param_ + "." + member + " is not a member of " + to_.name);
                }
                if (locals_.contains(member)) {
                    throw NotMovable(m.id + ": member '" + member + "' is shadowed by a local");
                }
            }
        }
        for (const auto& c : node.children) check_node(c, m);
    }

    AstNode qualified(const AstNode& name) const {
        return AstNode::inner(NodeKind::FieldAccess, {AstNode::leaf(NodeKind::Name, param_, name.pos), name}, name.pos);
    }

    AstNode rewrite_name(const AstNode& n, Role role) const {
        const std::string& t = n.text();
        if (role == Role::Value) {
            if (t == kThis) return AstNode::leaf(NodeKind::Name, param_, n.pos);
            if (t == param_) return AstNode::leaf(NodeKind::Name, std::string(kThis), n.pos);
            if (!locals_.contains(t) && from_.has_field(t)) return qualified(n);
        }
        if (role == Role::Callee && from_.has_method_named(t)) return qualified(n);
        return n;
    }

    const ClassDecl& from_;
    const ClassDecl& to_;
    std::string param_;
    NameSet locals_;
};

}  // namespace

std::string_view filter_name(MoveFilter f) {
    switch (f) {
        case MoveFilter::Movable: return "movable";
        case MoveFilter::Static: return "static";
        case MoveFilter::Constructor: return "constructor";
        case MoveFilter::Empty: return "empty";
        case MoveFilter::Delegation: return "delegation";
        case MoveFilter::Parameterless: return "parameterless";
        case MoveFilter::Getter: return "getter";
        case MoveFilter::Setter: return "setter";
        case MoveFilter::TouchesOriginState: return "touches-origin-state";
        case MoveFilter::NoTargets: return "no-targets";
    }
    return "unknown";
}

std::vector<std::string> target_classes(const ClassDecl& origin, const MethodDecl& method, const ClassIndex& classes,
                                        std::string_view project) {
    std::vector<std::string> out;
    for (const auto& p : method.params) {
        const ClassDecl* c = classes.resolve(project, p.type);
        if (!c || c->id == origin.id) continue;
        if (std::find(out.begin(), out.end(), c->id) == out.end()) out.push_back(c->id);
    }
    return out;
}

MoveFilter classify_method(const ClassDecl& origin, const MethodDecl& method, const ClassIndex& classes,
                           std::string_view project, const FilterOptions& options) {
    if (method.is_static) return MoveFilter::Static;
    if (method.is_constructor) return MoveFilter::Constructor;
    if (method.body.children.empty()) return MoveFilter::Empty;
    if (is_delegation(method)) return MoveFilter::Delegation;
    if (method.params.empty()) return MoveFilter::Parameterless;
    const NameSet locals = local_names(method);
    if (is_getter(origin, method, locals)) return MoveFilter::Getter;
    if (is_setter(origin, method, locals)) return MoveFilter::Setter;
    if (options.exclude_origin_state && touches_state(origin, method)) return MoveFilter::TouchesOriginState;
    if (target_classes(origin, method, classes, project).empty()) return MoveFilter::NoTargets;
    return MoveFilter::Movable;
}

std::vector<CandidateMove> find_movable(const Corpus& corpus, const FilterOptions& options) {
    const ClassIndex classes(corpus);
    std::vector<CandidateMove> out;
    for (const auto& unit : corpus.units) {
        const std::string project = project_of(unit.file_path);
        for (const auto& cls : unit.classes) {
            for (const auto& m : cls.methods) {
                if (classify_method(cls, m, classes, project, options) != MoveFilter::Movable) continue;
                out.push_back({m.id, cls.id, target_classes(cls, m, classes, project)});
            }
        }
    }
    return out;
}

MoveResult perform_move(const Corpus& corpus, std::string_view method_id, std::string_view target_class_id,
                        std::optional<std::size_t> insert_at) {
    const Located at = locate_method(corpus, method_id);
    const auto target_at = locate_class(corpus, target_class_id);
    if (!target_at) throw UnresolvedTarget("no class with id " + std::string(target_class_id));

    const ClassDecl& from = corpus.units[at.unit].classes[at.cls];
    const ClassDecl& to = corpus.units[target_at->first].classes[target_at->second];
    const MethodDecl& method = from.methods[at.method];
    const std::string mid(method_id);

    if (from.id == to.id) throw NotMovable(mid + " already belongs to " + to.id);
    if (project_of(from.id) != project_of(to.id)) throw NotMovable(mid + ": target is in another project");
    if (method.is_static || method.is_constructor) throw NotMovable(mid + " is static or a constructor");

    // The swapped parameter is the first of the target type; no earlier one
    // may have the origin type, or the reverse move would pick it instead.
    std::optional<std::size_t> swap;
    for (std::size_t i = 0; i < method.params.size(); ++i) {
        const std::string& type = method.params[i].type;
        if (type == to.name) {
            swap = i;
            break;
        }
        if (type == from.name) throw NotMovable(mid + ": a parameter of the origin type precedes the target");
    }
    if (!swap) throw NotMovable(mid + " has no parameter of type " + to.name);
    if (to.find_method(method.name, method.arity())) {
        throw NotMovable(mid + ": " + to.id + " already declares " + method.name + "/" +
                         std::to_string(method.arity()));
    }

    const std::string& pname = method.params[*swap].name;
    SwapRewriter rewriter(from, to, pname, local_names(method));
    rewriter.check(method);

    MethodDecl moved = method;
    moved.body = rewriter.rewrite(method.body);
    moved.params[*swap].type = from.name;

    MoveResult result{corpus, {}};
    auto& src_cls = result.corpus.units[at.unit].classes[at.cls];
    auto& dst_cls = result.corpus.units[target_at->first].classes[target_at->second];
    src_cls.methods.erase(src_cls.methods.begin() + static_cast<std::ptrdiff_t>(at.method));
    std::size_t pos = std::min(insert_at.value_or(dst_cls.methods.size()), dst_cls.methods.size());
    dst_cls.methods.insert(dst_cls.methods.begin() + static_cast<std::ptrdiff_t>(pos), std::move(moved));

    assign_ids(result.corpus.units[at.unit]);
    assign_ids(result.corpus.units[target_at->first]);

    const MethodDecl& placed = dst_cls.methods[pos];
    result.entry = {placed.id, src_cls.id, dst_cls.id, at.method};
    return result;
}

Corpus undo_move(const Corpus& corpus, const GroundTruthEntry& entry) {
    return perform_move(corpus, entry.moved_method_id, entry.original_class_id, entry.original_index).corpus;
}

Injection inject_moves(const Corpus& corpus, std::size_t moves_per_project, std::uint64_t seed) {
    std::map<std::string, std::vector<CandidateMove>> by_project;
    for (auto& c : find_movable(corpus)) by_project[project_of(c.method_id)].push_back(std::move(c));

    Injection out{corpus, {}};
    for (auto& [project, candidates] : by_project) {
        std::mt19937_64 rng(seed ^ stable_hash(project));
        std::shuffle(candidates.begin(), candidates.end(), rng);
        std::set<std::string> received;
        std::map<std::string, std::size_t> given;
        std::size_t done = 0;
        for (const auto& cand : candidates) {
            if (done == moves_per_project) break;
            if (given[cand.origin_class_id] >= 2) continue;
            const ClassRef origin = find_class(out.corpus, cand.origin_class_id);
            if (origin.cls->methods.size() < 3) continue;
            for (const auto& tid : cand.target_class_ids) {
                if (received.contains(tid)) continue;
                try {
                    MoveResult r = perform_move(out.corpus, cand.method_id, tid);
                    out.corpus = std::move(r.corpus);
                    out.ground_truth.push_back(std::move(r.entry));
                    received.insert(tid);
                    ++given[cand.origin_class_id];
                    ++done;
                    break;
                } catch (const NotMovable&) {
                }
            }
        }
    }
    return out;
}

std::vector<LabeledExample> build_dataset(const Corpus& corpus, const MethodVectors& method_vectors,
                                          std::span<const CandidateMove> candidates,
                                          std::vector<std::string>* skipped) {
    auto note = [&](std::string msg) {
        if (skipped) skipped->push_back(std::move(msg));
    };
    std::vector<LabeledExample> out;
    for (const auto& cand : candidates) {
        auto mv = method_vectors.find(cand.method_id);
        if (mv == method_vectors.end()) {
            note(cand.method_id + ": method has no embedding");
            continue;
        }
        const ClassRef origin = find_class(corpus, cand.origin_class_id);
        Vector origin_vec;
        try {
            origin_vec = class_embedding(*origin.cls, method_vectors, cand.method_id);
        } catch (const NoMethods&) {
            note(cand.method_id + ": origin " + cand.origin_class_id + " has no other embedded method");
            continue;
        }
        std::size_t negatives = 0;
        for (const auto& tid : cand.target_class_ids) {
            const ClassRef target = find_class(corpus, tid);
            try {
                Vector tv = class_embedding(*target.cls, method_vectors);
                out.push_back({make_pair_vector(mv->second, tv, cand.method_id, tid), 0});
                ++negatives;
            } catch (const NoMethods&) {
                note(cand.method_id + ": target " + tid + " has no embedded method");
            }
        }
        for (std::size_t i = 0; i < negatives; ++i) {
            out.push_back({make_pair_vector(mv->second, origin_vec, cand.method_id, cand.origin_class_id), 1});
        }
    }
    return out;
}

DatasetSplit split_dataset(std::vector<LabeledExample> examples, std::uint64_t seed) {
    std::map<std::string, std::vector<LabeledExample>> groups;
    for (auto& ex : examples) groups[ex.feature.method_id].push_back(std::move(ex));
    if (groups.size() < 5) {
        throw TooFew("split needs at least 5 method groups, got " + std::to_string(groups.size()));
    }
    std::vector<std::vector<LabeledExample>*> order;
    for (auto& [id, g] : groups) {
        std::stable_sort(g.begin(), g.end(), [](const LabeledExample& a, const LabeledExample& b) {
            if (a.feature.class_id != b.feature.class_id) return a.feature.class_id < b.feature.class_id;
            return a.label < b.label;
        });
        order.push_back(&g);
    }
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);

    const std::size_t g = order.size();
    // Nearest integer to G/5 keeps every part within one group of 3:1:1.
    const std::size_t n_test = (2 * g + 5) / 10;
    const std::size_t n_val = n_test;
    const std::size_t n_train = g - n_test - n_val;

    DatasetSplit split;
    for (std::size_t i = 0; i < g; ++i) {
        auto& dst = i < n_train ? split.train : (i < n_train + n_test ? split.test : split.validate);
        for (auto& ex : *order[i]) dst.push_back(std::move(ex));
    }
    return split;
}

}  // namespace moverec
