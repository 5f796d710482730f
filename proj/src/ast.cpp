#include "moverec/ast.hpp"

#include <algorithm>
#include <array>

namespace moverec {

namespace {

constexpr std::array<std::string_view, kNodeKindCount> kKindNames = {
    "ClassDeclaration",    "MethodDeclaration",   "Parameter",          "Block",
    "ReturnStatement",     "IfStatement",         "WhileStatement",     "ExpressionStatement",
    "Assignment",          "BinaryExpression",    "ConditionalExpression",
    "EnclosedExpression",  "MethodCall",          "FieldAccess",        "Name",
    "Literal",             "VariableDeclaration", "Type",
};

}  // namespace

std::string_view kind_name(NodeKind kind) { return kKindNames[static_cast<std::size_t>(kind)]; }

std::optional<NodeKind> kind_from_name(std::string_view name) {
    for (std::size_t i = 0; i < kKindNames.size(); ++i) {
        if (kKindNames[i] == name) return static_cast<NodeKind>(i);
    }
    return std::nullopt;
}

AstNode AstNode::leaf(NodeKind kind, std::string token, SourcePos pos) {
    AstNode node;
    node.kind = kind;
    node.token = std::move(token);
    node.pos = pos;
    return node;
}

AstNode AstNode::inner(NodeKind kind, std::vector<AstNode> children, SourcePos pos) {
    AstNode node;
    node.kind = kind;
    node.children = std::move(children);
    node.pos = pos;
    return node;
}

bool same_structure(const AstNode& a, const AstNode& b) {
    if (a.kind != b.kind || a.token != b.token || a.op != b.op ||
        a.children.size() != b.children.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.children.size(); ++i) {
        if (!same_structure(a.children[i], b.children[i])) return false;
    }
    return true;
}

bool leaf_discipline_ok(const AstNode& node) {
    if (node.token) return node.children.empty();
    if (node.children.empty()) {
        return node.kind == NodeKind::Block || node.kind == NodeKind::ReturnStatement;
    }
    return std::all_of(node.children.begin(), node.children.end(),
                       [](const AstNode& c) { return leaf_discipline_ok(c); });
}

std::size_t count_leaves(const AstNode& node) {
    if (node.is_leaf()) return 1;
    std::size_t n = 0;
    for (const auto& c : node.children) n += count_leaves(c);
    return n;
}

const MethodDecl* ClassDecl::find_method(std::string_view method_name, std::size_t arity) const {
    for (const auto& m : methods) {
        if (m.name == method_name && m.arity() == arity) return &m;
    }
    return nullptr;
}

bool ClassDecl::has_field(std::string_view field_name) const {
    return std::any_of(fields.begin(), fields.end(),
                       [&](const Field& f) { return f.name == field_name; });
}

bool ClassDecl::has_method_named(std::string_view method_name) const {
    return std::any_of(methods.begin(), methods.end(),
                       [&](const MethodDecl& m) { return m.name == method_name; });
}

std::string make_class_id(std::string_view file_path, std::string_view class_name) {
    std::string id(file_path);
    id += ':';
    id += class_name;
    return id;
}

std::string make_method_id(std::string_view file_path, std::string_view class_name,
                           std::string_view method_name, std::size_t arity) {
    std::string id = make_class_id(file_path, class_name);
    id += '.';
    id += method_name;
    id += '/';
    id += std::to_string(arity);
    return id;
}

void assign_ids(SourceUnit& unit) {
    for (auto& cls : unit.classes) {
        cls.id = make_class_id(unit.file_path, cls.name);
        for (auto& m : cls.methods) {
            m.id = make_method_id(unit.file_path, cls.name, m.name, m.arity());
        }
    }
}

AstNode class_tree(const ClassDecl& cls) {
    std::vector<AstNode> members;
    members.push_back(AstNode::leaf(NodeKind::Name, cls.name));
    for (const auto& f : cls.fields) {
        members.push_back(AstNode::inner(
            NodeKind::VariableDeclaration,
            {AstNode::leaf(NodeKind::Type, f.type), AstNode::leaf(NodeKind::Name, f.name)}));
    }
    for (const auto& m : cls.methods) {
        std::vector<AstNode> parts;
        if (!m.is_constructor) parts.push_back(AstNode::leaf(NodeKind::Type, m.return_type));
        parts.push_back(AstNode::leaf(NodeKind::Name, m.name));
        for (const auto& p : m.params) {
            parts.push_back(AstNode::inner(
                NodeKind::Parameter,
                {AstNode::leaf(NodeKind::Type, p.type), AstNode::leaf(NodeKind::Name, p.name)}));
        }
        parts.push_back(m.body);
        AstNode decl = AstNode::inner(NodeKind::MethodDeclaration, std::move(parts));
        if (m.is_static) decl.op = "static";
        if (m.is_constructor) decl.op = "constructor";
        members.push_back(std::move(decl));
    }
    return AstNode::inner(NodeKind::ClassDeclaration, std::move(members));
}

bool same_structure(const SourceUnit& a, const SourceUnit& b) {
    if (a.classes.size() != b.classes.size()) return false;
    for (std::size_t i = 0; i < a.classes.size(); ++i) {
        if (!same_structure(class_tree(a.classes[i]), class_tree(b.classes[i]))) return false;
    }
    return true;
}

}  // namespace moverec
