#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "moverec/error.hpp"

namespace moverec {

// Closed set of node labels. The first sixteen follow the labels of the
// path-based representation; VariableDeclaration and Type cover local
// declarations and type names, which the subset grammar also needs.
enum class NodeKind : std::uint8_t {
    ClassDeclaration,
    MethodDeclaration,
    Parameter,
    Block,
    ReturnStatement,
    IfStatement,
    WhileStatement,
    ExpressionStatement,
    Assignment,
    BinaryExpression,
    ConditionalExpression,
    EnclosedExpression,
    MethodCall,
    FieldAccess,
    Name,
    Literal,
    VariableDeclaration,
    Type,
};

inline constexpr std::size_t kNodeKindCount = 18;

std::string_view kind_name(NodeKind kind);
std::optional<NodeKind> kind_from_name(std::string_view name);

// Child layout per kind:
//   Block                 statements...
//   ReturnStatement       [expr]
//   IfStatement           cond, then, [else]
//   WhileStatement        cond, body
//   ExpressionStatement   expr (Assignment or MethodCall)
//   VariableDeclaration   Type, Name, [init]
//   Assignment            target (Name | FieldAccess), value
//   BinaryExpression      lhs, rhs             (operator in `op`)
//   ConditionalExpression cond, then, else
//   EnclosedExpression    expr
//   MethodCall            callee (Name | FieldAccess), args...
//   FieldAccess           qualifier, Name
//   Name, Literal, Type   leaf with token
struct AstNode {
    NodeKind kind = NodeKind::Block;
    std::vector<AstNode> children;
    std::optional<std::string> token;
    std::string op;
    SourcePos pos;

    static AstNode leaf(NodeKind kind, std::string token, SourcePos pos = {});
    static AstNode inner(NodeKind kind, std::vector<AstNode> children, SourcePos pos = {});

    bool is_leaf() const noexcept { return token.has_value(); }
    const std::string& text() const { return *token; }
};

// Labels, child order, tokens and operators; positions are ignored.
bool same_structure(const AstNode& a, const AstNode& b);

// Token present iff no children. Empty blocks and `return;` are the only
// childless nodes allowed to carry no token.
bool leaf_discipline_ok(const AstNode& node);

std::size_t count_leaves(const AstNode& node);

struct Param {
    std::string name;
    std::string type;
    friend bool operator==(const Param&, const Param&) = default;
};

struct Field {
    std::string name;
    std::string type;
    friend bool operator==(const Field&, const Field&) = default;
};

struct MethodDecl {
    std::string name;
    std::vector<Param> params;
    std::string return_type;  // empty for constructors
    bool is_static = false;
    bool is_constructor = false;
    AstNode body;             // always a Block
    std::string id;
    SourcePos pos;

    std::size_t arity() const noexcept { return params.size(); }
};

struct ClassDecl {
    std::string name;
    std::vector<Field> fields;
    std::vector<MethodDecl> methods;
    std::string id;
    SourcePos pos;

    const MethodDecl* find_method(std::string_view name, std::size_t arity) const;
    bool has_field(std::string_view name) const;
    bool has_method_named(std::string_view name) const;
};

struct SourceUnit {
    std::string file_path;
    std::vector<ClassDecl> classes;
};

std::string make_class_id(std::string_view file_path, std::string_view class_name);
std::string make_method_id(std::string_view file_path, std::string_view class_name,
                           std::string_view method_name, std::size_t arity);

// Recomputes class and method ids from the unit's file path.
void assign_ids(SourceUnit& unit);

// Full declaration tree (ClassDeclaration > MethodDeclaration > ...), used for
// structural comparison of whole units.
AstNode class_tree(const ClassDecl& cls);
bool same_structure(const SourceUnit& a, const SourceUnit& b);

}  // namespace moverec
