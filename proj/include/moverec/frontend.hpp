#pragma once

#include <string>
#include <string_view>

#include "moverec/ast.hpp"

namespace moverec {

// Parses the supported Java subset: top-level classes with fields, methods
// and constructors; block, local declaration, assignment, if/else, while,
// return and call statements; literal, name, field access, call, binary,
// ternary and parenthesized expressions.
//
// Generics, arrays, inheritance, interfaces, imports, packages, visibility
// modifiers and unary operators raise SyntaxError instead of being skipped.
// A class repeating a (name, arity) signature raises DuplicateSignature.
SourceUnit parse_unit(std::string_view source_text, std::string_view file_path);

// Canonical source text; parse_unit(print_unit(u)) is structurally equal to u
// for any u produced by parse_unit.
std::string print_unit(const SourceUnit& unit);

std::string print_expression(const AstNode& expr);

}  // namespace moverec
