#include <string>

#include "moverec/frontend.hpp"

namespace moverec {

namespace {

int precedence_of(const AstNode& e) {
    if (e.kind == NodeKind::ConditionalExpression) return 0;
    if (e.kind != NodeKind::BinaryExpression) return 100;
    const std::string& op = e.op;
    if (op == "||") return 1;
    if (op == "&&") return 2;
    if (op == "==" || op == "!=") return 3;
    if (op == "<" || op == ">" || op == "<=" || op == ">=") return 4;
    if (op == "+" || op == "-") return 5;
    return 6;
}

void write_expr(const AstNode& e, std::string& out);

// Parse trees never need these parentheses; they only matter for trees built
// by hand that would otherwise print ambiguously.
void write_operand(const AstNode& e, int min_prec, std::string& out) {
    if (precedence_of(e) < min_prec) {
        out += '(';
        write_expr(e, out);
        out += ')';
    } else {
        write_expr(e, out);
    }
}

void write_args(const AstNode& call, std::string& out) {
    out += '(';
    for (std::size_t i = 1; i < call.children.size(); ++i) {
        if (i > 1) out += ", ";
        write_expr(call.children[i], out);
    }
    out += ')';
}

void write_expr(const AstNode& e, std::string& out) {
    switch (e.kind) {
        case NodeKind::Name:
        case NodeKind::Literal:
        case NodeKind::Type:
            out += e.text();
            break;
        case NodeKind::EnclosedExpression:
            out += '(';
            write_expr(e.children.at(0), out);
            out += ')';
            break;
        case NodeKind::BinaryExpression: {
            int prec = precedence_of(e);
            write_operand(e.children.at(0), prec, out);
            out += ' ';
            out += e.op;
            out += ' ';
            write_operand(e.children.at(1), prec + 1, out);
            break;
        }
        case NodeKind::ConditionalExpression:
            write_operand(e.children.at(0), 1, out);
            out += " ? ";
            write_expr(e.children.at(1), out);
            out += " : ";
            write_operand(e.children.at(2), 0, out);
            break;
        case NodeKind::FieldAccess:
            write_operand(e.children.at(0), 100, out);
            out += '.';
            write_expr(e.children.at(1), out);
            break;
        case NodeKind::MethodCall:
            write_expr(e.children.at(0), out);
            write_args(e, out);
            break;
        case NodeKind::Assignment:
            write_expr(e.children.at(0), out);
            out += " = ";
            write_expr(e.children.at(1), out);
            break;
        default:
            throw InternalError("cannot print " + std::string(kind_name(e.kind)) + " as an expression");
    }
}

class StatementWriter {
public:
    explicit StatementWriter(std::string& out) : out_(out) {}

    void statement(const AstNode& s, int depth, bool indent_first = true) {
        if (indent_first) indent(depth);
        switch (s.kind) {
            case NodeKind::Block:
                out_ += "{\n";
                for (const auto& c : s.children) statement(c, depth + 1);
                indent(depth);
                out_ += "}\n";
                break;
            case NodeKind::IfStatement: {
                out_ += "if (";
                write_expr(s.children.at(0), out_);
                out_ += ')';
                bool braced = branch(s.children.at(1), depth);
                if (s.children.size() > 2) {
                    if (braced) {
                        out_ += " else";
                    } else {
                        indent(depth);
                        out_ += "else";
                    }
                    const AstNode& alt = s.children[2];
                    if (alt.kind == NodeKind::IfStatement) {
                        out_ += ' ';
                        statement(alt, depth, false);
                    } else if (branch(alt, depth)) {
                        out_ += '\n';
                    }
                } else if (braced) {
                    out_ += '\n';
                }
                break;
            }
            case NodeKind::WhileStatement:
                out_ += "while (";
                write_expr(s.children.at(0), out_);
                out_ += ')';
                if (branch(s.children.at(1), depth)) out_ += '\n';
                break;
            case NodeKind::ReturnStatement:
                out_ += "return";
                if (!s.children.empty()) {
                    out_ += ' ';
                    write_expr(s.children[0], out_);
                }
                out_ += ";\n";
                break;
            case NodeKind::ExpressionStatement:
                write_expr(s.children.at(0), out_);
                out_ += ";\n";
                break;
            case NodeKind::VariableDeclaration:
                out_ += s.children.at(0).text();
                out_ += ' ';
                out_ += s.children.at(1).text();
                if (s.children.size() > 2) {
                    out_ += " = ";
                    write_expr(s.children[2], out_);
                }
                out_ += ";\n";
                break;
            default:
                throw InternalError("cannot print " + std::string(kind_name(s.kind)) + " as a statement");
        }
    }

    // Writes a nested branch; returns true when it ended on an inline "}".
    bool branch(const AstNode& s, int depth) {
        if (s.kind == NodeKind::Block) {
            out_ += " {\n";
            for (const auto& c : s.children) statement(c, depth + 1);
            indent(depth);
            out_ += '}';
            return true;
        }
        out_ += '\n';
        statement(s, depth + 1);
        return false;
    }

    void indent(int depth) { out_.append(static_cast<std::size_t>(depth) * 4, ' '); }

private:
    std::string& out_;
};

}  // namespace

std::string print_expression(const AstNode& expr) {
    std::string out;
    write_expr(expr, out);
    return out;
}

std::string print_unit(const SourceUnit& unit) {
    std::string out;
    StatementWriter writer(out);
    for (std::size_t ci = 0; ci < unit.classes.size(); ++ci) {
        const ClassDecl& cls = unit.classes[ci];
        if (ci > 0) out += '\n';
        out += "class " + cls.name + " {\n";
        for (const auto& f : cls.fields) out += "    " + f.type + " " + f.name + ";\n";
        for (std::size_t mi = 0; mi < cls.methods.size(); ++mi) {
            const MethodDecl& m = cls.methods[mi];
            if (mi > 0 || !cls.fields.empty()) out += '\n';
            out += "    ";
            if (m.is_static) out += "static ";
            if (!m.is_constructor) out += m.return_type + " ";
            out += m.name + "(";
            for (std::size_t pi = 0; pi < m.params.size(); ++pi) {
                if (pi > 0) out += ", ";
                out += m.params[pi].type + " " + m.params[pi].name;
            }
            out += ") {\n";
            for (const auto& s : m.body.children) writer.statement(s, 2);
            out += "    }\n";
        }
        out += "}\n";
    }
    return out;
}

}  // namespace moverec
