#include <cctype>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include "moverec/frontend.hpp"

namespace moverec {

namespace {

enum class Tok { Ident, Keyword, Rejected, Number, String, Punct, End };

struct Token {
    Tok kind;
    std::string text;
    SourcePos pos;
};

const std::unordered_set<std::string>& accepted_keywords() {
    static const std::unordered_set<std::string> words = {
        "class", "static", "if", "else", "while", "return", "true", "false", "null", "this"};
    return words;
}

const std::unordered_set<std::string>& rejected_keywords() {
    static const std::unordered_set<std::string> words = {
        "abstract", "assert",    "break",      "case",      "catch",   "continue",
        "default",  "do",        "enum",       "extends",   "final",   "finally",
        "for",      "goto",      "implements", "import",    "instanceof", "interface",
        "native",   "new",       "package",    "private",   "protected", "public",
        "super",    "switch",    "synchronized", "throw",   "throws",  "transient",
        "try",      "volatile",  "const",      "strictfp"};
    return words;
}

class Lexer {
public:
    Lexer(std::string_view src, std::string_view file) : src_(src), file_(file) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        for (;;) {
            skip_space_and_comments();
            SourcePos pos{line_, col_};
            if (at_end()) {
                out.push_back({Tok::End, "", pos});
                return out;
            }
            const char c = peek();
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$') {
                std::string word;
                while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) ||
                                     peek() == '_' || peek() == '$')) {
                    word += advance();
                }
                Tok kind = Tok::Ident;
                if (accepted_keywords().count(word)) kind = Tok::Keyword;
                if (rejected_keywords().count(word)) kind = Tok::Rejected;
                out.push_back({kind, std::move(word), pos});
            } else if (std::isdigit(static_cast<unsigned char>(c))) {
                std::string num;
                while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) num += advance();
                if (!at_end() && peek() == '.' && pos_ + 1 < src_.size() &&
                    std::isdigit(static_cast<unsigned char>(src_[pos_ + 1]))) {
                    num += advance();
                    while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) {
                        num += advance();
                    }
                }
                if (!at_end() && (std::isalpha(static_cast<unsigned char>(peek())) || peek() == '_')) {
                    throw SyntaxError(file_, {line_, col_}, "unsupported numeric literal suffix");
                }
                out.push_back({Tok::Number, std::move(num), pos});
            } else if (c == '"') {
                std::string str;
                str += advance();
                for (;;) {
                    if (at_end() || peek() == '\n') {
                        throw SyntaxError(file_, pos, "unterminated string literal");
                    }
                    char ch = advance();
                    str += ch;
                    if (ch == '\\') {
                        if (at_end()) throw SyntaxError(file_, pos, "unterminated string literal");
                        str += advance();
                    } else if (ch == '"') {
                        break;
                    }
                }
                out.push_back({Tok::String, std::move(str), pos});
            } else {
                out.push_back({Tok::Punct, punct(pos), pos});
            }
        }
    }

private:
    bool at_end() const { return pos_ >= src_.size(); }
    char peek() const { return src_[pos_]; }

    char advance() {
        char c = src_[pos_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }

    void skip_space_and_comments() {
        while (!at_end()) {
            if (std::isspace(static_cast<unsigned char>(peek()))) {
                advance();
            } else if (src_.substr(pos_, 2) == "//") {
                while (!at_end() && peek() != '\n') advance();
            } else if (src_.substr(pos_, 2) == "/*") {
                SourcePos start{line_, col_};
                advance();
                advance();
                while (!at_end() && src_.substr(pos_, 2) != "*/") advance();
                if (at_end()) throw SyntaxError(file_, start, "unterminated comment");
                advance();
                advance();
            } else {
                return;
            }
        }
    }

    std::string punct(SourcePos pos) {
        static const std::vector<std::string> two = {"==", "!=", "<=", ">=", "&&", "||", "++",
                                                     "--", "+=", "-=", "*=", "/=", "%=", "->", "::"};
        for (const auto& p : two) {
            if (src_.substr(pos_, 2) == p) {
                advance();
                advance();
                return p;
            }
        }
        static const std::string single = "{}();,.=?:+-*/%<>!&|[]@~^";
        if (single.find(peek()) == std::string::npos) {
            throw SyntaxError(file_, pos, std::string("unexpected character '") + peek() + "'");
        }
        return std::string(1, advance());
    }

    std::string_view src_;
    std::string file_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t col_ = 1;
};

int binary_precedence(const std::string& op) {
    if (op == "||") return 1;
    if (op == "&&") return 2;
    if (op == "==" || op == "!=") return 3;
    if (op == "<" || op == ">" || op == "<=" || op == ">=") return 4;
    if (op == "+" || op == "-") return 5;
    if (op == "*" || op == "/" || op == "%") return 6;
    return 0;
}

class Parser {
public:
    Parser(std::vector<Token> tokens, std::string file) : toks_(std::move(tokens)), file_(std::move(file)) {}

    SourceUnit unit() {
        SourceUnit u;
        u.file_path = file_;
        std::set<std::string> names;
        while (peek().kind != Tok::End) {
            ClassDecl cls = class_decl();
            if (!names.insert(cls.name).second) {
                throw DuplicateSignature(file_ + ":" + std::to_string(cls.pos.line) + ":" +
                                         std::to_string(cls.pos.column) + ": duplicate class '" +
                                         cls.name + "'");
            }
            u.classes.push_back(std::move(cls));
        }
        assign_ids(u);
        return u;
    }

private:
    const Token& peek(std::size_t ahead = 0) const {
        std::size_t i = std::min(idx_ + ahead, toks_.size() - 1);
        return toks_[i];
    }

    const Token& next() {
        const Token& t = toks_[idx_];
        if (idx_ + 1 < toks_.size()) ++idx_;
        return t;
    }

    [[noreturn]] void fail(const Token& t, const std::string& msg) const {
        throw SyntaxError(file_, t.pos, msg);
    }

    [[noreturn]] void unexpected(const Token& t, const std::string& expected) const {
        if (t.kind == Tok::Rejected) fail(t, "unsupported construct '" + t.text + "'");
        if (t.kind == Tok::End) fail(t, "unexpected end of input, expected " + expected);
        fail(t, "unexpected '" + t.text + "', expected " + expected);
    }

    bool is_punct(const Token& t, std::string_view p) const { return t.kind == Tok::Punct && t.text == p; }
    bool is_keyword(const Token& t, std::string_view k) const { return t.kind == Tok::Keyword && t.text == k; }

    bool accept_punct(std::string_view p) {
        if (is_punct(peek(), p)) {
            next();
            return true;
        }
        return false;
    }

    void expect_punct(std::string_view p) {
        if (!accept_punct(p)) unexpected(peek(), "'" + std::string(p) + "'");
    }

    std::string ident(const std::string& what) {
        const Token& t = peek();
        if (t.kind != Tok::Ident) unexpected(t, what);
        return next().text;
    }

    std::string type_name() {
        std::string name = ident("type name");
        const Token& t = peek();
        if (is_punct(t, "<")) fail(t, "generic types are not supported");
        if (is_punct(t, "[")) fail(t, "array types are not supported");
        return name;
    }

    ClassDecl class_decl() {
        const Token& kw = peek();
        if (!is_keyword(kw, "class")) unexpected(kw, "'class'");
        next();
        ClassDecl cls;
        cls.pos = kw.pos;
        cls.name = ident("class name");
        if (is_punct(peek(), "<")) fail(peek(), "generic classes are not supported");
        expect_punct("{");
        std::set<std::pair<std::string, std::size_t>> signatures;
        std::set<std::string> field_names;
        while (!accept_punct("}")) {
            if (peek().kind == Tok::End) unexpected(peek(), "'}'");
            member(cls, signatures, field_names);
        }
        return cls;
    }

    void member(ClassDecl& cls, std::set<std::pair<std::string, std::size_t>>& signatures,
                std::set<std::string>& field_names) {
        const Token start = peek();
        bool is_static = false;
        if (is_keyword(start, "static")) {
            next();
            is_static = true;
        }
        MethodDecl m;
        m.pos = start.pos;
        m.is_static = is_static;
        if (peek().kind == Tok::Ident && peek().text == cls.name && is_punct(peek(1), "(")) {
            if (is_static) fail(start, "static constructors are not supported");
            m.is_constructor = true;
            m.name = next().text;
        } else {
            std::string type = type_name();
            const Token& name_tok = peek();
            std::string name = ident("member name");
            if (accept_punct(";")) {
                if (is_static) fail(start, "static fields are not supported");
                if (!field_names.insert(name).second) fail(name_tok, "duplicate field '" + name + "'");
                cls.fields.push_back({name, type});
                return;
            }
            if (is_punct(peek(), "=")) fail(peek(), "field initializers are not supported");
            m.return_type = std::move(type);
            m.name = std::move(name);
        }
        expect_punct("(");
        if (!accept_punct(")")) {
            do {
                Param p;
                p.type = type_name();
                p.name = ident("parameter name");
                m.params.push_back(std::move(p));
            } while (accept_punct(","));
            expect_punct(")");
        }
        if (!is_punct(peek(), "{")) unexpected(peek(), "method body");
        m.body = block();
        if (!signatures.insert({m.name, m.arity()}).second) {
            throw DuplicateSignature(file_ + ":" + std::to_string(m.pos.line) + ":" +
                                     std::to_string(m.pos.column) + ": duplicate method signature " +
                                     cls.name + "." + m.name + "/" + std::to_string(m.arity()));
        }
        cls.methods.push_back(std::move(m));
    }

    AstNode block() {
        const Token& open = peek();
        expect_punct("{");
        AstNode node = AstNode::inner(NodeKind::Block, {}, open.pos);
        while (!accept_punct("}")) {
            if (peek().kind == Tok::End) unexpected(peek(), "'}'");
            node.children.push_back(statement());
        }
        return node;
    }

    bool looks_like_local_decl() const {
        if (peek().kind != Tok::Ident) return false;
        if (peek(1).kind == Tok::Ident) return true;
        if (is_punct(peek(1), "[") && is_punct(peek(2), "]")) return true;
        // `List<String> x` style declarations
        return is_punct(peek(1), "<") && peek(2).kind == Tok::Ident &&
               (is_punct(peek(3), ">") || is_punct(peek(3), ","));
    }

    AstNode statement() {
        const Token& t = peek();
        if (is_punct(t, "{")) return block();
        if (is_keyword(t, "if")) {
            next();
            expect_punct("(");
            AstNode cond = expression();
            expect_punct(")");
            AstNode node = AstNode::inner(NodeKind::IfStatement, {}, t.pos);
            node.children.push_back(std::move(cond));
            node.children.push_back(statement());
            if (is_keyword(peek(), "else")) {
                next();
                node.children.push_back(statement());
            }
            return node;
        }
        if (is_keyword(t, "while")) {
            next();
            expect_punct("(");
            AstNode cond = expression();
            expect_punct(")");
            AstNode node = AstNode::inner(NodeKind::WhileStatement, {}, t.pos);
            node.children.push_back(std::move(cond));
            node.children.push_back(statement());
            return node;
        }
        if (is_keyword(t, "return")) {
            next();
            AstNode node = AstNode::inner(NodeKind::ReturnStatement, {}, t.pos);
            if (!accept_punct(";")) {
                node.children.push_back(expression());
                expect_punct(";");
            }
            return node;
        }
        if (looks_like_local_decl()) {
            std::string type = type_name();
            SourcePos name_pos = peek().pos;
            std::string name = ident("variable name");
            AstNode node = AstNode::inner(NodeKind::VariableDeclaration, {}, t.pos);
            node.children.push_back(AstNode::leaf(NodeKind::Type, std::move(type), t.pos));
            node.children.push_back(AstNode::leaf(NodeKind::Name, std::move(name), name_pos));
            if (accept_punct("=")) node.children.push_back(expression());
            expect_punct(";");
            return node;
        }
        if (t.kind == Tok::Rejected) unexpected(t, "statement");
        AstNode expr = expression();
        AstNode stmt = AstNode::inner(NodeKind::ExpressionStatement, {}, t.pos);
        if (accept_punct("=")) {
            if (expr.kind != NodeKind::Name && expr.kind != NodeKind::FieldAccess) {
                fail(t, "invalid assignment target");
            }
            AstNode value = expression();
            AstNode assign = AstNode::inner(NodeKind::Assignment, {}, t.pos);
            assign.children.push_back(std::move(expr));
            assign.children.push_back(std::move(value));
            stmt.children.push_back(std::move(assign));
        } else {
            const Token& after = peek();
            if (after.kind == Tok::Punct &&
                (after.text == "+=" || after.text == "-=" || after.text == "*=" || after.text == "/=" ||
                 after.text == "%=" || after.text == "++" || after.text == "--")) {
                fail(after, "unsupported operator '" + after.text + "'");
            }
            if (expr.kind != NodeKind::MethodCall) fail(t, "expression statement must be a call or assignment");
            stmt.children.push_back(std::move(expr));
        }
        expect_punct(";");
        return stmt;
    }

    AstNode expression() { return conditional(); }

    AstNode conditional() {
        const Token& start = peek();
        AstNode cond = binary(1);
        if (!accept_punct("?")) return cond;
        AstNode then_branch = expression();
        expect_punct(":");
        AstNode else_branch = conditional();
        AstNode node = AstNode::inner(NodeKind::ConditionalExpression, {}, start.pos);
        node.children.push_back(std::move(cond));
        node.children.push_back(std::move(then_branch));
        node.children.push_back(std::move(else_branch));
        return node;
    }

    AstNode binary(int min_prec) {
        const Token& start = peek();
        AstNode lhs = postfix();
        for (;;) {
            const Token& op = peek();
            if (op.kind != Tok::Punct) return lhs;
            int prec = binary_precedence(op.text);
            if (prec == 0) {
                if (op.text == "&" || op.text == "|" || op.text == "^" || op.text == "++" ||
                    op.text == "--" || op.text == "->" || op.text == "::" || op.text == "[") {
                    fail(op, "unsupported operator '" + op.text + "'");
                }
                return lhs;
            }
            if (prec < min_prec) return lhs;
            std::string op_text = next().text;
            AstNode rhs = binary(prec + 1);
            AstNode node = AstNode::inner(NodeKind::BinaryExpression, {}, start.pos);
            node.op = std::move(op_text);
            node.children.push_back(std::move(lhs));
            node.children.push_back(std::move(rhs));
            lhs = std::move(node);
        }
    }

    std::vector<AstNode> arguments() {
        std::vector<AstNode> args;
        expect_punct("(");
        if (accept_punct(")")) return args;
        do {
            args.push_back(expression());
        } while (accept_punct(","));
        expect_punct(")");
        return args;
    }

    AstNode postfix() {
        AstNode expr = primary();
        while (is_punct(peek(), ".")) {
            next();
            const Token& name_tok = peek();
            std::string name = ident("member name");
            AstNode access = AstNode::inner(NodeKind::FieldAccess, {}, expr.pos);
            access.children.push_back(std::move(expr));
            access.children.push_back(AstNode::leaf(NodeKind::Name, std::move(name), name_tok.pos));
            if (is_punct(peek(), "(")) {
                AstNode call = AstNode::inner(NodeKind::MethodCall, {}, access.pos);
                call.children.push_back(std::move(access));
                for (auto& a : arguments()) call.children.push_back(std::move(a));
                expr = std::move(call);
            } else {
                expr = std::move(access);
            }
        }
        return expr;
    }

    AstNode primary() {
        const Token& t = peek();
        switch (t.kind) {
            case Tok::Number:
            case Tok::String:
                next();
                return AstNode::leaf(NodeKind::Literal, t.text, t.pos);
            case Tok::Keyword:
                if (t.text == "true" || t.text == "false" || t.text == "null") {
                    next();
                    return AstNode::leaf(NodeKind::Literal, t.text, t.pos);
                }
                if (t.text == "this") {
                    next();
                    return AstNode::leaf(NodeKind::Name, t.text, t.pos);
                }
                unexpected(t, "expression");
            case Tok::Ident: {
                next();
                AstNode name = AstNode::leaf(NodeKind::Name, t.text, t.pos);
                if (!is_punct(peek(), "(")) return name;
                AstNode call = AstNode::inner(NodeKind::MethodCall, {}, t.pos);
                call.children.push_back(std::move(name));
                for (auto& a : arguments()) call.children.push_back(std::move(a));
                return call;
            }
            case Tok::Punct:
                if (t.text == "(") {
                    next();
                    AstNode inner = expression();
                    expect_punct(")");
                    AstNode node = AstNode::inner(NodeKind::EnclosedExpression, {}, t.pos);
                    node.children.push_back(std::move(inner));
                    return node;
                }
                if (t.text == "!" || t.text == "-" || t.text == "+" || t.text == "~" ||
                    t.text == "++" || t.text == "--") {
                    fail(t, "unary operator '" + t.text + "' is not supported");
                }
                unexpected(t, "expression");
            default:
                unexpected(t, "expression");
        }
    }

    std::vector<Token> toks_;
    std::string file_;
    std::size_t idx_ = 0;
};

}  // namespace

SourceUnit parse_unit(std::string_view source_text, std::string_view file_path) {
    std::string file(file_path);
    Lexer lexer(source_text, file);
    Parser parser(lexer.run(), file);
    return parser.unit();
}

}  // namespace moverec
