#include "ogo/cypher.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <set>

#include "ogo/error.hpp"

namespace ogo::cypher {

// ---- Expr helpers -------------------------------------------------------------

bool Expr::contains_aggregate() const {
    if (kind == Kind::CountStar || kind == Kind::Count) return true;
    return std::any_of(children.begin(), children.end(), [](const Expr& e) { return e.contains_aggregate(); });
}

Expr Expr::lit(PropertyValue v) {
    Expr e;
    e.kind = Kind::Literal;
    e.literal = std::move(v);
    return e;
}
Expr Expr::null() { return Expr{}; }
Expr Expr::var(std::string n) {
    Expr e;
    e.kind = Kind::Variable;
    e.name = std::move(n);
    return e;
}
Expr Expr::prop(Expr object, std::string key) {
    Expr e;
    e.kind = Kind::Property;
    e.name = std::move(key);
    e.children.push_back(std::move(object));
    return e;
}
Expr Expr::count_star() {
    Expr e;
    e.kind = Kind::CountStar;
    return e;
}
Expr Expr::count(Expr arg, bool distinct) {
    Expr e;
    e.kind = Kind::Count;
    e.distinct = distinct;
    e.children.push_back(std::move(arg));
    return e;
}
namespace {
Expr binary(Expr::Kind k, Expr a, Expr b) {
    Expr e;
    e.kind = k;
    e.children.push_back(std::move(a));
    e.children.push_back(std::move(b));
    return e;
}
}  // namespace
Expr Expr::equals(Expr a, Expr b) { return binary(Kind::Equals, std::move(a), std::move(b)); }
Expr Expr::compare(CompareOp op, Expr a, Expr b) {
    Expr e = binary(Kind::Compare, std::move(a), std::move(b));
    e.op = op;
    return e;
}
Expr Expr::both(Expr a, Expr b) { return binary(Kind::And, std::move(a), std::move(b)); }
Expr Expr::either(Expr a, Expr b) { return binary(Kind::Or, std::move(a), std::move(b)); }
Expr Expr::negate(Expr a) {
    Expr e;
    e.kind = Kind::Not;
    e.children.push_back(std::move(a));
    return e;
}

std::string ReturnItem::column() const { return alias ? *alias : to_string(expr); }

// ---- lexer ------------------------------------------------------------------------

namespace {

enum class Tok {
    End, Ident, Quoted, Int, Float, String, Param,
    LParen, RParen, LBracket, RBracket, LBrace, RBrace,
    Colon, Comma, Dot, DotDot, Pipe, Star, Minus, Plus, Slash, Percent, Caret, Semicolon,
    Lt, Gt, Eq, Ne, Le, Ge, Other,
};

struct Token {
    Tok kind = Tok::End;
    std::string text;  // identifier / string contents / raw text
    std::uint64_t int_value = 0;
    double float_value = 0;
    std::size_t line = 1, col = 1;
};

const std::set<std::string, std::less<>> kKeywords = {
    "MATCH", "OPTIONAL", "WHERE", "RETURN", "CREATE", "MERGE", "DISTINCT", "AS", "AND", "OR", "NOT",
    "NULL", "TRUE", "FALSE",
    // outside the subset; reserved so they are reported as unsupported
    "DELETE", "DETACH", "SET", "REMOVE", "WITH", "UNWIND", "ORDER", "BY", "SKIP", "LIMIT", "UNION",
    "CALL", "YIELD", "FOREACH", "LOAD", "XOR", "IS", "IN", "STARTS", "ENDS", "CONTAINS", "CASE",
    "WHEN", "THEN", "ELSE", "END", "ON", "ASC", "DESC", "EXISTS",
};

std::string upper(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return out;
}

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

void append_utf8(std::string& out, std::uint32_t cp) {
    if (cp < 0x80) {
        out += static_cast<char>(cp);
    } else if (cp < 0x800) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
        out += static_cast<char>(0xF0 | (cp >> 18));
        out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    }
}

class Lexer {
public:
    explicit Lexer(std::string_view text) : text_(text) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        for (;;) {
            skip_space();
            Token t;
            t.line = line_;
            t.col = col_;
            if (pos_ >= text_.size()) {
                out.push_back(t);
                return out;
            }
            lex(t);
            out.push_back(std::move(t));
        }
    }

private:
    [[noreturn]] void error(const std::string& msg) const {
        fail(ErrorCode::SyntaxError, std::to_string(line_) + ":" + std::to_string(col_) + ": " + msg);
    }

    char peek(std::size_t k = 0) const { return pos_ + k < text_.size() ? text_[pos_ + k] : '\0'; }

    void advance(std::size_t n = 1) {
        for (std::size_t i = 0; i < n && pos_ < text_.size(); ++i) {
            if (text_[pos_] == '\n') {
                ++line_;
                col_ = 1;
            } else {
                ++col_;
            }
            ++pos_;
        }
    }

    void skip_space() {
        for (;;) {
            char c = peek();
            if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
                advance();
            } else if (c == '/' && peek(1) == '/') {
                while (pos_ < text_.size() && peek() != '\n') advance();
            } else if (c == '/' && peek(1) == '*') {
                advance(2);
                while (pos_ < text_.size() && !(peek() == '*' && peek(1) == '/')) advance();
                if (pos_ >= text_.size()) error("unterminated comment");
                advance(2);
            } else {
                return;
            }
        }
    }

    void lex(Token& t) {
        const char c = peek();
        if (is_ident_start(c)) {
            std::size_t s = pos_;
            while (is_ident_char(peek())) advance();
            t.kind = Tok::Ident;
            t.text = std::string(text_.substr(s, pos_ - s));
            return;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) return number(t);
        switch (c) {
        case '`': return quoted(t);
        case '\'':
        case '"': return string(t);
        case '$': {
            advance();
            std::size_t s = pos_;
            while (is_ident_char(peek())) advance();
            t.kind = Tok::Param;
            t.text = "$" + std::string(text_.substr(s, pos_ - s));
            return;
        }
        case '(': return single(t, Tok::LParen);
        case ')': return single(t, Tok::RParen);
        case '[': return single(t, Tok::LBracket);
        case ']': return single(t, Tok::RBracket);
        case '{': return single(t, Tok::LBrace);
        case '}': return single(t, Tok::RBrace);
        case ':': return single(t, Tok::Colon);
        case ',': return single(t, Tok::Comma);
        case '|': return single(t, Tok::Pipe);
        case '*': return single(t, Tok::Star);
        case '-': return single(t, Tok::Minus);
        case '+': return single(t, Tok::Plus);
        case '/': return single(t, Tok::Slash);
        case '%': return single(t, Tok::Percent);
        case '^': return single(t, Tok::Caret);
        case ';': return single(t, Tok::Semicolon);
        case '=': return single(t, Tok::Eq);
        case '.':
            if (peek(1) == '.') {
                t.kind = Tok::DotDot;
                t.text = "..";
                advance(2);
                return;
            }
            return single(t, Tok::Dot);
        case '<':
            if (peek(1) == '>') return pair(t, Tok::Ne);
            if (peek(1) == '=') return pair(t, Tok::Le);
            return single(t, Tok::Lt);
        case '>':
            if (peek(1) == '=') return pair(t, Tok::Ge);
            return single(t, Tok::Gt);
        case '!':
            if (peek(1) == '=') return pair(t, Tok::Ne);
            break;
        default: break;
        }
        t.kind = Tok::Other;
        t.text = std::string(1, c);
        advance();
    }

    void single(Token& t, Tok k) {
        t.kind = k;
        t.text = std::string(1, peek());
        advance();
    }
    void pair(Token& t, Tok k) {
        t.kind = k;
        t.text = std::string(text_.substr(pos_, 2));
        advance(2);
    }

    void number(Token& t) {
        std::size_t s = pos_;
        while (std::isdigit(static_cast<unsigned char>(peek()))) advance();
        bool is_float = false;
        if (peek() == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
            is_float = true;
            advance();
            while (std::isdigit(static_cast<unsigned char>(peek()))) advance();
        }
        if ((peek() == 'e' || peek() == 'E') &&
            (std::isdigit(static_cast<unsigned char>(peek(1))) ||
             ((peek(1) == '-' || peek(1) == '+') && std::isdigit(static_cast<unsigned char>(peek(2)))))) {
            is_float = true;
            advance(2);
            while (std::isdigit(static_cast<unsigned char>(peek()))) advance();
        }
        if (is_ident_char(peek())) error("malformed number");
        t.text = std::string(text_.substr(s, pos_ - s));
        if (is_float) {
            t.kind = Tok::Float;
            t.float_value = std::strtod(t.text.c_str(), nullptr);
            if (!std::isfinite(t.float_value)) error("float literal out of range");
            return;
        }
        t.kind = Tok::Int;
        auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), t.int_value);
        if (ec != std::errc() || t.int_value > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max()) + 1)
            error("integer literal out of range");
    }

    void quoted(Token& t) {
        advance();
        t.kind = Tok::Quoted;
        for (;;) {
            if (pos_ >= text_.size()) error("unterminated backtick-quoted name");
            char c = peek();
            advance();
            if (c == '`') {
                if (peek() == '`') {
                    t.text += '`';
                    advance();
                    continue;
                }
                break;
            }
            t.text += c;
        }
        if (t.text.empty()) error("empty quoted name");
    }

    void string(Token& t) {
        const char quote = peek();
        advance();
        t.kind = Tok::String;
        for (;;) {
            if (pos_ >= text_.size()) error("unterminated string literal");
            char c = peek();
            advance();
            if (c == quote) break;
            if (c != '\\') {
                t.text += c;
                continue;
            }
            char e = peek();
            advance();
            switch (e) {
            case '\\': t.text += '\\'; break;
            case '\'': t.text += '\''; break;
            case '"': t.text += '"'; break;
            case 'n': t.text += '\n'; break;
            case 't': t.text += '\t'; break;
            case 'r': t.text += '\r'; break;
            case 'b': t.text += '\b'; break;
            case 'f': t.text += '\f'; break;
            case 'u': {
                std::uint32_t cp = 0;
                for (int i = 0; i < 4; ++i) {
                    char h = peek();
                    if (!std::isxdigit(static_cast<unsigned char>(h))) error("bad \\u escape");
                    cp = cp * 16 + static_cast<std::uint32_t>(std::isdigit(static_cast<unsigned char>(h))
                                                                  ? h - '0'
                                                                  : std::tolower(h) - 'a' + 10);
                    advance();
                }
                append_utf8(t.text, cp);
                break;
            }
            default: error(std::string("unknown escape \\") + e);
            }
        }
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1, col_ = 1;
};

// ---- parser -----------------------------------------------------------------------

const char* describe(Tok k) {
    switch (k) {
    case Tok::End: return "end of input";
    case Tok::Ident: return "identifier";
    case Tok::Quoted: return "quoted name";
    case Tok::Int: return "integer";
    case Tok::Float: return "float";
    case Tok::String: return "string";
    case Tok::Param: return "parameter";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBracket: return "'['";
    case Tok::RBracket: return "']'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::Colon: return "':'";
    case Tok::Comma: return "','";
    case Tok::Dot: return "'.'";
    case Tok::DotDot: return "'..'";
    case Tok::Pipe: return "'|'";
    case Tok::Star: return "'*'";
    case Tok::Minus: return "'-'";
    case Tok::Gt: return "'>'";
    case Tok::Lt: return "'<'";
    default: return "token";
    }
}

class Parser {
public:
    explicit Parser(std::string_view text) : toks_(Lexer(text).run()) {}

    Query query() {
        Query q;
        while (!at(Tok::End) && !at(Tok::Semicolon)) q.clauses.push_back(clause());
        if (q.clauses.empty()) error("expected a clause");
        if (at(Tok::Semicolon)) ++pos_;
        if (!at(Tok::End)) error("expected end of input");
        return q;
    }

private:
    const Token& cur() const { return toks_[pos_]; }
    const Token& ahead(std::size_t k) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
    bool at(Tok k) const { return cur().kind == k; }

    bool at_keyword(std::string_view kw) const { return at(Tok::Ident) && upper(cur().text) == kw; }
    bool accept_keyword(std::string_view kw) {
        if (!at_keyword(kw)) return false;
        ++pos_;
        return true;
    }
    bool accept(Tok k) {
        if (!at(k)) return false;
        ++pos_;
        return true;
    }

    std::string found() const {
        const Token& t = cur();
        if (t.kind == Tok::End) return "end of input";
        return "`" + t.text + "`";
    }

    [[noreturn]] void error(const std::string& msg) const {
        fail(ErrorCode::SyntaxError, std::to_string(cur().line) + ":" + std::to_string(cur().col) + ": " + msg +
                                         ", found " + found());
    }
    [[noreturn]] void unsupported(const std::string& what) const {
        fail(ErrorCode::UnsupportedFeature, std::to_string(cur().line) + ":" + std::to_string(cur().col) + ": " +
                                                what + " is not supported");
    }

    void expect(Tok k) {
        if (!accept(k)) error(std::string("expected ") + describe(k));
    }

    bool is_keyword_token(const Token& t) const { return t.kind == Tok::Ident && kKeywords.contains(upper(t.text)); }

    // A variable, label or type name: bare non-keyword identifier or quoted.
    std::string name(const char* what) {
        if (at(Tok::Quoted) || (at(Tok::Ident) && !is_keyword_token(cur()))) return toks_[pos_++].text;
        error(std::string("expected ") + what);
    }

    // Property keys may be keywords.
    std::string key() {
        if (at(Tok::Quoted) || at(Tok::Ident)) return toks_[pos_++].text;
        error("expected a property key");
    }

    Clause clause() {
        if (accept_keyword("CREATE")) return CreateClause{pattern_list()};
        if (accept_keyword("MERGE")) {
            MergeClause m{path()};
            if (at(Tok::Comma)) unsupported("MERGE with several patterns");
            if (at_keyword("ON")) unsupported("ON CREATE / ON MATCH");
            return m;
        }
        if (accept_keyword("OPTIONAL")) {
            if (!accept_keyword("MATCH")) error("expected MATCH after OPTIONAL");
            return MatchClause{pattern_list(), true};
        }
        if (accept_keyword("MATCH")) return MatchClause{pattern_list(), false};
        if (accept_keyword("WHERE")) return WhereClause{expression()};
        if (accept_keyword("RETURN")) return return_clause();
        if (is_keyword_token(cur())) unsupported(upper(cur().text));
        error("expected a clause (CREATE, MERGE, MATCH, OPTIONAL MATCH, WHERE or RETURN)");
    }

    ReturnClause return_clause() {
        ReturnClause r;
        r.distinct = accept_keyword("DISTINCT");
        if (at(Tok::Star)) unsupported("RETURN *");
        do {
            ReturnItem item{expression(), std::nullopt};
            if (accept_keyword("AS")) item.alias = name("an alias");
            r.items.push_back(std::move(item));
        } while (accept(Tok::Comma));
        for (const char* kw : {"ORDER", "SKIP", "LIMIT", "UNION"})
            if (at_keyword(kw)) unsupported(kw);
        return r;
    }

    std::vector<PathPattern> pattern_list() {
        std::vector<PathPattern> out;
        do out.push_back(path());
        while (accept(Tok::Comma));
        return out;
    }

    PathPattern path() {
        if ((at(Tok::Ident) || at(Tok::Quoted)) && ahead(1).kind == Tok::Eq) unsupported("path variables");
        PathPattern p;
        p.nodes.push_back(node());
        while (at(Tok::Minus) || at(Tok::Lt)) {
            p.rels.push_back(rel());
            p.nodes.push_back(node());
        }
        return p;
    }

    NodePattern node() {
        if (!at(Tok::LParen)) error("expected a node pattern '('");
        ++pos_;
        NodePattern n;
        if (at(Tok::Ident) || at(Tok::Quoted)) n.variable = name("a variable");
        if (accept(Tok::Colon)) {
            n.label = name("a label");
            if (at(Tok::Colon)) unsupported("multiple labels");
            if (at(Tok::Pipe)) unsupported("label alternation");
        }
        if (at(Tok::LBrace)) n.properties = property_map();
        if (at(Tok::Param)) unsupported("query parameters (" + cur().text + ")");
        expect(Tok::RParen);
        return n;
    }

    Properties property_map() {
        expect(Tok::LBrace);
        Properties props;
        if (accept(Tok::RBrace)) return props;
        do {
            std::string k = key();
            expect(Tok::Colon);
            PropertyValue v = literal_value();
            if (!props.emplace(k, std::move(v)).second) error("duplicate property key " + k);
        } while (accept(Tok::Comma));
        expect(Tok::RBrace);
        return props;
    }

    PropertyValue literal_value() {
        if (at(Tok::Param)) unsupported("query parameters (" + cur().text + ")");
        if (at(Tok::LBracket)) unsupported("list literals");
        if (at(Tok::LBrace)) unsupported("map literals");
        if (at_keyword("NULL")) unsupported("null in a property map");
        Expr e = atom();
        if (e.kind != Expr::Kind::Literal) error("expected a literal");
        return e.literal;
    }

    RelPattern rel() {
        RelPattern r;
        bool left = accept(Tok::Lt);
        expect(Tok::Minus);
        if (accept(Tok::LBracket)) {
            if (at(Tok::Ident) || at(Tok::Quoted)) r.variable = name("a variable");
            if (accept(Tok::Colon)) {
                r.types.push_back(name("a relationship type"));
                while (accept(Tok::Pipe)) {
                    accept(Tok::Colon);
                    r.types.push_back(name("a relationship type"));
                }
            }
            if (accept(Tok::Star)) hops(r);
            if (at(Tok::LBrace)) unsupported("relationship property maps");
            if (at(Tok::Param)) unsupported("query parameters (" + cur().text + ")");
            expect(Tok::RBracket);
        }
        expect(Tok::Minus);
        bool right = accept(Tok::Gt);
        if (left && right) error("a relationship cannot point both ways");
        r.direction = left ? RelDirection::Left : right ? RelDirection::Right : RelDirection::Both;
        if (r.variable_length && r.variable) unsupported("variables on variable-length relationships");
        return r;
    }

    std::uint32_t hop_count() {
        const Token& t = cur();
        if (t.int_value > 100000) error("hop count too large");
        ++pos_;
        return static_cast<std::uint32_t>(t.int_value);
    }

    void hops(RelPattern& r) {
        r.variable_length = true;
        r.min_hops = 1;
        r.max_hops = std::nullopt;
        if (at(Tok::Int)) {
            std::uint32_t n = hop_count();
            if (!at(Tok::DotDot)) {
                if (n == 0) error("exact hop count must be at least 1");
                r.min_hops = n;
                r.max_hops = n;
                return;
            }
            r.min_hops = n;
        }
        if (accept(Tok::DotDot)) {
            if (at(Tok::Int)) {
                r.max_hops = hop_count();
                if (*r.max_hops < r.min_hops) error("hop range upper bound below lower bound");
            }
        }
    }

    // expression := or
    Expr expression() { return or_expr(); }

    Expr or_expr() {
        Expr e = and_expr();
        for (;;) {
            if (at_keyword("XOR")) unsupported("XOR");
            if (!accept_keyword("OR")) return e;
            e = Expr::either(std::move(e), and_expr());
        }
    }

    Expr and_expr() {
        Expr e = not_expr();
        while (accept_keyword("AND")) e = Expr::both(std::move(e), not_expr());
        return e;
    }

    Expr not_expr() {
        if (accept_keyword("NOT")) return Expr::negate(not_expr());
        return comparison();
    }

    std::optional<CompareOp> compare_op() const {
        switch (cur().kind) {
        case Tok::Eq: return CompareOp::Eq;
        case Tok::Ne: return CompareOp::Ne;
        case Tok::Lt: return CompareOp::Lt;
        case Tok::Le: return CompareOp::Le;
        case Tok::Gt: return CompareOp::Gt;
        case Tok::Ge: return CompareOp::Ge;
        default: return std::nullopt;
        }
    }

    Expr comparison() {
        Expr e = postfix();
        if (auto op = compare_op()) {
            ++pos_;
            e = Expr::compare(*op, std::move(e), postfix());
            if (compare_op()) unsupported("chained comparisons");
        }
        return e;
    }

    Expr postfix() {
        Expr e = atom();
        check_no_arithmetic();
        return e;
    }

    void check_no_arithmetic() const {
        switch (cur().kind) {
        case Tok::Plus:
        case Tok::Minus:
        case Tok::Star:
        case Tok::Slash:
        case Tok::Percent:
        case Tok::Caret: unsupported("arithmetic");
        case Tok::LBracket: unsupported("list indexing");
        default: break;
        }
        for (const char* kw : {"IS", "IN", "STARTS", "ENDS", "CONTAINS"})
            if (at_keyword(kw)) unsupported(kw);
    }

    Expr atom() {
        const Token& t = cur();
        switch (t.kind) {
        case Tok::Int:
            if (t.int_value > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max()))
                error("integer literal out of range");
            ++pos_;
            return Expr::lit(static_cast<std::int64_t>(t.int_value));
        case Tok::Float: ++pos_; return Expr::lit(t.float_value);
        case Tok::String: ++pos_; return Expr::lit(t.text);
        case Tok::Minus: {
            ++pos_;
            const Token& n = cur();
            if (n.kind == Tok::Int) {
                ++pos_;
                if (n.int_value == static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max()) + 1)
                    return Expr::lit(std::numeric_limits<std::int64_t>::min());
                return Expr::lit(-static_cast<std::int64_t>(n.int_value));
            }
            if (n.kind == Tok::Float) {
                ++pos_;
                return Expr::lit(-n.float_value);
            }
            unsupported("arithmetic negation");
        }
        case Tok::LParen: {
            ++pos_;
            Expr e = expression();
            expect(Tok::RParen);
            return e;
        }
        case Tok::Param: unsupported("query parameters (" + t.text + ")");
        case Tok::LBracket: unsupported("list literals");
        case Tok::LBrace: unsupported("map literals");
        case Tok::Quoted: return variable_or_property();
        case Tok::Ident: break;
        default: error("expected an expression");
        }
        const std::string kw = upper(t.text);
        if (kw == "NULL") {
            ++pos_;
            return Expr::null();
        }
        if (kw == "TRUE" || kw == "FALSE") {
            ++pos_;
            return Expr::lit(kw == "TRUE");
        }
        if (ahead(1).kind == Tok::LParen && !is_keyword_token(t)) return call();
        if (kw == "CASE" || kw == "EXISTS") unsupported(kw);
        if (is_keyword_token(t)) error("expected an expression");
        return variable_or_property();
    }

    Expr variable_or_property() {
        Expr e = Expr::var(name("a variable"));
        if (accept(Tok::Dot)) {
            e = Expr::prop(std::move(e), key());
            if (at(Tok::Dot)) unsupported("nested property access");
        }
        if (at(Tok::Colon)) unsupported("label predicates");
        return e;
    }

    Expr call() {
        const std::string fn = upper(cur().text);
        const std::string raw = cur().text;
        pos_ += 2;  // name (
        if (fn == "COUNT") {
            if (accept(Tok::Star)) {
                expect(Tok::RParen);
                return Expr::count_star();
            }
            bool distinct = accept_keyword("DISTINCT");
            Expr arg = expression();
            expect(Tok::RParen);
            return Expr::count(std::move(arg), distinct);
        }
        if (fn == "EQUALS") {
            Expr a = expression();
            expect(Tok::Comma);
            Expr b = expression();
            expect(Tok::RParen);
            return Expr::equals(std::move(a), std::move(b));
        }
        --pos_;
        --pos_;
        unsupported("function " + raw + "()");
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

// ---- printer ----------------------------------------------------------------------

int precedence(const Expr& e) {
    switch (e.kind) {
    case Expr::Kind::Or: return 1;
    case Expr::Kind::And: return 2;
    case Expr::Kind::Not: return 3;
    case Expr::Kind::Compare: return 4;
    default: return 5;
    }
}

const char* op_text(CompareOp op) {
    switch (op) {
    case CompareOp::Eq: return "=";
    case CompareOp::Ne: return "<>";
    case CompareOp::Lt: return "<";
    case CompareOp::Le: return "<=";
    case CompareOp::Gt: return ">";
    case CompareOp::Ge: return ">=";
    }
    return "=";
}

std::string quote_string(const std::string& s) {
    std::string out = "'";
    for (unsigned char c : s) {
        switch (c) {
        case '\\': out += "\\\\"; break;
        case '\'': out += "\\'"; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        case '\r': out += "\\r"; break;
        default:
            if (c < 0x20) {
                char buf[8];
                std::snprintf(buf, sizeof buf, "\\u%04x", c);
                out += buf;
            } else {
                out += static_cast<char>(c);
            }
        }
    }
    return out + "'";
}

std::string literal_text(const PropertyValue& v) {
    if (auto* s = std::get_if<std::string>(&v)) return quote_string(*s);
    if (auto* d = std::get_if<double>(&v)) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", *d);
        std::string out = buf;
        if (out.find_first_of(".eEn") == std::string::npos) out += ".0";
        return out;
    }
    return format_value(v);
}

void print_expr(std::string& out, const Expr& e, int min_prec) {
    const int prec = precedence(e);
    const bool parens = prec < min_prec;
    if (parens) out += '(';
    switch (e.kind) {
    case Expr::Kind::Literal: out += literal_text(e.literal); break;
    case Expr::Kind::Null: out += "null"; break;
    case Expr::Kind::Variable: out += quote_name(e.name); break;
    case Expr::Kind::Property:
        print_expr(out, e.children[0], 5);
        out += '.';
        out += quote_name(e.name);
        break;
    case Expr::Kind::CountStar: out += "count(*)"; break;
    case Expr::Kind::Count:
        out += e.distinct ? "count(DISTINCT " : "count(";
        print_expr(out, e.children[0], 0);
        out += ')';
        break;
    case Expr::Kind::Equals:
        out += "equals(";
        print_expr(out, e.children[0], 0);
        out += ", ";
        print_expr(out, e.children[1], 0);
        out += ')';
        break;
    case Expr::Kind::Compare:
        print_expr(out, e.children[0], 5);
        out += ' ';
        out += op_text(e.op);
        out += ' ';
        print_expr(out, e.children[1], 5);
        break;
    case Expr::Kind::And:
    case Expr::Kind::Or:
        print_expr(out, e.children[0], prec);
        out += e.kind == Expr::Kind::And ? " AND " : " OR ";
        print_expr(out, e.children[1], prec + 1);
        break;
    case Expr::Kind::Not:
        out += "NOT ";
        print_expr(out, e.children[0], 3);
        break;
    }
    if (parens) out += ')';
}

void print_properties(std::string& out, const Properties& props) {
    if (props.empty()) return;
    out += " {";
    bool first = true;
    for (const auto& [k, v] : props) {
        if (!first) out += ", ";
        first = false;
        out += quote_name(k);
        out += ": ";
        out += literal_text(v);
    }
    out += '}';
}

void print_node(std::string& out, const NodePattern& n) {
    out += '(';
    if (n.variable) out += quote_name(*n.variable);
    if (n.label) {
        out += ':';
        out += quote_name(*n.label);
    }
    if (!n.properties.empty()) {
        if (!n.variable && !n.label) {
            // no leading space inside bare "({...})"
            std::string tmp;
            print_properties(tmp, n.properties);
            out += tmp.substr(1);
        } else {
            print_properties(out, n.properties);
        }
    }
    out += ')';
}

void print_rel(std::string& out, const RelPattern& r) {
    out += r.direction == RelDirection::Left ? "<-[" : "-[";
    if (r.variable) out += quote_name(*r.variable);
    for (std::size_t i = 0; i < r.types.size(); ++i) {
        out += i ? "|" : ":";
        out += quote_name(r.types[i]);
    }
    if (r.variable_length) {
        out += '*';
        if (r.max_hops && *r.max_hops == r.min_hops) {
            out += std::to_string(r.min_hops);
        } else if (r.min_hops != 1 || r.max_hops) {
            out += std::to_string(r.min_hops);
            out += "..";
            if (r.max_hops) out += std::to_string(*r.max_hops);
        }
    }
    out += r.direction == RelDirection::Right ? "]->" : "]-";
}

void print_path(std::string& out, const PathPattern& p) {
    print_node(out, p.nodes[0]);
    for (std::size_t i = 0; i < p.rels.size(); ++i) {
        print_rel(out, p.rels[i]);
        print_node(out, p.nodes[i + 1]);
    }
}

void print_paths(std::string& out, const std::vector<PathPattern>& ps) {
    for (std::size_t i = 0; i < ps.size(); ++i) {
        if (i) out += ", ";
        print_path(out, ps[i]);
    }
}

}  // namespace

std::string quote_name(std::string_view name) {
    bool bare = !name.empty() && is_ident_start(name[0]) &&
                std::all_of(name.begin(), name.end(), is_ident_char) && !kKeywords.contains(upper(name));
    if (bare) return std::string(name);
    std::string out = "`";
    for (char c : name) {
        if (c == '`') out += '`';
        out += c;
    }
    return out + "`";
}

Query parse(std::string_view text) { return Parser(text).query(); }

std::string to_string(const Expr& expr) {
    std::string out;
    print_expr(out, expr, 0);
    return out;
}

std::string to_string(const PathPattern& pattern) {
    std::string out;
    print_path(out, pattern);
    return out;
}

std::string to_string(const Query& query) {
    std::string out;
    for (const Clause& c : query.clauses) {
        if (!out.empty()) out += ' ';
        std::visit(
            [&](const auto& cl) {
                using T = std::decay_t<decltype(cl)>;
                if constexpr (std::is_same_v<T, CreateClause>) {
                    out += "CREATE ";
                    print_paths(out, cl.patterns);
                } else if constexpr (std::is_same_v<T, MergeClause>) {
                    out += "MERGE ";
                    print_path(out, cl.pattern);
                } else if constexpr (std::is_same_v<T, MatchClause>) {
                    out += cl.optional ? "OPTIONAL MATCH " : "MATCH ";
                    print_paths(out, cl.patterns);
                } else if constexpr (std::is_same_v<T, WhereClause>) {
                    out += "WHERE ";
                    print_expr(out, cl.condition, 0);
                } else {
                    out += cl.distinct ? "RETURN DISTINCT " : "RETURN ";
                    for (std::size_t i = 0; i < cl.items.size(); ++i) {
                        if (i) out += ", ";
                        print_expr(out, cl.items[i].expr, 0);
                        if (cl.items[i].alias) out += " AS " + quote_name(*cl.items[i].alias);
                    }
                }
            },
            c);
    }
    return out;
}

// ---- validation -------------------------------------------------------------------

namespace {

enum class VarKind { Node, Rel };

class Validator {
public:
    std::vector<Diagnostic> run(const Query& q) {
        for (std::size_t i = 0; i < q.clauses.size(); ++i) {
            const Clause& c = q.clauses[i];
            const bool last = i + 1 == q.clauses.size();
            if (auto* w = std::get_if<WhereClause>(&c)) {
                if (i == 0 || !std::holds_alternative<MatchClause>(q.clauses[i - 1]))
                    report("WHERE must directly follow MATCH or OPTIONAL MATCH");
                if (w->condition.contains_aggregate()) report("aggregate functions are not allowed in WHERE");
                check_expr(w->condition);
            } else if (auto* r = std::get_if<ReturnClause>(&c)) {
                if (!last) report("RETURN must be the last clause");
                returns(*r);
            } else if (auto* m = std::get_if<MatchClause>(&c)) {
                for (const auto& p : m->patterns) match_path(p);
            } else if (auto* cr = std::get_if<CreateClause>(&c)) {
                for (const auto& p : cr->patterns) write_path(p, "CREATE");
            } else if (auto* me = std::get_if<MergeClause>(&c)) {
                merge_path(me->pattern);
            }
        }
        if (q.clauses.empty() || !std::holds_alternative<ReturnClause>(q.clauses.back()))
            report("query must end with RETURN");
        return std::move(diags_);
    }

private:
    void report(std::string msg) { diags_.push_back({std::move(msg)}); }

    void bind(const std::string& name, VarKind kind) {
        auto [it, fresh] = scope_.emplace(name, kind);
        if (!fresh && it->second != kind)
            report("variable " + name + " is used both as a node and as a relationship");
    }

    bool bound(const std::string& name) const { return scope_.contains(name); }

    void check_uid_key(const Properties& props, const char* clause) {
        if (props.contains(kUidKey)) report(std::string("`$uid` is reserved and cannot be written by ") + clause);
    }

    void match_path(const PathPattern& p) {
        for (const auto& n : p.nodes)
            if (n.variable) bind(*n.variable, VarKind::Node);
        for (const auto& r : p.rels) {
            if (!r.variable) continue;
            if (bound(*r.variable)) report("relationship variable " + *r.variable + " is already bound");
            bind(*r.variable, VarKind::Rel);
        }
    }

    void write_rel(const RelPattern& r, const char* clause) {
        if (r.types.size() != 1)
            report(std::string(clause) + " relationships need exactly one type");
        if (r.direction == RelDirection::Both) report(std::string(clause) + " relationships must be directed");
        if (r.variable_length) report(std::string(clause) + " cannot write variable-length relationships");
        if (r.variable) {
            if (bound(*r.variable)) report("relationship variable " + *r.variable + " is already bound");
            bind(*r.variable, VarKind::Rel);
        }
    }

    void write_path(const PathPattern& p, const char* clause) {
        for (const auto& n : p.nodes) {
            if (n.variable && bound(*n.variable)) {
                if (scope_.at(*n.variable) != VarKind::Node)
                    report("variable " + *n.variable + " is used both as a node and as a relationship");
                if (n.label || !n.properties.empty())
                    report("bound variable " + *n.variable + " cannot be redeclared with a label or properties");
                continue;
            }
            if (!n.label) report(std::string(clause) + " needs a label for every new node");
            check_uid_key(n.properties, clause);
            if (n.variable) bind(*n.variable, VarKind::Node);
        }
        for (const auto& r : p.rels) write_rel(r, clause);
    }

    void merge_path(const PathPattern& p) {
        std::size_t bound_nodes = 0, named = 0;
        for (const auto& n : p.nodes) {
            if (n.variable && bound(*n.variable)) ++bound_nodes;
            if (n.variable) ++named;
        }
        if (bound_nodes != 0 && bound_nodes != p.nodes.size())
            report("MERGE patterns must bind either all of their nodes or none of them");
        // Within one pattern a repeated fresh variable refers to the same node.
        std::set<std::string> fresh;
        for (const auto& n : p.nodes) {
            if (n.variable && bound(*n.variable) && !fresh.contains(*n.variable)) {
                if (n.label || !n.properties.empty())
                    report("bound variable " + *n.variable + " cannot be redeclared with a label or properties");
                continue;
            }
            if (n.variable && fresh.contains(*n.variable)) {
                if (n.label || !n.properties.empty())
                    report("variable " + *n.variable + " is declared twice in one MERGE pattern");
                continue;
            }
            if (!n.label) report("MERGE needs a label for every new node");
            check_uid_key(n.properties, "MERGE");
            if (n.variable) fresh.insert(*n.variable);
        }
        for (const auto& v : fresh) bind(v, VarKind::Node);
        for (const auto& r : p.rels) write_rel(r, "MERGE");
        (void)named;
    }

    void check_expr(const Expr& e, int aggregate_depth = 0) {
        switch (e.kind) {
        case Expr::Kind::Variable:
            if (!bound(e.name)) report("variable " + e.name + " is not bound");
            return;
        case Expr::Kind::Count:
        case Expr::Kind::CountStar:
            if (aggregate_depth > 0) report("aggregate functions cannot be nested");
            for (const auto& c : e.children) check_expr(c, aggregate_depth + 1);
            return;
        default:
            for (const auto& c : e.children) check_expr(c, aggregate_depth);
        }
    }

    void returns(const ReturnClause& r) {
        std::set<std::string> columns;
        for (const auto& item : r.items) {
            check_expr(item.expr);
            if (!columns.insert(item.column()).second) report("duplicate column name " + item.column());
        }
    }

    std::map<std::string, VarKind> scope_;
    std::vector<Diagnostic> diags_;
};

}  // namespace

std::vector<Diagnostic> validate(const Query& query) { return Validator().run(query); }

void check(const Query& query) {
    auto diags = validate(query);
    if (diags.empty()) return;
    std::string msg;
    for (const auto& d : diags) {
        if (!msg.empty()) msg += "; ";
        msg += d.message;
    }
    fail(ErrorCode::Validation, msg);
}

}  // namespace ogo::cypher
