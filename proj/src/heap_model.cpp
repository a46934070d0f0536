#include "ogo/heap_model.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <functional>
#include <set>

#include "ogo/error.hpp"

namespace ogo::fj {

// ---------------------------------------------------------------------------
// Class table

void ClassTable::add(ClassDecl decl) {
    std::string name = decl.name;
    if (!classes_.emplace(name, std::move(decl)).second)
        fail(ErrorCode::SyntaxError, "duplicate class " + name);
}

const ClassDecl* ClassTable::find(std::string_view name) const {
    auto it = classes_.find(name);
    return it == classes_.end() ? nullptr : &it->second;
}

const ClassDecl& ClassTable::get(std::string_view name) const {
    if (const ClassDecl* c = find(name)) return *c;
    fail(ErrorCode::UnknownClass, "unknown class " + std::string(name));
}

namespace {

std::vector<const ClassDecl*> chain_of(const ClassTable& ct, std::string_view class_name) {
    std::vector<const ClassDecl*> chain;
    std::set<std::string_view> seen;
    const ClassDecl* c = &ct.get(class_name);
    while (c) {
        if (!seen.insert(c->name).second)
            fail(ErrorCode::UnknownType, "cyclic superclass chain through " + c->name);
        chain.push_back(c);
        c = c->superclass ? &ct.get(*c->superclass) : nullptr;
    }
    std::reverse(chain.begin(), chain.end());
    return chain;
}

}  // namespace

std::vector<FieldDef> field_defs_of(const ClassTable& ct, std::string_view class_name) {
    std::vector<FieldDef> fields;
    for (const ClassDecl* c : chain_of(ct, class_name))
        fields.insert(fields.end(), c->fields.begin(), c->fields.end());
    return fields;
}

std::vector<std::string> fields_of(const ClassTable& ct, std::string_view class_name) {
    std::vector<std::string> names;
    for (const auto& f : field_defs_of(ct, class_name)) names.push_back(f.name);
    return names;
}

MethodBody mbody(const ClassTable& ct, std::string_view method, std::string_view class_name) {
    for (const ClassDecl* c = &ct.get(class_name); c;
         c = c->superclass ? &ct.get(*c->superclass) : nullptr) {
        for (const MethodDecl& m : c->methods)
            if (m.name == method) return MethodBody{m.params, &m.body, c->name};
    }
    fail(ErrorCode::NoSuchMethod,
         "no method " + std::string(method) + " on class " + std::string(class_name));
}

// ---------------------------------------------------------------------------
// Lexer

namespace {

std::optional<PrimitiveKind> primitive_kind(std::string_view name) {
    if (name == "int" || name == "long" || name == "short" || name == "byte" || name == "char")
        return PrimitiveKind::Integer;
    if (name == "double" || name == "float") return PrimitiveKind::Float;
    if (name == "boolean") return PrimitiveKind::Boolean;
    if (name == "String") return PrimitiveKind::String;
    return std::nullopt;
}

enum class Tok { Ident, Int, Float, String, Punct, Point, End };

struct Token {
    Tok kind;
    std::string text;
    int line;
    int column;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        for (;;) {
            skip_space();
            Token t{Tok::End, "", line_, col_};
            if (pos_ >= src_.size()) {
                out.push_back(t);
                return out;
            }
            char c = src_[pos_];
            if (c == '/' && peek(1) == '*') {
                t.kind = Tok::Point;
                std::size_t close = src_.find("*/", pos_ + 2);
                if (close == std::string_view::npos) error(t, "unterminated comment");
                std::string_view body = src_.substr(pos_ + 2, close - pos_ - 2);
                advance(close + 2 - pos_);
                auto first = body.find_first_not_of(" \t\r\n");
                auto last = body.find_last_not_of(" \t\r\n");
                if (first != std::string_view::npos && body.substr(first, last - first + 1) == "POINT")
                    out.push_back(t);
                continue;
            }
            if (c == '/' && peek(1) == '/') {
                while (pos_ < src_.size() && src_[pos_] != '\n') advance(1);
                continue;
            }
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$') {
                std::size_t start = pos_;
                while (pos_ < src_.size() &&
                       (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_' ||
                        src_[pos_] == '$'))
                    advance(1);
                t.kind = Tok::Ident;
                t.text = std::string(src_.substr(start, pos_ - start));
            } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                       (c == '-' && std::isdigit(static_cast<unsigned char>(peek(1))))) {
                std::size_t start = pos_;
                advance(1);
                bool is_float = false;
                while (pos_ < src_.size()) {
                    char d = src_[pos_];
                    if (std::isdigit(static_cast<unsigned char>(d))) {
                        advance(1);
                    } else if (d == '.' && !is_float &&
                               std::isdigit(static_cast<unsigned char>(peek(1)))) {
                        is_float = true;
                        advance(1);
                    } else {
                        break;
                    }
                }
                t.kind = is_float ? Tok::Float : Tok::Int;
                t.text = std::string(src_.substr(start, pos_ - start));
            } else if (c == '"') {
                advance(1);
                std::string s;
                while (pos_ < src_.size() && src_[pos_] != '"') {
                    if (src_[pos_] == '\\' && pos_ + 1 < src_.size()) advance(1);
                    if (src_[pos_] == '\n') error(t, "unterminated string literal");
                    s += src_[pos_];
                    advance(1);
                }
                if (pos_ >= src_.size()) error(t, "unterminated string literal");
                advance(1);
                t.kind = Tok::String;
                t.text = std::move(s);
            } else if (std::string_view("{}();,.=").find(c) != std::string_view::npos) {
                t.kind = Tok::Punct;
                t.text = std::string(1, c);
                advance(1);
            } else {
                error(t, std::string("unexpected character '") + c + "'");
            }
            out.push_back(std::move(t));
        }
    }

private:
    char peek(std::size_t off) const {
        return pos_ + off < src_.size() ? src_[pos_ + off] : '\0';
    }

    void advance(std::size_t n) {
        for (std::size_t i = 0; i < n && pos_ < src_.size(); ++i, ++pos_) {
            if (src_[pos_] == '\n') {
                ++line_;
                col_ = 1;
            } else {
                ++col_;
            }
        }
    }

    void skip_space() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) advance(1);
    }

    [[noreturn]] static void error(const Token& at, const std::string& msg) {
        fail(ErrorCode::SyntaxError,
             std::to_string(at.line) + ":" + std::to_string(at.column) + ": " + msg);
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

// ---------------------------------------------------------------------------
// Parser

class Parser {
public:
    explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

    Program program() {
        Program p;
        std::vector<ClassDecl> decls;
        while (is_ident("class")) decls.push_back(class_decl());
        for (auto& d : decls) {
            const std::string name = d.name;
            if (p.classes.find(name)) error(cur(), "duplicate class " + name);
            p.classes.add(std::move(d));
        }
        p.main = body(/*top_level=*/true);
        expect_end();
        return p;
    }

private:
    const Token& cur() const { return toks_[pos_]; }

    bool is_punct(std::string_view p) const { return cur().kind == Tok::Punct && cur().text == p; }
    bool is_ident(std::string_view s) const { return cur().kind == Tok::Ident && cur().text == s; }

    [[noreturn]] void error(const Token& at, const std::string& msg) const {
        fail(ErrorCode::SyntaxError,
             std::to_string(at.line) + ":" + std::to_string(at.column) + ": " + msg);
    }

    std::string describe(const Token& t) const {
        switch (t.kind) {
        case Tok::End: return "end of input";
        case Tok::Point: return "POINT marker";
        default: return "'" + t.text + "'";
        }
    }

    void expect_punct(std::string_view p) {
        if (!is_punct(p)) error(cur(), "expected '" + std::string(p) + "' but found " + describe(cur()));
        ++pos_;
    }

    std::string ident(const char* what) {
        if (cur().kind != Tok::Ident)
            error(cur(), std::string("expected ") + what + " but found " + describe(cur()));
        return toks_[pos_++].text;
    }

    void keyword(std::string_view kw) {
        if (!is_ident(kw)) error(cur(), "expected '" + std::string(kw) + "' but found " + describe(cur()));
        ++pos_;
    }

    void expect_end() {
        if (cur().kind != Tok::End) error(cur(), "unexpected " + describe(cur()));
    }

    TypeRef type() {
        std::string name = ident("type name");
        return TypeRef{name, primitive_kind(name)};
    }

    std::vector<Param> params() {
        std::vector<Param> out;
        expect_punct("(");
        if (!is_punct(")")) {
            do {
                Param p;
                p.type = type();
                p.name = ident("parameter name");
                out.push_back(std::move(p));
            } while (accept(","));
        }
        expect_punct(")");
        return out;
    }

    bool accept(std::string_view p) {
        if (is_punct(p)) {
            ++pos_;
            return true;
        }
        return false;
    }

    ClassDecl class_decl() {
        keyword("class");
        ClassDecl decl;
        decl.name = ident("class name");
        if (is_ident("extends")) {
            ++pos_;
            std::string super = ident("superclass name");
            if (super != "Object") decl.superclass = super;
        }
        expect_punct("{");
        bool have_ctor = false;
        while (!is_punct("}")) {
            if (cur().kind == Tok::End) error(cur(), "unterminated class body");
            // Constructor: ClassName '('
            if (is_ident(decl.name) && toks_[pos_ + 1].kind == Tok::Punct &&
                toks_[pos_ + 1].text == "(") {
                if (have_ctor) error(cur(), "duplicate constructor for " + decl.name);
                have_ctor = true;
                ++pos_;
                decl.constructor = constructor();
                continue;
            }
            TypeRef t = type();
            std::string name = ident("member name");
            if (is_punct("(")) {
                MethodDecl m;
                m.name = name;
                m.return_type = t;
                m.params = params();
                expect_punct("{");
                m.body = body(/*top_level=*/false);
                expect_punct("}");
                decl.methods.push_back(std::move(m));
            } else {
                expect_punct(";");
                if (have_ctor || !decl.methods.empty())
                    error(toks_[pos_ - 1], "field declarations must precede the constructor");
                decl.fields.push_back(FieldDef{name, t});
            }
        }
        expect_punct("}");
        if (!have_ctor) decl.constructor.super_arg_count = kSynthesize;
        return decl;
    }

    ConstructorDecl constructor() {
        ConstructorDecl k;
        k.params = params();
        expect_punct("{");
        if (is_ident("super")) {
            ++pos_;
            expect_punct("(");
            std::vector<std::string> args;
            if (!is_punct(")")) {
                do args.push_back(ident("argument")); while (accept(","));
            }
            expect_punct(")");
            expect_punct(";");
            k.super_arg_count = args.size();
            for (std::size_t i = 0; i < args.size(); ++i) {
                if (i >= k.params.size() || args[i] != k.params[i].name)
                    error(cur(), "super(...) must pass the leading constructor parameters in order");
            }
        }
        while (is_ident("this")) {
            ++pos_;
            expect_punct(".");
            std::string field = ident("field name");
            expect_punct("=");
            std::string param = ident("parameter name");
            expect_punct(";");
            k.assignments.emplace_back(std::move(field), std::move(param));
        }
        expect_punct("}");
        return k;
    }

    Argument argument() {
        const Token& t = cur();
        switch (t.kind) {
        case Tok::Int: {
            std::int64_t v = 0;
            auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
            if (ec != std::errc()) error(t, "integer literal out of range");
            ++pos_;
            return Argument::value(v);
        }
        case Tok::Float: {
            double v = std::stod(t.text);
            ++pos_;
            return Argument::value(v);
        }
        case Tok::String: ++pos_; return Argument::value(t.text);
        case Tok::Ident:
            if (t.text == "null") {
                ++pos_;
                return Argument::null();
            }
            if (t.text == "true" || t.text == "false") {
                ++pos_;
                return Argument::value(t.text == "true");
            }
            if (t.text == "new") {
                ++pos_;
                std::string cls = ident("class name");
                return Argument::allocation(std::move(cls), arguments());
            }
            ++pos_;
            return Argument::variable(t.text);
        default: error(t, "expected constructor argument but found " + describe(t));
        }
    }

    std::vector<Argument> arguments() {
        expect_punct("(");
        std::vector<Argument> out;
        if (!is_punct(")")) {
            do out.push_back(argument()); while (accept(","));
        }
        expect_punct(")");
        return out;
    }

    Expr body(bool top_level) {
        Expr e;
        for (;;) {
            bool point = false;
            if (cur().kind == Tok::Point) {
                if (points_++) error(cur(), "POINT marker may appear at most once");
                point = true;
                ++pos_;
            }
            if (is_ident("return")) {
                ++pos_;
                e.result = ident("variable");
                expect_punct(";");
                e.point_before_return = point;
                if (cur().kind == Tok::Point) error(cur(), "POINT marker after return");
                return e;
            }
            const bool at_end = top_level ? cur().kind == Tok::End : is_punct("}");
            if (at_end) {
                if (!top_level) error(cur(), "method body must end with a return");
                e.point_before_return = point;
                return e;
            }
            Command c;
            c.point_before = point;
            c.op = command();
            e.commands.push_back(std::move(c));
        }
    }

    decltype(Command::op) command() {
        std::string target = ident("variable");
        if (accept("=")) {
            keyword("new");
            New n;
            n.target = std::move(target);
            n.class_name = ident("class name");
            n.args = arguments();
            expect_punct(";");
            return n;
        }
        expect_punct(".");
        std::string member = ident("field or method name");
        if (accept("=")) {
            FieldAssign a{std::move(target), std::move(member), ident("variable")};
            expect_punct(";");
            return a;
        }
        MethodInvoke m;
        m.target = std::move(target);
        m.method = std::move(member);
        expect_punct("(");
        if (!is_punct(")")) {
            do m.args.push_back(ident("argument")); while (accept(","));
        }
        expect_punct(")");
        expect_punct(";");
        return m;
    }

public:
    static constexpr std::size_t kSynthesize = static_cast<std::size_t>(-1);

private:
    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    int points_ = 0;
};

// ---------------------------------------------------------------------------
// Static checks

void check_type(const ClassTable& ct, const TypeRef& t, const std::string& where) {
    if (t.primitive) return;
    if (!ct.find(t.name)) fail(ErrorCode::UnknownType, where + ": unknown type " + t.name);
}

void check_arguments(const ClassTable& ct, const std::vector<Argument>& args,
                     const std::string& where) {
    for (const Argument& a : args) {
        if (a.kind != Argument::Kind::Allocation) continue;
        if (!ct.find(a.name)) fail(ErrorCode::UnknownType, where + ": unknown type " + a.name);
        check_arguments(ct, a.args, where);
    }
}

void check_body(const ClassTable& ct, const Expr& e, std::set<std::string> scope,
                const std::string& where) {
    for (const Command& c : e.commands) {
        if (const auto* n = std::get_if<New>(&c.op)) {
            if (!ct.find(n->class_name))
                fail(ErrorCode::UnknownType, where + ": unknown type " + n->class_name);
            check_arguments(ct, n->args, where);
            if (!scope.insert(n->target).second)
                fail(ErrorCode::SyntaxError,
                     where + ": variable " + n->target + " is already bound (fresh names required)");
        }
    }
}

void finish_class_table(ClassTable& table) {
    // Reserved names and superclass resolution.
    for (const auto& [name, decl] : table.classes()) {
        if (is_reserved_label(name) || primitive_kind(name))
            fail(ErrorCode::SyntaxError, "class name `" + name + "` is reserved");
        if (decl.superclass && !table.find(*decl.superclass))
            fail(ErrorCode::UnknownType, "class " + name + ": unknown superclass " + *decl.superclass);
    }
    for (const auto& [name, decl] : table.classes()) {
        auto all = field_defs_of(table, name);  // rejects cyclic chains
        std::set<std::string> seen;
        for (const auto& f : all)
            if (!seen.insert(f.name).second)
                fail(ErrorCode::SyntaxError, "class " + name + ": duplicate field " + f.name);
        for (const auto& f : decl.fields) check_type(table, f.type, "class " + name);
    }

    // Constructors: synthesize the canonical one when omitted, then check shape.
    ClassTable rebuilt;
    for (const auto& [name, original] : table.classes()) {
        ClassDecl decl = original;
        const std::size_t inherited =
            decl.superclass ? field_defs_of(table, *decl.superclass).size() : 0;
        ConstructorDecl& k = decl.constructor;
        if (k.super_arg_count == Parser::kSynthesize) {
            k = ConstructorDecl{};
            for (const auto& f : field_defs_of(table, name)) k.params.push_back({f.name, f.type});
            k.super_arg_count = inherited;
            for (const auto& f : decl.fields) k.assignments.emplace_back(f.name, f.name);
        }
        const std::string where = "constructor of " + name;
        if (k.super_arg_count != inherited)
            fail(ErrorCode::ArityMismatch, where + ": super(...) must pass " +
                                               std::to_string(inherited) + " arguments");
        if (k.params.size() != inherited + decl.fields.size())
            fail(ErrorCode::ArityMismatch, where + ": expected " +
                                               std::to_string(inherited + decl.fields.size()) +
                                               " parameters");
        if (k.assignments.size() != decl.fields.size())
            fail(ErrorCode::SyntaxError, where + ": must assign every own field exactly once");
        for (std::size_t i = 0; i < decl.fields.size(); ++i) {
            const auto& [field, param] = k.assignments[i];
            const Param& p = k.params[inherited + i];
            if (field != decl.fields[i].name || param != p.name)
                fail(ErrorCode::SyntaxError,
                     where + ": expected this." + decl.fields[i].name + " = " + p.name);
            if (!(p.type == decl.fields[i].type))
                fail(ErrorCode::SyntaxError,
                     where + ": parameter " + p.name + " does not match field type");
        }
        std::set<std::string> names;
        for (const auto& p : k.params) {
            check_type(table, p.type, where);
            if (!names.insert(p.name).second)
                fail(ErrorCode::SyntaxError, where + ": duplicate parameter " + p.name);
        }
        for (const MethodDecl& m : decl.methods) {
            const std::string mwhere = "method " + name + "." + m.name;
            check_type(table, m.return_type, mwhere);
            std::set<std::string> scope{"this"};
            for (const auto& p : m.params) {
                check_type(table, p.type, mwhere);
                if (!scope.insert(p.name).second)
                    fail(ErrorCode::SyntaxError, mwhere + ": duplicate parameter " + p.name);
            }
            check_body(table, m.body, scope, mwhere);
        }
        rebuilt.add(std::move(decl));
    }
    table = std::move(rebuilt);
}

}  // namespace

Program parse_program(std::string_view text) {
    Parser parser(Lexer(text).run());
    Program p = parser.program();
    finish_class_table(p.classes);
    check_body(p.classes, p.main, {}, "program");
    return p;
}

// ---------------------------------------------------------------------------
// Interpreter

std::optional<NodeId> lookup_binding(const PropertyGraph& graph, std::string_view variable) {
    // Most recent binding wins: relationship ids grow over time.
    std::optional<RelId> best;
    for (const Node& n : graph.nodes()) {
        if (n.label != kLocalLabel) continue;
        for (RelId r : graph.outgoing(n.id)) {
            const Relationship& rel = graph.relationship(r);
            if (rel.label == variable && (!best || index_of(r) > index_of(*best))) best = r;
        }
    }
    if (!best) return std::nullopt;
    return graph.relationship(*best).end;
}

namespace {

NodeId bound_node(const PropertyGraph& graph, std::string_view variable) {
    if (auto n = lookup_binding(graph, variable)) return *n;
    fail(ErrorCode::UnboundVariable, "unbound variable " + std::string(variable));
}

PropertyValue coerce_literal(const PropertyValue& v, PrimitiveKind kind, const std::string& where) {
    switch (kind) {
    case PrimitiveKind::Integer:
        if (std::holds_alternative<std::int64_t>(v)) return v;
        break;
    case PrimitiveKind::Float:
        if (std::holds_alternative<double>(v)) return v;
        if (auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
        break;
    case PrimitiveKind::Boolean:
        if (std::holds_alternative<bool>(v)) return v;
        break;
    case PrimitiveKind::String:
        if (std::holds_alternative<std::string>(v)) return v;
        break;
    }
    fail(ErrorCode::InvalidArgument, where + ": literal " + format_value(v) + " has the wrong type");
}

void fold_fields(const PropertyGraph& graph, NodeId instance, const ClassDecl& decl,
                 std::span<const ResolvedArg> args, const ClassTable& ct, FieldInit& out) {
    const std::size_t k = decl.constructor.super_arg_count;
    if (args.size() != decl.constructor.params.size())
        fail(ErrorCode::ArityMismatch, "new " + decl.name + ": expected " +
                                           std::to_string(decl.constructor.params.size()) +
                                           " arguments, got " + std::to_string(args.size()));
    if (decl.superclass) fold_fields(graph, instance, ct.get(*decl.superclass), args.first(k), ct, out);
    for (std::size_t i = 0; i < decl.fields.size(); ++i) {
        const FieldDef& f = decl.fields[i];
        const ResolvedArg& a = args[k + i];
        const std::string where = "new " + decl.name + " field " + f.name;
        if (std::holds_alternative<std::monostate>(a)) continue;
        if (f.type.is_reference()) {
            auto* target = std::get_if<NodeId>(&a);
            if (!target) fail(ErrorCode::InvalidArgument, where + ": expected an object reference");
            out.edges.push_back(RelSpec{f.name, instance, *target});
        } else {
            auto* value = std::get_if<PropertyValue>(&a);
            if (!value) fail(ErrorCode::InvalidArgument, where + ": expected a primitive value");
            out.properties.insert_or_assign(f.name, coerce_literal(*value, *f.type.primitive, where));
        }
    }
}

}  // namespace

FieldInit mk_fields(const PropertyGraph& graph, NodeId instance, std::string_view class_name,
                    std::span<const ResolvedArg> args, const ClassTable& ct) {
    FieldInit out;
    fold_fields(graph, instance, ct.get(class_name), args, ct, out);
    return out;
}

FieldInit mk_fields(const PropertyGraph& graph, NodeId instance, std::string_view class_name,
                    std::span<const std::string> arg_variables, const ClassTable& ct) {
    std::vector<ResolvedArg> resolved;
    for (const auto& name : arg_variables) {
        if (name == "null")
            resolved.emplace_back(std::monostate{});
        else
            resolved.emplace_back(bound_node(graph, name));
    }
    return mk_fields(graph, instance, class_name, resolved, ct);
}

namespace {

NodeId class_node(PropertyGraph& graph, const std::string& class_name) {
    for (const Node& n : graph.nodes()) {
        if (n.label != kClassLabel) continue;
        auto it = n.properties.find(kClassNameKey);
        if (it != n.properties.end() && std::get<std::string>(it->second) == class_name) return n.id;
    }
    return graph.add_node(std::string(kClassLabel), {{std::string(kClassNameKey), class_name}});
}

// Allocates an instance of C with the given arguments; returns the instance.
NodeId allocate(PropertyGraph& graph, const std::string& class_name,
                const std::vector<Argument>& args, const ClassTable& ct);

ResolvedArg resolve(PropertyGraph& graph, const Argument& a, const ClassTable& ct) {
    switch (a.kind) {
    case Argument::Kind::Variable: return bound_node(graph, a.name);
    case Argument::Kind::Null: return std::monostate{};
    case Argument::Kind::Literal: return *a.literal;
    case Argument::Kind::Allocation: return allocate(graph, a.name, a.args, ct);
    }
    return std::monostate{};
}

NodeId allocate(PropertyGraph& graph, const std::string& class_name,
                const std::vector<Argument>& args, const ClassTable& ct) {
    const ClassDecl& decl = ct.get(class_name);
    if (args.size() != decl.constructor.params.size())
        fail(ErrorCode::ArityMismatch, "new " + class_name + ": expected " +
                                           std::to_string(decl.constructor.params.size()) +
                                           " arguments, got " + std::to_string(args.size()));
    std::vector<ResolvedArg> resolved;
    resolved.reserve(args.size());
    for (const Argument& a : args) resolved.push_back(resolve(graph, a, ct));

    NodeId instance = graph.add_node(class_name);
    FieldInit init = mk_fields(graph, instance, class_name, resolved, ct);
    for (auto& [key, value] : init.properties) graph.set_property(instance, key, value);
    for (const RelSpec& r : init.edges) graph.add_relationship(r.label, r.start, r.end);
    graph.add_relationship(std::string(kInstanceOfLabel), instance, class_node(graph, class_name));
    return instance;
}

// Returns true when evaluation stopped at a POINT marker.
bool run(PropertyGraph& graph, const Expr& expr, const ClassTable& ct, bool stop_at_point);

bool step(PropertyGraph& graph, const Command& command, const ClassTable& ct, bool stop_at_point) {
    if (stop_at_point && command.point_before) return true;
    struct Visitor {
        PropertyGraph& graph;
        const ClassTable& ct;
        bool stop_at_point;

        bool operator()(const FieldAssign& a) const {
            NodeId x = bound_node(graph, a.target);
            NodeId y = bound_node(graph, a.source);
            graph.set_field_edge(a.field, x, y);
            return false;
        }
        bool operator()(const MethodInvoke& m) const {
            NodeId receiver = bound_node(graph, m.target);
            MethodBody body = mbody(ct, m.method, graph.node(receiver).label);
            if (body.params.size() != m.args.size())
                fail(ErrorCode::ArityMismatch,
                     "call " + m.method + ": expected " + std::to_string(body.params.size()) +
                         " arguments, got " + std::to_string(m.args.size()));
            std::map<std::string, std::string> renaming{{"this", m.target}};
            for (std::size_t i = 0; i < m.args.size(); ++i) renaming[body.params[i].name] = m.args[i];
            return run(graph, substitute(*body.body, renaming), ct, stop_at_point);
        }
        bool operator()(const New& n) const {
            // Arguments are resolved before the binder exists so `x = new C(x)`
            // cannot observe its own binding.
            NodeId instance = allocate(graph, n.class_name, n.args, ct);
            NodeId binder = graph.add_node(std::string(kLocalLabel));
            graph.add_relationship(n.target, binder, instance);
            return false;
        }
    };
    return std::visit(Visitor{graph, ct, stop_at_point}, command.op);
}

bool run(PropertyGraph& graph, const Expr& expr, const ClassTable& ct, bool stop_at_point) {
    for (const Command& c : expr.commands)
        if (step(graph, c, ct, stop_at_point)) return true;
    if (stop_at_point && expr.point_before_return) return true;
    if (expr.result) bound_node(graph, *expr.result);
    return false;
}

}  // namespace

Expr substitute(const Expr& expr, const std::map<std::string, std::string>& renaming) {
    auto rn = [&](const std::string& v) {
        auto it = renaming.find(v);
        return it == renaming.end() ? v : it->second;
    };
    std::function<Argument(const Argument&)> rn_arg = [&](const Argument& a) {
        Argument out = a;
        if (a.kind == Argument::Kind::Variable) out.name = rn(a.name);
        for (auto& inner : out.args) inner = rn_arg(inner);
        return out;
    };
    Expr out;
    out.point_before_return = expr.point_before_return;
    if (expr.result) out.result = rn(*expr.result);
    for (const Command& c : expr.commands) {
        Command copy = c;
        std::visit(
            [&](auto& op) {
                using T = std::decay_t<decltype(op)>;
                if constexpr (std::is_same_v<T, New>) {
                    op.target = rn(op.target);
                    for (auto& a : op.args) a = rn_arg(a);
                } else if constexpr (std::is_same_v<T, FieldAssign>) {
                    op.target = rn(op.target);
                    op.source = rn(op.source);
                } else {
                    op.target = rn(op.target);
                    for (auto& a : op.args) a = rn(a);
                }
            },
            copy.op);
        out.commands.push_back(std::move(copy));
    }
    return out;
}

void step_command(PropertyGraph& graph, const Command& command, const ClassTable& ct) {
    step(graph, command, ct, false);
}

void eval_expr(PropertyGraph& graph, const Expr& expr, const ClassTable& ct) {
    run(graph, expr, ct, false);
}

PropertyGraph run_to_point(const Program& program) {
    PropertyGraph graph;
    run(graph, program.main, program.classes, true);
    return graph;
}

PropertyGraph run_to_point(std::string_view program_text) {
    return run_to_point(parse_program(program_text));
}

}  // namespace ogo::fj
