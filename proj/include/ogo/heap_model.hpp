#pragma once
// A Featherweight-Java-style object language whose interpreter state is a
// PropertyGraph. Allocation, field assignment and method invocation are
// defined directly as graph transformations:
//
//   x.f = y            replace the outgoing `f` edge of R(x).end by one to R(y).end
//   x.m(a1..an)        evaluate mbody(m) with params := a1..an, this := x
//   x = new C(a1..an)  add a `Local` binder for x, an instance node labeled C,
//                      the binding edge x, the field edges from mk_fields and
//                      an `instanceof` edge to C's class-metadata node
//
// R(x) is the binding relationship labeled x that leaves a `Local` node.
//
// Concrete syntax:
//
//   class C extends D {
//     T f; ...
//     C(T x, ...) { super(x1, .., xk); this.f = y; ... }
//     T m(T x, ...) { c; ...; return x; }
//   }
//   c; ...; [return x;]
//
// where a command c is `x = new C(args)`, `x.f = y` or `x.m(y, ...)`.
// Constructor arguments may be variables, `null`, primitive literals or nested
// anonymous allocations `new C(...)`. A `/* POINT */` comment may precede any
// command (or the final return) to mark a snapshot location.

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ogo/property_graph.hpp"

namespace ogo::fj {

enum class PrimitiveKind { Integer, Float, Boolean, String };

struct TypeRef {
    std::string name;
    std::optional<PrimitiveKind> primitive;

    bool is_reference() const { return !primitive.has_value(); }
    friend bool operator==(const TypeRef&, const TypeRef&) = default;
};

struct Param {
    std::string name;
    TypeRef type;
    friend bool operator==(const Param&, const Param&) = default;
};

struct FieldDef {
    std::string name;
    TypeRef type;
    friend bool operator==(const FieldDef&, const FieldDef&) = default;
};

// Constructor argument.
struct Argument {
    enum class Kind { Variable, Null, Literal, Allocation };

    Kind kind = Kind::Variable;
    std::string name;  // variable name, or class name for Allocation
    std::optional<PropertyValue> literal;
    std::vector<Argument> args;  // Allocation only

    static Argument variable(std::string n) { return {Kind::Variable, std::move(n), {}, {}}; }
    static Argument null() { return {Kind::Null, {}, {}, {}}; }
    static Argument value(PropertyValue v) { return {Kind::Literal, {}, std::move(v), {}}; }
    static Argument allocation(std::string cls, std::vector<Argument> a) {
        return {Kind::Allocation, std::move(cls), {}, std::move(a)};
    }

    friend bool operator==(const Argument&, const Argument&) = default;
};

struct New {
    std::string target;
    std::string class_name;
    std::vector<Argument> args;
    friend bool operator==(const New&, const New&) = default;
};

struct FieldAssign {
    std::string target;
    std::string field;
    std::string source;
    friend bool operator==(const FieldAssign&, const FieldAssign&) = default;
};

struct MethodInvoke {
    std::string target;
    std::string method;
    std::vector<std::string> args;
    friend bool operator==(const MethodInvoke&, const MethodInvoke&) = default;
};

struct Command {
    std::variant<New, FieldAssign, MethodInvoke> op;
    bool point_before = false;  // a `/* POINT */` marker precedes this command
    friend bool operator==(const Command&, const Command&) = default;
};

// `c1; c2; ...; return x` flattened; `result` is empty for a top-level
// program without a return.
struct Expr {
    std::vector<Command> commands;
    std::optional<std::string> result;
    bool point_before_return = false;
    friend bool operator==(const Expr&, const Expr&) = default;
};

struct MethodDecl {
    std::string name;
    std::vector<Param> params;
    TypeRef return_type;
    Expr body;
};

struct ConstructorDecl {
    std::vector<Param> params;
    std::size_t super_arg_count = 0;
    // (field, parameter) in field declaration order.
    std::vector<std::pair<std::string, std::string>> assignments;
};

struct ClassDecl {
    std::string name;
    std::optional<std::string> superclass;
    std::vector<FieldDef> fields;
    ConstructorDecl constructor;
    std::vector<MethodDecl> methods;
};

class ClassTable {
public:
    void add(ClassDecl decl);
    const ClassDecl* find(std::string_view name) const;
    const ClassDecl& get(std::string_view name) const;  // throws UnknownClass
    std::size_t size() const { return classes_.size(); }
    const std::map<std::string, ClassDecl, std::less<>>& classes() const { return classes_; }

private:
    std::map<std::string, ClassDecl, std::less<>> classes_;
};

struct Program {
    ClassTable classes;
    Expr main;
};

// Parses and checks a program: declared types only, acyclic superclass
// chains, constructors of the form super(first k params); this.f = param for
// each own field in order, and fresh local names.
Program parse_program(std::string_view text);

// Field names of C: superclass fields first, then own fields.
std::vector<std::string> fields_of(const ClassTable& ct, std::string_view class_name);
std::vector<FieldDef> field_defs_of(const ClassTable& ct, std::string_view class_name);

struct MethodBody {
    std::vector<Param> params;
    const Expr* body = nullptr;
    std::string declaring_class;
};

// Nearest declaration of `method` on C's superclass chain.
MethodBody mbody(const ClassTable& ct, std::string_view method, std::string_view class_name);

// Constructor argument after resolution: null, an object node, or a primitive.
using ResolvedArg = std::variant<std::monostate, NodeId, PropertyValue>;

struct RelSpec {
    std::string label;
    NodeId start;
    NodeId end;
    friend bool operator==(const RelSpec&, const RelSpec&) = default;
};

struct FieldInit {
    std::vector<RelSpec> edges;
    Properties properties;  // primitive constructor arguments
};

// The node a variable is bound to: end of the most recent binding
// relationship labeled `variable` leaving a `Local` node.
std::optional<NodeId> lookup_binding(const PropertyGraph& graph, std::string_view variable);

// Field relationships for a fresh instance of C. The first k arguments
// initialise the superclass (recursively), the rest C's own fields.
FieldInit mk_fields(const PropertyGraph& graph, NodeId instance, std::string_view class_name,
                    std::span<const ResolvedArg> args, const ClassTable& ct);

// Same, resolving each argument name through its binding; `null` is null.
FieldInit mk_fields(const PropertyGraph& graph, NodeId instance, std::string_view class_name,
                    std::span<const std::string> arg_variables, const ClassTable& ct);

void step_command(PropertyGraph& graph, const Command& command, const ClassTable& ct);
void eval_expr(PropertyGraph& graph, const Expr& expr, const ClassTable& ct);

// Evaluates the program up to its `/* POINT */` marker (or to the end).
PropertyGraph run_to_point(std::string_view program_text);
PropertyGraph run_to_point(const Program& program);

// Renames variables: every occurrence of a key is replaced by its value.
Expr substitute(const Expr& expr, const std::map<std::string, std::string>& renaming);

}  // namespace ogo::fj
