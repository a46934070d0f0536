#pragma once
// openCypher subset: positional-argument expansion, parsing, validation and
// pretty-printing.
//
// Supported: CREATE, MERGE, [OPTIONAL] MATCH, WHERE, RETURN [DISTINCT] with
// AS aliases; node patterns (v:Label {key: literal}); relationship patterns
// with type alternation and hop bounds (*, *n, *lo.., *..hi, *lo..hi);
// literals, null, variables, v.key, count(*), count([DISTINCT] e),
// equals(a, b), = <> < <= > >=, AND, OR, NOT. Everything else is rejected
// with UnsupportedFeature.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ogo/property_graph.hpp"

namespace ogo::cypher {

// ---- positional arguments ---------------------------------------------------

struct Uid {
    std::int64_t value;
};
struct ClassName {
    std::string value;
};
struct UidList {
    std::vector<std::int64_t> values;
};
using PositionalArg = std::variant<Uid, ClassName, UidList>;

// `[]k`: the query runs once per element of argument k, results unioned.
struct BatchPlan {
    std::size_t argument = 0;  // 1-based
    std::vector<std::int64_t> uids;
    std::vector<std::string> queries;  // one expanded text per element
};

struct Expansion {
    // The expanded query. For a batch this is the text with the collection
    // marker expanded as uid 0; it fixes the column names and is what gets
    // validated when the collection is empty.
    std::string text;
    std::optional<BatchPlan> batch;
};

// `$k` -> `$uid`: <uid>, `@k` -> `ClassName` (backtick-quoted), `[]k` -> batch.
// Markers inside string literals and backtick-quoted names are left alone.
// Throws PositionalIndex / PositionalKind / UnsupportedFeature (two
// different collection arguments).
Expansion expand_positional(std::string_view fmt, const std::vector<PositionalArg>& args);

// ---- AST --------------------------------------------------------------------

enum class CompareOp { Eq, Ne, Lt, Le, Gt, Ge };

struct Expr {
    enum class Kind { Literal, Null, Variable, Property, CountStar, Count, Equals, Compare, And, Or, Not };

    Kind kind = Kind::Null;
    PropertyValue literal{std::int64_t{0}};  // Literal
    std::string name;                        // Variable; Property key
    CompareOp op = CompareOp::Eq;            // Compare
    bool distinct = false;                   // Count
    // Property: [object]; Count: [arg]; Equals/Compare/And/Or: [lhs, rhs]; Not: [arg]
    std::vector<Expr> children;

    bool contains_aggregate() const;
    friend bool operator==(const Expr&, const Expr&) = default;

    static Expr lit(PropertyValue v);
    static Expr null();
    static Expr var(std::string n);
    static Expr prop(Expr object, std::string key);
    static Expr count_star();
    static Expr count(Expr arg, bool distinct);
    static Expr equals(Expr a, Expr b);
    static Expr compare(CompareOp op, Expr a, Expr b);
    static Expr both(Expr a, Expr b);
    static Expr either(Expr a, Expr b);
    static Expr negate(Expr a);
};

struct NodePattern {
    std::optional<std::string> variable;
    std::optional<std::string> label;
    Properties properties;
    friend bool operator==(const NodePattern&, const NodePattern&) = default;
};

enum class RelDirection { Right, Left, Both };  // -[]->, <-[]-, -[]-

struct RelPattern {
    std::optional<std::string> variable;  // fixed-length only
    std::vector<std::string> types;       // empty: any
    RelDirection direction = RelDirection::Both;
    bool variable_length = false;
    std::uint32_t min_hops = 1;
    std::optional<std::uint32_t> max_hops = 1;  // nullopt: unbounded
    friend bool operator==(const RelPattern&, const RelPattern&) = default;
};

// nodes.size() == rels.size() + 1
struct PathPattern {
    std::vector<NodePattern> nodes;
    std::vector<RelPattern> rels;
    friend bool operator==(const PathPattern&, const PathPattern&) = default;
};

struct CreateClause {
    std::vector<PathPattern> patterns;
    friend bool operator==(const CreateClause&, const CreateClause&) = default;
};
struct MergeClause {
    PathPattern pattern;
    friend bool operator==(const MergeClause&, const MergeClause&) = default;
};
struct MatchClause {
    std::vector<PathPattern> patterns;
    bool optional = false;
    friend bool operator==(const MatchClause&, const MatchClause&) = default;
};
struct WhereClause {
    Expr condition;
    friend bool operator==(const WhereClause&, const WhereClause&) = default;
};
struct ReturnItem {
    Expr expr;
    std::optional<std::string> alias;
    std::string column() const;  // alias, else the printed expression
    friend bool operator==(const ReturnItem&, const ReturnItem&) = default;
};
struct ReturnClause {
    std::vector<ReturnItem> items;
    bool distinct = false;
    friend bool operator==(const ReturnClause&, const ReturnClause&) = default;
};

using Clause = std::variant<CreateClause, MergeClause, MatchClause, WhereClause, ReturnClause>;

struct Query {
    std::vector<Clause> clauses;
    friend bool operator==(const Query&, const Query&) = default;
};

// ---- operations ---------------------------------------------------------------

// Throws SyntaxError ("line:col: ...") or UnsupportedFeature.
Query parse(std::string_view text);

struct Diagnostic {
    std::string message;
};

// Variable binding, clause order, aggregate placement, write-pattern shape.
std::vector<Diagnostic> validate(const Query& query);

// Throws Validation with every diagnostic when validate() reports any.
void check(const Query& query);

std::string to_string(const Query& query);
std::string to_string(const Expr& expr);
std::string to_string(const PathPattern& pattern);

// Identifier as it must appear in query text: bare when possible, else in
// backticks.
std::string quote_name(std::string_view name);

}  // namespace ogo::cypher
