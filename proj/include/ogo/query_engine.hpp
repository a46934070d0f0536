#pragma once
// Evaluation of validated queries against a PropertyGraph.
//
// Rows are produced clause by clause. Within one MATCH clause no relationship
// is used twice. Variable-length segments enumerate relationship-simple paths
// depth first. New rows for one input row are ordered by the ids they bind,
// in variable introduction order. WHERE keeps rows whose condition is true
// (null counts as false); comparisons with null yield null.

#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ogo/cypher.hpp"
#include "ogo/property_graph.hpp"

namespace ogo {

// Cell / binding value; std::monostate is null (absent).
using Value = std::variant<std::monostate, PropertyValue, NodeId, RelId>;

inline bool is_null(const Value& v) { return std::holds_alternative<std::monostate>(v); }

struct ResultTable {
    std::vector<std::string> columns;
    std::vector<std::vector<Value>> rows;
    std::vector<std::string> warnings;
};

// Text for a cell: nodes as `#<uid>:<label>` (`#n<id>:<label>` when the node
// has no `$uid`), relationships as `[<id>:<type>]`, null as `null`.
std::string render_value(const PropertyGraph& graph, const Value& value);

namespace engine {

using Binding = std::map<std::string, Value, std::less<>>;

// Every extension of `seed` matching all patterns. With `optional`, an
// unmatched seed yields itself with the pattern's new variables null.
std::vector<Binding> match_pattern(const PropertyGraph& graph, const std::vector<cypher::PathPattern>& patterns,
                                   const Binding& seed, bool optional);

// Throws TypeMismatch (e.g. ordering a string against an integer) and
// InvalidArgument for aggregates, which are only meaningful in RETURN.
Value eval_expression(const Binding& binding, const cypher::Expr& expr, const PropertyGraph& graph);

// Runs a checked query. Writes are applied as they happen; a failing clause
// leaves earlier writes in place.
ResultTable execute(const cypher::Query& query, PropertyGraph& graph);

// Runs each element query of the plan in order and concatenates the rows.
// `template_text` supplies the columns when the collection is empty.
ResultTable execute_batch(const cypher::BatchPlan& plan, std::string_view template_text, PropertyGraph& graph);

}  // namespace engine

}  // namespace ogo
