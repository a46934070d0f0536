#pragma once
// Query facade over a heap snapshot.
//
// Each query runs the whole pipeline: positional expansion, subgraph
// extraction (bounded by roots or over every object), parsing, validation and
// execution. Failures are rethrown tagged with the stage that raised them.
// A QueryContext is not thread safe.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "ogo/cypher.hpp"
#include "ogo/error.hpp"
#include "ogo/heap_snapshot.hpp"
#include "ogo/query_engine.hpp"
#include "ogo/subgraph.hpp"

namespace ogo {

using cypher::PositionalArg;

// Wall-clock milliseconds per pipeline stage.
using StageTimings = std::map<Stage, double>;

class ResultSet {
public:
    ResultSet(ResultTable table, std::shared_ptr<const PropertyGraph> graph, StageTimings timings);

    // Advances the cursor; false once past the last row.
    bool next();
    // 1-based number of the current row; 0 before the first next().
    std::size_t row() const { return cursor_; }
    std::size_t row_count() const { return table_.rows.size(); }
    const std::vector<std::string>& columns() const { return table_.columns; }

    // Throw CursorPosition unless next() just returned true; UnknownColumn
    // for a bad index or name.
    const Value& get(std::size_t column) const;
    const Value& get(std::string_view column) const;

    // `$uid` of a node value, if it has one.
    std::optional<std::int64_t> uid(const Value& v) const;
    std::string text(const Value& v) const { return render_value(*graph_, v); }

    const ResultTable& table() const { return table_; }
    const PropertyGraph& graph() const { return *graph_; }
    const StageTimings& timings() const { return timings_; }
    const std::vector<std::string>& warnings() const { return table_.warnings; }

private:
    ResultTable table_;
    std::shared_ptr<const PropertyGraph> graph_;
    StageTimings timings_;
    std::size_t cursor_ = 0;
};

struct ObjectHandle {
    std::int64_t uid = 0;
    const ObjectRecord* object = nullptr;  // into the context's snapshot
};

enum class ExecutionPath {
    InMemory,
    // Round-trips the extracted graph through export_csv / import_csv before
    // executing, like loading it into an external graph store.
    ViaCsv,
};

// nullopt: unbounded (every snapshot object is a candidate).
using Roots = std::optional<std::vector<ObjectId>>;

namespace detail {

inline PositionalArg to_arg(const PositionalArg& a) { return a; }
inline PositionalArg to_arg(cypher::Uid a) { return a; }
inline PositionalArg to_arg(cypher::ClassName a) { return a; }
inline PositionalArg to_arg(cypher::UidList a) { return a; }
inline PositionalArg to_arg(const char* s) { return cypher::ClassName{s}; }
inline PositionalArg to_arg(std::string s) { return cypher::ClassName{std::move(s)}; }
inline PositionalArg to_arg(std::string_view s) { return cypher::ClassName{std::string(s)}; }
inline PositionalArg to_arg(const std::vector<std::int64_t>& v) { return cypher::UidList{v}; }
inline PositionalArg to_arg(const std::set<std::int64_t>& v) { return cypher::UidList{{v.begin(), v.end()}}; }
template <typename T, typename = std::enable_if_t<std::is_integral_v<T> && !std::is_same_v<T, bool>>>
PositionalArg to_arg(T v) {
    return cypher::Uid{static_cast<std::int64_t>(v)};
}

template <typename... A>
std::vector<PositionalArg> args(A&&... a) {
    return {to_arg(std::forward<A>(a))...};
}

}  // namespace detail

class Session;

class QueryContext {
public:
    explicit QueryContext(HeapSnapshot snapshot);
    static QueryContext from_json(std::string_view json_text);

    const HeapSnapshot& snapshot() const { return *snapshot_; }
    const UidAssignment& uids() const { return uids_; }

    // Whitelist, blacklist and force_collect applied to every query; the
    // roots field is ignored (roots come per call).
    ExtractionConfig& defaults() { return defaults_; }
    const ExtractionConfig& defaults() const { return defaults_; }

    // Reuse extracted graphs across calls with the same roots and config.
    // Off by default. With it on, writes made by one query are visible to
    // later queries over the same extraction.
    void set_memoize(bool on);
    void set_execution_path(ExecutionPath path) { path_ = path; }

    // Generic entry point behind every query method.
    ResultSet run(const Roots& roots, std::string_view fmt, const std::vector<PositionalArg>& args = {});

    template <typename... A>
    ResultSet query_bounded(ObjectId root, std::string_view fmt, A&&... a) {
        return run(std::vector<ObjectId>{root}, fmt, detail::args(std::forward<A>(a)...));
    }
    template <typename... A>
    ResultSet query_bounded(const std::vector<ObjectId>& roots, std::string_view fmt, A&&... a) {
        return run(roots, fmt, detail::args(std::forward<A>(a)...));
    }
    template <typename... A>
    ResultSet query_unbounded(std::string_view fmt, A&&... a) {
        return run(std::nullopt, fmt, detail::args(std::forward<A>(a)...));
    }

    // Single-cell results. ShapeError unless exactly one row and one column;
    // CastError when the cell has another kind (null included).
    bool query_boolean(const Roots& roots, std::string_view fmt, const std::vector<PositionalArg>& args = {});
    std::int64_t query_long(const Roots& roots, std::string_view fmt, const std::vector<PositionalArg>& args = {});
    std::string query_string(const Roots& roots, std::string_view fmt, const std::vector<PositionalArg>& args = {});
    ObjectHandle query_object(const Roots& roots, std::string_view fmt, const std::vector<PositionalArg>& args = {});

    // A long-lived graph (extracted once) that accumulates writes across
    // queries, for interactive use.
    Session open_session(const Roots& roots);

    // The graph a query over `roots` would see.
    PropertyGraph extract_graph(const Roots& roots) const;

private:
    std::shared_ptr<PropertyGraph> graph_for(const Roots& roots, StageTimings& timings);
    Value single_cell(const Roots& roots, std::string_view fmt, const std::vector<PositionalArg>& args);

    std::shared_ptr<const HeapSnapshot> snapshot_;
    UidAssignment uids_;
    ExtractionConfig defaults_;
    ExecutionPath path_ = ExecutionPath::InMemory;
    bool memoize_ = false;
    std::map<std::string, std::shared_ptr<PropertyGraph>> memo_;
};

class Session {
public:
    explicit Session(std::shared_ptr<PropertyGraph> graph) : graph_(std::move(graph)) {}

    ResultSet run(std::string_view fmt, const std::vector<PositionalArg>& args = {});
    const PropertyGraph& graph() const { return *graph_; }

private:
    std::shared_ptr<PropertyGraph> graph_;
};

// Expand, parse, validate and execute against `graph`, recording per-stage
// timings. Shared by the context and sessions.
ResultTable run_query(PropertyGraph& graph, std::string_view fmt, const std::vector<PositionalArg>& args,
                      StageTimings& timings);

}  // namespace ogo
