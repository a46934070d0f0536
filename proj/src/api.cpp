#include "ogo/api.hpp"

#include <algorithm>
#include <chrono>

#include "ogo/snapshot_io.hpp"

namespace ogo {

namespace {

template <typename F>
auto timed(Stage stage, StageTimings& timings, F&& f) {
    const auto start = std::chrono::steady_clock::now();
    auto record = [&] {
        timings[stage] += std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    };
    try {
        if constexpr (std::is_void_v<decltype(f())>) {
            f();
            record();
        } else {
            auto result = f();
            record();
            return result;
        }
    } catch (const Error& e) {
        throw e.with_stage(stage);
    }
}

std::string memo_key(const Roots& roots, const ExtractionConfig& c) {
    std::string key;
    if (roots) {
        std::vector<ObjectId> r = *roots;
        std::sort(r.begin(), r.end());
        for (auto id : r) key += std::to_string(id) + ",";
    } else {
        key += "*";
    }
    key += "|";
    for (const auto& w : c.whitelist) key += w + ",";
    key += "|";
    for (const auto& b : c.blacklist) key += b + ",";
    key += c.force_collect ? "|gc" : "|";
    return key;
}

}  // namespace

// ---- ResultSet ------------------------------------------------------------------

ResultSet::ResultSet(ResultTable table, std::shared_ptr<const PropertyGraph> graph, StageTimings timings)
    : table_(std::move(table)), graph_(std::move(graph)), timings_(std::move(timings)) {}

bool ResultSet::next() {
    if (cursor_ < table_.rows.size()) {
        ++cursor_;
        return true;
    }
    cursor_ = table_.rows.size() + 1;
    return false;
}

const Value& ResultSet::get(std::size_t column) const {
    if (cursor_ == 0 || cursor_ > table_.rows.size())
        throw Error(ErrorCode::CursorPosition, "no current row; call next() first", Stage::Result);
    if (column >= table_.columns.size())
        throw Error(ErrorCode::UnknownColumn, "column index " + std::to_string(column) + " out of range",
                    Stage::Result);
    return table_.rows[cursor_ - 1][column];
}

const Value& ResultSet::get(std::string_view column) const {
    auto it = std::find(table_.columns.begin(), table_.columns.end(), column);
    if (it == table_.columns.end())
        throw Error(ErrorCode::UnknownColumn, "no column named " + std::string(column), Stage::Result);
    return get(static_cast<std::size_t>(it - table_.columns.begin()));
}

std::optional<std::int64_t> ResultSet::uid(const Value& v) const {
    auto* n = std::get_if<NodeId>(&v);
    if (!n) return std::nullopt;
    const Properties& props = graph_->node(*n).properties;
    auto it = props.find(kUidKey);
    if (it == props.end() || !std::holds_alternative<std::int64_t>(it->second)) return std::nullopt;
    return std::get<std::int64_t>(it->second);
}

// ---- pipeline -------------------------------------------------------------------

ResultTable run_query(PropertyGraph& graph, std::string_view fmt, const std::vector<PositionalArg>& args,
                      StageTimings& timings) {
    cypher::Expansion expansion = timed(Stage::Expand, timings, [&] { return cypher::expand_positional(fmt, args); });

    if (expansion.batch) {
        // Every element query goes through the same stages; the template
        // fixes the columns.
        ResultTable out;
        cypher::Query tmpl = timed(Stage::Parse, timings, [&] { return cypher::parse(expansion.text); });
        timed(Stage::Validate, timings, [&] { cypher::check(tmpl); });
        for (const auto& c : tmpl.clauses)
            if (auto* r = std::get_if<cypher::ReturnClause>(&c))
                for (const auto& item : r->items) out.columns.push_back(item.column());
        for (const std::string& text : expansion.batch->queries) {
            cypher::Query q = timed(Stage::Parse, timings, [&] { return cypher::parse(text); });
            timed(Stage::Validate, timings, [&] { cypher::check(q); });
            ResultTable part = timed(Stage::Execute, timings, [&] { return engine::execute(q, graph); });
            for (auto& r : part.rows) out.rows.push_back(std::move(r));
            for (auto& w : part.warnings)
                if (std::find(out.warnings.begin(), out.warnings.end(), w) == out.warnings.end())
                    out.warnings.push_back(std::move(w));
        }
        return out;
    }

    cypher::Query q = timed(Stage::Parse, timings, [&] { return cypher::parse(expansion.text); });
    timed(Stage::Validate, timings, [&] { cypher::check(q); });
    return timed(Stage::Execute, timings, [&] { return engine::execute(q, graph); });
}

// ---- QueryContext -----------------------------------------------------------------

QueryContext::QueryContext(HeapSnapshot snapshot)
    : snapshot_(std::make_shared<const HeapSnapshot>(std::move(snapshot))) {
    validate_snapshot(*snapshot_);
    uids_ = assign_unique_ids(*snapshot_);
}

QueryContext QueryContext::from_json(std::string_view json_text) { return QueryContext(load_snapshot(json_text)); }

void QueryContext::set_memoize(bool on) {
    memoize_ = on;
    if (!on) memo_.clear();
}

PropertyGraph QueryContext::extract_graph(const Roots& roots) const {
    ExtractionConfig config = defaults_;
    config.roots.clear();
    if (roots) {
        if (roots->empty()) fail(ErrorCode::InvalidArgument, "a bounded query needs at least one root");
        config.roots = *roots;
    }
    return extract(*snapshot_, config);
}

std::shared_ptr<PropertyGraph> QueryContext::graph_for(const Roots& roots, StageTimings& timings) {
    std::string key;
    if (memoize_) {
        key = memo_key(roots, defaults_);
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    }
    auto graph = std::make_shared<PropertyGraph>(
        timed(Stage::Extract, timings, [&] { return extract_graph(roots); }));
    if (path_ == ExecutionPath::ViaCsv) {
        CsvBundle bundle = timed(Stage::Export, timings, [&] { return export_csv(*graph); });
        *graph = timed(Stage::Import, timings, [&] { return import_csv(bundle); });
    }
    if (memoize_) memo_.emplace(key, graph);
    return graph;
}

ResultSet QueryContext::run(const Roots& roots, std::string_view fmt, const std::vector<PositionalArg>& args) {
    StageTimings timings;
    // Expansion errors surface before any extraction work.
    timed(Stage::Expand, timings, [&] { cypher::expand_positional(fmt, args); });
    timings.clear();
    auto graph = graph_for(roots, timings);
    ResultTable table = run_query(*graph, fmt, args, timings);
    return ResultSet(std::move(table), graph, std::move(timings));
}

Value QueryContext::single_cell(const Roots& roots, std::string_view fmt, const std::vector<PositionalArg>& args) {
    ResultSet rs = run(roots, fmt, args);
    if (rs.row_count() != 1 || rs.columns().size() != 1)
        throw Error(ErrorCode::ShapeError,
                    "expected a 1x1 result, got " + std::to_string(rs.row_count()) + "x" +
                        std::to_string(rs.columns().size()),
                    Stage::Result);
    return rs.table().rows[0][0];
}

namespace {

template <typename T>
const T& cast(const Value& v, const char* wanted) {
    if (auto* p = std::get_if<PropertyValue>(&v))
        if (auto* x = std::get_if<T>(p)) return *x;
    std::string got = is_null(v) ? "null"
                      : std::holds_alternative<NodeId>(v) ? "node"
                      : std::holds_alternative<RelId>(v)  ? "relationship"
                                                          : kind_name(std::get<PropertyValue>(v));
    throw Error(ErrorCode::CastError, std::string("cannot cast ") + got + " to " + wanted, Stage::Result);
}

}  // namespace

bool QueryContext::query_boolean(const Roots& roots, std::string_view fmt, const std::vector<PositionalArg>& args) {
    return cast<bool>(single_cell(roots, fmt, args), "boolean");
}

std::int64_t QueryContext::query_long(const Roots& roots, std::string_view fmt,
                                      const std::vector<PositionalArg>& args) {
    return cast<std::int64_t>(single_cell(roots, fmt, args), "long");
}

std::string QueryContext::query_string(const Roots& roots, std::string_view fmt,
                                       const std::vector<PositionalArg>& args) {
    return cast<std::string>(single_cell(roots, fmt, args), "string");
}

ObjectHandle QueryContext::query_object(const Roots& roots, std::string_view fmt,
                                        const std::vector<PositionalArg>& args) {
    ResultSet rs = run(roots, fmt, args);
    if (rs.row_count() != 1 || rs.columns().size() != 1)
        throw Error(ErrorCode::ShapeError,
                    "expected a 1x1 result, got " + std::to_string(rs.row_count()) + "x" +
                        std::to_string(rs.columns().size()),
                    Stage::Result);
    const Value& v = rs.table().rows[0][0];
    auto uid = rs.uid(v);
    if (!uid) throw Error(ErrorCode::CastError, "result is not a heap object", Stage::Result);
    return ObjectHandle{*uid, snapshot_->find_object(*uid)};
}

Session QueryContext::open_session(const Roots& roots) {
    StageTimings ignored;
    return Session(std::make_shared<PropertyGraph>(*graph_for(roots, ignored)));
}

ResultSet Session::run(std::string_view fmt, const std::vector<PositionalArg>& args) {
    StageTimings timings;
    ResultTable table = run_query(*graph_, fmt, args, timings);
    return ResultSet(std::move(table), graph_, std::move(timings));
}

}  // namespace ogo
