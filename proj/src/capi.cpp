#include "ogo/ogo.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include "ogo/api.hpp"
#include "ogo/heap_model.hpp"
#include "ogo/snapshot_io.hpp"

struct ogo_context {
    ogo::QueryContext ctx;
};

struct ogo_result {
    ogo::ResultSet rs;
};

struct ogo_session {
    ogo::Session session;
};

namespace {

thread_local std::string last_message;
thread_local std::string last_stage;

ogo_status code_of(ogo::ErrorCode c) { return static_cast<ogo_status>(static_cast<int>(c) + 1); }

ogo_status record(ogo_status status, std::string message, std::string stage = "") {
    last_message = std::move(message);
    last_stage = std::move(stage);
    return status;
}

template <typename F>
ogo_status guard(F&& f) {
    try {
        f();
        return OGO_OK;
    } catch (const ogo::Error& e) {
        std::string stage = e.stage() == ogo::Stage::None ? "" : std::string(ogo::to_string(e.stage()));
        return record(code_of(e.code()), e.what(), stage);
    } catch (const std::bad_alloc&) {
        return record(OGO_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return record(OGO_ERR_INTERNAL, e.what());
    } catch (...) {
        return record(OGO_ERR_INTERNAL, "unknown error");
    }
}

#define OGO_REQUIRE(cond)                                                               \
    do {                                                                                \
        if (!(cond)) return record(OGO_ERR_INVALID_ARGUMENT, "null argument: " #cond); \
    } while (0)

char* dup(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.data(), s.size() + 1);
    return out;
}

std::vector<ogo::PositionalArg> convert(const ogo_arg* args, size_t n) {
    std::vector<ogo::PositionalArg> out;
    if (n && !args) ogo::fail(ogo::ErrorCode::InvalidArgument, "null argument array");
    for (size_t i = 0; i < n; ++i) {
        const ogo_arg& a = args[i];
        switch (a.kind) {
        case OGO_ARG_UID: out.emplace_back(ogo::cypher::Uid{a.uid}); break;
        case OGO_ARG_CLASS:
            if (!a.class_name) ogo::fail(ogo::ErrorCode::InvalidArgument, "null class name");
            out.emplace_back(ogo::cypher::ClassName{a.class_name});
            break;
        case OGO_ARG_UID_LIST:
            if (a.uid_count && !a.uids) ogo::fail(ogo::ErrorCode::InvalidArgument, "null uid list");
            out.emplace_back(ogo::cypher::UidList{{a.uids, a.uids + a.uid_count}});
            break;
        default: ogo::fail(ogo::ErrorCode::InvalidArgument, "unknown argument kind");
        }
    }
    return out;
}

ogo::Roots roots_of(const int64_t* roots, size_t n) {
    if (!roots) return std::nullopt;
    return std::vector<ogo::ObjectId>(roots, roots + n);
}

std::set<std::string> names(const char* const* classes, size_t n) {
    if (n && !classes) ogo::fail(ogo::ErrorCode::InvalidArgument, "null class list");
    std::set<std::string> out;
    for (size_t i = 0; i < n; ++i) {
        if (!classes[i]) ogo::fail(ogo::ErrorCode::InvalidArgument, "null class name");
        out.insert(classes[i]);
    }
    return out;
}

const ogo::Value& cell(const ogo_result* rs, size_t column) { return rs->rs.get(column); }

}  // namespace

extern "C" {

const char* ogo_version(void) { return "0.1.0"; }
const char* ogo_last_error_message(void) { return last_message.c_str(); }
const char* ogo_last_error_stage(void) { return last_stage.c_str(); }

const char* ogo_status_name(ogo_status status) {
    if (status == OGO_OK) return "ok";
    if (status == OGO_ERR_INTERNAL) return "internal";
    int c = static_cast<int>(status) - 1;
    if (c < 0 || c > static_cast<int>(ogo::ErrorCode::UnknownColumn)) return "unknown";
    return ogo::to_string(static_cast<ogo::ErrorCode>(c)).data();
}

void ogo_string_free(char* s) { std::free(s); }

ogo_status ogo_run_program(const char* program_text, int indent, char** snapshot_json) {
    OGO_REQUIRE(program_text && snapshot_json);
    return guard([&] {
        ogo::PropertyGraph g = ogo::fj::run_to_point(program_text);
        *snapshot_json = dup(ogo::save_snapshot(ogo::graph_to_snapshot(g), indent));
    });
}

ogo_status ogo_context_open(const char* path, ogo_context** out) {
    OGO_REQUIRE(path && out);
    return guard([&] {
        std::ifstream in(path, std::ios::binary);
        if (!in) ogo::fail(ogo::ErrorCode::Io, std::string("cannot open ") + path);
        std::ostringstream buf;
        buf << in.rdbuf();
        if (in.bad()) ogo::fail(ogo::ErrorCode::Io, std::string("cannot read ") + path);
        *out = new ogo_context{ogo::QueryContext::from_json(buf.str())};
    });
}

ogo_status ogo_context_from_json(const char* json, size_t length, ogo_context** out) {
    OGO_REQUIRE(json && out);
    return guard([&] { *out = new ogo_context{ogo::QueryContext::from_json(std::string_view(json, length))}; });
}

void ogo_context_free(ogo_context* ctx) { delete ctx; }

ogo_status ogo_context_set_whitelist(ogo_context* ctx, const char* const* classes, size_t count) {
    OGO_REQUIRE(ctx);
    return guard([&] { ctx->ctx.defaults().whitelist = names(classes, count); });
}

ogo_status ogo_context_set_blacklist(ogo_context* ctx, const char* const* classes, size_t count) {
    OGO_REQUIRE(ctx);
    return guard([&] { ctx->ctx.defaults().blacklist = names(classes, count); });
}

ogo_status ogo_context_set_force_collect(ogo_context* ctx, int on) {
    OGO_REQUIRE(ctx);
    ctx->ctx.defaults().force_collect = on != 0;
    return OGO_OK;
}

ogo_status ogo_context_set_memoize(ogo_context* ctx, int on) {
    OGO_REQUIRE(ctx);
    ctx->ctx.set_memoize(on != 0);
    return OGO_OK;
}

ogo_status ogo_context_set_via_csv(ogo_context* ctx, int on) {
    OGO_REQUIRE(ctx);
    ctx->ctx.set_execution_path(on ? ogo::ExecutionPath::ViaCsv : ogo::ExecutionPath::InMemory);
    return OGO_OK;
}

ogo_status ogo_query(ogo_context* ctx, const int64_t* roots, size_t root_count, const char* fmt,
                     const ogo_arg* args, size_t arg_count, ogo_result** out) {
    OGO_REQUIRE(ctx && fmt && out);
    return guard([&] {
        auto rs = ctx->ctx.run(roots_of(roots, root_count), fmt, convert(args, arg_count));
        *out = new ogo_result{std::move(rs)};
    });
}

ogo_status ogo_query_boolean(ogo_context* ctx, const int64_t* roots, size_t root_count, const char* fmt,
                             const ogo_arg* args, size_t arg_count, int* out) {
    OGO_REQUIRE(ctx && fmt && out);
    return guard([&] {
        *out = ctx->ctx.query_boolean(roots_of(roots, root_count), fmt, convert(args, arg_count)) ? 1 : 0;
    });
}

ogo_status ogo_query_long(ogo_context* ctx, const int64_t* roots, size_t root_count, const char* fmt,
                          const ogo_arg* args, size_t arg_count, int64_t* out) {
    OGO_REQUIRE(ctx && fmt && out);
    return guard([&] { *out = ctx->ctx.query_long(roots_of(roots, root_count), fmt, convert(args, arg_count)); });
}

ogo_status ogo_query_string(ogo_context* ctx, const int64_t* roots, size_t root_count, const char* fmt,
                            const ogo_arg* args, size_t arg_count, char** out) {
    OGO_REQUIRE(ctx && fmt && out);
    return guard(
        [&] { *out = dup(ctx->ctx.query_string(roots_of(roots, root_count), fmt, convert(args, arg_count))); });
}

ogo_status ogo_query_object(ogo_context* ctx, const int64_t* roots, size_t root_count, const char* fmt,
                            const ogo_arg* args, size_t arg_count, int64_t* uid) {
    OGO_REQUIRE(ctx && fmt && uid);
    return guard(
        [&] { *uid = ctx->ctx.query_object(roots_of(roots, root_count), fmt, convert(args, arg_count)).uid; });
}

ogo_status ogo_export_csv(ogo_context* ctx, const int64_t* roots, size_t root_count, char** nodes_csv,
                          char** relationships_csv) {
    OGO_REQUIRE(ctx && nodes_csv && relationships_csv);
    return guard([&] {
        ogo::CsvBundle b;
        try {
            b = ogo::export_csv(ctx->ctx.extract_graph(roots_of(roots, root_count)));
        } catch (const ogo::Error& e) {
            throw e.with_stage(ogo::Stage::Extract);
        }
        char* n = dup(b.nodes);
        try {
            *relationships_csv = dup(b.relationships);
        } catch (...) {
            std::free(n);
            throw;
        }
        *nodes_csv = n;
    });
}

void ogo_result_free(ogo_result* rs) { delete rs; }

size_t ogo_result_column_count(const ogo_result* rs) { return rs ? rs->rs.columns().size() : 0; }

const char* ogo_result_column_name(const ogo_result* rs, size_t column) {
    if (!rs || column >= rs->rs.columns().size()) return nullptr;
    return rs->rs.columns()[column].c_str();
}

size_t ogo_result_row_count(const ogo_result* rs) { return rs ? rs->rs.row_count() : 0; }

ogo_status ogo_result_next(ogo_result* rs, int* has_row) {
    OGO_REQUIRE(rs && has_row);
    *has_row = rs->rs.next() ? 1 : 0;
    return OGO_OK;
}

size_t ogo_result_row(const ogo_result* rs) { return rs ? rs->rs.row() : 0; }

ogo_status ogo_result_column_index(const ogo_result* rs, const char* name, size_t* column) {
    OGO_REQUIRE(rs && name && column);
    const auto& cols = rs->rs.columns();
    auto it = std::find(cols.begin(), cols.end(), name);
    if (it == cols.end()) return record(OGO_ERR_UNKNOWN_COLUMN, std::string("no column named ") + name, "result");
    *column = static_cast<size_t>(it - cols.begin());
    return OGO_OK;
}

ogo_status ogo_result_cell_kind(const ogo_result* rs, size_t column, ogo_cell_kind* kind) {
    OGO_REQUIRE(rs && kind);
    return guard([&] {
        const ogo::Value& v = cell(rs, column);
        if (ogo::is_null(v)) *kind = OGO_CELL_NULL;
        else if (std::holds_alternative<ogo::NodeId>(v)) *kind = OGO_CELL_NODE;
        else if (std::holds_alternative<ogo::RelId>(v)) *kind = OGO_CELL_RELATIONSHIP;
        else {
            const auto& p = std::get<ogo::PropertyValue>(v);
            static constexpr ogo_cell_kind kinds[] = {OGO_CELL_INTEGER, OGO_CELL_FLOAT, OGO_CELL_BOOLEAN,
                                                      OGO_CELL_STRING, OGO_CELL_LIST};
            *kind = kinds[p.index()];
        }
    });
}

ogo_status ogo_result_cell_text(const ogo_result* rs, size_t column, char** text) {
    OGO_REQUIRE(rs && text);
    return guard([&] { *text = dup(rs->rs.text(cell(rs, column))); });
}

ogo_status ogo_result_cell_long(const ogo_result* rs, size_t column, int64_t* value) {
    OGO_REQUIRE(rs && value);
    return guard([&] {
        const ogo::Value& v = cell(rs, column);
        auto* p = std::get_if<ogo::PropertyValue>(&v);
        if (!p || !std::holds_alternative<std::int64_t>(*p))
            throw ogo::Error(ogo::ErrorCode::CastError, "cell is not an integer", ogo::Stage::Result);
        *value = std::get<std::int64_t>(*p);
    });
}

ogo_status ogo_result_cell_boolean(const ogo_result* rs, size_t column, int* value) {
    OGO_REQUIRE(rs && value);
    return guard([&] {
        const ogo::Value& v = cell(rs, column);
        auto* p = std::get_if<ogo::PropertyValue>(&v);
        if (!p || !std::holds_alternative<bool>(*p))
            throw ogo::Error(ogo::ErrorCode::CastError, "cell is not a boolean", ogo::Stage::Result);
        *value = std::get<bool>(*p) ? 1 : 0;
    });
}

ogo_status ogo_result_cell_uid(const ogo_result* rs, size_t column, int64_t* uid) {
    OGO_REQUIRE(rs && uid);
    return guard([&] {
        auto u = rs->rs.uid(cell(rs, column));
        if (!u) throw ogo::Error(ogo::ErrorCode::CastError, "cell is not a heap object", ogo::Stage::Result);
        *uid = *u;
    });
}

ogo_status ogo_result_format_table(const ogo_result* rs, char** text) {
    OGO_REQUIRE(rs && text);
    return guard([&] {
        std::string out;
        const auto& t = rs->rs.table();
        for (size_t i = 0; i < t.columns.size(); ++i) out += (i ? "\t" : "") + t.columns[i];
        out += '\n';
        for (const auto& row : t.rows) {
            for (size_t i = 0; i < row.size(); ++i) out += (i ? "\t" : "") + rs->rs.text(row[i]);
            out += '\n';
        }
        *text = dup(out);
    });
}

double ogo_result_stage_ms(const ogo_result* rs, const char* stage) {
    if (!rs || !stage) return 0;
    for (const auto& [s, ms] : rs->rs.timings())
        if (ogo::to_string(s) == stage) return ms;
    return 0;
}

size_t ogo_result_warning_count(const ogo_result* rs) { return rs ? rs->rs.warnings().size() : 0; }

const char* ogo_result_warning(const ogo_result* rs, size_t index) {
    if (!rs || index >= rs->rs.warnings().size()) return nullptr;
    return rs->rs.warnings()[index].c_str();
}

ogo_status ogo_session_open(ogo_context* ctx, const int64_t* roots, size_t root_count, ogo_session** out) {
    OGO_REQUIRE(ctx && out);
    return guard([&] {
        try {
            *out = new ogo_session{ctx->ctx.open_session(roots_of(roots, root_count))};
        } catch (const ogo::Error& e) {
            throw e.with_stage(ogo::Stage::Extract);
        }
    });
}

ogo_status ogo_session_query(ogo_session* s, const char* fmt, const ogo_arg* args, size_t arg_count,
                             ogo_result** out) {
    OGO_REQUIRE(s && fmt && out);
    return guard([&] { *out = new ogo_result{s->session.run(fmt, convert(args, arg_count))}; });
}

void ogo_session_free(ogo_session* s) { delete s; }

}  // extern "C"
