// ogo: command-line driver over the C API.
//
//   ogo run PROGRAM              snapshot JSON of the heap at POINT
//   ogo query SNAP -q TEXT ...   tab-separated result table
//   ogo export SNAP -o DIR       nodes.csv + relationships.csv
//   ogo repl SNAP                one query per line, :quit to leave
//
// Exit status: 0 ok, 1 input/IO problems, 2 query pipeline errors.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ogo/ogo.h"

namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0;
constexpr int kInputError = 1;
constexpr int kQueryError = 2;

struct Owned {
    char* p = nullptr;
    ~Owned() { ogo_string_free(p); }
};

struct ContextDeleter {
    void operator()(ogo_context* c) const { ogo_context_free(c); }
};
struct ResultDeleter {
    void operator()(ogo_result* r) const { ogo_result_free(r); }
};
struct SessionDeleter {
    void operator()(ogo_session* s) const { ogo_session_free(s); }
};
using ContextPtr = std::unique_ptr<ogo_context, ContextDeleter>;
using ResultPtr = std::unique_ptr<ogo_result, ResultDeleter>;
using SessionPtr = std::unique_ptr<ogo_session, SessionDeleter>;

void report(ogo_status st) {
    std::string stage = ogo_last_error_stage();
    std::cerr << "error";
    if (!stage.empty()) std::cerr << " [" << stage << "]";
    std::cerr << " " << ogo_status_name(st) << ": " << ogo_last_error_message() << "\n";
}

bool read_file(const std::string& path, std::string& out) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return false;
    std::ostringstream buf;
    buf << in.rdbuf();
    out = buf.str();
    return !in.bad();
}

// Extraction flags shared by query, export and repl.
struct Extraction {
    std::vector<int64_t> roots;
    std::vector<std::string> whitelist;
    std::vector<std::string> blacklist;
    bool gc = false;
    bool via_csv = false;

    void add_to(CLI::App* cmd, bool with_via_csv) {
        cmd->add_option("--root", roots, "Restrict to objects reachable from this uid (repeatable)");
        cmd->add_option("--whitelist", whitelist, "Classes always included")->delimiter(',');
        cmd->add_option("--blacklist", blacklist, "Classes never emitted")->delimiter(',');
        cmd->add_flag("--gc", gc, "Drop objects unreachable from the heap roots first");
        if (with_via_csv) cmd->add_flag("--via-csv", via_csv, "Round-trip the graph through CSV before executing");
    }

    const int64_t* root_ptr() const { return roots.empty() ? nullptr : roots.data(); }

    ogo_status apply(ogo_context* ctx) const {
        std::vector<const char*> w, b;
        for (const auto& s : whitelist) w.push_back(s.c_str());
        for (const auto& s : blacklist) b.push_back(s.c_str());
        ogo_status st = ogo_context_set_whitelist(ctx, w.data(), w.size());
        if (st == OGO_OK) st = ogo_context_set_blacklist(ctx, b.data(), b.size());
        if (st == OGO_OK) st = ogo_context_set_force_collect(ctx, gc);
        if (st == OGO_OK) st = ogo_context_set_via_csv(ctx, via_csv);
        return st;
    }
};

// Integers feed `$k`, `[1,2,3]` feeds `[]k`, anything else is a class name.
struct ArgStore {
    std::vector<std::vector<int64_t>> lists;
    std::vector<ogo_arg> args;
};

std::optional<int64_t> parse_int(const std::string& s) {
    if (s.empty()) return std::nullopt;
    size_t pos = 0;
    try {
        long long v = std::stoll(s, &pos);
        if (pos != s.size()) return std::nullopt;
        return v;
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

bool parse_args(const std::vector<std::string>& raw, ArgStore& store) {
    store.lists.reserve(raw.size());
    for (const auto& a : raw) {
        ogo_arg arg{};
        if (auto v = parse_int(a)) {
            arg.kind = OGO_ARG_UID;
            arg.uid = *v;
        } else if (a.size() >= 2 && a.front() == '[' && a.back() == ']') {
            std::vector<int64_t> ids;
            std::stringstream ss(a.substr(1, a.size() - 2));
            std::string item;
            while (std::getline(ss, item, ',')) {
                auto v = parse_int(item);
                if (!v) {
                    std::cerr << "error: bad uid list element '" << item << "' in " << a << "\n";
                    return false;
                }
                ids.push_back(*v);
            }
            store.lists.push_back(std::move(ids));
            arg.kind = OGO_ARG_UID_LIST;
            arg.uids = store.lists.back().data();
            arg.uid_count = store.lists.back().size();
        } else {
            arg.kind = OGO_ARG_CLASS;
            arg.class_name = a.c_str();
        }
        store.args.push_back(arg);
    }
    return true;
}

int open_context(const std::string& path, ContextPtr& out) {
    ogo_context* ctx = nullptr;
    ogo_status st = ogo_context_open(path.c_str(), &ctx);
    if (st != OGO_OK) {
        report(st);
        return kInputError;
    }
    out.reset(ctx);
    return kOk;
}

bool print_table(ogo_result* rs, std::ostream& os) {
    Owned text;
    ogo_status st = ogo_result_format_table(rs, &text.p);
    if (st != OGO_OK) {
        report(st);
        return false;
    }
    os << text.p;
    for (size_t i = 0; i < ogo_result_warning_count(rs); ++i)
        std::cerr << "warning: " << ogo_result_warning(rs, i) << "\n";
    return true;
}

void print_timings(ogo_result* rs) {
    static const char* stages[] = {"expand", "extract", "export", "import", "parse", "validate", "execute"};
    for (const char* s : stages) std::fprintf(stderr, "%s_ms\t%.3f\n", s, ogo_result_stage_ms(rs, s));
}

int cmd_run(const std::string& path) {
    std::string text;
    if (!read_file(path, text)) {
        std::cerr << "error: cannot read " << path << "\n";
        return kInputError;
    }
    Owned json;
    ogo_status st = ogo_run_program(text.c_str(), -1, &json.p);
    if (st != OGO_OK) {
        report(st);
        return kInputError;
    }
    std::cout << json.p << "\n";
    return kOk;
}

int cmd_query(const std::string& snap, const std::string& query, const Extraction& ex,
              const std::vector<std::string>& raw_args, bool time) {
    ArgStore store;
    if (!parse_args(raw_args, store)) return kQueryError;
    ContextPtr ctx;
    if (int rc = open_context(snap, ctx)) return rc;
    if (ogo_status st = ex.apply(ctx.get()); st != OGO_OK) {
        report(st);
        return kQueryError;
    }
    ogo_result* raw = nullptr;
    ogo_status st = ogo_query(ctx.get(), ex.root_ptr(), ex.roots.size(), query.c_str(), store.args.data(),
                              store.args.size(), &raw);
    if (st != OGO_OK) {
        report(st);
        return kQueryError;
    }
    ResultPtr rs(raw);
    if (!print_table(rs.get(), std::cout)) return kQueryError;
    if (time) print_timings(rs.get());
    return kOk;
}

// Writes via a temp file in the same directory so readers never see a
// partial file.
bool write_atomic(const fs::path& target, const char* data) {
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) return false;
        out << data;
        out.flush();
        if (!out) {
            std::error_code ec;
            fs::remove(tmp, ec);
            return false;
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        return false;
    }
    return true;
}

int cmd_export(const std::string& snap, const std::string& dir, const Extraction& ex) {
    ContextPtr ctx;
    if (int rc = open_context(snap, ctx)) return rc;
    if (ogo_status st = ex.apply(ctx.get()); st != OGO_OK) {
        report(st);
        return kQueryError;
    }
    Owned nodes, rels;
    ogo_status st = ogo_export_csv(ctx.get(), ex.root_ptr(), ex.roots.size(), &nodes.p, &rels.p);
    if (st != OGO_OK) {
        report(st);
        return kQueryError;
    }
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) {
        std::cerr << "error io-error: " << dir << " is not a directory\n";
        return kInputError;
    }
    for (auto [name, data] : {std::pair{"nodes.csv", nodes.p}, std::pair{"relationships.csv", rels.p}}) {
        if (!write_atomic(fs::path(dir) / name, data)) {
            std::cerr << "error io-error: cannot write " << (fs::path(dir) / name).string() << "\n";
            return kInputError;
        }
    }
    return kOk;
}

int cmd_repl(const std::string& snap, const Extraction& ex) {
    ContextPtr ctx;
    if (int rc = open_context(snap, ctx)) return rc;
    if (ogo_status st = ex.apply(ctx.get()); st != OGO_OK) {
        report(st);
        return kQueryError;
    }
    ogo_session* raw = nullptr;
    if (ogo_status st = ogo_session_open(ctx.get(), ex.root_ptr(), ex.roots.size(), &raw); st != OGO_OK) {
        report(st);
        return kQueryError;
    }
    SessionPtr session(raw);
    std::string line;
    while (true) {
        std::cerr << "ogo> " << std::flush;
        if (!std::getline(std::cin, line)) break;
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        line.erase(0, first);
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) line.pop_back();
        if (line == ":quit" || line == ":q") break;
        ogo_result* rs = nullptr;
        ogo_status st = ogo_session_query(session.get(), line.c_str(), nullptr, 0, &rs);
        if (st != OGO_OK) {
            report(st);
            continue;
        }
        ResultPtr owned(rs);
        print_table(rs, std::cout);
        std::cout << std::flush;
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Query heap snapshots as property graphs"};
    app.require_subcommand(1);

    std::string program;
    auto* run = app.add_subcommand("run", "Run a program to POINT and print the snapshot JSON");
    run->add_option("file", program, "Program file")->required();

    std::string snap, query, out_dir;
    std::vector<std::string> raw_args;
    bool time = false;
    Extraction ex;

    auto* q = app.add_subcommand("query", "Run a query against a snapshot");
    q->add_option("snapshot", snap, "Snapshot JSON")->required();
    q->add_option("-q,--query", query, "Query text with $k / @k / []k markers")->required();
    // Positional ARGS are taken from the leftovers: a regular positional
    // option would have CLI11 split "[1,2]" into two values.
    q->allow_extras();
    q->footer("ARGS: uid for $k, [uid,...] for []k, anything else is a class name for @k");
    q->add_flag("--time", time, "Print per-stage milliseconds on stderr");
    ex.add_to(q, true);

    auto* exp = app.add_subcommand("export", "Write the extracted graph as CSV");
    exp->add_option("snapshot", snap, "Snapshot JSON")->required();
    exp->add_option("-o,--output", out_dir, "Output directory")->required();
    ex.add_to(exp, false);

    auto* repl = app.add_subcommand("repl", "Interactive queries over one graph");
    repl->add_option("snapshot", snap, "Snapshot JSON")->required();
    ex.add_to(repl, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : kInputError;
    }

    if (*run) return cmd_run(program);
    if (*q) {
        for (const auto& a : q->remaining()) {
            if (a.size() > 1 && a[0] == '-' && !parse_int(a)) {
                std::cerr << "unknown option: " << a << "\n";
                return kInputError;
            }
            raw_args.push_back(a);
        }
        return cmd_query(snap, query, ex, raw_args, time);
    }
    if (*exp) return cmd_export(snap, out_dir, ex);
    if (*repl) return cmd_repl(snap, ex);
    return kInputError;
}
