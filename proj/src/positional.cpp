#include <cctype>

#include "ogo/cypher.hpp"
#include "ogo/error.hpp"

namespace ogo::cypher {

namespace {

const char* kind_label(const PositionalArg& a) {
    if (std::holds_alternative<Uid>(a)) return "a uid";
    if (std::holds_alternative<ClassName>(a)) return "a class name";
    return "a uid collection";
}

struct Marker {
    enum class Kind { Uid, Class, Batch } kind;
    std::size_t index;  // 1-based
};

// Copies text[i..] verbatim while it is inside a quoted region; returns the
// position after the region.
std::size_t skip_quoted(std::string_view text, std::size_t i, std::string& out) {
    const char quote = text[i];
    out += text[i++];
    while (i < text.size()) {
        char c = text[i];
        out += c;
        ++i;
        if (quote != '`' && c == '\\' && i < text.size()) {
            out += text[i++];
            continue;
        }
        if (c == quote) {
            // `` inside backticks is an escaped backtick
            if (quote == '`' && i < text.size() && text[i] == '`') {
                out += text[i++];
                continue;
            }
            break;
        }
    }
    return i;
}

template <typename Emit>
void scan(std::string_view text, std::string& out, Emit&& emit) {
    std::size_t i = 0;
    auto digits_at = [&](std::size_t p) {
        std::size_t e = p;
        while (e < text.size() && std::isdigit(static_cast<unsigned char>(text[e]))) ++e;
        return e;
    };
    while (i < text.size()) {
        const char c = text[i];
        if (c == '\'' || c == '"' || c == '`') {
            i = skip_quoted(text, i, out);
            continue;
        }
        if (c == '/' && i + 1 < text.size() && text[i + 1] == '/') {
            std::size_t e = text.find('\n', i);
            if (e == std::string_view::npos) e = text.size();
            out.append(text.substr(i, e - i));
            i = e;
            continue;
        }
        if (c == '/' && i + 1 < text.size() && text[i + 1] == '*') {
            std::size_t e = text.find("*/", i + 2);
            e = e == std::string_view::npos ? text.size() : e + 2;
            out.append(text.substr(i, e - i));
            i = e;
            continue;
        }
        std::size_t start = 0;
        Marker::Kind kind{};
        if ((c == '$' || c == '@') && digits_at(i + 1) > i + 1) {
            start = i + 1;
            kind = c == '$' ? Marker::Kind::Uid : Marker::Kind::Class;
        } else if (c == '[' && i + 2 < text.size() && text[i + 1] == ']' && digits_at(i + 2) > i + 2) {
            start = i + 2;
            kind = Marker::Kind::Batch;
        } else {
            out += c;
            ++i;
            continue;
        }
        std::size_t end = digits_at(start);
        std::size_t index = 0;
        for (std::size_t p = start; p < end; ++p) {
            index = index * 10 + static_cast<std::size_t>(text[p] - '0');
            if (index > 1'000'000) fail(ErrorCode::PositionalIndex, "positional index too large");
        }
        emit(Marker{kind, index}, out);
        i = end;
    }
}

std::string uid_text(std::int64_t uid) { return "`$uid`: " + std::to_string(uid); }

std::string backticked(std::string_view name) {
    std::string out = "`";
    for (char c : name) {
        if (c == '`') out += '`';
        out += c;
    }
    return out + "`";
}

}  // namespace

Expansion expand_positional(std::string_view fmt, const std::vector<PositionalArg>& args) {
    std::optional<std::size_t> batch_arg;

    auto resolve = [&](const Marker& m) -> const PositionalArg& {
        const char* sigil = m.kind == Marker::Kind::Uid ? "$" : m.kind == Marker::Kind::Class ? "@" : "[]";
        if (m.index == 0 || m.index > args.size())
            fail(ErrorCode::PositionalIndex, std::string("positional ") + sigil + std::to_string(m.index) +
                                                 " out of range (" + std::to_string(args.size()) +
                                                 " argument(s))");
        const PositionalArg& a = args[m.index - 1];
        bool ok = (m.kind == Marker::Kind::Uid && std::holds_alternative<Uid>(a)) ||
                  (m.kind == Marker::Kind::Class && std::holds_alternative<ClassName>(a)) ||
                  (m.kind == Marker::Kind::Batch && std::holds_alternative<UidList>(a));
        if (!ok)
            fail(ErrorCode::PositionalKind, std::string("positional ") + sigil + std::to_string(m.index) +
                                                " was given " + kind_label(a));
        return a;
    };

    auto expand_with = [&](std::optional<std::int64_t> element) {
        std::string out;
        out.reserve(fmt.size() + 16);
        scan(fmt, out, [&](const Marker& m, std::string& o) {
            const PositionalArg& a = resolve(m);
            switch (m.kind) {
            case Marker::Kind::Uid: o += uid_text(std::get<Uid>(a).value); break;
            case Marker::Kind::Class: o += backticked(std::get<ClassName>(a).value); break;
            case Marker::Kind::Batch:
                if (batch_arg && *batch_arg != m.index)
                    fail(ErrorCode::UnsupportedFeature, "only one collection argument per query is supported");
                batch_arg = m.index;
                o += uid_text(element.value_or(0));
                break;
            }
        });
        return out;
    };

    Expansion result;
    result.text = expand_with(std::nullopt);
    if (batch_arg) {
        BatchPlan plan;
        plan.argument = *batch_arg;
        plan.uids = std::get<UidList>(args[*batch_arg - 1]).values;
        for (std::int64_t uid : plan.uids) plan.queries.push_back(expand_with(uid));
        result.batch = std::move(plan);
    }
    return result;
}

}  // namespace ogo::cypher
