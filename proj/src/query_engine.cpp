#include "ogo/query_engine.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <unordered_map>

#include "ogo/error.hpp"

namespace ogo {

using cypher::Clause;
using cypher::CompareOp;
using cypher::Expr;
using cypher::NodePattern;
using cypher::PathPattern;
using cypher::RelDirection;
using cypher::RelPattern;

std::string render_value(const PropertyGraph& graph, const Value& value) {
    if (is_null(value)) return "null";
    if (auto* p = std::get_if<PropertyValue>(&value)) return format_value(*p);
    if (auto* n = std::get_if<NodeId>(&value)) {
        const Node& node = graph.node(*n);
        auto uid = node.properties.find(kUidKey);
        if (uid != node.properties.end() && std::holds_alternative<std::int64_t>(uid->second))
            return "#" + std::to_string(std::get<std::int64_t>(uid->second)) + ":" + node.label;
        return "#n" + std::to_string(index_of(*n)) + ":" + node.label;
    }
    RelId r = std::get<RelId>(value);
    return "[" + std::to_string(index_of(r)) + ":" + graph.relationship(r).label + "]";
}

namespace {

using Row = std::vector<Value>;

class Scope {
public:
    std::size_t add(const std::string& name) {
        auto [it, fresh] = slots_.try_emplace(name, names_.size());
        if (fresh) names_.push_back(name);
        return it->second;
    }
    std::optional<std::size_t> find(std::string_view name) const {
        auto it = slots_.find(std::string(name));
        if (it == slots_.end()) return std::nullopt;
        return it->second;
    }
    std::size_t at(const std::string& name) const { return slots_.at(name); }
    std::size_t size() const { return names_.size(); }
    const std::string& name(std::size_t slot) const { return names_[slot]; }

    void add_patterns(const std::vector<PathPattern>& ps) {
        for (const auto& p : ps) {
            for (std::size_t i = 0; i < p.nodes.size(); ++i) {
                if (p.nodes[i].variable) add(*p.nodes[i].variable);
                if (i < p.rels.size() && p.rels[i].variable) add(*p.rels[i].variable);
            }
        }
    }

private:
    std::unordered_map<std::string, std::size_t> slots_;
    std::vector<std::string> names_;
};

// Lookup tables kept in step with the (append-only) node list.
class GraphIndex {
public:
    explicit GraphIndex(const PropertyGraph& g) : g_(g) {}

    const std::vector<NodeId>* by_label(const std::string& label) {
        sync();
        auto it = labels_.find(label);
        return it == labels_.end() ? &empty_ : &it->second;
    }
    std::optional<NodeId> by_uid(std::int64_t uid) {
        sync();
        auto it = uids_.find(uid);
        if (it == uids_.end()) return std::nullopt;
        return it->second;
    }

private:
    void sync() {
        auto nodes = g_.nodes();
        for (; indexed_ < nodes.size(); ++indexed_) {
            const Node& n = nodes[indexed_];
            labels_[n.label].push_back(n.id);
            auto uid = n.properties.find(kUidKey);
            if (uid != n.properties.end() && std::holds_alternative<std::int64_t>(uid->second))
                uids_.emplace(std::get<std::int64_t>(uid->second), n.id);
        }
    }

    const PropertyGraph& g_;
    std::size_t indexed_ = 0;
    std::unordered_map<std::string, std::vector<NodeId>> labels_;
    std::unordered_map<std::int64_t, NodeId> uids_;
    const std::vector<NodeId> empty_;
};

Direction direction_of(RelDirection d) {
    switch (d) {
    case RelDirection::Right: return Direction::Out;
    case RelDirection::Left: return Direction::In;
    case RelDirection::Both: return Direction::Both;
    }
    return Direction::Both;
}

bool node_ok(const PropertyGraph& g, const NodePattern& np, NodeId id) {
    const Node& n = g.node(id);
    if (np.label && n.label != *np.label) return false;
    for (const auto& [k, v] : np.properties) {
        auto it = n.properties.find(k);
        if (it == n.properties.end() || !(it->second == v)) return false;
    }
    return true;
}

// ---- matching -------------------------------------------------------------------

template <typename Emit>
class Matcher {
public:
    Matcher(const PropertyGraph& g, GraphIndex& index, const Scope& scope, const std::vector<PathPattern>& pats,
            Row& row, std::vector<char>& assigned, Emit& emit)
        : g_(g), index_(index), scope_(scope), pats_(pats), row_(row), assigned_(assigned), emit_(emit) {}

    void run() { path(0); }

private:
    template <typename F>
    void bind_node(const NodePattern& np, NodeId candidate, F&& cont) {
        if (!np.variable) {
            if (node_ok(g_, np, candidate)) cont();
            return;
        }
        const std::size_t s = scope_.at(*np.variable);
        if (assigned_[s]) {
            auto* bound = std::get_if<NodeId>(&row_[s]);
            if (bound && *bound == candidate && node_ok(g_, np, candidate)) cont();
            return;
        }
        if (!node_ok(g_, np, candidate)) return;
        row_[s] = candidate;
        assigned_[s] = 1;
        cont();
        assigned_[s] = 0;
        row_[s] = std::monostate{};
    }

    template <typename F>
    void bind_rel(const RelPattern& rp, RelId rel, F&& cont) {
        if (!rp.variable) {
            cont();
            return;
        }
        const std::size_t s = scope_.at(*rp.variable);
        if (assigned_[s]) {
            auto* bound = std::get_if<RelId>(&row_[s]);
            if (bound && *bound == rel) cont();
            return;
        }
        row_[s] = rel;
        assigned_[s] = 1;
        cont();
        assigned_[s] = 0;
        row_[s] = std::monostate{};
    }

    bool used(RelId r) const { return std::find(used_.begin(), used_.end(), r) != used_.end(); }

    void path(std::size_t p) {
        if (p == pats_.size()) {
            emit_(row_);
            return;
        }
        const NodePattern& np = pats_[p].nodes[0];
        auto start = [&](NodeId id) { bind_node(np, id, [&] { walk(p, 0, id); }); };

        if (np.variable && assigned_[scope_.at(*np.variable)]) {
            if (auto* id = std::get_if<NodeId>(&row_[scope_.at(*np.variable)])) start(*id);
            return;
        }
        if (auto uid = np.properties.find(kUidKey);
            uid != np.properties.end() && std::holds_alternative<std::int64_t>(uid->second)) {
            if (auto id = index_.by_uid(std::get<std::int64_t>(uid->second))) start(*id);
            return;
        }
        if (np.label) {
            // the graph is not written while a pattern is being matched
            const std::vector<NodeId>& ids = *index_.by_label(*np.label);
            for (NodeId id : ids) start(id);
            return;
        }
        const std::size_t n = g_.node_count();
        for (std::size_t i = 0; i < n; ++i) start(static_cast<NodeId>(i));
    }

    void walk(std::size_t p, std::size_t i, NodeId cur) {
        const PathPattern& pat = pats_[p];
        if (i == pat.rels.size()) {
            path(p + 1);
            return;
        }
        const RelPattern& rp = pat.rels[i];
        const NodePattern& next = pat.nodes[i + 1];
        if (!rp.variable_length) {
            for (const Neighbor& nb : g_.neighbors(cur, direction_of(rp.direction), rp.types)) {
                if (used(nb.rel)) continue;
                used_.push_back(nb.rel);
                bind_rel(rp, nb.rel, [&] { bind_node(next, nb.other, [&] { walk(p, i + 1, nb.other); }); });
                used_.pop_back();
            }
            return;
        }
        var_walk(p, i, cur, 0);
    }

    void var_walk(std::size_t p, std::size_t i, NodeId cur, std::uint32_t depth) {
        const RelPattern& rp = pats_[p].rels[i];
        if (depth >= rp.min_hops) bind_node(pats_[p].nodes[i + 1], cur, [&] { walk(p, i + 1, cur); });
        if (rp.max_hops && depth >= *rp.max_hops) return;
        for (const Neighbor& nb : g_.neighbors(cur, direction_of(rp.direction), rp.types)) {
            if (used(nb.rel)) continue;
            used_.push_back(nb.rel);
            var_walk(p, i, nb.other, depth + 1);
            used_.pop_back();
        }
    }

    const PropertyGraph& g_;
    GraphIndex& index_;
    const Scope& scope_;
    const std::vector<PathPattern>& pats_;
    Row& row_;
    std::vector<char>& assigned_;
    Emit& emit_;
    std::vector<RelId> used_;
};

template <typename Emit>
void match_into(const PropertyGraph& g, GraphIndex& index, const Scope& scope, const std::vector<PathPattern>& pats,
                Row& row, std::vector<char>& assigned, Emit&& emit) {
    Matcher<std::remove_reference_t<Emit>> m(g, index, scope, pats, row, assigned, emit);
    m.run();
}

// ---- expressions ----------------------------------------------------------------

const char* value_kind(const Value& v) {
    if (is_null(v)) return "null";
    if (std::holds_alternative<NodeId>(v)) return "node";
    if (std::holds_alternative<RelId>(v)) return "relationship";
    return kind_name(std::get<PropertyValue>(v));
}

[[noreturn]] void mismatch(const std::string& what, const Value& a, const Value& b) {
    fail(ErrorCode::TypeMismatch,
         "cannot " + what + " " + value_kind(a) + " and " + value_kind(b));
}

std::optional<bool> as_truth(const Value& v, const char* op) {
    if (is_null(v)) return std::nullopt;
    if (auto* p = std::get_if<PropertyValue>(&v))
        if (auto* b = std::get_if<bool>(p)) return *b;
    fail(ErrorCode::TypeMismatch, std::string(op) + " expects booleans, got " + value_kind(v));
}

Value truth(std::optional<bool> b) {
    if (!b) return std::monostate{};
    return PropertyValue{*b};
}

bool same_kind_equal(const Value& a, const Value& b) { return a == b; }

Value compare(CompareOp op, const Value& a, const Value& b) {
    if (is_null(a) || is_null(b)) return std::monostate{};
    if (op == CompareOp::Eq) return PropertyValue{same_kind_equal(a, b)};
    if (op == CompareOp::Ne) return PropertyValue{!same_kind_equal(a, b)};
    auto* pa = std::get_if<PropertyValue>(&a);
    auto* pb = std::get_if<PropertyValue>(&b);
    if (!pa || !pb || pa->index() != pb->index() || std::holds_alternative<PrimitiveList>(*pa))
        mismatch("order", a, b);
    int c = 0;
    std::visit(
        [&](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (!std::is_same_v<T, PrimitiveList>) {
                const T& y = std::get<T>(*pb);
                c = x < y ? -1 : (y < x ? 1 : 0);
            }
        },
        *pa);
    switch (op) {
    case CompareOp::Lt: return PropertyValue{c < 0};
    case CompareOp::Le: return PropertyValue{c <= 0};
    case CompareOp::Gt: return PropertyValue{c > 0};
    case CompareOp::Ge: return PropertyValue{c >= 0};
    default: return std::monostate{};
    }
}

bool props_equal_ignoring_uid(const Properties& a, const Properties& b) {
    auto skip = [](auto it, auto end) {
        while (it != end && it->first == kUidKey) ++it;
        return it;
    };
    auto ia = skip(a.begin(), a.end()), ib = skip(b.begin(), b.end());
    while (ia != a.end() && ib != b.end()) {
        if (ia->first != ib->first || !(ia->second == ib->second)) return false;
        ia = skip(++ia, a.end());
        ib = skip(++ib, b.end());
    }
    return ia == a.end() && ib == b.end();
}

Value structural_equals(const PropertyGraph& g, const Value& a, const Value& b) {
    if (is_null(a) || is_null(b)) return std::monostate{};
    auto* na = std::get_if<NodeId>(&a);
    auto* nb = std::get_if<NodeId>(&b);
    if (na && nb) {
        if (*na == *nb) return PropertyValue{true};
        const Node& x = g.node(*na);
        const Node& y = g.node(*nb);
        return PropertyValue{x.label == y.label && props_equal_ignoring_uid(x.properties, y.properties)};
    }
    return PropertyValue{a == b};
}

class Evaluator {
public:
    Evaluator(const PropertyGraph& g, const Scope& scope) : g_(g), scope_(scope) {}

    Value eval(const Expr& e, const Row& row) const {
        switch (e.kind) {
        case Expr::Kind::Literal: return e.literal;
        case Expr::Kind::Null: return std::monostate{};
        case Expr::Kind::Variable: {
            auto s = scope_.find(e.name);
            if (!s) fail(ErrorCode::UnboundVariable, "variable " + e.name + " is not bound");
            return row[*s];
        }
        case Expr::Kind::CountStar:
        case Expr::Kind::Count:
            fail(ErrorCode::InvalidArgument, "count() is only allowed in RETURN");
        default: break;
        }
        std::vector<Value> args;
        args.reserve(e.children.size());
        for (const Expr& c : e.children) args.push_back(eval(c, row));
        return apply(e, args);
    }

    // RETURN item over one group: aggregates over all rows, everything else
    // on the group's first row.
    Value eval_group(const Expr& e, const std::vector<const Row*>& group, const Row& null_row) const {
        if (e.kind == Expr::Kind::CountStar) return PropertyValue{static_cast<std::int64_t>(group.size())};
        if (e.kind == Expr::Kind::Count) {
            if (e.distinct) {
                std::set<Value> seen;
                for (const Row* r : group) {
                    Value v = eval(e.children[0], *r);
                    if (!is_null(v)) seen.insert(std::move(v));
                }
                return PropertyValue{static_cast<std::int64_t>(seen.size())};
            }
            std::int64_t n = 0;
            for (const Row* r : group)
                if (!is_null(eval(e.children[0], *r))) ++n;
            return PropertyValue{n};
        }
        if (!e.contains_aggregate()) return eval(e, group.empty() ? null_row : *group.front());
        std::vector<Value> args;
        for (const Expr& c : e.children) args.push_back(eval_group(c, group, null_row));
        return apply(e, args);
    }

private:
    Value apply(const Expr& e, const std::vector<Value>& a) const {
        switch (e.kind) {
        case Expr::Kind::Property: {
            const Value& base = a[0];
            if (is_null(base)) return std::monostate{};
            const Properties* props = nullptr;
            if (auto* n = std::get_if<NodeId>(&base)) props = &g_.node(*n).properties;
            else if (auto* r = std::get_if<RelId>(&base)) props = &g_.relationship(*r).properties;
            else
                fail(ErrorCode::TypeMismatch, std::string("property access on ") + value_kind(base));
            auto it = props->find(e.name);
            if (it == props->end()) return std::monostate{};
            return it->second;
        }
        case Expr::Kind::Equals: return structural_equals(g_, a[0], a[1]);
        case Expr::Kind::Compare: return compare(e.op, a[0], a[1]);
        case Expr::Kind::And: {
            auto x = as_truth(a[0], "AND"), y = as_truth(a[1], "AND");
            if ((x && !*x) || (y && !*y)) return PropertyValue{false};
            if (!x || !y) return std::monostate{};
            return PropertyValue{true};
        }
        case Expr::Kind::Or: {
            auto x = as_truth(a[0], "OR"), y = as_truth(a[1], "OR");
            if ((x && *x) || (y && *y)) return PropertyValue{true};
            if (!x || !y) return std::monostate{};
            return PropertyValue{false};
        }
        case Expr::Kind::Not: {
            auto x = as_truth(a[0], "NOT");
            return truth(x ? std::optional<bool>(!*x) : std::nullopt);
        }
        default: break;
        }
        fail(ErrorCode::InvalidArgument, "unexpected expression");
    }

    const PropertyGraph& g_;
    const Scope& scope_;
};

bool keeps(const Evaluator& ev, const Expr& cond, const Row& row) {
    Value v = ev.eval(cond, row);
    if (is_null(v)) return false;
    auto* p = std::get_if<PropertyValue>(&v);
    if (!p || !std::holds_alternative<bool>(*p))
        fail(ErrorCode::TypeMismatch, std::string("WHERE expects a boolean, got ") + value_kind(v));
    return std::get<bool>(*p);
}

// ---- executor -------------------------------------------------------------------

class Executor {
public:
    Executor(const cypher::Query& q, PropertyGraph& g) : q_(q), g_(g), index_(g) {
        for (const Clause& c : q.clauses) {
            if (auto* m = std::get_if<cypher::MatchClause>(&c)) scope_.add_patterns(m->patterns);
            if (auto* cr = std::get_if<cypher::CreateClause>(&c)) scope_.add_patterns(cr->patterns);
            if (auto* me = std::get_if<cypher::MergeClause>(&c)) scope_.add_patterns({me->pattern});
        }
    }

    ResultTable run() {
        const Evaluator ev(g_, scope_);
        std::vector<Row> rows(1, Row(scope_.size()));
        std::vector<char> bound(scope_.size(), 0);
        ResultTable table;

        for (std::size_t ci = 0; ci < q_.clauses.size(); ++ci) {
            const Clause& c = q_.clauses[ci];
            const cypher::WhereClause* where = nullptr;
            if (ci + 1 < q_.clauses.size()) where = std::get_if<cypher::WhereClause>(&q_.clauses[ci + 1]);

            if (auto* m = std::get_if<cypher::MatchClause>(&c)) {
                rows = match(m->patterns, rows, bound, m->optional, m->optional ? where : nullptr, ev);
                if (m->optional && where) ++ci;
                mark(m->patterns, bound);
            } else if (auto* w = std::get_if<cypher::WhereClause>(&c)) {
                std::vector<Row> kept;
                for (auto& r : rows)
                    if (keeps(ev, w->condition, r)) kept.push_back(std::move(r));
                rows = std::move(kept);
            } else if (auto* cr = std::get_if<cypher::CreateClause>(&c)) {
                for (Row& r : rows) {
                    std::vector<char> assigned = bound;
                    for (const auto& p : cr->patterns) create(p, r, assigned);
                }
                mark(cr->patterns, bound);
            } else if (auto* me = std::get_if<cypher::MergeClause>(&c)) {
                rows = merge(me->pattern, rows, bound);
                mark({me->pattern}, bound);
            } else if (auto* ret = std::get_if<cypher::ReturnClause>(&c)) {
                project(*ret, rows, ev, table);
            }
        }
        lint(table);
        return table;
    }

private:
    void mark(const std::vector<PathPattern>& ps, std::vector<char>& bound) const {
        Scope tmp;
        tmp.add_patterns(ps);
        for (std::size_t i = 0; i < tmp.size(); ++i) bound[scope_.at(tmp.name(i))] = 1;
    }

    std::vector<std::size_t> new_slots(const std::vector<PathPattern>& ps, const std::vector<char>& bound) const {
        Scope tmp;
        tmp.add_patterns(ps);
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < tmp.size(); ++i) {
            std::size_t s = scope_.at(tmp.name(i));
            if (!bound[s]) out.push_back(s);
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    static void order_rows(std::vector<Row>& rows, std::size_t from, const std::vector<std::size_t>& slots) {
        std::stable_sort(rows.begin() + static_cast<std::ptrdiff_t>(from), rows.end(),
                         [&](const Row& a, const Row& b) {
                             for (std::size_t s : slots) {
                                 if (a[s] < b[s]) return true;
                                 if (b[s] < a[s]) return false;
                             }
                             return false;
                         });
    }

    std::vector<Row> match(const std::vector<PathPattern>& ps, std::vector<Row>& input,
                           const std::vector<char>& bound, bool optional, const cypher::WhereClause* where,
                           const Evaluator& ev) {
        const auto fresh = new_slots(ps, bound);
        std::vector<Row> out;
        for (Row& row : input) {
            const std::size_t before = out.size();
            std::vector<char> assigned = bound;
            match_into(g_, index_, scope_, ps, row, assigned, [&](const Row& r) {
                if (!where || keeps(ev, where->condition, r)) out.push_back(r);
            });
            order_rows(out, before, fresh);
            if (optional && out.size() == before) out.push_back(row);  // fresh slots are still null
        }
        return out;
    }

    NodeId node_value(const Row& row, std::size_t slot, const std::string& name) const {
        if (auto* id = std::get_if<NodeId>(&row[slot])) return *id;
        fail(ErrorCode::InvalidArgument, "cannot write a pattern through " + name + ", which is null");
    }

    void create(const PathPattern& p, Row& row, std::vector<char>& assigned) {
        std::vector<NodeId> ids(p.nodes.size());
        for (std::size_t i = 0; i < p.nodes.size(); ++i) {
            const NodePattern& np = p.nodes[i];
            if (np.variable && assigned[scope_.at(*np.variable)]) {
                ids[i] = node_value(row, scope_.at(*np.variable), *np.variable);
                continue;
            }
            if (!np.label) fail(ErrorCode::Validation, "new nodes need a label");
            ids[i] = g_.add_node(*np.label, np.properties);
            if (np.variable) {
                row[scope_.at(*np.variable)] = ids[i];
                assigned[scope_.at(*np.variable)] = 1;
            }
        }
        for (std::size_t i = 0; i < p.rels.size(); ++i) {
            const RelPattern& rp = p.rels[i];
            if (rp.types.size() != 1 || rp.direction == RelDirection::Both || rp.variable_length)
                fail(ErrorCode::Validation, "written relationships need one type and a direction");
            NodeId from = ids[i], to = ids[i + 1];
            if (rp.direction == RelDirection::Left) std::swap(from, to);
            RelId r = g_.add_relationship(rp.types[0], from, to);
            if (rp.variable) {
                row[scope_.at(*rp.variable)] = r;
                assigned[scope_.at(*rp.variable)] = 1;
            }
        }
    }

    std::vector<Row> merge(const PathPattern& p, std::vector<Row>& input, const std::vector<char>& bound) {
        const std::vector<PathPattern> ps{p};
        const auto fresh = new_slots(ps, bound);
        std::vector<Row> out;
        for (Row& row : input) {
            const std::size_t before = out.size();
            std::vector<char> assigned = bound;
            match_into(g_, index_, scope_, ps, row, assigned, [&](const Row& r) { out.push_back(r); });
            order_rows(out, before, fresh);
            if (out.size() == before) {
                std::vector<char> created = bound;
                create(p, row, created);
                out.push_back(row);
            }
        }
        return out;
    }

    void project(const cypher::ReturnClause& ret, const std::vector<Row>& rows, const Evaluator& ev,
                 ResultTable& table) {
        for (const auto& item : ret.items) table.columns.push_back(item.column());
        const bool aggregate = std::any_of(ret.items.begin(), ret.items.end(),
                                           [](const cypher::ReturnItem& i) { return i.expr.contains_aggregate(); });
        std::vector<Row> out;
        if (!aggregate) {
            out.reserve(rows.size());
            for (const Row& r : rows) {
                Row o;
                for (const auto& item : ret.items) o.push_back(ev.eval(item.expr, r));
                out.push_back(std::move(o));
            }
        } else {
            std::vector<std::size_t> keys;
            for (std::size_t i = 0; i < ret.items.size(); ++i)
                if (!ret.items[i].expr.contains_aggregate()) keys.push_back(i);
            std::map<Row, std::size_t> group_of;
            std::vector<Row> key_values;
            std::vector<std::vector<const Row*>> groups;
            for (const Row& r : rows) {
                Row k;
                for (std::size_t i : keys) k.push_back(ev.eval(ret.items[i].expr, r));
                auto [it, fresh] = group_of.try_emplace(k, groups.size());
                if (fresh) {
                    key_values.push_back(std::move(k));
                    groups.emplace_back();
                }
                groups[it->second].push_back(&r);
            }
            if (groups.empty() && keys.empty()) {
                key_values.emplace_back();
                groups.emplace_back();
            }
            const Row null_row(scope_.size());
            for (std::size_t g = 0; g < groups.size(); ++g) {
                Row o;
                std::size_t k = 0;
                for (std::size_t i = 0; i < ret.items.size(); ++i) {
                    if (!ret.items[i].expr.contains_aggregate())
                        o.push_back(key_values[g][k++]);
                    else
                        o.push_back(ev.eval_group(ret.items[i].expr, groups[g], null_row));
                }
                out.push_back(std::move(o));
            }
        }
        if (ret.distinct) {
            std::set<Row> seen;
            std::vector<Row> unique;
            for (auto& r : out)
                if (seen.insert(r).second) unique.push_back(std::move(r));
            out = std::move(unique);
        }
        table.rows = std::move(out);
    }

    // Nodes written by the query stay in the graph even when nothing refers
    // to them; flag queries that create nodes without returning any.
    void lint(ResultTable& table) const {
        std::set<std::string> created;
        bool writes = false;
        std::set<std::string> seen;
        auto note = [&](const std::vector<PathPattern>& ps, bool write) {
            for (const auto& p : ps)
                for (const auto& n : p.nodes) {
                    if (write && (!n.variable || !seen.contains(*n.variable))) {
                        writes = true;
                        if (n.variable) created.insert(*n.variable);
                    }
                    if (n.variable) seen.insert(*n.variable);
                }
        };
        const cypher::ReturnClause* ret = nullptr;
        for (const Clause& c : q_.clauses) {
            if (auto* m = std::get_if<cypher::MatchClause>(&c)) note(m->patterns, false);
            if (auto* cr = std::get_if<cypher::CreateClause>(&c)) note(cr->patterns, true);
            if (auto* me = std::get_if<cypher::MergeClause>(&c)) note({me->pattern}, true);
            if (auto* r = std::get_if<cypher::ReturnClause>(&c)) ret = r;
        }
        if (!writes) return;
        std::function<bool(const Expr&)> mentions = [&](const Expr& e) {
            if (e.kind == Expr::Kind::Variable && created.contains(e.name)) return true;
            return std::any_of(e.children.begin(), e.children.end(), mentions);
        };
        if (ret)
            for (const auto& item : ret->items)
                if (mentions(item.expr)) return;
        table.warnings.push_back(
            "query creates nodes but returns none of them; they stay in the graph without any reference");
    }

    const cypher::Query& q_;
    PropertyGraph& g_;
    GraphIndex index_;
    Scope scope_;
};

}  // namespace

namespace engine {

std::vector<Binding> match_pattern(const PropertyGraph& graph, const std::vector<PathPattern>& patterns,
                                   const Binding& seed, bool optional) {
    Scope scope;
    for (const auto& [name, v] : seed) scope.add(name);
    scope.add_patterns(patterns);
    Row row(scope.size());
    std::vector<char> assigned(scope.size(), 0);
    for (const auto& [name, v] : seed) {
        row[scope.at(name)] = v;
        assigned[scope.at(name)] = 1;
    }
    GraphIndex index(graph);
    std::vector<Binding> out;
    auto to_binding = [&](const Row& r) {
        Binding b;
        for (std::size_t s = 0; s < scope.size(); ++s) b.emplace(scope.name(s), r[s]);
        return b;
    };
    match_into(graph, index, scope, patterns, row, assigned, [&](const Row& r) { out.push_back(to_binding(r)); });
    if (optional && out.empty()) out.push_back(to_binding(row));
    return out;
}

Value eval_expression(const Binding& binding, const Expr& expr, const PropertyGraph& graph) {
    Scope scope;
    Row row;
    for (const auto& [name, v] : binding) {
        scope.add(name);
        row.push_back(v);
    }
    return Evaluator(graph, scope).eval(expr, row);
}

ResultTable execute(const cypher::Query& query, PropertyGraph& graph) {
    return Executor(query, graph).run();
}

ResultTable execute_batch(const cypher::BatchPlan& plan, std::string_view template_text, PropertyGraph& graph) {
    ResultTable out;
    {
        cypher::Query q = cypher::parse(template_text);
        cypher::check(q);
        for (const auto& c : q.clauses)
            if (auto* r = std::get_if<cypher::ReturnClause>(&c))
                for (const auto& item : r->items) out.columns.push_back(item.column());
    }
    for (const std::string& text : plan.queries) {
        cypher::Query q = cypher::parse(text);
        cypher::check(q);
        ResultTable part = execute(q, graph);
        for (auto& r : part.rows) out.rows.push_back(std::move(r));
        for (auto& w : part.warnings)
            if (std::find(out.warnings.begin(), out.warnings.end(), w) == out.warnings.end())
                out.warnings.push_back(std::move(w));
    }
    return out;
}

}  // namespace engine

}  // namespace ogo
