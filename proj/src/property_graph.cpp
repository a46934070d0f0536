#include "ogo/property_graph.hpp"

#include <algorithm>
#include <charconv>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>

#include "ogo/error.hpp"

namespace ogo {

bool is_reserved_label(std::string_view label) {
    return label == kLocalLabel || label == kClassLabel;
}

namespace {

void check_label(std::string_view label, const char* what) {
    if (label.empty()) fail(ErrorCode::InvalidLabel, std::string(what) + " label must be non-empty");
}

std::string format_double(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    std::string out(buf, end);
    if (out.find_first_of(".eEn") == std::string::npos) out += ".0";
    return out;
}

std::string quote(std::string_view s) {
    std::string out = "'";
    for (char c : s) {
        if (c == '\'' || c == '\\') out += '\\';
        out += c;
    }
    out += '\'';
    return out;
}

}  // namespace

const char* kind_name(const PropertyValue& value) {
    static constexpr const char* kScalar[] = {"integer", "float", "boolean", "string"};
    static constexpr const char* kList[] = {"integer-list", "float-list", "boolean-list",
                                            "string-list"};
    if (auto* list = std::get_if<PrimitiveList>(&value)) return kList[list->index()];
    return kScalar[value.index()];
}

std::string format_value(const PropertyValue& value) {
    struct Visitor {
        std::string operator()(std::int64_t v) const { return std::to_string(v); }
        std::string operator()(double v) const { return format_double(v); }
        std::string operator()(bool v) const { return v ? "true" : "false"; }
        std::string operator()(const std::string& v) const { return quote(v); }
        std::string operator()(const PrimitiveList& list) const {
            return std::visit(
                [this](const auto& items) {
                    std::string out = "[";
                    for (std::size_t i = 0; i < items.size(); ++i) {
                        if (i) out += ", ";
                        using T = std::decay_t<decltype(items[i])>;
                        if constexpr (std::is_same_v<T, std::vector<bool>::const_reference> ||
                                      std::is_same_v<T, bool>) {
                            out += (*this)(static_cast<bool>(items[i]));
                        } else {
                            out += (*this)(items[i]);
                        }
                    }
                    return out + "]";
                },
                list);
        }
    };
    return std::visit(Visitor{}, value);
}

std::string format_properties(const Properties& properties) {
    std::string out = "{";
    bool first = true;
    for (const auto& [key, value] : properties) {
        if (!first) out += ", ";
        first = false;
        out += key;
        out += ": ";
        out += format_value(value);
    }
    return out + "}";
}

NodeId PropertyGraph::add_node(std::string label, Properties properties) {
    check_label(label, "node");
    if (label == kLocalLabel && !properties.empty())
        fail(ErrorCode::ReservedLabel, "binder node `Local` must have an empty property map");
    if (label == kClassLabel) {
        auto it = properties.find(kClassNameKey);
        if (it == properties.end() || !std::holds_alternative<std::string>(it->second))
            fail(ErrorCode::ReservedLabel, "class-metadata node `Class` requires a string `name`");
    }
    if (auto it = properties.find(kUidKey);
        it != properties.end() && !std::holds_alternative<std::int64_t>(it->second))
        fail(ErrorCode::InvalidArgument, "`$uid` must be an integer");

    const auto id = static_cast<NodeId>(nodes_.size());
    nodes_.push_back(Node{id, std::move(label), std::move(properties)});
    out_.emplace_back();
    in_.emplace_back();
    return id;
}

RelId PropertyGraph::add_relationship(std::string label, NodeId start, NodeId end,
                                      Properties properties) {
    check_label(label, "relationship");
    if (!has_node(start) || !has_node(end))
        fail(ErrorCode::EndpointNotFound,
             "relationship endpoint not found: " +
                 std::to_string(index_of(has_node(start) ? end : start)));
    const auto id = static_cast<RelId>(rels_.size());
    rels_.emplace_back(Relationship{id, std::move(label), start, end, std::move(properties)});
    out_[index_of(start)].push_back(id);
    in_[index_of(end)].push_back(id);
    ++live_relationships_;
    return id;
}

RelId PropertyGraph::set_field_edge(std::string_view field, NodeId start, NodeId end) {
    if (!has_node(start) || !has_node(end))
        fail(ErrorCode::EndpointNotFound, "field edge endpoint not found");
    std::vector<RelId> stale;
    for (RelId r : out_[index_of(start)])
        if (rels_[index_of(r)]->label == field) stale.push_back(r);
    for (RelId r : stale) remove_relationship(r);
    return add_relationship(std::string(field), start, end);
}

void PropertyGraph::remove_relationship(RelId id) {
    if (!has_relationship(id))
        fail(ErrorCode::InvalidArgument, "unknown relationship " + std::to_string(index_of(id)));
    const Relationship& rel = *rels_[index_of(id)];
    std::erase(out_[index_of(rel.start)], id);
    std::erase(in_[index_of(rel.end)], id);
    rels_[index_of(id)].reset();
    --live_relationships_;
}

void PropertyGraph::set_property(NodeId id, std::string key, PropertyValue value) {
    checked_node(id);
    Node& n = nodes_[index_of(id)];
    if (n.label == kLocalLabel)
        fail(ErrorCode::ReservedLabel, "binder node `Local` must have an empty property map");
    if (key == kUidKey && !std::holds_alternative<std::int64_t>(value))
        fail(ErrorCode::InvalidArgument, "`$uid` must be an integer");
    n.properties.insert_or_assign(std::move(key), std::move(value));
}

const Node& PropertyGraph::checked_node(NodeId id) const {
    if (!has_node(id)) fail(ErrorCode::UnknownNode, "unknown node " + std::to_string(index_of(id)));
    return nodes_[index_of(id)];
}

const Node& PropertyGraph::node(NodeId id) const { return checked_node(id); }

const Relationship& PropertyGraph::relationship(RelId id) const {
    if (!has_relationship(id))
        fail(ErrorCode::InvalidArgument, "unknown relationship " + std::to_string(index_of(id)));
    return *rels_[index_of(id)];
}

std::span<const RelId> PropertyGraph::outgoing(NodeId id) const {
    checked_node(id);
    return out_[index_of(id)];
}

std::span<const RelId> PropertyGraph::incoming(NodeId id) const {
    checked_node(id);
    return in_[index_of(id)];
}

std::vector<RelId> PropertyGraph::relationship_ids() const {
    std::vector<RelId> ids;
    ids.reserve(live_relationships_);
    for (const auto& r : rels_)
        if (r) ids.push_back(r->id);
    return ids;
}

std::vector<Neighbor> PropertyGraph::neighbors(NodeId node, Direction direction,
                                               std::span<const std::string> types) const {
    checked_node(node);
    auto accepts = [&](const Relationship& r) {
        return types.empty() || std::find(types.begin(), types.end(), r.label) != types.end();
    };
    std::vector<Neighbor> result;
    const auto& out = out_[index_of(node)];
    const auto& in = in_[index_of(node)];
    // Merge the two ascending lists; a self-loop shows up in both.
    std::size_t i = 0, j = 0;
    const bool want_out = direction != Direction::In;
    const bool want_in = direction != Direction::Out;
    while (i < out.size() || j < in.size()) {
        const bool take_out =
            j >= in.size() || (i < out.size() && index_of(out[i]) <= index_of(in[j]));
        RelId id = take_out ? out[i] : in[j];
        const Relationship& r = *rels_[index_of(id)];
        bool self_loop = r.start == r.end;
        if (take_out) {
            ++i;
            if (self_loop && j < in.size() && in[j] == id) ++j;
            if ((want_out || (self_loop && want_in)) && accepts(r)) result.push_back({id, r.end});
        } else {
            ++j;
            if (want_in && accepts(r)) result.push_back({id, r.start});
        }
    }
    return result;
}

std::vector<std::string> PropertyGraph::audit() const {
    std::vector<std::string> problems;
    std::size_t live = 0;
    for (const auto& slot : rels_) {
        if (!slot) continue;
        ++live;
        const Relationship& r = *slot;
        if (!has_node(r.start) || !has_node(r.end)) {
            problems.push_back("relationship " + std::to_string(index_of(r.id)) +
                               " has a dangling endpoint");
            continue;
        }
        for (std::size_t n = 0; n < nodes_.size(); ++n) {
            auto count_in = [&](const std::vector<RelId>& v) {
                return std::count(v.begin(), v.end(), r.id);
            };
            const auto expect_out = n == index_of(r.start) ? 1 : 0;
            const auto expect_in = n == index_of(r.end) ? 1 : 0;
            if (count_in(out_[n]) != expect_out)
                problems.push_back("relationship " + std::to_string(index_of(r.id)) +
                                   " misplaced in outgoing index of node " + std::to_string(n));
            if (count_in(in_[n]) != expect_in)
                problems.push_back("relationship " + std::to_string(index_of(r.id)) +
                                   " misplaced in incoming index of node " + std::to_string(n));
        }
    }
    for (std::size_t n = 0; n < nodes_.size(); ++n) {
        for (RelId r : out_[n])
            if (!has_relationship(r))
                problems.push_back("outgoing index of node " + std::to_string(n) +
                                   " holds a removed relationship");
        for (RelId r : in_[n])
            if (!has_relationship(r))
                problems.push_back("incoming index of node " + std::to_string(n) +
                                   " holds a removed relationship");
        if (!std::is_sorted(out_[n].begin(), out_[n].end()) ||
            !std::is_sorted(in_[n].begin(), in_[n].end()))
            problems.push_back("adjacency of node " + std::to_string(n) + " is not sorted");
    }
    if (live != live_relationships_) problems.push_back("live relationship count is stale");
    return problems;
}

// ---------------------------------------------------------------------------
// Isomorphism

namespace {

std::string content_key(const std::string& label, const Properties& props, bool compare_uids) {
    std::string key = label;
    key += '\x1f';
    for (const auto& [k, v] : props) {
        if (!compare_uids && k == kUidKey) continue;
        key += k;
        key += '\x1e';
        key += kind_name(v);
        key += ':';
        key += format_value(v);
        key += '\x1d';
    }
    return key;
}

class Interner {
public:
    int operator()(const std::string& key) {
        auto [it, inserted] = ids_.try_emplace(key, static_cast<int>(ids_.size()));
        return it->second;
    }

private:
    std::unordered_map<std::string, int> ids_;
};

struct IsoView {
    std::size_t n = 0;
    std::vector<int> color;
    // Relationship content keys between ordered node pairs, sorted.
    std::map<std::pair<std::size_t, std::size_t>, std::vector<int>> edges;
    std::vector<std::vector<std::pair<int, std::size_t>>> out, in;  // (edge key, other)
};

IsoView make_view(const PropertyGraph& g, Interner& node_keys, Interner& edge_keys,
                  bool compare_uids) {
    IsoView v;
    v.n = g.node_count();
    v.color.resize(v.n);
    v.out.resize(v.n);
    v.in.resize(v.n);
    for (const Node& node : g.nodes())
        v.color[index_of(node.id)] = node_keys(content_key(node.label, node.properties, compare_uids));
    for (RelId id : g.relationship_ids()) {
        const Relationship& r = g.relationship(id);
        int key = edge_keys(content_key(r.label, r.properties, compare_uids));
        auto s = index_of(r.start), e = index_of(r.end);
        v.edges[{s, e}].push_back(key);
        v.out[s].emplace_back(key, e);
        v.in[e].emplace_back(key, s);
    }
    for (auto& [pair, keys] : v.edges) std::sort(keys.begin(), keys.end());
    return v;
}

// One colour-refinement round over both graphs with a shared palette.
bool refine(IsoView& a, IsoView& b) {
    Interner palette;
    auto recolor = [&](const IsoView& v) {
        std::vector<int> next(v.n);
        for (std::size_t i = 0; i < v.n; ++i) {
            std::vector<std::pair<int, int>> outs, ins;
            for (auto [k, o] : v.out[i]) outs.emplace_back(k, v.color[o]);
            for (auto [k, o] : v.in[i]) ins.emplace_back(k, v.color[o]);
            std::sort(outs.begin(), outs.end());
            std::sort(ins.begin(), ins.end());
            std::ostringstream key;
            key << v.color[i] << '|';
            for (auto [k, c] : outs) key << k << ',' << c << ';';
            key << '|';
            for (auto [k, c] : ins) key << k << ',' << c << ';';
            next[i] = palette(key.str());
        }
        return next;
    };
    auto distinct = [](const std::vector<int>& c) {
        return std::set<int>(c.begin(), c.end()).size();
    };
    const auto before = distinct(a.color) + distinct(b.color);
    a.color = recolor(a);
    b.color = recolor(b);
    return distinct(a.color) + distinct(b.color) != before;
}

class Matcher {
public:
    Matcher(const IsoView& a, const IsoView& b) : a_(a), b_(b), map_(a.n, kNone), used_(b.n) {
        std::vector<std::size_t> class_size(a.n);
        std::map<int, std::size_t> sizes;
        for (int c : a.color) ++sizes[c];
        order_.resize(a.n);
        std::iota(order_.begin(), order_.end(), 0);
        std::stable_sort(order_.begin(), order_.end(), [&](std::size_t x, std::size_t y) {
            return sizes[a.color[x]] < sizes[a.color[y]];
        });
    }

    bool run() { return assign(0); }

private:
    static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

    const std::vector<int>& edges(const IsoView& v, std::size_t s, std::size_t e) const {
        static const std::vector<int> kEmpty;
        auto it = v.edges.find({s, e});
        return it == v.edges.end() ? kEmpty : it->second;
    }

    bool consistent(std::size_t u, std::size_t v) const {
        if (edges(a_, u, u) != edges(b_, v, v)) return false;
        for (std::size_t k = 0; k < depth_; ++k) {
            std::size_t up = order_[k];
            std::size_t vp = map_[up];
            if (edges(a_, u, up) != edges(b_, v, vp)) return false;
            if (edges(a_, up, u) != edges(b_, vp, v)) return false;
        }
        return true;
    }

    bool assign(std::size_t depth) {
        if (depth == a_.n) return true;
        std::size_t u = order_[depth];
        for (std::size_t v = 0; v < b_.n; ++v) {
            if (used_[v] || b_.color[v] != a_.color[u]) continue;
            depth_ = depth;
            if (!consistent(u, v)) continue;
            map_[u] = v;
            used_[v] = true;
            if (assign(depth + 1)) return true;
            used_[v] = false;
            map_[u] = kNone;
        }
        return false;
    }

    const IsoView& a_;
    const IsoView& b_;
    std::vector<std::size_t> order_;
    std::vector<std::size_t> map_;
    std::vector<bool> used_;
    std::size_t depth_ = 0;
};

}  // namespace

bool structurally_equal(const PropertyGraph& lhs, const PropertyGraph& rhs,
                        const EqualityOptions& options) {
    if (lhs.node_count() > options.max_nodes || rhs.node_count() > options.max_nodes)
        fail(ErrorCode::SizeLimitExceeded,
             "structural comparison limited to " + std::to_string(options.max_nodes) + " nodes");
    if (lhs.node_count() != rhs.node_count() ||
        lhs.relationship_count() != rhs.relationship_count())
        return false;

    Interner node_keys, edge_keys;
    IsoView a = make_view(lhs, node_keys, edge_keys, options.compare_uids);
    IsoView b = make_view(rhs, node_keys, edge_keys, options.compare_uids);

    auto histogram = [](const std::vector<int>& c) {
        std::vector<int> h = c;
        std::sort(h.begin(), h.end());
        return h;
    };
    for (std::size_t round = 0;; ++round) {
        if (histogram(a.color) != histogram(b.color)) return false;
        if (round >= a.n || !refine(a, b)) break;
    }
    if (histogram(a.color) != histogram(b.color)) return false;
    return Matcher(a, b).run();
}

}  // namespace ogo
