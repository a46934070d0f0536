#include "support.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#ifndef OGO_FIXTURE_DIR
#error "OGO_FIXTURE_DIR must point at tests/fixtures"
#endif

namespace ogo::testing {

namespace {

int uniform(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
bool coin(Rng& rng, double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

template <typename T>
const T& pick(Rng& rng, const std::vector<T>& v) {
    return v[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(v.size()) - 1))];
}

Properties uid_props(bool with_uid, std::int64_t uid, Properties p) {
    if (with_uid) p.emplace(std::string(kUidKey), uid);
    return p;
}

}  // namespace

std::string fixture_path(const std::string& name) { return std::string(OGO_FIXTURE_DIR) + "/" + name; }

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// ---- fixtures --------------------------------------------------------------------

TreeFixture tree_fixture(bool with_meta, bool with_binder, bool with_uids) {
    TreeFixture t;
    auto& g = t.graph;
    auto node = [&](std::int64_t uid, std::int64_t value) {
        return g.add_node("BinaryTree$Node", uid_props(with_uids, uid, {{"value", value}}));
    };
    t.a = node(1, 1);
    t.b = node(2, 2);
    t.c = node(3, 4);
    t.d = node(4, 5);
    t.e = node(5, 3);
    t.f = g.add_node("BinaryTree", uid_props(with_uids, 6, {{"size", std::int64_t{5}}}));
    g.add_relationship("left", t.c, t.b);
    g.add_relationship("right", t.c, t.d);
    g.add_relationship("left", t.b, t.a);
    g.add_relationship("right", t.b, t.e);
    g.add_relationship("root", t.f, t.c);
    if (with_meta) {
        t.node_class = g.add_node("Class", {{"name", std::string("BinaryTree$Node")}});
        t.tree_class = g.add_node("Class", {{"name", std::string("BinaryTree")}});
        for (NodeId n : {t.a, t.b, t.c, t.d, t.e}) g.add_relationship("instanceof", n, *t.node_class);
        g.add_relationship("instanceof", t.f, *t.tree_class);
    }
    if (with_binder) {
        t.binder = g.add_node("Local");
        g.add_relationship("tree", *t.binder, t.f);
    }
    return t;
}

HeapSnapshot tree_snapshot() {
    HeapSnapshot s;
    s.classes.push_back(ClassInfo{"BinaryTree",
                                  std::nullopt,
                                  {{"root", FieldKind::Reference, "BinaryTree$Node"},
                                   {"size", FieldKind::Primitive, "int"}},
                                  {}});
    s.classes.push_back(ClassInfo{"BinaryTree$Node",
                                  std::nullopt,
                                  {{"left", FieldKind::Reference, "BinaryTree$Node"},
                                   {"right", FieldKind::Reference, "BinaryTree$Node"},
                                   {"value", FieldKind::Primitive, "int"}},
                                  {}});
    auto obj = [&](ObjectId id, std::string cls, std::map<std::string, FieldValue> fields) {
        s.objects.push_back(ObjectRecord{id, std::move(cls), std::move(fields)});
    };
    obj(1, "BinaryTree$Node", {{"value", PropertyValue{std::int64_t{1}}}});
    obj(2, "BinaryTree$Node",
        {{"value", PropertyValue{std::int64_t{2}}}, {"left", ObjectRef{1}}, {"right", ObjectRef{5}}});
    obj(3, "BinaryTree$Node",
        {{"value", PropertyValue{std::int64_t{4}}}, {"left", ObjectRef{2}}, {"right", ObjectRef{4}}});
    obj(4, "BinaryTree$Node", {{"value", PropertyValue{std::int64_t{5}}}});
    obj(5, "BinaryTree$Node", {{"value", PropertyValue{std::int64_t{3}}}});
    obj(6, "BinaryTree", {{"size", PropertyValue{std::int64_t{5}}}, {"root", ObjectRef{3}}});
    s.roots["tree"] = 6;
    return s;
}

SmallTreeFixture small_tree_fixture() {
    SmallTreeFixture t;
    auto& g = t.graph;
    t.node_class = g.add_node("Class", {{"name", std::string("BinaryTree$Node")}});
    t.tree_class = g.add_node("Class", {{"name", std::string("BinaryTree")}});
    t.leaf = g.add_node("BinaryTree$Node", {{"value", std::int64_t{4}}});
    t.root = g.add_node("BinaryTree$Node", {{"value", std::int64_t{5}}});
    t.tree = g.add_node("BinaryTree", {{"size", std::int64_t{2}}});
    t.l_binder = g.add_node("Local");
    t.b_binder = g.add_node("Local");
    g.add_relationship("instanceof", t.leaf, t.node_class);
    g.add_relationship("instanceof", t.root, t.node_class);
    g.add_relationship("instanceof", t.tree, t.tree_class);
    g.add_relationship("left", t.root, t.leaf);
    g.add_relationship("root", t.tree, t.root);
    g.add_relationship("l", t.l_binder, t.leaf);
    g.add_relationship("b", t.b_binder, t.tree);
    return t;
}

// ---- canonical form --------------------------------------------------------------

Canonical canonical(const PropertyGraph& g) {
    std::vector<std::string> key(g.node_count());
    auto uid_key = [&](const Node& n) -> std::optional<std::string> {
        auto it = n.properties.find(kUidKey);
        if (it == n.properties.end()) return std::nullopt;
        return "#" + format_value(it->second);
    };
    // Instances and class nodes first; binders and arrays derive their key
    // from the node on the other end of their defining edge.
    for (const Node& n : g.nodes()) {
        if (auto k = uid_key(n)) key[index_of(n.id)] = *k;
        else if (n.label == kClassLabel) key[index_of(n.id)] = "Class:" + format_properties(n.properties);
    }
    for (const Node& n : g.nodes()) {
        if (!key[index_of(n.id)].empty()) continue;
        std::string k = n.label;
        for (RelId r : g.outgoing(n.id)) {
            const auto& rel = g.relationship(r);
            if (n.label == kLocalLabel) k += "->" + rel.label + ":" + key[index_of(rel.end)];
        }
        for (RelId r : g.incoming(n.id)) {
            const auto& rel = g.relationship(r);
            k += "<-" + key[index_of(rel.start)] + "." + rel.label;
        }
        key[index_of(n.id)] = k;
    }
    Canonical c;
    for (const Node& n : g.nodes())
        c.nodes.insert(key[index_of(n.id)] + " " + n.label + " " + format_properties(n.properties));
    for (RelId r : g.relationship_ids()) {
        const auto& rel = g.relationship(r);
        c.edges.insert(key[index_of(rel.start)] + " -" + rel.label + format_properties(rel.properties) + "-> " +
                       key[index_of(rel.end)]);
    }
    return c;
}

std::set<std::int64_t> uids_of(const PropertyGraph& g) {
    std::set<std::int64_t> out;
    for (const Node& n : g.nodes()) {
        auto it = n.properties.find(kUidKey);
        if (it != n.properties.end()) out.insert(std::get<std::int64_t>(it->second));
    }
    return out;
}

// ---- random heaps ------------------------------------------------------------------

HeapSnapshot random_snapshot(Rng& rng, const RandomSnapshotOptions& o) {
    HeapSnapshot s;
    std::vector<std::string> names;
    for (int i = 0; i < o.classes; ++i) names.push_back("pkg.C" + std::to_string(i));
    for (int i = 0; i < o.classes; ++i) {
        ClassInfo c;
        c.name = names[static_cast<std::size_t>(i)];
        // C1 extends C0 so inherited fields are exercised.
        if (i == 1) c.superclass = names[0];
        c.fields.push_back({"r" + std::to_string(i), FieldKind::Reference, pick(rng, names)});
        c.fields.push_back({"q" + std::to_string(i), FieldKind::Reference, pick(rng, names)});
        c.fields.push_back({"n" + std::to_string(i), FieldKind::Primitive, "int"});
        c.fields.push_back({"s" + std::to_string(i), FieldKind::Primitive, "String"});
        if (o.arrays) {
            c.fields.push_back({"xs" + std::to_string(i), FieldKind::ReferenceArray, pick(rng, names)});
            c.fields.push_back({"ps" + std::to_string(i), FieldKind::PrimitiveArray, "int"});
        }
        s.classes.push_back(std::move(c));
    }
    std::vector<ObjectId> ids;
    for (int i = 0; i < o.objects; ++i) ids.push_back(100 + i * 3);
    for (ObjectId id : ids) {
        ObjectRecord rec;
        rec.id = id;
        rec.class_name = pick(rng, names);
        for (const FieldDecl& d : all_fields(s, rec.class_name)) {
            if (coin(rng, 0.25)) continue;  // null / unset
            switch (d.kind) {
            case FieldKind::Reference: rec.fields[d.name] = ObjectRef{pick(rng, ids)}; break;
            case FieldKind::Primitive:
                if (d.type == "int") rec.fields[d.name] = PropertyValue{std::int64_t{uniform(rng, -5, 5)}};
                else rec.fields[d.name] = PropertyValue{std::string("s,\"") + std::to_string(uniform(rng, 0, 9))};
                break;
            case FieldKind::ReferenceArray: {
                RefArray arr;
                int n = uniform(rng, 0, 3);
                for (int k = 0; k < n; ++k)
                    arr.ids.push_back(coin(rng, 0.2) ? std::nullopt : std::optional<ObjectId>(pick(rng, ids)));
                rec.fields[d.name] = arr;
                break;
            }
            case FieldKind::PrimitiveArray: {
                std::vector<std::int64_t> xs;
                int n = uniform(rng, 0, 3);
                for (int k = 0; k < n; ++k) xs.push_back(uniform(rng, 0, 9));
                rec.fields[d.name] = PropertyValue{PrimitiveList{xs}};
                break;
            }
            }
        }
        s.objects.push_back(std::move(rec));
    }
    if (o.statics && !ids.empty()) {
        s.classes[0].statics["COUNT"] = PropertyValue{std::int64_t{uniform(rng, 0, 100)}};
        if (coin(rng)) s.classes.back().statics["CACHE"] = ObjectRef{pick(rng, ids)};
    }
    for (int i = 0; i < o.roots && !ids.empty(); ++i) s.roots["root" + std::to_string(i)] = pick(rng, ids);
    return s;
}

namespace {

struct Walker {
    const HeapSnapshot& s;
    std::map<ObjectId, const ObjectRecord*> objects;
    std::map<std::string, const ClassInfo*> classes;

    explicit Walker(const HeapSnapshot& snap) : s(snap) {
        for (const auto& o : s.objects) objects[o.id] = &o;
        for (const auto& c : s.classes) classes[c.name] = &c;
    }

    std::vector<ObjectId> statics_of_chain(const std::string& cls) const {
        std::vector<ObjectId> out;
        for (auto it = classes.find(cls); it != classes.end();) {
            for (const auto& [_, v] : it->second->statics)
                if (auto* r = std::get_if<ObjectRef>(&v)) out.push_back(r->id);
            if (!it->second->superclass) break;
            it = classes.find(*it->second->superclass);
        }
        return out;
    }

    std::set<ObjectId> closure(std::vector<ObjectId> work) const {
        std::set<ObjectId> seen;
        while (!work.empty()) {
            ObjectId id = work.back();
            work.pop_back();
            if (!seen.insert(id).second) continue;
            const ObjectRecord* o = objects.at(id);
            for (const auto& [_, v] : o->fields) {
                if (auto* r = std::get_if<ObjectRef>(&v)) work.push_back(r->id);
                if (auto* a = std::get_if<RefArray>(&v))
                    for (const auto& slot : a->ids)
                        if (slot) work.push_back(*slot);
            }
            for (ObjectId t : statics_of_chain(o->class_name)) work.push_back(t);
        }
        return seen;
    }
};

}  // namespace

std::set<ObjectId> reach_oracle(const HeapSnapshot& s, const std::vector<ObjectId>& starts) {
    return Walker(s).closure(starts);
}

std::set<ObjectId> live_oracle(const HeapSnapshot& s) {
    std::vector<ObjectId> starts;
    for (const auto& [_, id] : s.roots) starts.push_back(id);
    for (const auto& c : s.classes)
        for (const auto& [_, v] : c.statics)
            if (auto* r = std::get_if<ObjectRef>(&v)) starts.push_back(r->id);
    return Walker(s).closure(starts);
}

HeapSnapshot big_snapshot(Rng& rng, int total, int reachable) {
    HeapSnapshot s;
    for (const char* name : {"Reach", "Junk", "Noise"}) {
        ClassInfo c;
        c.name = name;
        c.fields = {{"next", FieldKind::Reference, name},
                    {"other", FieldKind::Reference, "Reach"},
                    {"n", FieldKind::Primitive, "int"}};
        s.classes.push_back(std::move(c));
    }
    for (int i = 0; i < total; ++i) {
        ObjectRecord o;
        o.id = i;
        o.fields["n"] = PropertyValue{std::int64_t{i % 97}};
        if (i < reachable) {
            o.class_name = "Reach";
            // A `next` chain through [0, reachable) with random back references.
            if (i + 1 < reachable) o.fields["next"] = ObjectRef{i + 1};
            if (i > 0 && coin(rng, 0.3)) o.fields["other"] = ObjectRef{uniform(rng, 0, i - 1)};
        } else {
            o.class_name = coin(rng) ? "Junk" : "Noise";
            if (coin(rng, 0.7)) o.fields["other"] = ObjectRef{uniform(rng, 0, reachable - 1)};
        }
        s.objects.push_back(std::move(o));
    }
    // `next` on garbage stays within the garbage and within its own class.
    for (int i = reachable; i < total; ++i) {
        auto& o = s.objects[static_cast<std::size_t>(i)];
        for (int tries = 0; tries < 3; ++tries) {
            int j = uniform(rng, reachable, total - 1);
            if (s.objects[static_cast<std::size_t>(j)].class_name == o.class_name) {
                o.fields["next"] = ObjectRef{j};
                break;
            }
        }
    }
    s.roots["main"] = 0;
    return s;
}

// ---- random property graphs ---------------------------------------------------------

PropertyGraph random_graph(Rng& rng, const RandomGraphOptions& o) {
    static const std::vector<std::string> labels = {"A", "pkg.B$Inner", "C[]", "Weird, \"label\"", "Class",
                                                    "Local"};
    static const std::vector<std::string> types = {"next", "left", "element", "has space", "q\"t"};
    static const std::vector<std::string> strings = {"", "plain", "comma,here", "quote\"d", "new\nline",
                                                     "crlf\r\n", "tab\tand \\ slash", "unicode \xc3\xa9"};
    PropertyGraph g;
    auto value = [&]() -> PropertyValue {
        switch (uniform(rng, 0, o.rich_properties ? 7 : 1)) {
        case 0: return std::int64_t{uniform(rng, -1000, 1000)};
        case 1: return std::int64_t{std::numeric_limits<std::int64_t>::max() - uniform(rng, 0, 1)};
        case 2: return std::uniform_real_distribution<double>(-1e6, 1e6)(rng);
        case 3: return coin(rng);
        case 4: return pick(rng, strings);
        case 5: return PrimitiveList{std::vector<std::int64_t>{uniform(rng, 0, 9), uniform(rng, 0, 9)}};
        case 6: return PrimitiveList{std::vector<std::string>{pick(rng, strings)}};
        default: return PrimitiveList{std::vector<double>{0.1, -2.5}};
        }
    };
    int n = uniform(rng, 0, o.max_nodes);
    for (int i = 0; i < n; ++i) {
        std::string label = pick(rng, labels);
        Properties p;
        if (label == "Class") p["name"] = pick(rng, strings);
        else if (label != "Local") {
            int k = uniform(rng, 0, 3);
            for (int j = 0; j < k; ++j) p["k" + std::to_string(uniform(rng, 0, 4))] = value();
            if (coin(rng)) p[std::string(kUidKey)] = std::int64_t{i * 7};
        }
        g.add_node(label, std::move(p));
    }
    if (n > 0) {
        int m = uniform(rng, 0, o.max_edges);
        for (int i = 0; i < m; ++i) {
            Properties p;
            if (coin(rng, 0.3)) p["w"] = value();
            g.add_relationship(pick(rng, types), NodeId(uniform(rng, 0, n - 1)), NodeId(uniform(rng, 0, n - 1)),
                               std::move(p));
        }
    }
    return g;
}

// ---- query oracle ---------------------------------------------------------------------

std::vector<std::string> RandomQuery::columns() const {
    std::vector<std::string> cols;
    for (std::size_t i = 0; i < nodes.size(); ++i) cols.push_back("n" + std::to_string(i));
    for (std::size_t i = 0; i < segments.size(); ++i)
        if (segments[i].named) cols.push_back("r" + std::to_string(i));
    return cols;
}

std::string RandomQuery::text() const {
    std::string out = "MATCH ";
    auto node = [&](std::size_t i) {
        std::string s = "(n" + std::to_string(i);
        if (nodes[i].label) s += ":" + *nodes[i].label;
        if (nodes[i].v) s += " {v: " + std::to_string(*nodes[i].v) + "}";
        return s + ")";
    };
    out += node(0);
    for (std::size_t i = 0; i < segments.size(); ++i) {
        const SegmentSpec& seg = segments[i];
        std::string inner;
        if (seg.named) inner += "r" + std::to_string(i);
        for (std::size_t t = 0; t < seg.types.size(); ++t) inner += (t ? "|" : ":") + seg.types[t];
        if (seg.variable_length) {
            inner += "*";
            if (!seg.max_hops) {
                if (seg.min_hops != 1) inner += std::to_string(seg.min_hops) + "..";
            } else if (seg.min_hops == *seg.max_hops) {
                inner += std::to_string(seg.min_hops);
            } else {
                inner += std::to_string(seg.min_hops) + ".." + std::to_string(*seg.max_hops);
            }
        }
        std::string body = inner.empty() ? "" : "[" + inner + "]";
        switch (seg.direction) {
        case cypher::RelDirection::Right: out += "-" + body + "->"; break;
        case cypher::RelDirection::Left: out += "<-" + body + "-"; break;
        case cypher::RelDirection::Both: out += "-" + body + "-"; break;
        }
        out += node(i + 1);
    }
    std::string last = "n" + std::to_string(nodes.size() - 1);
    switch (where) {
    case Predicate::None: break;
    case Predicate::Less: out += " WHERE n0.v < " + last + ".v"; break;
    case Predicate::EqualsConst: out += " WHERE n0.v = 1"; break;
    case Predicate::NotEqual: out += " WHERE NOT n0.v = " + last + ".v"; break;
    case Predicate::Either: out += " WHERE n0.v = 1 OR " + last + ".v = 2"; break;
    case Predicate::SameNode: out += " WHERE n0 = " + last; break;
    }
    out += distinct ? " RETURN DISTINCT " : " RETURN ";
    auto cols = columns();
    for (std::size_t i = 0; i < cols.size(); ++i) out += (i ? ", " : "") + cols[i];
    return out;
}

PropertyGraph random_match_graph(Rng& rng, int max_nodes, int max_edges) {
    PropertyGraph g;
    int n = uniform(rng, 1, max_nodes);
    for (int i = 0; i < n; ++i) {
        Properties p;
        if (coin(rng, 0.75)) p["v"] = std::int64_t{uniform(rng, 0, 2)};
        g.add_node(coin(rng) ? "A" : "B", std::move(p));
    }
    // At most two edges per unordered node pair. Without a cap, a single node
    // with a dozen self-loops has ~1e8 trails for an unbounded pattern, which
    // neither the engine nor the enumerator can materialize.
    int m = uniform(rng, 0, max_edges);
    std::map<std::pair<int, int>, int> parallel;
    for (int i = 0, tries = 0; i < m && tries < 4 * max_edges; ++tries) {
        int a = uniform(rng, 0, n - 1), b = uniform(rng, 0, n - 1);
        if (++parallel[std::minmax(a, b)] > 2) continue;
        g.add_relationship(coin(rng) ? "x" : "y", NodeId(a), NodeId(b));
        ++i;
    }
    return g;
}

RandomQuery random_query(Rng& rng) {
    RandomQuery q;
    int segs = coin(rng, 0.7) ? 1 : 2;
    for (int i = 0; i <= segs; ++i) {
        NodeSpec n;
        if (coin(rng, 0.3)) n.label = coin(rng) ? "A" : "B";
        if (coin(rng, 0.2)) n.v = uniform(rng, 0, 2);
        q.nodes.push_back(n);
    }
    for (int i = 0; i < segs; ++i) {
        SegmentSpec s;
        switch (uniform(rng, 0, 2)) {
        case 0: break;
        case 1: s.types = {coin(rng) ? "x" : "y"}; break;
        default: s.types = {"x", "y"}; break;
        }
        s.direction = static_cast<cypher::RelDirection>(uniform(rng, 0, 2));
        switch (uniform(rng, 0, 3)) {
        case 0: s.named = coin(rng); break;  // exactly one hop
        case 1: s.variable_length = true; s.min_hops = 2; s.max_hops = 2; break;
        case 2: s.variable_length = true; s.min_hops = 1; s.max_hops = 3; break;
        default: s.variable_length = true; s.min_hops = 1; s.max_hops = std::nullopt; break;
        }
        q.segments.push_back(s);
    }
    q.where = static_cast<Predicate>(uniform(rng, 0, 5));
    q.distinct = coin(rng, 0.25);
    return q;
}

namespace {

// Three-valued logic over optional<bool>; nullopt is null.
using Tri = std::optional<bool>;

std::optional<std::int64_t> v_of(const PropertyGraph& g, std::int64_t node) {
    const auto& p = g.node(NodeId(static_cast<std::uint32_t>(node))).properties;
    auto it = p.find("v");
    if (it == p.end()) return std::nullopt;
    return std::get<std::int64_t>(it->second);
}

Tri eq(std::optional<std::int64_t> a, std::optional<std::int64_t> b) {
    if (!a || !b) return std::nullopt;
    return *a == *b;
}

Tri predicate(const PropertyGraph& g, const RandomQuery& q, const std::vector<std::int64_t>& nodes) {
    auto first = v_of(g, nodes.front());
    auto last = v_of(g, nodes.back());
    switch (q.where) {
    case Predicate::None: return true;
    case Predicate::Less:
        if (!first || !last) return std::nullopt;
        return *first < *last;
    case Predicate::EqualsConst: return eq(first, std::int64_t{1});
    case Predicate::NotEqual: {
        Tri t = eq(first, last);
        if (!t) return std::nullopt;
        return !*t;
    }
    case Predicate::Either: {
        Tri l = eq(first, std::int64_t{1});
        Tri r = eq(last, std::int64_t{2});
        if (l == true || r == true) return true;
        if (!l || !r) return std::nullopt;
        return false;
    }
    case Predicate::SameNode: return nodes.front() == nodes.back();
    }
    return std::nullopt;
}

struct Edge {
    std::int64_t id, start, end;
    std::string type;
};

// Every relationship-simple walk from `from` to `to` for one segment, as the
// list of relationship ids, avoiding `used`. Plain recursion over the whole
// relationship list: no adjacency index.
void walks(const std::vector<Edge>& edges, const SegmentSpec& seg, std::int64_t cur, std::int64_t to,
           std::vector<std::int64_t>& path, std::vector<bool>& used, std::vector<std::vector<std::int64_t>>& out) {
    const int len = static_cast<int>(path.size());
    if (cur == to && len >= seg.min_hops && (!seg.max_hops || len <= *seg.max_hops)) out.push_back(path);
    if (seg.max_hops && len >= *seg.max_hops) return;
    for (std::size_t i = 0; i < edges.size(); ++i) {
        if (used[i]) continue;
        const Edge& e = edges[i];
        if (!seg.types.empty() && std::find(seg.types.begin(), seg.types.end(), e.type) == seg.types.end())
            continue;
        std::optional<std::int64_t> next;
        bool fwd = e.start == cur, bwd = e.end == cur;
        switch (seg.direction) {
        case cypher::RelDirection::Right:
            if (fwd) next = e.end;
            break;
        case cypher::RelDirection::Left:
            if (bwd) next = e.start;
            break;
        case cypher::RelDirection::Both:
            if (fwd) next = e.end;
            else if (bwd) next = e.start;
            break;
        }
        if (!next) continue;
        used[i] = true;
        path.push_back(e.id);
        walks(edges, seg, *next, to, path, used, out);
        path.pop_back();
        used[i] = false;
    }
}

}  // namespace

RowBag brute_force_rows(const PropertyGraph& g, const RandomQuery& q) {
    std::vector<Edge> edges;
    for (RelId r : g.relationship_ids()) {
        const auto& rel = g.relationship(r);
        edges.push_back({static_cast<std::int64_t>(index_of(r)), static_cast<std::int64_t>(index_of(rel.start)),
                         static_cast<std::int64_t>(index_of(rel.end)), rel.label});
    }
    const std::int64_t n = static_cast<std::int64_t>(g.node_count());
    const std::size_t k = q.nodes.size();

    auto node_ok = [&](std::size_t i, std::int64_t id) {
        const Node& node = g.node(NodeId(static_cast<std::uint32_t>(id)));
        if (q.nodes[i].label && node.label != *q.nodes[i].label) return false;
        if (q.nodes[i].v) {
            auto v = v_of(g, id);
            if (!v || *v != *q.nodes[i].v) return false;
        }
        return true;
    };

    RowBag rows;
    std::set<std::vector<std::int64_t>> seen;
    std::vector<std::int64_t> assign(k, 0);
    std::vector<bool> used(edges.size(), false);
    std::vector<std::int64_t> named(q.segments.size(), -1);

    // segment i connects assign[i] and assign[i+1]
    std::function<void(std::size_t)> segment = [&](std::size_t i) {
        if (i == q.segments.size()) {
            if (predicate(g, q, assign) != true) return;
            std::vector<std::int64_t> row = assign;
            for (std::size_t s = 0; s < q.segments.size(); ++s)
                if (q.segments[s].named) row.push_back(named[s]);
            if (q.distinct && !seen.insert(row).second) return;
            rows.insert(row);
            return;
        }
        std::vector<std::vector<std::int64_t>> found;
        std::vector<std::int64_t> path;
        walks(edges, q.segments[i], assign[i], assign[i + 1], path, used, found);
        for (const auto& w : found) {
            for (auto id : w)
                for (std::size_t e = 0; e < edges.size(); ++e)
                    if (edges[e].id == id) used[e] = true;
            if (q.segments[i].named) named[i] = w.front();
            segment(i + 1);
            for (auto id : w)
                for (std::size_t e = 0; e < edges.size(); ++e)
                    if (edges[e].id == id) used[e] = false;
        }
    };

    std::function<void(std::size_t)> choose = [&](std::size_t i) {
        if (i == k) {
            segment(0);
            return;
        }
        for (std::int64_t id = 0; id < n; ++id) {
            if (!node_ok(i, id)) continue;
            assign[i] = id;
            choose(i + 1);
        }
    };
    choose(0);
    return rows;
}

RowBag engine_rows(const ResultTable& table) {
    RowBag rows;
    for (const auto& r : table.rows) {
        std::vector<std::int64_t> out;
        for (const Value& v : r) {
            if (auto* n = std::get_if<NodeId>(&v)) out.push_back(static_cast<std::int64_t>(index_of(*n)));
            else if (auto* e = std::get_if<RelId>(&v)) out.push_back(static_cast<std::int64_t>(index_of(*e)));
            else out.push_back(-1);
        }
        rows.insert(out);
    }
    return rows;
}

// ---- field assignment -------------------------------------------------------------------

AssignScenario random_assign_scenario(Rng& rng, int allocations, int assignments) {
    AssignScenario s;
    std::ostringstream p;
    p << "class N {\n  N f;\n  N g;\n  int v;\n  N(N f, N g, int v) { super(); this.f = f; this.g = g; this.v = v; }\n}\n";
    auto target = [&](int upto) -> std::optional<int> {
        if (upto == 0 || coin(rng, 0.3)) return std::nullopt;
        return uniform(rng, 0, upto - 1);
    };
    for (int i = 0; i < allocations; ++i) {
        auto f = target(i), g = target(i);
        std::int64_t v = uniform(rng, 0, 3);
        p << "x" << i << " = new N(" << (f ? "x" + std::to_string(*f) : "null") << ", "
          << (g ? "x" + std::to_string(*g) : "null") << ", " << v << ");\n";
        s.binding.push_back(i);
        s.values.push_back(v);
        s.f.push_back(f ? std::optional<int>(s.binding[static_cast<std::size_t>(*f)]) : std::nullopt);
        s.g.push_back(g ? std::optional<int>(s.binding[static_cast<std::size_t>(*g)]) : std::nullopt);
    }
    s.variables = allocations;
    for (int i = 0; i < assignments; ++i) {
        int x = uniform(rng, 0, allocations - 1), y = uniform(rng, 0, allocations - 1);
        bool use_f = coin(rng);
        p << "x" << x << "." << (use_f ? "f" : "g") << " = x" << y << ";\n";
        // Rule: the field edge of x's object now points at y's object, and
        // nothing else changes.
        auto& slot = use_f ? s.f : s.g;
        slot[static_cast<std::size_t>(s.binding[static_cast<std::size_t>(x)])] = s.binding[static_cast<std::size_t>(y)];
    }
    s.program = p.str();
    return s;
}

PropertyGraph assign_model_graph(const AssignScenario& s) {
    PropertyGraph g;
    NodeId cls = g.add_node("Class", {{"name", std::string("N")}});
    std::vector<NodeId> obj;
    for (std::size_t i = 0; i < s.values.size(); ++i) {
        obj.push_back(g.add_node("N", {{"v", s.values[i]}}));
        g.add_relationship("instanceof", obj.back(), cls);
    }
    for (std::size_t i = 0; i < s.values.size(); ++i) {
        if (s.f[i]) g.add_relationship("f", obj[i], obj[static_cast<std::size_t>(*s.f[i])]);
        if (s.g[i]) g.add_relationship("g", obj[i], obj[static_cast<std::size_t>(*s.g[i])]);
    }
    for (int v = 0; v < s.variables; ++v) {
        NodeId b = g.add_node("Local");
        g.add_relationship("x" + std::to_string(v), b, obj[static_cast<std::size_t>(s.binding[static_cast<std::size_t>(v)])]);
    }
    return g;
}

// ---- containsKey ------------------------------------------------------------------------

MapScenario random_map(Rng& rng, int elements) {
    MapScenario m;
    HeapSnapshot& s = m.snapshot;
    s.classes.push_back(ClassInfo{"java.util.HashMap",
                                  std::nullopt,
                                  {{"table", FieldKind::ReferenceArray, "java.util.HashMap$Node"},
                                   {"size", FieldKind::Primitive, "int"}},
                                  {}});
    s.classes.push_back(ClassInfo{"java.util.HashMap$Node",
                                  std::nullopt,
                                  {{"hash", FieldKind::Primitive, "int"},
                                   {"key", FieldKind::Reference, "Key"},
                                   {"value", FieldKind::Reference, "Key"},
                                   {"next", FieldKind::Reference, "java.util.HashMap$Node"}},
                                  {}});
    s.classes.push_back(ClassInfo{"Key", std::nullopt, {{"k", FieldKind::Primitive, "int"}}, {}});

    ObjectId next_id = 1;
    auto new_key = [&](std::int64_t k) {
        ObjectId id = next_id++;
        s.objects.push_back(ObjectRecord{id, "Key", {{"k", PropertyValue{k}}}});
        return id;
    };

    const int buckets = 16;
    while (static_cast<int>(m.keys.size()) < elements) m.keys.insert(uniform(rng, 0, elements * 4));
    std::vector<std::vector<ObjectId>> chains(buckets);
    std::map<std::int64_t, ObjectId> key_object;
    std::vector<ObjectRecord> entries;
    for (std::int64_t k : m.keys) {
        ObjectId key = new_key(k);
        key_object[k] = key;
        ObjectId value = new_key(k * 10 + 1);  // values are Keys too; must never match a probe
        ObjectId id = next_id++;
        const int hash = static_cast<int>(k % buckets);
        entries.push_back(ObjectRecord{
            id, "java.util.HashMap$Node",
            {{"hash", PropertyValue{std::int64_t{hash}}}, {"key", ObjectRef{key}}, {"value", ObjectRef{value}}}});
        chains[static_cast<std::size_t>(hash)].push_back(id);
    }
    for (auto& chain : chains) {
        std::shuffle(chain.begin(), chain.end(), rng);
        for (std::size_t i = 0; i + 1 < chain.size(); ++i)
            for (auto& e : entries)
                if (e.id == chain[i]) e.fields["next"] = ObjectRef{chain[i + 1]};
    }
    for (auto& e : entries) s.objects.push_back(std::move(e));
    RefArray table;
    for (auto& chain : chains) table.ids.push_back(chain.empty() ? std::nullopt : std::optional<ObjectId>(chain[0]));
    m.map = next_id++;
    s.objects.push_back(ObjectRecord{
        m.map, "java.util.HashMap", {{"table", table}, {"size", PropertyValue{std::int64_t{elements}}}}});
    s.roots["map"] = m.map;

    // Probes: present keys (same object or an equal copy), and absent keys
    // including values stored as map values but never as keys.
    std::vector<std::int64_t> present(m.keys.begin(), m.keys.end());
    for (int i = 0; i < 3; ++i) {
        std::int64_t k = pick(rng, present);
        if (coin(rng)) m.probes.push_back({key_object[k], k});
        else m.probes.push_back({new_key(k), k});
    }
    for (int i = 0; i < 3; ++i) {
        std::int64_t k;
        do {
            k = coin(rng) ? uniform(rng, -50, elements * 4 + 50) : pick(rng, present) * 10 + 1;
        } while (m.keys.contains(k));
        m.probes.push_back({new_key(k), k});
    }
    return m;
}

bool contains_key_oracle(const std::set<std::int64_t>& keys, std::int64_t k) {
    // Imperative lookup: bucket by hash, walk the chain.
    const int buckets = 16;
    std::vector<std::vector<std::int64_t>> table(buckets);
    for (auto key : keys) table[static_cast<std::size_t>(((key % buckets) + buckets) % buckets)].push_back(key);
    for (auto key : table[static_cast<std::size_t>(((k % buckets) + buckets) % buckets)])
        if (key == k) return true;
    return false;
}

// ---- repOK -----------------------------------------------------------------------------------

TreeScenario random_tree(Rng& rng, TreeShape shape, int max_nodes) {
    TreeScenario t;
    t.shape = shape;
    HeapSnapshot& s = t.snapshot;
    s = HeapSnapshot{};
    HeapSnapshot base = tree_snapshot();
    s.classes = base.classes;

    int n = shape == TreeShape::Empty ? 0 : uniform(rng, 1, max_nodes);
    if (shape == TreeShape::Cyclic || shape == TreeShape::Shared) n = std::max(n, 2);
    std::vector<ObjectRecord> nodes;
    for (int i = 0; i < n; ++i)
        nodes.push_back(ObjectRecord{i + 1, "BinaryTree$Node", {{"value", PropertyValue{std::int64_t{uniform(rng, 0, 9)}}}}});
    // Random tree: node i > 0 hangs off a free slot of an earlier node.
    for (int i = 1; i < n; ++i) {
        for (;;) {
            auto& parent = nodes[static_cast<std::size_t>(uniform(rng, 0, i - 1))];
            const char* slot = coin(rng) ? "left" : "right";
            if (parent.fields.contains(slot)) continue;
            parent.fields[slot] = ObjectRef{i + 1};
            break;
        }
    }
    std::int64_t size = n;
    auto free_slot = [&](ObjectRecord& o) -> std::optional<std::string> {
        for (const char* f : {"left", "right"})
            if (!o.fields.contains(f)) return std::string(f);
        return std::nullopt;
    };
    auto add_extra_edge = [&](bool back_edge) {
        // back_edge: from a node to one of its ancestors or itself (cycle);
        // otherwise to a node already having a parent (sharing, no cycle).
        for (int tries = 0; tries < 100; ++tries) {
            int from = uniform(rng, 0, n - 1);
            auto slot = free_slot(nodes[static_cast<std::size_t>(from)]);
            if (!slot) continue;
            // ancestors of `from` (ids are 1-based; parents have lower ids)
            std::set<int> anc{from};
            for (bool grew = true; grew;) {
                grew = false;
                for (int p = 0; p < n; ++p)
                    for (const auto& [_, v] : nodes[static_cast<std::size_t>(p)].fields)
                        if (auto* r = std::get_if<ObjectRef>(&v))
                            if (anc.contains(static_cast<int>(r->id) - 1) && anc.insert(p).second) grew = true;
            }
            std::vector<int> candidates;
            for (int c = 0; c < n; ++c)
                if (back_edge == anc.contains(c) && (back_edge || c != 0)) candidates.push_back(c);
            if (candidates.empty()) continue;
            nodes[static_cast<std::size_t>(from)].fields[*slot] = ObjectRef{pick(rng, candidates) + 1};
            return true;
        }
        return false;
    };

    switch (shape) {
    case TreeShape::Valid:
    case TreeShape::Empty: break;
    case TreeShape::SizeMismatch: size += coin(rng) ? 1 : -1; break;
    case TreeShape::Cyclic: add_extra_edge(true); break;
    case TreeShape::Shared: add_extra_edge(false); break;
    case TreeShape::Forest: {
        // Extra unreachable trees; size counts either the reachable part
        // (valid) or everything (invalid).
        int extra = uniform(rng, 1, 3);
        int base_id = n + 1;
        for (int i = 0; i < extra; ++i)
            nodes.push_back(ObjectRecord{base_id + i, "BinaryTree$Node", {{"value", PropertyValue{std::int64_t{7}}}}});
        if (extra > 1) nodes[static_cast<std::size_t>(n)].fields["left"] = ObjectRef{base_id + 1};
        if (coin(rng)) size += extra;
        break;
    }
    }
    if (shape == TreeShape::Empty && coin(rng)) size = 1;
    for (auto& o : nodes) s.objects.push_back(std::move(o));
    t.tree = 100;
    ObjectRecord tree{t.tree, "BinaryTree", {{"size", PropertyValue{size}}}};
    if (n > 0) tree.fields["root"] = ObjectRef{1};
    s.objects.push_back(std::move(tree));
    s.roots["t"] = t.tree;
    return t;
}

bool rep_ok_oracle(const HeapSnapshot& s, ObjectId tree) {
    std::map<ObjectId, const ObjectRecord*> objects;
    for (const auto& o : s.objects) objects[o.id] = &o;
    const ObjectRecord* t = objects.at(tree);
    const std::int64_t size = std::get<std::int64_t>(std::get<PropertyValue>(t->fields.at("size")));
    auto root = t->fields.find("root");
    if (root == t->fields.end()) return size == 0;
    std::set<ObjectId> visited{std::get<ObjectRef>(root->second).id};
    std::deque<ObjectId> worklist{std::get<ObjectRef>(root->second).id};
    while (!worklist.empty()) {
        const ObjectRecord* cur = objects.at(worklist.front());
        worklist.pop_front();
        for (const char* f : {"left", "right"}) {
            auto it = cur->fields.find(f);
            if (it == cur->fields.end()) continue;
            ObjectId child = std::get<ObjectRef>(it->second).id;
            if (!visited.insert(child).second) return false;
            worklist.push_back(child);
        }
    }
    return static_cast<std::int64_t>(visited.size()) == size;
}

}  // namespace ogo::testing
