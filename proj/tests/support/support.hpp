#pragma once
// Fixtures, random generators and independent oracles shared by the unit
// tests and the acceptance runner. Oracles here deliberately avoid the
// library's own traversal and matching code.

#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "ogo/cypher.hpp"
#include "ogo/heap_model.hpp"
#include "ogo/heap_snapshot.hpp"
#include "ogo/property_graph.hpp"
#include "ogo/query_engine.hpp"

namespace ogo::testing {

using Rng = std::mt19937_64;

std::string fixture_path(const std::string& name);
std::string read_text(const std::string& path);

// ---- fixtures --------------------------------------------------------------------

// Five-node binary tree a..e under BinaryTree f:
//   c(4) -left-> b(2), c -right-> d(5), b -left-> a(1), b -right-> e(3), f -root-> c
struct TreeFixture {
    PropertyGraph graph;
    NodeId a, b, c, d, e, f;
    std::optional<NodeId> node_class, tree_class, binder;
};

// with_meta adds the two Class nodes and instanceof edges; with_binder adds a
// `Local` node bound to f under the name "tree". uids 1..6 for a..f when
// with_uids.
TreeFixture tree_fixture(bool with_meta = true, bool with_binder = true, bool with_uids = true);
// Same heap as tests/fixtures/binary_tree.json.
HeapSnapshot tree_snapshot();

// The two-node BinaryTree held by locals b and l.
struct SmallTreeFixture {
    PropertyGraph graph;
    NodeId l_binder, b_binder, tree, root, leaf, node_class, tree_class;
};
SmallTreeFixture small_tree_fixture();

// ---- canonical form for large graphs ------------------------------------------

// Multisets of node and edge descriptions keyed by `$uid` (class nodes by
// name, binders by their binding name, array nodes by their owner edge).
// Two graphs with equal canonical forms are isomorphic when every instance
// carries a distinct `$uid`.
struct Canonical {
    std::multiset<std::string> nodes;
    std::multiset<std::string> edges;
    friend bool operator==(const Canonical&, const Canonical&) = default;
};
Canonical canonical(const PropertyGraph& g);

// `$uid`s of the instance nodes of g.
std::set<std::int64_t> uids_of(const PropertyGraph& g);

// ---- random heaps ---------------------------------------------------------------

struct RandomSnapshotOptions {
    int classes = 3;
    int objects = 12;
    int roots = 2;
    bool arrays = true;
    bool statics = true;
};
HeapSnapshot random_snapshot(Rng& rng, const RandomSnapshotOptions& options = {});

// Objects reachable from `starts` through instance reference fields, array
// slots and the static references of every reached object's class chain.
std::set<ObjectId> reach_oracle(const HeapSnapshot& s, const std::vector<ObjectId>& starts);
// Objects surviving a collection: reachable from named roots and all statics.
std::set<ObjectId> live_oracle(const HeapSnapshot& s);

// 10,000 objects; the `reachable` objects of class Reach hang off root id 0
// and the rest (classes Junk / Noise) form unrooted garbage that may point
// into the reachable part.
HeapSnapshot big_snapshot(Rng& rng, int total, int reachable);

// ---- random property graphs -------------------------------------------------------

struct RandomGraphOptions {
    int max_nodes = 8;
    int max_edges = 12;
    bool rich_properties = true;  // all value kinds, awkward strings
};
PropertyGraph random_graph(Rng& rng, const RandomGraphOptions& options = {});

// ---- query oracle -------------------------------------------------------------------

struct NodeSpec {
    std::optional<std::string> label;
    std::optional<std::int64_t> v;
};
struct SegmentSpec {
    std::vector<std::string> types;
    cypher::RelDirection direction = cypher::RelDirection::Right;
    int min_hops = 1;
    std::optional<int> max_hops = 1;
    bool variable_length = false;
    bool named = false;  // only for single-hop segments
};
enum class Predicate { None, Less, EqualsConst, NotEqual, Either, SameNode };
struct RandomQuery {
    std::vector<NodeSpec> nodes;  // nodes.size() == segments.size() + 1
    std::vector<SegmentSpec> segments;
    Predicate where = Predicate::None;
    bool distinct = false;
    std::string text() const;
    std::vector<std::string> columns() const;
};

// Graph for the matcher oracle: labels A/B, rel types x/y, optional int `v`,
// at most two edges between any pair of nodes.
PropertyGraph random_match_graph(Rng& rng, int max_nodes = 8, int max_edges = 12);
RandomQuery random_query(Rng& rng);

// One row per match as raw ids (node or relationship index), in column order.
using RowBag = std::multiset<std::vector<std::int64_t>>;
RowBag brute_force_rows(const PropertyGraph& g, const RandomQuery& q);
RowBag engine_rows(const ResultTable& table);

// ---- field assignment oracle ----------------------------------------------------------

// Class N { N f; N g; int v; } with random allocations and field assignments.
struct AssignScenario {
    std::string program;  // full program text
    int variables = 0;
    // Symbolic model after every command: variable -> object, object -> field targets.
    std::vector<int> binding;                       // variable -> object index
    std::vector<std::int64_t> values;               // object -> v
    std::vector<std::optional<int>> f, g;           // object -> target object
};
AssignScenario random_assign_scenario(Rng& rng, int allocations, int assignments);
// Graph the symbolic model describes, built without the interpreter.
PropertyGraph assign_model_graph(const AssignScenario& s);

// ---- containsKey ------------------------------------------------------------------------

struct MapScenario {
    HeapSnapshot snapshot;
    ObjectId map = 0;
    std::set<std::int64_t> keys;  // imperative oracle contents
    // (key object id, key value) probes; values present in `keys` or not.
    std::vector<std::pair<ObjectId, std::int64_t>> probes;
};
MapScenario random_map(Rng& rng, int elements);
bool contains_key_oracle(const std::set<std::int64_t>& keys, std::int64_t k);

// ---- repOK -------------------------------------------------------------------------------

enum class TreeShape { Valid, Cyclic, SizeMismatch, Forest, Shared, Empty };
struct TreeScenario {
    HeapSnapshot snapshot;
    ObjectId tree = 0;
    TreeShape shape = TreeShape::Valid;
};
TreeScenario random_tree(Rng& rng, TreeShape shape, int max_nodes = 8);
// Worklist check: a node seen twice fails; otherwise the visited count must
// equal `size` (a null root requires size 0).
bool rep_ok_oracle(const HeapSnapshot& s, ObjectId tree);

}  // namespace ogo::testing
