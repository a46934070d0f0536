#pragma once
// Heap snapshot -> property graph translation.
//
// Mirrors a heap-walking agent: a fresh extraction state per call (every
// object starts untagged), class filtering (whitelist / blacklist), unique
// ids, and reference following from the configured roots.

#include <cstddef>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "ogo/heap_snapshot.hpp"
#include "ogo/property_graph.hpp"

namespace ogo {

struct ExtractionConfig {
    // Instances of these classes, and everything reachable from them, are
    // always part of the result.
    std::set<std::string> whitelist;
    // Instances of these classes never appear, nor do edges touching them.
    std::set<std::string> blacklist;
    // Empty: every object is a candidate. Otherwise only objects reachable
    // from these ids (plus whitelisted instances) are.
    std::vector<ObjectId> roots;
    // Drop objects unreachable from the snapshot's roots before extracting.
    bool force_collect = false;
};

// object id -> `$uid`
using UidAssignment = std::map<ObjectId, std::int64_t>;

// Identity mapping; throws DuplicateId when ids repeat.
UidAssignment assign_unique_ids(const HeapSnapshot& snapshot);

// Removes every object unreachable from the named roots and from static
// reference fields (the analog of a forced garbage collection).
HeapSnapshot collect(const HeapSnapshot& snapshot);

// Transitive closure over reference fields, reference-array slots and the
// static references of each reached object's classes, including the starts.
// Throws UnknownRoot for a start id that is not in the snapshot.
std::set<ObjectId> follow_references(const HeapSnapshot& snapshot, std::span<const ObjectId> starts);

struct ExtractionStats {
    std::size_t candidate_objects = 0;  // objects visited before emission
    std::size_t emitted_objects = 0;    // instance nodes in the result
};

// Graph layout:
//   - one node per included object, labeled with its class, carrying its
//     primitive, string and primitive-array fields plus `$uid`
//   - one edge per non-null reference field, labeled with the field name
//   - a node labeled `<element-class>[]` per reference-array field, with an
//     `element {index: i}` edge per non-null slot
//   - an `instanceof` edge to a `Class` node {name, static primitives}; static
//     reference fields become edges leaving the class node
//   - per root bound to an included object, a `Local` binder node with an
//     edge named after the root
PropertyGraph extract(const HeapSnapshot& snapshot, const ExtractionConfig& config,
                      ExtractionStats* stats = nullptr);

}  // namespace ogo
