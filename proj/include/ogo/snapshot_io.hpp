#pragma once
// External formats: JSON heap snapshots and CSV batch-import bundles.
//
// Snapshot JSON:
//   {"classes": [{"name": C, "superclass": D?, "fields": [{"name", "kind", "type"}],
//                 "statics": {name: value}?}],
//    "objects": [{"id": N, "class": C, "fields": {name: value}}],
//    "roots":   {name: N}}
// Field values: JSON literal (primitive), {"ref": N}, {"refs": [N | null, ...]},
// or a plain array of literals (primitive array). null fields are omitted.
//
// CSV bundle (LF line endings, RFC 4180 quoting):
//   nodes:          nodeId:ID,label:LABEL,props:JSON
//   relationships:  :START_ID,:END_ID,:TYPE,props:JSON
// with each property map as compact JSON with sorted keys.

#include <string>
#include <string_view>

#include "ogo/heap_snapshot.hpp"
#include "ogo/property_graph.hpp"

namespace ogo {

// Parses and validates; errors carry a path such as objects[3].fields.left.
HeapSnapshot load_snapshot(std::string_view json_text);

// Canonical form: sorted object keys, compact unless `indent` >= 0.
std::string save_snapshot(const HeapSnapshot& snapshot, int indent = -1);

// Inverse of extract for heap-shaped graphs. Instance nodes keep their `$uid`
// as object id; nodes without one get fresh ids above the largest uid. Local
// binders become roots, Class nodes become class declarations (statics from
// their extra properties and outgoing edges), `X[]` nodes become
// reference-array fields. Throws NotSnapshotShaped otherwise (for example two
// outgoing edges with the same field label).
HeapSnapshot graph_to_snapshot(const PropertyGraph& graph);

struct CsvBundle {
    std::string nodes;
    std::string relationships;

    friend bool operator==(const CsvBundle&, const CsvBundle&) = default;
};

inline constexpr std::string_view kNodesHeader = "nodeId:ID,label:LABEL,props:JSON";
inline constexpr std::string_view kRelationshipsHeader = ":START_ID,:END_ID,:TYPE,props:JSON";

CsvBundle export_csv(const PropertyGraph& graph);
PropertyGraph import_csv(const CsvBundle& bundle);

// Compact, key-sorted JSON for a property map, and its inverse. An empty
// array decodes as an integer list.
std::string properties_to_json(const Properties& properties);
Properties properties_from_json(std::string_view text);

}  // namespace ogo
