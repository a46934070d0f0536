#pragma once
// In-memory property graph: a directed multigraph whose nodes and
// relationships carry a label and a property map.
//
// Ids are dense and assigned in creation order. Nodes are never removed;
// relationships can be removed (field reassignment), which leaves a hole in
// the id space. All iteration is in ascending id order.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace ogo {

enum class NodeId : std::uint32_t {};
enum class RelId : std::uint32_t {};

constexpr std::size_t index_of(NodeId id) { return static_cast<std::size_t>(id); }
constexpr std::size_t index_of(RelId id) { return static_cast<std::size_t>(id); }

// Homogeneous list of primitives; the element type is fixed by the alternative.
using PrimitiveList = std::variant<std::vector<std::int64_t>, std::vector<double>,
                                   std::vector<bool>, std::vector<std::string>>;

// Equality is type-sensitive: an integer never equals a float.
using PropertyValue = std::variant<std::int64_t, double, bool, std::string, PrimitiveList>;

using Properties = std::map<std::string, PropertyValue, std::less<>>;

inline constexpr std::string_view kUidKey = "$uid";
inline constexpr std::string_view kLocalLabel = "Local";
inline constexpr std::string_view kClassLabel = "Class";
inline constexpr std::string_view kClassNameKey = "name";
inline constexpr std::string_view kInstanceOfLabel = "instanceof";
inline constexpr std::string_view kElementLabel = "element";
inline constexpr std::string_view kIndexKey = "index";

bool is_reserved_label(std::string_view label);

struct Node {
    NodeId id;
    std::string label;
    Properties properties;
};

struct Relationship {
    RelId id;
    std::string label;
    NodeId start;
    NodeId end;
    Properties properties;
};

enum class Direction { Out, In, Both };

struct Neighbor {
    RelId rel;
    NodeId other;

    friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

class PropertyGraph {
public:
    // Binder nodes (`Local`) must have no properties and class-metadata nodes
    // (`Class`) must carry a string `name`; `$uid`, when present, is an integer.
    NodeId add_node(std::string label, Properties properties = {});

    RelId add_relationship(std::string label, NodeId start, NodeId end,
                           Properties properties = {});

    // Replaces every outgoing `field` relationship of `start` with a single
    // one pointing at `end`.
    RelId set_field_edge(std::string_view field, NodeId start, NodeId end);

    void remove_relationship(RelId id);

    void set_property(NodeId id, std::string key, PropertyValue value);

    // Incident relationships in ascending relationship id. A self-loop is
    // reported once, including for Direction::Both. An empty filter accepts
    // every label.
    std::vector<Neighbor> neighbors(NodeId node, Direction direction,
                                    std::span<const std::string> types = {}) const;

    bool has_node(NodeId id) const { return index_of(id) < nodes_.size(); }
    bool has_relationship(RelId id) const {
        return index_of(id) < rels_.size() && rels_[index_of(id)].has_value();
    }

    const Node& node(NodeId id) const;
    const Relationship& relationship(RelId id) const;

    std::size_t node_count() const { return nodes_.size(); }
    std::size_t relationship_count() const { return live_relationships_; }

    std::span<const Node> nodes() const { return nodes_; }
    std::vector<RelId> relationship_ids() const;

    // Ascending relationship ids.
    std::span<const RelId> outgoing(NodeId id) const;
    std::span<const RelId> incoming(NodeId id) const;

    // Checks that the adjacency indexes agree with the relationship table.
    // Returns one message per inconsistency; empty when consistent.
    std::vector<std::string> audit() const;

private:
    const Node& checked_node(NodeId id) const;

    std::vector<Node> nodes_;
    std::vector<std::optional<Relationship>> rels_;
    std::vector<std::vector<RelId>> out_;
    std::vector<std::vector<RelId>> in_;
    std::size_t live_relationships_ = 0;
};

struct EqualityOptions {
    std::size_t max_nodes = 64;
    // `$uid` is object identity, not content; it is ignored unless asked for.
    bool compare_uids = false;
};

// Isomorphism test over labeled, propertied multigraphs. Throws
// SizeLimitExceeded when either graph has more than `max_nodes` nodes.
bool structurally_equal(const PropertyGraph& lhs, const PropertyGraph& rhs,
                        const EqualityOptions& options = {});

// Text rendering used by result tables and diagnostics.
std::string format_value(const PropertyValue& value);
std::string format_properties(const Properties& properties);

const char* kind_name(const PropertyValue& value);

}  // namespace ogo
