#pragma once
// Serializable description of an object heap: classes, objects, reference
// fields and named roots. Input to subgraph extraction.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ogo/property_graph.hpp"

namespace ogo {

using ObjectId = std::int64_t;

enum class FieldKind { Reference, Primitive, PrimitiveArray, ReferenceArray };

const char* to_string(FieldKind kind);
std::optional<FieldKind> parse_field_kind(std::string_view text);

struct FieldDecl {
    std::string name;
    FieldKind kind = FieldKind::Primitive;
    // Class name for references, element class for reference arrays,
    // primitive type name otherwise.
    std::string type;

    friend bool operator==(const FieldDecl&, const FieldDecl&) = default;
};

struct ObjectRef {
    ObjectId id = 0;
    friend bool operator==(const ObjectRef&, const ObjectRef&) = default;
};

// Slots of a reference array; std::nullopt is a null slot.
struct RefArray {
    std::vector<std::optional<ObjectId>> ids;
    friend bool operator==(const RefArray&, const RefArray&) = default;
};

// Null references are represented by omitting the field.
using FieldValue = std::variant<PropertyValue, ObjectRef, RefArray>;
using StaticValue = std::variant<PropertyValue, ObjectRef>;

struct ClassInfo {
    std::string name;
    std::optional<std::string> superclass;
    std::vector<FieldDecl> fields;
    std::map<std::string, StaticValue> statics;

    friend bool operator==(const ClassInfo&, const ClassInfo&) = default;
};

struct ObjectRecord {
    ObjectId id = 0;
    std::string class_name;
    std::map<std::string, FieldValue> fields;

    friend bool operator==(const ObjectRecord&, const ObjectRecord&) = default;
};

struct HeapSnapshot {
    std::vector<ClassInfo> classes;
    std::vector<ObjectRecord> objects;
    std::map<std::string, ObjectId> roots;

    friend bool operator==(const HeapSnapshot&, const HeapSnapshot&) = default;

    const ClassInfo* find_class(std::string_view name) const;
    const ObjectRecord* find_object(ObjectId id) const;
};

// Referential-integrity checks shared by the loader and the extractor:
// unique class names and object ids, declared classes, acyclic superclass
// chains, resolvable references and roots, field kinds matching declarations.
// Throws Error with a path-addressed message.
void validate_snapshot(const HeapSnapshot& snapshot);

// Every field visible on instances of `class_name`, superclass fields first.
std::vector<FieldDecl> all_fields(const HeapSnapshot& snapshot, std::string_view class_name);

}  // namespace ogo
