#include "ogo/heap_snapshot.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "ogo/error.hpp"

namespace ogo {

const char* to_string(FieldKind kind) {
    switch (kind) {
    case FieldKind::Reference: return "reference";
    case FieldKind::Primitive: return "primitive";
    case FieldKind::PrimitiveArray: return "primitive-array";
    case FieldKind::ReferenceArray: return "reference-array";
    }
    return "primitive";
}

std::optional<FieldKind> parse_field_kind(std::string_view text) {
    if (text == "reference") return FieldKind::Reference;
    if (text == "primitive") return FieldKind::Primitive;
    if (text == "primitive-array") return FieldKind::PrimitiveArray;
    if (text == "reference-array") return FieldKind::ReferenceArray;
    return std::nullopt;
}

const ClassInfo* HeapSnapshot::find_class(std::string_view name) const {
    for (const auto& c : classes)
        if (c.name == name) return &c;
    return nullptr;
}

const ObjectRecord* HeapSnapshot::find_object(ObjectId id) const {
    for (const auto& o : objects)
        if (o.id == id) return &o;
    return nullptr;
}

std::vector<FieldDecl> all_fields(const HeapSnapshot& snapshot, std::string_view class_name) {
    std::vector<const ClassInfo*> chain;
    std::set<std::string_view> seen;
    for (const ClassInfo* c = snapshot.find_class(class_name); c;) {
        if (!seen.insert(c->name).second)
            fail(ErrorCode::Schema, "cyclic superclass chain through " + c->name);
        chain.push_back(c);
        c = c->superclass ? snapshot.find_class(*c->superclass) : nullptr;
    }
    if (chain.empty()) fail(ErrorCode::UnknownClass, "unknown class " + std::string(class_name));
    std::vector<FieldDecl> fields;
    for (auto it = chain.rbegin(); it != chain.rend(); ++it)
        fields.insert(fields.end(), (*it)->fields.begin(), (*it)->fields.end());
    return fields;
}

namespace {

bool kind_matches(FieldKind kind, const FieldValue& value) {
    switch (kind) {
    case FieldKind::Reference: return std::holds_alternative<ObjectRef>(value);
    case FieldKind::ReferenceArray: return std::holds_alternative<RefArray>(value);
    case FieldKind::Primitive: {
        auto* p = std::get_if<PropertyValue>(&value);
        return p && !std::holds_alternative<PrimitiveList>(*p);
    }
    case FieldKind::PrimitiveArray: {
        auto* p = std::get_if<PropertyValue>(&value);
        return p && std::holds_alternative<PrimitiveList>(*p);
    }
    }
    return false;
}

}  // namespace

void validate_snapshot(const HeapSnapshot& snapshot) {
    std::unordered_map<std::string_view, const ClassInfo*> classes;
    for (std::size_t i = 0; i < snapshot.classes.size(); ++i) {
        const ClassInfo& c = snapshot.classes[i];
        const std::string path = "classes[" + std::to_string(i) + "]";
        if (c.name.empty()) fail(ErrorCode::Schema, path + ".name: must be non-empty");
        if (is_reserved_label(c.name))
            fail(ErrorCode::Schema, path + ".name: `" + c.name + "` is reserved");
        if (!classes.emplace(c.name, &c).second)
            fail(ErrorCode::Schema, path + ".name: duplicate class " + c.name);
        std::set<std::string_view> names;
        for (std::size_t f = 0; f < c.fields.size(); ++f) {
            if (c.fields[f].name.empty())
                fail(ErrorCode::Schema, path + ".fields[" + std::to_string(f) + "].name: empty");
            if (!names.insert(c.fields[f].name).second)
                fail(ErrorCode::Schema,
                     path + ".fields[" + std::to_string(f) + "]: duplicate field " + c.fields[f].name);
        }
    }
    for (std::size_t i = 0; i < snapshot.classes.size(); ++i) {
        const ClassInfo& c = snapshot.classes[i];
        if (c.superclass && !classes.contains(*c.superclass))
            fail(ErrorCode::Schema, "classes[" + std::to_string(i) +
                                        "].superclass: undeclared class " + *c.superclass);
        all_fields(snapshot, c.name);  // rejects cycles
    }

    std::unordered_set<ObjectId> ids;
    for (std::size_t i = 0; i < snapshot.objects.size(); ++i) {
        if (!ids.insert(snapshot.objects[i].id).second)
            fail(ErrorCode::DuplicateId, "objects[" + std::to_string(i) + "].id: duplicate id " +
                                             std::to_string(snapshot.objects[i].id));
    }

    auto check_ref = [&](ObjectId id, const std::string& path) {
        if (!ids.contains(id))
            fail(ErrorCode::DanglingReference,
                 path + ": reference to missing object " + std::to_string(id));
    };

    for (const ClassInfo& c : snapshot.classes) {
        for (const auto& [name, value] : c.statics) {
            if (auto* ref = std::get_if<ObjectRef>(&value))
                check_ref(ref->id, "classes[" + c.name + "].statics." + name);
        }
    }

    std::unordered_map<std::string_view, std::vector<FieldDecl>> layouts;
    for (std::size_t i = 0; i < snapshot.objects.size(); ++i) {
        const ObjectRecord& o = snapshot.objects[i];
        const std::string path = "objects[" + std::to_string(i) + "]";
        if (!classes.contains(o.class_name))
            fail(ErrorCode::Schema, path + ".class: undeclared class " + o.class_name);
        auto [it, fresh] = layouts.try_emplace(o.class_name);
        if (fresh) it->second = all_fields(snapshot, o.class_name);
        const auto& layout = it->second;
        for (const auto& [name, value] : o.fields) {
            const std::string fpath = path + ".fields." + name;
            auto decl = std::find_if(layout.begin(), layout.end(),
                                     [&](const FieldDecl& d) { return d.name == name; });
            if (decl == layout.end())
                fail(ErrorCode::Schema, fpath + ": field not declared by " + o.class_name);
            if (!kind_matches(decl->kind, value))
                fail(ErrorCode::Schema,
                     fpath + ": value does not match declared kind " + to_string(decl->kind));
            if (auto* ref = std::get_if<ObjectRef>(&value)) check_ref(ref->id, fpath);
            if (auto* arr = std::get_if<RefArray>(&value)) {
                for (std::size_t s = 0; s < arr->ids.size(); ++s)
                    if (arr->ids[s]) check_ref(*arr->ids[s], fpath + "[" + std::to_string(s) + "]");
            }
        }
    }

    for (const auto& [name, id] : snapshot.roots) {
        if (name.empty()) fail(ErrorCode::Schema, "roots: empty root name");
        check_ref(id, "roots." + name);
    }
}

}  // namespace ogo
