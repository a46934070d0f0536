#include "ogo/snapshot_io.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <unordered_map>

#include "json.hpp"

#include "ogo/error.hpp"

namespace ogo {

using nlohmann::json;

namespace {

[[noreturn]] void schema(const std::string& path, const std::string& msg) {
    fail(ErrorCode::Schema, path + ": " + msg);
}

// ---- PropertyValue <-> JSON ------------------------------------------------

json scalar_json(double d) {
    if (!std::isfinite(d)) fail(ErrorCode::InvalidArgument, "non-finite float cannot be serialized");
    return d;
}

json value_to_json(const PropertyValue& v) {
    return std::visit(
        [](const auto& x) -> json {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, double>) {
                return scalar_json(x);
            } else if constexpr (std::is_same_v<T, PrimitiveList>) {
                return std::visit(
                    [](const auto& vec) {
                        json arr = json::array();
                        for (const auto& e : vec) {
                            if constexpr (std::is_same_v<std::decay_t<decltype(vec)>, std::vector<double>>)
                                arr.push_back(scalar_json(e));
                            else
                                arr.push_back(static_cast<std::decay_t<decltype(vec)>::value_type>(e));
                        }
                        return arr;
                    },
                    x);
            } else {
                return x;
            }
        },
        v);
}

std::optional<PropertyValue> scalar_from_json(const json& j, const std::string& path) {
    switch (j.type()) {
    case json::value_t::number_integer: return PropertyValue{j.get<std::int64_t>()};
    case json::value_t::number_unsigned: {
        auto u = j.get<std::uint64_t>();
        if (u > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max()))
            schema(path, "integer out of range");
        return PropertyValue{static_cast<std::int64_t>(u)};
    }
    case json::value_t::number_float: return PropertyValue{j.get<double>()};
    case json::value_t::boolean: return PropertyValue{j.get<bool>()};
    case json::value_t::string: return PropertyValue{j.get<std::string>()};
    default: return std::nullopt;
    }
}

PropertyValue list_from_json(const json& arr, const std::string& path) {
    if (arr.empty()) return PrimitiveList{std::vector<std::int64_t>{}};
    std::vector<PropertyValue> items;
    for (std::size_t i = 0; i < arr.size(); ++i) {
        auto v = scalar_from_json(arr[i], path + "[" + std::to_string(i) + "]");
        if (!v) schema(path + "[" + std::to_string(i) + "]", "array elements must be primitives");
        if (!items.empty() && v->index() != items.front().index())
            schema(path + "[" + std::to_string(i) + "]", "array elements must share one type");
        items.push_back(std::move(*v));
    }
    return std::visit(
        [&](const auto& first) -> PropertyValue {
            using T = std::decay_t<decltype(first)>;
            if constexpr (std::is_same_v<T, PrimitiveList>) {
                schema(path, "nested arrays are not primitives");
            } else {
                std::vector<T> out;
                out.reserve(items.size());
                for (auto& it : items) out.push_back(std::get<T>(std::move(it)));
                return PrimitiveList{std::move(out)};
            }
        },
        items.front());
}

PropertyValue property_from_json(const json& j, const std::string& path) {
    if (j.is_array()) return list_from_json(j, path);
    auto v = scalar_from_json(j, path);
    if (!v) schema(path, "expected a primitive value");
    return *v;
}

ObjectId id_from_json(const json& j, const std::string& path) {
    if (j.is_number_integer() && !j.is_number_unsigned()) return j.get<std::int64_t>();
    if (j.is_number_unsigned()) {
        auto u = j.get<std::uint64_t>();
        if (u > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max()))
            schema(path, "id out of range");
        return static_cast<ObjectId>(u);
    }
    schema(path, "expected an integer object id");
}

// Returns nullopt for JSON null (an omitted field).
std::optional<FieldValue> field_from_json(const json& j, const std::string& path) {
    if (j.is_null()) return std::nullopt;
    if (j.is_object()) {
        if (j.size() == 1 && j.contains("ref")) return FieldValue{ObjectRef{id_from_json(j["ref"], path + ".ref")}};
        if (j.size() == 1 && j.contains("refs")) {
            const json& slots = j["refs"];
            if (!slots.is_array()) schema(path + ".refs", "expected an array");
            RefArray arr;
            for (std::size_t i = 0; i < slots.size(); ++i) {
                if (slots[i].is_null())
                    arr.ids.emplace_back(std::nullopt);
                else
                    arr.ids.emplace_back(id_from_json(slots[i], path + ".refs[" + std::to_string(i) + "]"));
            }
            return FieldValue{std::move(arr)};
        }
        schema(path, "expected {\"ref\": id} or {\"refs\": [...]}");
    }
    return FieldValue{property_from_json(j, path)};
}

const json& member(const json& obj, const char* key, const std::string& path) {
    auto it = obj.find(key);
    if (it == obj.end()) schema(path, std::string("missing \"") + key + "\"");
    return *it;
}

std::string string_member(const json& obj, const char* key, const std::string& path) {
    const json& v = member(obj, key, path);
    if (!v.is_string()) schema(path + "." + key, "expected a string");
    return v.get<std::string>();
}

void only_keys(const json& obj, std::initializer_list<std::string_view> keys, const std::string& path) {
    for (const auto& [k, v] : obj.items())
        if (std::find(keys.begin(), keys.end(), k) == keys.end()) schema(path, "unexpected key \"" + k + "\"");
}

ClassInfo class_from_json(const json& j, const std::string& path) {
    if (!j.is_object()) schema(path, "expected an object");
    only_keys(j, {"name", "superclass", "fields", "statics"}, path);
    ClassInfo c;
    c.name = string_member(j, "name", path);
    if (auto it = j.find("superclass"); it != j.end() && !it->is_null()) {
        if (!it->is_string()) schema(path + ".superclass", "expected a string");
        c.superclass = it->get<std::string>();
    }
    if (auto it = j.find("fields"); it != j.end()) {
        if (!it->is_array()) schema(path + ".fields", "expected an array");
        for (std::size_t i = 0; i < it->size(); ++i) {
            const json& f = (*it)[i];
            const std::string fpath = path + ".fields[" + std::to_string(i) + "]";
            if (!f.is_object()) schema(fpath, "expected an object");
            only_keys(f, {"name", "kind", "type"}, fpath);
            FieldDecl d;
            d.name = string_member(f, "name", fpath);
            auto kind = parse_field_kind(string_member(f, "kind", fpath));
            if (!kind) schema(fpath + ".kind", "unknown field kind");
            d.kind = *kind;
            if (f.contains("type")) d.type = string_member(f, "type", fpath);
            c.fields.push_back(std::move(d));
        }
    }
    if (auto it = j.find("statics"); it != j.end() && !it->is_null()) {
        if (!it->is_object()) schema(path + ".statics", "expected an object");
        for (const auto& [name, v] : it->items()) {
            const std::string spath = path + ".statics." + name;
            auto value = field_from_json(v, spath);
            if (!value) continue;
            if (std::holds_alternative<RefArray>(*value))
                schema(spath, "static reference arrays are not supported");
            if (auto* ref = std::get_if<ObjectRef>(&*value))
                c.statics.emplace(name, *ref);
            else
                c.statics.emplace(name, std::get<PropertyValue>(*value));
        }
    }
    return c;
}

json field_to_json(const FieldValue& v) {
    if (auto* p = std::get_if<PropertyValue>(&v)) return value_to_json(*p);
    if (auto* r = std::get_if<ObjectRef>(&v)) return json{{"ref", r->id}};
    json slots = json::array();
    for (const auto& s : std::get<RefArray>(v).ids) slots.push_back(s ? json(*s) : json(nullptr));
    return json{{"refs", std::move(slots)}};
}

json parse_json(std::string_view text, const char* what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        fail(ErrorCode::Schema, std::string(what) + ": " + e.what());
    }
}

// ---- CSV ------------------------------------------------------------------

void csv_field(std::string& out, std::string_view f) {
    if (f.find_first_of(",\"\n\r") == std::string_view::npos) {
        out += f;
        return;
    }
    out += '"';
    for (char c : f) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
}

void csv_record(std::string& out, std::initializer_list<std::string_view> fields) {
    bool first = true;
    for (auto f : fields) {
        if (!first) out += ',';
        first = false;
        csv_field(out, f);
    }
    out += '\n';
}

std::vector<std::vector<std::string>> parse_csv(std::string_view text, const char* file) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    std::size_t line = 1;
    std::size_t i = 0;
    auto malformed = [&](const std::string& msg) {
        fail(ErrorCode::MalformedCsv, std::string(file) + " line " + std::to_string(line) + ": " + msg);
    };
    while (i < text.size()) {
        char c = text[i];
        if (c == '"' && field.empty()) {
            ++i;
            for (;;) {
                if (i >= text.size()) malformed("unterminated quoted field");
                char q = text[i++];
                if (q == '"') {
                    if (i < text.size() && text[i] == '"') {
                        field += '"';
                        ++i;
                    } else {
                        break;
                    }
                } else {
                    if (q == '\n') ++line;
                    field += q;
                }
            }
            if (i < text.size() && text[i] != ',' && text[i] != '\n' && text[i] != '\r')
                malformed("text after closing quote");
            continue;
        }
        if (c == '"') malformed("quote inside unquoted field");
        if (c == ',') {
            record.push_back(std::move(field));
            field.clear();
            ++i;
            continue;
        }
        if (c == '\r' || c == '\n') {
            if (c == '\r') {
                if (i + 1 >= text.size() || text[i + 1] != '\n') malformed("bare carriage return");
                ++i;
            }
            ++i;
            record.push_back(std::move(field));
            field.clear();
            records.push_back(std::move(record));
            record.clear();
            ++line;
            continue;
        }
        field += c;
        ++i;
    }
    if (!field.empty() || !record.empty()) {
        record.push_back(std::move(field));
        records.push_back(std::move(record));
    }
    return records;
}

}  // namespace

// ---- snapshots ------------------------------------------------------------

HeapSnapshot load_snapshot(std::string_view json_text) {
    json doc = parse_json(json_text, "snapshot");
    if (!doc.is_object()) schema("$", "expected an object");
    only_keys(doc, {"classes", "objects", "roots"}, "$");

    HeapSnapshot s;
    {
        const json& classes = member(doc, "classes", "$");
        if (!classes.is_array()) schema("classes", "expected an array");
        for (std::size_t i = 0; i < classes.size(); ++i)
            s.classes.push_back(class_from_json(classes[i], "classes[" + std::to_string(i) + "]"));
    }
    {
        const json* it = &member(doc, "objects", "$");
        if (!it->is_array()) schema("objects", "expected an array");
        for (std::size_t i = 0; i < it->size(); ++i) {
            const json& o = (*it)[i];
            const std::string path = "objects[" + std::to_string(i) + "]";
            if (!o.is_object()) schema(path, "expected an object");
            only_keys(o, {"id", "class", "fields"}, path);
            ObjectRecord rec;
            rec.id = id_from_json(member(o, "id", path), path + ".id");
            rec.class_name = string_member(o, "class", path);
            if (auto f = o.find("fields"); f != o.end()) {
                if (!f->is_object()) schema(path + ".fields", "expected an object");
                for (const auto& [name, v] : f->items())
                    if (auto value = field_from_json(v, path + ".fields." + name))
                        rec.fields.emplace(name, std::move(*value));
            }
            s.objects.push_back(std::move(rec));
        }
    }
    {
        const json* it = &member(doc, "roots", "$");
        if (!it->is_object()) schema("roots", "expected an object");
        for (const auto& [name, v] : it->items()) s.roots.emplace(name, id_from_json(v, "roots." + name));
    }
    validate_snapshot(s);
    return s;
}

std::string save_snapshot(const HeapSnapshot& s, int indent) {
    json doc;
    json classes = json::array();
    for (const ClassInfo& c : s.classes) {
        json jc{{"name", c.name}};
        if (c.superclass) jc["superclass"] = *c.superclass;
        json fields = json::array();
        for (const FieldDecl& d : c.fields)
            fields.push_back(json{{"name", d.name}, {"kind", to_string(d.kind)}, {"type", d.type}});
        jc["fields"] = std::move(fields);
        if (!c.statics.empty()) {
            json statics = json::object();
            for (const auto& [name, v] : c.statics) {
                if (auto* r = std::get_if<ObjectRef>(&v))
                    statics[name] = json{{"ref", r->id}};
                else
                    statics[name] = value_to_json(std::get<PropertyValue>(v));
            }
            jc["statics"] = std::move(statics);
        }
        classes.push_back(std::move(jc));
    }
    json objects = json::array();
    for (const ObjectRecord& o : s.objects) {
        json fields = json::object();
        for (const auto& [name, v] : o.fields) fields[name] = field_to_json(v);
        objects.push_back(json{{"id", o.id}, {"class", o.class_name}, {"fields", std::move(fields)}});
    }
    json roots = json::object();
    for (const auto& [name, id] : s.roots) roots[name] = id;
    doc["classes"] = std::move(classes);
    doc["objects"] = std::move(objects);
    doc["roots"] = std::move(roots);
    return doc.dump(indent);
}

namespace {

bool is_array_label(std::string_view label) {
    return label.size() > 2 && label.ends_with("[]");
}

std::string primitive_type_name(const PropertyValue& v) {
    return std::visit(
        [](const auto& x) -> std::string {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, std::int64_t>) return "int";
            else if constexpr (std::is_same_v<T, double>) return "double";
            else if constexpr (std::is_same_v<T, bool>) return "boolean";
            else if constexpr (std::is_same_v<T, std::string>) return "String";
            else
                return std::visit(
                    [](const auto& vec) -> std::string {
                        using E = typename std::decay_t<decltype(vec)>::value_type;
                        if constexpr (std::is_same_v<E, std::int64_t>) return "int[]";
                        else if constexpr (std::is_same_v<E, double>) return "double[]";
                        else if constexpr (std::is_same_v<E, bool>) return "boolean[]";
                        else return "String[]";
                    },
                    x);
        },
        v);
}

[[noreturn]] void not_shaped(const std::string& msg) { fail(ErrorCode::NotSnapshotShaped, msg); }

}  // namespace

HeapSnapshot graph_to_snapshot(const PropertyGraph& graph) {
    enum class Role { Instance, Binder, ClassMeta, Array };
    std::vector<Role> role(graph.node_count(), Role::Instance);
    for (const Node& n : graph.nodes()) {
        if (n.label == kLocalLabel) role[index_of(n.id)] = Role::Binder;
        else if (n.label == kClassLabel) role[index_of(n.id)] = Role::ClassMeta;
        else if (is_array_label(n.label) && !n.properties.contains(kUidKey)) role[index_of(n.id)] = Role::Array;
    }

    // Object ids.
    std::vector<ObjectId> oid(graph.node_count(), 0);
    ObjectId next = 0;
    for (const Node& n : graph.nodes()) {
        if (role[index_of(n.id)] != Role::Instance) continue;
        if (auto it = n.properties.find(kUidKey); it != n.properties.end())
            next = std::max(next, std::get<std::int64_t>(it->second) + 1);
    }
    std::unordered_map<ObjectId, NodeId> seen_ids;
    for (const Node& n : graph.nodes()) {
        if (role[index_of(n.id)] != Role::Instance) continue;
        auto it = n.properties.find(kUidKey);
        ObjectId id = it != n.properties.end() ? std::get<std::int64_t>(it->second) : next++;
        if (!seen_ids.emplace(id, n.id).second)
            not_shaped("two nodes share $uid " + std::to_string(id));
        oid[index_of(n.id)] = id;
    }

    // Class declarations, in order of first appearance.
    std::vector<ClassInfo> classes;
    std::unordered_map<std::string, std::size_t> class_index;
    auto class_for = [&](const std::string& name) -> ClassInfo& {
        auto [it, fresh] = class_index.try_emplace(name, classes.size());
        if (fresh) classes.push_back(ClassInfo{name, std::nullopt, {}, {}});
        return classes[it->second];
    };
    auto declare = [&](ClassInfo& c, const std::string& field, FieldKind kind, const std::string& type) {
        for (FieldDecl& d : c.fields) {
            if (d.name != field) continue;
            if (d.kind != kind)
                not_shaped("field " + c.name + "." + field + " used with different kinds");
            if (d.type != type && kind == FieldKind::Reference) d.type = "Object";
            return;
        }
        c.fields.push_back(FieldDecl{field, kind, type});
    };

    HeapSnapshot s;
    std::map<std::string, RelId> root_rel;

    for (const Node& n : graph.nodes()) {
        const Role r = role[index_of(n.id)];
        std::set<std::string> labels_out;
        for (RelId rid : graph.outgoing(n.id)) {
            const Relationship& rel = graph.relationship(rid);
            const bool field_edge = !(r == Role::Array && rel.label == kElementLabel) &&
                                    !(r == Role::Instance && rel.label == kInstanceOfLabel);
            if (field_edge && !labels_out.insert(rel.label).second)
                not_shaped("node " + std::to_string(index_of(n.id)) + " has two `" + rel.label + "` edges");
        }

        if (r == Role::Binder) {
            for (RelId rid : graph.outgoing(n.id)) {
                const Relationship& rel = graph.relationship(rid);
                if (role[index_of(rel.end)] != Role::Instance)
                    not_shaped("binding `" + rel.label + "` does not point at an instance");
                auto [it, fresh] = root_rel.try_emplace(rel.label, rid);
                if (!fresh && index_of(it->second) < index_of(rid)) it->second = rid;
            }
            continue;
        }
        if (r == Role::ClassMeta) {
            const auto& name = std::get<std::string>(n.properties.at(std::string(kClassNameKey)));
            ClassInfo& c = class_for(name);
            for (const auto& [key, v] : n.properties)
                if (key != kClassNameKey) c.statics.insert_or_assign(key, v);
            for (RelId rid : graph.outgoing(n.id)) {
                const Relationship& rel = graph.relationship(rid);
                if (role[index_of(rel.end)] != Role::Instance)
                    not_shaped("static `" + rel.label + "` of " + name + " does not point at an instance");
                c.statics.insert_or_assign(rel.label, ObjectRef{oid[index_of(rel.end)]});
            }
            continue;
        }
        if (r == Role::Array) {
            for (RelId rid : graph.outgoing(n.id))
                if (graph.relationship(rid).label != kElementLabel)
                    not_shaped("array node " + std::to_string(index_of(n.id)) + " has a non-element edge");
            continue;
        }

        // Instance.
        std::optional<std::string> class_name;
        for (RelId rid : graph.outgoing(n.id)) {
            const Relationship& rel = graph.relationship(rid);
            if (rel.label != kInstanceOfLabel) continue;
            const Node& meta = graph.node(rel.end);
            if (meta.label != kClassLabel) not_shaped("instanceof edge must point at a Class node");
            const auto& cname = std::get<std::string>(meta.properties.at(std::string(kClassNameKey)));
            if (class_name && *class_name != cname) not_shaped("object has two classes");
            class_name = cname;
        }
        if (class_name && *class_name != n.label)
            not_shaped("node label " + n.label + " disagrees with its class " + *class_name);
        ClassInfo& cls = class_for(n.label);

        ObjectRecord rec;
        rec.id = oid[index_of(n.id)];
        rec.class_name = n.label;
        for (const auto& [key, v] : n.properties) {
            if (key == kUidKey) continue;
            declare(cls, key,
                    std::holds_alternative<PrimitiveList>(v) ? FieldKind::PrimitiveArray : FieldKind::Primitive,
                    primitive_type_name(v));
            rec.fields.emplace(key, v);
        }
        for (RelId rid : graph.outgoing(n.id)) {
            const Relationship& rel = graph.relationship(rid);
            if (rel.label == kInstanceOfLabel) continue;
            if (rec.fields.contains(rel.label))
                not_shaped("field " + rel.label + " is both a property and an edge");
            const Node& target = graph.node(rel.end);
            switch (role[index_of(rel.end)]) {
            case Role::Instance:
                declare(cls, rel.label, FieldKind::Reference, target.label);
                rec.fields.emplace(rel.label, ObjectRef{oid[index_of(rel.end)]});
                break;
            case Role::Array: {
                RefArray arr;
                for (RelId eid : graph.outgoing(rel.end)) {
                    const Relationship& e = graph.relationship(eid);
                    auto idx = e.properties.find(kIndexKey);
                    if (idx == e.properties.end() || !std::holds_alternative<std::int64_t>(idx->second) ||
                        std::get<std::int64_t>(idx->second) < 0)
                        not_shaped("element edge without a non-negative integer index");
                    if (role[index_of(e.end)] != Role::Instance)
                        not_shaped("array element is not an instance");
                    auto slot = static_cast<std::size_t>(std::get<std::int64_t>(idx->second));
                    if (arr.ids.size() <= slot) arr.ids.resize(slot + 1);
                    if (arr.ids[slot]) not_shaped("two elements share index " + std::to_string(slot));
                    arr.ids[slot] = oid[index_of(e.end)];
                }
                declare(cls, rel.label, FieldKind::ReferenceArray,
                        target.label.substr(0, target.label.size() - 2));
                rec.fields.emplace(rel.label, std::move(arr));
                break;
            }
            default: not_shaped("field `" + rel.label + "` points at a " + target.label + " node");
            }
        }
        s.objects.push_back(std::move(rec));
    }

    for (const auto& [name, rid] : root_rel) s.roots.emplace(name, oid[index_of(graph.relationship(rid).end)]);
    s.classes = std::move(classes);
    std::sort(s.objects.begin(), s.objects.end(),
              [](const ObjectRecord& a, const ObjectRecord& b) { return a.id < b.id; });
    validate_snapshot(s);
    return s;
}

// ---- CSV ------------------------------------------------------------------

std::string properties_to_json(const Properties& properties) {
    json obj = json::object();
    for (const auto& [k, v] : properties) obj[k] = value_to_json(v);
    return obj.dump();
}

Properties properties_from_json(std::string_view text) {
    json obj = parse_json(text, "properties");
    if (!obj.is_object()) fail(ErrorCode::MalformedCsv, "property column must hold a JSON object");
    Properties props;
    try {
        for (const auto& [k, v] : obj.items()) props.emplace(k, property_from_json(v, k));
    } catch (const Error& e) {
        fail(ErrorCode::MalformedCsv, std::string("property column: ") + e.what());
    }
    return props;
}

CsvBundle export_csv(const PropertyGraph& graph) {
    CsvBundle b;
    b.nodes.append(kNodesHeader).push_back('\n');
    for (const Node& n : graph.nodes())
        csv_record(b.nodes, {std::to_string(index_of(n.id)), n.label, properties_to_json(n.properties)});
    b.relationships.append(kRelationshipsHeader).push_back('\n');
    for (RelId id : graph.relationship_ids()) {
        const Relationship& r = graph.relationship(id);
        csv_record(b.relationships, {std::to_string(index_of(r.start)), std::to_string(index_of(r.end)),
                                     r.label, properties_to_json(r.properties)});
    }
    return b;
}

PropertyGraph import_csv(const CsvBundle& bundle) {
    auto nodes = parse_csv(bundle.nodes, "nodes");
    auto rels = parse_csv(bundle.relationships, "relationships");
    auto check_header = [](const auto& records, std::string_view expected, const char* file) {
        if (records.empty()) fail(ErrorCode::MalformedCsv, std::string(file) + ": missing header");
        std::string got;
        for (std::size_t i = 0; i < records[0].size(); ++i) got += (i ? "," : "") + records[0][i];
        if (got != expected)
            fail(ErrorCode::MalformedCsv, std::string(file) + ": unknown header `" + got + "`");
    };
    check_header(nodes, kNodesHeader, "nodes");
    check_header(rels, kRelationshipsHeader, "relationships");

    PropertyGraph g;
    std::unordered_map<std::string, NodeId> ids;
    for (std::size_t i = 1; i < nodes.size(); ++i) {
        const auto& rec = nodes[i];
        if (rec.size() != 3)
            fail(ErrorCode::MalformedCsv, "nodes record " + std::to_string(i) + ": expected 3 fields");
        if (ids.contains(rec[0]))
            fail(ErrorCode::MalformedCsv, "nodes record " + std::to_string(i) + ": duplicate id " + rec[0]);
        NodeId id;
        try {
            id = g.add_node(rec[1], properties_from_json(rec[2]));
        } catch (const Error& e) {
            if (e.code() == ErrorCode::MalformedCsv) throw;
            fail(ErrorCode::MalformedCsv, "nodes record " + std::to_string(i) + ": " + e.what());
        }
        ids.emplace(rec[0], id);
    }
    for (std::size_t i = 1; i < rels.size(); ++i) {
        const auto& rec = rels[i];
        if (rec.size() != 4)
            fail(ErrorCode::MalformedCsv, "relationships record " + std::to_string(i) + ": expected 4 fields");
        auto start = ids.find(rec[0]);
        auto end = ids.find(rec[1]);
        if (start == ids.end() || end == ids.end())
            fail(ErrorCode::MalformedCsv, "relationships record " + std::to_string(i) + ": dangling endpoint " +
                                              (start == ids.end() ? rec[0] : rec[1]));
        try {
            g.add_relationship(rec[2], start->second, end->second, properties_from_json(rec[3]));
        } catch (const Error& e) {
            if (e.code() == ErrorCode::MalformedCsv) throw;
            fail(ErrorCode::MalformedCsv, "relationships record " + std::to_string(i) + ": " + e.what());
        }
    }
    return g;
}

}  // namespace ogo
