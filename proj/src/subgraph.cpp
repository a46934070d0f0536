#include "ogo/subgraph.hpp"

#include <algorithm>
#include <deque>
#include <unordered_map>
#include <unordered_set>

#include "ogo/error.hpp"

namespace ogo {

namespace {

// Lookup tables over a snapshot that is assumed valid.
class HeapIndex {
public:
    explicit HeapIndex(const HeapSnapshot& snapshot) : snapshot_(snapshot) {
        objects_.reserve(snapshot.objects.size());
        for (std::size_t i = 0; i < snapshot.objects.size(); ++i) {
            if (!objects_.emplace(snapshot.objects[i].id, i).second)
                fail(ErrorCode::DuplicateId,
                     "duplicate object id " + std::to_string(snapshot.objects[i].id));
        }
        for (const ClassInfo& c : snapshot.classes) classes_.emplace(c.name, &c);
    }

    const ObjectRecord* object(ObjectId id) const {
        auto it = objects_.find(id);
        return it == objects_.end() ? nullptr : &snapshot_.objects[it->second];
    }

    const ClassInfo* class_info(std::string_view name) const {
        auto it = classes_.find(std::string(name));
        return it == classes_.end() ? nullptr : it->second;
    }

    // Class and its superclasses, most derived first.
    std::vector<const ClassInfo*> chain(std::string_view name) const {
        std::vector<const ClassInfo*> out;
        std::unordered_set<const ClassInfo*> seen;
        for (const ClassInfo* c = class_info(name); c && seen.insert(c).second;
             c = c->superclass ? class_info(*c->superclass) : nullptr)
            out.push_back(c);
        return out;
    }

    template <typename Visit>
    void for_each_reference(const ObjectRecord& o, Visit&& visit) const {
        for (const auto& [name, value] : o.fields) {
            if (auto* ref = std::get_if<ObjectRef>(&value)) visit(ref->id);
            if (auto* arr = std::get_if<RefArray>(&value))
                for (const auto& slot : arr->ids)
                    if (slot) visit(*slot);
        }
        for (const ClassInfo* c : chain(o.class_name))
            for (const auto& [name, value] : c->statics)
                if (auto* ref = std::get_if<ObjectRef>(&value)) visit(ref->id);
    }

    std::unordered_set<ObjectId> reach(std::span<const ObjectId> starts) const {
        std::unordered_set<ObjectId> seen;
        std::deque<ObjectId> work;
        for (ObjectId s : starts) {
            if (!object(s)) fail(ErrorCode::UnknownRoot, "unknown root object " + std::to_string(s));
            if (seen.insert(s).second) work.push_back(s);
        }
        while (!work.empty()) {
            const ObjectRecord* o = object(work.front());
            work.pop_front();
            for_each_reference(*o, [&](ObjectId next) {
                if (object(next) && seen.insert(next).second) work.push_back(next);
            });
        }
        return seen;
    }

private:
    const HeapSnapshot& snapshot_;
    std::unordered_map<ObjectId, std::size_t> objects_;
    std::unordered_map<std::string, const ClassInfo*> classes_;
};

}  // namespace

UidAssignment assign_unique_ids(const HeapSnapshot& snapshot) {
    UidAssignment uids;
    for (const ObjectRecord& o : snapshot.objects) {
        if (!uids.emplace(o.id, o.id).second)
            fail(ErrorCode::DuplicateId, "duplicate object id " + std::to_string(o.id));
    }
    return uids;
}

HeapSnapshot collect(const HeapSnapshot& snapshot) {
    HeapIndex index(snapshot);
    std::vector<ObjectId> starts;
    for (const auto& [name, id] : snapshot.roots) starts.push_back(id);
    for (const ClassInfo& c : snapshot.classes)
        for (const auto& [name, value] : c.statics)
            if (auto* ref = std::get_if<ObjectRef>(&value)) starts.push_back(ref->id);
    auto live = index.reach(starts);

    HeapSnapshot out;
    out.classes = snapshot.classes;
    out.roots = snapshot.roots;
    for (const ObjectRecord& o : snapshot.objects)
        if (live.contains(o.id)) out.objects.push_back(o);
    return out;
}

std::set<ObjectId> follow_references(const HeapSnapshot& snapshot,
                                     std::span<const ObjectId> starts) {
    HeapIndex index(snapshot);
    auto seen = index.reach(starts);
    return {seen.begin(), seen.end()};
}

PropertyGraph extract(const HeapSnapshot& input, const ExtractionConfig& config,
                      ExtractionStats* stats) {
    for (const auto& c : config.whitelist)
        if (config.blacklist.contains(c))
            fail(ErrorCode::ConfigConflict, "class " + c + " is both whitelisted and blacklisted");

    HeapSnapshot collected;
    const HeapSnapshot* source = &input;
    if (config.force_collect) {
        collected = collect(input);
        source = &collected;
    }
    const HeapSnapshot& snapshot = *source;
    HeapIndex index(snapshot);
    for (ObjectId r : config.roots)
        if (!index.object(r)) {
            // A root removed by collection is still a valid (now empty) start
            // as long as it exists in the input snapshot.
            if (config.force_collect && input.find_object(r)) continue;
            fail(ErrorCode::UnknownRoot, "unknown root object " + std::to_string(r));
        }

    auto blacklisted = [&](const ObjectRecord& o) { return config.blacklist.contains(o.class_name); };

    // Candidate set.
    std::vector<const ObjectRecord*> included;
    std::size_t candidates = 0;
    if (config.roots.empty()) {
        candidates = snapshot.objects.size();
        for (const ObjectRecord& o : snapshot.objects)
            if (!blacklisted(o)) included.push_back(&o);
    } else {
        std::vector<ObjectId> starts;
        for (ObjectId r : config.roots)
            if (index.object(r)) starts.push_back(r);
        for (const ObjectRecord& o : snapshot.objects)
            if (config.whitelist.contains(o.class_name)) starts.push_back(o.id);
        auto reached = index.reach(starts);
        candidates = reached.size();
        for (ObjectId id : reached) {
            const ObjectRecord* o = index.object(id);
            if (!blacklisted(*o)) included.push_back(o);
        }
    }
    std::sort(included.begin(), included.end(),
              [](const ObjectRecord* a, const ObjectRecord* b) { return a->id < b->id; });

    PropertyGraph graph;
    std::unordered_map<ObjectId, NodeId> node_of;
    node_of.reserve(included.size());
    for (const ObjectRecord* o : included) {
        Properties props;
        for (const auto& [name, value] : o->fields)
            if (auto* p = std::get_if<PropertyValue>(&value)) props.emplace(name, *p);
        props.insert_or_assign(std::string(kUidKey), PropertyValue{o->id});
        node_of.emplace(o->id, graph.add_node(o->class_name, std::move(props)));
    }

    std::map<std::string, NodeId, std::less<>> class_nodes;
    std::vector<const ClassInfo*> class_order;
    auto class_node = [&](const std::string& name) {
        if (auto it = class_nodes.find(name); it != class_nodes.end()) return it->second;
        Properties props{{std::string(kClassNameKey), name}};
        const ClassInfo* info = index.class_info(name);
        if (info) {
            for (const auto& [key, value] : info->statics)
                if (auto* p = std::get_if<PropertyValue>(&value)) props.emplace(key, *p);
            class_order.push_back(info);
        }
        NodeId id = graph.add_node(std::string(kClassLabel), std::move(props));
        class_nodes.emplace(name, id);
        return id;
    };

    // Field declarations give reference arrays their element class.
    std::unordered_map<std::string, std::vector<FieldDecl>> layouts;
    auto array_label = [&](const ObjectRecord& o, const std::string& field) {
        auto [it, fresh] = layouts.try_emplace(o.class_name);
        if (fresh) it->second = all_fields(snapshot, o.class_name);
        for (const FieldDecl& d : it->second) {
            if (d.name != field) continue;
            if (d.type.size() >= 2 && d.type.ends_with("[]")) return d.type;
            return (d.type.empty() ? std::string("Object") : d.type) + "[]";
        }
        return std::string("Object[]");
    };

    for (const ObjectRecord* o : included) {
        NodeId self = node_of.at(o->id);
        for (const auto& [name, value] : o->fields) {
            if (auto* ref = std::get_if<ObjectRef>(&value)) {
                if (auto it = node_of.find(ref->id); it != node_of.end())
                    graph.add_relationship(name, self, it->second);
            } else if (auto* arr = std::get_if<RefArray>(&value)) {
                NodeId array = graph.add_node(array_label(*o, name));
                graph.add_relationship(name, self, array);
                for (std::size_t i = 0; i < arr->ids.size(); ++i) {
                    if (!arr->ids[i]) continue;
                    if (auto it = node_of.find(*arr->ids[i]); it != node_of.end())
                        graph.add_relationship(
                            std::string(kElementLabel), array, it->second,
                            {{std::string(kIndexKey), static_cast<std::int64_t>(i)}});
                }
            }
        }
        graph.add_relationship(std::string(kInstanceOfLabel), self, class_node(o->class_name));
    }

    for (const ClassInfo* c : class_order) {
        NodeId cls = class_nodes.at(c->name);
        for (const auto& [name, value] : c->statics) {
            if (auto* ref = std::get_if<ObjectRef>(&value))
                if (auto it = node_of.find(ref->id); it != node_of.end())
                    graph.add_relationship(name, cls, it->second);
        }
    }

    for (const auto& [name, id] : snapshot.roots) {
        auto it = node_of.find(id);
        if (it == node_of.end()) continue;
        NodeId binder = graph.add_node(std::string(kLocalLabel));
        graph.add_relationship(name, binder, it->second);
    }

    if (stats) {
        stats->candidate_objects = candidates;
        stats->emitted_objects = included.size();
    }
    return graph;
}

}  // namespace ogo
