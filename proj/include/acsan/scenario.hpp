#ifndef ACSAN_SCENARIO_HPP
#define ACSAN_SCENARIO_HPP

#include "acsan/order.hpp"
#include "acsan/transition.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace acsan {

/// Events L with declared pairs l1 < l2 (before closure).
struct CausalityRelation {
    std::vector<Event> events;
    std::vector<Arc> edges;

    Relation relation() const { return Relation(events.size(), edges); }

    std::size_t index_of(std::string_view name) const {
        for (std::size_t i = 0; i < events.size(); ++i)
            if (events[i].name == name) return i;
        throw UnknownEvent("unknown event " + std::string(name));
    }

    std::vector<std::string> names(const std::vector<std::size_t>& idx) const {
        std::vector<std::string> out;
        out.reserve(idx.size());
        for (auto i : idx) out.push_back(events.at(i).name);
        return out;
    }
};

/// Causality graph: the transitive reduction of the causality relation.
struct CausalityGraph {
    std::vector<Event> nodes;
    Relation arcs;
};

inline CausalityGraph causality_graph(const CausalityRelation& rel) {
    return CausalityGraph{rel.events, transitive_reduction(rel.relation())};
}

/// Scenario (C, L, <, G) plus policies and optional abduction hints.
struct Scenario {
    std::string name;
    Vocabulary vocab;
    PolicySet policies;
    CausalityRelation causality;
    /// Explicit uknows facts to inject for an event instead of the default.
    std::map<std::size_t, UknowsBatch> hints;
    std::optional<Query> query;

    const std::vector<Event>& events() const noexcept { return causality.events; }

    Relation closed_order() const { return transitive_closure(causality.relation()); }

    const UknowsBatch* hint_for(std::size_t event) const {
        auto it = hints.find(event);
        return it == hints.end() ? nullptr : &it->second;
    }
};

} // namespace acsan

#endif
