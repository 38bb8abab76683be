#ifndef ACSAN_REPORT_HPP
#define ACSAN_REPORT_HPP

// Text and JSON renderings of verdicts, compatibility reports and
// derivation trees.

#include "acsan/analysis.hpp"
#include "acsan/syntax.hpp"

#include <nlohmann/json.hpp>

#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace acsan {

using json = nlohmann::ordered_json;

inline std::string_view to_string(Justification::Kind k) {
    switch (k) {
    case Justification::Kind::Input: return "input";
    case Justification::Kind::Schema: return "schema";
    case Justification::Kind::Rule: return "rule";
    }
    return "?";
}

/// Rule label of a node: the rule or schema name, "input" for given facts.
inline std::string rule_label(const DerivationTree& t) {
    return t.kind == Justification::Kind::Input ? std::string("input") : t.rule;
}

inline json to_json(const DerivationTree& t) {
    json children = json::array();
    for (const auto& c : t.children) children.push_back(to_json(c));
    return json{{"fact", t.root.str()}, {"rule", rule_label(t)}, {"kind", to_string(t.kind)}, {"children", children}};
}

/// One tree for the whole query: the conjunct's own tree when there is a
/// single conjunct, otherwise a "query" node over all of them.
inline json derivation_json(const Verdict& v, const Query* q = nullptr) {
    if (v.derivations.empty()) return nullptr;
    if (v.derivations.size() == 1) return to_json(v.derivations.front());
    json children = json::array();
    for (const auto& d : v.derivations) children.push_back(to_json(d));
    return json{{"fact", q ? q->str() : std::string()}, {"rule", "query"}, {"kind", "query"}, {"children", children}};
}

inline json to_json(const Scenario& sc, const Verdict& v) {
    json layers = json::array();
    for (const auto& step : v.witness) {
        json inj = json::array();
        for (const auto& a : step.injected) inj.push_back(a.str());
        layers.push_back(json{{"events", sc.causality.names(step.events)}, {"injected_uknows", inj}});
    }
    json out{{"scenario", sc.name},
             {"mode", to_string(v.mode)},
             {"result", to_string(v.result)},
             {"layers", layers},
             {"derivation", derivation_json(v, sc.query ? &*sc.query : nullptr)},
             {"stats",
              {{"fixpoint_calls", v.stats.fixpoint_calls},
               {"sequences_explored", v.stats.sequences_explored},
               {"layers", v.stats.layers}}}};
    if (v.earliest_step) out["earliest_step"] = *v.earliest_step;
    return out;
}

inline json to_json(const Scenario& sc, const CompatReport& r) {
    json c1 = json::array(), c2 = json::array();
    for (const auto& v : r.comp1) {
        c1.push_back(json{{"fired", sc.events()[v.first].name},
                          {"affected", sc.events()[v.second].name},
                          {"layer", v.step},
                          {"enabled_before", v.enabled_before},
                          {"enabled_after", v.enabled_after}});
    }
    for (const auto& v : r.comp2)
        c2.push_back(json{{"event", sc.events()[v.event].name}, {"missing_guard", v.missing_guard.str()}});
    return json{{"comp1", {{"pass", r.comp1_pass()}, {"violations", c1}}},
                {"comp2", {{"pass", r.comp2_pass()}, {"violations", c2}}}};
}

inline json to_json(const Diagnostic& d) {
    return json{{"severity", d.severity == Diagnostic::Severity::error ? "error" : "warning"},
                {"code", d.code},
                {"message", d.message},
                {"origin", d.origin},
                {"line", d.location.line},
                {"column", d.location.column}};
}

namespace detail {

inline void render_tree(std::ostream& os, const DerivationTree& t, const std::string& indent, bool last, bool root) {
    os << indent;
    if (!root) os << (last ? "`- " : "|- ");
    os << t.root.str() << "  [" << rule_label(t) << "]\n";
    std::string child_indent = root ? indent : indent + (last ? "   " : "|  ");
    for (std::size_t i = 0; i < t.children.size(); ++i)
        render_tree(os, t.children[i], child_indent, i + 1 == t.children.size(), false);
}

} // namespace detail

inline std::string render_tree(const DerivationTree& t) {
    std::ostringstream os;
    detail::render_tree(os, t, "", true, true);
    return os.str();
}

/// Numbered derivation: every rule-derived fact gets a step number, listed
/// bottom-up, with premises cited by number or shown inline when given.
inline std::string render_steps(const DerivationTree& t) {
    std::ostringstream os;
    std::map<Atom, std::size_t> numbered;
    auto cite = [&](const DerivationTree& c) {
        auto it = numbered.find(c.root);
        if (it != numbered.end()) return "(" + std::to_string(it->second) + ")";
        return c.root.str() + (c.kind == Justification::Kind::Schema ? " {" + c.rule + "}" : " {input}");
    };
    auto walk = [&](auto&& self, const DerivationTree& n) -> void {
        if (n.kind != Justification::Kind::Rule || numbered.contains(n.root)) return;
        for (const auto& c : n.children) self(self, c);
        std::size_t k = numbered.size() + 1;
        numbered.emplace(n.root, k);
        os << "(" << k << ") " << n.root.str() << "\n      by " << n.rule;
        if (!n.binding.empty()) os << " with " << to_string(n.binding);
        os << '\n';
        for (const auto& c : n.children) os << "      from " << cite(c) << '\n';
    };
    walk(walk, t);
    if (numbered.empty()) os << t.root.str() << " {" << rule_label(t) << "}\n";
    return os.str();
}

inline std::string render_verdict(const Scenario& sc, const Verdict& v) {
    std::ostringstream os;
    os << sc.name << ": " << to_string(v.result) << " (" << to_string(v.mode) << ")\n";
    if (sc.query) os << "query: " << sc.query->str() << '\n';
    for (std::size_t i = 0; i < v.witness.size(); ++i) {
        const auto& step = v.witness[i];
        os << (v.mode == Verdict::Mode::partial_order ? "layer " : "step ") << i + 1 << ':';
        for (auto e : step.events) os << ' ' << sc.events()[e].name;
        os << '\n';
        for (const auto& a : step.injected) os << "  inject " << a.str() << '\n';
    }
    if (v.earliest_step) os << "query holds after step " << *v.earliest_step << '\n';
    os << "fixpoint calls: " << v.stats.fixpoint_calls << ", sequences explored: " << v.stats.sequences_explored
       << '\n';
    return os.str();
}

inline std::string render_compat(const Scenario& sc, const CompatReport& r) {
    std::ostringstream os;
    os << "COMP1: " << (r.comp1_pass() ? "pass" : "fail") << '\n';
    for (const auto& v : r.comp1) {
        os << "  firing " << sc.events()[v.first].name << " " << (v.enabled_after ? "enables " : "disables ")
           << sc.events()[v.second].name << " (layer " << v.step + 1 << ")\n";
    }
    os << "COMP2: " << (r.comp2_pass() ? "pass" : "fail") << '\n';
    for (const auto& v : r.comp2)
        os << "  " << sc.events()[v.event].name << " not enabled after its predecessors: " << v.missing_guard.str()
           << '\n';
    return os.str();
}

} // namespace acsan

#endif
