#ifndef ACSAN_TERMS_HPP
#define ACSAN_TERMS_HPP

// Sorted term algebra: Principal, Attribute, Infon and Speech terms built
// from declared constants and the four constructors a2i, s2i, said, tdOn.
// Equality is syntactic; terms are immutable and cheap to copy.

#include "acsan/error.hpp"

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace acsan {

enum class Sort : std::uint8_t { Principal, Attribute, Infon, Speech };

inline std::string_view to_string(Sort s) {
    switch (s) {
    case Sort::Principal: return "Principal";
    case Sort::Attribute: return "Attribute";
    case Sort::Infon: return "Infon";
    case Sort::Speech: return "Speech";
    }
    return "?";
}

enum class Constructor : std::uint8_t { a2i, s2i, said, tdOn };

inline std::string_view to_string(Constructor c) {
    switch (c) {
    case Constructor::a2i: return "a2i";
    case Constructor::s2i: return "s2i";
    case Constructor::said: return "said";
    case Constructor::tdOn: return "tdOn";
    }
    return "?";
}

struct Signature {
    Sort result;
    std::vector<Sort> params;
};

/// Signature of a constructor, fixed by the substrate theory.
inline const Signature& signature_of(Constructor c) {
    static const Signature a2i{Sort::Infon, {Sort::Principal, Sort::Attribute}};
    static const Signature s2i{Sort::Infon, {Sort::Principal, Sort::Speech}};
    static const Signature said{Sort::Speech, {Sort::Infon}};
    static const Signature tdOn{Sort::Attribute, {Sort::Infon}};
    switch (c) {
    case Constructor::a2i: return a2i;
    case Constructor::s2i: return s2i;
    case Constructor::said: return said;
    case Constructor::tdOn: return tdOn;
    }
    return a2i;
}

inline std::optional<Constructor> constructor_from_name(std::string_view name) {
    if (name == "a2i") return Constructor::a2i;
    if (name == "s2i") return Constructor::s2i;
    if (name == "said") return Constructor::said;
    if (name == "tdOn") return Constructor::tdOn;
    return std::nullopt;
}

struct Variable {
    std::string name;
    Sort sort;

    friend auto operator<=>(const Variable&, const Variable&) = default;
    friend bool operator==(const Variable&, const Variable&) = default;
};

class Term;
using Substitution = std::map<Variable, Term>;

class Term {
public:
    enum class Kind : std::uint8_t { Const, Var, App };

    static Term constant(std::string name, Sort sort) {
        return Term(std::make_shared<const Node>(Node{Kind::Const, sort, Constructor::a2i, std::move(name), {}, true}));
    }

    static Term variable(std::string name, Sort sort) {
        return Term(std::make_shared<const Node>(Node{Kind::Var, sort, Constructor::a2i, std::move(name), {}, false}));
    }

    static Term variable(const Variable& v) { return variable(v.name, v.sort); }

    /// Builds ctor(args...), checking arity and argument sorts.
    static Term apply(Constructor ctor, std::vector<Term> args) {
        const Signature& sig = signature_of(ctor);
        if (args.size() != sig.params.size()) {
            throw ArityError(std::string(to_string(ctor)) + " expects " + std::to_string(sig.params.size()) +
                             " argument(s), got " + std::to_string(args.size()));
        }
        bool ground = true;
        for (std::size_t i = 0; i < args.size(); ++i) {
            if (args[i].sort() != sig.params[i]) {
                throw SortError(std::string(to_string(ctor)) + " argument " + std::to_string(i + 1) + " must be " +
                                std::string(to_string(sig.params[i])) + ", got " +
                                std::string(to_string(args[i].sort())) + " term " + args[i].str());
            }
            ground = ground && args[i].is_ground();
        }
        return Term(std::make_shared<const Node>(Node{Kind::App, sig.result, ctor, {}, std::move(args), ground}));
    }

    Kind kind() const noexcept { return node_->kind; }
    Sort sort() const noexcept { return node_->sort; }
    bool is_const() const noexcept { return node_->kind == Kind::Const; }
    bool is_var() const noexcept { return node_->kind == Kind::Var; }
    bool is_app() const noexcept { return node_->kind == Kind::App; }
    bool is_ground() const noexcept { return node_->ground; }

    /// Name of a constant or variable.
    const std::string& name() const noexcept { return node_->name; }
    Constructor ctor() const noexcept { return node_->ctor; }
    std::span<const Term> args() const noexcept { return node_->args; }

    Variable as_variable() const { return Variable{node_->name, node_->sort}; }

    std::string str() const {
        std::string out;
        print(out);
        return out;
    }

    void print(std::string& out) const {
        if (!is_app()) {
            out += node_->name;
            return;
        }
        out += to_string(node_->ctor);
        out += '(';
        for (std::size_t i = 0; i < node_->args.size(); ++i) {
            if (i) out += ", ";
            node_->args[i].print(out);
        }
        out += ')';
    }

    friend std::strong_ordering operator<=>(const Term& a, const Term& b) { return compare(a, b); }
    friend bool operator==(const Term& a, const Term& b) { return compare(a, b) == 0; }

private:
    struct Node {
        Kind kind;
        Sort sort;
        Constructor ctor;
        std::string name;
        std::vector<Term> args;
        bool ground;
    };

    explicit Term(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

    static std::strong_ordering compare(const Term& a, const Term& b) {
        if (a.node_ == b.node_) return std::strong_ordering::equal;
        const Node& x = *a.node_;
        const Node& y = *b.node_;
        if (auto c = x.kind <=> y.kind; c != 0) return c;
        if (auto c = x.sort <=> y.sort; c != 0) return c;
        if (x.kind != Kind::App) return x.name <=> y.name;
        if (auto c = x.ctor <=> y.ctor; c != 0) return c;
        // same constructor implies same arity
        for (std::size_t i = 0; i < x.args.size(); ++i) {
            if (auto c = compare(x.args[i], y.args[i]); c != 0) return c;
        }
        return std::strong_ordering::equal;
    }

    std::shared_ptr<const Node> node_;
};

/// Builds a constructor application; thin alias of Term::apply for call sites
/// that read better as free functions.
inline Term mk_term(Constructor ctor, std::vector<Term> args) { return Term::apply(ctor, std::move(args)); }

inline Term a2i(Term p, Term a) { return Term::apply(Constructor::a2i, {std::move(p), std::move(a)}); }
inline Term s2i(Term p, Term s) { return Term::apply(Constructor::s2i, {std::move(p), std::move(s)}); }
inline Term said(Term x) { return Term::apply(Constructor::said, {std::move(x)}); }
inline Term tdOn(Term x) { return Term::apply(Constructor::tdOn, {std::move(x)}); }

/// Declared constants of one scenario: the principal universe C and the
/// primitive attributes.
class Vocabulary {
public:
    Vocabulary() = default;
    Vocabulary(std::vector<std::string> principals, std::vector<std::string> attributes) {
        for (auto& p : principals) add_principal(std::move(p));
        for (auto& a : attributes) add_attribute(std::move(a));
    }

    Term add_principal(std::string name) {
        principals_.push_back(Term::constant(name, Sort::Principal));
        return principals_.back();
    }

    Term add_attribute(std::string name) {
        attributes_.push_back(Term::constant(name, Sort::Attribute));
        return attributes_.back();
    }

    const std::vector<Term>& principals() const noexcept { return principals_; }
    const std::vector<Term>& attributes() const noexcept { return attributes_; }

    std::optional<Term> lookup(std::string_view name) const {
        for (const auto& t : principals_)
            if (t.name() == name) return t;
        for (const auto& t : attributes_)
            if (t.name() == name) return t;
        return std::nullopt;
    }

    Term principal(std::string_view name) const {
        for (const auto& t : principals_)
            if (t.name() == name) return t;
        throw SortError("undeclared principal " + std::string(name));
    }

    Term attribute(std::string_view name) const {
        for (const auto& t : attributes_)
            if (t.name() == name) return t;
        throw SortError("undeclared attribute " + std::string(name));
    }

    /// prim(a): true iff `a` is a declared attribute constant. tdOn-rooted
    /// attributes are never primitive.
    bool is_prim(const Term& a) const {
        if (a.sort() != Sort::Attribute) {
            throw SortError("prim expects an Attribute term, got " + std::string(to_string(a.sort())) + " term " +
                            a.str());
        }
        if (!a.is_const()) return false;
        for (const auto& t : attributes_)
            if (t == a) return true;
        return false;
    }

private:
    std::vector<Term> principals_;
    std::vector<Term> attributes_;
};

inline Term substitute(const Term& t, const Substitution& sigma) {
    if (t.is_ground()) return t;
    if (t.is_var()) {
        auto it = sigma.find(t.as_variable());
        return it == sigma.end() ? t : it->second;
    }
    std::vector<Term> args;
    args.reserve(t.args().size());
    for (const auto& a : t.args()) args.push_back(substitute(a, sigma));
    return Term::apply(t.ctor(), std::move(args));
}

/// One-sided matching of `pattern` against the ground `target`, extending
/// `sigma`. Returns false (leaving `sigma` partially extended) on clash.
inline bool match_into(const Term& pattern, const Term& target, Substitution& sigma) {
    if (pattern.sort() != target.sort()) return false;
    switch (pattern.kind()) {
    case Term::Kind::Var: {
        auto [it, inserted] = sigma.try_emplace(pattern.as_variable(), target);
        return inserted || it->second == target;
    }
    case Term::Kind::Const:
        return pattern == target;
    case Term::Kind::App: {
        if (!target.is_app() || pattern.ctor() != target.ctor()) return false;
        if (pattern.is_ground()) return pattern == target;
        auto pa = pattern.args();
        auto ta = target.args();
        for (std::size_t i = 0; i < pa.size(); ++i)
            if (!match_into(pa[i], ta[i], sigma)) return false;
        return true;
    }
    }
    return false;
}

inline std::optional<Substitution> match(const Term& pattern, const Term& target, Substitution sigma = {}) {
    if (!match_into(pattern, target, sigma)) return std::nullopt;
    return sigma;
}

inline void collect_variables(const Term& t, std::set<Variable>& out) {
    if (t.is_ground()) return;
    if (t.is_var()) {
        out.insert(t.as_variable());
        return;
    }
    for (const auto& a : t.args()) collect_variables(a, out);
}

inline void collect_subterms(const Term& t, std::set<Term>& out) {
    out.insert(t);
    if (t.is_app())
        for (const auto& a : t.args()) collect_subterms(a, out);
}

/// Conservative unifiability test: variables are treated as wildcards
/// (variable consistency ignored). Never reports false for unifiable pairs.
inline bool may_unify(const Term& a, const Term& b) {
    if (a.sort() != b.sort()) return false;
    if (a.is_var() || b.is_var()) return true;
    if (a.is_const() || b.is_const()) return a == b;
    if (a.ctor() != b.ctor()) return false;
    for (std::size_t i = 0; i < a.args().size(); ++i)
        if (!may_unify(a.args()[i], b.args()[i])) return false;
    return true;
}

inline std::string to_string(const Substitution& sigma) {
    std::string out = "{";
    bool first = true;
    for (const auto& [v, t] : sigma) {
        if (!first) out += ", ";
        first = false;
        out += v.name;
        out += " -> ";
        out += t.str();
    }
    out += '}';
    return out;
}

} // namespace acsan

#endif
