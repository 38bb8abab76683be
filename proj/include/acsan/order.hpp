#ifndef ACSAN_ORDER_HPP
#define ACSAN_ORDER_HPP

// Finite strict partial orders over element indices 0..n-1: transitive
// closure and reduction, minimal elements, layer peeling, and enumeration
// of linear extensions in lexicographic order of indices.

#include "acsan/error.hpp"

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace acsan {

using Arc = std::pair<std::size_t, std::size_t>;
using ArcSet = std::set<Arc>;

/// Adjacency matrix of a relation on n elements.
class Relation {
public:
    Relation() = default;
    explicit Relation(std::size_t n) : n_(n), bits_(n * n, false) {}

    Relation(std::size_t n, const std::vector<Arc>& arcs) : Relation(n) {
        for (auto [a, b] : arcs) set(a, b);
    }

    std::size_t size() const noexcept { return n_; }
    bool test(std::size_t a, std::size_t b) const { return bits_[a * n_ + b]; }

    void set(std::size_t a, std::size_t b, bool v = true) {
        if (a >= n_ || b >= n_) throw Error("arc (" + std::to_string(a) + ", " + std::to_string(b) + ") out of range");
        bits_[a * n_ + b] = v;
    }

    ArcSet arcs() const {
        ArcSet out;
        for (std::size_t a = 0; a < n_; ++a)
            for (std::size_t b = 0; b < n_; ++b)
                if (test(a, b)) out.emplace(a, b);
        return out;
    }

    friend bool operator==(const Relation&, const Relation&) = default;

private:
    std::size_t n_ = 0;
    std::vector<bool> bits_;
};

namespace detail {

/// Returns a cycle (as a closed walk of indices) if the relation has one.
inline std::optional<std::vector<std::size_t>> find_cycle(const Relation& r) {
    std::size_t n = r.size();
    std::vector<std::uint8_t> color(n, 0);
    std::vector<std::size_t> parent(n, n);
    std::optional<std::vector<std::size_t>> found;
    auto dfs = [&](auto&& self, std::size_t u) -> void {
        color[u] = 1;
        for (std::size_t v = 0; v < n && !found; ++v) {
            if (!r.test(u, v)) continue;
            if (color[v] == 1) {
                std::vector<std::size_t> cyc{v};
                for (std::size_t w = u; w != v; w = parent[w]) cyc.push_back(w);
                cyc.push_back(v);
                std::reverse(cyc.begin(), cyc.end());
                found = std::move(cyc);
                return;
            }
            if (color[v] == 0) {
                parent[v] = u;
                self(self, v);
            }
        }
        color[u] = 2;
    };
    for (std::size_t u = 0; u < n && !found; ++u)
        if (color[u] == 0) dfs(dfs, u);
    return found;
}

} // namespace detail

/// Smallest transitive superset; throws CyclicOrder with a witness cycle.
inline Relation transitive_closure(const Relation& r) {
    if (auto cyc = detail::find_cycle(r)) {
        std::string path;
        for (std::size_t i = 0; i < cyc->size(); ++i) path += (i ? " < " : "") + std::to_string((*cyc)[i]);
        throw CyclicOrder("order relation is cyclic: " + path, *cyc);
    }
    Relation c = r;
    std::size_t n = r.size();
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            if (c.test(i, k))
                for (std::size_t j = 0; j < n; ++j)
                    if (c.test(k, j)) c.set(i, j);
    return c;
}

/// Hasse diagram: arcs a<b of the closure with no c such that a<c<b.
inline Relation transitive_reduction(const Relation& r) {
    Relation c = transitive_closure(r);
    std::size_t n = r.size();
    Relation red(n);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) {
            if (!c.test(a, b)) continue;
            bool implied = false;
            for (std::size_t m = 0; m < n && !implied; ++m) implied = c.test(a, m) && c.test(m, b);
            if (!implied) red.set(a, b);
        }
    return red;
}

/// Elements with no predecessor. `closed` must be transitively closed or a
/// reduction of the order (both have the same sources).
inline std::vector<std::size_t> minimal_elements(const Relation& closed) {
    std::vector<std::size_t> out;
    for (std::size_t b = 0; b < closed.size(); ++b) {
        bool has_pred = false;
        for (std::size_t a = 0; a < closed.size() && !has_pred; ++a) has_pred = closed.test(a, b);
        if (!has_pred) out.push_back(b);
    }
    return out;
}

/// Repeatedly removes the sources of the graph; layer i holds the elements
/// whose longest chain of predecessors has length i.
inline std::vector<std::vector<std::size_t>> peel_layers(const Relation& graph) {
    transitive_closure(graph); // rejects cycles
    std::size_t n = graph.size();
    std::vector<bool> removed(n, false);
    std::vector<std::vector<std::size_t>> layers;
    std::size_t left = n;
    while (left > 0) {
        std::vector<std::size_t> layer;
        for (std::size_t b = 0; b < n; ++b) {
            if (removed[b]) continue;
            bool has_pred = false;
            for (std::size_t a = 0; a < n && !has_pred; ++a) has_pred = !removed[a] && graph.test(a, b);
            if (!has_pred) layer.push_back(b);
        }
        for (auto b : layer) removed[b] = true;
        left -= layer.size();
        layers.push_back(std::move(layer));
    }
    return layers;
}

/// Strict predecessors of `x` in the closed order.
inline std::vector<std::size_t> predecessors(const Relation& closed, std::size_t x) {
    if (x >= closed.size()) throw UnknownEvent("element " + std::to_string(x) + " is not in the order");
    std::vector<std::size_t> out;
    for (std::size_t a = 0; a < closed.size(); ++a)
        if (closed.test(a, x)) out.push_back(a);
    return out;
}

inline bool comparable(const Relation& closed, std::size_t a, std::size_t b) {
    return closed.test(a, b) || closed.test(b, a);
}

/// Independent cursor over the linear extensions of a partial order, in
/// lexicographic order of element indices. Each extension appears once.
class LinearExtensionCursor {
public:
    explicit LinearExtensionCursor(const Relation& order) : closed_(transitive_closure(order)) {}

    /// Next extension, or nullopt when exhausted.
    std::optional<std::vector<std::size_t>> next() {
        if (done_) return std::nullopt;
        if (!started_) {
            started_ = true;
            current_.clear();
            if (!complete_from(0)) {
                done_ = true;
                return std::nullopt;
            }
            return current_;
        }
        std::size_t n = closed_.size();
        for (std::size_t i = n; i-- > 0;) {
            std::vector<bool> placed(n, false);
            for (std::size_t k = 0; k < i; ++k) placed[current_[k]] = true;
            for (std::size_t cand = current_[i] + 1; cand < n; ++cand) {
                if (placed[cand] || !available(cand, placed)) continue;
                current_.resize(i);
                current_.push_back(cand);
                complete_from(i + 1);
                return current_;
            }
        }
        done_ = true;
        return std::nullopt;
    }

private:
    bool available(std::size_t x, const std::vector<bool>& placed) const {
        for (std::size_t a = 0; a < closed_.size(); ++a)
            if (closed_.test(a, x) && !placed[a]) return false;
        return true;
    }

    // Fills positions from `from` on with the smallest available element.
    bool complete_from(std::size_t from) {
        std::size_t n = closed_.size();
        std::vector<bool> placed(n, false);
        for (std::size_t k = 0; k < from; ++k) placed[current_[k]] = true;
        current_.resize(from);
        while (current_.size() < n) {
            bool found = false;
            for (std::size_t x = 0; x < n; ++x) {
                if (!placed[x] && available(x, placed)) {
                    placed[x] = true;
                    current_.push_back(x);
                    found = true;
                    break;
                }
            }
            if (!found) return false;
        }
        return true;
    }

    Relation closed_;
    std::vector<std::size_t> current_;
    bool started_ = false;
    bool done_ = false;
};

/// Calls `f(extension)` for each linear extension until `f` returns false.
template <class F>
void for_each_linear_extension(const Relation& order, F&& f) {
    LinearExtensionCursor cursor(order);
    while (auto ext = cursor.next())
        if (!f(*ext)) return;
}

inline constexpr std::size_t default_enumeration_cap = 10;

/// Number of linear extensions, by enumeration; TooLarge beyond `cap` elements.
inline std::uint64_t count_linear_extensions(const Relation& order, std::size_t cap = default_enumeration_cap) {
    if (order.size() > cap) {
        throw TooLarge("refusing to enumerate linear extensions of " + std::to_string(order.size()) +
                       " elements (cap " + std::to_string(cap) + ")");
    }
    std::uint64_t count = 0;
    for_each_linear_extension(order, [&](const std::vector<std::size_t>&) {
        ++count;
        return true;
    });
    return count;
}

} // namespace acsan

#endif
