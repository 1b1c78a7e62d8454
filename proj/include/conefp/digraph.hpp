#pragma once

#include <algorithm>
#include <numeric>
#include <vector>

#include "conefp/errors.hpp"

namespace conefp {

/// Directed graph on vertices 0..n-1. Arc lists are kept sorted and
/// duplicate-free.
class Digraph {
public:
    explicit Digraph(int n) : adj_(static_cast<std::size_t>(n)) {
        if (n < 1) throw ValidationError("Digraph: vertex count must be >= 1");
    }

    Digraph(int n, const std::vector<std::pair<int, int>>& arcs) : Digraph(n) {
        for (auto [u, v] : arcs) add_arc(u, v);
    }

    void add_arc(int from, int to) {
        check_vertex(from);
        check_vertex(to);
        auto& row = adj_[static_cast<std::size_t>(from)];
        auto it = std::lower_bound(row.begin(), row.end(), to);
        if (it == row.end() || *it != to) row.insert(it, to);
    }

    int order() const { return static_cast<int>(adj_.size()); }

    const std::vector<int>& successors(int v) const {
        check_vertex(v);
        return adj_[static_cast<std::size_t>(v)];
    }

    bool has_arc(int from, int to) const {
        check_vertex(from);
        check_vertex(to);
        const auto& row = adj_[static_cast<std::size_t>(from)];
        return std::binary_search(row.begin(), row.end(), to);
    }

    bool has_all_self_loops() const {
        for (int v = 0; v < order(); ++v)
            if (!has_arc(v, v)) return false;
        return true;
    }

    int arc_count() const {
        std::size_t c = 0;
        for (const auto& row : adj_) c += row.size();
        return static_cast<int>(c);
    }

    friend bool operator==(const Digraph& a, const Digraph& b) { return a.adj_ == b.adj_; }

private:
    void check_vertex(int v) const {
        if (v < 0 || v >= order()) throw ValidationError("Digraph: vertex out of range");
    }

    std::vector<std::vector<int>> adj_;
};

namespace detail {

struct TarjanState {
    const Digraph* g;
    std::vector<int> index, lowlink, stack_pos, stack;
    std::vector<std::vector<int>> components;
    int counter = 0;

    void dfs(int v) {
        index[v] = lowlink[v] = counter++;
        stack_pos[v] = static_cast<int>(stack.size());
        stack.push_back(v);
        for (int w : g->successors(v)) {
            if (index[w] < 0) {
                dfs(w);
                lowlink[v] = std::min(lowlink[v], lowlink[w]);
            } else if (stack_pos[w] >= 0) {
                lowlink[v] = std::min(lowlink[v], index[w]);
            }
        }
        if (lowlink[v] == index[v]) {
            const int cut = stack_pos[v];
            std::vector<int> comp(stack.begin() + cut, stack.end());
            for (int w : comp) stack_pos[w] = -1;
            stack.resize(static_cast<std::size_t>(cut));
            std::sort(comp.begin(), comp.end());
            components.push_back(std::move(comp));
        }
    }
};

}  // namespace detail

/// Strongly connected components in topological order of the condensation:
/// every arc between distinct components goes from an earlier component to
/// a later one.
inline std::vector<std::vector<int>> strongly_connected_components(const Digraph& g) {
    const int n = g.order();
    detail::TarjanState st;
    st.g = &g;
    st.index.assign(static_cast<std::size_t>(n), -1);
    st.lowlink.assign(static_cast<std::size_t>(n), 0);
    st.stack_pos.assign(static_cast<std::size_t>(n), -1);
    for (int v = 0; v < n; ++v)
        if (st.index[v] < 0) st.dfs(v);
    // Tarjan emits sinks of the condensation first.
    std::reverse(st.components.begin(), st.components.end());
    return st.components;
}

inline bool is_strongly_connected(const Digraph& g) {
    return strongly_connected_components(g).size() == 1;
}

/// Transitive closure by walks of length >= 1, so closure[v][v] means
/// "v lies on a cycle".
inline std::vector<std::vector<bool>> positive_walk_closure(const Digraph& g) {
    const int n = g.order();
    std::vector<std::vector<bool>> reach(static_cast<std::size_t>(n),
                                         std::vector<bool>(static_cast<std::size_t>(n), false));
    for (int v = 0; v < n; ++v)
        for (int w : g.successors(v)) reach[v][w] = true;
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i) {
            if (!reach[i][k]) continue;
            for (int j = 0; j < n; ++j)
                if (reach[k][j]) reach[i][j] = true;
        }
    return reach;
}

/// gcd of the closed-walk lengths through a strongly connected component,
/// computed from BFS level differences along intra-component arcs.
inline int component_cyclicity(const Digraph& g, const std::vector<int>& component) {
    if (component.size() == 1) {
        int v = component.front();
        return g.has_arc(v, v) ? 1 : 0;  // 0: vertex lies on no cycle
    }
    std::vector<int> level(static_cast<std::size_t>(g.order()), -1);
    std::vector<char> inside(static_cast<std::size_t>(g.order()), 0);
    for (int v : component) inside[static_cast<std::size_t>(v)] = 1;
    std::vector<int> queue{component.front()};
    level[static_cast<std::size_t>(component.front())] = 0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
        int v = queue[head];
        for (int w : g.successors(v)) {
            if (!inside[static_cast<std::size_t>(w)]) continue;
            if (level[static_cast<std::size_t>(w)] < 0) {
                level[static_cast<std::size_t>(w)] = level[static_cast<std::size_t>(v)] + 1;
                queue.push_back(w);
            }
        }
    }
    int g_acc = 0;
    for (int v : component)
        for (int w : g.successors(v)) {
            if (!inside[static_cast<std::size_t>(w)]) continue;
            const int diff = level[static_cast<std::size_t>(v)] + 1 - level[static_cast<std::size_t>(w)];
            g_acc = std::gcd(g_acc, std::abs(diff));
        }
    return g_acc == 0 ? 1 : g_acc;
}

/// Irreducible and aperiodic: the zero pattern of a primitive matrix.
inline bool is_primitive_pattern(const Digraph& g) {
    if (!is_strongly_connected(g)) return false;
    std::vector<int> all(static_cast<std::size_t>(g.order()));
    std::iota(all.begin(), all.end(), 0);
    return component_cyclicity(g, all) == 1;
}

namespace detail {

using BoolMatrix = std::vector<std::vector<bool>>;

inline BoolMatrix bool_multiply(const BoolMatrix& a, const BoolMatrix& b) {
    const std::size_t n = a.size();
    BoolMatrix c(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) {
            if (!a[i][k]) continue;
            for (std::size_t j = 0; j < n; ++j)
                if (b[k][j]) c[i][j] = true;
        }
    return c;
}

inline BoolMatrix bool_power(const BoolMatrix& a, long long p) {
    const std::size_t n = a.size();
    BoolMatrix result(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i) result[i][i] = true;
    BoolMatrix base = a;
    while (p > 0) {
        if (p & 1) result = bool_multiply(result, base);
        base = bool_multiply(base, base);
        p >>= 1;
    }
    return result;
}

}  // namespace detail

struct DigraphPeriod {
    int period = 1;
    std::vector<int> nonrecurrent;  // vertices lying on no cycle (0-based)
    bool all_recurrent() const { return nonrecurrent.empty(); }
};

/// Smallest p >= 1 such that every vertex lying on a cycle has a closed walk
/// of length exactly p. Candidate periods must be multiples of the lcm of the
/// component cyclicities; each candidate is confirmed by boolean powering of
/// the adjacency pattern restricted to the recurrent vertices.
inline DigraphPeriod digraph_period(const Digraph& g) {
    const int n = g.order();
    const auto closure = positive_walk_closure(g);
    std::vector<int> recurrent, where(static_cast<std::size_t>(n), -1);
    DigraphPeriod out;
    for (int v = 0; v < n; ++v) {
        if (closure[v][v]) {
            where[static_cast<std::size_t>(v)] = static_cast<int>(recurrent.size());
            recurrent.push_back(v);
        } else {
            out.nonrecurrent.push_back(v);
        }
    }
    if (recurrent.empty()) {
        out.period = 1;
        return out;
    }

    const int m = static_cast<int>(recurrent.size());
    Digraph sub(m);
    for (int v : recurrent)
        for (int w : g.successors(v))
            if (where[static_cast<std::size_t>(w)] >= 0)
                sub.add_arc(where[static_cast<std::size_t>(v)], where[static_cast<std::size_t>(w)]);

    long long lcm = 1;
    for (const auto& comp : strongly_connected_components(sub)) {
        const int c = component_cyclicity(sub, comp);
        if (c > 0) lcm = std::lcm(lcm, static_cast<long long>(c));
    }

    detail::BoolMatrix adj(static_cast<std::size_t>(m),
                           std::vector<bool>(static_cast<std::size_t>(m), false));
    for (int v = 0; v < m; ++v)
        for (int w : sub.successors(v)) adj[static_cast<std::size_t>(v)][static_cast<std::size_t>(w)] = true;

    // Wielandt-style cap on the search: primitivity indices never exceed it.
    const long long cap = std::max<long long>(1, static_cast<long long>(m) * m - 2 * m + 2);
    for (long long k = 1; k <= cap; ++k) {
        const auto power = detail::bool_power(adj, k * lcm);
        bool full_diagonal = true;
        for (int v = 0; v < m && full_diagonal; ++v)
            if (!power[static_cast<std::size_t>(v)][static_cast<std::size_t>(v)]) full_diagonal = false;
        if (full_diagonal) {
            out.period = static_cast<int>(k * lcm);
            return out;
        }
    }
    throw std::logic_error("digraph_period: no period found below the Wielandt bound");
}

}  // namespace conefp
