#include "amalgam/hypergraph.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

#include "amalgam/util.hpp"

namespace amalgam {

Hypergraph make_hypergraph(std::vector<int> vertices, std::vector<std::vector<int>> hyperedges) {
    sort_unique(vertices);
    for (auto& e : hyperedges) sort_unique(e);
    std::sort(hyperedges.begin(), hyperedges.end());
    hyperedges.erase(std::unique(hyperedges.begin(), hyperedges.end()), hyperedges.end());
    Hypergraph h{std::move(vertices), std::move(hyperedges)};
    ValidationReport rep = validate_hypergraph(h);
    if (!rep.ok()) throw Error("make_hypergraph: " + rep.violations.front());
    return h;
}

ValidationReport validate_hypergraph(const Hypergraph& h) {
    ValidationReport rep;
    if (!std::is_sorted(h.vertices.begin(), h.vertices.end()) ||
        std::adjacent_find(h.vertices.begin(), h.vertices.end()) != h.vertices.end())
        rep.fail("vertices are not sorted-unique");
    std::vector<int> covered;
    for (const auto& e : h.hyperedges) {
        if (!std::is_sorted(e.begin(), e.end()) || std::adjacent_find(e.begin(), e.end()) != e.end())
            rep.fail("a hyperedge is not sorted-unique");
        for (int v : e)
            if (!contains(h.vertices, v)) rep.fail("hyperedge mentions unknown vertex " + std::to_string(v));
        covered = unite(covered, e);
    }
    for (std::size_t i = 1; i < h.hyperedges.size(); ++i)
        if (h.hyperedges[i] == h.hyperedges[i - 1]) rep.fail("duplicate hyperedge");
    for (int v : h.vertices)
        if (!contains(covered, v)) rep.fail("vertex " + std::to_string(v) + " lies in no hyperedge");
    return rep;
}

std::set<std::pair<int, int>> gaifman(const Hypergraph& h) {
    std::set<std::pair<int, int>> out;
    for (const auto& e : h.hyperedges)
        for (std::size_t i = 0; i < e.size(); ++i)
            for (std::size_t j = i + 1; j < e.size(); ++j) out.emplace(e[i], e[j]);
    return out;
}

Hypergraph induced_sub_hypergraph(const Hypergraph& h, const std::vector<int>& w) {
    std::vector<int> kept = w;
    sort_unique(kept);
    kept = intersect(kept, h.vertices);
    std::vector<std::vector<int>> edges;
    for (const auto& e : h.hyperedges) {
        std::vector<int> cut = intersect(e, kept);
        if (!cut.empty()) edges.push_back(std::move(cut));
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    return Hypergraph{std::move(kept), std::move(edges)};
}

namespace {

struct Adjacency {
    std::map<int, std::vector<int>> nbr;  // sorted neighbour lists
    bool adjacent(int a, int b) const {
        auto it = nbr.find(a);
        return it != nbr.end() && contains(it->second, b);
    }
};

Adjacency adjacency(const Hypergraph& h) {
    Adjacency adj;
    for (int v : h.vertices) adj.nbr[v];
    for (const auto& [a, b] : gaifman(h)) {
        adj.nbr[a].push_back(b);
        adj.nbr[b].push_back(a);
    }
    for (auto& [v, lst] : adj.nbr) sort_unique(lst);
    return adj;
}

// extend a partial chordless cycle: consecutive adjacent, all other pairs non-adjacent
bool chordless_cycle_dfs(const Adjacency& adj, std::vector<int>& path, int max_len,
                         std::vector<int>* out) {
    int v0 = path.front();
    int last = path.back();
    if ((int)path.size() >= 4 && adj.adjacent(last, v0)) {
        bool induced = true;
        for (std::size_t i = 1; i + 1 < path.size(); ++i)
            if (i != 1 && adj.adjacent(path[i], v0)) induced = false;
        if (induced) {
            *out = path;
            return true;
        }
    }
    if ((int)path.size() == max_len) return false;
    for (int next : adj.nbr.at(last)) {
        if (next <= v0) continue;  // cycle is rooted at its least vertex
        if (std::find(path.begin(), path.end(), next) != path.end()) continue;
        // chordlessness: next may touch only its predecessor among path[1..]
        bool ok = true;
        for (std::size_t i = 1; i + 1 < path.size(); ++i)
            if (adj.adjacent(path[i], next)) {
                ok = false;
                break;
            }
        if (!ok) continue;
        if (path.size() >= 2 && adj.adjacent(path[path.size() - 2], next)) continue;
        path.push_back(next);
        if (chordless_cycle_dfs(adj, path, max_len, out)) return true;
        path.pop_back();
    }
    return false;
}

}  // namespace

ChordalityVerdict is_chordal_up_to(const Hypergraph& h, int n) {
    if (n < 2) throw PreconditionError("is_chordal_up_to: bound must be at least 2");
    ChordalityVerdict v;
    Adjacency adj = adjacency(h);
    for (int v0 : h.vertices) {
        for (int v1 : adj.nbr.at(v0)) {
            if (v1 <= v0) continue;
            std::vector<int> path{v0, v1};
            std::vector<int> found;
            if (chordless_cycle_dfs(adj, path, n, &found)) {
                // canonical orientation: second vertex smaller than last
                if (found[1] > found.back()) std::reverse(found.begin() + 1, found.end());
                v.value = false;
                v.witness_cycle = found;
                return v;
            }
        }
    }
    v.value = true;
    return v;
}

namespace {

bool clique_search(const Adjacency& adj, const std::vector<std::vector<int>>& hyperedges,
                   std::vector<int>& clique, const std::vector<int>& candidates, int max_size,
                   std::vector<int>* out) {
    if (clique.size() >= 3) {
        bool inside = false;
        for (const auto& e : hyperedges)
            if (subset_of(clique, e)) {
                inside = true;
                break;
            }
        if (!inside) {
            *out = clique;
            return true;
        }
    }
    if ((int)clique.size() == max_size) return false;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        int v = candidates[i];
        std::vector<int> next_cands;
        for (std::size_t j = i + 1; j < candidates.size(); ++j)
            if (adj.adjacent(v, candidates[j])) next_cands.push_back(candidates[j]);
        clique.push_back(v);
        if (clique_search(adj, hyperedges, clique, next_cands, max_size, out)) return true;
        clique.pop_back();
    }
    return false;
}

}  // namespace

ConformalityVerdict is_conformal_up_to(const Hypergraph& h, int n) {
    if (n < 2) throw PreconditionError("is_conformal_up_to: bound must be at least 2");
    ConformalityVerdict v;
    Adjacency adj = adjacency(h);
    std::vector<int> clique;
    std::vector<int> found;
    if (clique_search(adj, h.hyperedges, clique, h.vertices, n, &found)) {
        v.value = false;
        v.witness_clique = found;
        return v;
    }
    v.value = true;
    return v;
}

HypAcyclicityVerdict is_n_acyclic_hyp(const Hypergraph& h, int n) {
    HypAcyclicityVerdict v;
    ChordalityVerdict ch = is_chordal_up_to(h, n);
    if (!ch.value) {
        v.value = false;
        v.witness_cycle = ch.witness_cycle;
        return v;
    }
    ConformalityVerdict cf = is_conformal_up_to(h, n);
    if (!cf.value) {
        v.value = false;
        v.witness_clique = cf.witness_clique;
        return v;
    }
    v.value = true;
    return v;
}

HypAcyclicityVerdict is_acyclic_hyp(const Hypergraph& h) {
    int n = std::max<int>(2, (int)h.vertices.size());
    return is_n_acyclic_hyp(h, n);
}

GrahamResult graham_reduce(const Hypergraph& h) {
    GrahamResult out;
    std::vector<std::vector<int>> cur = h.hyperedges;
    std::vector<bool> edge_alive(cur.size(), true);
    std::vector<int> verts = h.vertices;

    auto count_edges_with = [&](int v) {
        int c = 0;
        for (std::size_t i = 0; i < cur.size(); ++i)
            if (edge_alive[i] && contains(cur[i], v)) ++c;
        return c;
    };

    bool progress = true;
    while (progress) {
        progress = false;
        for (int v : verts) {
            if (count_edges_with(v) == 1) {
                for (std::size_t i = 0; i < cur.size(); ++i)
                    if (edge_alive[i]) cur[i] = subtract(cur[i], {v});
                verts = subtract(verts, {v});
                out.trace.push_back(GrahamStep{true, v, -1, -1});
                progress = true;
                break;
            }
        }
        if (progress) continue;
        for (std::size_t i = 0; i < cur.size() && !progress; ++i) {
            if (!edge_alive[i]) continue;
            int container = -1;
            for (std::size_t j = 0; j < cur.size(); ++j) {
                if (j == i || !edge_alive[j]) continue;
                if (subset_of(cur[i], cur[j])) {
                    container = (int)j;
                    break;
                }
            }
            bool sole_empty = cur[i].empty();
            if (container >= 0 || sole_empty) {
                edge_alive[i] = false;
                out.trace.push_back(GrahamStep{false, -1, (int)i, container});
                progress = true;
            }
        }
    }
    std::vector<std::vector<int>> rest;
    for (std::size_t i = 0; i < cur.size(); ++i)
        if (edge_alive[i]) rest.push_back(cur[i]);
    out.acyclic = verts.empty() && rest.empty();
    if (!out.acyclic) out.stuck = Hypergraph{verts, rest};
    return out;
}

std::optional<TreeDecomposition> tree_decomposition(const Hypergraph& h) {
    GrahamResult g = graham_reduce(h);
    if (!g.acyclic) return std::nullopt;
    TreeDecomposition td;
    td.bags = h.hyperedges;
    for (const auto& step : g.trace) {
        if (step.vertex_step || step.container < 0) continue;
        td.edges.emplace_back(step.edge_index, step.container);
    }
    ValidationReport rep = validate_tree_decomposition(h, td);
    if (!rep.ok()) throw Error("tree_decomposition: construction failed validation: " + rep.violations.front());
    return td;
}

ValidationReport validate_tree_decomposition(const Hypergraph& h, const TreeDecomposition& td) {
    ValidationReport rep;
    std::size_t n = td.bags.size();
    for (const auto& [a, b] : td.edges)
        if (a < 0 || b < 0 || a >= (int)n || b >= (int)n) rep.fail("tree edge mentions unknown node");
    if (!rep.ok()) return rep;
    if (n == 0) {
        if (!h.hyperedges.empty()) rep.fail("empty decomposition for a non-empty hypergraph");
        return rep;
    }
    if (td.edges.size() + 1 != n) rep.fail("edge count does not match a tree");
    // connectivity of the tree itself
    {
        std::vector<int> parent(n);
        for (std::size_t i = 0; i < n; ++i) parent[i] = (int)i;
        std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
        for (const auto& [a, b] : td.edges) {
            if (find(a) == find(b)) rep.fail("tree edges contain a cycle");
            parent[find(a)] = find(b);
        }
        int root = find(0);
        for (std::size_t i = 0; i < n; ++i)
            if (find((int)i) != root) rep.fail("tree is not connected");
    }
    // every bag is a hyperedge, every hyperedge appears as a bag
    for (const auto& b : td.bags)
        if (!std::binary_search(h.hyperedges.begin(), h.hyperedges.end(), b))
            rep.fail("a bag is not a hyperedge of the hypergraph");
    for (const auto& e : h.hyperedges) {
        bool found = false;
        for (const auto& b : td.bags)
            if (b == e) {
                found = true;
                break;
            }
        if (!found) rep.fail("hyperedge missing from the decomposition");
    }
    // occurrence sets are connected
    std::map<int, std::vector<int>> adj;
    for (const auto& [a, b] : td.edges) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    for (int v : h.vertices) {
        std::vector<int> holding;
        for (std::size_t i = 0; i < n; ++i)
            if (contains(td.bags[i], v)) holding.push_back((int)i);
        if (holding.empty()) {
            rep.fail("vertex " + std::to_string(v) + " occurs in no bag");
            continue;
        }
        std::set<int> seen{holding.front()};
        std::vector<int> stack{holding.front()};
        while (!stack.empty()) {
            int t = stack.back();
            stack.pop_back();
            for (int u : adj[t])
                if (contains(holding, u) && seen.insert(u).second) stack.push_back(u);
        }
        if (seen.size() != holding.size())
            rep.fail("bags holding vertex " + std::to_string(v) + " are not connected");
    }
    return rep;
}

ExplodedView exploded_view_hyp(const Hypergraph& h) {
    ValidationReport rep = validate_hypergraph(h);
    if (!rep.ok()) throw PreconditionError("exploded_view_hyp: " + rep.violations.front());
    RelStructure base;
    base.sig = make_signature({});
    base.universe = h.vertices;
    return exploded_view(base, h.hyperedges);
}

HypergraphCovering covering_from_realisation(const Realisation& r, const Hypergraph& base) {
    ExplodedView ev = exploded_view_hyp(base);
    return covering_from_realisation(r, ev, base);
}

HypergraphCovering covering_from_realisation(const Realisation& r, const ExplodedView& ev, const Hypergraph& base) {
    HypergraphCovering c;
    c.down = base;
    c.up.vertices = r.structure.universe;
    for (const auto& chart : r.charts) {
        for (const auto& [x, tpl] : chart.map.pairs()) {
            auto it = ev.origin_of.find(tpl);
            if (it == ev.origin_of.end())
                throw PreconditionError("covering_from_realisation: chart hits an unknown template element");
            int b = it->second.second;
            auto put = c.pi.emplace(x, b);
            if (!put.second && put.first->second != b)
                throw PreconditionError("covering_from_realisation: charts disagree on the projected vertex");
        }
    }
    for (int v : c.up.vertices)
        if (!c.pi.count(v)) throw PreconditionError("covering_from_realisation: element outside every chart");
    c.up.hyperedges = r.domains();
    return c;
}

namespace {

std::vector<int> project(const std::map<int, int>& pi, const std::vector<int>& xs) {
    std::vector<int> out;
    out.reserve(xs.size());
    for (int x : xs) out.push_back(pi.at(x));
    sort_unique(out);
    return out;
}

std::string set_str(const std::vector<int>& xs) {
    std::ostringstream os;
    os << '{';
    for (std::size_t i = 0; i < xs.size(); ++i) os << (i ? "," : "") << xs[i];
    os << '}';
    return os.str();
}

}  // namespace

ValidationReport verify_hyp_covering(const HypergraphCovering& c) {
    ValidationReport rep;
    for (int v : c.up.vertices) {
        auto it = c.pi.find(v);
        if (it == c.pi.end()) {
            rep.fail("projection undefined on vertex " + std::to_string(v));
            return rep;
        }
        if (!contains(c.down.vertices, it->second)) {
            rep.fail("projection leaves the base at vertex " + std::to_string(v));
            return rep;
        }
    }
    for (const auto& u : c.up.hyperedges) {
        std::vector<int> img = project(c.pi, u);
        if (img.size() != u.size()) rep.fail("projection not injective on hyperedge " + set_str(u));
        if (!std::binary_search(c.down.hyperedges.begin(), c.down.hyperedges.end(), img))
            rep.fail("hyperedge " + set_str(u) + " does not project onto a base hyperedge");
    }
    for (const auto& s : c.down.hyperedges) {
        bool hit = false;
        for (const auto& u : c.up.hyperedges)
            if (project(c.pi, u) == s) {
                hit = true;
                break;
            }
        if (!hit) rep.fail("base hyperedge " + set_str(s) + " has no preimage hyperedge");
    }
    if (!rep.ok()) return rep;
    for (const auto& s : c.down.hyperedges)
        for (const auto& s2 : c.down.hyperedges) {
            if (s == s2) continue;
            std::vector<int> shared = intersect(s, s2);
            if (shared.empty()) continue;
            for (const auto& u : c.up.hyperedges) {
                if (project(c.pi, u) != s) continue;
                bool lifted = false;
                for (const auto& u2 : c.up.hyperedges) {
                    if (project(c.pi, u2) != s2) continue;
                    if (project(c.pi, intersect(u, u2)) == shared) {
                        lifted = true;
                        break;
                    }
                }
                if (!lifted)
                    rep.fail("overlap " + set_str(shared) + " of " + set_str(s) + " and " + set_str(s2) +
                             " does not lift at hyperedge " + set_str(u));
            }
        }
    return rep;
}

ValidationReport verify_hyp_covering_union_form(const HypergraphCovering& c) {
    ValidationReport rep;
    for (const auto& s : c.down.hyperedges)
        for (const auto& s2 : c.down.hyperedges) {
            if (s == s2) continue;
            if (intersect(s, s2).empty()) continue;
            for (const auto& u : c.up.hyperedges) {
                if (project(c.pi, u) != s) continue;
                bool lifted = false;
                for (const auto& u2 : c.up.hyperedges) {
                    if (project(c.pi, u2) != s2) continue;
                    std::vector<int> un = unite(u, u2);
                    if (project(c.pi, un) == unite(s, s2) && project(c.pi, un).size() == un.size()) {
                        lifted = true;
                        break;
                    }
                }
                if (!lifted)
                    rep.fail("no neighbour over " + set_str(s2) + " makes the projection bijective on the union at " +
                             set_str(u));
            }
        }
    return rep;
}

}  // namespace amalgam
