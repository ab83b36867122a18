#include "amalgam/fuzz.hpp"

#include <algorithm>
#include <cstddef>
#include <map>
#include <set>
#include <tuple>
#include <utility>

#include "amalgam/product.hpp"

namespace amalgam {

namespace {

int pick(std::mt19937& rng, int n) {
    return static_cast<int>(rng() % static_cast<unsigned>(n));
}

bool chance(std::mt19937& rng, int num, int den) {
    return pick(rng, den) < num;
}

// stdlib shuffle is implementation-defined over the same engine; this one is not
void shuffle_ids(std::mt19937& rng, std::vector<int>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[static_cast<std::size_t>(pick(rng, static_cast<int>(i)))]);
}

Signature fuzz_signature() {
    return make_signature({{"R", 2}, {"U", 1}});
}

RelStructure random_structure(std::mt19937& rng, std::vector<int> ids, const Signature& sig) {
    RelStructure a;
    a.sig = sig;
    std::sort(ids.begin(), ids.end());
    a.universe = std::move(ids);
    if (sig.find("R")) {
        auto& r = a.relations["R"];
        for (int x : a.universe)
            for (int y : a.universe)
                if (chance(rng, 1, 4)) r.insert({x, y});
    }
    if (sig.find("U")) {
        auto& u = a.relations["U"];
        for (int x : a.universe)
            if (chance(rng, 1, 3)) u.insert({x});
    }
    return a;
}

// random partial injection that preserves relations both ways; falls back to the
// empty map, which is vacuously a partial isomorphism
PartialMap random_partial_iso(std::mt19937& rng, const RelStructure& a, const RelStructure& b, bool identity_biased) {
    if (identity_biased && &a == &b) {
        std::vector<int> u = a.universe;
        shuffle_ids(rng, u);
        u.resize(static_cast<std::size_t>(pick(rng, static_cast<int>(u.size()) + 1)));
        return identity_map(u);
    }
    for (int attempt = 0; attempt < 6; ++attempt) {
        std::vector<int> src = a.universe;
        std::vector<int> tgt = b.universe;
        shuffle_ids(rng, src);
        shuffle_ids(rng, tgt);
        int cap = static_cast<int>(std::min(src.size(), tgt.size()));
        int len = pick(rng, cap + 1);
        std::vector<std::pair<int, int>> pairs;
        for (int i = 0; i < len; ++i) pairs.emplace_back(src[static_cast<std::size_t>(i)], tgt[static_cast<std::size_t>(i)]);
        PartialMap m(std::move(pairs));
        if (is_partial_isomorphism(a, b, m)) return m;
    }
    return PartialMap();
}

// self-inverse loop links need an involutive map
PartialMap random_involution(std::mt19937& rng, const RelStructure& a) {
    for (int attempt = 0; attempt < 6; ++attempt) {
        std::vector<int> u = a.universe;
        shuffle_ids(rng, u);
        int len = pick(rng, static_cast<int>(u.size()) + 1);
        std::vector<std::pair<int, int>> pairs;
        for (int i = 0; i + 1 < len; i += 2) {
            pairs.emplace_back(u[static_cast<std::size_t>(i)], u[static_cast<std::size_t>(i + 1)]);
            pairs.emplace_back(u[static_cast<std::size_t>(i + 1)], u[static_cast<std::size_t>(i)]);
        }
        if (len % 2 == 1) pairs.emplace_back(u[static_cast<std::size_t>(len - 1)], u[static_cast<std::size_t>(len - 1)]);
        PartialMap m(std::move(pairs));
        if (m == m.inverse() && is_partial_isomorphism(a, a, m)) return m;
    }
    std::vector<int> u = a.universe;
    shuffle_ids(rng, u);
    u.resize(static_cast<std::size_t>(pick(rng, static_cast<int>(u.size()) + 1)));
    return identity_map(u);
}

// distributes 1..max_total carrier elements over the sites, at least one each
std::map<int, int> site_sizes(std::mt19937& rng, const std::vector<int>& sites, int max_total) {
    std::map<int, int> out;
    int left = std::max(max_total, static_cast<int>(sites.size()));
    for (std::size_t i = 0; i < sites.size(); ++i) {
        int sites_after = static_cast<int>(sites.size() - i - 1);
        int cap = std::min(3, left - sites_after);
        out[sites[i]] = 1 + pick(rng, std::max(1, cap));
        left -= out[sites[i]];
    }
    return out;
}

void fill_link_maps(std::mt19937& rng, AmalgamationPattern& h, bool identity_biased) {
    for (const auto& [e, einv] : h.incidence.atoms()) {
        const LinkDecl& l = *h.incidence.link(e);
        const RelStructure& src = h.sites.at(l.src);
        const RelStructure& tgt = h.sites.at(l.tgt);
        if (e == einv) {
            h.links[e] = random_involution(rng, src);
        } else {
            bool bias = identity_biased && l.src == l.tgt && chance(rng, 1, 2);
            PartialMap m = bias ? random_partial_iso(rng, src, src, true) : random_partial_iso(rng, src, tgt, false);
            h.links[e] = m;
            h.links[einv] = m.inverse();
        }
    }
}

AmalgamationPattern generic_pattern(std::mt19937& rng, const FuzzBounds& b) {
    AmalgamationPattern h;
    h.incidence = random_incidence(rng, b);
    h.sig = fuzz_signature();
    int next_id = 0;
    for (const auto& [s, k] : site_sizes(rng, h.incidence.sites, b.max_carrier)) {
        std::vector<int> ids;
        for (int i = 0; i < k; ++i) ids.push_back(next_id++);
        h.sites[s] = random_structure(rng, ids, h.sig);
    }
    fill_link_maps(rng, h, false);
    return h;
}

AmalgamationPattern exploded_pattern(std::mt19937& rng) {
    int n = 3 + pick(rng, 4);
    std::vector<int> ids;
    for (int i = 0; i < n; ++i) ids.push_back(i);
    RelStructure base = random_structure(rng, ids, fuzz_signature());

    std::set<std::vector<int>> members;
    int windows = 2 + pick(rng, 2);
    for (int w = 0; w < windows; ++w) {
        std::vector<int> u = base.universe;
        shuffle_ids(rng, u);
        u.resize(static_cast<std::size_t>(std::min(n, 2 + pick(rng, n - 1))));
        std::sort(u.begin(), u.end());
        members.insert(u);
    }
    std::set<int> covered;
    for (const auto& m : members) covered.insert(m.begin(), m.end());
    std::vector<int> rest;
    for (int x : base.universe)
        if (!covered.count(x)) rest.push_back(x);
    if (!rest.empty()) members.insert(rest);
    for (const auto& [name, tuples] : base.relations) {
        for (const auto& t : tuples) {
            std::vector<int> support(t.begin(), t.end());
            std::sort(support.begin(), support.end());
            support.erase(std::unique(support.begin(), support.end()), support.end());
            bool inside = false;
            for (const auto& m : members)
                if (std::includes(m.begin(), m.end(), support.begin(), support.end())) inside = true;
            if (!inside) members.insert(support);
        }
    }
    std::vector<std::vector<int>> cover(members.begin(), members.end());
    return exploded_view(base, cover).pattern;
}

// relation-free sites of equal size with total bijections on every link
AmalgamationPattern complete_pattern_random(std::mt19937& rng, const FuzzBounds& b) {
    AmalgamationPattern h;
    h.incidence = random_incidence(rng, b);
    h.sig = Signature{};
    int nn = 2 + pick(rng, 2);
    int next_id = 0;
    for (int s : h.incidence.sites) {
        std::vector<int> ids;
        for (int i = 0; i < nn; ++i) ids.push_back(next_id++);
        RelStructure a;
        a.universe = ids;
        h.sites[s] = a;
    }
    for (const auto& [e, einv] : h.incidence.atoms()) {
        const LinkDecl& l = *h.incidence.link(e);
        std::vector<int> src = h.sites.at(l.src).universe;
        std::vector<int> tgt = h.sites.at(l.tgt).universe;
        shuffle_ids(rng, tgt);
        if (e == einv) {
            // involutive permutation: transpose shuffled elements pairwise
            std::vector<std::pair<int, int>> pairs;
            std::vector<int> u = src;
            shuffle_ids(rng, u);
            std::size_t i = 0;
            for (; i + 1 < u.size(); i += 2) {
                if (chance(rng, 1, 2)) {
                    pairs.emplace_back(u[i], u[i + 1]);
                    pairs.emplace_back(u[i + 1], u[i]);
                } else {
                    pairs.emplace_back(u[i], u[i]);
                    pairs.emplace_back(u[i + 1], u[i + 1]);
                }
            }
            if (i < u.size()) pairs.emplace_back(u[i], u[i]);
            h.links[e] = PartialMap(std::move(pairs));
        } else {
            std::vector<std::pair<int, int>> pairs;
            for (std::size_t i = 0; i < src.size(); ++i) pairs.emplace_back(src[i], tgt[i]);
            PartialMap m(std::move(pairs));
            h.links[e] = m;
            h.links[einv] = m.inverse();
        }
    }
    return h;
}

IncidencePattern shape_incidence(int shape) {
    switch (shape % 4) {
        case 0:
            // one site, a self-inverse loop and a regular loop atom
            return make_incidence({0}, {{"e1", 0, 0, "e1"}, {"e2", 0, 0, "e2i"}, {"e2i", 0, 0, "e2"}});
        case 1:
            return make_incidence({0, 1}, {{"e1", 0, 1, "e1i"}, {"e1i", 1, 0, "e1"}});
        case 2:
            return make_incidence({0, 1, 2}, {{"e1", 0, 1, "e1i"}, {"e1i", 1, 0, "e1"},
                                              {"e2", 1, 2, "e2i"}, {"e2i", 2, 1, "e2"}});
        default:
            return make_incidence({0, 1, 2}, {{"e1", 0, 1, "e1i"}, {"e1i", 1, 0, "e1"},
                                              {"e2", 1, 2, "e2i"}, {"e2i", 2, 1, "e2"},
                                              {"e3", 2, 0, "e3i"}, {"e3i", 0, 2, "e3"}});
    }
}

AmalgamationPattern shape_pattern(std::mt19937& rng, int shape) {
    AmalgamationPattern h;
    h.incidence = shape_incidence(shape);
    h.sig = make_signature({{"U", 1}});
    int next_id = 0;
    for (const auto& [s, k] : site_sizes(rng, h.incidence.sites, 8)) {
        std::vector<int> ids;
        for (int i = 0; i < k; ++i) ids.push_back(next_id++);
        h.sites[s] = random_structure(rng, ids, h.sig);
    }
    fill_link_maps(rng, h, true);
    return h;
}

std::string describe(const char* what, std::size_t index, const std::string& extra) {
    std::string s = std::string(what) + " #" + std::to_string(index);
    if (!extra.empty()) s += ": " + extra;
    return s;
}

}  // namespace

IncidencePattern random_incidence(std::mt19937& rng, const FuzzBounds& b) {
    int ns = 1 + pick(rng, std::max(1, b.max_sites));
    std::vector<int> sites;
    for (int s = 0; s < ns; ++s) sites.push_back(s);
    std::vector<LinkDecl> links;
    int atoms = pick(rng, std::max(1, b.max_atoms) + 1);
    for (int k = 0; k < atoms; ++k) {
        int src = pick(rng, ns);
        int tgt = pick(rng, ns);
        std::string id = "e" + std::to_string(k + 1);
        if (src == tgt && chance(rng, 1, 2)) {
            links.push_back({id, src, tgt, id});
        } else {
            links.push_back({id, src, tgt, id + "i"});
            links.push_back({id + "i", tgt, src, id});
        }
    }
    return make_incidence(std::move(sites), std::move(links));
}

AmalgamationPattern random_pattern(std::mt19937& rng, const FuzzBounds& b) {
    switch (pick(rng, 4)) {
        case 0:
        case 1:
            return generic_pattern(rng, b);
        case 2:
            return exploded_pattern(rng);
        default:
            return complete_pattern_random(rng, b);
    }
}

Hypergraph random_hypergraph(std::mt19937& rng, int max_vertices, int max_edges) {
    int n = 1 + pick(rng, max_vertices);
    std::vector<int> vertices;
    for (int v = 0; v < n; ++v) vertices.push_back(v);
    int m = 1 + pick(rng, max_edges);
    std::vector<std::vector<int>> edges;
    std::set<int> covered;
    for (int e = 0; e < m; ++e) {
        std::vector<int> edge;
        for (int v = 0; v < n; ++v)
            if (chance(rng, 1, 2)) edge.push_back(v);
        if (edge.empty()) edge.push_back(pick(rng, n));
        covered.insert(edge.begin(), edge.end());
        edges.push_back(std::move(edge));
    }
    for (int v = 0; v < n; ++v)
        if (!covered.count(v)) edges[static_cast<std::size_t>(pick(rng, m))].push_back(v);
    return make_hypergraph(std::move(vertices), std::move(edges));
}

std::vector<Hypergraph> all_hypergraphs(int max_vertices, int max_edges) {
    std::vector<Hypergraph> out;
    for (int v = 1; v <= max_vertices; ++v) {
        std::vector<int> vertices;
        for (int x = 0; x < v; ++x) vertices.push_back(x);
        std::vector<std::pair<std::vector<int>, unsigned>> subsets;  // (sorted subset, mask)
        for (unsigned mask = 1; mask < (1u << v); ++mask) {
            std::vector<int> s;
            for (int x = 0; x < v; ++x)
                if (mask & (1u << x)) s.push_back(x);
            subsets.emplace_back(std::move(s), mask);
        }
        unsigned full = (1u << v) - 1;
        std::vector<std::size_t> chosen;
        auto emit = [&]() {
            unsigned u = 0;
            for (std::size_t i : chosen) u |= subsets[i].second;
            if (u != full) return;
            std::vector<std::vector<int>> edges;
            for (std::size_t i : chosen) edges.push_back(subsets[i].first);
            out.push_back(make_hypergraph(vertices, std::move(edges)));
        };
        auto rec = [&](auto&& self, std::size_t start) -> void {
            if (!chosen.empty()) emit();
            if (static_cast<int>(chosen.size()) == max_edges) return;
            for (std::size_t i = start; i < subsets.size(); ++i) {
                chosen.push_back(i);
                self(self, i + 1);
                chosen.pop_back();
            }
        };
        rec(rec, 0);
    }
    return out;
}

EnumeratedClosure closure_by_enumeration(const AmalgamationPattern& h, int max_len) {
    EnumeratedClosure out;
    std::map<std::tuple<int, int, PartialMap>, Walk> seen;
    std::vector<std::tuple<int, int, PartialMap, Walk>> frontier;
    for (int s : h.incidence.sites) {
        PartialMap id = identity_map(h.site(s).universe);
        seen[{s, s, id}] = empty_walk(s);
        frontier.emplace_back(s, s, id, empty_walk(s));
    }
    out.stabilized = false;
    for (int len = 1; len <= max_len; ++len) {
        std::vector<std::tuple<int, int, PartialMap, Walk>> next;
        for (const auto& [src, tgt, m, w] : frontier) {
            for (const LinkDecl& l : h.incidence.links) {
                if (l.src != tgt) continue;
                PartialMap m2 = compose_partial(m, h.rho(l.id));
                auto key = std::make_tuple(src, l.tgt, m2);
                if (seen.count(key)) continue;
                Walk w2 = append_link(h.incidence, w, l.id);
                seen.emplace(key, w2);
                next.emplace_back(src, l.tgt, m2, w2);
            }
        }
        if (next.empty()) {
            out.stabilized = true;
            break;
        }
        frontier = std::move(next);
    }
    if (!out.stabilized && max_len >= 0) {
        // one more sweep: stabilized iff the last frontier only reproduces known maps
        bool grew = false;
        for (const auto& [src, tgt, m, w] : frontier) {
            for (const LinkDecl& l : h.incidence.links) {
                if (l.src != tgt) continue;
                if (!seen.count({src, l.tgt, compose_partial(m, h.rho(l.id))})) grew = true;
            }
        }
        out.stabilized = !grew;
    }
    for (auto& [key, w] : seen) {
        ClosureEntry e;
        e.src = std::get<0>(key);
        e.tgt = std::get<1>(key);
        e.map = std::get<2>(key);
        e.witness = w;
        out.entries.push_back(std::move(e));
    }
    return out;
}

std::vector<PoolEntry> product_pool(std::size_t count, std::uint64_t seed, Budget& budget) {
    std::vector<PoolEntry> pool;
    std::mt19937 rng(static_cast<std::mt19937::result_type>(seed));
    std::size_t attempts = 0;
    std::size_t max_attempts = count * 40 + 200;
    while (pool.size() < count && attempts < max_attempts && !budget.exhausted()) {
        int shape = static_cast<int>(attempts % 5);
        ++attempts;
        if (shape == 4) {
            // action groupoid of a complete pattern
            FuzzBounds b;
            b.max_sites = 2;
            b.max_atoms = 2;
            AmalgamationPattern h = complete_pattern_random(rng, b);
            Groupoid g = groupoid_from_action(h);
            if (!is_compatible(g, h).value) continue;
            PoolEntry e{h, g, 0};
            CoherenceVerdict co = is_coherent(h);
            if (co.complete && co.value && is_simple_groupoid(g)) {
                for (int n : {3, 2}) {
                    AcyclicityVerdict ac = is_n_acyclic(g, n, budget);
                    if (ac.exhaustive && ac.value) {
                        e.n_acyclic = n;
                        break;
                    }
                }
            }
            pool.push_back(std::move(e));
            continue;
        }
        AmalgamationPattern h = shape_pattern(rng, shape);
        CoherenceVerdict co = is_coherent(h);
        Groupoid found;
        int level = 0;
        for (int n : {3, 2}) {
            GroupoidSearchResult r = search_groupoid(h.incidence, h, n, 160, budget);
            if (r.groupoid) {
                found = *r.groupoid;
                level = n;
                break;
            }
            if (budget.exhausted()) break;
        }
        if (level == 0) continue;
        // acyclicity tags are reserved for pairs meeting the product-lemma hypotheses
        if (!(co.complete && co.value && is_simple_groupoid(found))) level = 0;
        pool.push_back({std::move(h), std::move(found), level});
    }
    return pool;
}

FuzzReport fuzz_consistency_hierarchy(std::size_t count, std::uint64_t seed) {
    FuzzReport rep;
    std::mt19937 rng(static_cast<std::mt19937::result_type>(seed));
    FuzzBounds b;
    for (std::size_t i = 0; i < count; ++i) {
        AmalgamationPattern h = random_pattern(rng, b);
        if (!validate_pattern(h).ok()) {
            rep.violations.push_back(describe("pattern", i, "generator produced an invalid pattern"));
            continue;
        }
        ++rep.instances;
        CoherenceVerdict sc = is_strongly_coherent(h);
        CoherenceVerdict co = is_coherent(h);
        GlobalConsistencyVerdict gc = is_globally_consistent(h);
        if (sc.complete && sc.value && !gc.value)
            rep.violations.push_back(describe("pattern", i, "strongly coherent but not globally consistent"));
        if (gc.value && co.complete && !co.value)
            rep.violations.push_back(describe("pattern", i, "globally consistent but not coherent"));
    }
    return rep;
}

FuzzReport fuzz_closure_oracle(std::size_t count, std::uint64_t seed) {
    FuzzReport rep;
    std::mt19937 rng(static_cast<std::mt19937::result_type>(seed));
    FuzzBounds b;
    for (std::size_t i = 0; i < count; ++i) {
        AmalgamationPattern h = random_pattern(rng, b);
        WalkMapClosure cl = closure(h);
        EnumeratedClosure oracle = closure_by_enumeration(h, 8);
        if (!cl.complete || !oracle.stabilized) continue;
        ++rep.instances;
        auto triples = [](const std::vector<ClosureEntry>& es) {
            std::vector<std::tuple<int, int, PartialMap>> out;
            for (const auto& e : es) out.emplace_back(e.src, e.tgt, e.map);
            std::sort(out.begin(), out.end());
            return out;
        };
        if (triples(cl.entries) != triples(oracle.entries)) {
            rep.violations.push_back(describe("pattern", i, "closure disagrees with walk enumeration"));
            continue;
        }
        for (const auto& e : cl.entries) {
            auto ends = walk_iota(h.incidence, e.witness);
            if (ends.first != e.src || ends.second != e.tgt || rho_of_walk(h, e.witness) != e.map) {
                rep.violations.push_back(describe("pattern", i, "closure witness does not recompute its map"));
                break;
            }
        }
    }
    return rep;
}

FuzzReport fuzz_quotient_realisation(std::size_t count, std::uint64_t seed) {
    FuzzReport rep;
    std::mt19937 rng(static_cast<std::mt19937::result_type>(seed));
    FuzzBounds b;
    for (std::size_t i = 0; i < count; ++i) {
        AmalgamationPattern h = random_pattern(rng, b);
        CoherenceVerdict sc = is_strongly_coherent(h);
        CoherenceVerdict si = is_simple(h);
        if (!(sc.complete && sc.value && si.complete && si.value)) continue;
        ++rep.instances;
        try {
            Quotient q = quotient(h);
            ValidationReport vr = verify_realisation(q.realisation, h);
            if (!vr.ok()) rep.violations.push_back(describe("pattern", i, vr.violations.front()));
        } catch (const Error& err) {
            rep.violations.push_back(describe("pattern", i, err.what()));
        }
    }
    return rep;
}

FuzzReport check_product_coherence(const std::vector<PoolEntry>& pool) {
    FuzzReport rep;
    for (std::size_t i = 0; i < pool.size(); ++i) {
        const PoolEntry& e = pool[i];
        ++rep.instances;
        try {
            DirectProduct dp = direct_product(e.h, e.g);
            ValidationReport vp = validate_pattern(dp.pattern);
            if (!vp.ok()) {
                rep.violations.push_back(describe("pair", i, "product pattern invalid: " + vp.violations.front()));
                continue;
            }
            CoherenceVerdict co = is_coherent(dp.pattern);
            if (co.complete && !co.value) {
                rep.violations.push_back(describe("pair", i, "product of a compatible groupoid is not coherent"));
                continue;
            }
            if (e.n_acyclic >= 2) {
                CoherenceVerdict sp = is_simple(dp.pattern);
                CoherenceVerdict st = is_strongly_coherent(dp.pattern);
                if (sp.complete && !sp.value)
                    rep.violations.push_back(describe("pair", i, "product should be simple"));
                if (st.complete && !st.value)
                    rep.violations.push_back(describe("pair", i, "product should be strongly coherent"));
            }
        } catch (const Error& err) {
            rep.violations.push_back(describe("pair", i, err.what()));
        }
    }
    return rep;
}

FuzzReport check_reduced_product_realisations(const std::vector<PoolEntry>& pool) {
    FuzzReport rep;
    for (std::size_t i = 0; i < pool.size(); ++i) {
        const PoolEntry& e = pool[i];
        if (e.n_acyclic < 2) continue;
        ++rep.instances;
        try {
            ReducedProduct rp = reduced_product(e.h, e.g);
            ValidationReport vr = verify_realisation(rp.realisation, e.h);
            if (!vr.ok()) {
                rep.violations.push_back(describe("pair", i, vr.violations.front()));
                continue;
            }
            RigidSymmetryReport rs = rigid_symmetries(rp);
            if (!rs.transitive)
                rep.violations.push_back(describe("pair", i, "rigid symmetries are not transitive on every fibre"));
        } catch (const Error& err) {
            rep.violations.push_back(describe("pair", i, err.what()));
        }
    }
    return rep;
}

FuzzReport check_atlas_acyclicity(const std::vector<PoolEntry>& pool) {
    FuzzReport rep;
    for (std::size_t i = 0; i < pool.size(); ++i) {
        const PoolEntry& e = pool[i];
        if (e.n_acyclic < 2) continue;
        ++rep.instances;
        try {
            ReducedProduct rp = reduced_product(e.h, e.g);
            HypAcyclicityVerdict ac = is_n_acyclic_hyp(atlas_hypergraph(rp.realisation), e.n_acyclic);
            if (!ac.value)
                rep.violations.push_back(
                    describe("pair", i, "atlas not " + std::to_string(e.n_acyclic) + "-acyclic"));
        } catch (const Error& err) {
            rep.violations.push_back(describe("pair", i, err.what()));
        }
    }
    return rep;
}

FuzzReport fuzz_hypergraph_coverings(std::size_t count, std::uint64_t seed, Budget& budget) {
    FuzzReport rep;
    std::mt19937 rng(static_cast<std::mt19937::result_type>(seed));
    for (std::size_t i = 0; i < count; ++i) {
        Hypergraph base = random_hypergraph(rng, 5, 3);
        ExplodedView ev = exploded_view_hyp(base);
        GlobalConsistencyVerdict gc = is_globally_consistent(ev.pattern);
        if (!gc.value) {
            rep.violations.push_back(describe("hypergraph", i, "exploded view not globally consistent"));
            continue;
        }
        try {
            ++rep.instances;
            Quotient q = quotient(ev.pattern);
            HypergraphCovering cov = covering_from_realisation(q.realisation, ev, base);
            ValidationReport v1 = verify_hyp_covering(cov);
            ValidationReport v2 = verify_hyp_covering_union_form(cov);
            if (!v1.ok()) rep.violations.push_back(describe("hypergraph", i, v1.violations.front()));
            if (v1.ok() != v2.ok())
                rep.violations.push_back(describe("hypergraph", i, "covering verifier formulations disagree"));
        } catch (const Error& err) {
            rep.violations.push_back(describe("hypergraph", i, err.what()));
        }
        GroupoidSearchResult r = search_groupoid(ev.pattern.incidence, ev.pattern, 2, 160, budget);
        if (!r.groupoid) continue;
        try {
            ++rep.instances;
            ReducedProduct rp = reduced_product(ev.pattern, *r.groupoid);
            HypergraphCovering cov = covering_from_realisation(rp.realisation, ev, base);
            ValidationReport v1 = verify_hyp_covering(cov);
            ValidationReport v2 = verify_hyp_covering_union_form(cov);
            if (!v1.ok()) rep.violations.push_back(describe("hypergraph", i, v1.violations.front()));
            if (v1.ok() != v2.ok())
                rep.violations.push_back(describe("hypergraph", i, "covering verifier formulations disagree"));
        } catch (const Error& err) {
            rep.violations.push_back(describe("hypergraph", i, err.what()));
        }
    }
    return rep;
}

}  // namespace amalgam
