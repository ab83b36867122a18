#include "amalgam/pattern.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "amalgam/util.hpp"

namespace amalgam {

const RelStructure& AmalgamationPattern::site(int s) const {
    auto it = sites.find(s);
    if (it == sites.end()) throw PreconditionError("unknown site: " + std::to_string(s));
    return it->second;
}

const PartialMap& AmalgamationPattern::rho(const std::string& link_id) const {
    auto it = links.find(link_id);
    if (it == links.end()) throw PreconditionError("no map for link: " + link_id);
    return it->second;
}

RelStructure AmalgamationPattern::carrier() const {
    std::vector<const RelStructure*> parts;
    for (const auto& [s, str] : sites) parts.push_back(&str);
    return disjoint_union(sig, parts);
}

std::optional<int> AmalgamationPattern::site_of(int element) const {
    for (const auto& [s, str] : sites)
        if (str.has_element(element)) return s;
    return std::nullopt;
}

ValidationReport validate_pattern(const AmalgamationPattern& h) {
    ValidationReport rep = validate_incidence(h.incidence);
    std::vector<int> seen;
    for (int s : h.incidence.sites) {
        auto it = h.sites.find(s);
        if (it == h.sites.end()) {
            rep.fail("site " + std::to_string(s) + " has no structure");
            continue;
        }
        const RelStructure& str = it->second;
        if (str.universe.empty()) rep.fail("site " + std::to_string(s) + " is empty");
        if (!(str.sig == h.sig)) rep.fail("site " + std::to_string(s) + " deviates from the pattern signature");
        ValidationReport inner = validate_structure(str);
        for (auto& v : inner.violations) rep.fail("site " + std::to_string(s) + ": " + v);
        for (int e : str.universe) {
            if (contains(seen, e)) rep.fail("element " + std::to_string(e) + " occurs in two sites");
        }
        seen = unite(seen, str.universe);
    }
    for (const auto& [s, str] : h.sites)
        if (!h.incidence.has_site(s)) rep.fail("structure given for unknown site " + std::to_string(s));
    if (!rep.ok()) return rep;
    for (const auto& l : h.incidence.links) {
        auto it = h.links.find(l.id);
        if (it == h.links.end()) {
            rep.fail("link " + l.id + " has no map");
            continue;
        }
        const PartialMap& m = it->second;
        const RelStructure& src = h.site(l.src);
        const RelStructure& tgt = h.site(l.tgt);
        bool typed = true;
        for (const auto& [a, b] : m.pairs()) {
            if (!src.has_element(a) || !tgt.has_element(b)) {
                rep.fail("link " + l.id + " maps outside its sites");
                typed = false;
                break;
            }
        }
        if (typed && !is_partial_isomorphism(src, tgt, m))
            rep.fail("link " + l.id + " is not a partial isomorphism");
        const auto rit = h.links.find(l.inv);
        if (rit != h.links.end() && !(rit->second == m.inverse()))
            rep.fail("map of link " + l.inv + " is not the inverse of the map of " + l.id);
    }
    for (const auto& [id, m] : h.links)
        if (!h.incidence.link(id)) rep.fail("map given for unknown link " + id);
    return rep;
}

PartialMap rho_of_walk(const AmalgamationPattern& h, const Walk& w) {
    auto [s, t] = walk_iota(h.incidence, w);
    PartialMap acc = identity_map(h.site(s).universe);
    for (const auto& id : w.links) acc = compose_partial(acc, h.rho(id));
    return acc;
}

const ClosureEntry* WalkMapClosure::find(int src, int tgt, const PartialMap& m) const {
    auto key_less = [](const ClosureEntry& e, const std::tuple<int, int, const PartialMap*>& k) {
        if (e.src != std::get<0>(k)) return e.src < std::get<0>(k);
        if (e.tgt != std::get<1>(k)) return e.tgt < std::get<1>(k);
        return e.map < *std::get<2>(k);
    };
    auto it = std::lower_bound(entries.begin(), entries.end(), std::tuple<int, int, const PartialMap*>{src, tgt, &m},
                               key_less);
    if (it != entries.end() && it->src == src && it->tgt == tgt && it->map == m) return &*it;
    return nullptr;
}

std::vector<const ClosureEntry*> WalkMapClosure::at(int src, int tgt) const {
    std::vector<const ClosureEntry*> out;
    for (const auto& e : entries)
        if (e.src == src && e.tgt == tgt) out.push_back(&e);
    return out;
}

WalkMapClosure closure(const AmalgamationPattern& h, std::uint64_t cap) {
    WalkMapClosure out;
    std::set<std::tuple<int, int, PartialMap>> seen;
    std::vector<ClosureEntry> frontier;
    for (int s : h.incidence.sites) {
        ClosureEntry e{s, s, identity_map(h.site(s).universe), empty_walk(s)};
        seen.emplace(e.src, e.tgt, e.map);
        out.entries.push_back(e);
        frontier.push_back(std::move(e));
    }
    while (!frontier.empty() && out.complete) {
        std::vector<ClosureEntry> next;
        for (const ClosureEntry& cur : frontier) {
            for (const auto& l : h.incidence.links) {
                if (l.src != cur.tgt) continue;
                PartialMap ext = compose_partial(cur.map, h.rho(l.id));
                if (!seen.emplace(cur.src, l.tgt, ext).second) continue;
                if (out.entries.size() >= cap) {
                    out.complete = false;
                    break;
                }
                Walk wit = cur.witness;
                wit.links.push_back(l.id);
                ClosureEntry e{cur.src, l.tgt, std::move(ext), std::move(wit)};
                out.entries.push_back(e);
                next.push_back(std::move(e));
            }
            if (!out.complete) break;
        }
        frontier = std::move(next);
    }
    std::sort(out.entries.begin(), out.entries.end(), [](const ClosureEntry& a, const ClosureEntry& b) {
        if (a.src != b.src) return a.src < b.src;
        if (a.tgt != b.tgt) return a.tgt < b.tgt;
        return a.map < b.map;
    });
    return out;
}

CoherenceVerdict is_coherent(const AmalgamationPattern& h, std::uint64_t cap) {
    WalkMapClosure cl = closure(h, cap);
    CoherenceVerdict v;
    v.complete = cl.complete;
    for (const auto& e : cl.entries) {
        if (e.src == e.tgt && !e.map.is_identity_restriction()) {
            v.value = false;
            v.witness_walk = e.witness;
            return v;
        }
    }
    v.value = true;
    return v;
}

CoherenceVerdict is_simple(const AmalgamationPattern& h, std::uint64_t cap) {
    WalkMapClosure cl = closure(h, cap);
    CoherenceVerdict v;
    v.complete = cl.complete;
    for (const auto& l : h.incidence.links) {
        const PartialMap& direct = h.rho(l.id);
        for (const auto& e : cl.entries) {
            if (e.src != l.src || e.tgt != l.tgt) continue;
            if (!direct.extends(e.map)) {
                v.value = false;
                v.witness_link = l.id;
                v.witness_walk = e.witness;
                return v;
            }
        }
    }
    v.value = true;
    return v;
}

CoherenceVerdict is_strongly_coherent(const AmalgamationPattern& h, std::uint64_t cap) {
    WalkMapClosure cl = closure(h, cap);
    CoherenceVerdict v;
    v.complete = cl.complete;
    for (std::size_t i = 0; i < cl.entries.size(); ++i) {
        for (std::size_t j = i + 1; j < cl.entries.size(); ++j) {
            const ClosureEntry& a = cl.entries[i];
            const ClosureEntry& b = cl.entries[j];
            if (a.src != b.src || a.tgt != b.tgt) continue;
            std::optional<PartialMap> joined = union_partial(a.map, b.map);
            bool extended = false;
            if (joined) {
                for (const auto& c : cl.entries) {
                    if (c.src == a.src && c.tgt == a.tgt && c.map.extends(*joined)) {
                        extended = true;
                        break;
                    }
                }
            }
            if (!extended) {
                v.value = false;
                v.witness_pair = std::make_pair(a.witness, b.witness);
                return v;
            }
        }
    }
    v.value = true;
    return v;
}

namespace {

struct UnionFind {
    std::map<int, int> parent;
    int find(int x) {
        auto it = parent.find(x);
        if (it == parent.end()) {
            parent[x] = x;
            return x;
        }
        if (it->second == x) return x;
        int root = find(it->second);
        parent[x] = root;
        return root;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace

ApproxPartition approx(const AmalgamationPattern& h) {
    UnionFind uf;
    for (const auto& [s, str] : h.sites)
        for (int a : str.universe) uf.find(a);
    for (const auto& [id, m] : h.links)
        for (const auto& [a, b] : m.pairs()) uf.unite(a, b);
    std::map<int, std::vector<int>> grouped;
    for (const auto& [elem, _] : uf.parent) grouped[uf.find(elem)].push_back(elem);
    ApproxPartition part;
    for (auto& [root, members] : grouped) {
        sort_unique(members);
        part.classes.push_back(std::move(members));
    }
    std::sort(part.classes.begin(), part.classes.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    return part;
}

int ApproxPartition::class_of(int element) const {
    for (std::size_t i = 0; i < classes.size(); ++i)
        if (contains(classes[i], element)) return (int)i;
    return -1;
}

GlobalConsistencyVerdict is_globally_consistent(const AmalgamationPattern& h) {
    ApproxPartition part = approx(h);
    GlobalConsistencyVerdict v;
    for (const auto& cls : part.classes) {
        std::set<int> sites_met;
        for (int a : cls) {
            int s = *h.site_of(a);
            if (!sites_met.insert(s).second) {
                v.value = false;
                v.reason = "a class meets site " + std::to_string(s) + " twice";
                v.witness_class = cls;
                return v;
            }
        }
    }
    // quotient structure: classes as elements, relations are the union of per-site images
    std::map<int, int> cls_of;
    for (std::size_t i = 0; i < part.classes.size(); ++i)
        for (int a : part.classes[i]) cls_of[a] = (int)i;
    RelStructure q;
    q.sig = h.sig;
    for (std::size_t i = 0; i < part.classes.size(); ++i) q.universe.push_back((int)i);
    for (const auto& [s, str] : h.sites) {
        for (const auto& [name, tuples] : str.relations) {
            for (const auto& t : tuples) {
                std::vector<int> mapped;
                mapped.reserve(t.size());
                for (int e : t) mapped.push_back(cls_of.at(e));
                q.relations[name].insert(std::move(mapped));
            }
        }
    }
    // each chart must be an isomorphism between the induced quotient substructure and the site template
    for (const auto& [s, str] : h.sites) {
        std::vector<std::pair<int, int>> chart_pairs;
        for (int a : str.universe) chart_pairs.emplace_back(cls_of.at(a), a);
        PartialMap chart(std::move(chart_pairs));
        RelStructure induced = induced_substructure(q, chart.domain());
        if (!is_isomorphism_onto(induced, str, chart)) {
            v.value = false;
            v.reason = "chart at site " + std::to_string(s) + " is not an isomorphism onto the site template";
            return v;
        }
    }
    v.value = true;
    return v;
}

std::vector<const Chart*> Realisation::charts_at(int site) const {
    std::vector<const Chart*> out;
    for (const auto& c : charts)
        if (c.site == site) out.push_back(&c);
    return out;
}

std::vector<std::vector<int>> Realisation::domains() const {
    std::vector<std::vector<int>> out;
    for (const auto& c : charts) out.push_back(c.domain);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

Quotient quotient(const AmalgamationPattern& h) {
    GlobalConsistencyVerdict gc = is_globally_consistent(h);
    if (!gc.value) throw PreconditionError("quotient: pattern is not globally consistent (" + gc.reason + ")");
    Quotient out;
    out.partition = approx(h);
    for (std::size_t i = 0; i < out.partition.classes.size(); ++i)
        for (int a : out.partition.classes[i]) out.class_id[a] = (int)i;
    RelStructure q;
    q.sig = h.sig;
    for (std::size_t i = 0; i < out.partition.classes.size(); ++i) q.universe.push_back((int)i);
    for (const auto& [s, str] : h.sites)
        for (const auto& [name, tuples] : str.relations)
            for (const auto& t : tuples) {
                std::vector<int> mapped;
                mapped.reserve(t.size());
                for (int e : t) mapped.push_back(out.class_id.at(e));
                q.relations[name].insert(std::move(mapped));
            }
    out.realisation.structure = std::move(q);
    for (const auto& [s, str] : h.sites) {
        Chart c;
        c.site = s;
        std::vector<std::pair<int, int>> pairs;
        for (int a : str.universe) pairs.emplace_back(out.class_id.at(a), a);
        c.map = PartialMap(std::move(pairs));
        c.domain = c.map.domain();
        out.realisation.charts.push_back(std::move(c));
    }
    return out;
}

ExplodedView exploded_view(const RelStructure& a, const std::vector<std::vector<int>>& cover) {
    ExplodedView out;
    for (const auto& member : cover) {
        std::vector<int> m = member;
        sort_unique(m);
        if (m.empty()) throw PreconditionError("exploded_view: empty cover member");
        for (int e : m)
            if (!a.has_element(e)) throw PreconditionError("exploded_view: cover member leaves the universe");
        out.cover.push_back(std::move(m));
    }
    std::vector<int> covered;
    for (const auto& m : out.cover) covered = unite(covered, m);
    for (int e : a.universe)
        if (!contains(covered, e))
            throw PreconditionError("exploded_view: element " + std::to_string(e) + " is not covered");
    for (const auto& [name, tuples] : a.relations)
        for (const auto& t : tuples) {
            bool inside = false;
            for (const auto& m : out.cover) {
                bool all = true;
                for (int e : t)
                    if (!contains(m, e)) {
                        all = false;
                        break;
                    }
                if (all) {
                    inside = true;
                    break;
                }
            }
            if (!inside) {
                std::ostringstream os;
                os << "exploded_view: tuple of " << name << " (";
                for (std::size_t i = 0; i < t.size(); ++i) os << (i ? "," : "") << t[i];
                os << ") is not inside any cover member";
                throw PreconditionError(os.str());
            }
        }

    int next_id = 0;
    for (std::size_t m = 0; m < out.cover.size(); ++m)
        for (int b : out.cover[m]) {
            out.id_of[{(int)m, b}] = next_id;
            out.origin_of[next_id] = {(int)m, b};
            ++next_id;
        }

    AmalgamationPattern& h = out.pattern;
    h.sig = a.sig;
    std::vector<int> sites;
    std::vector<LinkDecl> links;
    for (std::size_t m = 0; m < out.cover.size(); ++m) sites.push_back((int)m);
    for (std::size_t m = 0; m < out.cover.size(); ++m) {
        RelStructure str;
        str.sig = a.sig;
        for (int b : out.cover[m]) str.universe.push_back(out.id_of.at({(int)m, b}));
        sort_unique(str.universe);
        for (const auto& [name, tuples] : a.relations)
            for (const auto& t : tuples) {
                std::vector<int> mapped;
                bool all = true;
                for (int e : t) {
                    if (!contains(out.cover[m], e)) {
                        all = false;
                        break;
                    }
                    mapped.push_back(out.id_of.at({(int)m, e}));
                }
                if (all) str.relations[name].insert(std::move(mapped));
            }
        h.sites[(int)m] = std::move(str);
    }
    for (std::size_t m = 0; m < out.cover.size(); ++m)
        for (std::size_t n = 0; n < out.cover.size(); ++n) {
            if (m == n) continue;
            std::vector<int> shared = intersect(out.cover[m], out.cover[n]);
            if (shared.empty()) continue;
            std::string id = "p" + std::to_string(m) + "_" + std::to_string(n);
            std::string inv = "p" + std::to_string(n) + "_" + std::to_string(m);
            links.push_back(LinkDecl{id, (int)m, (int)n, inv});
            std::vector<std::pair<int, int>> pairs;
            for (int b : shared) pairs.emplace_back(out.id_of.at({(int)m, b}), out.id_of.at({(int)n, b}));
            h.links[id] = PartialMap(std::move(pairs));
        }
    h.incidence = make_incidence(std::move(sites), std::move(links));
    return out;
}

MultiSortedInstance pattern_to_multisorted(const AmalgamationPattern& h) {
    MultiSortedInstance m;
    std::vector<int> link_idx;
    std::map<std::string, int> idx_of_link;
    {
        int i = 0;
        for (const auto& l : h.incidence.links) {
            idx_of_link[l.id] = i;
            link_idx.push_back(i);
            ++i;
        }
    }
    std::vector<int> carrier;
    for (const auto& [s, str] : h.sites) carrier = unite(carrier, str.universe);
    m.sorts.emplace_back("S", h.incidence.sites);
    m.sorts.emplace_back("E", link_idx);
    m.sorts.emplace_back("H", carrier);
    for (const auto& l : h.incidence.links) m.labels["E"][idx_of_link[l.id]] = l.id;

    SortedFunction iota1{"iota1", "E", "S", {}};
    SortedFunction iota2{"iota2", "E", "S", {}};
    SortedFunction inv{"inv", "E", "E", {}};
    for (const auto& l : h.incidence.links) {
        iota1.values[idx_of_link[l.id]] = l.src;
        iota2.values[idx_of_link[l.id]] = l.tgt;
        inv.values[idx_of_link[l.id]] = idx_of_link[l.inv];
    }
    SortedFunction delta{"delta", "H", "S", {}};
    for (const auto& [s, str] : h.sites)
        for (int a : str.universe) delta.values[a] = s;
    m.functions = {iota1, iota2, inv, delta};

    SortedRelation link_graph{"link_graph", {"E", "H", "H"}, {}};
    for (const auto& [id, rho] : h.links)
        for (const auto& [a, b] : rho.pairs()) link_graph.tuples.insert({idx_of_link[id], a, b});
    m.relations.push_back(std::move(link_graph));
    for (const auto& sym : h.sig.symbols) {
        SortedRelation r{"rel_" + sym.name, std::vector<std::string>(sym.arity, "H"), {}};
        for (const auto& [s, str] : h.sites)
            for (const auto& t : str.tuples(sym.name)) r.tuples.insert(t);
        m.relations.push_back(std::move(r));
    }
    return m;
}

AmalgamationPattern multisorted_to_pattern(const MultiSortedInstance& m) {
    const auto* site_sort = m.carrier("S");
    const auto* link_sort = m.carrier("E");
    const auto* elem_sort = m.carrier("H");
    if (!site_sort || !link_sort || !elem_sort)
        throw PreconditionError("multisorted_to_pattern: missing sort S, E or H");
    auto fn = [&](const std::string& name) -> const SortedFunction* {
        for (const auto& f : m.functions)
            if (f.name == name) return &f;
        return nullptr;
    };
    const SortedFunction* iota1 = fn("iota1");
    const SortedFunction* iota2 = fn("iota2");
    const SortedFunction* inv = fn("inv");
    const SortedFunction* delta = fn("delta");
    if (!iota1 || !iota2 || !inv || !delta) throw PreconditionError("multisorted_to_pattern: missing function");

    auto label = [&](int e) {
        auto it = m.labels.find("E");
        if (it != m.labels.end()) {
            auto jt = it->second.find(e);
            if (jt != it->second.end()) return jt->second;
        }
        return "L" + std::to_string(e);
    };

    AmalgamationPattern h;
    std::vector<RelSymbol> syms;
    for (const auto& r : m.relations) {
        if (r.name.rfind("rel_", 0) == 0) syms.push_back(RelSymbol{r.name.substr(4), (int)r.profile.size()});
    }
    h.sig = make_signature(std::move(syms));

    std::vector<LinkDecl> links;
    for (int e : *link_sort)
        links.push_back(LinkDecl{label(e), iota1->values.at(e), iota2->values.at(e), label(inv->values.at(e))});
    h.incidence = make_incidence(*site_sort, std::move(links));

    for (int s : *site_sort) {
        RelStructure str;
        str.sig = h.sig;
        for (int a : *elem_sort)
            if (delta->values.at(a) == s) str.universe.push_back(a);
        sort_unique(str.universe);
        h.sites[s] = std::move(str);
    }
    for (const auto& r : m.relations) {
        if (r.name.rfind("rel_", 0) == 0) {
            for (const auto& t : r.tuples) {
                int s = delta->values.at(t.front());
                h.sites[s].relations[r.name.substr(4)].insert(t);
            }
        } else if (r.name == "link_graph") {
            std::map<int, std::vector<std::pair<int, int>>> pairs;
            for (const auto& t : r.tuples) pairs[t[0]].emplace_back(t[1], t[2]);
            for (int e : *link_sort) h.links[label(e)] = PartialMap(pairs.count(e) ? pairs[e] : std::vector<std::pair<int, int>>{});
        }
    }
    for (int e : *link_sort)
        if (!h.links.count(label(e))) h.links[label(e)] = PartialMap();
    return h;
}

SymmetrySearchResult pattern_symmetries(const AmalgamationPattern& h, bool i_rigid, Budget& budget) {
    MultiSortedInstance m = pattern_to_multisorted(h);
    std::set<std::string> rigid;
    if (i_rigid) rigid = {"S", "E"};
    return find_symmetries(m, rigid, budget);
}

}  // namespace amalgam
