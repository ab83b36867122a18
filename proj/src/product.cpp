#include "amalgam/product.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <future>
#include <map>
#include <set>
#include <string>
#include <thread>
#include <tuple>
#include <utility>
#include <vector>

#include "amalgam/util.hpp"

namespace amalgam {

namespace {

std::string elem_str(int x) { return std::to_string(x); }
std::string chart_str(std::size_t i) { return "#" + std::to_string(i); }

// run fn(i, report) for i in [0, n); large ranges fan out to worker threads,
// reports merge in chunk order so the outcome is deterministic either way
void indexed_parallel(std::size_t n, const std::function<void(std::size_t, ValidationReport&)>& fn,
                      ValidationReport& out) {
    unsigned hw = std::thread::hardware_concurrency();
    if (n < 64 || hw < 2) {
        for (std::size_t i = 0; i < n; ++i) fn(i, out);
        return;
    }
    std::size_t chunks = std::min<std::size_t>(hw, (n + 63) / 64);
    std::vector<std::future<ValidationReport>> futures;
    futures.reserve(chunks);
    for (std::size_t c = 0; c < chunks; ++c) {
        futures.push_back(std::async(std::launch::async, [&fn, c, chunks, n]() {
            ValidationReport rep;
            for (std::size_t i = c * n / chunks; i < (c + 1) * n / chunks; ++i) fn(i, rep);
            return rep;
        }));
    }
    for (auto& f : futures) {
        ValidationReport rep = f.get();
        for (auto& v : rep.violations) out.violations.push_back(std::move(v));
        for (auto& w : rep.warnings) out.warnings.push_back(std::move(w));
    }
}

// map chart_a's template through the shared domain into chart_b's template;
// domain is exactly the image of the domain overlap under chart_a
PartialMap overlap_map(const Chart& a, const Chart& b) {
    return compose_partial(a.map.inverse(), b.map);
}

}  // namespace

DirectProduct direct_product(const AmalgamationPattern& h, const Groupoid& g) {
    if (!(h.incidence == g.incidence))
        throw PreconditionError("direct_product: pattern and groupoid live over different incidence patterns");

    DirectProduct out;
    out.pattern.incidence = cayley_incidence(g);
    out.pattern.sig = h.sig;

    int next = 0;
    for (int ge : g.elements) {
        int s = g.sorts.at(ge).second;
        const RelStructure& tmpl = h.site(s);
        RelStructure copy;
        copy.sig = h.sig;
        for (int a : tmpl.universe) {
            out.id_of[{a, ge}] = next;
            out.origin_of[next] = {a, ge};
            copy.universe.push_back(next);
            ++next;
        }
        for (const auto& [name, tuples] : tmpl.relations)
            for (const auto& t : tuples) {
                std::vector<int> mapped;
                mapped.reserve(t.size());
                for (int a : t) mapped.push_back(out.id_of.at({a, ge}));
                copy.relations[name].insert(std::move(mapped));
            }
        out.pattern.sites[ge] = std::move(copy);
    }

    for (const auto& l : h.incidence.links) {
        const PartialMap& rho = h.rho(l.id);
        int eg = g.gen(l.id);
        for (int x : g.elements) {
            if (g.sorts.at(x).second != l.src) continue;
            int y = g.compose(x, eg);
            std::vector<std::pair<int, int>> pairs;
            for (const auto& [a, b] : rho.pairs()) pairs.emplace_back(out.id_of.at({a, x}), out.id_of.at({b, y}));
            out.pattern.links[l.id + "@" + elem_str(x)] = PartialMap(std::move(pairs));
        }
    }
    return out;
}

PatternCovering projection_covering(const AmalgamationPattern& h, const Groupoid& g) {
    DirectProduct dp = direct_product(h, g);
    PatternCovering c;
    c.downstairs = h;
    for (int ge : g.elements) c.site_map[ge] = g.sorts.at(ge).second;
    for (const auto& l : h.incidence.links)
        for (int x : g.elements) {
            if (g.sorts.at(x).second != l.src) continue;
            c.link_map[l.id + "@" + elem_str(x)] = l.id;
        }
    for (const auto& [pid, origin] : dp.origin_of) c.element_map[pid] = origin.first;
    c.upstairs = std::move(dp.pattern);
    return c;
}

ValidationReport verify_pattern_covering(const PatternCovering& c) {
    ValidationReport rep;
    const AmalgamationPattern& up = c.upstairs;
    const AmalgamationPattern& dn = c.downstairs;

    for (int s : up.incidence.sites)
        if (!c.site_map.count(s)) rep.fail("site map undefined on upstairs site " + elem_str(s));
    for (const auto& [s, t] : c.site_map)
        if (!dn.incidence.has_site(t)) rep.fail("site map leaves the downstairs sites at " + elem_str(s));
    for (const auto& l : up.incidence.links)
        if (!c.link_map.count(l.id)) rep.fail("link map undefined on upstairs link " + l.id);
    for (const auto& [lid, target] : c.link_map)
        if (!dn.incidence.link(target)) rep.fail("link map leaves the downstairs links at " + lid);
    for (const auto& [s, tmpl] : up.sites)
        for (int a : tmpl.universe)
            if (!c.element_map.count(a)) rep.fail("element map undefined on upstairs element " + elem_str(a));
    if (!rep.ok()) return rep;

    std::vector<int> site_image, site_targets;
    for (const auto& [s, t] : c.site_map) site_image.push_back(t);
    sort_unique(site_image);
    if (site_image != dn.incidence.sites) rep.fail("site map is not surjective");
    std::vector<std::string> link_image, link_targets = dn.incidence.link_ids();
    for (const auto& [lid, t] : c.link_map) link_image.push_back(t);
    sort_unique(link_image);
    if (link_image != link_targets) rep.fail("link map is not surjective");
    std::vector<int> elem_image, elem_targets;
    for (const auto& [a, b] : c.element_map) elem_image.push_back(b);
    sort_unique(elem_image);
    for (const auto& [s, tmpl] : dn.sites) elem_targets = unite(elem_targets, tmpl.universe);
    if (elem_image != elem_targets) rep.fail("element map is not surjective");

    for (const auto& l : up.incidence.links) {
        const LinkDecl& dl = dn.incidence.link_or_throw(c.link_map.at(l.id));
        if (dl.src != c.site_map.at(l.src) || dl.tgt != c.site_map.at(l.tgt))
            rep.fail("link " + l.id + " projects onto " + dl.id + " with mismatched endpoints");
        if (c.link_map.at(l.inv) != dl.inv) rep.fail("link map does not commute with reversal at " + l.id);
    }

    for (const auto& [s, tmpl] : up.sites) {
        const RelStructure& target = dn.site(c.site_map.at(s));
        std::vector<std::pair<int, int>> pairs;
        for (int a : tmpl.universe) pairs.emplace_back(a, c.element_map.at(a));
        auto restriction = PartialMap::try_make(std::move(pairs));
        if (!restriction || !is_isomorphism_onto(tmpl, target, *restriction)) {
            rep.fail("element map does not restrict to an isomorphism on site " + elem_str(s));
            continue;
        }
        for (int a : tmpl.universe)
            if (!target.has_element(c.element_map.at(a)))
                rep.fail("element " + elem_str(a) + " projects outside its target site");
    }
    if (!rep.ok()) return rep;

    for (const auto& [lid, rho_up] : up.links) {
        const PartialMap& rho_dn = dn.rho(c.link_map.at(lid));
        std::vector<std::pair<int, int>> pairs;
        for (const auto& [a, b] : rho_up.pairs()) pairs.emplace_back(c.element_map.at(a), c.element_map.at(b));
        auto projected = PartialMap::try_make(std::move(pairs));
        if (!projected || !(*projected == rho_dn))
            rep.fail("link square does not commute at " + lid + " over " + c.link_map.at(lid));
    }

    for (int s : up.incidence.sites) {
        int base = c.site_map.at(s);
        for (const auto& e : dn.incidence.links) {
            if (e.src != base) continue;
            bool lifted = false;
            for (const auto& l : up.incidence.links)
                if (l.src == s && c.link_map.at(l.id) == e.id) {
                    lifted = true;
                    break;
                }
            if (!lifted) rep.fail("link " + e.id + " has no lift at upstairs site " + elem_str(s));
        }
    }
    return rep;
}

const std::vector<int>& ReducedProduct::domain_of(int g) const {
    auto it = chart_of.find(g);
    if (it == chart_of.end()) throw PreconditionError("reduced product: unknown groupoid element " + elem_str(g));
    return realisation.charts[it->second].domain;
}

ReducedProduct reduced_product(const AmalgamationPattern& h, const Groupoid& g) {
    ReducedProduct out;
    out.product = direct_product(h, g);
    GlobalConsistencyVerdict gc = is_globally_consistent(out.product.pattern);
    if (!gc.value) throw PreconditionError("reduced_product: direct product is not globally consistent (" + gc.reason + ")");

    Quotient q = quotient(out.product.pattern);
    out.groupoid = g;
    out.partition = std::move(q.partition);
    out.class_id = std::move(q.class_id);
    out.realisation.structure = std::move(q.realisation.structure);
    for (int ge : g.elements) {
        Chart c;
        c.site = g.sorts.at(ge).second;
        std::vector<std::pair<int, int>> pairs;
        for (int a : h.site(c.site).universe)
            pairs.emplace_back(out.class_id.at(out.product.id_of.at({a, ge})), a);
        c.map = PartialMap(std::move(pairs));
        c.domain = c.map.domain();
        out.chart_of[ge] = out.realisation.charts.size();
        out.realisation.charts.push_back(std::move(c));
    }
    return out;
}

ValidationReport verify_realisation(const Realisation& r, const AmalgamationPattern& h,
                                    const std::vector<bool>* condition_i_mask, std::uint64_t cap) {
    ValidationReport rep;
    if (condition_i_mask && condition_i_mask->size() != r.charts.size()) {
        rep.fail("condition (i) mask does not match the chart count");
        return rep;
    }

    for (std::size_t i = 0; i < r.charts.size(); ++i) {
        const Chart& c = r.charts[i];
        if (!h.sites.count(c.site)) {
            rep.fail("chart " + chart_str(i) + " targets unknown site " + elem_str(c.site));
            continue;
        }
        if (c.map.domain() != c.domain) {
            rep.fail("chart " + chart_str(i) + " map is not aligned with its coordinate domain");
            continue;
        }
        bool inside = true;
        for (int x : c.domain)
            if (!r.structure.has_element(x)) inside = false;
        if (!inside) {
            rep.fail("chart " + chart_str(i) + " domain leaves the universe");
            continue;
        }
        RelStructure sub = induced_substructure(r.structure, c.domain);
        if (!is_isomorphism_onto(sub, h.site(c.site), c.map))
            rep.fail("chart " + chart_str(i) + " is not an isomorphism onto site " + elem_str(c.site));
    }
    if (!rep.ok()) return rep;

    for (int s : h.incidence.sites)
        if (r.charts_at(s).empty()) rep.fail("no chart onto site " + elem_str(s));

    std::vector<std::vector<int>> domains = r.domains();
    for (int x : r.structure.universe) {
        bool covered = false;
        for (const auto& d : domains)
            if (contains(d, x)) {
                covered = true;
                break;
            }
        if (!covered) rep.fail("element " + elem_str(x) + " lies in no coordinate domain");
    }
    for (const auto& [name, tuples] : r.structure.relations)
        for (const auto& t : tuples) {
            bool covered = false;
            for (const auto& d : domains) {
                bool all = true;
                for (int x : t)
                    if (!contains(d, x)) {
                        all = false;
                        break;
                    }
                if (all) {
                    covered = true;
                    break;
                }
            }
            if (!covered) rep.fail("a tuple of relation " + name + " lies in no coordinate domain");
        }
    if (!rep.ok()) return rep;

    WalkMapClosure cl = closure(h, cap);
    if (!cl.complete) rep.warn("walk map closure hit its cap; overlap matching may be incomplete");

    indexed_parallel(
        r.charts.size(),
        [&](std::size_t i, ValidationReport& local) {
            if (condition_i_mask && !(*condition_i_mask)[i]) return;
            const Chart& c = r.charts[i];
            for (const auto& l : h.incidence.links) {
                if (l.src != c.site) continue;
                const PartialMap& rho = h.rho(l.id);
                bool found = false;
                for (std::size_t j = 0; j < r.charts.size() && !found; ++j) {
                    if (r.charts[j].site != l.tgt) continue;
                    if (overlap_map(c, r.charts[j]) == rho) found = true;
                }
                if (!found)
                    local.fail("condition (i): link " + l.id + " is not realised as an overlap at chart " + chart_str(i));
            }
        },
        rep);

    indexed_parallel(
        r.charts.size(),
        [&](std::size_t i, ValidationReport& local) {
            const Chart& c = r.charts[i];
            for (std::size_t j = 0; j < r.charts.size(); ++j) {
                if (intersect(c.domain, r.charts[j].domain).empty()) continue;
                PartialMap m = overlap_map(c, r.charts[j]);
                if (!cl.find(c.site, r.charts[j].site, m))
                    local.fail("condition (ii): overlap of charts " + chart_str(i) + " and " + chart_str(j) +
                               " matches no walk map");
            }
        },
        rep);
    return rep;
}

std::vector<OverlapWitness> overlap_witnesses(const Realisation& r, const AmalgamationPattern& h, std::uint64_t cap) {
    WalkMapClosure cl = closure(h, cap);
    std::vector<OverlapWitness> out;
    for (std::size_t i = 0; i < r.charts.size(); ++i)
        for (std::size_t j = i + 1; j < r.charts.size(); ++j) {
            if (intersect(r.charts[i].domain, r.charts[j].domain).empty()) continue;
            PartialMap m = overlap_map(r.charts[i], r.charts[j]);
            const ClosureEntry* entry = cl.find(r.charts[i].site, r.charts[j].site, m);
            if (!entry) continue;
            out.push_back(OverlapWitness{i, j, entry->witness, std::move(m)});
        }
    return out;
}

Realisation realisation_from_covering(const PatternCovering& c) {
    CoherenceVerdict simple = is_simple(c.upstairs);
    if (!simple.complete) throw PreconditionError("realisation_from_covering: simplicity check ran out of budget");
    if (!simple.value) throw PreconditionError("realisation_from_covering: upstairs pattern is not simple");
    CoherenceVerdict strong = is_strongly_coherent(c.upstairs);
    if (!strong.complete)
        throw PreconditionError("realisation_from_covering: strong coherence check ran out of budget");
    if (!strong.value) throw PreconditionError("realisation_from_covering: upstairs pattern is not strongly coherent");

    Quotient q = quotient(c.upstairs);
    Realisation out;
    out.structure = std::move(q.realisation.structure);
    for (const auto& [shat, tmpl] : c.upstairs.sites) {
        Chart chart;
        chart.site = c.site_map.at(shat);
        std::vector<std::pair<int, int>> pairs;
        for (int a : tmpl.universe) pairs.emplace_back(q.class_id.at(a), c.element_map.at(a));
        chart.map = PartialMap(std::move(pairs));
        chart.domain = chart.map.domain();
        out.charts.push_back(std::move(chart));
    }
    return out;
}

TruncatedRealisation canonical_truncated(const AmalgamationPattern& h, int radius) {
    if (radius < 0) throw PreconditionError("canonical_truncated: negative radius");
    TruncatedRealisation out;
    out.radius = radius;
    out.walks = walks_up_to(h.incidence, radius);

    std::map<Walk, int> walk_index;
    std::vector<int> end_site(out.walks.size());
    for (std::size_t i = 0; i < out.walks.size(); ++i) {
        walk_index[out.walks[i]] = (int)i;
        end_site[i] = walk_iota(h.incidence, out.walks[i]).second;
    }

    std::map<std::pair<int, int>, int> pair_id;  // (walk index, base element) -> id
    int next = 0;
    for (std::size_t i = 0; i < out.walks.size(); ++i)
        for (int a : h.site(end_site[i]).universe) pair_id[{(int)i, a}] = next++;

    std::vector<int> parent(next);
    for (int i = 0; i < next; ++i) parent[i] = i;
    std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
    auto unite_ids = [&](int a, int b) { parent[find(a)] = find(b); };

    for (std::size_t i = 0; i < out.walks.size(); ++i) {
        if ((int)out.walks[i].links.size() >= radius) continue;
        for (const auto& l : h.incidence.links) {
            if (l.src != end_site[i]) continue;
            int j = walk_index.at(append_link(h.incidence, out.walks[i], l.id));
            for (const auto& [a, b] : h.rho(l.id).pairs()) unite_ids(pair_id.at({(int)i, a}), pair_id.at({j, b}));
        }
    }

    std::map<int, int> class_of_root;
    std::map<std::pair<int, int>, int> class_of;
    for (const auto& [key, id] : pair_id) {
        int root = find(id);
        auto it = class_of_root.find(root);
        if (it == class_of_root.end()) it = class_of_root.emplace(root, (int)class_of_root.size()).first;
        class_of[key] = it->second;
    }

    out.realisation.structure.sig = h.sig;
    for (int i = 0; i < (int)class_of_root.size(); ++i) out.realisation.structure.universe.push_back(i);
    for (std::size_t i = 0; i < out.walks.size(); ++i) {
        const RelStructure& tmpl = h.site(end_site[i]);
        for (const auto& [name, tuples] : tmpl.relations)
            for (const auto& t : tuples) {
                std::vector<int> mapped;
                mapped.reserve(t.size());
                for (int a : t) mapped.push_back(class_of.at({(int)i, a}));
                out.realisation.structure.relations[name].insert(std::move(mapped));
            }
    }

    std::set<int> has_out;
    for (const auto& l : h.incidence.links) has_out.insert(l.src);
    for (std::size_t i = 0; i < out.walks.size(); ++i) {
        Chart c;
        c.site = end_site[i];
        std::vector<std::pair<int, int>> pairs;
        for (int a : h.site(end_site[i]).universe) pairs.emplace_back(class_of.at({(int)i, a}), a);
        c.map = PartialMap(std::move(pairs));
        c.domain = c.map.domain();
        out.realisation.charts.push_back(std::move(c));
        out.interior.push_back((int)out.walks[i].links.size() < radius || !has_out.count(end_site[i]));
    }
    return out;
}

std::vector<std::string> applicable_links(const AmalgamationPattern& h, int a) {
    if (!h.site_of(a)) throw PreconditionError("applicable_links: unknown element " + elem_str(a));
    std::set<int> reached{a};
    std::deque<int> queue{a};
    std::set<std::string> links;
    while (!queue.empty()) {
        int b = queue.front();
        queue.pop_front();
        for (const auto& [id, rho] : h.links)
            if (auto img = rho.apply(b)) {
                links.insert(id);
                if (reached.insert(*img).second) queue.push_back(*img);
            }
    }
    return std::vector<std::string>(links.begin(), links.end());
}

namespace {

// left multiplication on the source fibres of from/to, descended through the
// pair provenance; empty result signals an inconsistent class assignment
std::optional<std::map<int, int>> descend_element_map(const ReducedProduct& rp, const std::map<int, int>& gmap) {
    std::map<int, int> emap;
    for (const auto& [pid, origin] : rp.product.origin_of) {
        int src = rp.class_id.at(pid);
        int dst = rp.class_id.at(rp.product.id_of.at({origin.first, gmap.at(origin.second)}));
        auto [it, fresh] = emap.emplace(src, dst);
        if (!fresh && it->second != dst) return std::nullopt;
    }
    return emap;
}

void verify_rigid_generator(const ReducedProduct& rp, const RigidSymmetry& sym) {
    const RelStructure& a = rp.realisation.structure;
    std::vector<int> image;
    for (const auto& [x, y] : sym.element_map) image.push_back(y);
    sort_unique(image);
    std::vector<int> domain;
    for (const auto& [x, y] : sym.element_map) domain.push_back(x);
    if (domain != a.universe || image != a.universe)
        throw Error("rigid_symmetries: internal error: generator is not a permutation of the universe");
    for (const auto& [name, tuples] : a.relations) {
        std::set<std::vector<int>> mapped;
        for (const auto& t : tuples) {
            std::vector<int> m;
            m.reserve(t.size());
            for (int x : t) m.push_back(sym.element_map.at(x));
            mapped.insert(std::move(m));
        }
        if (mapped != tuples)
            throw Error("rigid_symmetries: internal error: generator breaks relation " + name);
    }
    for (const auto& [ge, ci] : rp.chart_of) {
        const Chart& c = rp.realisation.charts[ci];
        const Chart& c2 = rp.realisation.charts[sym.chart_map.at(ci)];
        for (const auto& [x, t] : c.map.pairs())
            if (c2.map.apply(sym.element_map.at(x)) != std::optional<int>(t))
                throw Error("rigid_symmetries: internal error: generator moves a template point");
    }
}

}  // namespace

RigidSymmetryReport rigid_symmetries(const ReducedProduct& rp) {
    RigidSymmetryReport out;
    const Groupoid& g = rp.groupoid;

    std::map<int, std::vector<int>> fibre;  // target site -> elements
    for (int ge : g.elements) fibre[g.sorts.at(ge).second].push_back(ge);

    for (int s : g.incidence.sites) {
        auto it = fibre.find(s);
        if (it == fibre.end() || it->second.size() < 2) continue;
        const std::vector<int>& f = it->second;
        int g0 = f[0];
        for (std::size_t k = 1; k < f.size(); ++k) {
            int gi = f[k];
            int gamma = g.compose(gi, g.inverse(g0));
            int gamma_inv = g.inverse(gamma);
            int f0 = g.src_of(g0), f1 = g.src_of(gi);
            std::map<int, int> gmap;
            for (int x : g.elements) {
                int sx = g.src_of(x);
                if (sx == f0)
                    gmap[x] = g.compose(gamma, x);
                else if (sx == f1)
                    gmap[x] = g.compose(gamma_inv, x);
                else
                    gmap[x] = x;
            }
            RigidSymmetry sym;
            sym.from = g0;
            sym.to = gi;
            auto emap = descend_element_map(rp, gmap);
            if (!emap) throw Error("rigid_symmetries: internal error: left multiplication does not descend");
            sym.element_map = std::move(*emap);
            for (const auto& [ge, ci] : rp.chart_of) sym.chart_map[ci] = rp.chart_of.at(gmap.at(ge));
            verify_rigid_generator(rp, sym);
            out.generators.push_back(std::move(sym));
        }
    }

    std::map<std::vector<int>, int> domain_index;
    std::vector<std::vector<int>> domains;
    for (const Chart& c : rp.realisation.charts)
        if (domain_index.emplace(c.domain, (int)domains.size()).second) domains.push_back(c.domain);
    std::vector<int> parent(domains.size());
    for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = (int)i;
    std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
    for (const RigidSymmetry& sym : out.generators)
        for (std::size_t i = 0; i < domains.size(); ++i) {
            std::vector<int> image;
            image.reserve(domains[i].size());
            for (int x : domains[i]) image.push_back(sym.element_map.at(x));
            sort_unique(image);
            parent[find((int)i)] = find(domain_index.at(image));
        }

    out.transitive = true;
    for (int s : g.incidence.sites) {
        std::set<int> cells;
        for (const Chart& c : rp.realisation.charts)
            if (c.site == s) cells.insert(find(domain_index.at(c.domain)));
        bool one = cells.size() <= 1;
        out.transitive_on[s] = one;
        if (!one) out.transitive = false;
    }
    return out;
}

RealisationSymmetrySearch realisation_symmetry_extensions(const Realisation& r, const AmalgamationPattern&,
                                                          const Symmetry& base, bool all_solutions, Budget& budget) {
    RealisationSymmetrySearch out;
    const std::map<int, int>& sigma_s = base.perms.at("S");
    const std::map<int, int>& sigma_h = base.perms.at("H");
    std::size_t n = r.charts.size();

    std::vector<PartialMap> inverse(n);
    for (std::size_t i = 0; i < n; ++i) inverse[i] = r.charts[i].map.inverse();

    std::vector<int> assign(n, -1);
    std::vector<char> used(n, 0);
    std::map<int, int> fwd, bwd;
    bool stop = false;

    std::function<void(std::size_t)> rec = [&](std::size_t i) {
        if (stop) return;
        if (!budget.spend()) {
            out.exhaustive = false;
            stop = true;
            return;
        }
        if (i == n) {
            if (fwd.size() != r.structure.universe.size()) return;
            for (const auto& [name, tuples] : r.structure.relations) {
                std::set<std::vector<int>> mapped;
                for (const auto& t : tuples) {
                    std::vector<int> m;
                    m.reserve(t.size());
                    for (int x : t) m.push_back(fwd.at(x));
                    mapped.insert(std::move(m));
                }
                if (mapped != tuples) return;
            }
            RealisationSymmetry sym;
            sym.base = base;
            sym.element_map = fwd;
            for (std::size_t k = 0; k < n; ++k) sym.chart_map[k] = (std::size_t)assign[k];
            out.symmetries.push_back(std::move(sym));
            if (!all_solutions) stop = true;
            return;
        }
        const Chart& c = r.charts[i];
        int target_site = sigma_s.at(c.site);
        for (std::size_t j = 0; j < n && !stop; ++j) {
            if (used[j] || r.charts[j].site != target_site) continue;
            if (r.charts[j].domain.size() != c.domain.size()) continue;
            std::vector<int> added;
            bool ok = true;
            for (const auto& [x, t] : c.map.pairs()) {
                int y = *inverse[j].apply(sigma_h.at(t));
                auto fx = fwd.find(x);
                if (fx != fwd.end()) {
                    if (fx->second != y) ok = false;
                } else if (auto by = bwd.find(y); by != bwd.end() && by->second != x) {
                    ok = false;
                } else {
                    fwd[x] = y;
                    bwd[y] = x;
                    added.push_back(x);
                }
                if (!ok) break;
            }
            if (ok) {
                used[j] = 1;
                assign[i] = (int)j;
                rec(i + 1);
                used[j] = 0;
                assign[i] = -1;
            }
            for (int x : added) {
                bwd.erase(fwd.at(x));
                fwd.erase(x);
            }
        }
    };
    rec(0);
    return out;
}

FullSymmetryVerdict is_fully_symmetric_realisation(const ReducedProduct& rp, const AmalgamationPattern& h,
                                                   Budget& budget) {
    FullSymmetryVerdict out;
    RigidSymmetryReport rigid = rigid_symmetries(rp);
    if (!rigid.transitive) {
        for (const auto& [s, ok] : rigid.transitive_on)
            if (!ok) {
                out.detail = "rigid symmetries split the charts of site " + elem_str(s);
                break;
            }
        return out;
    }
    SymmetrySearchResult syms = pattern_symmetries(h, false, budget);
    out.exhaustive = syms.exhaustive;
    for (const Symmetry& sym : syms.symmetries) {
        RealisationSymmetrySearch ext = realisation_symmetry_extensions(rp.realisation, h, sym, false, budget);
        if (!ext.symmetries.empty()) continue;
        if (!ext.exhaustive) {
            out.exhaustive = false;
            out.detail = "budget ran out while extending a pattern symmetry";
            return out;
        }
        out.detail = "a pattern symmetry does not extend to the realisation";
        return out;
    }
    out.value = true;
    return out;
}

FullSymmetryVerdict is_fully_symmetric_realisation(const Realisation& r, const AmalgamationPattern& h,
                                                   Budget& budget) {
    FullSymmetryVerdict out;
    Symmetry ident;
    for (int s : h.incidence.sites) ident.perms["S"][s] = s;
    for (std::size_t i = 0; i < h.incidence.links.size(); ++i) ident.perms["E"][(int)i] = (int)i;
    for (const auto& [s, tmpl] : h.sites)
        for (int a : tmpl.universe) ident.perms["H"][a] = a;

    RealisationSymmetrySearch rigid = realisation_symmetry_extensions(r, h, ident, true, budget);
    std::map<std::vector<int>, int> domain_index;
    std::vector<std::vector<int>> domains;
    for (const Chart& c : r.charts)
        if (domain_index.emplace(c.domain, (int)domains.size()).second) domains.push_back(c.domain);
    std::vector<int> parent(domains.size());
    for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = (int)i;
    std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
    for (const RealisationSymmetry& sym : rigid.symmetries)
        for (std::size_t i = 0; i < domains.size(); ++i) {
            std::vector<int> image;
            image.reserve(domains[i].size());
            for (int x : domains[i]) image.push_back(sym.element_map.at(x));
            sort_unique(image);
            parent[find((int)i)] = find(domain_index.at(image));
        }
    for (int s : h.incidence.sites) {
        std::set<int> cells;
        for (const Chart& c : r.charts)
            if (c.site == s) cells.insert(find(domain_index.at(c.domain)));
        if (cells.size() > 1) {
            if (!rigid.exhaustive) {
                out.exhaustive = false;
                out.detail = "budget ran out enumerating rigid symmetries";
            } else {
                out.detail = "rigid symmetries split the charts of site " + elem_str(s);
            }
            return out;
        }
    }

    SymmetrySearchResult syms = pattern_symmetries(h, false, budget);
    out.exhaustive = syms.exhaustive && rigid.exhaustive;
    for (const Symmetry& sym : syms.symmetries) {
        RealisationSymmetrySearch ext = realisation_symmetry_extensions(r, h, sym, false, budget);
        if (!ext.symmetries.empty()) continue;
        if (!ext.exhaustive) {
            out.exhaustive = false;
            out.detail = "budget ran out while extending a pattern symmetry";
            return out;
        }
        out.detail = "a pattern symmetry does not extend to the realisation";
        return out;
    }
    out.value = true;
    return out;
}

Hypergraph atlas_hypergraph(const Realisation& r) {
    return make_hypergraph(r.structure.universe, r.domains());
}

}  // namespace amalgam
