#include "amalgam/eppa.hpp"

#include <algorithm>
#include <deque>
#include <future>
#include <map>
#include <set>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "amalgam/hypergraph.hpp"
#include "amalgam/util.hpp"

namespace amalgam {

namespace {

constexpr int eppa_site = 0;

std::string elem_str(int x) { return std::to_string(x); }
std::string chart_str(std::size_t i) { return "#" + std::to_string(i); }

}  // namespace

const EppaPartial& EppaInstance::partial(const std::string& id) const {
    for (const auto& p : partials)
        if (p.id == id) return p;
    throw PreconditionError("eppa instance: unknown partial " + id);
}

ValidationReport validate_instance(const EppaInstance& inst) {
    ValidationReport rep;
    ValidationReport base = validate_structure(inst.base);
    for (const auto& v : base.violations) rep.fail("base: " + v);
    if (!rep.ok()) return rep;

    std::vector<std::string> ids;
    for (const auto& p : inst.partials) ids.push_back(p.id);
    std::vector<std::string> sorted = ids;
    sort_unique(sorted);
    if (sorted != ids) rep.fail("partials are not sorted by unique id");

    for (const auto& p : inst.partials) {
        bool inside = true;
        for (const auto& [a, b] : p.map.pairs())
            if (!inst.base.has_element(a) || !inst.base.has_element(b)) inside = false;
        if (!inside) {
            rep.fail("partial " + p.id + " mentions elements outside the base");
            continue;
        }
        if (!is_partial_isomorphism(inst.base, inst.base, p.map))
            rep.fail("partial " + p.id + " is not a partial isomorphism of the base");
        bool found = false;
        for (const auto& q : inst.partials) {
            if (q.id != p.inv) continue;
            found = true;
            if (!(q.map == p.map.inverse())) rep.fail("partial " + p.inv + " is not the inverse map of " + p.id);
            if (q.inv != p.id) rep.fail("reversal of partials is not involutive at " + p.id);
        }
        if (!found) rep.fail("partial " + p.id + " has no inverse partner " + p.inv);
    }
    return rep;
}

AmalgamationPattern instance_to_pattern(const EppaInstance& inst) {
    ValidationReport rep = validate_instance(inst);
    if (!rep.ok()) throw PreconditionError("instance_to_pattern: " + rep.violations.front());

    AmalgamationPattern h;
    std::vector<LinkDecl> links;
    for (const auto& p : inst.partials) links.push_back(LinkDecl{p.id, eppa_site, eppa_site, p.inv});
    h.incidence = make_incidence({eppa_site}, std::move(links));
    h.sig = inst.base.sig;
    h.sites[eppa_site] = inst.base;
    for (const auto& p : inst.partials) h.links[p.id] = p.map;

    ValidationReport vp = validate_pattern(h);
    if (!vp.ok()) throw Error("instance_to_pattern: internal error: " + vp.violations.front());
    return h;
}

namespace {

// the reduced product realises the pattern exactly when the unfolded product
// is simple and strongly coherent; global consistency alone leaves chart
// overlaps that no walk map explains
bool product_qualifies(const AmalgamationPattern& h, const Groupoid& g) {
    DirectProduct unfolded = direct_product(h, g);
    CoherenceVerdict strong = is_strongly_coherent(unfolded.pattern);
    if (!(strong.complete && strong.value)) return false;
    CoherenceVerdict plain = is_simple(unfolded.pattern);
    return plain.complete && plain.value;
}

struct RungChoice {
    std::optional<Groupoid> direct;  // first rung whose product qualifies
    std::optional<Groupoid> base;    // smallest simple compatible rung, kept for recombination
    bool exhausted = false;
};

// coordinate ladder climb: rungs must be simple, compatible and n-acyclic as in
// search_groupoid, and additionally pass the product gate above; a larger
// modulus often separates walks that collide in the quotient of a smaller one
RungChoice climb_ladder(const AmalgamationPattern& h, int n_acyclic, std::size_t max_size, Budget& budget) {
    RungChoice out;
    for (int k : coordinate_moduli(h.incidence)) {
        if (budget.exhausted()) {
            out.exhausted = true;
            return out;
        }
        std::optional<Groupoid> cand;
        try {
            cand = coordinate_groupoid(h.incidence, k, max_size);
        } catch (const Error&) {
            continue;  // modulus invalid for this atom mix
        }
        if (!cand) break;  // candidate sizes grow with the modulus
        budget.spend(cand->elements.size());
        if (!is_simple_groupoid(*cand)) continue;
        CompatibilityVerdict compat = is_compatible(*cand, h);
        if (!compat.complete) {
            out.exhausted = true;
            continue;
        }
        if (!compat.value) continue;
        if (!out.base) out.base = *cand;
        AcyclicityVerdict acyc = is_n_acyclic(*cand, n_acyclic, budget);
        if (!acyc.exhaustive) {
            out.exhausted = true;
            continue;
        }
        if (!acyc.value) continue;
        if (!product_qualifies(h, *cand)) continue;
        out.direct = std::move(cand);
        return out;
    }
    return out;
}

// no single product qualifies, so recombine: the product with the base is
// coherent, a simple n-acyclic groupoid over its incidence makes the double
// product simple and strongly coherent, and the recombined groupoid reproduces
// that double product in one step
Groupoid recombine_groupoid(const AmalgamationPattern& h, const Groupoid& base, int n_acyclic,
                            std::size_t max_size, Budget& budget) {
    DirectProduct unfolded = direct_product(h, base);
    GroupoidSearchResult inner =
        search_groupoid(unfolded.pattern.incidence, unfolded.pattern, n_acyclic, max_size, budget);
    if (!inner.groupoid)
        throw Error(inner.exhausted ? "solve: no groupoid available: search budget exhausted"
                                    : "solve: no groupoid available over the product incidence pattern");
    Groupoid out = tilde_groupoid(base, *inner.groupoid);
    if (!is_simple_groupoid(out)) throw Error("solve: internal error: recombined groupoid is not simple");
    CompatibilityVerdict comp = is_compatible(out, h);
    if (!comp.complete) throw PreconditionError("solve: compatibility check hit its cap");
    if (!comp.value) throw Error("solve: internal error: recombined groupoid is not compatible");
    AcyclicityVerdict ac = is_n_acyclic(out, n_acyclic, budget);
    if (!ac.exhaustive) throw PreconditionError("solve: acyclicity check ran out of budget");
    if (!ac.value)
        throw Error("solve: internal error: recombined groupoid is not " + std::to_string(n_acyclic) + "-acyclic");
    if (!product_qualifies(h, out))
        throw Error("solve: internal error: recombined product lacks simplicity or strong coherence");
    return out;
}

// left translation by gamma, descended to the quotient classes
std::map<int, int> left_translation(const ReducedProduct& rp, int gamma) {
    std::map<int, int> out;
    for (const auto& [pid, origin] : rp.product.origin_of) {
        int moved = rp.product.id_of.at({origin.first, rp.groupoid.compose(gamma, origin.second)});
        auto [it, fresh] = out.emplace(rp.class_id.at(pid), rp.class_id.at(moved));
        if (!fresh && it->second != rp.class_id.at(moved))
            throw Error("solve: internal error: left translation does not descend to the quotient");
    }
    return out;
}

// chart whose overlap with the distinguished chart realises the partial exactly
int chart_source_for(const ReducedProduct& rp, const Chart& c0, const EppaPartial& p) {
    PartialMap from_c0 = c0.map.inverse();
    int direct = rp.groupoid.gen(p.id);
    std::vector<int> order{direct};
    for (int ge : rp.groupoid.elements)
        if (ge != direct) order.push_back(ge);
    for (int ge : order) {
        const Chart& c = rp.realisation.charts[rp.chart_of.at(ge)];
        if (compose_partial(from_c0, c.map) == p.map) return ge;
    }
    throw Error("solve: internal error: no chart realises partial " + p.id);
}

}  // namespace

EppaSolution solve(const EppaInstance& inst, int n_acyclic, const GroupoidSupply& supply, Budget& budget) {
    if (n_acyclic < 2) throw PreconditionError("solve: acyclicity bound must be at least 2");
    AmalgamationPattern h = instance_to_pattern(inst);

    Groupoid g;
    if (supply.user) {
        g = *supply.user;
        if (!(g.incidence == h.incidence))
            throw PreconditionError("solve: supplied groupoid lives over a different incidence pattern");
        ValidationReport vg = validate_groupoid(g);
        if (!vg.ok()) throw PreconditionError("solve: supplied groupoid: " + vg.violations.front());
        if (!is_simple_groupoid(g)) throw PreconditionError("solve: supplied groupoid is not simple");
        CompatibilityVerdict comp = is_compatible(g, h);
        if (!comp.complete) throw PreconditionError("solve: compatibility check hit its cap");
        if (!comp.value) throw PreconditionError("solve: supplied groupoid is not compatible with the instance");
        AcyclicityVerdict ac = is_n_acyclic(g, n_acyclic, budget);
        if (!ac.exhaustive) throw PreconditionError("solve: acyclicity check ran out of budget");
        if (!ac.value)
            throw PreconditionError("solve: supplied groupoid is not " + elem_str(n_acyclic) + "-acyclic");
        if (!product_qualifies(h, g)) g = recombine_groupoid(h, g, n_acyclic, supply.max_size, budget);
    } else {
        RungChoice rungs = climb_ladder(h, n_acyclic, supply.max_size, budget);
        if (rungs.direct) {
            g = std::move(*rungs.direct);
        } else if (rungs.base) {
            g = recombine_groupoid(h, *rungs.base, n_acyclic, supply.max_size, budget);
        } else {
            throw Error(rungs.exhausted ? "solve: no groupoid available: search budget exhausted"
                                        : "solve: no groupoid available for this instance");
        }
    }

    ReducedProduct rp = reduced_product(h, g);
    ValidationReport rr = verify_realisation(rp.realisation, h);
    if (!rr.ok()) throw Error("solve: internal error: realisation fails verification: " + rr.violations.front());

    EppaSolution sol;
    sol.chart0 = rp.chart_of.at(g.unit(eppa_site));
    const Chart& c0 = rp.realisation.charts[sol.chart0];

    auto extend = [&](const EppaPartial& p) {
        return left_translation(rp, g.inverse(chart_source_for(rp, c0, p)));
    };
    if (inst.partials.size() >= 2 && std::thread::hardware_concurrency() >= 2) {
        std::vector<std::future<std::map<int, int>>> futures;
        for (const auto& p : inst.partials)
            futures.push_back(std::async(std::launch::async, [&extend, &p]() { return extend(p); }));
        for (std::size_t i = 0; i < inst.partials.size(); ++i)
            sol.automorphisms[inst.partials[i].id] = futures[i].get();
    } else {
        for (const auto& p : inst.partials) sol.automorphisms[p.id] = extend(p);
    }
    sol.realisation = std::move(rp.realisation);

    ValidationReport check = verify_solution(inst, sol);
    if (!check.ok()) throw Error("solve: internal error: solution fails verification: " + check.violations.front());
    return sol;
}

ValidationReport verify_solution(const EppaInstance& inst, const EppaSolution& sol) {
    ValidationReport rep;
    ValidationReport vi = validate_instance(inst);
    for (const auto& v : vi.violations) rep.fail("instance: " + v);
    if (!rep.ok()) return rep;

    const Realisation& r = sol.realisation;
    if (sol.chart0 >= r.charts.size()) {
        rep.fail("distinguished chart index out of range");
        return rep;
    }
    const Chart& c0 = r.charts[sol.chart0];
    bool inside = true;
    for (int x : c0.domain)
        if (!r.structure.has_element(x)) inside = false;
    if (!inside || c0.map.domain() != c0.domain) {
        rep.fail("distinguished chart is malformed");
        return rep;
    }
    if (!is_isomorphism_onto(induced_substructure(r.structure, c0.domain), inst.base, c0.map))
        rep.fail("distinguished chart is not an isomorphism onto the base");

    PartialMap embed = c0.map.inverse();
    for (const auto& p : inst.partials) {
        auto it = sol.automorphisms.find(p.id);
        if (it == sol.automorphisms.end()) {
            rep.fail("no automorphism provided for partial " + p.id);
            continue;
        }
        const std::map<int, int>& sigma = it->second;
        std::vector<int> dom, img;
        for (const auto& [x, y] : sigma) {
            dom.push_back(x);
            img.push_back(y);
        }
        sort_unique(img);
        if (dom != r.structure.universe || img != r.structure.universe) {
            rep.fail("map for partial " + p.id + " is not a permutation of the universe");
            continue;
        }
        bool preserves = true;
        for (const auto& [name, tuples] : r.structure.relations) {
            std::set<std::vector<int>> mapped;
            for (const auto& t : tuples) {
                std::vector<int> m;
                m.reserve(t.size());
                for (int x : t) m.push_back(sigma.at(x));
                mapped.insert(std::move(m));
            }
            if (mapped != tuples) {
                rep.fail("map for partial " + p.id + " is not an automorphism: relation " + name + " moves");
                preserves = false;
                break;
            }
        }
        if (!preserves) continue;
        for (const auto& [x, base_elem] : c0.map.pairs())
            if (auto moved = p.map.apply(base_elem))
                if (sigma.at(x) != *embed.apply(*moved)) {
                    rep.fail("automorphism for partial " + p.id + " does not extend the embedded partial");
                    break;
                }
    }
    return rep;
}

SolutionSymmetryVerdict is_fully_symmetric_solution(const EppaInstance& inst, const EppaSolution& sol,
                                                    Budget& budget) {
    SolutionSymmetryVerdict out;
    AmalgamationPattern h = instance_to_pattern(inst);
    const Realisation& r = sol.realisation;

    WalkMapClosure cl = closure(h);
    if (!cl.complete) {
        out.exhaustive = false;
        out.detail = "walk map closure hit its cap";
        return out;
    }
    for (std::size_t i = 0; i < r.charts.size(); ++i)
        for (std::size_t j = i + 1; j < r.charts.size(); ++j) {
            if (intersect(r.charts[i].domain, r.charts[j].domain).empty()) continue;
            PartialMap m = compose_partial(r.charts[i].map.inverse(), r.charts[j].map);
            const ClosureEntry* entry = cl.find(r.charts[i].site, r.charts[j].site, m);
            if (!entry) {
                out.detail = "overlap of charts " + chart_str(i) + " and " + chart_str(j) +
                             " is not the composition of a word over the partials";
                return out;
            }
            out.words.push_back(OverlapWitness{i, j, entry->witness, std::move(m)});
        }

    Symmetry ident;
    ident.perms["S"][eppa_site] = eppa_site;
    for (std::size_t i = 0; i < h.incidence.links.size(); ++i) ident.perms["E"][(int)i] = (int)i;
    for (int a : inst.base.universe) ident.perms["H"][a] = a;
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
    std::set<int> cells;
    for (std::size_t i = 0; i < domains.size(); ++i) cells.insert(find((int)i));
    if (cells.size() > 1) {
        if (!rigid.exhaustive) {
            out.exhaustive = false;
            out.detail = "budget ran out enumerating chart-compatible automorphisms";
        } else {
            out.detail = "chart-compatible automorphisms do not act transitively on the coordinate domains";
        }
        return out;
    }
    out.value = true;
    return out;
}

std::map<int, int> universal_hom(const Realisation& r, const std::vector<int>& d, const Realisation& b,
                                 const AmalgamationPattern& h, int n_acyclic) {
    std::vector<int> dd = d;
    sort_unique(dd);
    if ((int)dd.size() > n_acyclic) throw PreconditionError("universal_hom: subset exceeds the acyclicity bound");
    for (int x : dd)
        if (!r.structure.has_element(x))
            throw PreconditionError("universal_hom: element " + elem_str(x) + " is outside the universe");

    HypAcyclicityVerdict ac = is_n_acyclic_hyp(atlas_hypergraph(r), n_acyclic);
    if (!ac.value)
        throw PreconditionError("universal_hom: the atlas is not " + elem_str(n_acyclic) + "-acyclic");
    ValidationReport rr = verify_realisation(r, h);
    if (!rr.ok()) throw PreconditionError("universal_hom: source realisation: " + rr.violations.front());
    ValidationReport rb = verify_realisation(b, h);
    if (!rb.ok()) throw PreconditionError("universal_hom: target realisation: " + rb.violations.front());
    if (dd.empty()) return {};

    std::map<std::vector<int>, std::size_t> source;  // restricted domain -> lowest chart index
    std::vector<std::vector<int>> cut;
    for (std::size_t i = 0; i < r.charts.size(); ++i) {
        std::vector<int> inter = intersect(r.charts[i].domain, dd);
        if (inter.empty()) continue;
        if (source.emplace(inter, i).second) cut.push_back(inter);
    }
    std::optional<TreeDecomposition> td = tree_decomposition(make_hypergraph(dd, std::move(cut)));
    if (!td) throw Error("universal_hom: internal error: restricted atlas is not acyclic");

    std::size_t n = td->bags.size();
    std::vector<std::vector<std::size_t>> adj(n);
    for (const auto& [a, bnode] : td->edges) {
        adj[a].push_back(bnode);
        adj[bnode].push_back(a);
    }
    std::vector<int> parent(n, -1);
    std::vector<std::size_t> order;
    std::vector<char> seen(n, 0);
    std::deque<std::size_t> queue{0};
    seen[0] = 1;
    while (!queue.empty()) {
        std::size_t t = queue.front();
        queue.pop_front();
        order.push_back(t);
        for (std::size_t next : adj[t])
            if (!seen[next]) {
                seen[next] = 1;
                parent[next] = (int)t;
                queue.push_back(next);
            }
    }
    if (order.size() != n) throw Error("universal_hom: internal error: decomposition tree is not connected");

    WalkMapClosure cl = closure(h);
    if (!cl.complete) throw Error("universal_hom: walk map closure hit its cap");

    std::vector<std::size_t> b_chart(n);
    std::map<int, int> hom;
    for (std::size_t t : order) {
        std::size_t rc = source.at(td->bags[t]);
        const Chart& cu = r.charts[rc];
        std::size_t vc = b.charts.size();
        std::vector<int> full_overlap;
        if (parent[t] >= 0) full_overlap = intersect(cu.domain, r.charts[source.at(td->bags[parent[t]])].domain);
        if (parent[t] < 0 || full_overlap.empty()) {
            for (std::size_t j = 0; j < b.charts.size(); ++j)
                if (b.charts[j].site == cu.site) {
                    vc = j;
                    break;
                }
        } else {
            const Chart& cup = r.charts[source.at(td->bags[parent[t]])];
            PartialMap m = compose_partial(cup.map.inverse(), cu.map);
            const ClosureEntry* entry = cl.find(cup.site, cu.site, m);
            if (!entry) throw Error("universal_hom: internal error: chart overlap matches no walk map");
            std::size_t cur = b_chart[parent[t]];
            for (const std::string& lid : entry->witness.links) {
                const LinkDecl& l = h.incidence.link_or_throw(lid);
                const PartialMap& rho = h.rho(lid);
                std::size_t found = b.charts.size();
                for (std::size_t j = 0; j < b.charts.size(); ++j) {
                    if (b.charts[j].site != l.tgt) continue;
                    if (compose_partial(b.charts[cur].map.inverse(), b.charts[j].map) == rho) {
                        found = j;
                        break;
                    }
                }
                if (found == b.charts.size())
                    throw Error("universal_hom: internal error: no chart continues the witness walk at " + lid);
                cur = found;
            }
            vc = cur;
        }
        if (vc == b.charts.size()) throw Error("universal_hom: internal error: no chart onto site " + elem_str(cu.site));
        b_chart[t] = vc;

        PartialMap to_b = b.charts[vc].map.inverse();
        for (int x : td->bags[t]) {
            int y = *to_b.apply(*cu.map.apply(x));
            auto [it, fresh] = hom.emplace(x, y);
            if (!fresh && it->second != y)
                throw Error("universal_hom: internal error: chart-local assignments disagree");
        }
    }

    if (hom.size() != dd.size()) throw Error("universal_hom: internal error: output is not total");
    RelStructure c = induced_substructure(r.structure, dd);
    for (const auto& [name, tuples] : c.relations)
        for (const auto& t : tuples) {
            std::vector<int> mapped;
            mapped.reserve(t.size());
            for (int x : t) mapped.push_back(hom.at(x));
            if (!b.structure.tuples(name).count(mapped))
                throw Error("universal_hom: internal error: output does not preserve relation " + name);
        }
    return hom;
}

ForbiddenClassVerdict check_forbidden_class(const RelStructure& a, const std::vector<RelStructure>& x,
                                            Budget& budget) {
    ForbiddenClassVerdict out;
    for (std::size_t i = 0; i < x.size(); ++i) {
        HomSearchResult found = find_homomorphisms(x[i], a, budget);
        if (!found.homs.empty()) {
            out.exhaustive = true;
            out.witness = {i, found.homs.front()};
            return out;
        }
        if (!found.exhaustive) {
            out.exhaustive = false;
            return out;
        }
    }
    out.value = true;
    return out;
}

}  // namespace amalgam
