#include "amalgam/groupoid.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <set>
#include <sstream>

#include "amalgam/util.hpp"

namespace amalgam {

namespace {

std::string elem_str(int g) { return std::to_string(g); }

Walk canon_walk(Walk w) {
    if (!w.links.empty()) w.anchor = -1;
    return w;
}

}  // namespace

std::pair<int, int> Groupoid::sort_of(int g) const {
    auto it = sorts.find(g);
    if (it == sorts.end()) throw PreconditionError("groupoid: unknown element " + elem_str(g));
    return it->second;
}

int Groupoid::unit(int site) const {
    auto it = units.find(site);
    if (it == units.end()) throw PreconditionError("groupoid: no unit at site " + std::to_string(site));
    return it->second;
}

int Groupoid::gen(const std::string& link_id) const {
    auto it = generators.find(link_id);
    if (it == generators.end()) throw PreconditionError("groupoid: no generator for link " + link_id);
    return it->second;
}

int Groupoid::compose(int g, int h) const {
    auto it = table.find({g, h});
    if (it == table.end())
        throw PreconditionError("groupoid: composition undefined on (" + elem_str(g) + ", " + elem_str(h) + ")");
    return it->second;
}

int Groupoid::inverse(int g) const {
    auto [s, t] = sort_of(g);
    for (int h : block(t, s))
        if (table.count({g, h}) && table.at({g, h}) == unit(s) && table.count({h, g}) && table.at({h, g}) == unit(t))
            return h;
    throw PreconditionError("groupoid: no inverse for element " + elem_str(g));
}

std::vector<int> Groupoid::block(int s, int t) const {
    std::vector<int> out;
    for (int g : elements) {
        auto st = sorts.at(g);
        if (st.first == s && st.second == t) out.push_back(g);
    }
    return out;
}

namespace {

// position-indexed view with a dense composition matrix
struct Dense {
    const Groupoid* g = nullptr;
    int m = 0;
    std::vector<int> ids;
    std::map<int, int> pos;
    std::vector<int> src, tgt, inv;
    std::vector<int> comp;  // m*m, -1 where undefined

    int at(int a, int b) const { return comp[(std::size_t)a * m + b]; }
};

Dense densify(const Groupoid& g) {
    Dense d;
    d.g = &g;
    d.ids = g.elements;
    d.m = (int)d.ids.size();
    for (int i = 0; i < d.m; ++i) d.pos[d.ids[i]] = i;
    d.src.resize(d.m);
    d.tgt.resize(d.m);
    for (int i = 0; i < d.m; ++i) {
        auto st = g.sorts.at(d.ids[i]);
        d.src[i] = st.first;
        d.tgt[i] = st.second;
    }
    d.comp.assign((std::size_t)d.m * d.m, -1);
    for (const auto& [pair, val] : g.table) {
        auto a = d.pos.find(pair.first);
        auto b = d.pos.find(pair.second);
        auto c = d.pos.find(val);
        if (a != d.pos.end() && b != d.pos.end() && c != d.pos.end())
            d.comp[(std::size_t)a->second * d.m + b->second] = c->second;
    }
    d.inv.assign(d.m, -1);
    std::map<int, int> unit_pos;
    for (const auto& [s, u] : g.units) {
        auto it = d.pos.find(u);
        if (it != d.pos.end()) unit_pos[s] = it->second;
    }
    for (int i = 0; i < d.m; ++i)
        for (int j = 0; j < d.m; ++j) {
            auto us = unit_pos.find(d.src[i]);
            auto ut = unit_pos.find(d.tgt[i]);
            if (us == unit_pos.end() || ut == unit_pos.end()) continue;
            if (d.at(i, j) == us->second && d.at(j, i) == ut->second) {
                d.inv[i] = j;
                break;
            }
        }
    return d;
}

std::vector<int> generator_positions(const Dense& d, const std::vector<std::string>& link_ids) {
    std::vector<int> out;
    for (const auto& id : link_ids) {
        auto it = d.g->generators.find(id);
        if (it == d.g->generators.end()) throw PreconditionError("groupoid: no generator for link " + id);
        out.push_back(d.pos.at(it->second));
    }
    sort_unique(out);
    return out;
}

// closure of the units under right multiplication by the given generators
std::vector<char> generated_set(const Dense& d, const std::vector<int>& gen_pos) {
    std::vector<char> in(d.m, 0);
    std::deque<int> queue;
    for (const auto& [s, u] : d.g->units) {
        (void)s;
        int p = d.pos.at(u);
        if (!in[p]) {
            in[p] = 1;
            queue.push_back(p);
        }
    }
    while (!queue.empty()) {
        int x = queue.front();
        queue.pop_front();
        for (int gp : gen_pos) {
            int y = d.at(x, gp);
            if (y >= 0 && !in[y]) {
                in[y] = 1;
                queue.push_back(y);
            }
        }
    }
    return in;
}

}  // namespace

ValidationReport validate_groupoid(const Groupoid& g) {
    ValidationReport rep;
    ValidationReport inc_rep = validate_incidence(g.incidence);
    for (const auto& v : inc_rep.violations) rep.fail("incidence: " + v);

    if (!std::is_sorted(g.elements.begin(), g.elements.end()) ||
        std::adjacent_find(g.elements.begin(), g.elements.end()) != g.elements.end()) {
        rep.fail("elements are not sorted-unique");
        return rep;
    }
    for (int e : g.elements) {
        auto it = g.sorts.find(e);
        if (it == g.sorts.end()) {
            rep.fail("element " + elem_str(e) + " has no sorts");
            continue;
        }
        if (!g.incidence.has_site(it->second.first) || !g.incidence.has_site(it->second.second))
            rep.fail("element " + elem_str(e) + " has sorts outside the site set");
    }
    for (const auto& [e, st] : g.sorts) {
        (void)st;
        if (!contains(g.elements, e)) rep.fail("sorts declared for unknown element " + elem_str(e));
    }
    if (!rep.ok()) return rep;

    // composition defined exactly on matching sorts, closed, with the composed sorts
    for (int a : g.elements)
        for (int b : g.elements) {
            bool matching = g.sorts.at(a).second == g.sorts.at(b).first;
            auto it = g.table.find({a, b});
            if (matching && it == g.table.end())
                rep.fail("composition missing on matching pair (" + elem_str(a) + ", " + elem_str(b) + ")");
            if (!matching && it != g.table.end())
                rep.fail("composition defined on mismatched pair (" + elem_str(a) + ", " + elem_str(b) + ")");
            if (matching && it != g.table.end()) {
                if (!contains(g.elements, it->second)) {
                    rep.fail("composition leaves the element set at (" + elem_str(a) + ", " + elem_str(b) + ")");
                } else if (g.sorts.at(it->second) !=
                           std::make_pair(g.sorts.at(a).first, g.sorts.at(b).second)) {
                    rep.fail("composed sorts wrong at (" + elem_str(a) + ", " + elem_str(b) + ")");
                }
            }
        }
    for (const auto& [pair, val] : g.table) {
        (void)val;
        if (!contains(g.elements, pair.first) || !contains(g.elements, pair.second))
            rep.fail("table entry mentions unknown elements (" + elem_str(pair.first) + ", " + elem_str(pair.second) +
                     ")");
    }
    if (!rep.ok()) return rep;

    Dense d = densify(g);
    for (int a = 0; a < d.m; ++a)
        for (int b = 0; b < d.m; ++b) {
            if (d.tgt[a] != d.src[b]) continue;
            int ab = d.at(a, b);
            for (int c = 0; c < d.m; ++c) {
                if (d.tgt[b] != d.src[c]) continue;
                int bc = d.at(b, c);
                if (d.at(ab, c) != d.at(a, bc)) {
                    rep.fail("associativity fails on (" + elem_str(d.ids[a]) + ", " + elem_str(d.ids[b]) + ", " +
                             elem_str(d.ids[c]) + ")");
                    if (rep.violations.size() > 8) return rep;
                }
            }
        }

    for (int s : g.incidence.sites) {
        auto it = g.units.find(s);
        if (it == g.units.end()) {
            rep.fail("no unit at site " + std::to_string(s));
            continue;
        }
        if (!contains(g.elements, it->second) || g.sorts.at(it->second) != std::make_pair(s, s)) {
            rep.fail("unit at site " + std::to_string(s) + " has wrong sorts");
            continue;
        }
        int u = it->second;
        for (int a : g.elements) {
            if (g.sorts.at(a).first == s && g.table.at({u, a}) != a)
                rep.fail("left unit law fails at site " + std::to_string(s) + " on " + elem_str(a));
            if (g.sorts.at(a).second == s && g.table.at({a, u}) != a)
                rep.fail("right unit law fails at site " + std::to_string(s) + " on " + elem_str(a));
        }
    }
    for (const auto& [s, u] : g.units) {
        (void)u;
        if (!g.incidence.has_site(s)) rep.fail("unit declared at unknown site " + std::to_string(s));
    }
    if (!rep.ok()) return rep;

    for (int i = 0; i < d.m; ++i) {
        int found = -1;
        int count = 0;
        for (int j = 0; j < d.m; ++j) {
            if (d.tgt[i] != d.src[j] || d.src[i] != d.tgt[j]) continue;
            if (d.at(i, j) == d.pos.at(g.units.at(d.src[i])) && d.at(j, i) == d.pos.at(g.units.at(d.tgt[i]))) {
                found = j;
                ++count;
            }
        }
        if (count == 0) rep.fail("element " + elem_str(d.ids[i]) + " has no inverse");
        if (count > 1) rep.fail("element " + elem_str(d.ids[i]) + " has several inverses");
        (void)found;
    }

    for (const auto& l : g.incidence.links) {
        auto it = g.generators.find(l.id);
        if (it == g.generators.end()) {
            rep.fail("no generator for link " + l.id);
            continue;
        }
        if (!contains(g.elements, it->second)) {
            rep.fail("generator of link " + l.id + " is not an element");
            continue;
        }
        if (g.sorts.at(it->second) != std::make_pair(l.src, l.tgt))
            rep.fail("generator of link " + l.id + " has sorts differing from the link");
    }
    for (const auto& [id, e] : g.generators) {
        (void)e;
        if (!g.incidence.link(id)) rep.fail("generator declared for unknown link " + id);
    }
    if (!rep.ok()) return rep;

    for (const auto& l : g.incidence.links) {
        int e = g.generators.at(l.id);
        int einv = g.generators.at(l.inv);
        int ep = d.pos.at(e);
        if (d.inv[ep] != d.pos.at(einv))
            rep.fail("generator of link " + l.inv + " is not the inverse of the generator of " + l.id);
    }

    std::vector<char> reach = generated_set(d, generator_positions(d, g.incidence.link_ids()));
    for (int i = 0; i < d.m; ++i)
        if (!reach[i]) rep.fail("element " + elem_str(d.ids[i]) + " is not generated by the links");
    return rep;
}

bool is_simple_groupoid(const Groupoid& g) {
    std::set<int> seen;
    for (const auto& [id, e] : g.generators) {
        (void)id;
        if (!seen.insert(e).second) return false;
        for (const auto& [s, u] : g.units) {
            (void)s;
            if (e == u) return false;
        }
    }
    return true;
}

int eval_walk(const Groupoid& g, const Walk& w) {
    if (w.links.empty()) {
        if (w.anchor < 0) throw PreconditionError("eval_walk: empty walk without an anchor");
        return g.unit(w.anchor);
    }
    int cur = g.gen(w.links.front());
    for (std::size_t i = 1; i < w.links.size(); ++i) cur = g.compose(cur, g.gen(w.links[i]));
    return cur;
}

std::optional<std::string> completeness_defect(const AmalgamationPattern& h) {
    for (const auto& l : h.incidence.links) {
        const PartialMap& rho = h.rho(l.id);
        if (rho.domain() != h.site(l.src).universe || rho.image() != h.site(l.tgt).universe) return l.id;
    }
    return std::nullopt;
}

bool is_complete_pattern(const AmalgamationPattern& h) { return !completeness_defect(h).has_value(); }

Groupoid site_pair_groupoid(const IncidencePattern& inc) {
    ValidationReport rep = validate_incidence(inc);
    if (!rep.ok()) throw PreconditionError("site_pair_groupoid: " + rep.violations.front());
    std::map<int, int> comp;
    for (int s : inc.sites) comp[s] = s;
    std::function<int(int)> find = [&](int x) { return comp[x] == x ? x : comp[x] = find(comp[x]); };
    for (const auto& l : inc.links) comp[find(l.src)] = find(l.tgt);

    std::vector<std::pair<int, int>> pairs;
    for (int s : inc.sites)
        for (int t : inc.sites)
            if (find(s) == find(t)) pairs.emplace_back(s, t);
    std::sort(pairs.begin(), pairs.end());

    Groupoid g;
    g.incidence = inc;
    std::map<std::pair<int, int>, int> id_of;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        g.elements.push_back((int)i);
        g.sorts[(int)i] = pairs[i];
        id_of[pairs[i]] = (int)i;
    }
    for (int s : inc.sites) g.units[s] = id_of.at({s, s});
    for (const auto& [p1, i1] : id_of)
        for (const auto& [p2, i2] : id_of)
            if (p1.second == p2.first) g.table[{i1, i2}] = id_of.at({p1.first, p2.second});
    for (const auto& l : inc.links) g.generators[l.id] = id_of.at({l.src, l.tgt});
    return g;
}

AmalgamationPattern cayley_pattern(const Groupoid& g) {
    AmalgamationPattern h;
    h.incidence = g.incidence;
    h.sig = make_signature({});
    for (int s : g.incidence.sites) {
        RelStructure a;
        a.sig = h.sig;
        for (int e : g.elements)
            if (g.sorts.at(e).second == s) a.universe.push_back(e);
        h.sites[s] = std::move(a);
    }
    for (const auto& l : g.incidence.links) {
        int eg = g.gen(l.id);
        std::vector<std::pair<int, int>> pairs;
        for (int x : h.sites.at(l.src).universe) pairs.emplace_back(x, g.compose(x, eg));
        h.links.emplace(l.id, PartialMap(pairs));
    }
    return h;
}

IncidencePattern cayley_incidence(const Groupoid& g) {
    std::vector<LinkDecl> links;
    for (const auto& l : g.incidence.links) {
        int eg = g.gen(l.id);
        for (int x : g.elements) {
            if (g.sorts.at(x).second != l.src) continue;
            int y = g.compose(x, eg);
            links.push_back(LinkDecl{l.id + "@" + elem_str(x), x, y, l.inv + "@" + elem_str(y)});
        }
    }
    return make_incidence(g.elements, std::move(links));
}

Groupoid groupoid_from_action(const AmalgamationPattern& h) {
    if (auto defect = completeness_defect(h))
        throw PreconditionError("groupoid_from_action: link " + *defect + " is not a bijection between its sites");

    using State = std::tuple<int, int, PartialMap>;
    std::set<State> states;
    std::deque<State> queue;
    for (const auto& [s, a] : h.sites) {
        State st{s, s, identity_map(a.universe)};
        states.insert(st);
        queue.push_back(st);
    }
    while (!queue.empty()) {
        auto [s, t, f] = queue.front();
        queue.pop_front();
        for (const auto& l : h.incidence.links) {
            if (l.src != t) continue;
            State next{s, l.tgt, compose_partial(f, h.rho(l.id))};
            if (states.insert(next).second) queue.push_back(next);
        }
    }

    std::vector<State> order(states.begin(), states.end());
    std::map<State, int> id_of;
    for (std::size_t i = 0; i < order.size(); ++i) id_of[order[i]] = (int)i;

    Groupoid g;
    g.incidence = h.incidence;
    for (std::size_t i = 0; i < order.size(); ++i) {
        g.elements.push_back((int)i);
        g.sorts[(int)i] = {std::get<0>(order[i]), std::get<1>(order[i])};
    }
    for (const auto& [s, a] : h.sites) g.units[s] = id_of.at({s, s, identity_map(a.universe)});
    for (std::size_t i = 0; i < order.size(); ++i)
        for (std::size_t j = 0; j < order.size(); ++j) {
            const auto& [s1, t1, f1] = order[i];
            const auto& [s2, t2, f2] = order[j];
            if (t1 != s2) continue;
            State prod{s1, t2, compose_partial(f1, f2)};
            auto it = id_of.find(prod);
            if (it == id_of.end())
                throw Error("groupoid_from_action: walk maps are not closed under composition");
            g.table[{(int)i, (int)j}] = it->second;
        }
    for (const auto& l : h.incidence.links)
        g.generators[l.id] = id_of.at({l.src, l.tgt, h.rho(l.id)});
    return g;
}

namespace {

void require_inverse_closed(const IncidencePattern& inc, const std::vector<std::string>& alpha) {
    for (const auto& id : alpha) {
        const LinkDecl& l = inc.link_or_throw(id);
        if (std::find(alpha.begin(), alpha.end(), l.inv) == alpha.end())
            throw PreconditionError("link subset is not inverse-closed: " + id + " without " + l.inv);
    }
}

}  // namespace

std::vector<int> subgroupoid(const Groupoid& g, const std::vector<std::string>& alpha) {
    require_inverse_closed(g.incidence, alpha);
    Dense d = densify(g);
    std::vector<char> in = generated_set(d, generator_positions(d, alpha));
    std::vector<int> out;
    for (int i = 0; i < d.m; ++i)
        if (in[i]) out.push_back(d.ids[i]);
    sort_unique(out);
    return out;
}

std::vector<int> coset(const Groupoid& g, int elem, const std::vector<std::string>& alpha) {
    std::vector<int> sub = subgroupoid(g, alpha);
    int t = g.sort_of(elem).second;
    std::vector<int> out;
    for (int h : sub)
        if (g.sort_of(h).first == t) out.push_back(g.compose(elem, h));
    sort_unique(out);
    return out;
}

bool CosetCycle::operator<(const CosetCycle& o) const {
    return std::tie(g, alpha) < std::tie(o.g, o.alpha);
}

ValidationReport verify_coset_cycle(const Groupoid& gd, const CosetCycle& c) {
    ValidationReport rep;
    std::size_t n = c.g.size();
    if (n < 2) rep.fail("cycle shorter than 2");
    if (c.alpha.size() != n) rep.fail("pointed elements and link subsets differ in length");
    if (!rep.ok()) return rep;
    for (std::size_t i = 0; i < n; ++i) {
        try {
            require_inverse_closed(gd.incidence, c.alpha[i]);
        } catch (const PreconditionError& e) {
            rep.fail(std::string("position ") + std::to_string(i) + ": " + e.what());
        }
        if (c.alpha[i].empty()) rep.warn("empty link subset at position " + std::to_string(i));
    }
    if (!rep.ok()) return rep;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t prev = (i + n - 1) % n;
        std::size_t next = (i + 1) % n;
        std::vector<int> cs = coset(gd, c.g[i], c.alpha[i]);
        if (!contains(cs, c.g[next]))
            rep.fail("successor of position " + std::to_string(i) + " lies outside the pointed coset");
        std::vector<int> left = coset(gd, c.g[i], intersect(c.alpha[i], c.alpha[prev]));
        std::vector<int> right = coset(gd, c.g[next], intersect(c.alpha[i], c.alpha[next]));
        if (!intersect(left, right).empty())
            rep.fail("shortcut through position " + std::to_string(i) + ": restricted cosets intersect");
    }
    return rep;
}

namespace {

struct CycleSearch {
    const Groupoid* g;
    Dense d;
    std::vector<std::pair<std::string, std::string>> atom_list;
    int n_atoms = 0;
    std::vector<std::vector<char>> member;        // mask -> generated set
    std::map<std::pair<int, int>, std::vector<char>> products;

    std::vector<std::string> alpha_of(int mask) const {
        std::vector<std::string> out;
        for (int j = 0; j < n_atoms; ++j)
            if (mask & (1 << j)) {
                out.push_back(atom_list[j].first);
                out.push_back(atom_list[j].second);
            }
        sort_unique(out);
        return out;
    }

    const std::vector<char>& product_set(int beta, int gamma) {
        auto key = std::make_pair(beta, gamma);
        auto it = products.find(key);
        if (it != products.end()) return it->second;
        std::vector<char> p(d.m, 0);
        for (int u = 0; u < d.m; ++u) {
            if (!member[beta][u]) continue;
            for (int v = 0; v < d.m; ++v) {
                if (!member[gamma][v] || d.tgt[u] != d.src[v]) continue;
                int w = d.at(u, v);
                if (w >= 0) p[w] = 1;
            }
        }
        return products.emplace(key, std::move(p)).first->second;
    }
};

CosetCycle canonical_rotation(const CosetCycle& c) {
    std::size_t n = c.g.size();
    CosetCycle best = c;
    for (std::size_t r = 1; r < n; ++r) {
        CosetCycle rot;
        for (std::size_t i = 0; i < n; ++i) {
            rot.g.push_back(c.g[(i + r) % n]);
            rot.alpha.push_back(c.alpha[(i + r) % n]);
        }
        if (rot < best) best = rot;
    }
    return best;
}

}  // namespace

CycleSearchResult find_coset_cycles(const Groupoid& g, int n_max, Budget& budget, int max_results) {
    if (n_max < 2) throw PreconditionError("find_coset_cycles: length bound must be at least 2");
    if (max_results < 1) throw PreconditionError("find_coset_cycles: max_results must be positive");
    CycleSearchResult res;
    std::set<CosetCycle> found;

    CycleSearch cs;
    cs.g = &g;
    cs.d = densify(g);
    cs.atom_list = g.incidence.atoms();
    cs.n_atoms = (int)cs.atom_list.size();
    if (cs.n_atoms > 16) throw PreconditionError("find_coset_cycles: too many link atoms for subset enumeration");
    int n_masks = 1 << cs.n_atoms;
    cs.member.resize(n_masks);
    for (int mask = 0; mask < n_masks; ++mask) {
        if (!budget.spend(cs.d.m)) {
            res.exhaustive = false;
            return res;
        }
        cs.member[mask] = generated_set(cs.d, generator_positions(cs.d, cs.alpha_of(mask)));
    }

    auto push_cycle = [&](const CosetCycle& c) {
        CosetCycle canon = canonical_rotation(c);
        if (found.insert(canon).second) res.cycles.push_back(canon);
    };

    // length 2, decided exactly: a violation of the subgroupoid intersection law
    // yields the cycle from its witness element
    for (int mask0 = 0; mask0 < n_masks && (int)found.size() < max_results; ++mask0)
        for (int mask1 = mask0; mask1 < n_masks && (int)found.size() < max_results; ++mask1) {
            if (!budget.spend(cs.d.m)) {
                res.exhaustive = false;
                return res;
            }
            const auto& a = cs.member[mask0];
            const auto& b = cs.member[mask1];
            const auto& both = cs.member[mask0 & mask1];
            for (int x = 0; x < cs.d.m; ++x) {
                if (!a[x] || !b[x] || both[x]) continue;
                CosetCycle c;
                c.g = {g.units.at(cs.d.src[x]), cs.d.ids[x]};
                c.alpha = {cs.alpha_of(mask0), cs.alpha_of(mask1)};
                push_cycle(c);
                break;
            }
        }

    // longer cycles via the translated form: h_i = g_i^-1 g_(i+1) in G[a_i],
    // product of all h_i a unit, and h_i outside G[a_i & a_i-1] G[a_i & a_i+1]
    for (int n = 3; n <= n_max && (int)found.size() < max_results; ++n) {
        std::vector<int> masks(n, 0);
        std::vector<const std::vector<char>*> allowed(n, nullptr);

        std::function<bool()> masks_canonical = [&]() {
            for (int r = 1; r < n; ++r)
                for (int i = 0; i < n; ++i) {
                    int a = masks[i], b = masks[(i + r) % n];
                    if (a != b) {
                        if (b < a) return false;
                        break;
                    }
                }
            return true;
        };

        std::vector<int> hs(n, -1);
        std::function<bool(int, int)> dfs_h = [&](int pos, int prefix) -> bool {
            if (!budget.spend()) return false;
            if (pos == n - 1) {
                int last = cs.d.inv[prefix];
                if (last < 0) return false;
                if (!(*allowed[pos])[last]) return false;
                if (cs.d.src[last] != cs.d.tgt[prefix]) return false;
                hs[pos] = last;
                CosetCycle c;
                int cur = cs.d.pos.at(g.units.at(cs.d.src[hs[0]]));
                for (int i = 0; i < n; ++i) {
                    c.g.push_back(cs.d.ids[cur]);
                    c.alpha.push_back(cs.alpha_of(masks[i]));
                    if (i + 1 < n) cur = cs.d.at(cur, hs[i]);
                }
                push_cycle(c);
                return true;
            }
            for (int h = 0; h < cs.d.m; ++h) {
                if (!(*allowed[pos])[h]) continue;
                if (pos > 0 && cs.d.src[h] != cs.d.tgt[prefix]) continue;
                int next_prefix = pos == 0 ? h : cs.d.at(prefix, h);
                hs[pos] = h;
                if (dfs_h(pos + 1, next_prefix)) return true;
                if (budget.exhausted()) return false;
            }
            return false;
        };

        std::vector<std::vector<char>> scratch(n);
        std::function<void(int)> dfs_mask = [&](int pos) {
            if (budget.exhausted() || (int)found.size() >= max_results) return;
            if (pos == n) {
                if (!masks_canonical()) return;
                for (int i = 0; i < n; ++i) {
                    int beta = masks[i] & masks[(i + n - 1) % n];
                    int gamma = masks[i] & masks[(i + 1) % n];
                    const auto& sub = cs.member[masks[i]];
                    const auto& shortcut = cs.product_set(beta, gamma);
                    scratch[i].assign(cs.d.m, 0);
                    bool any = false;
                    for (int x = 0; x < cs.d.m; ++x)
                        if (sub[x] && !shortcut[x]) {
                            scratch[i][x] = 1;
                            any = true;
                        }
                    if (!any) return;
                    allowed[i] = &scratch[i];
                }
                dfs_h(0, -1);
                return;
            }
            for (int mask = 0; mask < n_masks; ++mask) {
                masks[pos] = mask;
                dfs_mask(pos + 1);
                if (budget.exhausted() || (int)found.size() >= max_results) return;
            }
        };
        dfs_mask(0);
        if (budget.exhausted()) {
            res.exhaustive = false;
            return res;
        }
    }
    return res;
}

AcyclicityVerdict is_n_acyclic(const Groupoid& g, int n_max, Budget& budget) {
    CycleSearchResult r = find_coset_cycles(g, n_max, budget, 1);
    AcyclicityVerdict v;
    v.exhaustive = r.exhaustive;
    if (!r.cycles.empty()) {
        v.value = false;
        v.witness = r.cycles.front();
    } else {
        // with an exhausted budget this means "none found", not "none exist"
        v.value = true;
    }
    return v;
}

CompatibilityVerdict is_compatible(const Groupoid& g, const AmalgamationPattern& h, std::uint64_t cap) {
    if (!(g.incidence == h.incidence))
        throw PreconditionError("is_compatible: groupoid and pattern have different incidence patterns");
    CompatibilityVerdict v;
    v.value = true;

    using Key = std::pair<int, PartialMap>;
    std::set<Key> seen;
    std::deque<std::pair<Key, Walk>> queue;
    for (const auto& [s, a] : h.sites) {
        Key k{g.unit(s), identity_map(a.universe)};
        seen.insert(k);
        queue.emplace_back(k, empty_walk(s));
    }
    while (!queue.empty()) {
        auto [key, walk] = queue.front();
        queue.pop_front();
        auto [elem, map] = key;
        int t = g.sort_of(elem).second;
        for (const auto& l : h.incidence.links) {
            if (l.src != t) continue;
            Key next{g.compose(elem, g.gen(l.id)), compose_partial(map, h.rho(l.id))};
            if (seen.count(next)) continue;
            if (seen.size() >= cap) {
                v.complete = false;
                return v;
            }
            Walk w = append_link(h.incidence, walk, l.id);
            auto st = g.sort_of(next.first);
            if (st.first == st.second && next.first == g.unit(st.first) &&
                !next.second.is_identity_restriction()) {
                v.value = false;
                v.witness = w;
                return v;
            }
            seen.insert(next);
            queue.emplace_back(next, w);
        }
    }
    return v;
}

Groupoid tilde_groupoid(const Groupoid& g, const Groupoid& ghat) {
    IncidencePattern ihat = cayley_incidence(g);
    if (!(ghat.incidence == ihat))
        throw PreconditionError("tilde_groupoid: inner groupoid is not over the induced finer incidence pattern");

    AmalgamationPattern coarse;
    coarse.incidence = g.incidence;
    coarse.sig = make_signature({});
    for (int s : g.incidence.sites) {
        RelStructure a;
        a.sig = coarse.sig;
        for (int x : ghat.elements)
            if (g.sorts.at(ghat.sorts.at(x).second).second == s) a.universe.push_back(x);
        coarse.sites[s] = std::move(a);
    }
    for (const auto& l : g.incidence.links) {
        std::vector<std::pair<int, int>> pairs;
        for (int x : coarse.sites.at(l.src).universe) {
            int mid = ghat.sorts.at(x).second;  // site of x in the finer pattern = element of g
            int gen_hat = ghat.gen(l.id + "@" + elem_str(mid));
            pairs.emplace_back(x, ghat.compose(x, gen_hat));
        }
        coarse.links.emplace(l.id, PartialMap(pairs));
    }
    ValidationReport rep = validate_pattern(coarse);
    if (!rep.ok()) throw Error("tilde_groupoid: recombined pattern invalid: " + rep.violations.front());
    return groupoid_from_action(coarse);
}

int FreeTruncation::index_of(const Walk& w) const {
    Walk c = canon_walk(w);
    for (std::size_t i = 0; i < words.size(); ++i)
        if (words[i] == c) return (int)i;
    return -1;
}

int FreeTruncation::unit_index(int site) const {
    int i = index_of(empty_walk(site));
    if (i < 0) throw PreconditionError("free truncation: no unit at site " + std::to_string(site));
    return i;
}

int FreeTruncation::inverse_index(int i) const {
    int j = index_of(inverse_walk(incidence, words.at(i)));
    if (j < 0) throw Error("free truncation: inverse escaped the word list");
    return j;
}

std::pair<int, int> FreeTruncation::sort_of_index(int i) const { return walk_iota(incidence, words.at(i)); }

std::optional<int> FreeTruncation::compose(int i, int j) const {
    auto si = sort_of_index(i);
    auto sj = sort_of_index(j);
    if (si.second != sj.first)
        throw PreconditionError("free truncation: composition on mismatched sorts");
    Walk prod = reduce_walk(incidence, concat_walks(incidence, words.at(i), words.at(j)));
    if ((int)prod.links.size() > radius) return std::nullopt;
    int k = index_of(prod);
    if (k < 0) throw Error("free truncation: reduced product escaped the word list");
    return k;
}

FreeTruncation free_truncation(const IncidencePattern& inc, int radius) {
    if (radius < 0) throw PreconditionError("free_truncation: radius must be nonnegative");
    FreeTruncation f;
    f.incidence = inc;
    f.radius = radius;
    for (const Walk& w : walks_up_to(inc, radius))
        if (is_reduced_walk(inc, w)) f.words.push_back(canon_walk(w));
    return f;
}

bool truncation_cycle_free(const FreeTruncation& f, int n_max) {
    if (n_max < 2) throw PreconditionError("truncation_cycle_free: length bound must be at least 2");
    auto atom_list = f.incidence.atoms();
    int n_atoms = (int)atom_list.size();
    if (n_atoms > 12) throw PreconditionError("truncation_cycle_free: too many link atoms");
    int n_masks = 1 << n_atoms;
    int m = (int)f.words.size();

    auto links_of_mask = [&](int mask) {
        std::vector<std::string> out;
        for (int j = 0; j < n_atoms; ++j)
            if (mask & (1 << j)) {
                out.push_back(atom_list[j].first);
                out.push_back(atom_list[j].second);
            }
        sort_unique(out);
        return out;
    };
    std::vector<std::vector<char>> member(n_masks, std::vector<char>(m, 0));
    for (int mask = 0; mask < n_masks; ++mask) {
        std::vector<std::string> allowed_links = links_of_mask(mask);
        for (int i = 0; i < m; ++i) {
            bool ok = true;
            for (const auto& lid : f.words[i].links)
                if (!contains(allowed_links, lid)) ok = false;
            member[mask][i] = ok;
        }
    }

    // length 2: literal word membership makes the intersection law hold or fail outright
    for (int a = 0; a < n_masks; ++a)
        for (int b = a; b < n_masks; ++b)
            for (int x = 0; x < m; ++x)
                if (member[a][x] && member[b][x] && !member[a & b][x]) return false;

    // longer lengths: bounded h-tuple search over in-range products, candidate
    // words capped at half the radius so shortcut products stay in range
    int hcap = f.radius / 2;
    std::function<bool(int, const std::vector<int>&, int, std::vector<int>&)> dfs =
        [&](int n, const std::vector<int>& masks, int pos, std::vector<int>& hs) -> bool {
        if (pos == n) {
            // product of all words must reduce to a unit
            std::optional<int> cur = hs[0];
            for (int i = 1; i < n && cur; ++i) cur = f.compose(*cur, hs[i]);
            if (!cur) return false;
            return f.words[*cur].links.empty();
        }
        for (int x = 0; x < m; ++x) {
            if (!member[masks[pos]][x] || (int)f.words[x].links.size() > hcap) continue;
            if (pos > 0) {
                auto prev = f.sort_of_index(hs[pos - 1]);
                if (f.sort_of_index(x).first != prev.second) continue;
            }
            // shortcut test: x = u v with u over masks[pos] & masks[pos-1], v over masks[pos] & masks[pos+1]
            int beta = masks[pos] & masks[(pos + n - 1) % n];
            int gamma = masks[pos] & masks[(pos + 1) % n];
            bool shortcut = false;
            for (int u = 0; u < m && !shortcut; ++u) {
                if (!member[beta][u]) continue;
                auto su = f.sort_of_index(u);
                if (su.first != f.sort_of_index(x).first) continue;
                for (int v = 0; v < m && !shortcut; ++v) {
                    if (!member[gamma][v]) continue;
                    if (f.sort_of_index(v).first != su.second) continue;
                    std::optional<int> uv = f.compose(u, v);
                    if (uv && *uv == x) shortcut = true;
                }
            }
            if (shortcut) continue;
            hs[pos] = x;
            if (dfs(n, masks, pos + 1, hs)) return true;
        }
        return false;
    };

    for (int n = 3; n <= n_max; ++n) {
        std::vector<int> masks(n, 0);
        std::function<bool(int)> loop_masks = [&](int pos) -> bool {
            if (pos == n) {
                std::vector<int> hs(n, -1);
                return dfs(n, masks, 0, hs);
            }
            for (int mask = 0; mask < n_masks; ++mask) {
                masks[pos] = mask;
                if (loop_masks(pos + 1)) return true;
            }
            return false;
        };
        if (loop_masks(0)) return false;
    }
    return true;
}

std::vector<int> coordinate_moduli(const IncidencePattern& inc) {
    bool self_inverse_loop = false;
    bool proper_loop = false;
    for (const auto& [e, einv] : inc.atoms()) {
        const LinkDecl& l = inc.link_or_throw(e);
        if (l.src != l.tgt) continue;
        if (e == einv)
            self_inverse_loop = true;
        else
            proper_loop = true;
    }
    std::vector<int> ladder{2, 3, 4, 6, 8, 12};
    std::vector<int> out;
    for (int k : ladder) {
        if (self_inverse_loop && k % 2 != 0) continue;
        if (proper_loop && k < 3) continue;
        out.push_back(k);
    }
    return out;
}

std::optional<Groupoid> coordinate_groupoid(const IncidencePattern& inc, int k, std::size_t max_size) {
    if (k < 2) throw PreconditionError("coordinate_groupoid: modulus must be at least 2");
    ValidationReport rep = validate_incidence(inc);
    if (!rep.ok()) throw PreconditionError("coordinate_groupoid: " + rep.violations.front());

    auto atom_list = inc.atoms();
    int A = (int)atom_list.size();
    std::map<std::string, std::vector<int>> gamma;
    for (int j = 0; j < A; ++j) {
        const auto& [e, einv] = atom_list[j];
        std::vector<int> plus(A, 0), minus(A, 0);
        if (e == einv) {
            if (k % 2 != 0)
                throw Error("coordinate_groupoid: modulus must be even for self-inverse loop " + e);
            plus[j] = k / 2;
            gamma[e] = plus;
        } else {
            const LinkDecl& l = inc.link_or_throw(e);
            if (l.src == l.tgt && k < 3)
                throw Error("coordinate_groupoid: modulus must exceed 2 for loop atom " + e);
            plus[j] = 1;
            minus[j] = k - 1;
            gamma[e] = plus;
            gamma[einv] = minus;
        }
    }

    using State = std::tuple<int, std::vector<int>, int>;  // (source, counters, target)
    std::set<State> states;
    std::deque<State> queue;
    for (int s : inc.sites) {
        State st{s, std::vector<int>(A, 0), s};
        states.insert(st);
        queue.push_back(st);
    }
    while (!queue.empty()) {
        auto [s, q, t] = queue.front();
        queue.pop_front();
        for (const auto& l : inc.links) {
            if (l.src != t) continue;
            std::vector<int> q2 = q;
            const auto& gv = gamma.at(l.id);
            for (int j = 0; j < A; ++j) q2[j] = (q2[j] + gv[j]) % k;
            State next{s, std::move(q2), l.tgt};
            if (states.count(next)) continue;
            if (states.size() >= max_size) return std::nullopt;
            states.insert(next);
            queue.push_back(next);
        }
    }

    std::vector<State> order(states.begin(), states.end());
    std::map<State, int> id_of;
    for (std::size_t i = 0; i < order.size(); ++i) id_of[order[i]] = (int)i;

    Groupoid g;
    g.incidence = inc;
    for (std::size_t i = 0; i < order.size(); ++i) {
        g.elements.push_back((int)i);
        g.sorts[(int)i] = {std::get<0>(order[i]), std::get<2>(order[i])};
    }
    for (int s : inc.sites) g.units[s] = id_of.at({s, std::vector<int>(A, 0), s});
    for (std::size_t i = 0; i < order.size(); ++i)
        for (std::size_t j = 0; j < order.size(); ++j) {
            const auto& [s1, q1, t1] = order[i];
            const auto& [s2, q2, t2] = order[j];
            if (t1 != s2) continue;
            std::vector<int> q3(A);
            for (int x = 0; x < A; ++x) q3[x] = (q1[x] + q2[x]) % k;
            auto it = id_of.find({s1, q3, t2});
            if (it == id_of.end()) throw Error("coordinate_groupoid: products escaped the reachable set");
            g.table[{(int)i, (int)j}] = it->second;
        }
    for (const auto& l : inc.links) {
        State st{l.src, gamma.at(l.id), l.tgt};
        auto it = id_of.find(st);
        if (it == id_of.end()) throw Error("coordinate_groupoid: generator escaped the reachable set");
        g.generators[l.id] = it->second;
    }
    return g;
}

GroupoidSearchResult search_groupoid(const IncidencePattern& inc, const AmalgamationPattern& h, int n_acyclic,
                                     std::size_t max_size, Budget& budget) {
    if (n_acyclic < 2 || max_size < 1)
        throw PreconditionError("search_groupoid: bounds must be positive (acyclicity at least 2)");
    if (!(h.incidence == inc))
        throw PreconditionError("search_groupoid: pattern lives over a different incidence pattern");
    GroupoidSearchResult res;
    for (int k : coordinate_moduli(inc)) {
        if (budget.exhausted()) {
            res.exhausted = true;
            return res;
        }
        std::optional<Groupoid> cand;
        try {
            cand = coordinate_groupoid(inc, k, max_size);
        } catch (const Error&) {
            continue;  // modulus invalid for this atom mix
        }
        if (!cand) break;  // candidate sizes grow with the modulus
        budget.spend(cand->elements.size());
        if (!is_simple_groupoid(*cand)) continue;
        CompatibilityVerdict compat = is_compatible(*cand, h);
        if (!compat.complete) {
            res.exhausted = true;
            continue;
        }
        if (!compat.value) continue;
        AcyclicityVerdict acyc = is_n_acyclic(*cand, n_acyclic, budget);
        if (!acyc.exhaustive) {
            res.exhausted = true;
            continue;
        }
        if (!acyc.value) continue;
        res.groupoid = std::move(cand);
        res.exhausted = false;
        return res;
    }
    return res;
}

bool IncidenceSymmetry::operator<(const IncidenceSymmetry& o) const {
    return std::tie(site_map, link_map) < std::tie(o.site_map, o.link_map);
}

std::vector<IncidenceSymmetry> incidence_symmetries(const IncidencePattern& inc) {
    std::vector<IncidenceSymmetry> out;
    std::vector<int> perm(inc.sites.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = (int)i;
    std::vector<std::string> ids = inc.link_ids();

    do {
        std::map<int, int> site_map;
        for (std::size_t i = 0; i < perm.size(); ++i) site_map[inc.sites[i]] = inc.sites[perm[i]];

        std::map<std::string, std::string> link_map;
        std::set<std::string> used;
        // all link bijections matching the site permutation and carrying reversal along
        std::function<void(std::size_t)> assign_all = [&](std::size_t i) {
            if (i == ids.size()) {
                out.push_back(IncidenceSymmetry{site_map, link_map});
                return;
            }
            if (link_map.count(ids[i])) {
                assign_all(i + 1);
                return;
            }
            const LinkDecl& l = inc.link_or_throw(ids[i]);
            for (const auto& cand : ids) {
                if (used.count(cand)) continue;
                const LinkDecl& c = inc.link_or_throw(cand);
                if (c.src != site_map.at(l.src) || c.tgt != site_map.at(l.tgt)) continue;
                if (l.inv == ids[i] && c.inv != cand) continue;
                if (l.inv != ids[i] && c.inv == cand) continue;
                if (link_map.count(l.inv) && link_map.at(l.inv) != c.inv) continue;
                link_map[ids[i]] = cand;
                used.insert(cand);
                bool placed_inverse = false;
                if (l.inv != ids[i] && !link_map.count(l.inv)) {
                    if (used.count(c.inv)) {
                        used.erase(cand);
                        link_map.erase(ids[i]);
                        continue;
                    }
                    link_map[l.inv] = c.inv;
                    used.insert(c.inv);
                    placed_inverse = true;
                }
                assign_all(i + 1);
                if (placed_inverse) {
                    used.erase(c.inv);
                    link_map.erase(l.inv);
                }
                used.erase(cand);
                link_map.erase(ids[i]);
            }
        };
        assign_all(0);
    } while (std::next_permutation(perm.begin(), perm.end()));

    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::optional<std::map<int, int>> extend_incidence_symmetry(const Groupoid& g, const IncidenceSymmetry& sym) {
    // one generating walk per element, in discovery order from the units
    std::map<int, Walk> walk_of;
    std::deque<int> queue;
    for (const auto& [s, u] : g.units) {
        walk_of[u] = empty_walk(s);
        queue.push_back(u);
    }
    while (!queue.empty()) {
        int x = queue.front();
        queue.pop_front();
        for (const auto& l : g.incidence.links) {
            if (l.src != g.sort_of(x).second) continue;
            int y = g.compose(x, g.gen(l.id));
            if (walk_of.count(y)) continue;
            walk_of[y] = append_link(g.incidence, walk_of[x], l.id);
            queue.push_back(y);
        }
    }
    if (walk_of.size() != g.elements.size()) return std::nullopt;  // not generated; validate would flag this

    auto map_walk = [&](const Walk& w) {
        Walk out;
        out.anchor = w.anchor >= 0 ? sym.site_map.at(w.anchor) : -1;
        for (const auto& lid : w.links) out.links.push_back(sym.link_map.at(lid));
        return out;
    };
    std::map<int, int> sigma;
    std::set<int> image;
    for (int x : g.elements) {
        int y = eval_walk(g, map_walk(walk_of.at(x)));
        sigma[x] = y;
        image.insert(y);
    }
    if (image.size() != g.elements.size()) return std::nullopt;
    for (const auto& [s, u] : g.units)
        if (sigma.at(u) != g.unit(sym.site_map.at(s))) return std::nullopt;
    for (const auto& [lid, e] : g.generators)
        if (sigma.at(e) != g.gen(sym.link_map.at(lid))) return std::nullopt;
    for (const auto& [pair, val] : g.table)
        if (g.compose(sigma.at(pair.first), sigma.at(pair.second)) != sigma.at(val)) return std::nullopt;
    return sigma;
}

namespace {

std::string describe(const IncidenceSymmetry& sym) {
    std::ostringstream os;
    os << "sites(";
    bool first = true;
    for (const auto& [a, b] : sym.site_map) {
        if (!first) os << " ";
        first = false;
        os << a << ">" << b;
    }
    os << ") links(";
    first = true;
    for (const auto& [a, b] : sym.link_map) {
        if (!first) os << " ";
        first = false;
        os << a << ">" << b;
    }
    os << ")";
    return os.str();
}

SymmetryExtensionVerdict check_extensions(const Groupoid& g, const std::vector<IncidenceSymmetry>& syms) {
    SymmetryExtensionVerdict v;
    v.value = true;
    for (const auto& sym : syms) {
        if (!extend_incidence_symmetry(g, sym)) {
            v.value = false;
            v.detail = "no groupoid symmetry extends " + describe(sym);
            return v;
        }
    }
    return v;
}

}  // namespace

SymmetryExtensionVerdict is_fully_symmetric_over(const Groupoid& g, const AmalgamationPattern& h, Budget& budget) {
    if (!(g.incidence == h.incidence))
        throw PreconditionError("is_fully_symmetric_over: different incidence patterns");
    SymmetrySearchResult syms = pattern_symmetries(h, false, budget);

    std::set<IncidenceSymmetry> induced;
    const auto& links = h.incidence.links;
    for (const Symmetry& sym : syms.symmetries) {
        IncidenceSymmetry is;
        for (int s : h.incidence.sites) is.site_map[s] = sym.apply("S", s);
        for (std::size_t i = 0; i < links.size(); ++i)
            is.link_map[links[i].id] = links[sym.apply("E", (int)i)].id;
        induced.insert(is);
    }
    SymmetryExtensionVerdict v =
        check_extensions(g, std::vector<IncidenceSymmetry>(induced.begin(), induced.end()));
    v.exhaustive = syms.exhaustive;
    return v;
}

SymmetryExtensionVerdict is_fully_symmetric_over_incidence(const Groupoid& g) {
    return check_extensions(g, incidence_symmetries(g.incidence));
}

}  // namespace amalgam
