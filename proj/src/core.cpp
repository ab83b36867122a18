#include "amalgam/core.hpp"

#include <algorithm>
#include <climits>
#include <cstdlib>
#include <sstream>

#include "amalgam/util.hpp"

namespace amalgam {

Budget default_budget() {
    Budget b;
    if (const char* env = std::getenv("AMALGAM_BUDGET")) {
        char* end = nullptr;
        unsigned long long v = std::strtoull(env, &end, 10);
        if (end && *end == '\0' && v > 0) b.limit = v;
    }
    return b;
}

std::uint64_t default_closure_cap() {
    return 1000000;
}

const RelSymbol* Signature::find(const std::string& name) const {
    for (const auto& s : symbols)
        if (s.name == name) return &s;
    return nullptr;
}

Signature make_signature(std::vector<RelSymbol> symbols) {
    std::sort(symbols.begin(), symbols.end());
    for (std::size_t i = 1; i < symbols.size(); ++i)
        if (symbols[i].name == symbols[i - 1].name) throw Error("duplicate relation symbol: " + symbols[i].name);
    return Signature{std::move(symbols)};
}

bool RelStructure::has_element(int a) const {
    return contains(universe, a);
}

const std::set<std::vector<int>>& RelStructure::tuples(const std::string& name) const {
    static const std::set<std::vector<int>> kEmpty;
    auto it = relations.find(name);
    return it == relations.end() ? kEmpty : it->second;
}

ValidationReport validate_structure(const RelStructure& a) {
    ValidationReport rep;
    if (!std::is_sorted(a.universe.begin(), a.universe.end()) ||
        std::adjacent_find(a.universe.begin(), a.universe.end()) != a.universe.end())
        rep.fail("universe is not sorted-unique");
    for (const auto& [name, tuples] : a.relations) {
        const RelSymbol* sym = a.sig.find(name);
        if (!sym) {
            rep.fail("relation not in signature: " + name);
            continue;
        }
        for (const auto& t : tuples) {
            if ((int)t.size() != sym->arity) {
                std::ostringstream os;
                os << "relation " << name << " has a tuple of arity " << t.size() << ", expected " << sym->arity;
                rep.fail(os.str());
                break;
            }
            for (int e : t)
                if (!a.has_element(e)) {
                    std::ostringstream os;
                    os << "relation " << name << " mentions element " << e << " outside the universe";
                    rep.fail(os.str());
                    break;
                }
        }
    }
    return rep;
}

RelStructure induced_substructure(const RelStructure& a, const std::vector<int>& subset) {
    std::vector<int> sub = subset;
    sort_unique(sub);
    for (int e : sub)
        if (!a.has_element(e)) throw PreconditionError("induced_substructure: element outside the universe");
    RelStructure out;
    out.sig = a.sig;
    out.universe = sub;
    for (const auto& [name, tuples] : a.relations) {
        std::set<std::vector<int>> kept;
        for (const auto& t : tuples) {
            bool inside = true;
            for (int e : t)
                if (!contains(sub, e)) {
                    inside = false;
                    break;
                }
            if (inside) kept.insert(t);
        }
        if (!kept.empty()) out.relations[name] = std::move(kept);
    }
    return out;
}

RelStructure disjoint_union(const Signature& sig, const std::vector<const RelStructure*>& parts) {
    RelStructure out;
    out.sig = sig;
    for (const RelStructure* p : parts) {
        if (!(p->sig == sig)) throw PreconditionError("disjoint_union: signature mismatch");
        for (int e : p->universe) {
            if (contains(out.universe, e)) throw PreconditionError("disjoint_union: universes are not disjoint");
        }
        out.universe.insert(out.universe.end(), p->universe.begin(), p->universe.end());
        for (const auto& [name, tuples] : p->relations) out.relations[name].insert(tuples.begin(), tuples.end());
    }
    sort_unique(out.universe);
    return out;
}

PartialMap::PartialMap(std::vector<std::pair<int, int>> pairs) {
    auto made = try_make(std::move(pairs));
    if (!made) throw Error("PartialMap: pairs are not a partial injection");
    *this = std::move(*made);
}

std::optional<PartialMap> PartialMap::try_make(std::vector<std::pair<int, int>> pairs) {
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
    std::set<int> seen_src, seen_tgt;
    for (const auto& [a, b] : pairs) {
        if (!seen_src.insert(a).second) return std::nullopt;
        if (!seen_tgt.insert(b).second) return std::nullopt;
    }
    PartialMap m;
    m.pairs_ = std::move(pairs);
    return m;
}

std::optional<int> PartialMap::apply(int a) const {
    auto it = std::lower_bound(pairs_.begin(), pairs_.end(), std::pair<int, int>{a, INT_MIN},
                               [](const auto& p, const auto& q) { return p.first < q.first; });
    if (it != pairs_.end() && it->first == a) return it->second;
    return std::nullopt;
}

bool PartialMap::defined_on(int a) const {
    return apply(a).has_value();
}

std::vector<int> PartialMap::domain() const {
    std::vector<int> out;
    out.reserve(pairs_.size());
    for (const auto& [a, b] : pairs_) out.push_back(a);
    return out;
}

std::vector<int> PartialMap::image() const {
    std::vector<int> out;
    out.reserve(pairs_.size());
    for (const auto& [a, b] : pairs_) out.push_back(b);
    std::sort(out.begin(), out.end());
    return out;
}

PartialMap PartialMap::inverse() const {
    std::vector<std::pair<int, int>> flipped;
    flipped.reserve(pairs_.size());
    for (const auto& [a, b] : pairs_) flipped.emplace_back(b, a);
    return PartialMap(std::move(flipped));
}

PartialMap PartialMap::restrict_domain(const std::vector<int>& dom) const {
    std::vector<std::pair<int, int>> kept;
    for (const auto& [a, b] : pairs_)
        if (contains(dom, a)) kept.emplace_back(a, b);
    return PartialMap(std::move(kept));
}

bool PartialMap::is_identity_restriction() const {
    for (const auto& [a, b] : pairs_)
        if (a != b) return false;
    return true;
}

bool PartialMap::extends(const PartialMap& other) const {
    return std::includes(pairs_.begin(), pairs_.end(), other.pairs_.begin(), other.pairs_.end());
}

PartialMap compose_partial(const PartialMap& f, const PartialMap& g) {
    std::vector<std::pair<int, int>> out;
    for (const auto& [a, b] : f.pairs()) {
        if (auto c = g.apply(b)) out.emplace_back(a, *c);
    }
    return PartialMap(std::move(out));
}

std::optional<PartialMap> union_partial(const PartialMap& f, const PartialMap& g) {
    std::vector<std::pair<int, int>> all = f.pairs();
    all.insert(all.end(), g.pairs().begin(), g.pairs().end());
    return PartialMap::try_make(std::move(all));
}

PartialMap identity_map(const std::vector<int>& dom) {
    std::vector<std::pair<int, int>> pairs;
    pairs.reserve(dom.size());
    for (int a : dom) pairs.emplace_back(a, a);
    return PartialMap(std::move(pairs));
}

namespace {

bool tuple_within(const std::vector<int>& t, const std::vector<int>& sorted_set) {
    for (int e : t)
        if (!contains(sorted_set, e)) return false;
    return true;
}

}  // namespace

bool is_partial_isomorphism(const RelStructure& a, const RelStructure& b, const PartialMap& f) {
    for (const auto& [x, y] : f.pairs()) {
        if (!a.has_element(x)) throw PreconditionError("is_partial_isomorphism: source endpoint outside universe");
        if (!b.has_element(y)) throw PreconditionError("is_partial_isomorphism: target endpoint outside universe");
    }
    std::vector<int> dom = f.domain();
    std::vector<int> img = f.image();
    for (const auto& sym : a.sig.symbols) {
        for (const auto& t : a.tuples(sym.name)) {
            if (!tuple_within(t, dom)) continue;
            std::vector<int> mapped;
            mapped.reserve(t.size());
            for (int e : t) mapped.push_back(*f.apply(e));
            if (!b.tuples(sym.name).count(mapped)) return false;
        }
    }
    PartialMap back = f.inverse();
    for (const auto& sym : b.sig.symbols) {
        for (const auto& t : b.tuples(sym.name)) {
            if (!tuple_within(t, img)) continue;
            std::vector<int> mapped;
            mapped.reserve(t.size());
            for (int e : t) mapped.push_back(*back.apply(e));
            if (!a.tuples(sym.name).count(mapped)) return false;
        }
    }
    return true;
}

bool is_isomorphism_onto(const RelStructure& a, const RelStructure& b, const PartialMap& f) {
    if (f.domain() != a.universe) return false;
    if (f.image() != b.universe) return false;
    return is_partial_isomorphism(a, b, f);
}

namespace {

struct HomSearcher {
    const RelStructure& x;
    const RelStructure& a;
    Budget& budget;
    std::vector<int> order;           // x's universe
    std::map<int, int> assign;
    std::vector<std::map<int, int>> found;
    bool exhaustive = true;

    bool tuple_ok(const std::vector<int>& t, const std::string& rel) {
        std::vector<int> mapped;
        mapped.reserve(t.size());
        for (int e : t) {
            auto it = assign.find(e);
            if (it == assign.end()) return true;  // not yet decidable
            mapped.push_back(it->second);
        }
        return a.tuples(rel).count(mapped) > 0;
    }

    bool consistent(int just_assigned) {
        for (const auto& sym : x.sig.symbols) {
            for (const auto& t : x.tuples(sym.name)) {
                bool touches = false;
                for (int e : t)
                    if (e == just_assigned) {
                        touches = true;
                        break;
                    }
                if (touches && !tuple_ok(t, sym.name)) return false;
            }
        }
        return true;
    }

    void run(std::size_t idx) {
        if (idx == order.size()) {
            found.push_back(assign);
            return;
        }
        int src = order[idx];
        for (int tgt : a.universe) {
            if (!budget.spend()) {
                exhaustive = false;
                return;
            }
            assign[src] = tgt;
            if (consistent(src)) run(idx + 1);
            assign.erase(src);
            if (!exhaustive) return;
        }
    }
};

}  // namespace

HomSearchResult find_homomorphisms(const RelStructure& x, const RelStructure& a, Budget& budget) {
    HomSearcher s{x, a, budget, {}, {}, {}, true};
    s.order = x.universe;
    if (x.universe.empty()) {
        s.found.push_back({});
    } else if (!a.universe.empty()) {
        s.run(0);
    }
    return HomSearchResult{std::move(s.found), s.exhaustive};
}

const std::vector<int>* MultiSortedInstance::carrier(const std::string& sort) const {
    for (const auto& [name, elems] : sorts)
        if (name == sort) return &elems;
    return nullptr;
}

ValidationReport validate_multisorted(const MultiSortedInstance& m) {
    ValidationReport rep;
    std::set<std::string> names;
    for (const auto& [name, elems] : m.sorts) {
        if (!names.insert(name).second) rep.fail("duplicate sort name: " + name);
        if (!std::is_sorted(elems.begin(), elems.end()) ||
            std::adjacent_find(elems.begin(), elems.end()) != elems.end())
            rep.fail("carrier of sort " + name + " is not sorted-unique");
    }
    for (const auto& f : m.functions) {
        const auto* dom = m.carrier(f.dom_sort);
        const auto* cod = m.carrier(f.cod_sort);
        if (!dom || !cod) {
            rep.fail("function " + f.name + " references an unknown sort");
            continue;
        }
        for (int e : *dom) {
            auto it = f.values.find(e);
            if (it == f.values.end()) {
                rep.fail("function " + f.name + " undefined on element " + std::to_string(e));
            } else if (!contains(*cod, it->second)) {
                rep.fail("function " + f.name + " maps " + std::to_string(e) + " outside its codomain sort");
            }
        }
        if (f.values.size() != dom->size()) rep.fail("function " + f.name + " defined outside its domain sort");
    }
    for (const auto& r : m.relations) {
        for (const auto& t : r.tuples) {
            if (t.size() != r.profile.size()) {
                rep.fail("relation " + r.name + " has a tuple of wrong arity");
                continue;
            }
            for (std::size_t i = 0; i < t.size(); ++i) {
                const auto* c = m.carrier(r.profile[i]);
                if (!c || !contains(*c, t[i])) {
                    rep.fail("relation " + r.name + " has a tuple outside its sort profile");
                    break;
                }
            }
        }
    }
    return rep;
}

int Symmetry::apply(const std::string& sort, int a) const {
    auto it = perms.find(sort);
    if (it == perms.end()) throw PreconditionError("Symmetry: unknown sort " + sort);
    auto jt = it->second.find(a);
    if (jt == it->second.end()) throw PreconditionError("Symmetry: element outside sort carrier");
    return jt->second;
}

namespace {

struct SymSearcher {
    const MultiSortedInstance& m;
    Budget& budget;
    // flattened (sort index, element) list in declaration order
    std::vector<std::pair<std::size_t, int>> order;
    std::map<std::string, std::map<int, int>> assign;
    std::map<std::string, std::set<int>> used;
    std::vector<Symmetry> found;
    bool exhaustive = true;

    std::optional<int> image(const std::string& sort, int e) const {
        auto it = assign.find(sort);
        if (it == assign.end()) return std::nullopt;
        auto jt = it->second.find(e);
        if (jt == it->second.end()) return std::nullopt;
        return jt->second;
    }

    // every constraint both of whose endpoints are assigned must commute
    bool consistent(const std::string& sort, int e) {
        for (const auto& f : m.functions) {
            if (f.dom_sort == sort) {
                auto it = f.values.find(e);
                if (it != f.values.end()) {
                    if (auto img_val = image(f.cod_sort, it->second)) {
                        int img_e = *image(sort, e);
                        auto vt = f.values.find(img_e);
                        if (vt == f.values.end() || vt->second != *img_val) return false;
                    }
                }
            }
            if (f.cod_sort == sort) {
                for (const auto& [src, val] : f.values) {
                    if (val != e) continue;
                    if (auto img_src = image(f.dom_sort, src)) {
                        auto vt = f.values.find(*img_src);
                        if (vt == f.values.end() || vt->second != *image(sort, e)) return false;
                    }
                }
            }
        }
        for (const auto& r : m.relations) {
            for (const auto& t : r.tuples) {
                bool touches = false;
                for (std::size_t i = 0; i < t.size(); ++i)
                    if (r.profile[i] == sort && t[i] == e) {
                        touches = true;
                        break;
                    }
                if (!touches) continue;
                std::vector<int> mapped(t.size());
                bool complete = true;
                for (std::size_t i = 0; i < t.size(); ++i) {
                    auto img = image(r.profile[i], t[i]);
                    if (!img) {
                        complete = false;
                        break;
                    }
                    mapped[i] = *img;
                }
                if (complete && !r.tuples.count(mapped)) return false;
            }
        }
        return true;
    }

    void run(std::size_t idx, const std::set<std::string>& rigid) {
        if (idx == order.size()) {
            Symmetry sym;
            sym.perms = assign;
            found.push_back(std::move(sym));
            return;
        }
        auto [sort_idx, e] = order[idx];
        const std::string& sort = m.sorts[sort_idx].first;
        const std::vector<int>& carrier = m.sorts[sort_idx].second;
        std::vector<int> candidates;
        if (rigid.count(sort))
            candidates = {e};
        else
            candidates = carrier;
        for (int tgt : candidates) {
            if (used[sort].count(tgt)) continue;
            if (!budget.spend()) {
                exhaustive = false;
                return;
            }
            assign[sort][e] = tgt;
            used[sort].insert(tgt);
            if (consistent(sort, e)) run(idx + 1, rigid);
            used[sort].erase(tgt);
            assign[sort].erase(e);
            if (!exhaustive) return;
        }
    }
};

}  // namespace

SymmetrySearchResult find_symmetries(const MultiSortedInstance& m, const std::set<std::string>& rigid_sorts,
                                     Budget& budget) {
    SymSearcher s{m, budget, {}, {}, {}, {}, true};
    for (std::size_t i = 0; i < m.sorts.size(); ++i)
        for (int e : m.sorts[i].second) s.order.emplace_back(i, e);
    for (const auto& [name, elems] : m.sorts) s.assign[name];  // ensure empty perms for empty sorts
    s.run(0, rigid_sorts);
    return SymmetrySearchResult{std::move(s.found), s.exhaustive};
}

bool is_symmetry(const MultiSortedInstance& m, const Symmetry& sym) {
    for (const auto& [name, elems] : m.sorts) {
        auto it = sym.perms.find(name);
        if (it == sym.perms.end()) return false;
        std::set<int> image;
        for (int e : elems) {
            auto jt = it->second.find(e);
            if (jt == it->second.end()) return false;
            if (!contains(elems, jt->second)) return false;
            if (!image.insert(jt->second).second) return false;
        }
        if (it->second.size() != elems.size()) return false;
    }
    for (const auto& f : m.functions) {
        for (const auto& [src, val] : f.values) {
            if (f.values.at(sym.apply(f.dom_sort, src)) != sym.apply(f.cod_sort, val)) return false;
        }
    }
    for (const auto& r : m.relations) {
        for (const auto& t : r.tuples) {
            std::vector<int> mapped(t.size());
            for (std::size_t i = 0; i < t.size(); ++i) mapped[i] = sym.apply(r.profile[i], t[i]);
            if (!r.tuples.count(mapped)) return false;
        }
    }
    return true;
}

}  // namespace amalgam
