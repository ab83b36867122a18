#include "doctest.h"

#include <algorithm>
#include <numeric>
#include <random>

#include "amalgam/core.hpp"

using namespace amalgam;

namespace {

RelStructure edge_structure(std::vector<int> universe, std::set<std::vector<int>> edges,
                            const std::string& rel = "R") {
    RelStructure a;
    a.sig = make_signature({{rel, 2}});
    a.universe = std::move(universe);
    a.relations[rel] = std::move(edges);
    return a;
}

PartialMap random_partial(std::mt19937& rng, int n) {
    std::vector<int> src(n), tgt(n);
    std::iota(src.begin(), src.end(), 0);
    std::iota(tgt.begin(), tgt.end(), 0);
    std::shuffle(src.begin(), src.end(), rng);
    std::shuffle(tgt.begin(), tgt.end(), rng);
    std::uniform_int_distribution<int> size(0, n);
    int k = size(rng);
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < k; ++i) pairs.push_back({src[i], tgt[i]});
    return PartialMap(pairs);
}

// brute-force hom enumeration over all |a|^|x| total maps
std::vector<std::map<int, int>> all_homomorphisms(const RelStructure& x, const RelStructure& a) {
    const std::vector<int>& xu = x.universe;
    const std::vector<int>& au = a.universe;
    std::vector<std::map<int, int>> out;
    std::vector<std::size_t> pick(xu.size(), 0);
    while (true) {
        std::map<int, int> f;
        for (std::size_t i = 0; i < xu.size(); ++i) f[xu[i]] = au[pick[i]];
        bool ok = true;
        for (const auto& [rel, tuples] : x.relations)
            for (const auto& t : tuples) {
                std::vector<int> img;
                for (int e : t) img.push_back(f.at(e));
                if (!a.relations.count(rel) || !a.relations.at(rel).count(img)) ok = false;
            }
        if (ok) out.push_back(f);
        std::size_t i = 0;
        while (i < pick.size() && ++pick[i] == au.size()) pick[i++] = 0;
        if (i == pick.size()) break;
    }
    return out;
}

}  // namespace

TEST_CASE("partial map invariants") {
    CHECK(PartialMap({{0, 1}, {2, 3}}).size() == 2);
    CHECK_FALSE(PartialMap::try_make({{0, 1}, {0, 2}}).has_value());  // not functional
    CHECK_FALSE(PartialMap::try_make({{0, 1}, {2, 1}}).has_value());  // not injective
    CHECK(PartialMap().empty());
    CHECK(identity_map({4, 7}).is_identity_restriction());
    CHECK(PartialMap({{0, 1}}).apply(0) == 1);
    CHECK_FALSE(PartialMap({{0, 1}}).apply(5).has_value());
    CHECK(PartialMap({{3, 0}, {1, 2}}).restrict_domain({1}) == PartialMap({{1, 2}}));
}

TEST_CASE("compose_partial basics") {
    PartialMap idxy({{0, 0}, {1, 1}});
    CHECK(compose_partial(idxy, idxy) == idxy);

    // disjoint interface composes to the empty map
    CHECK(compose_partial(PartialMap({{0, 1}}), PartialMap({{2, 3}})).empty());

    // a singleton followed by its inverse fixes the source point
    PartialMap rho({{0, 3}});
    CHECK(compose_partial(rho, rho.inverse()) == PartialMap({{0, 0}}));
}

TEST_CASE("compose_partial domain formula") {
    PartialMap f({{0, 5}, {1, 6}, {2, 7}});
    PartialMap g({{6, 0}, {7, 1}, {8, 2}});
    PartialMap fg = compose_partial(f, g);
    CHECK(fg == PartialMap({{1, 0}, {2, 1}}));
    // dom(fg) = f^-1(im f intersect dom g)
    CHECK(fg.domain() == std::vector<int>{1, 2});
}

TEST_CASE("compose_partial associativity and inverse law on random pools") {
    std::mt19937 rng(11);
    std::vector<PartialMap> pool;
    for (int i = 0; i < 24; ++i) pool.push_back(random_partial(rng, 6));
    for (const PartialMap& a : pool)
        for (const PartialMap& b : pool)
            for (const PartialMap& c : pool)
                CHECK(compose_partial(compose_partial(a, b), c) == compose_partial(a, compose_partial(b, c)));
    for (const PartialMap& a : pool) {
        PartialMap round = compose_partial(a, a.inverse());
        CHECK(round.is_identity_restriction());
        CHECK(round.domain() == a.domain());
    }
}

TEST_CASE("partial map extension order") {
    PartialMap big({{0, 1}, {2, 3}});
    PartialMap small({{0, 1}});
    CHECK(big.extends(small));
    CHECK_FALSE(small.extends(big));
    CHECK(big.extends(PartialMap()));
    CHECK_FALSE(big.extends(PartialMap({{0, 2}})));
}

TEST_CASE("union_partial") {
    auto u = union_partial(PartialMap({{0, 1}}), PartialMap({{2, 3}}));
    REQUIRE(u.has_value());
    CHECK(*u == PartialMap({{0, 1}, {2, 3}}));
    CHECK_FALSE(union_partial(PartialMap({{0, 1}}), PartialMap({{0, 2}})).has_value());
    CHECK_FALSE(union_partial(PartialMap({{0, 1}}), PartialMap({{2, 1}})).has_value());
}

TEST_CASE("is_partial_isomorphism") {
    RelStructure a = edge_structure({0, 1}, {{0, 1}});
    RelStructure b = edge_structure({2, 3}, {{2, 3}});
    CHECK(is_partial_isomorphism(a, b, PartialMap({{0, 2}, {1, 3}})));
    CHECK_FALSE(is_partial_isomorphism(a, b, PartialMap({{0, 3}, {1, 2}})));  // reverses the edge
    CHECK(is_partial_isomorphism(a, b, PartialMap()));
    CHECK(is_partial_isomorphism(a, b, PartialMap({{0, 2}})));
    // out-of-universe endpoints are a precondition failure, not a false verdict
    CHECK_THROWS_AS(is_partial_isomorphism(a, b, PartialMap({{9, 2}})), PreconditionError);
}

TEST_CASE("is_isomorphism_onto") {
    RelStructure a = edge_structure({0, 1}, {{0, 1}});
    RelStructure b = edge_structure({2, 3}, {{2, 3}});
    CHECK(is_isomorphism_onto(a, b, PartialMap({{0, 2}, {1, 3}})));
    CHECK_FALSE(is_isomorphism_onto(a, b, PartialMap({{0, 2}})));  // not total
    CHECK_FALSE(is_isomorphism_onto(a, b, PartialMap({{0, 3}, {1, 2}})));
}

TEST_CASE("structure validation and substructures") {
    RelStructure a = edge_structure({0, 1, 2}, {{0, 1}, {1, 2}});
    CHECK(validate_structure(a).ok());
    RelStructure bad = a;
    bad.relations["R"].insert({0, 9});
    CHECK_FALSE(validate_structure(bad).ok());

    RelStructure sub = induced_substructure(a, {0, 1});
    CHECK(sub.universe == std::vector<int>{0, 1});
    CHECK(sub.relations.at("R") == std::set<std::vector<int>>{{0, 1}});
}

TEST_CASE("find_homomorphisms small cases") {
    Budget budget = default_budget();
    RelStructure point;
    point.sig = make_signature({{"R", 2}});
    point.universe = {0};
    RelStructure target = edge_structure({0, 1, 2}, {{0, 1}});
    HomSearchResult r = find_homomorphisms(point, target, budget);
    CHECK(r.exhaustive);
    CHECK(r.homs.size() == target.universe.size());

    RelStructure cycle = edge_structure({0, 1, 2}, {{0, 1}, {1, 2}, {2, 0}});
    HomSearchResult rc = find_homomorphisms(cycle, cycle, budget);
    CHECK(rc.exhaustive);
    CHECK(rc.homs.size() == 3);  // the three rotations

    RelStructure edge = edge_structure({0, 1}, {{0, 1}});
    RelStructure edgeless = edge_structure({0, 1}, {});
    CHECK(find_homomorphisms(edge, edgeless, budget).homs.empty());
}

TEST_CASE("find_homomorphisms agrees with brute enumeration") {
    std::mt19937 rng(5);
    Budget budget = default_budget();
    std::uniform_int_distribution<int> nsize(1, 4);
    std::uniform_int_distribution<int> coin(0, 3);
    for (int round = 0; round < 30; ++round) {
        int nx = nsize(rng), na = nsize(rng);
        std::set<std::vector<int>> ex, ea;
        for (int i = 0; i < nx; ++i)
            for (int j = 0; j < nx; ++j)
                if (coin(rng) == 0) ex.insert({i, j});
        for (int i = 0; i < na; ++i)
            for (int j = 0; j < na; ++j)
                if (coin(rng) == 0) ea.insert({i, j});
        std::vector<int> ux(nx), ua(na);
        std::iota(ux.begin(), ux.end(), 0);
        std::iota(ua.begin(), ua.end(), 0);
        RelStructure x = edge_structure(ux, ex);
        RelStructure a = edge_structure(ua, ea);
        HomSearchResult r = find_homomorphisms(x, a, budget);
        REQUIRE(r.exhaustive);
        CHECK(r.homs.size() == all_homomorphisms(x, a).size());
    }
}

TEST_CASE("find_homomorphisms deterministic order and budget flag") {
    Budget budget = default_budget();
    RelStructure point;
    point.sig = make_signature({{"R", 2}});
    point.universe = {0};
    RelStructure target = edge_structure({1, 2, 3}, {});
    HomSearchResult r = find_homomorphisms(point, target, budget);
    REQUIRE(r.homs.size() == 3);
    CHECK(r.homs[0].at(0) < r.homs[1].at(0));
    CHECK(r.homs[1].at(0) < r.homs[2].at(0));

    Budget tiny;
    tiny.limit = 1;
    RelStructure big = edge_structure({0, 1, 2, 3, 4, 5}, {});
    HomSearchResult rt = find_homomorphisms(big, big, tiny);
    CHECK_FALSE(rt.exhaustive);
}

TEST_CASE("multi-sorted symmetries") {
    // two parallel carriers joined by a bijective function; the diagonal swap is the
    // only non-trivial symmetry
    MultiSortedInstance m;
    m.sorts = {{"V", {0, 1}}, {"W", {10, 11}}};
    m.functions.push_back({"f", "V", "W", {{0, 10}, {1, 11}}});
    CHECK(validate_multisorted(m).ok());
    Budget budget = default_budget();
    SymmetrySearchResult r = find_symmetries(m, {}, budget);
    REQUIRE(r.exhaustive);
    CHECK(r.symmetries.size() == 2);
    bool has_identity = false;
    for (const Symmetry& s : r.symmetries) {
        CHECK(is_symmetry(m, s));
        bool id = true;
        for (const auto& [sort, perm] : s.perms)
            for (const auto& [x, y] : perm)
                if (x != y) id = false;
        if (id) has_identity = true;
    }
    CHECK(has_identity);

    // pinning V rules the swap out
    SymmetrySearchResult rigid = find_symmetries(m, {"V"}, budget);
    REQUIRE(rigid.exhaustive);
    CHECK(rigid.symmetries.size() == 1);
}

TEST_CASE("symmetries respect relations") {
    MultiSortedInstance m;
    m.sorts = {{"V", {0, 1, 2}}};
    m.relations.push_back({"E", {"V", "V"}, {{0, 1}}});
    Budget budget = default_budget();
    SymmetrySearchResult r = find_symmetries(m, {}, budget);
    REQUIRE(r.exhaustive);
    // 2 is the only movable point, and it has nowhere to go
    CHECK(r.symmetries.size() == 1);
    Symmetry bogus;
    bogus.perms["V"] = {{0, 1}, {1, 0}, {2, 2}};
    CHECK_FALSE(is_symmetry(m, bogus));
}

TEST_CASE("disjoint_union keeps tuples and rejects id clashes") {
    RelStructure a = edge_structure({0, 1}, {{0, 1}});
    RelStructure b = edge_structure({2, 3}, {{2, 3}});
    RelStructure u = disjoint_union(a.sig, {&a, &b});
    CHECK(u.universe.size() == 4);
    CHECK(u.relations.at("R").size() == 2);
    CHECK_THROWS_AS(disjoint_union(a.sig, {&a, &a}), Error);
}
