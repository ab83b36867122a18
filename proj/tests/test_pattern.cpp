#include "doctest.h"

#include <set>

#include "amalgam/fuzz.hpp"
#include "amalgam/io.hpp"
#include "amalgam/pattern.hpp"

using namespace amalgam;

namespace {

AmalgamationPattern load_pattern(const std::string& name) {
    return pattern_from_json(read_file(std::string(AMALGAM_FIXTURE_DIR) + "/" + name));
}

// one edgeless site {0,1}, loop link pair whose map swaps the two points
AmalgamationPattern swap_loop() {
    AmalgamationPattern h;
    h.incidence = make_incidence({0}, {{"e", 0, 0, "ei"}, {"ei", 0, 0, "e"}});
    h.sig = make_signature({{"R", 2}});
    RelStructure s;
    s.sig = h.sig;
    s.universe = {0, 1};
    h.sites[0] = s;
    h.links["e"] = PartialMap({{0, 1}, {1, 0}});
    h.links["ei"] = h.links["e"].inverse();
    return h;
}

// two edgeless sites with two parallel link pairs whose maps disagree
AmalgamationPattern parallel_links() {
    AmalgamationPattern h;
    h.incidence = make_incidence({1, 2}, {{"e", 1, 2, "ei"},
                                          {"ei", 2, 1, "e"},
                                          {"f", 1, 2, "fi"},
                                          {"fi", 2, 1, "f"}});
    h.sig = make_signature({{"R", 2}});
    RelStructure s1, s2;
    s1.sig = s2.sig = h.sig;
    s1.universe = {0, 1};
    s2.universe = {2, 3};
    h.sites[1] = s1;
    h.sites[2] = s2;
    h.links["e"] = PartialMap({{0, 3}, {1, 2}});
    h.links["ei"] = h.links["e"].inverse();
    h.links["f"] = PartialMap({{0, 2}, {1, 3}});
    h.links["fi"] = h.links["f"].inverse();
    return h;
}

RelStructure path_structure() {
    RelStructure a;
    a.sig = make_signature({{"R", 2}});
    a.universe = {0, 1, 2};
    a.relations["R"] = {{0, 1}, {1, 2}};
    return a;
}

}  // namespace

TEST_CASE("twisted ring fixture separates the coherence notions") {
    AmalgamationPattern h = load_pattern("moebius.json");
    CHECK(validate_pattern(h).ok());

    CoherenceVerdict co = is_coherent(h);
    CHECK(co.complete);
    CHECK(co.value);

    CoherenceVerdict si = is_simple(h);
    CHECK(si.complete);
    CHECK_FALSE(si.value);
    // the simplicity witness is a link and a parallel walk the link map fails to extend
    REQUIRE(si.witness_link.has_value());
    REQUIRE(si.witness_walk.has_value());
    const PartialMap& rho_link = h.rho(*si.witness_link);
    PartialMap rho_walk = rho_of_walk(h, *si.witness_walk);
    const LinkDecl& decl = h.incidence.link_or_throw(*si.witness_link);
    CHECK(walk_iota(h.incidence, *si.witness_walk) == std::pair<int, int>{decl.src, decl.tgt});
    CHECK_FALSE(rho_link.extends(rho_walk));

    CoherenceVerdict st = is_strongly_coherent(h);
    CHECK(st.complete);
    CHECK_FALSE(st.value);
    REQUIRE(st.witness_pair.has_value());
    auto [w1, w2] = *st.witness_pair;
    CHECK(walk_iota(h.incidence, w1) == walk_iota(h.incidence, w2));

    CHECK_FALSE(is_globally_consistent(h).value);
}

TEST_CASE("twisted ring walk maps") {
    AmalgamationPattern h = load_pattern("moebius.json");
    IncidencePattern inc = h.incidence;

    // the two forward maps have disjoint interfaces, so the round trip is empty
    Walk around = concat_walks(inc, link_walk(inc, "e1"), link_walk(inc, "e2"));
    CHECK(rho_of_walk(h, around).empty());

    Walk there_back = concat_walks(inc, link_walk(inc, "e1"), link_walk(inc, "e1i"));
    CHECK(rho_of_walk(h, there_back) == PartialMap({{0, 0}}));

    // empty walk acts as the site identity
    CHECK(rho_of_walk(h, empty_walk(1)) == identity_map({0, 1}));
}

TEST_CASE("twisted ring approx classes") {
    AmalgamationPattern h = load_pattern("moebius.json");
    ApproxPartition p = approx(h);
    REQUIRE(p.classes.size() == 2);
    CHECK(p.classes[0] == std::vector<int>{0, 3});
    CHECK(p.classes[1] == std::vector<int>{1, 2});
    CHECK(p.class_of(0) == 0);
    CHECK(p.class_of(3) == 0);
    CHECK(p.class_of(1) == 1);
    CHECK(p.class_of(2) == 1);
    CHECK(p.class_of(99) == -1);
}

TEST_CASE("untwisted ring is globally consistent with a two-element quotient") {
    AmalgamationPattern h = load_pattern("moebius_straight.json");
    CHECK(validate_pattern(h).ok());
    CHECK(is_coherent(h).value);
    CHECK_FALSE(is_strongly_coherent(h).value);
    GlobalConsistencyVerdict gc = is_globally_consistent(h);
    CHECK(gc.value);

    Quotient q = quotient(h);
    CHECK(q.realisation.structure.universe.size() == 2);
    CHECK(q.realisation.structure.relations.at("R").size() == 1);
    REQUIRE(q.realisation.charts.size() == 2);
    // each chart is an isomorphism onto its site template
    for (const Chart& c : q.realisation.charts) {
        RelStructure dom = induced_substructure(q.realisation.structure, c.domain);
        CHECK(is_isomorphism_onto(dom, h.site(c.site), c.map));
    }
    // class ids cover the carrier and match the partition
    for (int e : h.carrier().universe) CHECK(q.class_id.at(e) >= 0);
}

TEST_CASE("quotient refuses inconsistent patterns") {
    AmalgamationPattern h = load_pattern("moebius.json");
    CHECK_THROWS_AS(quotient(h), PreconditionError);
}

TEST_CASE("closure on the twisted ring") {
    AmalgamationPattern h = load_pattern("moebius.json");
    WalkMapClosure cl = closure(h);
    CHECK(cl.complete);

    // same-site entries: identity, the two point stabilisers, and the empty map
    auto entries_11 = cl.at(1, 1);
    CHECK(entries_11.size() == 4);
    CHECK(cl.find(1, 1, identity_map({0, 1})) != nullptr);
    CHECK(cl.find(1, 1, PartialMap({{0, 0}})) != nullptr);
    CHECK(cl.find(1, 1, PartialMap({{1, 1}})) != nullptr);
    CHECK(cl.find(1, 1, PartialMap()) != nullptr);
    CHECK(cl.find(1, 1, PartialMap({{0, 1}})) == nullptr);

    // cross-site entries: the two link maps and the empty map
    CHECK(cl.at(1, 2).size() == 3);
    CHECK(cl.find(1, 2, PartialMap({{0, 3}})) != nullptr);
    CHECK(cl.find(1, 2, PartialMap({{1, 2}})) != nullptr);

    // every witness recomputes to its own entry
    for (const ClosureEntry& e : cl.entries) {
        CHECK(rho_of_walk(h, e.witness) == e.map);
        CHECK(walk_iota(h.incidence, e.witness) == std::pair<int, int>{e.src, e.tgt});
    }

    // shortest-witness normalisation: the identity entries carry empty walks
    const ClosureEntry* id11 = cl.find(1, 1, identity_map({0, 1}));
    REQUIRE(id11 != nullptr);
    CHECK(id11->witness.empty());
}

TEST_CASE("closure matches the walk enumeration oracle") {
    for (const char* name : {"moebius.json", "moebius_straight.json"}) {
        AmalgamationPattern h = load_pattern(name);
        WalkMapClosure cl = closure(h);
        EnumeratedClosure en = closure_by_enumeration(h, 8);
        REQUIRE(cl.complete);
        REQUIRE(en.stabilized);
        REQUIRE(cl.entries.size() == en.entries.size());
        for (std::size_t i = 0; i < cl.entries.size(); ++i) CHECK(cl.entries[i] == en.entries[i]);
    }
}

TEST_CASE("closure honours the entry cap") {
    AmalgamationPattern h = load_pattern("moebius.json");
    WalkMapClosure cl = closure(h, 2);
    CHECK_FALSE(cl.complete);
}

TEST_CASE("loop swap pattern is incoherent with a recomputable witness") {
    AmalgamationPattern h = swap_loop();
    CHECK(validate_pattern(h).ok());
    CoherenceVerdict co = is_coherent(h);
    REQUIRE(co.complete);
    CHECK_FALSE(co.value);
    REQUIRE(co.witness_walk.has_value());
    auto [s, t] = walk_iota(h.incidence, *co.witness_walk);
    CHECK(s == t);
    CHECK_FALSE(rho_of_walk(h, *co.witness_walk).is_identity_restriction());
}

TEST_CASE("disagreeing parallel links break coherence") {
    AmalgamationPattern h = parallel_links();
    CHECK(validate_pattern(h).ok());
    CoherenceVerdict co = is_coherent(h);
    CHECK_FALSE(co.value);
    REQUIRE(co.witness_walk.has_value());
    CHECK_FALSE(rho_of_walk(h, *co.witness_walk).is_identity_restriction());
    CHECK_FALSE(is_globally_consistent(h).value);
}

TEST_CASE("pattern validation rejects broken link maps") {
    AmalgamationPattern h = load_pattern("moebius.json");
    REQUIRE(validate_pattern(h).ok());

    AmalgamationPattern bad = h;
    bad.links["e1"] = PartialMap({{0, 9}});  // image outside the target site
    CHECK_FALSE(validate_pattern(bad).ok());

    AmalgamationPattern mism = h;
    mism.links["e1i"] = PartialMap();  // no longer the inverse of e1
    CHECK_FALSE(validate_pattern(mism).ok());

    AmalgamationPattern breaks = h;
    // (0,0) sits inside dom(e1) but its image (3,3) is not a tuple of site 2
    breaks.sites[1].relations["R"] = {{0, 0}};
    CHECK_FALSE(validate_pattern(breaks).ok());
}

TEST_CASE("exploded view of a covered path") {
    RelStructure a = path_structure();
    ExplodedView ev = exploded_view(a, {{0, 1}, {1, 2}});
    const AmalgamationPattern& h = ev.pattern;
    CHECK(validate_pattern(h).ok());
    CHECK(h.sites.size() == 2);
    CHECK(h.incidence.atoms().size() == 1);

    CHECK(is_coherent(h).value);
    CHECK(is_strongly_coherent(h).value);
    CHECK(is_globally_consistent(h).value);

    // gluing the two members back together recovers the path
    Quotient q = quotient(h);
    CHECK(q.realisation.structure.universe.size() == 3);
    std::set<std::pair<int, int>> iso_pairs;
    for (const auto& [key, id] : ev.id_of) iso_pairs.insert({q.class_id.at(id), key.second});
    PartialMap iso(std::vector<std::pair<int, int>>(iso_pairs.begin(), iso_pairs.end()));
    CHECK(is_isomorphism_onto(q.realisation.structure, a, iso));
}

TEST_CASE("exploded view rejects uncovered inputs") {
    RelStructure a = path_structure();
    CHECK_THROWS_AS(exploded_view(a, {{0, 1}}), PreconditionError);          // element 2 uncovered
    CHECK_THROWS_AS(exploded_view(a, {{0, 1}, {2}}), PreconditionError);     // tuple (1,2) split
    CHECK_THROWS_AS(exploded_view(a, {{0, 1}, {1, 9}}), PreconditionError);  // 9 outside the universe
}

TEST_CASE("multi-sorted encoding round trips") {
    for (const char* name : {"moebius.json", "moebius_straight.json"}) {
        AmalgamationPattern h = load_pattern(name);
        MultiSortedInstance m = pattern_to_multisorted(h);
        CHECK(validate_multisorted(m).ok());
        AmalgamationPattern back = multisorted_to_pattern(m);
        CHECK(back.incidence == h.incidence);
        CHECK(back.sig == h.sig);
        CHECK(back.sites == h.sites);
        CHECK(back.links == h.links);
    }
}

TEST_CASE("twisted ring has a site-swapping symmetry but no rigid ones") {
    AmalgamationPattern h = load_pattern("moebius.json");
    Budget budget = default_budget();
    SymmetrySearchResult full = pattern_symmetries(h, false, budget);
    REQUIRE(full.exhaustive);
    bool swaps_sites = false;
    for (const Symmetry& s : full.symmetries)
        if (s.perms.at("S").at(1) == 2) swaps_sites = true;
    CHECK(swaps_sites);
    CHECK(full.symmetries.size() >= 2);

    SymmetrySearchResult rigid = pattern_symmetries(h, true, budget);
    REQUIRE(rigid.exhaustive);
    CHECK(rigid.symmetries.size() == 1);  // identity only
}
