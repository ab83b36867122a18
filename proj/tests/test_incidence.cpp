#include "doctest.h"

#include <algorithm>
#include <set>

#include "amalgam/incidence.hpp"

using namespace amalgam;

namespace {

IncidencePattern loop_pair() {
    return make_incidence({0}, {{"e", 0, 0, "ei"}, {"ei", 0, 0, "e"}});
}

IncidencePattern two_site_ring() {
    // the two-site incidence with a link pair in each direction
    return make_incidence({1, 2}, {{"e1", 1, 2, "e1i"},
                                   {"e1i", 2, 1, "e1"},
                                   {"e2", 2, 1, "e2i"},
                                   {"e2i", 1, 2, "e2"}});
}

}  // namespace

TEST_CASE("incidence validation") {
    CHECK(validate_incidence(loop_pair()).ok());
    CHECK(validate_incidence(two_site_ring()).ok());

    IncidencePattern broken = make_incidence({0, 1}, {{"e", 0, 1, "ei"}, {"ei", 0, 1, "e"}});
    CHECK_FALSE(validate_incidence(broken).ok());  // ei does not reverse e

    IncidencePattern dangling = make_incidence({0}, {{"e", 0, 0, "missing"}});
    CHECK_FALSE(validate_incidence(dangling).ok());

    IncidencePattern off_site = make_incidence({0}, {{"e", 0, 3, "ei"}, {"ei", 3, 0, "e"}});
    CHECK_FALSE(validate_incidence(off_site).ok());
}

TEST_CASE("self-inverse links validate with a warning") {
    IncidencePattern inc = make_incidence({0}, {{"p", 0, 0, "p"}});
    ValidationReport rep = validate_incidence(inc);
    CHECK(rep.ok());
    CHECK_FALSE(rep.warnings.empty());
}

TEST_CASE("atoms group reversal pairs once") {
    auto atoms = two_site_ring().atoms();
    REQUIRE(atoms.size() == 2);
    CHECK(atoms[0] == std::pair<std::string, std::string>{"e1", "e1i"});
    CHECK(atoms[1] == std::pair<std::string, std::string>{"e2", "e2i"});

    auto self_atoms = make_incidence({0}, {{"p", 0, 0, "p"}}).atoms();
    REQUIRE(self_atoms.size() == 1);
    CHECK(self_atoms[0].first == "p");
    CHECK(self_atoms[0].second == "p");
}

TEST_CASE("walk endpoints and concatenation") {
    IncidencePattern inc = two_site_ring();
    Walk e1 = link_walk(inc, "e1");
    CHECK(walk_iota(inc, e1) == std::pair<int, int>{1, 2});
    CHECK(walk_iota(inc, empty_walk(2)) == std::pair<int, int>{2, 2});

    // unit laws
    CHECK(concat_walks(inc, empty_walk(1), e1) == e1);
    CHECK(concat_walks(inc, e1, empty_walk(2)) == e1);

    // concatenation is formal: e1 then e1 inverse stays length 2
    Walk back = concat_walks(inc, e1, link_walk(inc, "e1i"));
    CHECK(back.links.size() == 2);
    CHECK(walk_iota(inc, back) == std::pair<int, int>{1, 1});
    CHECK_FALSE(is_reduced_walk(inc, back));
    CHECK(reduce_walk(inc, back) == empty_walk(1));

    // endpoint mismatch is a precondition failure
    CHECK_THROWS_AS(concat_walks(inc, e1, e1), PreconditionError);
    Walk garbled{1, {"e1", "e1"}};
    CHECK_FALSE(walk_ok(inc, garbled));
    CHECK_THROWS_AS(walk_iota(inc, garbled), PreconditionError);
}

TEST_CASE("inverse_walk reverses order and flips links") {
    IncidencePattern inc = two_site_ring();
    Walk w = concat_walks(inc, link_walk(inc, "e1"), link_walk(inc, "e2"));
    Walk wi = inverse_walk(inc, w);
    CHECK(wi.links == std::vector<std::string>{"e2i", "e1i"});
    CHECK(walk_iota(inc, wi) == std::pair<int, int>{1, 1});
    CHECK(inverse_walk(inc, wi) == w);
    CHECK(inverse_walk(inc, empty_walk(2)) == empty_walk(2));
}

TEST_CASE("reduce_walk cancels adjacent inverse factors to a fixed point") {
    IncidencePattern inc = loop_pair();
    Walk noisy{0, {"e", "e", "ei", "ei", "e"}};
    REQUIRE(walk_ok(inc, noisy));
    Walk red = reduce_walk(inc, noisy);
    CHECK(red.links == std::vector<std::string>{"e"});
    CHECK(is_reduced_walk(inc, red));
    // reduction preserves endpoints
    CHECK(walk_iota(inc, red) == walk_iota(inc, noisy));

    // self-inverse links cancel against themselves
    IncidencePattern invol = make_incidence({0}, {{"p", 0, 0, "p"}});
    Walk pp{0, {"p", "p"}};
    CHECK(reduce_walk(invol, pp) == empty_walk(0));
}

TEST_CASE("walks_up_to counts") {
    // empty walks only at length 0
    auto empties = walks_up_to(two_site_ring(), 0);
    REQUIRE(empties.size() == 2);
    CHECK(empties[0] == empty_walk(1));
    CHECK(empties[1] == empty_walk(2));

    // loop pair: 1 empty + 2 of length 1 + 4 of length 2
    CHECK(walks_up_to(loop_pair(), 2).size() == 7);

    // two-site ring: 2 empties + 4 of length 1
    CHECK(walks_up_to(two_site_ring(), 1).size() == 6);
}

TEST_CASE("walks_up_to is monotone and composable throughout") {
    IncidencePattern inc = two_site_ring();
    auto shorter = walks_up_to(inc, 2);
    auto longer = walks_up_to(inc, 3);
    std::set<Walk> longer_set(longer.begin(), longer.end());
    for (const Walk& w : shorter) {
        CHECK(longer_set.count(w) == 1);
        CHECK(walk_ok(inc, w));
    }
    CHECK(longer.size() > shorter.size());
    // ordered by length first
    for (std::size_t i = 1; i < longer.size(); ++i)
        CHECK(longer[i - 1].links.size() <= longer[i].links.size());
}

TEST_CASE("walk_to_string names anchor or link sequence") {
    IncidencePattern inc = two_site_ring();
    CHECK(walk_to_string(empty_walk(1)) != walk_to_string(empty_walk(2)));
    Walk w = concat_walks(inc, link_walk(inc, "e1"), link_walk(inc, "e2"));
    std::string s = walk_to_string(w);
    CHECK(s.find("e1") != std::string::npos);
    CHECK(s.find("e2") != std::string::npos);
}

TEST_CASE("append_link extends in place") {
    IncidencePattern inc = two_site_ring();
    Walk w = append_link(inc, empty_walk(1), "e1");
    CHECK(w == link_walk(inc, "e1"));
    CHECK_THROWS_AS(append_link(inc, w, "e1"), PreconditionError);
}
