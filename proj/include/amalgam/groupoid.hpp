#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "amalgam/core.hpp"
#include "amalgam/incidence.hpp"
#include "amalgam/pattern.hpp"

namespace amalgam {

// finite sorted algebra with partial composition on matching interfaces,
// units per site, inverses, generated by the links of its incidence pattern
struct Groupoid {
    IncidencePattern incidence;
    std::vector<int> elements;                 // sorted, unique ids
    std::map<int, std::pair<int, int>> sorts;  // id -> (source site, target site)
    std::map<int, int> units;                  // site -> unit element
    std::map<std::pair<int, int>, int> table;  // (g, h) -> g h, exactly on matching sorts
    std::map<std::string, int> generators;     // link id -> element

    std::pair<int, int> sort_of(int g) const;
    int src_of(int g) const { return sort_of(g).first; }
    int tgt_of(int g) const { return sort_of(g).second; }
    int unit(int site) const;
    int gen(const std::string& link_id) const;
    // throws PreconditionError when the pair has mismatched sorts or no table entry
    int compose(int g, int h) const;
    // unique h with g h and h g both units; throws when absent
    int inverse(int g) const;
    std::vector<int> block(int s, int t) const;  // elements with sorts (s, t)
};

ValidationReport validate_groupoid(const Groupoid& g);

// generators pairwise distinct and never units
bool is_simple_groupoid(const Groupoid& g);

// product of the generators along the walk; empty walk evaluates to the anchor unit
int eval_walk(const Groupoid& g, const Walk& w);

// bijections of the full sites: every link map total and surjective
bool is_complete_pattern(const AmalgamationPattern& h);
// names a non-bijective link, or nullopt when complete
std::optional<std::string> completeness_defect(const AmalgamationPattern& h);

// one element per ordered pair of sites joined by a walk; composition collapses walk ends
Groupoid site_pair_groupoid(const IncidencePattern& inc);

// complete pattern of right multiplications: sites are the target-sorted element
// sets, link maps send g to g e^G; relation-free site templates
AmalgamationPattern cayley_pattern(const Groupoid& g);

// finer incidence pattern whose sites are the groupoid elements and whose links
// "e@g" join g to g e^G, with reversal "e^-1@(g e^G)"
IncidencePattern cayley_incidence(const Groupoid& g);

// groupoid of walk maps of a complete pattern, composed as maps;
// rejects non-complete input naming the offending link
Groupoid groupoid_from_action(const AmalgamationPattern& h);

// elements generated by walks over an inverse-closed link subset, units included
std::vector<int> subgroupoid(const Groupoid& g, const std::vector<std::string>& alpha);

// left coset {g h : h generated over alpha, sources matching}
std::vector<int> coset(const Groupoid& g, int elem, const std::vector<std::string>& alpha);

// cyclically indexed pointed cosets (g_i, g_i G[alpha_i])
struct CosetCycle {
    std::vector<int> g;
    std::vector<std::vector<std::string>> alpha;  // inverse-closed link subsets
    bool operator==(const CosetCycle&) const = default;
    bool operator<(const CosetCycle& o) const;
};

// checks both cycle conditions from first principles: consecutive membership,
// and emptiness of g_i G[a_i & a_i-1] meet g_i+1 G[a_i & a_i+1]
ValidationReport verify_coset_cycle(const Groupoid& g, const CosetCycle& c);

struct CycleSearchResult {
    std::vector<CosetCycle> cycles;  // rotation-canonical, deduplicated
    bool exhaustive = true;          // false when the budget ran out first
};

// searches lengths 2..N; length 2 decided exactly via the subgroupoid
// intersection criterion, longer lengths by bounded enumeration
CycleSearchResult find_coset_cycles(const Groupoid& g, int n_max, Budget& budget, int max_results = 8);

struct AcyclicityVerdict {
    bool value = false;
    bool exhaustive = true;
    std::optional<CosetCycle> witness;
};

AcyclicityVerdict is_n_acyclic(const Groupoid& g, int n_max, Budget& budget);

struct CompatibilityVerdict {
    bool value = false;
    std::optional<Walk> witness;  // loop walk with unit value whose map moves a point
    bool complete = true;
};

// fixpoint of (walk value, walk map) pairs under generator extension;
// compatible when every unit-valued pair restricts the identity
CompatibilityVerdict is_compatible(const Groupoid& g, const AmalgamationPattern& h,
                                   std::uint64_t cap = default_closure_cap());

// recombines a groupoid over the finer incidence pattern of cayley_incidence(g)
// into one over the original pattern, via the action of the coarse total maps
Groupoid tilde_groupoid(const Groupoid& g, const Groupoid& ghat);

// reduced walks of bounded length with composition marked out-of-range past the bound
struct FreeTruncation {
    IncidencePattern incidence;
    int radius = 0;
    std::vector<Walk> words;  // reduced, ordered by length then lexicographically

    int index_of(const Walk& w) const;  // -1 when absent
    int unit_index(int site) const;
    int inverse_index(int i) const;
    std::pair<int, int> sort_of_index(int i) const;
    // nullopt = reduced product longer than the radius; sort mismatch throws
    std::optional<int> compose(int i, int j) const;
};

FreeTruncation free_truncation(const IncidencePattern& inc, int radius);

// bounded analogue of the cycle search over in-range truncation products;
// true when no coset cycle of length 2..n_max is found
bool truncation_cycle_free(const FreeTruncation& f, int n_max);

// abelian coordinate groupoid: one mod-k counter per reversal atom, elements are
// reachable (site, counter sum, site) triples; nullopt when larger than max_size
std::optional<Groupoid> coordinate_groupoid(const IncidencePattern& inc, int k, std::size_t max_size);
// least valid modulus and the ladder of candidates for an incidence pattern
std::vector<int> coordinate_moduli(const IncidencePattern& inc);

struct GroupoidSearchResult {
    std::optional<Groupoid> groupoid;
    bool exhausted = false;  // budget ran out before the ladder did
};

// bounded deterministic ladder over coordinate groupoids, each candidate verdict
// checked (simplicity, compatibility with h, N-acyclicity) before being returned
GroupoidSearchResult search_groupoid(const IncidencePattern& inc, const AmalgamationPattern& h, int n_acyclic,
                                     std::size_t max_size, Budget& budget);

// site and link permutation preserving endpoints and reversal
struct IncidenceSymmetry {
    std::map<int, int> site_map;
    std::map<std::string, std::string> link_map;
    bool operator==(const IncidenceSymmetry&) const = default;
    bool operator<(const IncidenceSymmetry& o) const;
};

std::vector<IncidenceSymmetry> incidence_symmetries(const IncidencePattern& inc);

struct SymmetryExtensionVerdict {
    bool value = false;
    bool exhaustive = true;
    std::string detail;  // names the first symmetry that fails to extend
};

// extension is forced on generators, so each candidate is checked exactly:
// map every element through one generating walk and test the groupoid laws
std::optional<std::map<int, int>> extend_incidence_symmetry(const Groupoid& g, const IncidenceSymmetry& sym);

// every symmetry of h induces an incidence symmetry; true iff all of them extend to g
SymmetryExtensionVerdict is_fully_symmetric_over(const Groupoid& g, const AmalgamationPattern& h, Budget& budget);
// same for the full incidence symmetry group, regardless of any pattern
SymmetryExtensionVerdict is_fully_symmetric_over_incidence(const Groupoid& g);

}  // namespace amalgam
