#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "amalgam/core.hpp"
#include "amalgam/incidence.hpp"

namespace amalgam {

// incidence pattern whose sites carry structures and whose links carry partial isomorphisms
struct AmalgamationPattern {
    IncidencePattern incidence;
    Signature sig;
    std::map<int, RelStructure> sites;        // site id -> template structure, universes pairwise disjoint
    std::map<std::string, PartialMap> links;  // link id -> partial isomorphism src-site -> tgt-site

    const RelStructure& site(int s) const;
    const PartialMap& rho(const std::string& link_id) const;
    // disjoint union of the site structures
    RelStructure carrier() const;
    // site of an element, or nullopt
    std::optional<int> site_of(int element) const;
};

ValidationReport validate_pattern(const AmalgamationPattern& h);

// composite map along a walk, applying the first link first
PartialMap rho_of_walk(const AmalgamationPattern& h, const Walk& w);

struct ClosureEntry {
    int src = 0;
    int tgt = 0;
    PartialMap map;
    Walk witness;  // shortest, lexicographically least
    bool operator==(const ClosureEntry&) const = default;
};

// all walk-composite maps, keyed by (src site, tgt site, map)
struct WalkMapClosure {
    std::vector<ClosureEntry> entries;  // sorted by (src, tgt, map)
    bool complete = true;               // false when the entry cap was hit
    const ClosureEntry* find(int src, int tgt, const PartialMap& m) const;
    std::vector<const ClosureEntry*> at(int src, int tgt) const;
};

WalkMapClosure closure(const AmalgamationPattern& h, std::uint64_t cap = default_closure_cap());

struct CoherenceVerdict {
    bool value = false;
    // loop walk whose map moves a point (coherence), or offending link + walk (simplicity)
    std::optional<Walk> witness_walk;
    std::optional<std::string> witness_link;
    // pair of walks with the same interface whose maps have no common walk extension
    std::optional<std::pair<Walk, Walk>> witness_pair;
    bool complete = true;
};

CoherenceVerdict is_coherent(const AmalgamationPattern& h, std::uint64_t cap = default_closure_cap());
CoherenceVerdict is_simple(const AmalgamationPattern& h, std::uint64_t cap = default_closure_cap());
CoherenceVerdict is_strongly_coherent(const AmalgamationPattern& h, std::uint64_t cap = default_closure_cap());

// partition of the carrier into closure classes of a ~ rho_e(a)
struct ApproxPartition {
    std::vector<std::vector<int>> classes;  // each sorted; classes sorted by least element
    int class_of(int element) const;        // index, or -1
};

ApproxPartition approx(const AmalgamationPattern& h);

struct GlobalConsistencyVerdict {
    bool value = false;
    std::string reason;                     // human-readable witness description
    std::optional<std::vector<int>> witness_class;
};

GlobalConsistencyVerdict is_globally_consistent(const AmalgamationPattern& h);

// coordinate domain of a realisation: an induced substructure isomorphic to a site template via the chart
struct Chart {
    std::vector<int> domain;  // sorted subset of the realisation universe
    int site = 0;
    PartialMap map;           // total injection domain -> site template universe
    bool operator==(const Chart&) const = default;
};

struct Realisation {
    RelStructure structure;
    std::vector<Chart> charts;
    std::vector<const Chart*> charts_at(int site) const;
    // deduplicated coordinate domains (atlas hyperedges)
    std::vector<std::vector<int>> domains() const;
};

// quotient of the carrier by approx, with one chart per site; defined only when globally consistent
struct Quotient {
    Realisation realisation;
    ApproxPartition partition;
    std::map<int, int> class_id;  // carrier element -> quotient element id
};

Quotient quotient(const AmalgamationPattern& h);

// pattern presentation of a structure with a set cover: one site per cover member,
// links identify shared elements between overlapping members
struct ExplodedView {
    AmalgamationPattern pattern;
    std::vector<std::vector<int>> cover;            // sorted members
    std::map<std::pair<int, int>, int> id_of;       // (member index, base element) -> pattern element
    std::map<int, std::pair<int, int>> origin_of;   // inverse of id_of
};

ExplodedView exploded_view(const RelStructure& a, const std::vector<std::vector<int>>& cover);

// faithful multi-sorted encoding: sorts S, E, H; functions iota1, iota2, inv, delta;
// ternary relation link_graph(e, a, rho_e(a))
MultiSortedInstance pattern_to_multisorted(const AmalgamationPattern& h);
AmalgamationPattern multisorted_to_pattern(const MultiSortedInstance& m);

// pattern symmetries (site/link/element components); I-rigid ones fix sorts S and E
SymmetrySearchResult pattern_symmetries(const AmalgamationPattern& h, bool i_rigid, Budget& budget);

}  // namespace amalgam
