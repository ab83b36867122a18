#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "amalgam/core.hpp"
#include "amalgam/groupoid.hpp"
#include "amalgam/hypergraph.hpp"
#include "amalgam/incidence.hpp"
#include "amalgam/pattern.hpp"

namespace amalgam {

// pattern of pairs (a, g) over the refined incidence pattern of the groupoid's
// cayley graph; fresh carrier ids with pair provenance kept on the side
struct DirectProduct {
    AmalgamationPattern pattern;                   // over cayley_incidence(groupoid)
    std::map<std::pair<int, int>, int> id_of;      // (base element, groupoid element) -> product element
    std::map<int, std::pair<int, int>> origin_of;  // inverse of id_of
};

// sites A_g = A_{tgt(g)} x {g}, link e@g sends (a, g) to (rho_e(a), g e^G)
DirectProduct direct_product(const AmalgamationPattern& h, const Groupoid& g);

// sort-indexed projection of one amalgamation pattern onto another
struct PatternCovering {
    AmalgamationPattern upstairs;
    AmalgamationPattern downstairs;
    std::map<int, int> site_map;                  // upstairs site -> downstairs site
    std::map<std::string, std::string> link_map;  // upstairs link -> downstairs link
    std::map<int, int> element_map;               // upstairs carrier -> downstairs carrier
};

// first-factor projection (a, g) -> a of the direct product
PatternCovering projection_covering(const AmalgamationPattern& h, const Groupoid& g);

// surjectivity per sort, isomorphic site restrictions, commuting link squares, link lifting
ValidationReport verify_pattern_covering(const PatternCovering& c);

// quotient of the direct product by approx, charted back onto the base templates
struct ReducedProduct {
    Realisation realisation;
    Groupoid groupoid;
    DirectProduct product;
    ApproxPartition partition;            // classes over product carrier ids
    std::map<int, int> class_id;          // product element -> realisation element
    std::map<int, std::size_t> chart_of;  // groupoid element -> chart index; chart domain is u[g]
    const std::vector<int>& domain_of(int g) const;
};

ReducedProduct reduced_product(const AmalgamationPattern& h, const Groupoid& g);

// realisation conditions: (i) every link is realised as an exact chart overlap;
// (ii) every nonempty chart overlap is exactly matched by a walk map.
// condition_i_mask, when given, limits condition (i) to the marked charts
ValidationReport verify_realisation(const Realisation& r, const AmalgamationPattern& h,
                                    const std::vector<bool>* condition_i_mask = nullptr,
                                    std::uint64_t cap = default_closure_cap());

// quotient of a simple, strongly coherent upstairs pattern with charts composed
// through the covering projection; lands on the downstairs templates
Realisation realisation_from_covering(const PatternCovering& c);

// walk map matching each overlapping chart pair, with its closure witness walk
struct OverlapWitness {
    std::size_t chart_a = 0;
    std::size_t chart_b = 0;
    Walk walk;       // from the site of chart_a to the site of chart_b
    PartialMap map;  // the matched overlap map
};

// one witness per overlapping pair (a < b); pairs with no matching walk map are skipped
std::vector<OverlapWitness> overlap_witnesses(const Realisation& r, const AmalgamationPattern& h,
                                              std::uint64_t cap = default_closure_cap());

// truncation of the tree-like unfolding: one chart per walk of length <= radius,
// pairs (a, w) identified with (rho_e(a), we) within range
struct TruncatedRealisation {
    Realisation realisation;
    int radius = 0;
    std::vector<Walk> walks;     // aligned with realisation.charts
    std::vector<bool> interior;  // chart marks: every one-link extension stays in range
};

TruncatedRealisation canonical_truncated(const AmalgamationPattern& h, int radius);

// inverse-closed set of links whose map touches the walk-orbit of a
std::vector<std::string> applicable_links(const AmalgamationPattern& h, int a);

// descended left multiplication of the reduced product: moves the source fibres
// of from/to into each other, fixes everything else
struct RigidSymmetry {
    int from = 0;
    int to = 0;
    std::map<int, int> element_map;                 // permutation of the realisation universe
    std::map<std::size_t, std::size_t> chart_map;   // chart index -> chart index
};

struct RigidSymmetryReport {
    std::vector<RigidSymmetry> generators;  // fibre base element paired with every other fibre element
    std::map<int, bool> transitive_on;      // site -> generated orbits cover U_s
    bool transitive = true;
};

// every generator is re-verified as a rigid automorphism before it is returned;
// a failure there is an internal error, not a property of the input
RigidSymmetryReport rigid_symmetries(const ReducedProduct& rp);

// extension of a pattern symmetry to the realisation: chart images force the
// element permutation piecewise
struct RealisationSymmetry {
    Symmetry base;                                 // pattern symmetry over sorts S, E, H
    std::map<int, int> element_map;                // realisation universe permutation
    std::map<std::size_t, std::size_t> chart_map;  // chart index -> chart index
};

struct RealisationSymmetrySearch {
    std::vector<RealisationSymmetry> symmetries;
    bool exhaustive = true;
};

// all extensions of one pattern symmetry when all_solutions, else at most one;
// the identity base enumerates the rigid symmetry group
RealisationSymmetrySearch realisation_symmetry_extensions(const Realisation& r, const AmalgamationPattern& h,
                                                          const Symmetry& base, bool all_solutions, Budget& budget);

struct FullSymmetryVerdict {
    bool value = false;
    bool exhaustive = true;
    std::string detail;  // first failure: a symmetry with no extension or a split U_s
};

// every pattern symmetry extends and the rigid symmetries act transitively per template
FullSymmetryVerdict is_fully_symmetric_realisation(const ReducedProduct& rp, const AmalgamationPattern& h,
                                                   Budget& budget);
FullSymmetryVerdict is_fully_symmetric_realisation(const Realisation& r, const AmalgamationPattern& h,
                                                   Budget& budget);

// distinct coordinate domains as hyperedges over the realisation universe
Hypergraph atlas_hypergraph(const Realisation& r);

}  // namespace amalgam
