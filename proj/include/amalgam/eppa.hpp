#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "amalgam/core.hpp"
#include "amalgam/groupoid.hpp"
#include "amalgam/pattern.hpp"
#include "amalgam/product.hpp"

namespace amalgam {

// named partial automorphism of the base structure, with its inverse by name
struct EppaPartial {
    std::string id;
    PartialMap map;
    std::string inv;
    bool operator==(const EppaPartial&) const = default;
};

// extension problem: a finite structure plus an inverse-closed set of partial automorphisms
struct EppaInstance {
    RelStructure base;
    std::vector<EppaPartial> partials;  // sorted by id, unique

    const EppaPartial& partial(const std::string& id) const;
};

ValidationReport validate_instance(const EppaInstance& inst);

// one-site pattern: the single site carries the base, one loop link per partial
AmalgamationPattern instance_to_pattern(const EppaInstance& inst);

// finite structure embedding the base so that every partial extends to an automorphism;
// the base sits inside via the distinguished chart
struct EppaSolution {
    Realisation realisation;
    std::size_t chart0 = 0;                                    // distinguished chart index
    std::map<std::string, std::map<int, int>> automorphisms;   // partial id -> automorphism
};

// groupoid sources tried in order: the user-supplied one, then the coordinate ladder
struct GroupoidSupply {
    const Groupoid* user = nullptr;
    std::size_t max_size = 1 << 20;  // ladder candidate cap
};

// builds the quotient of the base tensored with a simple compatible n-acyclic group,
// reads the extending automorphisms off the descended left translations
EppaSolution solve(const EppaInstance& inst, int n_acyclic, const GroupoidSupply& supply, Budget& budget);

// embedding check for the distinguished chart plus, per partial, automorphism and
// extension-of-the-embedded-partial checks; empty report iff sol solves inst
ValidationReport verify_solution(const EppaInstance& inst, const EppaSolution& sol);

struct SolutionSymmetryVerdict {
    bool value = false;
    bool exhaustive = true;
    std::string detail;
    std::vector<OverlapWitness> words;  // per intersecting chart pair, the composing word over the partials
};

// (i) chart-compatible automorphisms act transitively on the coordinate domains;
// (ii) every chart overlap is the composition of a word over the partials, domains included
SolutionSymmetryVerdict is_fully_symmetric_solution(const EppaInstance& inst, const EppaSolution& sol, Budget& budget);

// homomorphism from the substructure induced on d into b, built chart-locally along
// a tree decomposition of the atlas restricted to d; requires an n-acyclic atlas,
// |d| <= n, and b a realisation of the same pattern
std::map<int, int> universal_hom(const Realisation& r, const std::vector<int>& d, const Realisation& b,
                                 const AmalgamationPattern& h, int n_acyclic);

struct ForbiddenClassVerdict {
    bool value = false;
    bool exhaustive = true;  // false = search budget ran out, membership unknown
    // index into the forbidden list and the offending homomorphism
    std::optional<std::pair<std::size_t, std::map<int, int>>> witness;
};

// true iff no member of the forbidden list maps homomorphically into a
ForbiddenClassVerdict check_forbidden_class(const RelStructure& a, const std::vector<RelStructure>& x,
                                            Budget& budget);

}  // namespace amalgam
