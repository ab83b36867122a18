#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace amalgam {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// malformed input files or JSON shapes
struct ParseError : Error {
    using Error::Error;
};

// operation invoked outside its stated precondition
struct PreconditionError : Error {
    using Error::Error;
};

struct ValidationReport {
    std::vector<std::string> violations;
    std::vector<std::string> warnings;
    bool ok() const { return violations.empty(); }
    void fail(std::string msg) { violations.push_back(std::move(msg)); }
    void warn(std::string msg) { warnings.push_back(std::move(msg)); }
};

// cooperative work budget; searches that hit the limit report exhaustive=false instead of lying
struct Budget {
    std::uint64_t limit = 10000000;
    std::uint64_t used = 0;
    bool spend(std::uint64_t n = 1) {
        used += n;
        return used <= limit;
    }
    bool exhausted() const { return used > limit; }
};

// limit taken from AMALGAM_BUDGET when set
Budget default_budget();
std::uint64_t default_closure_cap();

struct RelSymbol {
    std::string name;
    int arity = 0;
    bool operator==(const RelSymbol&) const = default;
    bool operator<(const RelSymbol& o) const { return name < o.name; }
};

struct Signature {
    std::vector<RelSymbol> symbols;  // sorted by name, unique
    const RelSymbol* find(const std::string& name) const;
    bool operator==(const Signature&) const = default;
};

Signature make_signature(std::vector<RelSymbol> symbols);

// finite relational structure over opaque int element ids
struct RelStructure {
    Signature sig;
    std::vector<int> universe;  // sorted, unique
    std::map<std::string, std::set<std::vector<int>>> relations;

    bool has_element(int a) const;
    const std::set<std::vector<int>>& tuples(const std::string& name) const;
    bool operator==(const RelStructure&) const = default;
};

ValidationReport validate_structure(const RelStructure& a);
RelStructure induced_substructure(const RelStructure& a, const std::vector<int>& subset);
// all parts must share the signature and have pairwise disjoint universes
RelStructure disjoint_union(const Signature& sig, const std::vector<const RelStructure*>& parts);

// finite partial injection on element ids, stored sorted by source
class PartialMap {
public:
    PartialMap() = default;
    explicit PartialMap(std::vector<std::pair<int, int>> pairs);
    static std::optional<PartialMap> try_make(std::vector<std::pair<int, int>> pairs);

    const std::vector<std::pair<int, int>>& pairs() const { return pairs_; }
    bool empty() const { return pairs_.empty(); }
    std::size_t size() const { return pairs_.size(); }
    std::optional<int> apply(int a) const;
    bool defined_on(int a) const;
    std::vector<int> domain() const;
    std::vector<int> image() const;
    PartialMap inverse() const;
    PartialMap restrict_domain(const std::vector<int>& dom) const;
    bool is_identity_restriction() const;
    bool extends(const PartialMap& other) const;  // other is a subset of this map
    bool operator==(const PartialMap&) const = default;
    bool operator<(const PartialMap& o) const { return pairs_ < o.pairs_; }

private:
    std::vector<std::pair<int, int>> pairs_;
};

// apply f first, then g; dom = f^-1(im f intersect dom g)
PartialMap compose_partial(const PartialMap& f, const PartialMap& g);
std::optional<PartialMap> union_partial(const PartialMap& f, const PartialMap& g);
PartialMap identity_map(const std::vector<int>& dom);

// relation preservation in both directions over dom/image tuples;
// endpoints outside the universes are a precondition error, not "false"
bool is_partial_isomorphism(const RelStructure& a, const RelStructure& b, const PartialMap& f);

// total map on a's universe that is an isomorphism onto b
bool is_isomorphism_onto(const RelStructure& a, const RelStructure& b, const PartialMap& f);

struct HomSearchResult {
    std::vector<std::map<int, int>> homs;
    bool exhaustive = true;
};

// all relation-preserving total maps from x into a, lexicographic order
HomSearchResult find_homomorphisms(const RelStructure& x, const RelStructure& a, Budget& budget);

// multi-sorted first-order instance: named carriers, unary functions between them, typed relations
struct SortedFunction {
    std::string name;
    std::string dom_sort;
    std::string cod_sort;
    std::map<int, int> values;  // total on the dom carrier
};

struct SortedRelation {
    std::string name;
    std::vector<std::string> profile;  // sort name per position
    std::set<std::vector<int>> tuples;
};

struct MultiSortedInstance {
    std::vector<std::pair<std::string, std::vector<int>>> sorts;  // carriers sorted; ids are scoped per sort
    std::vector<SortedFunction> functions;
    std::vector<SortedRelation> relations;
    // optional display names per sort element; ignored by searches, used by decoders
    std::map<std::string, std::map<int, std::string>> labels;
    const std::vector<int>* carrier(const std::string& sort) const;
};

ValidationReport validate_multisorted(const MultiSortedInstance& m);

// per-sort permutations commuting with all functions and preserving all relations
struct Symmetry {
    std::map<std::string, std::map<int, int>> perms;
    int apply(const std::string& sort, int a) const;
    bool operator==(const Symmetry&) const = default;
    bool operator<(const Symmetry& o) const { return perms < o.perms; }
};

struct SymmetrySearchResult {
    std::vector<Symmetry> symmetries;
    bool exhaustive = true;
};

// rigid sorts are pinned to the identity; results in lexicographic order, identity included
SymmetrySearchResult find_symmetries(const MultiSortedInstance& m, const std::set<std::string>& rigid_sorts,
                                     Budget& budget);

bool is_symmetry(const MultiSortedInstance& m, const Symmetry& sym);

}  // namespace amalgam
