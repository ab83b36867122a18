#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "amalgam/core.hpp"
#include "amalgam/groupoid.hpp"
#include "amalgam/hypergraph.hpp"
#include "amalgam/pattern.hpp"

namespace amalgam {

// deterministic generators for the property suites: equal seeds give equal objects

struct FuzzBounds {
    int max_sites = 3;
    int max_carrier = 8;  // total elements across all site templates
    int max_atoms = 3;    // reversal pairs e, e^-1
};

IncidencePattern random_incidence(std::mt19937& rng, const FuzzBounds& b);

// mixes generic random link maps with exploded views and complete patterns so the
// coherent subfamilies stay populated; always passes validate_pattern
AmalgamationPattern random_pattern(std::mt19937& rng, const FuzzBounds& b);

Hypergraph random_hypergraph(std::mt19937& rng, int max_vertices, int max_edges);

// every hypergraph with vertex set {0..v-1}, v <= max_vertices, and 1..max_edges
// distinct nonempty hyperedges whose union covers the vertex set
std::vector<Hypergraph> all_hypergraphs(int max_vertices, int max_edges);

// walk-map enumeration oracle: grows the closure length by length and stops one
// round after nothing new appears; stabilized=false when max_len cut it short
struct EnumeratedClosure {
    std::vector<ClosureEntry> entries;  // sorted like closure()
    bool stabilized = true;
};

EnumeratedClosure closure_by_enumeration(const AmalgamationPattern& h, int max_len);

// pattern-groupoid pairs for the product suites; groupoids from the coordinate
// ladder are recorded with the acyclicity level they were verified at, action
// groupoids of complete patterns carry level 0 (compatibility only)
struct PoolEntry {
    AmalgamationPattern h;
    Groupoid g;
    int n_acyclic = 0;
};

std::vector<PoolEntry> product_pool(std::size_t count, std::uint64_t seed, Budget& budget);

struct FuzzReport {
    std::size_t instances = 0;  // cases that reached the property check
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

// strong coherence implies global consistency implies coherence
FuzzReport fuzz_consistency_hierarchy(std::size_t count, std::uint64_t seed);
// closure() agrees with the stabilized walk enumeration, witnesses included
FuzzReport fuzz_closure_oracle(std::size_t count, std::uint64_t seed);
// quotients of simple strongly coherent patterns verify as realisations
FuzzReport fuzz_quotient_realisation(std::size_t count, std::uint64_t seed);

// direct products: coherent for every pool pair, simple and strongly coherent
// when the pattern is coherent and the groupoid simple and 2-acyclic
FuzzReport check_product_coherence(const std::vector<PoolEntry>& pool);
// reduced products of qualifying pairs verify as realisations with transitive
// rigid symmetries on every chart fibre
FuzzReport check_reduced_product_realisations(const std::vector<PoolEntry>& pool);
// atlas hypergraphs inherit the groupoid's verified acyclicity level
FuzzReport check_atlas_acyclicity(const std::vector<PoolEntry>& pool);

// exploded views of random hypergraphs: quotient and reduced-product realisations
// both project to hypergraph coverings passing both verifier formulations
FuzzReport fuzz_hypergraph_coverings(std::size_t count, std::uint64_t seed, Budget& budget);

}  // namespace amalgam
