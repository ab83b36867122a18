#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "amalgam/core.hpp"
#include "amalgam/pattern.hpp"

namespace amalgam {

// finite hypergraph; hyperedges are vertex sets, every vertex lies in some hyperedge
struct Hypergraph {
    std::vector<int> vertices;                 // sorted, unique
    std::vector<std::vector<int>> hyperedges;  // each sorted-unique; list sorted, duplicates collapsed
    bool operator==(const Hypergraph&) const = default;
};

Hypergraph make_hypergraph(std::vector<int> vertices, std::vector<std::vector<int>> hyperedges);
ValidationReport validate_hypergraph(const Hypergraph& h);

// undirected edges (a, b) with a < b of the clique union
std::set<std::pair<int, int>> gaifman(const Hypergraph& h);

Hypergraph induced_sub_hypergraph(const Hypergraph& h, const std::vector<int>& w);

struct ChordalityVerdict {
    bool value = false;
    std::optional<std::vector<int>> witness_cycle;  // chordless cycle in vertex order
};

// no chordless Gaifman cycles of length 4..n; n = 2 or 3 holds vacuously
ChordalityVerdict is_chordal_up_to(const Hypergraph& h, int n);

struct ConformalityVerdict {
    bool value = false;
    std::optional<std::vector<int>> witness_clique;  // clique not inside any hyperedge
};

// every Gaifman clique with at most n vertices is contained in a hyperedge
ConformalityVerdict is_conformal_up_to(const Hypergraph& h, int n);

struct HypAcyclicityVerdict {
    bool value = false;
    std::optional<std::vector<int>> witness_cycle;
    std::optional<std::vector<int>> witness_clique;
};

HypAcyclicityVerdict is_n_acyclic_hyp(const Hypergraph& h, int n);
// full acyclicity = chordal + conformal at n = |vertices|
HypAcyclicityVerdict is_acyclic_hyp(const Hypergraph& h);

struct GrahamStep {
    bool vertex_step = false;
    int vertex = -1;       // deleted vertex, for vertex steps
    int edge_index = -1;   // deleted hyperedge index (original numbering), for edge steps
    int container = -1;    // witness containing edge index, -1 when the last empty edge goes
};

struct GrahamResult {
    bool acyclic = false;
    std::vector<GrahamStep> trace;
    Hypergraph stuck;  // irreducible remainder; empty when acyclic
};

// deterministic retraction: lowest deletable vertex first, else lowest deletable hyperedge
GrahamResult graham_reduce(const Hypergraph& h);

struct TreeDecomposition {
    std::vector<std::vector<int>> bags;       // bag contents; node ids are indices
    std::vector<std::pair<int, int>> edges;   // tree edges between node indices
};

// built from the Graham trace (each deleted edge attaches to its witness container);
// nullopt when the hypergraph is not acyclic
std::optional<TreeDecomposition> tree_decomposition(const Hypergraph& h);
ValidationReport validate_tree_decomposition(const Hypergraph& h, const TreeDecomposition& td);

// one site per hyperedge, overlap identifications as links; sites carry no relations
ExplodedView exploded_view_hyp(const Hypergraph& h);

struct HypergraphCovering {
    Hypergraph up;
    Hypergraph down;
    std::map<int, int> pi;  // vertex map up -> down
};

// extract the vertex projection from a realisation of exploded_view_hyp(base)
HypergraphCovering covering_from_realisation(const Realisation& r, const Hypergraph& base);
HypergraphCovering covering_from_realisation(const Realisation& r, const ExplodedView& ev, const Hypergraph& base);

// per-hyperedge bijectivity, hyperedge surjectivity and overlap lifting
ValidationReport verify_hyp_covering(const HypergraphCovering& c);
// equivalent formulation: some lifted neighbour makes pi bijective on the union of the two hyperedges
ValidationReport verify_hyp_covering_union_form(const HypergraphCovering& c);

}  // namespace amalgam
