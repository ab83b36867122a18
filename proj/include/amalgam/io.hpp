#pragma once

#include <string>

#include "amalgam/core.hpp"
#include "amalgam/eppa.hpp"
#include "amalgam/groupoid.hpp"
#include "amalgam/hypergraph.hpp"
#include "amalgam/incidence.hpp"
#include "amalgam/pattern.hpp"
#include "amalgam/product.hpp"

namespace amalgam {

// JSON codecs; *_from_json throws ParseError on malformed shapes and leaves
// semantic validation to the module validators. Serialised output is pretty
// printed with sorted object keys, so equal values serialise identically.

std::string structure_to_json(const RelStructure& a);
RelStructure structure_from_json(const std::string& text);

std::string incidence_to_json(const IncidencePattern& inc);
IncidencePattern incidence_from_json(const std::string& text);

// reversed link maps may be omitted from "links"; they are derived from the
// partner and cross-checked by validate_pattern when both are present
std::string pattern_to_json(const AmalgamationPattern& h);
AmalgamationPattern pattern_from_json(const std::string& text);

std::string groupoid_to_json(const Groupoid& g);
Groupoid groupoid_from_json(const std::string& text);

std::string hypergraph_to_json(const Hypergraph& h);
Hypergraph hypergraph_from_json(const std::string& text);

std::string realisation_to_json(const Realisation& r);
Realisation realisation_from_json(const std::string& text);

// realisation plus per-chart interior flags, as written by the truncation builder
std::string truncation_to_json(const TruncatedRealisation& t);

std::string pattern_covering_to_json(const PatternCovering& c);
PatternCovering pattern_covering_from_json(const std::string& text);

std::string hyp_covering_to_json(const HypergraphCovering& c);
HypergraphCovering hyp_covering_from_json(const std::string& text);

std::string instance_to_json(const EppaInstance& inst);
EppaInstance instance_from_json(const std::string& text);

std::string solution_to_json(const EppaSolution& sol);
EppaSolution solution_from_json(const std::string& text);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

// short content fingerprint for reports
std::string digest(const std::string& text);

// DOT exports with stable node and edge ordering

// one node per groupoid element coloured by target site, generator-labelled edges
std::string cayley_dot(const Groupoid& g);
// undirected Gaifman graph of a hypergraph
std::string gaifman_dot(const Hypergraph& h);
// intersection graph of the coordinate domains
std::string atlas_dot(const Realisation& r);
// two-layer covering drawing with dashed fibre edges
std::string covering_dot(const HypergraphCovering& c);

}  // namespace amalgam
