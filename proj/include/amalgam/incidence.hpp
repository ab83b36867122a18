#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "amalgam/core.hpp"

namespace amalgam {

struct LinkDecl {
    std::string id;
    int src = 0;
    int tgt = 0;
    std::string inv;  // id of the reversed link; may equal id (self-inverse loop)
    bool operator==(const LinkDecl&) const = default;
};

// finite bidirected multigraph of sites and links, closed under declared reversal
struct IncidencePattern {
    std::vector<int> sites;       // sorted, unique
    std::vector<LinkDecl> links;  // sorted by id, unique ids

    const LinkDecl* link(const std::string& id) const;
    const LinkDecl& link_or_throw(const std::string& id) const;
    bool has_site(int s) const;
    std::vector<std::string> link_ids() const;
    // links grouped into reversal atoms {e, e^-1}; each atom reported once, by its least id
    std::vector<std::pair<std::string, std::string>> atoms() const;
    bool operator==(const IncidencePattern&) const = default;
};

IncidencePattern make_incidence(std::vector<int> sites, std::vector<LinkDecl> links);

// reversal closure is checked, not inferred; self-inverse loops yield a warning
ValidationReport validate_incidence(const IncidencePattern& inc);

// a walk is an anchor site (meaningful when empty) plus a composable link sequence
struct Walk {
    int anchor = -1;
    std::vector<std::string> links;
    bool empty() const { return links.empty(); }
    bool operator==(const Walk&) const = default;
    bool operator<(const Walk& o) const;
};

Walk empty_walk(int site);
Walk link_walk(const IncidencePattern& inc, const std::string& link_id);
std::string walk_to_string(const Walk& w);

bool walk_ok(const IncidencePattern& inc, const Walk& w);
// (start site, end site); throws PreconditionError on a non-composable sequence
std::pair<int, int> walk_iota(const IncidencePattern& inc, const Walk& w);
// defined only when end(w1) == start(w2)
Walk concat_walks(const IncidencePattern& inc, const Walk& w1, const Walk& w2);
Walk inverse_walk(const IncidencePattern& inc, const Walk& w);
Walk append_link(const IncidencePattern& inc, const Walk& w, const std::string& link_id);
// no adjacent e e^-1 factors
bool is_reduced_walk(const IncidencePattern& inc, const Walk& w);
Walk reduce_walk(const IncidencePattern& inc, const Walk& w);

// all walks of length <= max_len, ordered by length then lexicographically by link ids;
// includes one empty walk per site
std::vector<Walk> walks_up_to(const IncidencePattern& inc, int max_len);

}  // namespace amalgam
