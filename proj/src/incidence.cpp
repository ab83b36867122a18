#include "amalgam/incidence.hpp"

#include <algorithm>
#include <sstream>

#include "amalgam/util.hpp"

namespace amalgam {

const LinkDecl* IncidencePattern::link(const std::string& id) const {
    auto it = std::lower_bound(links.begin(), links.end(), id,
                               [](const LinkDecl& l, const std::string& key) { return l.id < key; });
    if (it != links.end() && it->id == id) return &*it;
    return nullptr;
}

const LinkDecl& IncidencePattern::link_or_throw(const std::string& id) const {
    const LinkDecl* l = link(id);
    if (!l) throw PreconditionError("unknown link id: " + id);
    return *l;
}

bool IncidencePattern::has_site(int s) const {
    return contains(sites, s);
}

std::vector<std::string> IncidencePattern::link_ids() const {
    std::vector<std::string> out;
    out.reserve(links.size());
    for (const auto& l : links) out.push_back(l.id);
    return out;
}

std::vector<std::pair<std::string, std::string>> IncidencePattern::atoms() const {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& l : links)
        if (l.id <= l.inv) out.emplace_back(l.id, l.inv);
    return out;
}

IncidencePattern make_incidence(std::vector<int> sites, std::vector<LinkDecl> links) {
    sort_unique(sites);
    std::sort(links.begin(), links.end(), [](const LinkDecl& a, const LinkDecl& b) { return a.id < b.id; });
    IncidencePattern inc{std::move(sites), std::move(links)};
    ValidationReport rep = validate_incidence(inc);
    if (!rep.ok()) throw Error("make_incidence: " + rep.violations.front());
    return inc;
}

ValidationReport validate_incidence(const IncidencePattern& inc) {
    ValidationReport rep;
    if (!std::is_sorted(inc.sites.begin(), inc.sites.end()) ||
        std::adjacent_find(inc.sites.begin(), inc.sites.end()) != inc.sites.end())
        rep.fail("sites are not sorted-unique");
    for (std::size_t i = 1; i < inc.links.size(); ++i)
        if (inc.links[i].id == inc.links[i - 1].id) rep.fail("duplicate link id: " + inc.links[i].id);
    for (const auto& l : inc.links) {
        if (!inc.has_site(l.src)) rep.fail("link " + l.id + " has unknown source site");
        if (!inc.has_site(l.tgt)) rep.fail("link " + l.id + " has unknown target site");
        const LinkDecl* r = inc.link(l.inv);
        if (!r) {
            rep.fail("link " + l.id + " declares missing reversal " + l.inv);
            continue;
        }
        if (r->inv != l.id) rep.fail("reversal is not involutive at link " + l.id);
        if (r->src != l.tgt || r->tgt != l.src) rep.fail("reversal of link " + l.id + " does not flip endpoints");
        if (l.inv == l.id) {
            if (l.src != l.tgt)
                rep.fail("self-inverse link " + l.id + " is not a loop");
            else
                rep.warn("link " + l.id + " is declared self-inverse");
        }
    }
    return rep;
}

bool Walk::operator<(const Walk& o) const {
    if (links.size() != o.links.size()) return links.size() < o.links.size();
    if (links != o.links) return links < o.links;
    return anchor < o.anchor;
}

Walk empty_walk(int site) {
    return Walk{site, {}};
}

Walk link_walk(const IncidencePattern& inc, const std::string& link_id) {
    const LinkDecl& l = inc.link_or_throw(link_id);
    return Walk{l.src, {link_id}};
}

std::string walk_to_string(const Walk& w) {
    if (w.links.empty()) return "<empty@" + std::to_string(w.anchor) + ">";
    std::ostringstream os;
    for (std::size_t i = 0; i < w.links.size(); ++i) {
        if (i) os << ' ';
        os << w.links[i];
    }
    return os.str();
}

bool walk_ok(const IncidencePattern& inc, const Walk& w) {
    if (w.links.empty()) return inc.has_site(w.anchor);
    const LinkDecl* first = inc.link(w.links.front());
    if (!first) return false;
    int at = first->src;
    if (w.anchor != -1 && w.anchor != at) return false;
    for (const auto& id : w.links) {
        const LinkDecl* l = inc.link(id);
        if (!l || l->src != at) return false;
        at = l->tgt;
    }
    return true;
}

std::pair<int, int> walk_iota(const IncidencePattern& inc, const Walk& w) {
    if (!walk_ok(inc, w)) throw PreconditionError("walk is not composable: " + walk_to_string(w));
    if (w.links.empty()) return {w.anchor, w.anchor};
    return {inc.link_or_throw(w.links.front()).src, inc.link_or_throw(w.links.back()).tgt};
}

Walk concat_walks(const IncidencePattern& inc, const Walk& w1, const Walk& w2) {
    auto [s1, t1] = walk_iota(inc, w1);
    auto [s2, t2] = walk_iota(inc, w2);
    if (t1 != s2) throw PreconditionError("concat_walks: interface sites do not match");
    Walk out;
    out.anchor = s1;
    out.links = w1.links;
    out.links.insert(out.links.end(), w2.links.begin(), w2.links.end());
    return out;
}

Walk inverse_walk(const IncidencePattern& inc, const Walk& w) {
    auto [s, t] = walk_iota(inc, w);
    Walk out;
    out.anchor = t;
    for (auto it = w.links.rbegin(); it != w.links.rend(); ++it) out.links.push_back(inc.link_or_throw(*it).inv);
    return out;
}

Walk append_link(const IncidencePattern& inc, const Walk& w, const std::string& link_id) {
    return concat_walks(inc, w, link_walk(inc, link_id));
}

bool is_reduced_walk(const IncidencePattern& inc, const Walk& w) {
    for (std::size_t i = 1; i < w.links.size(); ++i)
        if (inc.link_or_throw(w.links[i - 1]).inv == w.links[i]) return false;
    return true;
}

Walk reduce_walk(const IncidencePattern& inc, const Walk& w) {
    auto [s, t] = walk_iota(inc, w);
    std::vector<std::string> stack;
    for (const auto& id : w.links) {
        if (!stack.empty() && inc.link_or_throw(stack.back()).inv == id)
            stack.pop_back();
        else
            stack.push_back(id);
    }
    Walk out{s, std::move(stack)};
    return out;
}

std::vector<Walk> walks_up_to(const IncidencePattern& inc, int max_len) {
    if (max_len < 0) throw PreconditionError("walks_up_to: negative length bound");
    std::vector<Walk> out;
    std::vector<Walk> frontier;
    for (int s : inc.sites) frontier.push_back(empty_walk(s));
    out = frontier;
    for (int len = 1; len <= max_len; ++len) {
        std::vector<Walk> next;
        for (const Walk& w : frontier) {
            int at = walk_iota(inc, w).second;
            for (const auto& l : inc.links) {
                if (l.src != at) continue;
                Walk ext = w;
                if (ext.links.empty()) ext.anchor = l.src;
                ext.links.push_back(l.id);
                ext.anchor = w.anchor;
                next.push_back(std::move(ext));
            }
        }
        std::sort(next.begin(), next.end());
        out.insert(out.end(), next.begin(), next.end());
        frontier = std::move(next);
    }
    return out;
}

}  // namespace amalgam
