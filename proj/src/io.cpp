#include "amalgam/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "amalgam/util.hpp"
#include "json.hpp"

namespace amalgam {

namespace {

using nlohmann::json;

json parse_text(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw ParseError("json: line " + std::to_string(line) + ", column " + std::to_string(col) + ": " +
                         e.what());
    }
}

const json& field(const json& j, const std::string& key) {
    if (!j.is_object()) throw ParseError("json: expected an object with field \"" + key + "\"");
    auto it = j.find(key);
    if (it == j.end()) throw ParseError("json: missing field \"" + key + "\"");
    return *it;
}

int as_int(const json& j, const std::string& what) {
    if (!j.is_number_integer()) throw ParseError("json: " + what + " must be an integer");
    return j.get<int>();
}

std::string as_str(const json& j, const std::string& what) {
    if (!j.is_string()) throw ParseError("json: " + what + " must be a string");
    return j.get<std::string>();
}

const json& as_array(const json& j, const std::string& what) {
    if (!j.is_array()) throw ParseError("json: " + what + " must be an array");
    return j;
}

const json& as_object(const json& j, const std::string& what) {
    if (!j.is_object()) throw ParseError("json: " + what + " must be an object");
    return j;
}

std::vector<int> int_vector(const json& j, const std::string& what) {
    std::vector<int> out;
    for (const auto& x : as_array(j, what)) out.push_back(as_int(x, "entry of " + what));
    return out;
}

std::vector<std::pair<int, int>> int_pairs(const json& j, const std::string& what) {
    std::vector<std::pair<int, int>> out;
    for (const auto& x : as_array(j, what)) {
        const json& p = as_array(x, "entry of " + what);
        if (p.size() != 2) throw ParseError("json: entry of " + what + " must be a pair");
        out.emplace_back(as_int(p[0], what), as_int(p[1], what));
    }
    return out;
}

PartialMap map_of(const json& j, const std::string& what) {
    auto made = PartialMap::try_make(int_pairs(j, what));
    if (!made) throw ParseError("json: " + what + " is not a partial injection");
    return *made;
}

int int_key(const std::string& key, const std::string& what) {
    try {
        std::size_t used = 0;
        int v = std::stoi(key, &used);
        if (used != key.size()) throw std::invalid_argument(key);
        return v;
    } catch (const std::exception&) {
        throw ParseError("json: key \"" + key + "\" of " + what + " must be an integer");
    }
}

json pairs_json(const PartialMap& m) {
    json arr = json::array();
    for (const auto& [a, b] : m.pairs()) arr.push_back(json::array({a, b}));
    return arr;
}

json map_json(const std::map<int, int>& m) {
    json arr = json::array();
    for (const auto& [a, b] : m) arr.push_back(json::array({a, b}));
    return arr;
}

std::map<int, int> int_map_of(const json& j, const std::string& what) {
    std::map<int, int> out;
    for (const auto& [a, b] : int_pairs(j, what))
        if (!out.emplace(a, b).second) throw ParseError("json: " + what + " repeats key " + std::to_string(a));
    return out;
}

json structure_json(const RelStructure& a) {
    json j;
    json sig = json::array();
    for (const auto& s : a.sig.symbols) sig.push_back(json{{"name", s.name}, {"arity", s.arity}});
    j["signature"] = std::move(sig);
    j["universe"] = a.universe;
    json rels = json::object();
    for (const auto& [name, tuples] : a.relations) {
        json arr = json::array();
        for (const auto& t : tuples) arr.push_back(t);
        rels[name] = std::move(arr);
    }
    j["relations"] = std::move(rels);
    return j;
}

RelStructure structure_of(const json& j) {
    RelStructure a;
    std::vector<RelSymbol> symbols;
    for (const auto& s : as_array(field(j, "signature"), "signature"))
        symbols.push_back(RelSymbol{as_str(field(s, "name"), "symbol name"), as_int(field(s, "arity"), "arity")});
    a.sig = make_signature(std::move(symbols));
    a.universe = int_vector(field(j, "universe"), "universe");
    sort_unique(a.universe);
    for (const auto& [name, tuples] : as_object(field(j, "relations"), "relations").items())
        for (const auto& t : as_array(tuples, "relation " + name))
            a.relations[name].insert(int_vector(t, "tuple of " + name));
    return a;
}

json incidence_json(const IncidencePattern& inc) {
    json j;
    j["sites"] = inc.sites;
    json links = json::array();
    for (const auto& l : inc.links)
        links.push_back(json{{"id", l.id}, {"src", l.src}, {"tgt", l.tgt}, {"inv", l.inv}});
    j["links"] = std::move(links);
    return j;
}

IncidencePattern incidence_of(const json& j) {
    std::vector<int> sites = int_vector(field(j, "sites"), "sites");
    std::vector<LinkDecl> links;
    for (const auto& l : as_array(field(j, "links"), "links"))
        links.push_back(LinkDecl{as_str(field(l, "id"), "link id"), as_int(field(l, "src"), "link src"),
                                 as_int(field(l, "tgt"), "link tgt"), as_str(field(l, "inv"), "link inv")});
    try {
        return make_incidence(std::move(sites), std::move(links));
    } catch (const Error& e) {
        throw ParseError(std::string("json: incidence: ") + e.what());
    }
}

json pattern_json(const AmalgamationPattern& h) {
    json j;
    j["incidence"] = incidence_json(h.incidence);
    json sites = json::object();
    for (const auto& [s, tmpl] : h.sites) sites[std::to_string(s)] = structure_json(tmpl);
    j["sites"] = std::move(sites);
    json links = json::object();
    for (const auto& [id, rho] : h.links) links[id] = pairs_json(rho);
    j["links"] = std::move(links);
    return j;
}

AmalgamationPattern pattern_of(const json& j) {
    AmalgamationPattern h;
    h.incidence = incidence_of(field(j, "incidence"));
    for (const auto& [key, val] : as_object(field(j, "sites"), "sites").items())
        h.sites[int_key(key, "sites")] = structure_of(val);
    if (!h.sites.empty()) h.sig = h.sites.begin()->second.sig;
    const json& links = as_object(field(j, "links"), "links");
    for (const auto& [id, val] : links.items()) {
        if (!h.incidence.link(id)) throw ParseError("json: links mention unknown link \"" + id + "\"");
        h.links[id] = map_of(val, "link " + id);
    }
    for (const auto& l : h.incidence.links) {
        if (h.links.count(l.id)) continue;
        auto partner = h.links.find(l.inv);
        if (partner == h.links.end())
            throw ParseError("json: link \"" + l.id + "\" has no map and no reversal to derive it from");
        h.links[l.id] = partner->second.inverse();
    }
    return h;
}

json groupoid_json(const Groupoid& g) {
    json j;
    j["incidence"] = incidence_json(g.incidence);
    json elements = json::array();
    for (int e : g.elements) {
        auto [s, t] = g.sorts.at(e);
        elements.push_back(json{{"id", e}, {"src", s}, {"tgt", t}});
    }
    j["elements"] = std::move(elements);
    json units = json::object();
    for (const auto& [s, u] : g.units) units[std::to_string(s)] = u;
    j["units"] = std::move(units);
    json compose = json::array();
    for (const auto& [pair, result] : g.table) compose.push_back(json::array({pair.first, pair.second, result}));
    j["compose"] = std::move(compose);
    json generators = json::object();
    for (const auto& [id, e] : g.generators) generators[id] = e;
    j["generators"] = std::move(generators);
    return j;
}

Groupoid groupoid_of(const json& j) {
    Groupoid g;
    g.incidence = incidence_of(field(j, "incidence"));
    for (const auto& e : as_array(field(j, "elements"), "elements")) {
        int id = as_int(field(e, "id"), "element id");
        g.elements.push_back(id);
        g.sorts[id] = {as_int(field(e, "src"), "element src"), as_int(field(e, "tgt"), "element tgt")};
    }
    std::size_t given = g.elements.size();
    sort_unique(g.elements);
    if (g.elements.size() != given) throw ParseError("json: elements repeat an id");
    for (const auto& [key, val] : as_object(field(j, "units"), "units").items())
        g.units[int_key(key, "units")] = as_int(val, "unit");
    for (const auto& row : as_array(field(j, "compose"), "compose")) {
        const json& r = as_array(row, "compose row");
        if (r.size() != 3) throw ParseError("json: compose rows must be triples");
        g.table[{as_int(r[0], "compose"), as_int(r[1], "compose")}] = as_int(r[2], "compose");
    }
    for (const auto& [id, val] : as_object(field(j, "generators"), "generators").items())
        g.generators[id] = as_int(val, "generator");
    return g;
}

json hypergraph_json(const Hypergraph& h) {
    json j;
    j["vertices"] = h.vertices;
    json edges = json::array();
    for (const auto& e : h.hyperedges) edges.push_back(e);
    j["hyperedges"] = std::move(edges);
    return j;
}

Hypergraph hypergraph_of(const json& j) {
    std::vector<int> vertices = int_vector(field(j, "vertices"), "vertices");
    std::vector<std::vector<int>> edges;
    for (const auto& e : as_array(field(j, "hyperedges"), "hyperedges")) edges.push_back(int_vector(e, "hyperedge"));
    try {
        return make_hypergraph(std::move(vertices), std::move(edges));
    } catch (const Error& e) {
        throw ParseError(std::string("json: hypergraph: ") + e.what());
    }
}

json chart_json(const Chart& c) { return json{{"site", c.site}, {"map", pairs_json(c.map)}}; }

Chart chart_of(const json& j) {
    Chart c;
    c.site = as_int(field(j, "site"), "chart site");
    c.map = map_of(field(j, "map"), "chart map");
    c.domain = c.map.domain();
    return c;
}

json realisation_json(const Realisation& r) {
    json j;
    j["structure"] = structure_json(r.structure);
    json charts = json::array();
    for (const Chart& c : r.charts) charts.push_back(chart_json(c));
    j["charts"] = std::move(charts);
    return j;
}

Realisation realisation_of(const json& j) {
    Realisation r;
    r.structure = structure_of(field(j, "structure"));
    for (const auto& c : as_array(field(j, "charts"), "charts")) r.charts.push_back(chart_of(c));
    return r;
}

json pattern_covering_json(const PatternCovering& c) {
    json j;
    j["upstairs"] = pattern_json(c.upstairs);
    j["downstairs"] = pattern_json(c.downstairs);
    j["site_map"] = map_json(c.site_map);
    json links = json::object();
    for (const auto& [a, b] : c.link_map) links[a] = b;
    j["link_map"] = std::move(links);
    j["element_map"] = map_json(c.element_map);
    return j;
}

PatternCovering pattern_covering_of(const json& j) {
    PatternCovering c;
    c.upstairs = pattern_of(field(j, "upstairs"));
    c.downstairs = pattern_of(field(j, "downstairs"));
    c.site_map = int_map_of(field(j, "site_map"), "site_map");
    for (const auto& [a, b] : as_object(field(j, "link_map"), "link_map").items())
        c.link_map[a] = as_str(b, "link_map value");
    c.element_map = int_map_of(field(j, "element_map"), "element_map");
    return c;
}

json hyp_covering_json(const HypergraphCovering& c) {
    json j;
    j["up"] = hypergraph_json(c.up);
    j["down"] = hypergraph_json(c.down);
    j["pi"] = map_json(c.pi);
    return j;
}

HypergraphCovering hyp_covering_of(const json& j) {
    HypergraphCovering c;
    c.up = hypergraph_of(field(j, "up"));
    c.down = hypergraph_of(field(j, "down"));
    c.pi = int_map_of(field(j, "pi"), "pi");
    return c;
}

json instance_json(const EppaInstance& inst) {
    json j;
    j["structure"] = structure_json(inst.base);
    json partials = json::array();
    for (const auto& p : inst.partials)
        partials.push_back(json{{"id", p.id}, {"pairs", pairs_json(p.map)}, {"inv", p.inv}});
    j["partials"] = std::move(partials);
    return j;
}

EppaInstance instance_of(const json& j) {
    EppaInstance inst;
    inst.base = structure_of(field(j, "structure"));
    for (const auto& p : as_array(field(j, "partials"), "partials"))
        inst.partials.push_back(EppaPartial{as_str(field(p, "id"), "partial id"),
                                            map_of(field(p, "pairs"), "partial pairs"),
                                            as_str(field(p, "inv"), "partial inv")});
    std::sort(inst.partials.begin(), inst.partials.end(),
              [](const EppaPartial& a, const EppaPartial& b) { return a.id < b.id; });
    return inst;
}

json solution_json(const EppaSolution& sol) {
    json j;
    j["realisation"] = realisation_json(sol.realisation);
    j["chart0"] = sol.chart0;
    json autos = json::object();
    for (const auto& [id, sigma] : sol.automorphisms) autos[id] = map_json(sigma);
    j["automorphisms"] = std::move(autos);
    return j;
}

EppaSolution solution_of(const json& j) {
    EppaSolution sol;
    sol.realisation = realisation_of(field(j, "realisation"));
    int chart0 = as_int(field(j, "chart0"), "chart0");
    if (chart0 < 0) throw ParseError("json: chart0 must be nonnegative");
    sol.chart0 = (std::size_t)chart0;
    for (const auto& [id, val] : as_object(field(j, "automorphisms"), "automorphisms").items())
        sol.automorphisms[id] = int_map_of(val, "automorphism " + id);
    return sol;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

// stable colour per site index for DOT fills
const char* site_colour(std::size_t i) {
    static const char* palette[] = {"lightblue",  "lightgoldenrod", "lightpink",  "palegreen",
                                    "lightsalmon", "plum",           "khaki",      "lightcyan"};
    return palette[i % (sizeof(palette) / sizeof(palette[0]))];
}

std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

}  // namespace

std::string structure_to_json(const RelStructure& a) { return dump(structure_json(a)); }
RelStructure structure_from_json(const std::string& text) { return structure_of(parse_text(text)); }

std::string incidence_to_json(const IncidencePattern& inc) { return dump(incidence_json(inc)); }
IncidencePattern incidence_from_json(const std::string& text) { return incidence_of(parse_text(text)); }

std::string pattern_to_json(const AmalgamationPattern& h) { return dump(pattern_json(h)); }
AmalgamationPattern pattern_from_json(const std::string& text) { return pattern_of(parse_text(text)); }

std::string groupoid_to_json(const Groupoid& g) { return dump(groupoid_json(g)); }
Groupoid groupoid_from_json(const std::string& text) { return groupoid_of(parse_text(text)); }

std::string hypergraph_to_json(const Hypergraph& h) { return dump(hypergraph_json(h)); }
Hypergraph hypergraph_from_json(const std::string& text) { return hypergraph_of(parse_text(text)); }

std::string realisation_to_json(const Realisation& r) { return dump(realisation_json(r)); }
Realisation realisation_from_json(const std::string& text) { return realisation_of(parse_text(text)); }

std::string truncation_to_json(const TruncatedRealisation& t) {
    json j = realisation_json(t.realisation);
    j["radius"] = t.radius;
    json interior = json::array();
    for (bool b : t.interior) interior.push_back(b);
    j["interior"] = std::move(interior);
    return dump(j);
}

std::string pattern_covering_to_json(const PatternCovering& c) { return dump(pattern_covering_json(c)); }
PatternCovering pattern_covering_from_json(const std::string& text) {
    return pattern_covering_of(parse_text(text));
}

std::string hyp_covering_to_json(const HypergraphCovering& c) { return dump(hyp_covering_json(c)); }
HypergraphCovering hyp_covering_from_json(const std::string& text) { return hyp_covering_of(parse_text(text)); }

std::string instance_to_json(const EppaInstance& inst) { return dump(instance_json(inst)); }
EppaInstance instance_from_json(const std::string& text) { return instance_of(parse_text(text)); }

std::string solution_to_json(const EppaSolution& sol) { return dump(solution_json(sol)); }
EppaSolution solution_from_json(const std::string& text) { return solution_of(parse_text(text)); }

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << text;
    if (!out) throw Error("short write to " + path);
}

std::string digest(const std::string& text) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", (unsigned long long)fnv1a(text));
    return buf;
}

std::string cayley_dot(const Groupoid& g) {
    std::ostringstream out;
    out << "digraph cayley {\n  node [style=filled];\n";
    std::map<int, std::size_t> site_index;
    for (int s : g.incidence.sites) site_index.emplace(s, site_index.size());
    for (int e : g.elements) {
        auto [s, t] = g.sorts.at(e);
        out << "  n" << e << " [label=" << quote(std::to_string(e) + " (" + std::to_string(s) + ">" + std::to_string(t) + ")")
            << ", fillcolor=" << site_colour(site_index.at(t)) << "];\n";
    }
    for (const auto& l : g.incidence.links) {
        int eg = g.gen(l.id);
        for (int x : g.elements) {
            if (g.tgt_of(x) != l.src) continue;
            out << "  n" << x << " -> n" << g.compose(x, eg) << " [label=" << quote(l.id) << "];\n";
        }
    }
    out << "}\n";
    return out.str();
}

std::string gaifman_dot(const Hypergraph& h) {
    std::ostringstream out;
    out << "graph gaifman {\n";
    for (int v : h.vertices) out << "  n" << v << " [label=" << quote(std::to_string(v)) << "];\n";
    for (const auto& [a, b] : gaifman(h)) out << "  n" << a << " -- n" << b << ";\n";
    out << "}\n";
    return out.str();
}

std::string atlas_dot(const Realisation& r) {
    std::ostringstream out;
    out << "graph atlas {\n";
    std::vector<std::vector<int>> domains = r.domains();
    for (std::size_t i = 0; i < domains.size(); ++i)
        out << "  u" << i << " [label=" << quote("u" + std::to_string(i) + " |" + std::to_string(domains[i].size()) + "|")
            << "];\n";
    for (std::size_t i = 0; i < domains.size(); ++i)
        for (std::size_t j = i + 1; j < domains.size(); ++j)
            if (!intersect(domains[i], domains[j]).empty()) out << "  u" << i << " -- u" << j << ";\n";
    out << "}\n";
    return out.str();
}

std::string covering_dot(const HypergraphCovering& c) {
    std::ostringstream out;
    out << "graph covering {\n";
    out << "  subgraph cluster_up {\n    label=\"covering\";\n";
    for (int v : c.up.vertices) out << "    u" << v << " [label=" << quote(std::to_string(v)) << "];\n";
    for (const auto& [a, b] : gaifman(c.up)) out << "    u" << a << " -- u" << b << ";\n";
    out << "  }\n";
    out << "  subgraph cluster_down {\n    label=\"base\";\n";
    for (int v : c.down.vertices) out << "    d" << v << " [label=" << quote(std::to_string(v)) << "];\n";
    for (const auto& [a, b] : gaifman(c.down)) out << "    d" << a << " -- d" << b << ";\n";
    out << "  }\n";
    for (const auto& [a, b] : c.pi) out << "  u" << a << " -- d" << b << " [style=dashed];\n";
    out << "}\n";
    return out.str();
}

}  // namespace amalgam
