#include "amalgam/cli.hpp"

#include <chrono>
#include <future>
#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "amalgam/eppa.hpp"
#include "amalgam/fuzz.hpp"
#include "amalgam/groupoid.hpp"
#include "amalgam/hypergraph.hpp"
#include "amalgam/io.hpp"
#include "amalgam/pattern.hpp"
#include "amalgam/product.hpp"

namespace amalgam {

namespace {

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    std::int64_t ms() const {
        return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
    }
};

std::string render_ints(const std::vector<int>& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ", ";
        s += std::to_string(v[i]);
    }
    return s + "]";
}

std::string render_cycle(const CosetCycle& c) {
    std::string s = "pointed cosets";
    for (std::size_t i = 0; i < c.g.size(); ++i) {
        s += " | g" + std::to_string(i) + "=" + std::to_string(c.g[i]) + " alpha" + std::to_string(i) + "={";
        for (std::size_t j = 0; j < c.alpha[i].size(); ++j) {
            if (j) s += ",";
            s += c.alpha[i][j];
        }
        s += "}";
    }
    return s;
}

// false verdicts from is_strongly_coherent are only definite on a complete closure;
// coherence and simplicity witnesses violate outright
void add_coherence(CommandReport& rep, const std::string& name, const CoherenceVerdict& v, bool false_needs_complete) {
    if (!v.value) {
        if (v.complete || !false_needs_complete) {
            rep.verdicts.push_back({name, false});
            if (v.witness_link && v.witness_walk)
                rep.witnesses.push_back({name, "link " + *v.witness_link + " does not extend the map of walk " +
                                                   walk_to_string(*v.witness_walk)});
            else if (v.witness_pair)
                rep.witnesses.push_back({name, "walks " + walk_to_string(v.witness_pair->first) + " and " +
                                                   walk_to_string(v.witness_pair->second) +
                                                   " admit no common walk-map extension"});
            else if (v.witness_walk)
                rep.witnesses.push_back({name, "loop walk " + walk_to_string(*v.witness_walk) + " moves a point"});
            return;
        }
        rep.verdicts.push_back({name, std::nullopt});
        rep.witnesses.push_back({name, "undecided within the walk-map closure cap"});
        return;
    }
    if (v.complete) {
        rep.verdicts.push_back({name, true});
        return;
    }
    rep.verdicts.push_back({name, std::nullopt});
    rep.witnesses.push_back({name, "undecided within the walk-map closure cap"});
}

void finalize(CommandReport& rep, const Timer& t) {
    if (rep.exit_code == 0) {
        bool any_false = false;
        bool any_unknown = false;
        for (const auto& v : rep.verdicts) {
            if (v.value && !*v.value) any_false = true;
            if (!v.value) any_unknown = true;
        }
        if (any_unknown) rep.budget_hit = true;
        if (any_false)
            rep.exit_code = 1;
        else if (any_unknown)
            rep.exit_code = 3;
    }
    rep.elapsed_ms = t.ms();
}

struct CheckRequest {
    bool pattern = false;
    bool coherent = false;
    bool simple = false;
    bool strong = false;
    bool consistent = false;
    bool groupoid = false;
    int acyclic = 0;
    std::string compatible;
    int hyp = -1;
    std::string realises;
};

CommandReport run_check_one(const std::string& path, const CheckRequest& q) {
    CommandReport rep;
    rep.command = "check";
    Timer t;
    try {
        std::string text = read_file(path);
        rep.inputs.push_back({path, digest(text)});
        bool fam_pattern = q.pattern || q.coherent || q.simple || q.strong || q.consistent;
        if (fam_pattern) {
            AmalgamationPattern h = pattern_from_json(text);
            if (q.pattern) {
                ValidationReport vr = validate_pattern(h);
                rep.verdicts.push_back({"pattern", vr.ok()});
                if (vr.ok())
                    rep.witnesses.push_back({"pattern", std::to_string(h.incidence.sites.size()) + " sites, " +
                                                            std::to_string(h.incidence.links.size()) + " links, " +
                                                            std::to_string(h.carrier().universe.size()) +
                                                            " carrier elements"});
                for (std::size_t i = 0; i < vr.violations.size() && i < 3; ++i)
                    rep.witnesses.push_back({"pattern", vr.violations[i]});
            }
            if (q.coherent) add_coherence(rep, "coherent", is_coherent(h), false);
            if (q.simple) add_coherence(rep, "simple", is_simple(h), false);
            if (q.strong) add_coherence(rep, "strong", is_strongly_coherent(h), true);
            if (q.consistent) {
                GlobalConsistencyVerdict gc = is_globally_consistent(h);
                rep.verdicts.push_back({"consistent", gc.value});
                if (gc.value)
                    rep.witnesses.push_back({"consistent", std::to_string(approx(h).classes.size()) +
                                                               " overlap classes"});
                else
                    rep.witnesses.push_back({"consistent", gc.reason});
            }
        } else if (q.groupoid || q.acyclic != 0 || !q.compatible.empty()) {
            Groupoid g = groupoid_from_json(text);
            if (q.groupoid) {
                ValidationReport vr = validate_groupoid(g);
                rep.verdicts.push_back({"groupoid", vr.ok()});
                if (vr.ok())
                    rep.witnesses.push_back({"groupoid", std::to_string(g.elements.size()) + " elements over " +
                                                             std::to_string(g.incidence.sites.size()) + " sites"});
                for (std::size_t i = 0; i < vr.violations.size() && i < 3; ++i)
                    rep.witnesses.push_back({"groupoid", vr.violations[i]});
            }
            if (q.acyclic != 0) {
                Budget budget = default_budget();
                AcyclicityVerdict v = is_n_acyclic(g, q.acyclic, budget);
                if (v.witness) {
                    rep.verdicts.push_back({"acyclic", false});
                    rep.witnesses.push_back({"acyclic", render_cycle(*v.witness)});
                } else if (v.exhaustive) {
                    rep.verdicts.push_back({"acyclic", true});
                    rep.witnesses.push_back({"acyclic", "no coset cycle of length 2.." + std::to_string(q.acyclic)});
                } else {
                    rep.verdicts.push_back({"acyclic", std::nullopt});
                    rep.witnesses.push_back({"acyclic", "search budget exhausted before the cycle space"});
                }
            }
            if (!q.compatible.empty()) {
                std::string ptext = read_file(q.compatible);
                rep.inputs.push_back({q.compatible, digest(ptext)});
                AmalgamationPattern h = pattern_from_json(ptext);
                CompatibilityVerdict v = is_compatible(g, h);
                if (!v.value && v.witness) {
                    rep.verdicts.push_back({"compatible", false});
                    rep.witnesses.push_back({"compatible", "unit-valued walk " + walk_to_string(*v.witness) +
                                                               " moves a point"});
                } else if (v.value && v.complete) {
                    rep.verdicts.push_back({"compatible", true});
                    rep.witnesses.push_back({"compatible", "every unit-valued walk map restricts the identity"});
                } else {
                    rep.verdicts.push_back({"compatible", std::nullopt});
                    rep.witnesses.push_back({"compatible", "undecided within the walk-map cap"});
                }
            }
        } else if (q.hyp >= 0) {
            Hypergraph hg = hypergraph_from_json(text);
            HypAcyclicityVerdict v = q.hyp == 0 ? is_acyclic_hyp(hg) : is_n_acyclic_hyp(hg, q.hyp);
            rep.verdicts.push_back({"hyp", v.value});
            if (v.witness_cycle) rep.witnesses.push_back({"hyp", "chordless cycle " + render_ints(*v.witness_cycle)});
            if (v.witness_clique)
                rep.witnesses.push_back({"hyp", "clique " + render_ints(*v.witness_clique) + " not inside any hyperedge"});
            if (v.value)
                rep.witnesses.push_back({"hyp", q.hyp == 0 ? std::string("chordal and conformal")
                                                           : "chordal and conformal up to " + std::to_string(q.hyp)});
        } else {
            Realisation r = realisation_from_json(text);
            std::string ptext = read_file(q.realises);
            rep.inputs.push_back({q.realises, digest(ptext)});
            AmalgamationPattern h = pattern_from_json(ptext);
            ValidationReport vr = verify_realisation(r, h);
            if (!vr.ok()) {
                rep.verdicts.push_back({"realises", false});
                for (std::size_t i = 0; i < vr.violations.size() && i < 3; ++i)
                    rep.witnesses.push_back({"realises", vr.violations[i]});
            } else if (!vr.warnings.empty()) {
                rep.verdicts.push_back({"realises", std::nullopt});
                rep.witnesses.push_back({"realises", vr.warnings.front()});
            } else {
                rep.verdicts.push_back({"realises", true});
                rep.witnesses.push_back({"realises", std::to_string(r.charts.size()) + " charts over " +
                                                         std::to_string(r.structure.universe.size()) + " elements"});
            }
        }
    } catch (const ParseError& e) {
        rep.exit_code = 2;
        rep.witnesses.push_back({"parse-error", e.what()});
    } catch (const PreconditionError& e) {
        rep.exit_code = 2;
        rep.witnesses.push_back({"precondition", e.what()});
    } catch (const Error& e) {
        rep.exit_code = 2;
        rep.witnesses.push_back({"error", e.what()});
    }
    finalize(rep, t);
    return rep;
}

CommandReport run_build(const std::string& kind, const std::vector<std::string>& in, const std::string& out,
                        const std::string& group, int radius, int solve_n) {
    CommandReport rep;
    rep.command = "build " + kind;
    Timer t;
    try {
        auto need = [&](std::size_t n) {
            if (in.size() != n)
                throw PreconditionError("build " + kind + ": expected " + std::to_string(n) + " input file(s), got " +
                                        std::to_string(in.size()));
        };
        auto load = [&](std::size_t i) {
            std::string text = read_file(in[i]);
            rep.inputs.push_back({in[i], digest(text)});
            return text;
        };
        std::string artifact;
        if (kind == "product" || kind == "reduce") {
            need(2);
            AmalgamationPattern h = pattern_from_json(load(0));
            Groupoid g = groupoid_from_json(load(1));
            if (kind == "product") {
                DirectProduct dp = direct_product(h, g);
                ValidationReport vr = validate_pattern(dp.pattern);
                if (!vr.ok()) throw PreconditionError("product pattern failed validation: " + vr.violations.front());
                rep.verdicts.push_back({"pattern", true});
                rep.witnesses.push_back({"pattern", std::to_string(dp.pattern.incidence.sites.size()) + " sites, " +
                                                        std::to_string(dp.pattern.carrier().universe.size()) +
                                                        " carrier elements"});
                artifact = pattern_to_json(dp.pattern);
            } else {
                ReducedProduct rp = reduced_product(h, g);
                ValidationReport vr = verify_realisation(rp.realisation, h);
                if (!vr.ok())
                    throw PreconditionError("reduced product failed realisation checks: " + vr.violations.front());
                if (!vr.warnings.empty()) rep.budget_hit = true;
                rep.verdicts.push_back({"realises", true});
                rep.witnesses.push_back({"realises", std::to_string(rp.realisation.charts.size()) + " charts over " +
                                                         std::to_string(rp.realisation.structure.universe.size()) +
                                                         " elements"});
                artifact = realisation_to_json(rp.realisation);
            }
        } else if (kind == "quotient") {
            need(1);
            AmalgamationPattern h = pattern_from_json(load(0));
            Quotient q = quotient(h);
            rep.verdicts.push_back({"consistent", true});
            rep.witnesses.push_back({"consistent", std::to_string(q.realisation.structure.universe.size()) +
                                                       " quotient elements"});
            artifact = realisation_to_json(q.realisation);
        } else if (kind == "explode") {
            need(1);
            Hypergraph hg = hypergraph_from_json(load(0));
            ExplodedView ev = exploded_view_hyp(hg);
            ValidationReport vr = validate_pattern(ev.pattern);
            if (!vr.ok()) throw PreconditionError("exploded view failed validation: " + vr.violations.front());
            rep.verdicts.push_back({"pattern", true});
            rep.witnesses.push_back({"pattern", std::to_string(ev.pattern.incidence.sites.size()) + " sites"});
            artifact = pattern_to_json(ev.pattern);
        } else if (kind == "cover") {
            need(2);
            Realisation r = realisation_from_json(load(0));
            Hypergraph base = hypergraph_from_json(load(1));
            HypergraphCovering cov = covering_from_realisation(r, base);
            ValidationReport vr = verify_hyp_covering(cov);
            if (!vr.ok()) throw PreconditionError("covering failed verification: " + vr.violations.front());
            rep.verdicts.push_back({"covering", true});
            rep.witnesses.push_back({"covering", std::to_string(cov.up.vertices.size()) + " vertices over " +
                                                     std::to_string(cov.down.vertices.size())});
            artifact = hyp_covering_to_json(cov);
        } else if (kind == "truncate") {
            need(1);
            if (radius < 0) throw PreconditionError("truncate: radius must be >= 0");
            AmalgamationPattern h = pattern_from_json(load(0));
            TruncatedRealisation tr = canonical_truncated(h, radius);
            ValidationReport vr = validate_structure(tr.realisation.structure);
            if (!vr.ok()) throw Error("truncate: internal error: " + vr.violations.front());
            std::size_t interior = 0;
            for (bool b : tr.interior)
                if (b) ++interior;
            rep.verdicts.push_back({"truncation", true});
            rep.witnesses.push_back({"truncation", std::to_string(tr.realisation.charts.size()) + " charts, " +
                                                       std::to_string(interior) + " interior"});
            artifact = truncation_to_json(tr);
        } else if (kind == "eppa-solve") {
            need(1);
            EppaInstance inst = instance_from_json(load(0));
            Groupoid user_groupoid;
            GroupoidSupply supply;
            if (!group.empty()) {
                std::string gt = read_file(group);
                rep.inputs.push_back({group, digest(gt)});
                user_groupoid = groupoid_from_json(gt);
                supply.user = &user_groupoid;
            }
            Budget budget = default_budget();
            EppaSolution sol = solve(inst, solve_n, supply, budget);
            ValidationReport vr = verify_solution(inst, sol);
            if (!vr.ok()) throw Error("eppa-solve: internal error: " + vr.violations.front());
            if (budget.exhausted()) rep.budget_hit = true;
            rep.verdicts.push_back({"solution", true});
            rep.witnesses.push_back({"solution", std::to_string(sol.realisation.structure.universe.size()) +
                                                     " elements, " + std::to_string(sol.automorphisms.size()) +
                                                     " extended automorphisms"});
            artifact = solution_to_json(sol);
        } else {
            throw PreconditionError("build: unknown kind '" + kind + "'");
        }

        write_file(out, artifact);
        rep.witnesses.push_back({"output", out + " " + digest(artifact)});
        std::string back = read_file(out);
        bool round_trip = true;
        if (kind == "product" || kind == "explode")
            round_trip = pattern_to_json(pattern_from_json(back)) == artifact;
        else if (kind == "reduce" || kind == "quotient")
            round_trip = realisation_to_json(realisation_from_json(back)) == artifact;
        else if (kind == "cover")
            round_trip = hyp_covering_to_json(hyp_covering_from_json(back)) == artifact;
        else if (kind == "eppa-solve")
            round_trip = solution_to_json(solution_from_json(back)) == artifact;
        else if (kind == "truncate")
            realisation_from_json(back);  // truncation files re-parse as realisations
        rep.verdicts.push_back({"round-trip", round_trip});
    } catch (const ParseError& e) {
        rep.exit_code = 2;
        rep.witnesses.push_back({"parse-error", e.what()});
    } catch (const PreconditionError& e) {
        rep.exit_code = 2;
        rep.witnesses.push_back({"precondition", e.what()});
    } catch (const Error& e) {
        rep.exit_code = 2;
        rep.witnesses.push_back({"error", e.what()});
    }
    finalize(rep, t);
    return rep;
}

CommandReport run_fuzz(const std::string& suite, std::size_t count, std::uint64_t seed) {
    CommandReport rep;
    rep.command = "fuzz " + suite;
    Timer t;
    auto add = [&](const std::string& name, const FuzzReport& fr) {
        rep.verdicts.push_back({name, fr.ok()});
        rep.witnesses.push_back({name, std::to_string(fr.instances) + " instances checked"});
        for (std::size_t i = 0; i < fr.violations.size() && i < 5; ++i) rep.witnesses.push_back({name, fr.violations[i]});
    };
    bool all = suite == "all";
    if (all || suite == "hierarchy") add("hierarchy", fuzz_consistency_hierarchy(count, seed));
    if (all || suite == "closure") add("closure", fuzz_closure_oracle(count, seed));
    if (all || suite == "quotient") add("quotient", fuzz_quotient_realisation(count, seed));
    if (all || suite == "products") {
        Budget budget = default_budget();
        std::vector<PoolEntry> pool = product_pool(std::min<std::size_t>(count, 60), seed, budget);
        rep.witnesses.push_back({"products", std::to_string(pool.size()) + " pattern-groupoid pairs"});
        add("product-coherence", check_product_coherence(pool));
        add("reduced-products", check_reduced_product_realisations(pool));
        add("atlas-acyclicity", check_atlas_acyclicity(pool));
        if (budget.exhausted()) rep.budget_hit = true;
    }
    if (all || suite == "coverings") {
        Budget budget = default_budget();
        add("coverings", fuzz_hypergraph_coverings(std::min<std::size_t>(count, 60), seed, budget));
        if (budget.exhausted()) rep.budget_hit = true;
    }
    finalize(rep, t);
    return rep;
}

CommandReport run_bench() {
    CommandReport rep;
    rep.command = "bench";
    Timer t;
    auto time_it = [&](const std::string& name, auto&& fn) {
        Timer inner;
        fn();
        rep.witnesses.push_back({name, std::to_string(inner.ms()) + " ms"});
    };
    time_it("closure-x20", [] {
        std::mt19937 rng(7);
        FuzzBounds b;
        for (int i = 0; i < 20; ++i) closure(random_pattern(rng, b));
    });
    time_it("graham-all-4-3", [] {
        for (const Hypergraph& hg : all_hypergraphs(4, 3)) graham_reduce(hg);
    });
    time_it("reduced-product-pool-3", [] {
        Budget budget = default_budget();
        for (const PoolEntry& e : product_pool(3, 11, budget))
            if (e.n_acyclic >= 2) reduced_product(e.h, e.g);
    });
    rep.verdicts.push_back({"bench", true});
    finalize(rep, t);
    return rep;
}

void emit(const std::vector<CommandReport>& reports, bool json_mode) {
    std::cout << (json_mode ? report_to_json(reports) : report_to_text(reports));
}

}  // namespace

int worse_exit(int a, int b) {
    auto rank = [](int c) {
        switch (c) {
            case 2: return 3;
            case 3: return 2;
            case 1: return 1;
            default: return 0;
        }
    };
    return rank(a) >= rank(b) ? a : b;
}

std::string report_to_json(const std::vector<CommandReport>& reports) {
    nlohmann::json arr = nlohmann::json::array();
    for (const CommandReport& rep : reports) {
        nlohmann::json j;
        j["command"] = rep.command;
        j["inputs"] = nlohmann::json::array();
        for (const auto& in : rep.inputs) j["inputs"].push_back({{"path", in.path}, {"digest", in.digest}});
        j["verdicts"] = nlohmann::json::array();
        for (const auto& v : rep.verdicts) {
            nlohmann::json jv;
            jv["name"] = v.name;
            if (v.value)
                jv["value"] = *v.value;
            else
                jv["value"] = nullptr;
            j["verdicts"].push_back(jv);
        }
        j["witnesses"] = nlohmann::json::array();
        for (const auto& w : rep.witnesses) j["witnesses"].push_back({{"name", w.name}, {"detail", w.detail}});
        j["elapsed_ms"] = rep.elapsed_ms;
        j["budget_hit"] = rep.budget_hit;
        j["exit_code"] = rep.exit_code;
        arr.push_back(j);
    }
    return arr.dump(2) + "\n";
}

std::string report_to_text(const std::vector<CommandReport>& reports) {
    std::string out;
    for (const CommandReport& rep : reports) {
        out += "== " + rep.command;
        for (const auto& in : rep.inputs) out += " " + in.path;
        out += "\n";
        for (const auto& v : rep.verdicts)
            out += v.name + " = " + (v.value ? (*v.value ? "true" : "false") : "unknown") + "\n";
        for (const auto& w : rep.witnesses) out += w.name + ": " + w.detail + "\n";
        if (rep.budget_hit) out += "budget: exhausted\n";
        out += "elapsed: " + std::to_string(rep.elapsed_ms) + " ms\n";
        out += "exit: " + std::to_string(rep.exit_code) + "\n";
    }
    return out;
}

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"finite amalgamation patterns, groupoids, coverings and partial-automorphism extension"};
    app.require_subcommand(1);
    bool json_mode = false;

    auto* check = app.add_subcommand("check", "run verdict checks on artifact files");
    std::vector<std::string> check_inputs;
    CheckRequest q;
    check->add_option("inputs", check_inputs, "artifact files, one report each")->required();
    check->add_flag("--json", json_mode, "machine-readable report");
    check->add_flag("--pattern", q.pattern, "validate an amalgamation pattern");
    check->add_flag("--coherent", q.coherent, "loop walk maps restrict the identity");
    check->add_flag("--simple", q.simple, "links extend the parallel walk maps");
    check->add_flag("--strong", q.strong, "walk-map pairs admit common extensions");
    check->add_flag("--consistent", q.consistent, "overlap quotient is charted isomorphically");
    check->add_flag("--groupoid", q.groupoid, "validate a groupoid");
    check->add_option("--acyclic", q.acyclic, "coset acyclicity level (>= 2), groupoid input");
    check->add_option("--compatible", q.compatible, "pattern file; compatibility of the groupoid input");
    check->add_option("--hyp", q.hyp, "hypergraph acyclicity level (0 = full)");
    check->add_option("--realises", q.realises, "pattern file; realisation input is checked against it");

    auto* build = app.add_subcommand("build", "construct, verify and write derived artifacts");
    std::string kind;
    std::vector<std::string> build_inputs;
    std::string out_path;
    std::string group_path;
    int radius = 0;
    int solve_n = 2;
    build->add_option("kind", kind, "product|reduce|quotient|explode|cover|truncate|eppa-solve")->required();
    build->add_option("inputs", build_inputs, "input artifact files")->required();
    build->add_option("-o,--out", out_path, "output file")->required();
    build->add_option("--group", group_path, "groupoid file supplied to eppa-solve");
    build->add_option("--radius", radius, "truncation radius (truncate)");
    build->add_option("--n-acyclic", solve_n, "acyclicity level for eppa-solve (default 2)");
    build->add_flag("--json", json_mode, "machine-readable report");

    auto* expo = app.add_subcommand("export-dot", "render an artifact as DOT");
    std::string export_input;
    std::string view;
    std::string export_out;
    expo->add_option("input", export_input, "artifact file")->required();
    expo->add_option("--view", view, "cayley|gaifman|atlas|covering")->required();
    expo->add_option("-o,--out", export_out, "output file (default stdout)");

    auto* fuzz = app.add_subcommand("fuzz", "randomized property suites");
    std::string suite;
    std::uint64_t seed = 1;
    std::size_t count = 200;
    fuzz->add_option("--suite", suite, "hierarchy|closure|quotient|products|coverings|all")->required();
    fuzz->add_option("--seed", seed, "generator seed (default 1)");
    fuzz->add_option("--count", count, "instances per suite (default 200)");
    fuzz->add_flag("--json", json_mode, "machine-readable report");

    auto* bench = app.add_subcommand("bench", "timing micro-suite");
    bench->add_flag("--json", json_mode, "machine-readable report");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (check->parsed()) {
        bool fam_pattern = q.pattern || q.coherent || q.simple || q.strong || q.consistent;
        bool fam_group = q.groupoid || q.acyclic != 0 || !q.compatible.empty();
        bool fam_hyp = q.hyp >= 0;
        bool fam_real = !q.realises.empty();
        int families = int(fam_pattern) + int(fam_group) + int(fam_hyp) + int(fam_real);
        if (families != 1) {
            std::cerr << "check: choose exactly one check family (pattern, groupoid, hypergraph or realisation)\n";
            return 2;
        }
        if (q.acyclic != 0 && q.acyclic < 2) {
            std::cerr << "check: --acyclic takes a level >= 2\n";
            return 2;
        }
        std::vector<CommandReport> reports(check_inputs.size());
        if (check_inputs.size() >= 2 && std::thread::hardware_concurrency() >= 2) {
            std::vector<std::future<CommandReport>> futs;
            futs.reserve(check_inputs.size());
            for (std::size_t i = 0; i < check_inputs.size(); ++i)
                futs.push_back(std::async(std::launch::async, [&check_inputs, &q, i] {
                    return run_check_one(check_inputs[i], q);
                }));
            for (std::size_t i = 0; i < futs.size(); ++i) reports[i] = futs[i].get();
        } else {
            for (std::size_t i = 0; i < check_inputs.size(); ++i) reports[i] = run_check_one(check_inputs[i], q);
        }
        emit(reports, json_mode);
        int code = 0;
        for (const auto& r : reports) code = worse_exit(code, r.exit_code);
        return code;
    }

    if (build->parsed()) {
        CommandReport rep = run_build(kind, build_inputs, out_path, group_path, radius, solve_n);
        emit({rep}, json_mode);
        return rep.exit_code;
    }

    if (expo->parsed()) {
        try {
            std::string text = read_file(export_input);
            std::string dot;
            if (view == "cayley")
                dot = cayley_dot(groupoid_from_json(text));
            else if (view == "gaifman")
                dot = gaifman_dot(hypergraph_from_json(text));
            else if (view == "atlas")
                dot = atlas_dot(realisation_from_json(text));
            else if (view == "covering")
                dot = covering_dot(hyp_covering_from_json(text));
            else {
                std::cerr << "export-dot: unknown view '" << view << "'\n";
                return 2;
            }
            if (export_out.empty())
                std::cout << dot;
            else
                write_file(export_out, dot);
            return 0;
        } catch (const Error& e) {
            std::cerr << "export-dot: " << e.what() << "\n";
            return 2;
        }
    }

    if (fuzz->parsed()) {
        static const std::vector<std::string> suites = {"hierarchy", "closure", "quotient",
                                                        "products", "coverings", "all"};
        if (std::find(suites.begin(), suites.end(), suite) == suites.end()) {
            std::cerr << "fuzz: unknown suite '" << suite << "'\n";
            return 2;
        }
        CommandReport rep = run_fuzz(suite, count, seed);
        emit({rep}, json_mode);
        return rep.exit_code;
    }

    CommandReport rep = run_bench();
    emit({rep}, json_mode);
    return rep.exit_code;
}

}  // namespace amalgam
