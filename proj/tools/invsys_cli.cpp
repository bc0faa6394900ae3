// Command line front end: parse a PD system, run the requested analysis
// stages, and print a deterministic report (text or JSON).

#include "invsys/dual.hpp"
#include "invsys/io.hpp"
#include "invsys/localize.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <variant>

using namespace invsys;
using nlohmann::ordered_json;

namespace {

struct Options {
    std::string command;
    std::string input;
    unsigned seed = 0;
    int max_order = -1;
    int max_rounds = 50;
    std::string format = "text";
    std::vector<std::string> sets;
};

std::string read_input(const std::string& path) {
    if (path == "-") {
        std::ostringstream ss;
        ss << std::cin.rdbuf();
        return ss.str();
    }
    std::ifstream in(path);
    if (!in) throw ParseError(0, "cannot open input file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// jet coefficient atoms of modular equations print as a^(mu) or a^(mu)_k
std::string modular_atom(const Jet& j, int m) {
    std::string s = "a^(";
    for (size_t i = 0; i < j.mu.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(j.mu[i]);
    }
    s += ")";
    if (m > 1) s += "_" + std::to_string(j.k);
    return s;
}

std::string modular_to_string(const Equation& e, int m,
                              const std::vector<std::string>& names) {
    if (e.is_zero()) return "0";
    std::string s;
    bool first = true;
    for (auto it = e.terms().rbegin(); it != e.terms().rend(); ++it) {
        RatFun c = it->second;
        bool neg = c.is_constant() && c.constant_value() < 0;
        if (neg) c = -c;
        if (first) {
            if (neg) s += "-";
            first = false;
        } else {
            s += neg ? " - " : " + ";
        }
        bool unit = c.is_constant() && c.constant_value() == 1;
        if (!unit) {
            std::string cs = ratfun_to_string(c, names);
            if (!c.is_constant() && c.num().terms().size() > 1 && c.is_polynomial())
                cs = "(" + cs + ")";
            s += cs + "*";
        }
        s += modular_atom(it->first, m);
    }
    return s;
}

std::string exponent_tuple(const Exponents& e) {
    std::string s = "(";
    for (size_t i = 0; i < e.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(e[i]);
    }
    return s + ")";
}

struct Reporter {
    ordered_json j;
    std::vector<std::string> lines;

    void line(const std::string& s) { lines.push_back(s); }
};

std::vector<int> class_counts(const PDSystem& s) {
    int q = s.order();
    std::vector<int> counts(s.n, 0);
    for (auto& e : s.eqs) {
        if (e.is_zero() || e.order() != q) continue;
        Jet lead = e.leading_jet();
        int cls = lead.order() == 0 ? s.n : class_of(lead.mu);
        ++counts[cls - 1];
    }
    return counts;
}

ordered_json equations_json(const std::vector<Equation>& eqs, int m,
                            const std::vector<std::string>& names) {
    ordered_json a = ordered_json::array();
    for (auto& e : eqs) a.push_back(equation_to_string(e, m, names));
    return a;
}

void report_involution(Reporter& rep, const CompletionResult& comp) {
    const PDSystem& s = comp.system;
    auto names = s.field.var_names();
    ordered_json f;
    f["rounds"] = comp.rounds;
    f["changed_coordinates"] = comp.changed_coordinates;
    if (comp.changed_coordinates) {
        ordered_json rows = ordered_json::array();
        for (auto& r : comp.coord_change) {
            ordered_json row = ordered_json::array();
            for (auto& c : r) row.push_back(to_string(c));
            rows.push_back(row);
        }
        f["coordinate_change"] = rows;
    }
    f["order"] = s.order();
    f["class_counts"] = class_counts(s);
    f["system"] = system_to_json(s);
    rep.j["involution"] = f;

    rep.line("involutive system (after " + std::to_string(comp.rounds) + " completion rounds):");
    for (auto& e : s.eqs) rep.line("  " + equation_to_string(e, s.m, names) + " = 0");
    auto cc = class_counts(s);
    std::string cs = "class counts:";
    for (int i = s.n; i >= 1; --i)
        cs += " class " + std::to_string(i) + ": " + std::to_string(cc[i - 1]);
    rep.line(cs);
    if (comp.changed_coordinates) rep.line("note: a coordinate change was applied");
}

void report_characters(Reporter& rep, const PDSystem& inv) {
    auto alpha = characters(inv);
    int r = codimension_from_characters(alpha);
    int q = std::max(inv.order(), 1);
    SymbolDims dims = hilbert_dims(inv, q);
    ordered_json f;
    f["order"] = q;
    f["characters"] = alpha;
    f["codimension"] = r;
    f["symbol_dimensions"] = dims.symbol;
    f["solution_dimensions"] = dims.total;
    rep.j["characters"] = f;

    std::string s = "characters: (";
    for (size_t i = 0; i < alpha.size(); ++i) {
        if (i) s += ", ";
        s += std::to_string(alpha[i]);
    }
    rep.line(s + "), codimension " + std::to_string(r));
}

void report_purity(Reporter& rep, const PurityResult& p, const PDSystem& inv) {
    auto names = inv.field.var_names();
    ordered_json f;
    f["pure"] = p.pure;
    f["codimension"] = p.r;
    f["witnesses"] = equations_json(p.witnesses, inv.m, names);
    rep.j["purity"] = f;

    if (p.pure) {
        rep.line("pure of codimension " + std::to_string(p.r));
    } else {
        rep.line("impure (codimension " + std::to_string(p.r) + "); torsion witnesses:");
        for (auto& w : p.witnesses)
            rep.line("  " + equation_to_string(w, inv.m, names) + " = 0");
    }
}

void report_chain(Reporter& rep, const TorsionChainReport& chain, const PDSystem& inv) {
    auto names = inv.field.var_names();
    ordered_json levels = ordered_json::array();
    for (auto& l : chain.levels) {
        ordered_json lv;
        lv["r"] = l.r;
        lv["generators"] = equations_json(l.generators, inv.m, names);
        lv["codimensions"] = l.codims;
        lv["equals_next"] = l.equals_next;
        levels.push_back(lv);
        std::string s = "t_" + std::to_string(l.r) + ":";
        if (l.generators.empty()) s += " no new generators";
        for (size_t i = 0; i < l.generators.size(); ++i)
            s += " " + equation_to_string(l.generators[i], inv.m, names) +
                 " (codim " + std::to_string(l.codims[i]) + ")";
        if (l.equals_next) s += " [equals the next level]";
        rep.line(s);
    }
    rep.j["torsion_chain"] = ordered_json{{"levels", levels}};
}

void report_parametrization(Reporter& rep, const ParametrizeResult& res, const PDSystem& inv) {
    if (std::holds_alternative<Simplification>(res)) {
        const Simplification& s = std::get<Simplification>(res);
        auto names = inv.field.var_names();
        // the factor lives over the full frequency variables
        auto all = FieldInfo{inv.field.params, inv.n}.var_names();
        ordered_json f;
        f["witness"] = equation_to_string(s.witness, inv.m, names);
        f["factor"] = poly_to_string(s.factor, all);
        rep.j["simplification"] = f;
        rep.line("no parametrization: torsion witness " +
                 equation_to_string(s.witness, inv.m, names) + " with factor " +
                 poly_to_string(s.factor, all));
        return;
    }
    const Parametrization& p = std::get<Parametrization>(res);
    auto names = p.field.var_names();
    ordered_json f;
    f["free_unknowns"] = p.free_unknowns;
    ordered_json rows = ordered_json::array();
    for (auto& r : p.rows) {
        ordered_json row = ordered_json::array();
        for (auto& c : r) row.push_back(poly_to_string(c, names));
        rows.push_back(row);
    }
    f["rows"] = rows;
    rep.j["parametrization"] = f;
    std::string fu = "parametrization with free unknowns:";
    for (int u : p.free_unknowns) fu += " y" + std::to_string(u);
    rep.line(fu);
    for (size_t i = 0; i < p.rows.size(); ++i) {
        std::string s = "  y" + std::to_string(i + 1) + " <-";
        for (auto& c : p.rows[i]) s += " [" + poly_to_string(c, names) + "]";
        rep.line(s);
    }
}

// localized dual space fragments; returns false when the eigenvalue search
// leaves the coefficient field
bool report_dual(Reporter& rep, const DualSpace& R, int split,
                 std::vector<std::string>& warnings) {
    auto names = R.system.field.var_names();
    ordered_json f;
    f["split_directions"] = split;
    f["dimension"] = R.dim();
    ordered_json basis = ordered_json::array();
    for (auto& j : R.basis) basis.push_back(jet_to_string(j, R.system.m));
    f["basis"] = basis;
    rep.line("dual space dimension " + std::to_string(R.dim()) + " (" +
             std::to_string(split) + " split directions)");

    MaximalPointList pts;
    try {
        pts = maximal_points(R);
    } catch (const NonRationalEigenvalue& e) {
        rep.j["dual"] = f;
        warnings.push_back(std::string(e.what()) + "; point analysis aborted");
        return false;
    }
    ordered_json pj = ordered_json::array();
    for (auto& p : pts.points) {
        ordered_json one;
        ordered_json vals = ordered_json::array();
        std::string vtxt;
        for (size_t i = 0; i < p.c.size(); ++i) {
            vals.push_back(ratfun_to_string(p.c[i], names));
            if (i) vtxt += ", ";
            vtxt += ratfun_to_string(p.c[i], names);
        }
        one["values"] = vals;
        one["multiplicity"] = p.multiplicity;
        auto soc = socle(R, p);
        one["socle"] = equations_json(soc, R.system.m, names);
        auto top = top_component(R, p);
        ordered_json tj = ordered_json::array();
        for (auto& t : top)
            tj.push_back(modular_to_string(section_equation(R, t, R.order), R.system.m, names));
        one["top"] = tj;
        pj.push_back(one);
        rep.line("point (" + vtxt + "): multiplicity " + std::to_string(p.multiplicity) +
                 ", socle dim " + std::to_string(soc.size()));
    }
    f["points"] = pj;
    ordered_json bc = ordered_json::array();
    for (auto& c : pts.branch_conditions) {
        bc.push_back(poly_to_string(c, names));
        warnings.push_back("assuming " + poly_to_string(c, names) + " != 0");
    }
    f["branch_conditions"] = bc;
    rep.j["dual"] = f;
    return true;
}

void report_generators(Reporter& rep, const DualSpace& R, const MinGenerators& g) {
    auto names = R.system.field.var_names();
    ordered_json f;
    f["count"] = g.count;
    ordered_json secs = ordered_json::array();
    for (auto& s : g.sections) secs.push_back(modular_to_string(s, R.system.m, names));
    f["sections"] = secs;
    ordered_json bc = ordered_json::array();
    for (auto& c : g.branch_conditions) bc.push_back(poly_to_string(c, names));
    f["branch_conditions"] = bc;
    rep.j["generators"] = f;

    rep.line("minimal generators: " + std::to_string(g.count));
    for (auto& s : g.sections)
        rep.line("  E = " + modular_to_string(s, R.system.m, names));
    for (auto& c : g.branch_conditions)
        rep.line("  branch condition: " + poly_to_string(c, names) + " != 0");
}

void report_delocalization(Reporter& rep, const DualSpace& R, const MinGenerators& g,
                           const PDSystem& orig, int max_order) {
    if (R.system.field.nchi == 0) return;
    std::vector<std::string> pnames = orig.field.params;
    ordered_json all = ordered_json::array();
    for (size_t t = 0; t < g.coords.size(); ++t) {
        Delocalization base = delocalize(g.sections[t], R, R.order);
        // with negative delta the generating component E_(q',..,q') only
        // shows up above the derivate bound itself
        int up_to = max_order >= 0 ? max_order
                                   : base.order_bound - std::min(base.delta, 0);
        Equation E = section_equation(R, g.coords[t], up_to);
        Delocalization d = delocalize(E, R, up_to);
        ordered_json f;
        f["order_bound"] = d.order_bound;
        f["delta"] = d.delta;
        f["tau"] = d.tau;
        ordered_json comps;
        for (auto& [alpha, eq] : d.components)
            comps[exponent_tuple(alpha)] = modular_to_string(eq, orig.m, pnames);
        f["components"] = comps;
        all.push_back(f);
        rep.line("delocalized generator " + std::to_string(t + 1) + " (order bound " +
                 std::to_string(d.order_bound) + "):");
        for (auto& [alpha, eq] : d.components)
            rep.line("  E_" + exponent_tuple(alpha) + " = " +
                     modular_to_string(eq, orig.m, pnames));
    }
    rep.j["delocalization"] = all;
}

int run(const Options& opt) {
    PDSystem input = parse_system(read_input(opt.input));
    if (!opt.sets.empty()) {
        std::vector<std::pair<std::string, Rational>> vals;
        for (auto& s : opt.sets) {
            size_t eq = s.find('=');
            if (eq == std::string::npos)
                throw ParseError(0, "bad --set argument '" + s + "' (expected name=value)");
            vals.emplace_back(s.substr(0, eq), rational_from_string(s.substr(eq + 1)));
        }
        try {
            input = specialize_params(input, vals);
        } catch (const std::invalid_argument& e) {
            throw ParseError(0, e.what());
        }
    }

    Reporter rep;
    rep.j["schema"] = 1;
    rep.j["command"] = opt.command;
    rep.j["seed"] = opt.seed;
    rep.j["input"] = system_to_json(input);
    std::vector<std::string> warnings;

    CompletionResult comp = complete(input, opt.seed, opt.max_rounds);
    PDSystem inv = comp.system;
    if (comp.changed_coordinates)
        warnings.push_back("a random coordinate change was applied during completion");

    bool want_all = opt.command == "full";
    if (opt.command == "complete" || want_all) report_involution(rep, comp);
    if (opt.command == "characters" || want_all) report_characters(rep, inv);

    if (opt.command == "purity" || want_all) {
        PurityResult p = purity_test(inv, opt.seed);
        report_purity(rep, p, inv);
        if (want_all && !p.pure) {
            report_chain(rep, torsion_chain(inv, opt.seed), inv);
            // continue the generator pipeline on the pure part
            Contraction con = contract_full(inv, p.r, false, opt.seed);
            CompletionResult pcomp = complete(con.system, opt.seed, opt.max_rounds);
            inv = pcomp.system;
            rep.j["pure_part"] = system_to_json(inv);
            warnings.push_back("input is impure; the inverse system below is that of the pure part");
            rep.line("continuing on the pure part:");
            auto names = inv.field.var_names();
            for (auto& e : inv.eqs) rep.line("  " + equation_to_string(e, inv.m, names) + " = 0");
        }
    }

    if (opt.command == "torsion-chain")
        report_chain(rep, torsion_chain(inv, opt.seed), inv);

    if (opt.command == "parametrize")
        report_parametrization(rep, parametrize(inv), inv);

    bool want_dual = opt.command == "inverse-system" || opt.command == "generators" || want_all;
    if (want_dual) {
        int r = codimension(inv);
        if (r == 0) {
            warnings.push_back("module has codimension 0; nothing to localize");
        } else {
            LocalizedSystem loc = localize(inv, r);
            DualSpace R = build_dual(loc.system, opt.seed);
            if (report_dual(rep, R, inv.n - r, warnings) &&
                (opt.command != "inverse-system")) {
                MinGenerators g = min_generators(R);
                report_generators(rep, R, g);
                if (want_all) report_delocalization(rep, R, g, input, opt.max_order);
            }
        }
    }

    rep.j["warnings"] = warnings;
    if (opt.format == "json") {
        std::cout << rep.j.dump(2) << "\n";
    } else {
        for (auto& l : rep.lines) std::cout << l << "\n";
        for (auto& w : warnings) std::cout << "warning: " << w << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact analysis of linear PD systems with constant coefficients"};
    app.require_subcommand(1);
    Options opt;
    const char* commands[] = {"complete",    "characters",  "purity",
                              "torsion-chain", "parametrize", "inverse-system",
                              "generators",  "full"};
    for (const char* c : commands) {
        CLI::App* sub = app.add_subcommand(c);
        sub->add_option("input", opt.input, "system file (DSL or JSON), '-' for stdin")
            ->required();
        sub->add_option("--seed", opt.seed, "seed for coordinate changes");
        sub->add_option("--max-order", opt.max_order, "cap on the delocalization order");
        sub->add_option("--max-rounds", opt.max_rounds, "completion round limit");
        sub->add_option("--format", opt.format, "output format")
            ->check(CLI::IsMember({"json", "text"}));
        sub->add_option("--set", opt.sets, "fix a parameter, e.g. --set a=0");
        sub->callback([&opt, c]() { opt.command = c; });
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    try {
        return run(opt);
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error (" << opt.command << "): " << e.what() << "\n";
        return 3;
    }
}
