#pragma once

// Involutive analysis of solved-form systems: multiplicative variables,
// the involution test, completion with automatic coordinate changes on
// degenerate inputs, Cartan characters, solution space dimensions and the
// reduction to an equivalent first order system.
//
// Conventions: an equation whose order equals the system order q and whose
// leader has class i carries the multiplicative derivations d_1 .. d_i;
// equations of lower order carry none, so all their prolongations must be
// checked. A system is involutive when every non-multiplicative prolongation
// lies in the linear span of the multiplicative ones.

#include "invsys/groebner.hpp"
#include "invsys/system.hpp"

#include <random>

namespace invsys {

struct NonGenericSeed : std::runtime_error {
    NonGenericSeed()
        : std::runtime_error("no generic coordinates found (exhausted coordinate change retries)") {}
};

struct MaxRoundsExceeded : std::runtime_error {
    MaxRoundsExceeded()
        : std::runtime_error("completion did not terminate within the round limit") {}
};

inline std::vector<int> multiplicative_vars(const Equation& e, int system_order, int n) {
    std::vector<int> v;
    if (e.is_zero() || e.order() < system_order) return v;
    // an order-zero leader has the whole ring as its cone
    int cls = e.leading_jet().order() == 0 ? n : class_of(e.leading_jet().mu);
    for (int i = 1; i <= cls; ++i) v.push_back(i);
    (void)n;
    return v;
}

// span of the equations and their multiplicative prolongations up to the
// given order
inline Echelon multiplicative_span(const PDSystem& s, int up_to_order) {
    int q = s.order();
    Echelon ech(s.field.nvars());
    for (auto& e : s.eqs) {
        if (e.is_zero()) continue;
        ech.insert(e);
        std::vector<int> mult = multiplicative_vars(e, q, s.n);
        if (mult.empty()) continue;
        int cls = (int)mult.size(); // mult vars are 1..cls
        int o = e.order();
        for (int d = 1; d + o <= up_to_order; ++d)
            for (auto& nu : multi_indices_of_order(cls, d)) {
                Exponents full(s.n, 0);
                for (int i = 0; i < cls; ++i) full[i] = nu[i];
                ech.insert(prolong_multi(e, full));
            }
    }
    return ech;
}

// normal forms of all non-multiplicative prolongations that do not lie in
// the multiplicative span; empty iff the system is involutive
inline std::vector<Equation> involution_defects(const PDSystem& s) {
    int q = s.order();
    Echelon span = multiplicative_span(s, q + 1);
    std::vector<Equation> out;
    for (auto& e : s.eqs) {
        if (e.is_zero()) continue;
        std::vector<int> mult = multiplicative_vars(e, q, s.n);
        int first_nonmult = mult.empty() ? 1 : (int)mult.size() + 1;
        for (int i = first_nonmult; i <= s.n; ++i) {
            Equation nf = span.reduce(prolong(e, i));
            if (!nf.is_zero()) out.push_back(nf.normalized());
        }
    }
    return out;
}

inline bool involution_test(const PDSystem& s) { return involution_defects(s).empty(); }

namespace detail {

// random upper triangular unimodular change d_i -> d_i + sum_{j>i} c_ij d_j
inline std::vector<std::vector<Rational>> random_unimodular(int n, std::mt19937& rng) {
    std::uniform_int_distribution<int> dc(-3, 3);
    std::vector<std::vector<Rational>> C(n, std::vector<Rational>(n, 0));
    bool nontrivial = false;
    for (int i = 0; i < n; ++i) {
        C[i][i] = 1;
        for (int j = i + 1; j < n; ++j) {
            int v = dc(rng);
            C[i][j] = v;
            if (v != 0) nontrivial = true;
        }
    }
    if (!nontrivial && n > 1) C[0][n - 1] = 1;
    return C;
}

// quasi-stability of the module generated by the equations (a Groebner
// basis computation over the coefficient field)
inline bool generic_position(const PDSystem& s) {
    int fnv = s.field.nvars();
    std::vector<VP> gens;
    for (auto& e : s.eqs) {
        if (e.is_zero()) continue;
        VP v(MOrder{}, fnv);
        for (auto& [j, c] : e.terms()) v.add_term(MTerm{j.k, j.mu}, c);
        gens.push_back(v);
    }
    GBasis gb = groebner(gens, {}, fnv);
    return quasi_stable(gb.leading_terms(), s.n, s.m);
}

} // namespace detail

struct CompletionResult {
    PDSystem system;                               // involutive solved form
    std::vector<std::vector<Rational>> coord_change; // applied change (identity if none)
    bool changed_coordinates = false;
    int rounds = 0; // equations added during completion
};

inline PDSystem strip_zero_equations(PDSystem s) {
    std::vector<Equation> keep;
    for (auto& e : s.eqs)
        if (!e.is_zero()) keep.push_back(e);
    s.eqs = std::move(keep);
    return s;
}

inline CompletionResult complete(const PDSystem& input, unsigned seed = 0,
                                 int max_rounds = 50, int max_retries = 5) {
    CompletionResult res;
    res.coord_change.assign(input.n, std::vector<Rational>(input.n, 0));
    for (int i = 0; i < input.n; ++i) res.coord_change[i][i] = 1;

    PDSystem s = strip_zero_equations(autoreduce(input));
    if (s.eqs.empty()) {
        res.system = s;
        return res;
    }

    // the leading module only admits a finite involutive basis in generic
    // coordinates; fix degenerate inputs with a seeded triangular change
    std::mt19937 rng(seed);
    int tries = 0;
    while (!detail::generic_position(s)) {
        if (++tries > max_retries) throw NonGenericSeed();
        auto C = detail::random_unimodular(input.n, rng);
        s = strip_zero_equations(autoreduce(apply_coordinate_change(s, C)));
        // track the composite change: new d = C' applied after previous
        std::vector<std::vector<Rational>> comp(input.n, std::vector<Rational>(input.n, 0));
        for (int i = 0; i < input.n; ++i)
            for (int j = 0; j < input.n; ++j)
                for (int k = 0; k < input.n; ++k)
                    comp[i][j] += res.coord_change[i][k] * C[k][j];
        res.coord_change = comp;
        res.changed_coordinates = true;
    }

    JetLess less;
    while (true) {
        std::vector<Equation> defects = involution_defects(s);
        if (defects.empty()) break;
        if (++res.rounds > max_rounds) throw MaxRoundsExceeded();
        // add the defect with the smallest leader; ties cannot occur with
        // distinct normal forms against the same span, but pick the first
        const Equation* best = &defects[0];
        for (auto& d : defects)
            if (less(d.leading_jet(), best->leading_jet())) best = &d;
        s.eqs.push_back(*best);
        s = strip_zero_equations(autoreduce(s));
    }

    // drop equations that other equations' multiplicative prolongations
    // already cover
    for (size_t i = 0; i < s.eqs.size();) {
        PDSystem rest = s;
        rest.eqs.erase(rest.eqs.begin() + (long)i);
        if (!rest.eqs.empty() &&
            multiplicative_span(rest, s.eqs[i].order()).reduce(s.eqs[i]).is_zero() &&
            involution_test(rest)) {
            s = rest;
        } else {
            ++i;
        }
    }

    res.system = s;
    return res;
}

// number of multi-indices of length n, order q and class i
inline int class_count(int n, int q, int i) {
    int c = 0;
    for (auto& mu : multi_indices_of_order(n, q))
        if (exp_degree(mu) > 0 && class_of(mu) == i) ++c;
    return c;
}

// Cartan characters alpha^1..alpha^n of an involutive system
inline std::vector<long> characters(const PDSystem& s) {
    // an order-zero system carries no symbol data; its prolongation to order
    // one yields the characters of the surviving free unknowns
    int q = std::max(s.order(), 1);
    std::vector<long> beta(s.n + 1, 0);
    Echelon span = prolongation_span(s, q);
    for (auto& [lead, row] : span.rows())
        if (lead.order() == q) beta[class_of(lead.mu)] += 1;
    std::vector<long> alpha(s.n);
    for (int i = 1; i <= s.n; ++i)
        alpha[i - 1] = (long)s.m * class_count(s.n, q, i) - beta[i];
    return alpha;
}

// codimension: number of trailing zero characters
inline int codimension_from_characters(const std::vector<long>& alpha) {
    int r = 0;
    for (int i = (int)alpha.size() - 1; i >= 0 && alpha[i] == 0; --i) ++r;
    return r;
}

inline int codimension(const PDSystem& s) {
    return codimension_from_characters(characters(s));
}

// the whole module is torsion iff the top-order leaders exhaust all class-n
// jets (the count of class-n equations equals m)
inline bool full_torsion_test(const PDSystem& s) {
    int q = std::max(s.order(), 1);
    long beta_n = 0;
    Echelon span = prolongation_span(s, q);
    for (auto& [lead, row] : span.rows())
        if (lead.order() == q && class_of(lead.mu) == s.n) ++beta_n;
    return beta_n == (long)s.m * class_count(s.n, q, s.n);
}

// parametric jets of the given order for an involutive system
inline std::vector<Jet> parametric_jets(const PDSystem& s, int order) {
    int q = s.order();
    std::vector<Jet> out;
    if (order <= q) {
        Echelon span = prolongation_span(s, order);
        for (auto& mu : multi_indices_of_order(s.n, order))
            for (int k = 1; k <= s.m; ++k) {
                Jet j{k, mu};
                if (span.rows().find(j) == span.rows().end()) out.push_back(j);
            }
        return out;
    }
    // beyond q the principal jets form the disjoint union of the cones of
    // the order-q leaders
    std::vector<Jet> leaders;
    Echelon span = prolongation_span(s, q);
    for (auto& [lead, row] : span.rows())
        if (lead.order() == q) leaders.push_back(lead);
    for (auto& mu : multi_indices_of_order(s.n, order))
        for (int k = 1; k <= s.m; ++k) {
            bool principal = false;
            for (auto& l : leaders) {
                if (l.k != k) continue;
                int cls = l.order() == 0 ? s.n : class_of(l.mu);
                bool fits = true;
                for (int v = 0; v < s.n; ++v) {
                    int diff = mu[v] - l.mu[v];
                    if (diff < 0 || (diff > 0 && v >= cls)) { fits = false; break; }
                }
                if (fits) { principal = true; break; }
            }
            if (!principal) out.push_back(Jet{k, mu});
        }
    return out;
}

// dimensions of the symbol (parametric jets of exactly order s) and the
// cumulative solution space dimension per order 0..q_max
struct SymbolDims {
    std::vector<long> symbol; // dim g_s
    std::vector<long> total;  // dim R_s = sum of dim g_t for t <= s
};

inline SymbolDims hilbert_dims(const PDSystem& s, int q_max) {
    SymbolDims out;
    long acc = 0;
    for (int t = 0; t <= q_max; ++t) {
        long d = (long)parametric_jets(s, t).size();
        acc += d;
        out.symbol.push_back(d);
        out.total.push_back(acc);
    }
    return out;
}

// the characteristic matrix: row per top-order equation, column per unknown,
// entry = symbol part as a polynomial in chi_1..chi_n with field coefficients
using ChiPoly = std::map<Exponents, RatFun, DegRevLexLess>;

inline std::vector<std::vector<ChiPoly>> characteristic_matrix(const PDSystem& s) {
    int q = s.order();
    std::vector<std::vector<ChiPoly>> M;
    for (auto& e : s.eqs) {
        if (e.is_zero() || e.order() < q) continue;
        std::vector<ChiPoly> row(s.m);
        for (auto& [j, c] : e.terms())
            if (j.order() == q) row[j.k - 1][j.mu] = c;
        M.push_back(row);
    }
    return M;
}

// equivalent first order system: one unknown z_u per parametric jet u of
// order <= q, one equation d_i z_u = sum c_v z_v per parametric u of order
// < q and direction i, where the right side is the normal form of u + 1_i
struct FirstOrderForm {
    PDSystem system;          // first order, m = number of parametric jets
    std::vector<Jet> unknowns; // unknown t corresponds to unknowns[t-1]
};

inline FirstOrderForm spencer_form(const PDSystem& s) {
    int q = s.order();
    FirstOrderForm out;
    std::map<Jet, int, JetLess> index; // 1-based new unknown index
    for (int t = 0; t <= q; ++t)
        for (auto& u : parametric_jets(s, t)) {
            out.unknowns.push_back(u);
            index[u] = (int)out.unknowns.size();
        }
    out.system.n = s.n;
    out.system.m = (int)out.unknowns.size();
    out.system.field = s.field;
    int fnv = s.field.nvars();
    for (auto& u : out.unknowns) {
        if (u.order() >= q) continue;
        for (int i = 1; i <= s.n; ++i) {
            Jet shifted{u.k, mu_plus(u.mu, i)};
            Equation probe(fnv);
            probe.add_term(shifted, RatFun(fnv, 1));
            Equation nf = prolongation_span(s, shifted.order()).reduce(probe);
            Equation fo(fnv);
            Exponents ei(s.n, 0);
            ei[i - 1] = 1;
            fo.add_term(Jet{index.at(u), ei}, RatFun(fnv, 1));
            for (auto& [v, c] : nf.terms())
                fo.add_term(Jet{index.at(v), Exponents(s.n, 0)}, -c);
            out.system.eqs.push_back(fo);
        }
    }
    return out;
}

} // namespace invsys
