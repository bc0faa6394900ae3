#pragma once

// Finite-type systems have a finite-dimensional space of formal solutions.
// This file builds that space explicitly: a basis of parametric jets together
// with the multiplication matrices of the derivations, and everything read
// off from them (maximal points, socle, top components, minimal generating
// modular equations, delocalization back to the full coordinate set).

#include "invsys/involution.hpp"
#include "invsys/linalg.hpp"

#include <climits>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace invsys {

struct InfiniteDimensional : std::domain_error {
    InfiniteDimensional()
        : std::domain_error("the solution space is infinite dimensional") {}
};

struct NonRationalEigenvalue : std::domain_error {
    int degree;
    explicit NonRationalEigenvalue(int d)
        : std::domain_error("a characteristic polynomial has an irreducible factor of degree " +
                            std::to_string(d)),
          degree(d) {}
};

struct NotInvariant : std::domain_error {
    NotInvariant()
        : std::domain_error("the subspace is not closed under the derivations") {}
};

// --------------------------------------------------------------------------
// the dual space: solution coefficients indexed by the parametric jets

struct DualSpace {
    PDSystem system;          // involutive presentation the space was built from
    std::vector<Jet> basis;   // parametric jets, ascending
    std::vector<Matrix> mult; // mult[i-1] = multiplication by d_i in that basis
    int order = 0;            // largest basis jet order

    int dim() const { return (int)basis.size(); }
    int fnv() const { return system.field.nvars(); }

    int index_of(const Jet& j) const {
        for (size_t u = 0; u < basis.size(); ++u)
            if (basis[u].k == j.k && basis[u].mu == j.mu) return (int)u;
        return -1;
    }

    // the derivations act on solution coefficient vectors by the transposes
    // of the multiplication matrices
    Matrix action(int i) const { return mult[i - 1].transpose(); }
};

// mult[i](u, v) is the coefficient of basis jet u in the normal form of
// basis jet v shifted once in direction i
inline DualSpace build_dual(const PDSystem& src, unsigned seed = 0) {
    PDSystem s = autoreduce(src);
    // drop rows that are consequences of the remaining ones, highest leaders
    // first; redundant prolongations inflate the apparent order of the system
    for (bool dropped = true; dropped;) {
        dropped = false;
        for (int t = (int)s.eqs.size() - 1; t >= 0 && s.eqs.size() > 1; --t) {
            PDSystem rest = s;
            rest.eqs.erase(rest.eqs.begin() + t);
            if (reduce(s.eqs[t], rest).is_zero()) {
                s = rest;
                dropped = true;
                break;
            }
        }
    }
    if (!involution_test(s)) s = complete(s, seed).system;
    if (codimension(s) < s.n) throw InfiniteDimensional();

    DualSpace R;
    R.system = s;
    int q = std::max(s.order(), 1);
    for (int t = 0; t < q; ++t)
        for (auto& j : parametric_jets(s, t)) R.basis.push_back(j);
    for (auto& j : R.basis) R.order = std::max(R.order, j.order());

    int fnv = s.field.nvars();
    int d = R.dim();
    Echelon span = prolongation_span(s, R.order + 1);
    for (int i = 1; i <= s.n; ++i) {
        Matrix B(d, d, fnv);
        for (int v = 0; v < d; ++v) {
            Equation probe(fnv);
            probe.add_term(Jet{R.basis[v].k, mu_plus(R.basis[v].mu, i)}, RatFun(fnv, 1));
            Equation nf = span.reduce(probe);
            for (auto& [j, c] : nf.terms()) {
                int u = R.index_of(j);
                if (u < 0) throw std::logic_error("normal form left the parametric basis");
                B.at(u, v) = c;
            }
        }
        R.mult.push_back(std::move(B));
    }
    return R;
}

// --------------------------------------------------------------------------
// modular equations: jet-indexed coefficient lists of a formal solution.
// Equation already stores exactly that, so it is reused; the coefficient of
// jet mu in the i-th derivate is the coefficient of mu + 1_i.

inline Equation derivate(const Equation& e, int i) {
    Equation out(e.field_nvars());
    for (auto& [j, c] : e.terms())
        if (j.mu[i - 1] > 0) {
            Exponents mu = j.mu;
            --mu[i - 1];
            out.add_term(Jet{j.k, mu}, c);
        }
    return out;
}

inline Equation derivate_multi(Equation e, const Exponents& nu) {
    for (size_t i = 0; i < nu.size(); ++i)
        for (int t = 0; t < nu[i]; ++t) e = derivate(e, (int)i + 1);
    return e;
}

// write the solution with the given parametric coefficients out to order q:
// every principal jet takes the value its normal form dictates
inline Equation section_equation(const DualSpace& R, const Vec& coords, int q) {
    int fnv = R.fnv();
    Echelon span = prolongation_span(R.system, std::max(q, 1));
    Equation out(fnv);
    for (int t = 0; t <= q; ++t)
        for (auto& mu : multi_indices_of_order(R.system.n, t))
            for (int k = 1; k <= R.system.m; ++k) {
                Equation probe(fnv);
                probe.add_term(Jet{k, mu}, RatFun(fnv, 1));
                RatFun val(fnv);
                Equation nf = span.reduce(probe);
                for (auto& [j, c] : nf.terms()) {
                    int u = R.index_of(j);
                    if (u < 0) throw std::logic_error("normal form left the parametric basis");
                    if (!coords[u].is_zero()) val += c * coords[u];
                }
                if (!val.is_zero()) out.add_term(Jet{k, mu}, val);
            }
    return out;
}

inline Vec section_coords(const DualSpace& R, const Equation& e) {
    Vec v(R.dim(), RatFun(R.fnv()));
    for (int u = 0; u < R.dim(); ++u) v[u] = e.coeff(R.basis[u]);
    return v;
}

// --------------------------------------------------------------------------
// eigenvalue extraction over the coefficient field

namespace detail {

inline std::vector<mpz_class> divisors_of(mpz_class n) {
    if (n < 0) n = -n;
    std::vector<mpz_class> out;
    for (mpz_class d = 1; d * d <= n; ++d) {
        if (n % d != 0) continue;
        out.push_back(d);
        if (d * d != n) out.push_back(n / d);
    }
    return out;
}

// one rational root of a polynomial with constant coefficients and nonzero
// constant term, if any
inline std::optional<RatFun> rational_root(const UPoly& p, int fnv) {
    int dg = up_deg(p);
    mpz_class den_lcm = 1;
    for (int i = 0; i <= dg; ++i)
        den_lcm = lcm(den_lcm, p[i].constant_value().get_den());
    std::vector<mpz_class> c(dg + 1);
    for (int i = 0; i <= dg; ++i) {
        Rational scaled = p[i].constant_value() * Rational(den_lcm);
        c[i] = scaled.get_num();
    }
    for (auto& u : divisors_of(c[0]))
        for (auto& v : divisors_of(c[dg]))
            for (int sign : {1, -1}) {
                RatFun cand(fnv, Rational(sign * u, v));
                if (up_eval(p, cand, fnv).is_zero()) return cand;
            }
    return std::nullopt;
}

inline bool constant_coeffs(const UPoly& p) {
    for (auto& c : p)
        if (!c.is_zero() && !c.is_constant()) return false;
    return true;
}

} // namespace detail

// the distinct roots of p, which must factor into linear pieces over the
// field; root zero and linear leftovers are read off directly, anything of
// higher degree is handled by the rational root theorem when the remaining
// coefficients are constant
inline std::vector<RatFun> linear_roots(const UPoly& p_in, int fnv) {
    UPoly p = up_squarefree(p_in, fnv);
    std::vector<RatFun> roots;
    if (up_deg(p) <= 0) return roots;
    if (p[0].is_zero()) {
        roots.emplace_back(fnv);
        p.erase(p.begin());
        p = up_trim(p);
    }
    while (up_deg(p) >= 1) {
        if (up_deg(p) == 1) {
            roots.push_back(-(p[0] / p[1]));
            break;
        }
        if (!detail::constant_coeffs(p)) throw NonRationalEigenvalue(up_deg(p));
        auto r = detail::rational_root(p, fnv);
        if (!r) throw NonRationalEigenvalue(up_deg(p));
        roots.push_back(*r);
        UPoly lin{-*r, RatFun(fnv, 1)};
        p = up_divmod(p, lin, fnv).first;
    }
    return roots;
}

// --------------------------------------------------------------------------
// maximal points: joint eigenvalue tuples with their local multiplicities

struct MaximalPoint {
    Vec c;            // one value per derivation d_1 .. d_n
    int multiplicity; // dimension of the local component
};

struct MaximalPointList {
    std::vector<MaximalPoint> points;
    // parameter expressions assumed nonzero to keep the roots distinct
    std::vector<Poly> branch_conditions;
};

inline MaximalPointList maximal_points(const DualSpace& R) {
    MaximalPointList out;
    int fnv = R.fnv();
    int d = R.dim();
    int n = R.system.n;
    if (d == 0) return out;

    std::vector<std::vector<RatFun>> roots;
    std::set<Poly> conds;
    for (int i = 0; i < n; ++i) {
        auto rs = linear_roots(R.mult[i].char_poly(), fnv);
        for (size_t a = 0; a < rs.size(); ++a)
            for (size_t b = a + 1; b < rs.size(); ++b) {
                RatFun diff = rs[a] - rs[b];
                if (diff.is_constant()) continue;
                Poly w = diff.num();
                if (w.leading_coeff() < 0) w = -w;
                conds.insert(w);
            }
        roots.push_back(rs);
    }

    std::vector<Vec> tuples{{}};
    for (auto& rs : roots) {
        std::vector<Vec> next;
        for (auto& t : tuples)
            for (auto& r : rs) {
                Vec e = t;
                e.push_back(r);
                next.push_back(e);
            }
        tuples = std::move(next);
    }

    int covered = 0;
    for (auto& c : tuples) {
        Matrix big(n * d, d, fnv);
        for (int i = 0; i < n; ++i) {
            Matrix B = R.mult[i];
            for (int t = 0; t < d; ++t) B.at(t, t) -= c[i];
            Matrix P = Matrix::identity(d, fnv);
            for (int t = 0; t < d; ++t) P = P * B;
            for (int r = 0; r < d; ++r)
                for (int col = 0; col < d; ++col) big.at(i * d + r, col) = P.at(r, col);
        }
        int mult = d - big.rank();
        if (mult > 0) {
            out.points.push_back({c, mult});
            covered += mult;
        }
    }
    if (covered != d) throw std::logic_error("joint eigenspaces do not fill the space");
    out.branch_conditions.assign(conds.begin(), conds.end());
    return out;
}

// --------------------------------------------------------------------------
// socle and top of a local component

// module elements killed by every d_i - c_i, as combinations of the basis jets
inline std::vector<Equation> socle(const DualSpace& R, const MaximalPoint& p) {
    int fnv = R.fnv();
    int d = R.dim();
    int n = R.system.n;
    Matrix big(n * d, d, fnv);
    for (int i = 0; i < n; ++i) {
        Matrix B = R.mult[i];
        for (int t = 0; t < d; ++t) B.at(t, t) -= p.c[i];
        for (int r = 0; r < d; ++r)
            for (int col = 0; col < d; ++col) big.at(i * d + r, col) = B.at(r, col);
    }
    std::vector<Equation> out;
    for (auto& v : big.kernel()) {
        Equation e(fnv);
        for (int u = 0; u < d; ++u)
            if (!v[u].is_zero()) e.add_term(R.basis[u], v[u]);
        out.push_back(e.normalized());
    }
    return out;
}

// coordinate representatives of the solution space modulo the image of the
// maximal ideal at p; they are unit vectors on the basis jets left over after
// row reducing that image
inline std::vector<Vec> top_component(const DualSpace& R, const MaximalPoint& p) {
    int fnv = R.fnv();
    int d = R.dim();
    int n = R.system.n;
    std::vector<Vec> cols;
    for (int i = 0; i < n; ++i) {
        Matrix S = R.action(i + 1);
        for (int t = 0; t < d; ++t) S.at(t, t) -= p.c[i];
        for (int col = 0; col < d; ++col) {
            Vec v(d, RatFun(fnv));
            bool nz = false;
            for (int r = 0; r < d; ++r) {
                v[r] = S.at(r, col);
                if (!v[r].is_zero()) nz = true;
            }
            if (nz) cols.push_back(v);
        }
    }
    Matrix m = from_rows(cols, d, fnv);
    std::vector<int> piv = m.rref();
    std::vector<bool> is_piv(d, false);
    for (int c : piv) is_piv[c] = true;
    std::vector<Vec> reps;
    for (int u = 0; u < d; ++u) {
        if (is_piv[u]) continue;
        Vec v(d, RatFun(fnv));
        v[u] = RatFun(fnv, 1);
        reps.push_back(v);
    }
    // the equation side and the solution side of the component must agree
    if (reps.size() != socle(R, p).size())
        throw std::logic_error("socle and top dimensions disagree");
    return reps;
}

// --------------------------------------------------------------------------
// minimal generators of the solution space as a module over the derivations

// do the given coefficient vectors generate the whole space under repeated
// application of the derivations?
inline bool generation_check(const DualSpace& R, const std::vector<Vec>& gens) {
    int fnv = R.fnv();
    int d = R.dim();
    if (d == 0) return true;
    std::vector<Matrix> act;
    for (int i = 1; i <= R.system.n; ++i) act.push_back(R.action(i));
    std::vector<Vec> span = row_basis(gens, d, fnv);
    bool grew = true;
    while (grew) {
        grew = false;
        std::vector<Vec> next = span;
        for (auto& a : act)
            for (auto& v : span) next.push_back(a.apply(v));
        next = row_basis(next, d, fnv);
        if (next.size() > span.size()) {
            span = std::move(next);
            grew = true;
        }
    }
    return (int)span.size() == d;
}

struct MinGenerators {
    int count = 0;
    std::vector<Vec> coords;
    std::vector<Equation> sections; // the generators written out to the basis order
    std::vector<Poly> branch_conditions;
};

// the number of generators is the largest top dimension over all maximal
// points; the j-th generator sums the j-th top representative of every point
// that still has one
inline MinGenerators min_generators(const DualSpace& R) {
    MinGenerators out;
    MaximalPointList pts = maximal_points(R);
    out.branch_conditions = pts.branch_conditions;
    int fnv = R.fnv();
    int d = R.dim();
    std::vector<std::vector<Vec>> tops;
    for (auto& p : pts.points) {
        tops.push_back(top_component(R, p));
        out.count = std::max(out.count, (int)tops.back().size());
    }
    for (int j = 0; j < out.count; ++j) {
        Vec g(d, RatFun(fnv));
        for (auto& t : tops)
            if ((int)t.size() > j)
                for (int u = 0; u < d; ++u) g[u] += t[j][u];
        out.coords.push_back(g);
        out.sections.push_back(section_equation(R, g, R.order));
    }
    if (!generation_check(R, out.coords))
        throw std::logic_error("generator certification failed");
    return out;
}

// --------------------------------------------------------------------------
// order-q solution spaces of arbitrary systems (finite type not required)

struct SectionSpace {
    int n = 0, m = 1, q = 0, fnv = 0;
    std::vector<Jet> jets;  // all jets of order <= q, the coordinate axes
    std::vector<Vec> basis; // solutions of every prolongation through order q

    int index_of(const Jet& j) const {
        for (size_t u = 0; u < jets.size(); ++u)
            if (jets[u].k == j.k && jets[u].mu == j.mu) return (int)u;
        return -1;
    }
};

inline SectionSpace section_space(const PDSystem& s, int q) {
    SectionSpace sp;
    sp.n = s.n;
    sp.m = s.m;
    sp.q = q;
    sp.fnv = s.field.nvars();
    for (int t = 0; t <= q; ++t)
        for (auto& mu : multi_indices_of_order(s.n, t))
            for (int k = 1; k <= s.m; ++k) sp.jets.push_back(Jet{k, mu});

    Echelon span = prolongation_span(s, q);
    std::vector<Vec> rows;
    for (auto& [lead, row] : span.rows()) {
        Vec r(sp.jets.size(), RatFun(sp.fnv));
        for (auto& [j, c] : row.terms()) r[sp.index_of(j)] = c;
        rows.push_back(r);
    }
    if (rows.empty()) {
        for (size_t u = 0; u < sp.jets.size(); ++u) {
            Vec v(sp.jets.size(), RatFun(sp.fnv));
            v[u] = RatFun(sp.fnv, 1);
            sp.basis.push_back(v);
        }
    } else {
        sp.basis = from_rows(rows, (int)sp.jets.size(), sp.fnv).kernel();
    }
    return sp;
}

namespace detail {

// the derivate of a truncated solution, padded with zeros at the top order,
// must stay inside the space
inline bool shift_invariant(const SectionSpace& sp) {
    for (auto& f : sp.basis)
        for (int i = 1; i <= sp.n; ++i) {
            Vec v(sp.jets.size(), RatFun(sp.fnv));
            for (size_t u = 0; u < sp.jets.size(); ++u) {
                const Jet& j = sp.jets[u];
                if (j.order() >= sp.q) continue;
                int src = sp.index_of(Jet{j.k, mu_plus(j.mu, i)});
                if (src >= 0) v[u] = f[src];
            }
            if (!in_row_span(sp.basis, v, sp.fnv)) return false;
        }
    return true;
}

} // namespace detail

struct SubsystemSum {
    bool sum = false; // the two subspaces span the whole space
    int defect = 0;   // codimension of their join otherwise
};

inline SubsystemSum subsystem_sum(const SectionSpace& r1, const SectionSpace& r2,
                                  const SectionSpace& r) {
    if (r1.n != r.n || r2.n != r.n || r1.m != r.m || r2.m != r.m || r1.q != r.q ||
        r2.q != r.q)
        throw std::invalid_argument("section spaces live over different jet sets");
    if (!detail::shift_invariant(r1) || !detail::shift_invariant(r2)) throw NotInvariant();
    for (auto& v : r1.basis)
        if (!in_row_span(r.basis, v, r.fnv))
            throw std::invalid_argument("first space is not a subspace");
    for (auto& v : r2.basis)
        if (!in_row_span(r.basis, v, r.fnv))
            throw std::invalid_argument("second space is not a subspace");
    std::vector<Vec> all = r1.basis;
    all.insert(all.end(), r2.basis.begin(), r2.basis.end());
    size_t join = row_basis(all, (int)r.jets.size(), r.fnv).size();
    SubsystemSum out;
    out.defect = (int)r.basis.size() - (int)join;
    out.sum = out.defect == 0;
    return out;
}

// --------------------------------------------------------------------------
// delocalization: rewriting modular equations of a partially localized
// system as families of modular equations of the original one

// how many times the product of all maximal ideals can act before killing
// the whole space
inline int radical_depth(const DualSpace& R) {
    int d = R.dim();
    int fnv = R.fnv();
    if (d == 0) return 0;
    MaximalPointList pts = maximal_points(R);
    if (pts.points.empty()) return 0;
    std::vector<Matrix> words{Matrix::identity(d, fnv)};
    for (auto& p : pts.points) {
        std::vector<Matrix> next;
        for (int i = 0; i < R.system.n; ++i) {
            Matrix S = R.action(i + 1);
            for (int t = 0; t < d; ++t) S.at(t, t) -= p.c[i];
            for (auto& w : words) next.push_back(S * w);
        }
        words = std::move(next);
    }
    std::vector<Vec> space;
    for (int u = 0; u < d; ++u) {
        Vec v(d, RatFun(fnv));
        v[u] = RatFun(fnv, 1);
        space.push_back(v);
    }
    int depth = 0;
    while (true) {
        std::vector<Vec> img;
        for (auto& w : words)
            for (auto& v : space) img.push_back(w.apply(v));
        auto nb = row_basis(img, d, fnv);
        if (nb.empty()) break;
        ++depth;
        space = std::move(nb);
    }
    return depth;
}

struct Delocalization {
    // total chi'-exponent -> modular equation over the full coordinate set
    std::map<Exponents, Equation, DegRevLexLess> components;
    int delta = 0;       // largest chi'-degree minus jet order over the terms
    int tau = 0;         // radical depth of the localized space
    int order_bound = 0; // presentation order sufficient for the rewriting
};

// E is a modular equation of the localized system R, written out at least to
// the requested order; the chi' variables of its coefficients turn back into
// jet indices along the split-off directions
inline Delocalization delocalize(const Equation& E, const DualSpace& R, int up_to_order) {
    const FieldInfo& lf = R.system.field;
    int r = R.system.n;
    int nloc = lf.nchi;
    int np = (int)lf.params.size();
    int n = nloc + r;
    int ofnv = np;

    std::vector<const Jet*> js;
    std::vector<RatFun> cs;
    for (auto& [j, c] : E.terms()) {
        js.push_back(&j);
        cs.push_back(c);
    }
    auto [polys, common] = clear_denominators(cs);
    (void)common; // modular equations scale freely

    struct Entry {
        Exponents lam; // chi' exponents
        const Jet* j;  // jet along the active directions
        Exponents pe;  // parameter exponents of the coefficient
        Rational co;
    };
    std::vector<Entry> entries;
    int delta = INT_MIN;
    int max_lam = 0;
    for (size_t t = 0; t < js.size(); ++t)
        for (auto& [e, co] : polys[t].terms()) {
            Exponents pe(e.begin(), e.begin() + np);
            Exponents lam(e.begin() + np, e.end());
            entries.push_back({lam, js[t], pe, co});
            delta = std::max(delta, exp_degree(lam) - js[t]->order());
            max_lam = std::max(max_lam, exp_degree(lam));
        }

    Delocalization out;
    out.delta = entries.empty() ? 0 : delta;
    out.tau = radical_depth(R);
    out.order_bound = std::max(R.system.order(), 1) + out.delta + out.tau;

    for (int a = 0; a <= up_to_order + max_lam; ++a)
        for (auto& alpha : multi_indices_of_order(nloc, a)) {
            Equation eq(ofnv);
            for (auto& en : entries) {
                Exponents mu(n, 0);
                bool ok = true;
                for (int v = 0; v < nloc; ++v) {
                    mu[v] = alpha[v] - en.lam[v];
                    if (mu[v] < 0) {
                        ok = false;
                        break;
                    }
                }
                if (!ok) continue;
                for (int v = 0; v < r; ++v) mu[nloc + v] = en.j->mu[v];
                eq.add_term(Jet{en.j->k, mu}, RatFun(Poly::monomial(ofnv, en.pe, en.co)));
            }
            if (eq.is_zero() || eq.order() > up_to_order) continue;
            out.components.emplace(alpha, std::move(eq));
        }
    return out;
}

// row basis of all derivates of the given modular equations, as coordinate
// vectors on the jets of order <= q
inline std::vector<Vec> derivate_span(const std::vector<Equation>& gens,
                                      const SectionSpace& sp) {
    std::vector<Vec> rows;
    for (auto& E : gens) {
        int oe = E.order();
        for (int t = 0; t <= oe; ++t)
            for (auto& nu : multi_indices_of_order(sp.n, t)) {
                Equation de = derivate_multi(E, nu);
                if (de.is_zero() || de.order() > sp.q) continue;
                Vec v(sp.jets.size(), RatFun(sp.fnv));
                for (auto& [j, c] : de.terms()) {
                    int u = sp.index_of(j);
                    if (u < 0) throw std::logic_error("derivate term outside the jet range");
                    v[u] = c;
                }
                rows.push_back(v);
            }
    }
    return row_basis(rows, (int)sp.jets.size(), sp.fnv);
}

// do the derivates of the given modular equations span every solution of s
// through order q?
inline bool derivate_generation_check(const std::vector<Equation>& gens,
                                      const PDSystem& s, int q) {
    SectionSpace sp = section_space(s, q);
    std::vector<Vec> rows = derivate_span(gens, sp);
    for (auto& b : sp.basis)
        if (!in_row_span(rows, b, sp.fnv)) return false;
    return true;
}

} // namespace invsys
