#pragma once

// A small Buchberger engine for submodules of F[x_1..x_n]^m where F is the
// coefficient fraction field (Q or Q(params)). Used for the quasi-stability
// test during completion and for quotient/saturation/annihilator work.
//
// The base monomial order is the same degrevlex used everywhere (x_n > ... >
// x_1) with position-over-term as the last tie-break. Two optional blocks are
// supported: an elimination variable (anything containing it beats anything
// that does not) and a low-component block (components >= low_comp_from lose
// against the rest), which is how t-elimination and component elimination
// are realized.

#include "invsys/jets.hpp"
#include "invsys/ratfun.hpp"

#include <limits>
#include <map>
#include <set>
#include <vector>

namespace invsys {

struct MTerm {
    int comp = 1; // 1-based component
    Exponents mono;

    bool operator==(const MTerm& o) const { return comp == o.comp && mono == o.mono; }
};

struct MOrder {
    int elim_var = -1;                              // index of the elimination variable
    int low_comp_from = std::numeric_limits<int>::max();

    bool less(const MTerm& a, const MTerm& b) const {
        bool alow = a.comp >= low_comp_from, blow = b.comp >= low_comp_from;
        if (alow != blow) return alow;
        if (elim_var >= 0 && a.mono[elim_var] != b.mono[elim_var])
            return a.mono[elim_var] < b.mono[elim_var];
        int da = exp_degree(a.mono), db = exp_degree(b.mono);
        if (da != db) return da < db;
        for (size_t i = 0; i < a.mono.size(); ++i)
            if (a.mono[i] != b.mono[i]) return a.mono[i] > b.mono[i];
        return a.comp < b.comp;
    }
    bool operator==(const MOrder& o) const {
        return elim_var == o.elim_var && low_comp_from == o.low_comp_from;
    }
};

struct MTermLess {
    MOrder ord;
    bool operator()(const MTerm& a, const MTerm& b) const { return ord.less(a, b); }
};

// vector of polynomials over F
class VP {
public:
    using TermMap = std::map<MTerm, RatFun, MTermLess>;

    VP(const MOrder& ord, int field_nvars)
        : fnv_(field_nvars), terms_(MTermLess{ord}) {}

    MOrder order() const { return terms_.key_comp().ord; }
    int field_nvars() const { return fnv_; }
    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    const MTerm& lead() const { return terms_.rbegin()->first; }
    const RatFun& lead_coeff() const { return terms_.rbegin()->second; }

    void add_term(const MTerm& t, const RatFun& c) {
        if (c.is_zero()) return;
        auto it = terms_.find(t);
        if (it == terms_.end()) {
            terms_.emplace(t, c);
        } else {
            it->second += c;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    VP scaled(const Exponents& mono, const RatFun& c) const {
        VP r(order(), fnv_);
        if (c.is_zero()) return r;
        for (auto& [t, co] : terms_) {
            MTerm nt = t;
            for (size_t i = 0; i < mono.size(); ++i) nt.mono[i] += mono[i];
            r.terms_.emplace(nt, co * c);
        }
        return r;
    }

    friend VP operator-(const VP& a, const VP& b) {
        VP r = a;
        for (auto& [t, c] : b.terms_) r.add_term(t, -c);
        return r;
    }
    friend VP operator+(const VP& a, const VP& b) {
        VP r = a;
        for (auto& [t, c] : b.terms_) r.add_term(t, c);
        return r;
    }
    bool operator==(const VP& o) const { return terms_ == o.terms_; }

    VP normalized() const {
        if (is_zero()) return *this;
        VP r(order(), fnv_);
        RatFun inv = RatFun(fnv_, 1) / lead_coeff();
        for (auto& [t, c] : terms_) r.terms_.emplace(t, c * inv);
        return r;
    }

private:
    int fnv_;
    TermMap terms_;
};

inline bool mterm_divides(const MTerm& d, const MTerm& t) {
    if (d.comp != t.comp) return false;
    for (size_t i = 0; i < d.mono.size(); ++i)
        if (d.mono[i] > t.mono[i]) return false;
    return true;
}

class GBasis {
public:
    GBasis(const MOrder& ord, int field_nvars) : ord_(ord), fnv_(field_nvars) {}

    const std::vector<VP>& gens() const { return gens_; }
    const MOrder& order() const { return ord_; }

    VP normal_form(VP f) const {
        VP out(ord_, fnv_);
        while (!f.is_zero()) {
            bool reduced = false;
            const MTerm& lt = f.lead();
            for (auto& g : gens_) {
                if (!mterm_divides(g.lead(), lt)) continue;
                Exponents q(lt.mono.size());
                for (size_t i = 0; i < q.size(); ++i) q[i] = lt.mono[i] - g.lead().mono[i];
                f = f - g.scaled(q, f.lead_coeff() / g.lead_coeff());
                reduced = true;
                break;
            }
            if (!reduced) {
                out.add_term(f.lead(), f.lead_coeff());
                VP rest(ord_, fnv_);
                for (auto& [t, c] : f.terms())
                    if (!(t == f.lead())) rest.add_term(t, c);
                f = rest;
            }
        }
        return out;
    }

    bool contains(const VP& f) const { return normal_form(f).is_zero(); }

    void compute(std::vector<VP> input) {
        for (auto& g : input)
            if (!g.is_zero()) gens_.push_back(g.normalized());
        std::vector<std::pair<size_t, size_t>> pairs;
        for (size_t i = 0; i < gens_.size(); ++i)
            for (size_t j = i + 1; j < gens_.size(); ++j) pairs.push_back({i, j});
        while (!pairs.empty()) {
            auto [i, j] = pairs.back();
            pairs.pop_back();
            const VP &f = gens_[i], &g = gens_[j];
            if (f.lead().comp != g.lead().comp) continue;
            Exponents lcm(f.lead().mono.size());
            for (size_t t = 0; t < lcm.size(); ++t)
                lcm[t] = std::max(f.lead().mono[t], g.lead().mono[t]);
            Exponents qf = lcm, qg = lcm;
            for (size_t t = 0; t < lcm.size(); ++t) {
                qf[t] -= f.lead().mono[t];
                qg[t] -= g.lead().mono[t];
            }
            VP s = f.scaled(qf, RatFun(fnv_, 1)) - g.scaled(qg, RatFun(fnv_, 1));
            s = normal_form(s);
            if (s.is_zero()) continue;
            gens_.push_back(s.normalized());
            for (size_t t = 0; t + 1 < gens_.size(); ++t)
                pairs.push_back({t, gens_.size() - 1});
        }
        reduce_basis();
    }

    // leading terms, deduplicated
    std::vector<MTerm> leading_terms() const {
        std::vector<MTerm> out;
        for (auto& g : gens_) out.push_back(g.lead());
        return out;
    }

private:
    void reduce_basis() {
        // drop generators whose lead is divisible by another's, then fully
        // inter-reduce tails for a canonical reduced basis
        std::vector<VP> keep;
        for (size_t i = 0; i < gens_.size(); ++i) {
            bool redundant = false;
            for (size_t j = 0; j < gens_.size(); ++j) {
                if (i == j) continue;
                if (mterm_divides(gens_[j].lead(), gens_[i].lead()) &&
                    !(gens_[j].lead() == gens_[i].lead() && j > i)) {
                    redundant = true;
                    break;
                }
            }
            if (!redundant) keep.push_back(gens_[i]);
        }
        gens_ = std::move(keep);
        for (size_t i = 0; i < gens_.size(); ++i) {
            std::vector<VP> others;
            for (size_t j = 0; j < gens_.size(); ++j)
                if (j != i) others.push_back(gens_[j]);
            GBasis tmp(ord_, fnv_);
            tmp.gens_ = others;
            gens_[i] = tmp.normal_form(gens_[i]).normalized();
        }
        std::sort(gens_.begin(), gens_.end(), [&](const VP& a, const VP& b) {
            return ord_.less(a.lead(), b.lead());
        });
    }

    MOrder ord_;
    int fnv_;
    std::vector<VP> gens_;
};

inline GBasis groebner(const std::vector<VP>& gens, const MOrder& ord, int fnv) {
    GBasis g(ord, fnv);
    g.compute(gens);
    return g;
}

// --------------------------------------------------------------------------
// derived operations on submodules of F[x]^m given by generators.
// Generators are VPs over `nvars` monomial variables with the plain order.
// Scalars (quotient divisors, annihilator elements) are polynomials in the
// monomial variables with coefficients in F, kept as exponent maps.

using ScalarPoly = std::map<Exponents, RatFun, DegRevLexLess>;

struct ZeroDivisorInput : std::domain_error {
    ZeroDivisorInput() : std::domain_error("quotient by the zero polynomial") {}
};

namespace detail {

// move a VP between orders / variable counts (extend adds trailing zeros)
inline VP reorder(const VP& v, const MOrder& ord, int nvars) {
    VP r(ord, v.field_nvars());
    for (auto& [t, c] : v.terms()) {
        MTerm nt = t;
        nt.mono.resize(nvars, 0);
        r.add_term(nt, c);
    }
    return r;
}

} // namespace detail

inline ScalarPoly scalar_from_poly(const Poly& p, int fnv) {
    ScalarPoly s;
    for (auto& [e, c] : p.terms()) s.emplace(e, RatFun(fnv, c));
    return s;
}

inline VP vp_from_scalar(const ScalarPoly& p, int comp, const MOrder& ord, int fnv) {
    VP v(ord, fnv);
    for (auto& [e, c] : p) v.add_term(MTerm{comp, e}, c);
    return v;
}

// I : f = {v : f v in I}, computed from I ∩ f·F[x]^m by t-elimination
inline std::vector<VP> module_quotient(const std::vector<VP>& igens, const ScalarPoly& f,
                                       int nvars, int m, int fnv) {
    if (f.empty()) throw ZeroDivisorInput();
    MOrder plain;
    if (f.size() == 1 && exp_degree(f.begin()->first) == 0) {
        std::vector<VP> out;
        for (auto& g : igens) out.push_back(detail::reorder(g, plain, nvars));
        return out;
    }
    MOrder elim;
    elim.elim_var = nvars; // the added t
    std::vector<VP> work;
    // t * igens
    for (auto& g : igens) {
        VP h = detail::reorder(g, elim, nvars + 1);
        Exponents t(nvars + 1, 0);
        t[nvars] = 1;
        work.push_back(h.scaled(t, RatFun(fnv, 1)));
    }
    // (1 - t) * f * e_k
    for (int k = 1; k <= m; ++k) {
        VP h(elim, fnv);
        for (auto& [e, c] : f) {
            Exponents e1 = e;
            e1.resize(nvars + 1, 0);
            h.add_term(MTerm{k, e1}, c);
            Exponents e2 = e1;
            e2[nvars] = 1;
            h.add_term(MTerm{k, e2}, -c);
        }
        work.push_back(h);
    }
    GBasis gb = groebner(work, elim, fnv);
    const Exponents& fe = f.rbegin()->first;
    const RatFun& fc = f.rbegin()->second;
    std::vector<VP> out;
    for (auto& g : gb.gens()) {
        bool has_t = false;
        for (auto& [t, c] : g.terms())
            if (t.mono[nvars] > 0) { has_t = true; break; }
        if (has_t) continue;
        // g ∈ I ∩ f·F[x]^m; divide every component polynomial by f (exact
        // by construction, done by long division with F-coefficients)
        VP q(plain, fnv);
        std::map<int, ScalarPoly> bycomp;
        for (auto& [t, c] : g.terms()) {
            Exponents e = t.mono;
            e.resize(nvars);
            bycomp[t.comp][e] = c;
        }
        for (auto& [comp, poly] : bycomp) {
            ScalarPoly rem = poly;
            while (!rem.empty()) {
                auto lt = rem.rbegin();
                Exponents qe = lt->first;
                bool ok = true;
                for (size_t i = 0; i < qe.size(); ++i) {
                    qe[i] -= fe[i];
                    if (qe[i] < 0) { ok = false; break; }
                }
                if (!ok) throw std::logic_error("module_quotient: inexact division");
                RatFun qc = lt->second / fc;
                q.add_term(MTerm{comp, qe}, qc);
                for (auto& [e, c] : f) {
                    Exponents te = qe;
                    for (size_t i = 0; i < te.size(); ++i) te[i] += e[i];
                    auto it = rem.find(te);
                    RatFun sub = qc * c;
                    if (it == rem.end()) {
                        if (!sub.is_zero()) rem.emplace(te, -sub);
                    } else {
                        it->second -= sub;
                        if (it->second.is_zero()) rem.erase(it);
                    }
                }
            }
        }
        if (!q.is_zero()) out.push_back(q.normalized());
    }
    return out;
}

inline std::vector<VP> module_quotient(const std::vector<VP>& igens, const Poly& f,
                                       int nvars, int m, int fnv) {
    if (f.is_zero()) throw ZeroDivisorInput();
    return module_quotient(igens, scalar_from_poly(f, fnv), nvars, m, fnv);
}

// repeated quotient by f until stable
inline std::vector<VP> saturate(std::vector<VP> igens, const ScalarPoly& f,
                                int nvars, int m, int fnv) {
    MOrder plain;
    while (true) {
        GBasis before = groebner(igens, plain, fnv);
        std::vector<VP> next = module_quotient(before.gens(), f, nvars, m, fnv);
        GBasis after = groebner(next, plain, fnv);
        bool grew = false;
        for (auto& g : after.gens())
            if (!before.contains(g)) { grew = true; break; }
        if (!grew) return before.gens();
        igens = after.gens();
    }
}

inline std::vector<VP> saturate(std::vector<VP> igens, const Poly& f,
                                int nvars, int m, int fnv) {
    if (f.is_zero()) throw ZeroDivisorInput();
    return saturate(std::move(igens), scalar_from_poly(f, fnv), nvars, m, fnv);
}

// ann(g mod I) for g in F[x]^m: ideal of scalars a with a·g ∈ I
inline std::vector<ScalarPoly> annihilator(const std::vector<VP>& igens, const VP& g,
                                           int nvars, int m, int fnv) {
    MOrder ord;
    ord.low_comp_from = m + 1;
    std::vector<VP> work;
    for (auto& h : igens) work.push_back(detail::reorder(h, ord, nvars));
    VP gg = detail::reorder(g, ord, nvars);
    gg.add_term(MTerm{m + 1, Exponents(nvars, 0)}, RatFun(fnv, 1));
    work.push_back(gg);
    GBasis gb = groebner(work, ord, fnv);
    std::vector<ScalarPoly> out;
    for (auto& h : gb.gens()) {
        bool pure = true;
        for (auto& [t, c] : h.terms())
            if (t.comp != m + 1) { pure = false; break; }
        if (!pure) continue;
        ScalarPoly p;
        for (auto& [t, c] : h.terms()) p.emplace(t.mono, c);
        if (!p.empty()) out.push_back(p);
    }
    return out;
}

// quasi-stability of the monomial module spanned by the given leading terms:
// finite Pommaret basis exists iff each component ideal is quasi-stable
inline bool quasi_stable(const std::vector<MTerm>& leads, int nvars, int m) {
    for (int k = 1; k <= m; ++k) {
        // minimal generators of component k
        std::vector<Exponents> gens;
        for (auto& t : leads)
            if (t.comp == k) gens.push_back(t.mono);
        std::vector<Exponents> min;
        for (size_t i = 0; i < gens.size(); ++i) {
            bool dom = false;
            for (size_t j = 0; j < gens.size(); ++j) {
                if (i == j) continue;
                bool le = true;
                for (int v = 0; v < nvars; ++v)
                    if (gens[j][v] > gens[i][v]) { le = false; break; }
                if (le && gens[j] != gens[i]) { dom = true; break; }
                if (le && gens[j] == gens[i] && j < i) { dom = true; break; }
            }
            if (!dom) min.push_back(gens[i]);
        }
        for (auto& mu : min) {
            if (exp_degree(mu) == 0) continue;
            int cls = class_of(mu); // 1-based
            Exponents stripped = mu;
            stripped[cls - 1] = 0;
            for (int j = cls + 1; j <= nvars; ++j) {
                bool ok = false;
                for (auto& g : min) {
                    bool le = true;
                    for (int v = 0; v < nvars; ++v) {
                        if (v == j - 1) continue;
                        if (g[v] > stripped[v]) { le = false; break; }
                    }
                    if (le) { ok = true; break; }
                }
                if (!ok) return false;
            }
        }
    }
    return true;
}

} // namespace invsys
