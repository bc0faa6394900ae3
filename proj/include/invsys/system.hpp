#pragma once

// Linear PD systems with constant coefficients and their linear reduction
// to solved form. Coefficients live in a fraction field Q(params, chi')
// described by FieldInfo; the plain Q case has no field variables.

#include "invsys/jets.hpp"
#include "invsys/ratfun.hpp"

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace invsys {

struct FieldInfo {
    std::vector<std::string> params; // transcendental parameters, first block
    int nchi = 0;                    // localized chi' variables, second block

    int nvars() const { return (int)params.size() + nchi; }
    int chi_index(int j) const { return (int)params.size() + j; } // j in 0..nchi-1

    std::vector<std::string> var_names() const {
        std::vector<std::string> v = params;
        for (int j = 0; j < nchi; ++j) v.push_back("x" + std::to_string(j + 1));
        return v;
    }
    bool operator==(const FieldInfo& o) const {
        return params == o.params && nchi == o.nchi;
    }
};

class Equation {
public:
    using TermMap = std::map<Jet, RatFun, JetLess>;

    Equation() = default;
    explicit Equation(int field_nvars) : fnv_(field_nvars) {}

    int field_nvars() const { return fnv_; }
    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    int order() const {
        int o = 0;
        for (auto& [j, c] : terms_) o = std::max(o, j.order());
        return o;
    }
    const Jet& leading_jet() const { return terms_.rbegin()->first; }
    const RatFun& leading_coeff() const { return terms_.rbegin()->second; }
    RatFun coeff(const Jet& j) const {
        auto it = terms_.find(j);
        return it == terms_.end() ? RatFun(fnv_) : it->second;
    }

    void add_term(const Jet& j, const RatFun& c) {
        if (c.is_zero()) return;
        auto it = terms_.find(j);
        if (it == terms_.end()) {
            terms_.emplace(j, c);
        } else {
            it->second += c;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    friend Equation operator*(const Equation& e, const RatFun& c) {
        Equation r(e.fnv_);
        if (c.is_zero()) return r;
        for (auto& [j, co] : e.terms_) r.terms_[j] = co * c;
        return r;
    }
    friend Equation operator+(const Equation& a, const Equation& b) {
        Equation r = a;
        for (auto& [j, c] : b.terms_) r.add_term(j, c);
        return r;
    }
    friend Equation operator-(const Equation& a, const Equation& b) {
        Equation r = a;
        for (auto& [j, c] : b.terms_) r.add_term(j, -c);
        return r;
    }
    bool operator==(const Equation& o) const { return terms_ == o.terms_; }

    Equation normalized() const {
        if (is_zero()) return *this;
        return *this * (RatFun(fnv_, 1) / leading_coeff());
    }

private:
    int fnv_ = 0;
    TermMap terms_;
};

// prolongation d_i Phi; constant coefficients, so jets just shift
inline Equation prolong(const Equation& e, int i) {
    Equation r(e.field_nvars());
    for (auto& [j, c] : e.terms())
        r.add_term(Jet{j.k, mu_plus(j.mu, i)}, c);
    return r;
}

inline Equation prolong_multi(const Equation& e, const Exponents& nu) {
    Equation r = e;
    for (size_t i = 0; i < nu.size(); ++i)
        for (int t = 0; t < nu[i]; ++t) r = prolong(r, (int)i + 1);
    return r;
}

struct PDSystem {
    int n = 0; // number of derivations acting on the jets
    int m = 1; // number of unknowns
    FieldInfo field;
    std::vector<Equation> eqs;

    int order() const {
        int q = 0;
        for (auto& e : eqs)
            if (!e.is_zero()) q = std::max(q, e.order());
        return q;
    }
    Equation make_equation() const { return Equation(field.nvars()); }
};

struct NotSolvedForm : std::logic_error {
    NotSolvedForm() : std::logic_error("system is not in solved form (duplicate leading jets)") {}
};

// Row-echelon collection of equations keyed by leading jet. Rows are
// normalized; candidates are fully reduced before insertion.
class Echelon {
public:
    explicit Echelon(int field_nvars) : fnv_(field_nvars) {}

    const std::map<Jet, Equation, JetLess>& rows() const { return rows_; }
    size_t size() const { return rows_.size(); }

    Equation reduce(Equation e) const {
        bool changed = true;
        while (changed && !e.is_zero()) {
            changed = false;
            // scan from the highest jet down; one substitution restarts the scan
            for (auto it = e.terms().rbegin(); it != e.terms().rend(); ++it) {
                auto row = rows_.find(it->first);
                if (row != rows_.end()) {
                    e = e - row->second * it->second;
                    changed = true;
                    break;
                }
            }
        }
        return e;
    }

    // returns true if e was independent of the rows so far
    bool insert(Equation e) {
        e = reduce(std::move(e));
        if (e.is_zero()) return false;
        rows_.emplace(e.leading_jet(), e.normalized());
        return true;
    }

    // reduce every row's tail against the others (ascending pass suffices:
    // tails only contain jets below the row's own leader)
    void interreduce() {
        std::map<Jet, Equation, JetLess> done;
        for (auto& [lead, row] : rows_) {
            Equation e = row;
            bool changed = true;
            while (changed && !e.is_zero()) {
                changed = false;
                for (auto it = e.terms().rbegin(); it != e.terms().rend(); ++it) {
                    if (it->first == lead) continue;
                    auto hit = done.find(it->first);
                    if (hit != done.end()) {
                        e = e - hit->second * it->second;
                        changed = true;
                        break;
                    }
                }
            }
            done.emplace(lead, e);
        }
        rows_ = std::move(done);
    }

    std::vector<Equation> equations() const {
        std::vector<Equation> v;
        for (auto& [j, e] : rows_) v.push_back(e);
        return v;
    }

private:
    int fnv_;
    std::map<Jet, Equation, JetLess> rows_;
};

inline PDSystem autoreduce(const PDSystem& s) {
    Echelon ech(s.field.nvars());
    for (auto& e : s.eqs) ech.insert(e);
    ech.interreduce();
    PDSystem out = s;
    out.eqs = ech.equations();
    return out;
}

// span of all prolongations of s up to the given order
inline Echelon prolongation_span(const PDSystem& s, int up_to_order) {
    Echelon ech(s.field.nvars());
    for (auto& e : s.eqs) {
        if (e.is_zero()) continue;
        int o = e.order();
        for (int d = 0; d + o <= up_to_order; ++d)
            for (auto& nu : multi_indices_of_order(s.n, d))
                ech.insert(prolong_multi(e, nu));
    }
    return ech;
}

// normal form of e modulo all prolongations of s of order <= order(e)
inline Equation reduce(const Equation& e, const PDSystem& s) {
    {
        // solved-form precondition: distinct leading jets
        std::map<Jet, int, JetLess> seen;
        for (auto& eq : s.eqs)
            if (!eq.is_zero() && ++seen[eq.leading_jet()] > 1) throw NotSolvedForm();
    }
    if (e.is_zero()) return e;
    return prolongation_span(s, e.order()).reduce(e);
}

// substitute derivations d_i -> sum_j C[i][j] d_j in every equation
inline PDSystem apply_coordinate_change(const PDSystem& s,
                                        const std::vector<std::vector<Rational>>& C) {
    PDSystem out = s;
    out.eqs.clear();
    int fnv = s.field.nvars();
    for (auto& e : s.eqs) {
        Equation ne(fnv);
        for (auto& [j, c] : e.terms()) {
            // expand product over i of (sum_j C[i][j] d_j)^(mu_i)
            std::map<Exponents, RatFun, DegRevLexLess> acc;
            acc[Exponents(s.n, 0)] = c;
            for (int i = 0; i < s.n; ++i) {
                for (int t = 0; t < j.mu[i]; ++t) {
                    std::map<Exponents, RatFun, DegRevLexLess> next;
                    for (auto& [mu, co] : acc)
                        for (int jj = 0; jj < s.n; ++jj) {
                            if (C[i][jj] == 0) continue;
                            Exponents mu2 = mu;
                            mu2[jj] += 1;
                            auto it = next.find(mu2);
                            RatFun add = co * RatFun(fnv, C[i][jj]);
                            if (it == next.end()) next.emplace(mu2, add);
                            else it->second += add;
                        }
                    acc = std::move(next);
                }
            }
            for (auto& [mu, co] : acc) ne.add_term(Jet{j.k, mu}, co);
        }
        out.eqs.push_back(ne);
    }
    return out;
}

// fix some of the parameters to rational values and drop them from the field
inline PDSystem specialize_params(const PDSystem& s,
                                  const std::vector<std::pair<std::string, Rational>>& vals) {
    size_t np_old = s.field.params.size();
    std::vector<bool> fixed(np_old, false);
    std::vector<Rational> val(np_old);
    for (auto& [name, v] : vals) {
        bool found = false;
        for (size_t i = 0; i < np_old; ++i)
            if (s.field.params[i] == name) {
                fixed[i] = true;
                val[i] = v;
                found = true;
            }
        if (!found) throw std::invalid_argument("unknown parameter '" + name + "'");
    }
    FieldInfo nf;
    nf.nchi = s.field.nchi;
    std::vector<int> idx(np_old, -1);
    for (size_t i = 0; i < np_old; ++i)
        if (!fixed[i]) {
            idx[i] = (int)nf.params.size();
            nf.params.push_back(s.field.params[i]);
        }
    int nfnv = nf.nvars();
    size_t np_new = nf.params.size();
    auto remap = [&](const Poly& p) {
        Poly out(nfnv);
        for (auto& [e, c] : p.terms()) {
            Rational cc = c;
            Exponents ne(nfnv, 0);
            for (size_t i = 0; i < np_old; ++i) {
                if (fixed[i]) {
                    for (int t = 0; t < e[i]; ++t) cc *= val[i];
                } else {
                    ne[idx[i]] = e[i];
                }
            }
            for (int j = 0; j < s.field.nchi; ++j) ne[np_new + j] = e[np_old + j];
            if (cc != 0) out += Poly::monomial(nfnv, ne, cc);
        }
        return out;
    };
    PDSystem out;
    out.n = s.n;
    out.m = s.m;
    out.field = nf;
    for (auto& e : s.eqs) {
        Equation ne(nfnv);
        for (auto& [j, c] : e.terms()) {
            Poly den = remap(c.den());
            if (den.is_zero())
                throw std::domain_error("specialization makes a coefficient denominator vanish");
            ne.add_term(j, RatFun(remap(c.num()), den));
        }
        if (!ne.is_zero()) out.eqs.push_back(ne);
    }
    return out;
}

inline std::string equation_to_string(const Equation& e, int m,
                                      const std::vector<std::string>& field_names) {
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
            std::string cs = ratfun_to_string(c, field_names);
            if (!c.is_constant() && (c.num().terms().size() > 1 && c.is_polynomial()))
                cs = "(" + cs + ")";
            s += cs + "*";
        }
        s += jet_to_string(it->first, m);
    }
    return s;
}

} // namespace invsys
