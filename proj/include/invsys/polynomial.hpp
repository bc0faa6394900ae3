#pragma once

// Multivariate polynomials over Q with a fixed global term order:
// degree-reverse-lexicographic with x_n > x_{n-1} > ... > x_1.

#include "invsys/rational.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace invsys {

using Exponents = std::vector<int>;

inline int exp_degree(const Exponents& e) {
    int d = 0;
    for (int x : e) d += x;
    return d;
}

// degrevlex with x_n > ... > x_1: larger total degree wins; on ties the
// monomial that is SMALLER in its lowest-index differing exponent wins.
struct DegRevLexLess {
    bool operator()(const Exponents& a, const Exponents& b) const {
        int da = exp_degree(a), db = exp_degree(b);
        if (da != db) return da < db;
        for (size_t i = 0; i < a.size(); ++i)
            if (a[i] != b[i]) return a[i] > b[i];
        return false;
    }
};

class Poly {
public:
    using TermMap = std::map<Exponents, Rational, DegRevLexLess>;

    Poly() : nv_(0) {}
    explicit Poly(int nvars) : nv_(nvars) {}
    Poly(int nvars, const Rational& c) : nv_(nvars) {
        if (c != 0) terms_[Exponents(nvars, 0)] = c;
    }

    static Poly variable(int nvars, int i) {
        Poly p(nvars);
        Exponents e(nvars, 0);
        e.at(i) = 1;
        p.terms_[e] = 1;
        return p;
    }
    static Poly monomial(int nvars, const Exponents& e, const Rational& c) {
        Poly p(nvars);
        if (c != 0) p.terms_[e] = c;
        return p;
    }

    int nvars() const { return nv_; }
    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const {
        return terms_.empty() || (terms_.size() == 1 && exp_degree(terms_.begin()->first) == 0);
    }
    int total_degree() const {
        return terms_.empty() ? -1 : exp_degree(terms_.rbegin()->first);
    }
    int degree_in(int var) const {
        int d = -1;
        for (auto& [e, c] : terms_) d = std::max(d, e[var]);
        return d;
    }
    const Exponents& leading_exponents() const { return terms_.rbegin()->first; }
    const Rational& leading_coeff() const { return terms_.rbegin()->second; }
    Rational constant_coeff() const {
        auto it = terms_.find(Exponents(nv_, 0));
        return it == terms_.end() ? Rational(0) : it->second;
    }

    void add_term(const Exponents& e, const Rational& c) {
        if (c == 0) return;
        auto it = terms_.find(e);
        if (it == terms_.end()) {
            terms_.emplace(e, c);
        } else {
            it->second += c;
            if (it->second == 0) terms_.erase(it);
        }
    }

    friend Poly operator+(const Poly& a, const Poly& b) {
        Poly r = a;
        for (auto& [e, c] : b.terms_) r.add_term(e, c);
        return r;
    }
    friend Poly operator-(const Poly& a, const Poly& b) {
        Poly r = a;
        for (auto& [e, c] : b.terms_) r.add_term(e, -c);
        return r;
    }
    Poly operator-() const {
        Poly r(nv_);
        for (auto& [e, c] : terms_) r.terms_[e] = -c;
        return r;
    }
    friend Poly operator*(const Poly& a, const Poly& b) {
        Poly r(a.nv_);
        for (auto& [ea, ca] : a.terms_)
            for (auto& [eb, cb] : b.terms_) {
                Exponents e = ea;
                for (size_t i = 0; i < e.size(); ++i) e[i] += eb[i];
                r.add_term(e, ca * cb);
            }
        return r;
    }
    friend Poly operator*(const Poly& a, const Rational& c) {
        Poly r(a.nv_);
        if (c == 0) return r;
        for (auto& [e, co] : a.terms_) r.terms_[e] = co * c;
        return r;
    }
    friend Poly operator*(const Rational& c, const Poly& a) { return a * c; }

    Poly& operator+=(const Poly& b) { return *this = *this + b; }
    Poly& operator-=(const Poly& b) { return *this = *this - b; }
    Poly& operator*=(const Poly& b) { return *this = *this * b; }

    bool operator==(const Poly& o) const { return nv_ == o.nv_ && terms_ == o.terms_; }
    bool operator!=(const Poly& o) const { return !(*this == o); }
    bool operator<(const Poly& o) const {
        // arbitrary but strict; lets Poly key std::set/std::map
        if (nv_ != o.nv_) return nv_ < o.nv_;
        auto ia = terms_.begin(), ib = o.terms_.begin();
        for (; ia != terms_.end() && ib != o.terms_.end(); ++ia, ++ib) {
            DegRevLexLess less;
            if (less(ia->first, ib->first)) return true;
            if (less(ib->first, ia->first)) return false;
            int s = cmp(ia->second, ib->second);
            if (s != 0) return s < 0;
        }
        return ia == terms_.end() && ib != o.terms_.end();
    }

    // substitute each variable i by image[i]
    Poly substitute(const std::vector<Poly>& image) const {
        Poly r(image.empty() ? nv_ : image[0].nvars());
        for (auto& [e, c] : terms_) {
            Poly t(r.nvars(), c);
            for (size_t i = 0; i < e.size(); ++i)
                for (int k = 0; k < e[i]; ++k) t *= image[i];
            r += t;
        }
        return r;
    }

    Poly eval_var(int var, const Rational& v) const {
        Poly r(nv_);
        for (auto& [e, c] : terms_) {
            Rational cc = c;
            for (int k = 0; k < e[var]; ++k) cc *= v;
            Exponents e2 = e;
            e2[var] = 0;
            r.add_term(e2, cc);
        }
        return r;
    }

private:
    int nv_;
    TermMap terms_;
};

// exact division; nullopt when d does not divide p
inline std::optional<Poly> poly_divide_exact(const Poly& p, const Poly& d) {
    if (d.is_zero()) return std::nullopt;
    Poly rem = p, quo(p.nvars());
    const Exponents& de = d.leading_exponents();
    const Rational& dc = d.leading_coeff();
    while (!rem.is_zero()) {
        const Exponents& re = rem.leading_exponents();
        Exponents qe(re.size());
        for (size_t i = 0; i < re.size(); ++i) {
            qe[i] = re[i] - de[i];
            if (qe[i] < 0) return std::nullopt;
        }
        Rational qc = rem.leading_coeff() / dc;
        Poly t = Poly::monomial(p.nvars(), qe, qc);
        quo += t;
        rem -= t * d;
    }
    return quo;
}

inline bool poly_divides(const Poly& d, const Poly& p) {
    return poly_divide_exact(p, d).has_value();
}

namespace detail {

// view of p as a univariate polynomial in variable `var`, coefficients
// are polynomials with var-exponent zero
inline std::map<int, Poly> coeffs_in(const Poly& p, int var) {
    std::map<int, Poly> out;
    for (auto& [e, c] : p.terms()) {
        Exponents e2 = e;
        int k = e2[var];
        e2[var] = 0;
        auto it = out.find(k);
        if (it == out.end()) it = out.emplace(k, Poly(p.nvars())).first;
        it->second.add_term(e2, c);
    }
    return out;
}

inline Poly from_coeffs_in(int nvars, int var, const std::map<int, Poly>& cs) {
    Poly r(nvars);
    for (auto& [k, c] : cs) {
        Exponents xe(nvars, 0);
        xe[var] = k;
        r += c * Poly::monomial(nvars, xe, 1);
    }
    return r;
}

// pseudo-remainder of a by b with respect to var (deg_v a >= deg_v b >= 0)
inline Poly prem(Poly a, const Poly& b, int var) {
    int db = b.degree_in(var);
    auto bc = coeffs_in(b, var);
    Poly lb = bc.rbegin()->second;
    int da = a.degree_in(var);
    while (!a.is_zero() && (da = a.degree_in(var)) >= db) {
        auto ac = coeffs_in(a, var);
        Poly la = ac.rbegin()->second;
        Exponents xe(a.nvars(), 0);
        xe[var] = da - db;
        a = a * lb - la * Poly::monomial(a.nvars(), xe, 1) * b;
        if (!a.is_zero() && a.degree_in(var) == da) {
            // leading term must have dropped; guard against bookkeeping bugs
            auto ac2 = coeffs_in(a, var);
            if (ac2.rbegin()->first == da) throw std::logic_error("prem: degree did not drop");
        }
    }
    return a;
}

} // namespace detail

Poly poly_gcd(const Poly& p, const Poly& q);

namespace detail {

// content of p with respect to var: gcd of its coefficient polynomials
inline Poly content_in(const Poly& p, int var) {
    Poly g(p.nvars());
    for (auto& [k, c] : coeffs_in(p, var)) g = poly_gcd(g, c);
    return g;
}

} // namespace detail

// monic under the global order
inline Poly poly_monic(const Poly& p) {
    if (p.is_zero()) return p;
    return p * (Rational(1) / p.leading_coeff());
}

// gcd normalized to leading coefficient 1; gcd(0,0) = 0
inline Poly poly_gcd(const Poly& p, const Poly& q) {
    if (p.is_zero()) return poly_monic(q);
    if (q.is_zero()) return poly_monic(p);
    int var = -1;
    for (int i = p.nvars() - 1; i >= 0; --i)
        if (p.degree_in(i) > 0 || q.degree_in(i) > 0) { var = i; break; }
    if (var < 0) return Poly(p.nvars(), 1); // both nonzero constants
    if (p.degree_in(var) == 0 || q.degree_in(var) == 0) {
        // one argument is free of var: gcd divides both contents
        Poly cp = detail::content_in(p, var), cq = detail::content_in(q, var);
        return poly_gcd(cp, cq);
    }
    Poly cp = detail::content_in(p, var), cq = detail::content_in(q, var);
    Poly a = *poly_divide_exact(p, cp), b = *poly_divide_exact(q, cq);
    if (a.degree_in(var) < b.degree_in(var)) std::swap(a, b);
    // primitive polynomial remainder sequence
    while (true) {
        Poly r = detail::prem(a, b, var);
        if (r.is_zero()) break;
        if (r.degree_in(var) == 0) { b = Poly(p.nvars(), 1); break; }
        a = b;
        b = *poly_divide_exact(r, detail::content_in(r, var));
    }
    Poly cont = poly_gcd(cp, cq);
    if (b.degree_in(var) > 0) b = *poly_divide_exact(b, detail::content_in(b, var));
    return poly_monic(cont * b);
}

inline Poly poly_lcm(const Poly& p, const Poly& q) {
    if (p.is_zero() || q.is_zero()) return Poly(p.nvars());
    Poly g = poly_gcd(p, q);
    return poly_monic(*poly_divide_exact(p * q, g));
}

// ---------------------------------------------------------------------------
// text form: terms like `3/2*x1^2*x3 - x2`; variable names resolved by caller

inline std::string poly_to_string(const Poly& p,
                                  const std::vector<std::string>& names) {
    if (p.is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    // print highest terms first
    for (auto it = p.terms().rbegin(); it != p.terms().rend(); ++it) {
        const auto& [e, c] = *it;
        Rational ca = abs(c);
        if (first) {
            if (c < 0) os << "-";
            first = false;
        } else {
            os << (c < 0 ? " - " : " + ");
        }
        bool printed = false;
        if (ca != 1 || exp_degree(e) == 0) {
            os << ca.get_str();
            printed = true;
        }
        for (size_t i = 0; i < e.size(); ++i) {
            if (e[i] == 0) continue;
            if (printed) os << "*";
            os << names.at(i);
            if (e[i] > 1) os << "^" << e[i];
            printed = true;
        }
    }
    return os.str();
}

inline std::vector<std::string> default_var_names(int nvars, const std::string& stem = "x") {
    std::vector<std::string> v;
    for (int i = 0; i < nvars; ++i) v.push_back(stem + std::to_string(i + 1));
    return v;
}

namespace detail {

struct PolyParser {
    const std::string& s;
    size_t pos = 0;
    int nvars;
    const std::vector<std::string>& names;

    PolyParser(const std::string& src, int nv, const std::vector<std::string>& nm)
        : s(src), nvars(nv), names(nm) {}

    void skip_ws() {
        while (pos < s.size() && std::isspace((unsigned char)s[pos])) ++pos;
    }
    bool eat(char c) {
        skip_ws();
        if (pos < s.size() && s[pos] == c) { ++pos; return true; }
        return false;
    }
    [[noreturn]] void fail(const std::string& what) {
        throw std::invalid_argument("polynomial parse error at position " +
                                    std::to_string(pos) + ": " + what);
    }

    Poly parse() {
        Poly r = parse_expr();
        skip_ws();
        if (pos != s.size()) fail("trailing input");
        return r;
    }
    Poly parse_expr() {
        Poly r = parse_term();
        while (true) {
            skip_ws();
            if (eat('+')) r += parse_term();
            else if (eat('-')) r -= parse_term();
            else return r;
        }
    }
    Poly parse_term() {
        Poly r = parse_factor();
        while (true) {
            skip_ws();
            if (eat('*')) {
                r *= parse_factor();
            } else if (pos < s.size() &&
                       (std::isalpha((unsigned char)s[pos]) || s[pos] == '(')) {
                r *= parse_factor(); // implicit multiplication, e.g. 2x1
            } else {
                return r;
            }
        }
    }
    Poly parse_factor() {
        Poly base = parse_base();
        skip_ws();
        if (eat('^')) {
            int k = parse_int();
            if (k < 0) fail("negative exponent");
            Poly r(nvars, 1);
            for (int i = 0; i < k; ++i) r *= base;
            return r;
        }
        return base;
    }
    Poly parse_base() {
        skip_ws();
        if (pos >= s.size()) fail("unexpected end");
        if (eat('(')) {
            Poly r = parse_expr();
            if (!eat(')')) fail("expected )");
            return r;
        }
        if (s[pos] == '-') { ++pos; return -parse_factor(); }
        if (std::isdigit((unsigned char)s[pos])) return Poly(nvars, parse_rational());
        if (std::isalpha((unsigned char)s[pos])) {
            std::string name;
            while (pos < s.size() &&
                   (std::isalnum((unsigned char)s[pos]) || s[pos] == '_'))
                name += s[pos++];
            for (size_t i = 0; i < names.size(); ++i)
                if (names[i] == name) return Poly::variable(nvars, (int)i);
            fail("unknown variable '" + name + "'");
        }
        fail("unexpected character");
    }
    int parse_int() {
        skip_ws();
        size_t start = pos;
        if (pos < s.size() && s[pos] == '-') ++pos;
        while (pos < s.size() && std::isdigit((unsigned char)s[pos])) ++pos;
        if (pos == start) fail("expected integer");
        return std::stoi(s.substr(start, pos - start));
    }
    Rational parse_rational() {
        size_t start = pos;
        while (pos < s.size() && std::isdigit((unsigned char)s[pos])) ++pos;
        std::string num = s.substr(start, pos - start);
        size_t save = pos;
        skip_ws();
        if (pos < s.size() && s[pos] == '/') {
            ++pos;
            skip_ws();
            size_t ds = pos;
            while (pos < s.size() && std::isdigit((unsigned char)s[pos])) ++pos;
            if (pos > ds) return rational_from_string(num + "/" + s.substr(ds, pos - ds));
        }
        pos = save;
        return rational_from_string(num);
    }
};

} // namespace detail

inline Poly poly_from_string(const std::string& text, int nvars,
                             const std::vector<std::string>& names) {
    return detail::PolyParser(text, nvars, names).parse();
}

inline Poly poly_from_string(const std::string& text, int nvars) {
    return poly_from_string(text, nvars, default_var_names(nvars));
}

} // namespace invsys
