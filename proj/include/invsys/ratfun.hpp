#pragma once

// Field of fractions of Q[x_1..x_k]. Kept reduced with a monic denominator,
// so equality is structural. With k = 0 this degenerates to plain rationals.

#include "invsys/polynomial.hpp"

#include <stdexcept>
#include <utility>

namespace invsys {

struct ZeroDenominator : std::domain_error {
    ZeroDenominator() : std::domain_error("rational function with zero denominator") {}
};

class RatFun {
public:
    RatFun() : num_(0), den_(0, 1) {}
    explicit RatFun(int nvars) : num_(nvars), den_(nvars, 1) {}
    RatFun(int nvars, const Rational& c) : num_(nvars, c), den_(nvars, 1) {}
    explicit RatFun(const Poly& p) : num_(p), den_(p.nvars(), 1) {}
    RatFun(Poly num, Poly den) : num_(std::move(num)), den_(std::move(den)) {
        normalize();
    }

    static RatFun variable(int nvars, int i) { return RatFun(Poly::variable(nvars, i)); }

    const Poly& num() const { return num_; }
    const Poly& den() const { return den_; }
    int nvars() const { return num_.nvars(); }
    bool is_zero() const { return num_.is_zero(); }
    bool is_polynomial() const { return den_.is_constant(); }
    bool is_constant() const { return num_.is_constant() && den_.is_constant(); }
    Rational constant_value() const {
        return num_.constant_coeff() / den_.constant_coeff();
    }

    friend RatFun operator+(const RatFun& a, const RatFun& b) {
        return RatFun(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
    }
    friend RatFun operator-(const RatFun& a, const RatFun& b) {
        return RatFun(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
    }
    friend RatFun operator*(const RatFun& a, const RatFun& b) {
        return RatFun(a.num_ * b.num_, a.den_ * b.den_);
    }
    friend RatFun operator/(const RatFun& a, const RatFun& b) {
        if (b.is_zero()) throw ZeroDenominator();
        return RatFun(a.num_ * b.den_, a.den_ * b.num_);
    }
    RatFun operator-() const {
        RatFun r = *this;
        r.num_ = -r.num_;
        return r;
    }
    RatFun& operator+=(const RatFun& b) { return *this = *this + b; }
    RatFun& operator-=(const RatFun& b) { return *this = *this - b; }
    RatFun& operator*=(const RatFun& b) { return *this = *this * b; }
    RatFun& operator/=(const RatFun& b) { return *this = *this / b; }

    bool operator==(const RatFun& o) const { return num_ == o.num_ && den_ == o.den_; }
    bool operator!=(const RatFun& o) const { return !(*this == o); }

    RatFun eval_var(int var, const Rational& v) const {
        Poly d = den_.eval_var(var, v);
        if (d.is_zero()) throw ZeroDenominator();
        return RatFun(num_.eval_var(var, v), d);
    }

private:
    void normalize() {
        if (den_.is_zero()) throw ZeroDenominator();
        if (num_.is_zero()) {
            den_ = Poly(num_.nvars(), 1);
            return;
        }
        Poly g = poly_gcd(num_, den_);
        if (!g.is_constant()) {
            num_ = *poly_divide_exact(num_, g);
            den_ = *poly_divide_exact(den_, g);
        }
        Rational lc = den_.leading_coeff();
        num_ = num_ * (Rational(1) / lc);
        den_ = den_ * (Rational(1) / lc);
    }

    Poly num_, den_;
};

inline RatFun ratfn_normalize(const Poly& num, const Poly& den) {
    return RatFun(num, den);
}

// Scale a row of fractions to polynomials by the lcm of the denominators.
// Returns (scaled row, common). Dividing the scaled row by common recovers
// the input exactly; when possible a shared polynomial content is divided
// out of both so the scaled row has content gcd 1.
inline std::pair<std::vector<Poly>, Poly>
clear_denominators(const std::vector<RatFun>& row) {
    if (row.empty()) throw std::invalid_argument("clear_denominators: empty row");
    int nv = row[0].nvars();
    Poly common(nv, 1);
    for (auto& f : row)
        if (!f.is_zero()) common = poly_lcm(common, f.den());
    std::vector<Poly> out;
    out.reserve(row.size());
    for (auto& f : row)
        out.push_back(f.num() * *poly_divide_exact(common, f.den()));
    Poly g(nv);
    for (auto& p : out) g = poly_gcd(g, p);
    if (!g.is_constant() && !g.is_zero() && poly_divides(g, common)) {
        for (auto& p : out) p = *poly_divide_exact(p, g);
        common = *poly_divide_exact(common, g);
    }
    return {out, common};
}

inline std::string ratfun_to_string(const RatFun& f, const std::vector<std::string>& names) {
    if (f.is_polynomial()) return poly_to_string(f.num(), names);
    std::string n = poly_to_string(f.num(), names);
    std::string d = poly_to_string(f.den(), names);
    if (f.num().terms().size() > 1) n = "(" + n + ")";
    if (f.den().terms().size() > 1) d = "(" + d + ")";
    return n + "/" + d;
}

} // namespace invsys
