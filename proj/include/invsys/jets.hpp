#pragma once

// Jet coordinates y^k_mu and the fixed jet ordering.
//
// Ordering: by |mu| ascending, then by the same degrevlex rule used for
// monomials (which puts higher class first within an order), final tie by
// unknown index k ascending. The leading jet of an equation is the maximal
// jet under this order.

#include "invsys/polynomial.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace invsys {

struct ZeroOrder : std::domain_error {
    ZeroOrder() : std::domain_error("class of the zero multi-index is undefined") {}
};

// 1-based class: smallest i with mu_i != 0
inline int class_of(const Exponents& mu) {
    for (size_t i = 0; i < mu.size(); ++i)
        if (mu[i] != 0) return (int)i + 1;
    throw ZeroOrder();
}

inline Exponents mu_plus(const Exponents& mu, int i) {
    Exponents r = mu;
    r.at(i - 1) += 1;
    return r;
}

struct Jet {
    int k = 1; // unknown index, 1-based
    Exponents mu;

    int order() const { return exp_degree(mu); }
    bool operator==(const Jet& o) const { return k == o.k && mu == o.mu; }
    bool operator!=(const Jet& o) const { return !(*this == o); }
};

struct JetLess {
    bool operator()(const Jet& a, const Jet& b) const {
        int da = a.order(), db = b.order();
        if (da != db) return da < db;
        DegRevLexLess mless;
        if (mless(a.mu, b.mu)) return true;
        if (mless(b.mu, a.mu)) return false;
        return a.k < b.k;
    }
};

inline int compare_jets(const Jet& a, const Jet& b) {
    JetLess less;
    if (less(a, b)) return -1;
    if (less(b, a)) return 1;
    return 0;
}

inline std::string jet_to_string(const Jet& j, int m) {
    std::string s = "y";
    if (m > 1) s += std::to_string(j.k);
    if (j.order() == 0) return s;
    s += "_";
    for (size_t i = 0; i < j.mu.size(); ++i)
        for (int t = 0; t < j.mu[i]; ++t) s += std::to_string(i + 1);
    return s;
}

// enumerate all multi-indices of length n with |mu| = deg, ascending degrevlex
inline std::vector<Exponents> multi_indices_of_order(int n, int deg) {
    std::vector<Exponents> out;
    Exponents cur(n, 0);
    // depth-first over positions
    std::function<void(int, int)> rec = [&](int pos, int left) {
        if (pos == n - 1) {
            cur[pos] = left;
            out.push_back(cur);
            return;
        }
        for (int v = 0; v <= left; ++v) {
            cur[pos] = v;
            rec(pos + 1, left - v);
        }
        cur[pos] = 0;
    };
    if (n == 0) {
        if (deg == 0) out.push_back({});
        return out;
    }
    rec(0, deg);
    std::sort(out.begin(), out.end(), DegRevLexLess{});
    return out;
}

} // namespace invsys
