#pragma once

#include <gmpxx.h>
#include <stdexcept>
#include <string>

namespace invsys {

// Exact rational scalar. mpq_class keeps gcd(num,den)=1 and den>=1 after
// canonicalize(); every constructor path below canonicalizes.
using Rational = mpq_class;

inline Rational rational_from_string(const std::string& s) {
    Rational r;
    if (r.set_str(s, 10) != 0) throw std::invalid_argument("bad rational literal: " + s);
    r.canonicalize();
    return r;
}

inline std::string to_string(const Rational& r) { return r.get_str(); }

} // namespace invsys
