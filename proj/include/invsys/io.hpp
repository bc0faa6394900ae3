#pragma once

// Input formats for systems.
//
// DSL: a header line `n=3 m=1 params=a,b` followed by one equation per line,
// e.g. `y[1,0,1] - y[0,1,0] = 0` or `y2[0,0,0,1] = 0`. Coefficients may be
// rationals or polynomials in the declared parameters: `y1[1] - a*y2[0] = 0`.
//
// JSON: {"n":3,"m":1,"params":[],"equations":[[{"k":1,"mu":[0,0,2],"c":"1"}],...]}

#include "invsys/system.hpp"

#include <json.hpp>

#include <sstream>

namespace invsys {

struct ParseError : std::runtime_error {
    int line;
    ParseError(int line_, const std::string& what)
        : std::runtime_error("line " + std::to_string(line_) + ": " + what), line(line_) {}
};

namespace detail {

// value of a sub-expression while parsing an equation: affine in the jets
struct LinExpr {
    RatFun scalar;
    std::map<Jet, RatFun, JetLess> lin;

    explicit LinExpr(int fnv) : scalar(fnv) {}
};

class EquationParser {
public:
    EquationParser(const std::string& src, int line, const PDSystem& sys)
        : s_(src), line_(line), sys_(sys), fnv_(sys.field.nvars()) {}

    Equation parse() {
        LinExpr lhs = parse_expr();
        skip_ws();
        if (!eat('=')) fail("expected '=' in equation");
        LinExpr rhs = parse_expr();
        skip_ws();
        if (pos_ != s_.size()) fail("trailing input after equation");
        Equation e(fnv_);
        for (auto& [j, c] : lhs.lin) e.add_term(j, c);
        for (auto& [j, c] : rhs.lin) e.add_term(j, -c);
        RatFun sc = lhs.scalar - rhs.scalar;
        if (!sc.is_zero()) fail("inhomogeneous equation (nonzero constant part)");
        return e;
    }

private:
    const std::string& s_;
    size_t pos_ = 0;
    int line_;
    const PDSystem& sys_;
    int fnv_;

    [[noreturn]] void fail(const std::string& what) { throw ParseError(line_, what); }
    void skip_ws() {
        while (pos_ < s_.size() && std::isspace((unsigned char)s_[pos_])) ++pos_;
    }
    bool eat(char c) {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == c) { ++pos_; return true; }
        return false;
    }

    LinExpr parse_expr() {
        LinExpr r = parse_term();
        while (true) {
            skip_ws();
            if (eat('+')) r = add(r, parse_term(), 1);
            else if (eat('-')) r = add(r, parse_term(), -1);
            else return r;
        }
    }
    LinExpr add(LinExpr a, const LinExpr& b, int sign) {
        RatFun sg(fnv_, sign);
        a.scalar += b.scalar * sg;
        for (auto& [j, c] : b.lin) {
            auto it = a.lin.find(j);
            if (it == a.lin.end()) a.lin.emplace(j, c * sg);
            else {
                it->second += c * sg;
                if (it->second.is_zero()) a.lin.erase(it);
            }
        }
        return a;
    }
    LinExpr parse_term() {
        LinExpr r = parse_factor();
        while (true) {
            skip_ws();
            bool star = eat('*');
            skip_ws();
            bool more = star || (pos_ < s_.size() &&
                                 (std::isalpha((unsigned char)s_[pos_]) || s_[pos_] == '('));
            if (!more) return r;
            r = mul(r, parse_factor());
        }
    }
    LinExpr mul(const LinExpr& a, const LinExpr& b) {
        if (!a.lin.empty() && !b.lin.empty())
            fail("nonlinear term (product of jets)");
        const LinExpr& jets = a.lin.empty() ? b : a;
        const RatFun& sc = a.lin.empty() ? a.scalar : b.scalar;
        LinExpr r(fnv_);
        r.scalar = jets.scalar * sc;
        for (auto& [j, c] : jets.lin) {
            RatFun v = c * sc;
            if (!v.is_zero()) r.lin.emplace(j, v);
        }
        return r;
    }
    LinExpr parse_factor() {
        LinExpr base = parse_base();
        skip_ws();
        if (eat('^')) {
            if (!base.lin.empty()) fail("nonlinear term (jet raised to a power)");
            skip_ws();
            size_t st = pos_;
            while (pos_ < s_.size() && std::isdigit((unsigned char)s_[pos_])) ++pos_;
            if (pos_ == st) fail("expected exponent");
            int k = std::stoi(s_.substr(st, pos_ - st));
            LinExpr r(fnv_);
            r.scalar = RatFun(fnv_, 1);
            for (int i = 0; i < k; ++i) r.scalar *= base.scalar;
            return r;
        }
        return base;
    }
    LinExpr parse_base() {
        skip_ws();
        if (pos_ >= s_.size()) fail("unexpected end of equation");
        if (s_[pos_] == '(') {
            ++pos_;
            LinExpr r = parse_expr();
            if (!eat(')')) fail("expected ')'");
            return r;
        }
        if (s_[pos_] == '-') {
            ++pos_;
            LinExpr r = parse_factor();
            return add(LinExpr(fnv_), r, -1);
        }
        if (std::isdigit((unsigned char)s_[pos_])) {
            LinExpr r(fnv_);
            r.scalar = RatFun(fnv_, parse_rational());
            return r;
        }
        if (std::isalpha((unsigned char)s_[pos_])) return parse_symbol();
        fail("unexpected character");
    }
    LinExpr parse_symbol() {
        size_t st = pos_;
        while (pos_ < s_.size() &&
               (std::isalnum((unsigned char)s_[pos_]) || s_[pos_] == '_'))
            ++pos_;
        std::string name = s_.substr(st, pos_ - st);
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == '[') {
            // jet atom: y[..] or y<k>[..]
            if (name.empty() || name[0] != 'y') fail("unknown jet symbol '" + name + "'");
            int k = 1;
            if (name.size() > 1) {
                try {
                    k = std::stoi(name.substr(1));
                } catch (...) {
                    fail("bad unknown index in '" + name + "'");
                }
            }
            if (k < 1 || k > sys_.m) fail("unknown index out of range in '" + name + "'");
            ++pos_; // '['
            Exponents mu;
            while (true) {
                skip_ws();
                size_t ds = pos_;
                while (pos_ < s_.size() && std::isdigit((unsigned char)s_[pos_])) ++pos_;
                if (pos_ == ds) fail("expected multi-index entry");
                mu.push_back(std::stoi(s_.substr(ds, pos_ - ds)));
                skip_ws();
                if (eat(',')) continue;
                if (eat(']')) break;
                fail("expected ',' or ']' in multi-index");
            }
            if ((int)mu.size() != sys_.n) fail("multi-index length does not match n");
            LinExpr r(fnv_);
            r.lin.emplace(Jet{k, mu}, RatFun(fnv_, 1));
            return r;
        }
        // parameter
        auto& params = sys_.field.params;
        for (size_t i = 0; i < params.size(); ++i)
            if (params[i] == name) {
                LinExpr r(fnv_);
                r.scalar = RatFun::variable(fnv_, (int)i);
                return r;
            }
        fail("unknown symbol '" + name + "'");
    }
    Rational parse_rational() {
        size_t st = pos_;
        while (pos_ < s_.size() && std::isdigit((unsigned char)s_[pos_])) ++pos_;
        std::string num = s_.substr(st, pos_ - st);
        size_t save = pos_;
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == '/') {
            ++pos_;
            skip_ws();
            size_t ds = pos_;
            while (pos_ < s_.size() && std::isdigit((unsigned char)s_[pos_])) ++pos_;
            if (pos_ > ds) return rational_from_string(num + "/" + s_.substr(ds, pos_ - ds));
        }
        pos_ = save;
        return rational_from_string(num);
    }
};

} // namespace detail

inline PDSystem parse_system_dsl(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    PDSystem sys;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        bool blank = true;
        for (char c : line)
            if (!std::isspace((unsigned char)c)) { blank = false; break; }
        if (blank) continue;
        if (!have_header) {
            // header: n=.. m=.. [params=a,b]
            std::istringstream hs(line);
            std::string tok;
            sys.n = sys.m = 0;
            while (hs >> tok) {
                size_t eq = tok.find('=');
                if (eq == std::string::npos) throw ParseError(lineno, "bad header token '" + tok + "'");
                std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
                try {
                    if (key == "n") sys.n = std::stoi(val);
                    else if (key == "m") sys.m = std::stoi(val);
                    else if (key == "params") {
                        std::istringstream ps(val);
                        std::string p;
                        while (std::getline(ps, p, ','))
                            if (!p.empty()) sys.field.params.push_back(p);
                    } else throw ParseError(lineno, "unknown header key '" + key + "'");
                } catch (ParseError&) {
                    throw;
                } catch (...) {
                    throw ParseError(lineno, "bad header value '" + val + "'");
                }
            }
            if (sys.n < 1 || sys.m < 1) throw ParseError(lineno, "header must set n>=1 and m>=1");
            have_header = true;
            continue;
        }
        sys.eqs.push_back(detail::EquationParser(line, lineno, sys).parse());
    }
    if (!have_header) throw ParseError(0, "missing header line (n=.. m=..)");
    if (sys.eqs.empty()) throw ParseError(lineno, "system has no equations");
    return sys;
}

inline PDSystem parse_system_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const std::exception& e) {
        throw ParseError(0, std::string("bad JSON: ") + e.what());
    }
    try {
        PDSystem sys;
        sys.n = j.at("n").get<int>();
        sys.m = j.at("m").get<int>();
        if (j.contains("params"))
            for (auto& p : j.at("params")) sys.field.params.push_back(p.get<std::string>());
        if (sys.n < 1 || sys.m < 1) throw ParseError(0, "need n>=1 and m>=1");
        int fnv = sys.field.nvars();
        auto names = sys.field.var_names();
        for (auto& je : j.at("equations")) {
            Equation e(fnv);
            for (auto& jt : je) {
                int k = jt.at("k").get<int>();
                if (k < 1 || k > sys.m) throw ParseError(0, "unknown index out of range");
                Exponents mu = jt.at("mu").get<std::vector<int>>();
                if ((int)mu.size() != sys.n) throw ParseError(0, "multi-index length mismatch");
                std::string c = jt.at("c").is_string() ? jt.at("c").get<std::string>()
                                                       : jt.at("c").dump();
                e.add_term(Jet{k, mu}, RatFun(poly_from_string(c, fnv, names)));
            }
            if (!e.is_zero()) sys.eqs.push_back(e);
        }
        if (sys.eqs.empty()) throw ParseError(0, "system has no equations");
        return sys;
    } catch (ParseError&) {
        throw;
    } catch (const std::exception& e) {
        throw ParseError(0, std::string("bad system JSON: ") + e.what());
    }
}

// accepts either format; JSON when the first non-space character is '{'
inline PDSystem parse_system(const std::string& text) {
    for (char c : text) {
        if (std::isspace((unsigned char)c)) continue;
        return c == '{' ? parse_system_json(text) : parse_system_dsl(text);
    }
    throw ParseError(0, "empty input");
}

inline nlohmann::ordered_json system_to_json(const PDSystem& s) {
    nlohmann::ordered_json j;
    j["n"] = s.n;
    j["m"] = s.m;
    j["params"] = s.field.params;
    auto names = s.field.var_names();
    nlohmann::ordered_json eqs = nlohmann::ordered_json::array();
    for (auto& e : s.eqs) {
        nlohmann::ordered_json terms = nlohmann::ordered_json::array();
        for (auto it = e.terms().rbegin(); it != e.terms().rend(); ++it) {
            nlohmann::ordered_json t;
            t["k"] = it->first.k;
            t["mu"] = it->first.mu;
            t["c"] = ratfun_to_string(it->second, names);
            terms.push_back(t);
        }
        eqs.push_back(terms);
    }
    j["equations"] = eqs;
    return j;
}

} // namespace invsys
