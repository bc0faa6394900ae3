#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "invsys/involution.hpp"
#include "invsys/io.hpp"

#include <random>
#include <set>

using namespace invsys;

namespace {

PDSystem sys(const std::string& dsl) { return parse_system_dsl(dsl); }

Equation eq(std::initializer_list<std::pair<Jet, int>> terms) {
    Equation e(0);
    for (auto& [j, c] : terms) e.add_term(j, RatFun(0, c));
    return e;
}

bool same_equations(const std::vector<Equation>& a, const std::vector<Equation>& b) {
    if (a.size() != b.size()) return false;
    for (auto& x : a) {
        bool found = false;
        for (auto& y : b)
            if (x.normalized() == y.normalized()) { found = true; break; }
        if (!found) return false;
    }
    return true;
}

const char* EX_213 = "n=3 m=1\n"
                     "y[0,0,2] = 0\n"
                     "y[1,0,1] - y[0,1,0] = 0\n";

const char* EX_512 = "n=2 m=1\n"
                     "y[0,3] = 0\ny[1,2] = 0\ny[2,1] = 0\ny[3,0] = 0\n"
                     "y[0,2] = 0\ny[1,1] = 0\n";

const char* EX_513 = "n=3 m=1\n"
                     "y[0,0,2] = 0\n"
                     "y[0,1,1] - y[2,0,0] = 0\n"
                     "y[0,2,0] = 0\n";

const char* EX_314 = "n=4 m=3\n"
                     "y1[0,0,0,1] = 0\n"
                     "y2[0,0,0,1] = 0\n"
                     "y3[0,0,0,1] = 0\n"
                     "y3[0,0,1,0] + y2[0,1,0,0] + y1[1,0,0,0] = 0\n";

} // namespace

TEST_CASE("multiplicative variables by class, none for lower order") {
    PDSystem s = sys(EX_213); // order 2
    Equation e33 = eq({{Jet{1, {0, 0, 2}}, 1}});
    Equation e13 = eq({{Jet{1, {1, 0, 1}}, 1}, {Jet{1, {0, 1, 0}}, -1}});
    Equation e2 = eq({{Jet{1, {0, 1, 0}}, 1}});
    CHECK(multiplicative_vars(e33, 2, 3) == std::vector<int>{1, 2, 3});
    CHECK(multiplicative_vars(e13, 2, 3) == std::vector<int>{1});
    CHECK(multiplicative_vars(e2, 2, 3).empty());
    Equation e23 = eq({{Jet{1, {0, 1, 1}}, 1}});
    CHECK(multiplicative_vars(e23, 2, 3) == std::vector<int>{1, 2});
}

TEST_CASE("involution test on the reference systems") {
    SUBCASE("second order torsion system is not involutive") {
        CHECK_FALSE(involution_test(sys(EX_213)));
        auto defects = involution_defects(sys(EX_213));
        REQUIRE(defects.size() == 2);
        // one defect is the integrability condition y_23
        bool found = false;
        for (auto& d : defects)
            if (d == eq({{Jet{1, {0, 1, 1}}, 1}})) found = true;
        CHECK(found);
    }
    SUBCASE("its completed form is involutive") {
        PDSystem s = sys("n=3 m=1\n"
                         "y[0,0,2] = 0\ny[0,1,1] = 0\ny[0,2,0] = 0\n"
                         "y[1,0,1] - y[0,1,0] = 0\n");
        CHECK(involution_test(s));
    }
    SUBCASE("degenerate coordinates are also just 'not involutive'") {
        CHECK_FALSE(involution_test(sys("n=3 m=1\ny[2,0,0] = 0\ny[1,0,1] - y[0,1,0] = 0\n")));
    }
    SUBCASE("zero symbol system of mixed order is involutive") {
        CHECK(involution_test(sys(EX_512)));
    }
    SUBCASE("first order system with a divergence condition is involutive") {
        CHECK(involution_test(sys(EX_314)));
    }
}

TEST_CASE("completion of the second order system adds exactly y_23 and y_22") {
    CompletionResult r = complete(sys(EX_213));
    CHECK_FALSE(r.changed_coordinates);
    CHECK(r.rounds == 2);
    std::vector<Equation> expected = {
        eq({{Jet{1, {0, 0, 2}}, 1}}),
        eq({{Jet{1, {0, 1, 1}}, 1}}),
        eq({{Jet{1, {0, 2, 0}}, 1}}),
        eq({{Jet{1, {1, 0, 1}}, 1}, {Jet{1, {0, 1, 0}}, -1}}),
    };
    CHECK(same_equations(r.system.eqs, expected));
    CHECK(involution_test(r.system));
    // classes (3; 2, 2; 1)
    std::multiset<int> classes;
    for (auto& e : r.system.eqs) classes.insert(class_of(e.leading_jet().mu));
    CHECK(classes == std::multiset<int>{1, 2, 2, 3});
}

TEST_CASE("completion with an automatic coordinate change") {
    // y_1 = 0, y_23 = 0 has no finite involutive form in these coordinates
    PDSystem s = sys("n=3 m=1\ny[1,0,0] = 0\ny[0,1,1] = 0\n");
    CompletionResult r = complete(s, 1);
    CHECK(r.changed_coordinates);
    CHECK(involution_test(r.system));
    std::vector<long> alpha = characters(r.system);
    CHECK(alpha == std::vector<long>{2, 0, 0});
    CHECK(codimension(r.system) == 2);
    // characters are intrinsic: another seed gives the same values
    CompletionResult r2 = complete(s, 2);
    CHECK(characters(r2.system) == alpha);
    // the permuted starting point from the same ideal family behaves alike
    CompletionResult r3 = complete(sys("n=3 m=1\ny[2,0,0] = 0\ny[1,0,1] - y[0,1,0] = 0\n"), 1);
    CHECK(r3.changed_coordinates);
    CHECK(characters(r3.system) == std::vector<long>{2, 0, 0});
}

TEST_CASE("completion of the primary system prolongs to zero symbol") {
    CompletionResult r = complete(sys(EX_513));
    CHECK(involution_test(r.system));
    SymbolDims d = hilbert_dims(r.system, 6);
    CHECK(d.symbol[3] == 1);
    CHECK(d.symbol[4] == 0);
    CHECK(d.symbol[5] == 0);
    CHECK(d.total.back() == 8);
    CHECK(full_torsion_test(r.system));
    CHECK(codimension(r.system) == 3);
}

TEST_CASE("characters and codimension") {
    SUBCASE("completed second order system") {
        PDSystem s = complete(sys(EX_213)).system;
        CHECK(characters(s) == std::vector<long>{2, 0, 0});
        CHECK(codimension(s) == 2);
    }
    SUBCASE("only class 3 full") {
        PDSystem s = sys("n=3 m=1\ny[0,0,2] = 0\ny[0,1,1] = 0\ny[1,0,1] = 0\n");
        REQUIRE(involution_test(s));
        CHECK(characters(s) == std::vector<long>{2, 1, 0});
        CHECK(codimension(s) == 1);
    }
    SUBCASE("zero symbol gives zero characters and r = n") {
        PDSystem s = sys(EX_512);
        CHECK(characters(s) == std::vector<long>{0, 0});
        CHECK(codimension(s) == 2);
    }
    SUBCASE("divergence system") {
        PDSystem s = sys(EX_314);
        REQUIRE(involution_test(s));
        std::vector<long> a = characters(s);
        CHECK(a[3] == 0);       // class 4 is full
        CHECK(codimension(s) == 1);
    }
}

TEST_CASE("solution space dimensions") {
    SUBCASE("zero symbol system: parametric jets y, y_1, y_2, y_11") {
        PDSystem s = sys(EX_512);
        SymbolDims d = hilbert_dims(s, 5);
        CHECK(d.symbol == std::vector<long>{1, 2, 1, 0, 0, 0});
        CHECK(d.total == std::vector<long>{1, 3, 4, 4, 4, 4});
        auto p2 = parametric_jets(s, 2);
        REQUIRE(p2.size() == 1);
        CHECK(p2[0] == Jet{1, {2, 0}});
    }
    SUBCASE("free module grows without bound") {
        PDSystem s;
        s.n = 1;
        s.m = 1;
        SymbolDims d = hilbert_dims(s, 4);
        CHECK(d.symbol == std::vector<long>{1, 1, 1, 1, 1});
    }
    SUBCASE("cone combinatorics beyond the system order match dense elimination") {
        std::mt19937 rng(19);
        std::uniform_int_distribution<int> dmu(0, 2);
        int done = 0;
        for (int trial = 0; trial < 30 && done < 8; ++trial) {
            PDSystem s;
            s.n = 3;
            std::set<Exponents> used;
            for (int i = 0; i < 2; ++i) {
                Exponents mu = {dmu(rng), dmu(rng), dmu(rng)};
                if (exp_degree(mu) == 0 || !used.insert(mu).second) continue;
                s.eqs.push_back(eq({{Jet{1, mu}, 1}}));
            }
            if (s.eqs.empty()) continue;
            PDSystem inv;
            try {
                inv = complete(s, (unsigned)trial).system;
            } catch (const NonGenericSeed&) {
                continue;
            }
            int q = inv.order();
            for (int t = q + 1; t <= q + 3; ++t) {
                // dense oracle: jets of order t minus leaders of order t in
                // the full prolongation span
                Echelon span = prolongation_span(inv, t);
                long leaders = 0;
                for (auto& [lead, row] : span.rows())
                    if (lead.order() == t) ++leaders;
                long dense = (long)multi_indices_of_order(3, t).size() - leaders;
                CHECK((long)parametric_jets(inv, t).size() == dense);
            }
            ++done;
        }
        CHECK(done > 0);
    }
}

TEST_CASE("first order form") {
    SUBCASE("single second order ODE becomes the classic pair") {
        PDSystem s = sys("n=1 m=1\ny[2] = 0\n");
        REQUIRE(involution_test(s));
        FirstOrderForm f = spencer_form(s);
        REQUIRE(f.unknowns.size() == 2);
        CHECK(f.unknowns[0] == Jet{1, {0}});
        CHECK(f.unknowns[1] == Jet{1, {1}});
        std::vector<Equation> expected = {
            eq({{Jet{1, {1}}, 1}, {Jet{2, {0}}, -1}}), // z1' = z2
            eq({{Jet{2, {1}}, 1}}),                    // z2' = 0
        };
        CHECK(same_equations(f.system.eqs, expected));
        CHECK(f.system.order() == 1);
    }
    SUBCASE("defines the same solution spaces, shifted by q") {
        PDSystem s = complete(sys(EX_213)).system;
        int q = s.order();
        FirstOrderForm f = spencer_form(s);
        CHECK(f.system.m == 6); // parametric jets up to order 2
        for (auto& e : f.system.eqs) CHECK(e.order() == 1);
        PDSystem finv = complete(f.system, 3).system;
        SymbolDims orig = hilbert_dims(s, q + 4);
        SymbolDims red = hilbert_dims(finv, 4);
        for (int t = 0; t <= 4; ++t) CHECK(red.total[t] == orig.total[q + t]);
        // character inequalities hold for the first order form
        std::vector<long> a = characters(finv);
        for (size_t i = 0; i + 1 < a.size(); ++i) CHECK(a[i] >= a[i + 1]);
    }
}

TEST_CASE("full torsion test") {
    PDSystem tors = sys("n=2 m=1\ny[0,2] = 0\ny[1,1] = 0\n");
    REQUIRE(involution_test(tors));
    CHECK(full_torsion_test(tors));
    CHECK(full_torsion_test(sys(EX_314)));
    CHECK(full_torsion_test(complete(sys(EX_213)).system));
    // a free unknown is left over: not all of M is torsion
    PDSystem freeu = sys("n=1 m=2\ny1[1] = 0\n");
    CHECK_FALSE(full_torsion_test(freeu));
}

TEST_CASE("characteristic matrix keeps only the symbol part") {
    auto to_poly = [](const ChiPoly& p, int n) {
        Poly out(n);
        for (auto& [e, c] : p) out.add_term(e, c.constant_value());
        return out;
    };
    SUBCASE("before completion") {
        auto M = characteristic_matrix(sys(EX_213));
        REQUIRE(M.size() == 2);
        CHECK(to_poly(M[0][0], 3) == poly_from_string("x3^2", 3));
        CHECK(to_poly(M[1][0], 3) == poly_from_string("x1*x3", 3)); // y_2 dropped
    }
    SUBCASE("after completion") {
        auto M = characteristic_matrix(complete(sys(EX_213)).system);
        REQUIRE(M.size() == 4);
        std::vector<Poly> col;
        for (auto& row : M) col.push_back(to_poly(row[0], 3));
        std::vector<Poly> expected = {
            poly_from_string("x1*x3", 3), poly_from_string("x2^2", 3),
            poly_from_string("x2*x3", 3), poly_from_string("x3^2", 3)};
        for (auto& p : expected)
            CHECK(std::find(col.begin(), col.end(), p) != col.end());
    }
    SUBCASE("single equation") {
        auto M = characteristic_matrix(sys("n=1 m=1\ny[2] = 0\n"));
        REQUIRE(M.size() == 1);
        CHECK(to_poly(M[0][0], 1) == poly_from_string("x1^2", 1));
    }
}

TEST_CASE("completion output is involutive on random monomial systems") {
    std::mt19937 rng(43);
    std::uniform_int_distribution<int> dmu(0, 3), dn(1, 3);
    int done = 0;
    for (int trial = 0; trial < 40 && done < 12; ++trial) {
        PDSystem s;
        s.n = 3;
        std::set<Exponents> used;
        int cnt = dn(rng);
        for (int i = 0; i < cnt; ++i) {
            Exponents mu = {dmu(rng), dmu(rng), dmu(rng)};
            if (exp_degree(mu) == 0 || exp_degree(mu) > 3) continue;
            if (!used.insert(mu).second) continue;
            s.eqs.push_back(eq({{Jet{1, mu}, 1}}));
        }
        if (s.eqs.empty()) continue;
        try {
            CompletionResult r = complete(s, (unsigned)trial + 100);
            CHECK(involution_test(r.system));
            ++done;
        } catch (const NonGenericSeed&) {
            continue;
        }
    }
    CHECK(done >= 8);
}
