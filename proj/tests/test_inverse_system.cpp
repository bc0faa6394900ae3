#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "invsys/dual.hpp"
#include "invsys/io.hpp"
#include "invsys/localize.hpp"

#include <algorithm>

using namespace invsys;

namespace {

PDSystem sys(const std::string& dsl) { return parse_system_dsl(dsl); }

Equation eq(std::initializer_list<std::pair<Jet, int>> terms) {
    Equation e(0);
    for (auto& [j, c] : terms) e.add_term(j, RatFun(0, c));
    return e;
}

Equation eqf(int fnv, std::initializer_list<std::pair<Jet, Poly>> terms) {
    Equation e(fnv);
    for (auto& [j, c] : terms) e.add_term(j, RatFun(c));
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

bool commuting(const DualSpace& R) {
    for (size_t i = 0; i < R.mult.size(); ++i)
        for (size_t j = i + 1; j < R.mult.size(); ++j)
            if (!(R.mult[i] * R.mult[j] == R.mult[j] * R.mult[i])) return false;
    return true;
}

// every prolongation of the system pairs to zero against the written-out
// coefficients of a genuine solution
bool solves(const Equation& E, const PDSystem& s) {
    int q = E.order();
    Echelon span = prolongation_span(s, q);
    for (auto& [lead, row] : span.rows()) {
        RatFun acc(s.field.nvars());
        for (auto& [j, c] : row.terms()) acc += c * E.coeff(j);
        if (!acc.is_zero()) return false;
    }
    return true;
}

Vec unit(const DualSpace& R, const Jet& j) {
    Vec v(R.dim(), RatFun(R.fnv()));
    int u = R.index_of(j);
    REQUIRE(u >= 0);
    v[u] = RatFun(R.fnv(), 1);
    return v;
}

const MaximalPoint& point_with_multiplicity(const MaximalPointList& pts, int mult) {
    for (auto& p : pts.points)
        if (p.multiplicity == mult) return p;
    REQUIRE(false);
    return pts.points.front();
}

// a second-order scalar ODE system whose solution space is spanned by the
// exponential-style pair f' (even part) and f'' (odd part)
const char* ODE_PAIR = "n=1 m=1\n"
                       "y[2] - y[0] = 0\n";

// the monomial ideal (x2^2, x1*x2, x1^3) written as an involutive system
const char* MONOMIAL_CUBIC = "n=2 m=1\n"
                             "y[0,3] = 0\n"
                             "y[1,2] = 0\n"
                             "y[2,1] = 0\n"
                             "y[3,0] = 0\n"
                             "y[0,2] = 0\n"
                             "y[1,1] = 0\n";

// needs one prolongation before the multiplication table closes up
const char* WAVE_LIKE = "n=3 m=1\n"
                        "y[0,0,2] = 0\n"
                        "y[0,1,1] - y[2,0,0] = 0\n"
                        "y[0,2,0] = 0\n";

const char* FLOW_SPLIT = "n=3 m=1\n"
                         "y[0,0,2] = 0\n"
                         "y[0,1,1] - y[1,0,1] = 0\n"
                         "y[0,2,0] - y[1,1,0] = 0\n";

const char* SHEAR_FAMILY = "n=2 m=1 params=a\n"
                           "y[0,2] = 0\n"
                           "y[1,1] - a*y[0,1] = 0\n"
                           "y[2,0] - a*y[1,0] = 0\n";

const char* SHEAR_DEGENERATE = "n=2 m=1\n"
                               "y[0,2] = 0\n"
                               "y[1,1] = 0\n"
                               "y[2,0] = 0\n";

const char* DIVERGENCE_4D = "n=4 m=3\n"
                            "y1[0,0,0,1] = 0\n"
                            "y2[0,0,0,1] = 0\n"
                            "y3[0,0,0,1] = 0\n"
                            "y1[1,0,0,0] + y2[0,1,0,0] + y3[0,0,1,0] = 0\n";

const char* DRIFT_4D = "n=4 m=1\n"
                       "y[0,0,0,2] = 0\n"
                       "y[0,0,1,1] = 0\n"
                       "y[0,0,2,0] = 0\n"
                       "y[0,1,0,1] - y[1,0,1,0] = 0\n"
                       "y[1,0,2,0] = 0\n";

} // namespace

TEST_CASE("dual space construction") {
    SUBCASE("second order ODE") {
        DualSpace R = build_dual(sys(ODE_PAIR));
        REQUIRE(R.dim() == 2);
        CHECK(R.basis[0] == Jet{1, {0}});
        CHECK(R.basis[1] == Jet{1, {1}});
        CHECK(R.order == 1);
        // multiplication by d_1 swaps the two basis jets
        CHECK(R.mult[0].at(1, 0) == RatFun(0, 1));
        CHECK(R.mult[0].at(0, 1) == RatFun(0, 1));

        // the odd solution written to order 3 and the even one to order 2
        Equation odd = section_equation(R, unit(R, Jet{1, {1}}), 3);
        CHECK(odd == eq({{Jet{1, {1}}, 1}, {Jet{1, {3}}, 1}}));
        Equation even = section_equation(R, unit(R, Jet{1, {0}}), 2);
        CHECK(even == eq({{Jet{1, {0}}, 1}, {Jet{1, {2}}, 1}}));
        // the derivate of the odd solution is the even one
        CHECK(derivate(odd, 1) == even);
        CHECK(solves(odd, R.system));
    }

    SUBCASE("cubic monomial ideal") {
        DualSpace R = build_dual(sys(MONOMIAL_CUBIC));
        REQUIRE(R.dim() == 4);
        CHECK(R.index_of(Jet{1, {0, 0}}) >= 0);
        CHECK(R.index_of(Jet{1, {1, 0}}) >= 0);
        CHECK(R.index_of(Jet{1, {0, 1}}) >= 0);
        CHECK(R.index_of(Jet{1, {2, 0}}) >= 0);
        CHECK(commuting(R));
    }

    SUBCASE("completion happens on the way in") {
        DualSpace R = build_dual(sys(WAVE_LIKE));
        CHECK(R.dim() == 8);
        // exactly one parametric jet of order three survives
        int third = 0;
        for (auto& j : R.basis)
            if (j.order() == 3) ++third;
        CHECK(third == 1);
        CHECK(R.index_of(Jet{1, {3, 0, 0}}) >= 0);
        CHECK(commuting(R));
    }

    SUBCASE("positive dimensional systems are rejected") {
        CHECK_THROWS_AS(build_dual(sys("n=2 m=1\ny[0,2] = 0\n")), InfiniteDimensional);
    }

    SUBCASE("derivates match the matrix action") {
        DualSpace R = build_dual(sys(MONOMIAL_CUBIC));
        Vec v(R.dim(), RatFun(0));
        for (int u = 0; u < R.dim(); ++u) v[u] = RatFun(0, 2 * u - 3);
        for (int i = 1; i <= 2; ++i) {
            Equation lhs = derivate(section_equation(R, v, R.order + 1), i);
            Equation rhs = section_equation(R, R.action(i).apply(v), R.order);
            CHECK(lhs == rhs);
        }
    }
}

TEST_CASE("maximal points, socle and top") {
    SUBCASE("homogeneous case has the origin only") {
        DualSpace R = build_dual(sys(MONOMIAL_CUBIC));
        MaximalPointList pts = maximal_points(R);
        REQUIRE(pts.points.size() == 1);
        CHECK(pts.points[0].multiplicity == 4);
        CHECK(pts.branch_conditions.empty());
        for (auto& c : pts.points[0].c) CHECK(c.is_zero());

        auto soc = socle(R, pts.points[0]);
        CHECK(same_equations(soc, {eq({{Jet{1, {0, 1}}, 1}}), eq({{Jet{1, {2, 0}}, 1}})}));

        auto top = top_component(R, pts.points[0]);
        REQUIRE(top.size() == 2);
        // the leftover coordinates are exactly the socle jets
        Equation t0 = section_equation(R, top[0], R.order);
        Equation t1 = section_equation(R, top[1], R.order);
        CHECK(same_equations({t0, t1},
                             {eq({{Jet{1, {0, 1}}, 1}}), eq({{Jet{1, {2, 0}}, 1}})}));

        // one derivate step sends each top representative to a lower dual jet
        Vec d2t = R.action(2).apply(unit(R, Jet{1, {0, 1}}));
        CHECK(section_equation(R, d2t, 0) == eq({{Jet{1, {0, 0}}, 1}}));
        Vec d1t = R.action(1).apply(unit(R, Jet{1, {2, 0}}));
        CHECK(section_equation(R, d1t, 1) == eq({{Jet{1, {1, 0}}, 1}}));
    }

    SUBCASE("deep socle after completion") {
        DualSpace R = build_dual(sys(WAVE_LIKE));
        MaximalPointList pts = maximal_points(R);
        REQUIRE(pts.points.size() == 1);
        CHECK(pts.points[0].multiplicity == 8);
        auto soc = socle(R, pts.points[0]);
        CHECK(same_equations(soc, {eq({{Jet{1, {3, 0, 0}}, 1}})}));
    }

    SUBCASE("irrational eigenvalues are refused") {
        DualSpace R = build_dual(sys("n=1 m=1\ny[2] - 2*y[0] = 0\n"));
        CHECK_THROWS_AS(maximal_points(R), NonRationalEigenvalue);
    }
}

TEST_CASE("minimal generators") {
    SUBCASE("two generators for the cubic monomial ideal") {
        DualSpace R = build_dual(sys(MONOMIAL_CUBIC));
        MinGenerators g = min_generators(R);
        REQUIRE(g.count == 2);
        CHECK(same_equations(g.sections,
                             {eq({{Jet{1, {0, 1}}, 1}}), eq({{Jet{1, {2, 0}}, 1}})}));
        CHECK(generation_check(R, g.coords));
        // dropping either generator loses part of the space
        CHECK_FALSE(generation_check(R, {g.coords[0]}));
        CHECK_FALSE(generation_check(R, {g.coords[1]}));
        for (auto& s : g.sections) CHECK(solves(s, R.system));
    }

    SUBCASE("single generator despite an eight dimensional space") {
        DualSpace R = build_dual(sys(WAVE_LIKE));
        MinGenerators g = min_generators(R);
        REQUIRE(g.count == 1);
        CHECK(g.sections[0] == eq({{Jet{1, {3, 0, 0}}, 1}, {Jet{1, {1, 1, 1}}, 1}}));
        CHECK(derivate(g.sections[0], 1) ==
              eq({{Jet{1, {2, 0, 0}}, 1}, {Jet{1, {0, 1, 1}}, 1}}));
        CHECK(solves(g.sections[0], R.system));
        CHECK(generation_check(R, g.coords));
    }

    SUBCASE("a parameter splits the spectrum") {
        DualSpace R = build_dual(sys(SHEAR_FAMILY));
        REQUIRE(R.dim() == 3);
        MaximalPointList pts = maximal_points(R);
        REQUIRE(pts.points.size() == 2);
        CHECK(point_with_multiplicity(pts, 1).multiplicity == 1);
        CHECK(point_with_multiplicity(pts, 2).multiplicity == 2);
        REQUIRE(pts.branch_conditions.size() == 1);
        CHECK(pts.branch_conditions[0] == Poly::variable(1, 0));

        MinGenerators g = min_generators(R);
        CHECK(g.count == 1);
        CHECK(g.sections[0] ==
              eqf(1, {{Jet{1, {1, 0}}, Poly(1, 1)}, {Jet{1, {0, 1}}, Poly(1, 1)}}));
    }

    SUBCASE("the degenerate member of the family needs two generators") {
        DualSpace R = build_dual(sys(SHEAR_DEGENERATE));
        MinGenerators g = min_generators(R);
        REQUIRE(g.count == 2);
        CHECK(same_equations(g.sections,
                             {eq({{Jet{1, {1, 0}}, 1}}), eq({{Jet{1, {0, 1}}, 1}})}));
        CHECK_FALSE(generation_check(R, {g.coords[0]}));
    }
}

TEST_CASE("localized dual spaces") {
    CompletionResult comp = complete(sys(FLOW_SPLIT));
    REQUIRE_FALSE(comp.changed_coordinates);
    LocalizedSystem loc = localize(comp.system, 2);
    DualSpace R = build_dual(loc.system);
    REQUIRE(R.dim() == 3);
    int fnv = R.fnv();
    REQUIRE(fnv == 1);
    Poly chi = Poly::variable(1, 0);
    Poly one(1, 1);

    SUBCASE("two maximal points over the function field") {
        MaximalPointList pts = maximal_points(R);
        REQUIRE(pts.points.size() == 2);
        const MaximalPoint& origin = point_with_multiplicity(pts, 1);
        const MaximalPoint& shifted = point_with_multiplicity(pts, 2);
        CHECK(origin.c[0].is_zero());
        CHECK(origin.c[1].is_zero());
        CHECK(shifted.c[0] == RatFun(chi));
        CHECK(shifted.c[1].is_zero());

        CHECK(same_equations(socle(R, origin),
                             {eqf(1, {{Jet{1, {1, 0}}, one}, {Jet{1, {0, 0}}, -chi}})}));
        CHECK(same_equations(socle(R, shifted), {eqf(1, {{Jet{1, {0, 1}}, one}})}));
    }

    SUBCASE("one generator collects both points") {
        MinGenerators g = min_generators(R);
        REQUIRE(g.count == 1);
        Equation E1 = section_equation(R, unit(R, Jet{1, {0, 0}}), 1);
        CHECK(g.sections[0] ==
              eqf(1, {{Jet{1, {1, 0}}, one}, {Jet{1, {0, 1}}, one}}));

        // the generator and its first derivates already reach every dual jet
        Vec d2 = R.action(1).apply(g.coords[0]);
        for (int u = 0; u < 3; ++u) d2[u] -= RatFun(chi) * g.coords[0][u];
        CHECK(section_equation(R, d2, 1) == E1);
        Vec d3 = R.action(2).apply(g.coords[0]);
        Equation d3e = section_equation(R, d3, 1);
        CHECK(d3e == eqf(1, {{Jet{1, {0, 0}}, one}, {Jet{1, {1, 0}}, chi}}));
    }

    SUBCASE("delocalization recovers equations of the full system") {
        MinGenerators g = min_generators(R);
        Equation E = section_equation(R, g.coords[0], 3);
        // the chi powers track the written-out principal coefficients
        CHECK(E.coeff(Jet{1, {2, 0}}) == RatFun(chi));
        CHECK(E.coeff(Jet{1, {3, 0}}) == RatFun(chi * chi));

        Delocalization d = delocalize(E, R, 3);
        CHECK(d.delta == -1);
        CHECK(d.tau == 1);
        CHECK(d.order_bound == 2);
        REQUIRE(d.components.size() == 3);
        CHECK(d.components.at(Exponents{0}) ==
              eq({{Jet{1, {0, 1, 0}}, 1}, {Jet{1, {0, 0, 1}}, 1}}));
        CHECK(d.components.at(Exponents{1}) ==
              eq({{Jet{1, {1, 1, 0}}, 1}, {Jet{1, {1, 0, 1}}, 1},
                  {Jet{1, {0, 2, 0}}, 1}, {Jet{1, {0, 1, 1}}, 1}}));
        Equation cascade = d.components.at(Exponents{2});
        CHECK(cascade == eq({{Jet{1, {2, 1, 0}}, 1}, {Jet{1, {1, 2, 0}}, 1},
                             {Jet{1, {0, 3, 0}}, 1}, {Jet{1, {2, 0, 1}}, 1},
                             {Jet{1, {1, 1, 1}}, 1}, {Jet{1, {0, 2, 1}}, 1}}));

        // every component solves the original system ...
        PDSystem orig = sys(FLOW_SPLIT);
        for (auto& [a, comp] : d.components) CHECK(solves(comp, orig));
        // ... and the deepest one generates all solutions through order two
        SectionSpace sp = section_space(orig, 2);
        CHECK(derivate_span({cascade}, sp).size() == 7);
        CHECK(derivate_generation_check({cascade}, orig, 2));
    }
}

TEST_CASE("delocalization with several split directions") {
    SUBCASE("module with rational structure constants") {
        LocalizedSystem loc = localize(complete(sys(DIVERGENCE_4D)).system, 1);
        DualSpace R = build_dual(loc.system);
        REQUIRE(R.dim() == 2);
        MinGenerators g = min_generators(R);
        REQUIRE(g.count == 2);

        // pick the generator whose leading unknown is the first one
        Equation E;
        for (auto& s : g.sections)
            if (!s.coeff(Jet{1, Exponents{0}}).is_zero()) E = s;
        REQUIRE_FALSE(E.is_zero());
        Delocalization d = delocalize(E, R, 1);
        CHECK(d.components.at(Exponents{1, 0, 1}) ==
              eq({{Jet{1, {1, 0, 0, 0}}, 1}, {Jet{3, {0, 0, 1, 0}}, -1}}));
    }

    SUBCASE("two active and two split directions") {
        LocalizedSystem loc = localize(complete(sys(DRIFT_4D)).system, 2);
        DualSpace R = build_dual(loc.system);
        REQUIRE(R.dim() == 2);
        MinGenerators g = min_generators(R);
        REQUIRE(g.count == 1);

        Equation E = section_equation(R, g.coords[0], 2);
        Delocalization d = delocalize(E, R, 2);
        CHECK(d.order_bound == 3);
        REQUIRE(d.components.size() == 5);
        CHECK(d.components.at(Exponents{1, 0}) == eq({{Jet{1, {0, 0, 0, 1}}, 1}}));
        CHECK(d.components.at(Exponents{0, 1}) == eq({{Jet{1, {0, 0, 1, 0}}, 1}}));
        CHECK(d.components.at(Exponents{1, 1}) ==
              eq({{Jet{1, {1, 0, 1, 0}}, 1}, {Jet{1, {0, 1, 0, 1}}, 1}}));
        CHECK(d.components.at(Exponents{2, 0}) == eq({{Jet{1, {1, 0, 0, 1}}, 1}}));
        CHECK(d.components.at(Exponents{0, 2}) == eq({{Jet{1, {0, 1, 1, 0}}, 1}}));
        PDSystem orig = sys(DRIFT_4D);
        for (auto& [a, comp] : d.components) CHECK(solves(comp, orig));
    }
}

TEST_CASE("sums of subsystems") {
    PDSystem big = sys("n=2 m=1\ny[0,2] = 0\ny[1,1] = 0\n");
    PDSystem line = sys("n=2 m=1\ny[0,1] = 0\n");
    PDSystem thick = sys(SHEAR_DEGENERATE);

    SectionSpace sp = section_space(big, 3);
    SectionSpace sp1 = section_space(line, 3);
    SectionSpace sp2 = section_space(thick, 3);
    REQUIRE(sp.basis.size() == 5);
    REQUIRE(sp1.basis.size() == 4);
    REQUIRE(sp2.basis.size() == 3);

    SUBCASE("the two pieces fill the space") {
        SubsystemSum r = subsystem_sum(sp1, sp2, sp);
        CHECK(r.sum);
        CHECK(r.defect == 0);
    }

    SUBCASE("a single piece leaves a defect") {
        SubsystemSum r = subsystem_sum(sp1, sp1, sp);
        CHECK_FALSE(r.sum);
        CHECK(r.defect == 1);
    }

    SUBCASE("subspaces must be closed under derivates") {
        SectionSpace bad = sp1;
        Vec v(bad.jets.size(), RatFun(0));
        v[bad.index_of(Jet{1, {1, 0}})] = RatFun(0, 1);
        bad.basis = {v};
        CHECK_THROWS_AS(subsystem_sum(bad, sp2, sp), NotInvariant);
    }

    SUBCASE("mismatched truncation orders are rejected") {
        SectionSpace other = section_space(line, 2);
        CHECK_THROWS_AS(subsystem_sum(other, sp2, sp), std::invalid_argument);
    }
}
