#include "doctest.h"

#include "bd/cnf.hpp"
#include "oracles.hpp"

using namespace bd;

namespace {
CnfFormula cnf(std::initializer_list<std::vector<int>> cs) {
    std::vector<Clause> out;
    for (const auto& c : cs) out.push_back(Clause::from_dimacs(c));
    return CnfFormula(out);
}
}  // namespace

TEST_CASE("dimacs parsing") {
    auto r = parse_dimacs("p cnf 2 1\n1 -2 0");
    CHECK(r.formula == cnf({{1, -2}}));
    CHECK(r.declared_vars == 2);

    auto t = parse_dimacs("p cnf 1 1\n1 -1 0");
    CHECK(t.formula.size() == 0);
    CHECK(t.tautologies_removed == 1);

    CHECK_THROWS_AS(parse_dimacs("p cnf 2 1\n3 0"), ParseError);
    CHECK_THROWS_AS(parse_dimacs("p cnf x 1\n1 0"), ParseError);
    CHECK_THROWS_AS(parse_dimacs("p cnf 2 1\n1 2"), ParseError);
}

TEST_CASE("dimacs errors carry the line number") {
    try {
        parse_dimacs("c comment\np cnf 2 2\n1 0\n5 0\n");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 4);
    }
}

TEST_CASE("dimacs round trip") {
    auto f = cnf({{1, -2, 3}, {-1}, {2, 3}, {}});
    CHECK(parse_dimacs(write_dimacs(f)).formula == f);
}

TEST_CASE("reduce removes false literals and satisfied clauses") {
    // x=1, a1=2, a2=3, b=4, c=5
    CHECK(reduce(cnf({{1, -2, -3}}), {{1, false}}) == cnf({{-2, -3}}));
    CHECK(reduce(cnf({{-1, 4, 5}}), {{1, false}}).size() == 0);
    auto e = reduce(cnf({{1}}), {{1, false}});
    REQUIRE(e.size() == 1);
    CHECK(e.clauses()[0].empty());
}

TEST_CASE("reduce properties on a random corpus") {
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        auto g = parse_dimacs("p cnf 6 4\n1 -2 3 0\n-1 4 0\n2 5 -6 0\n-3 -4 -5 0\n").formula;
        Assignment t1{{1, seed % 2 == 0}, {2, (seed / 2) % 2 == 0}};
        Assignment t2{{3, (seed / 4) % 2 == 0}, {5, (seed / 8) % 2 == 0}};
        Assignment both = t1;
        both.insert(t2.begin(), t2.end());
        CHECK(reduce(g, both) == reduce(reduce(g, t1), t2));
        for (int v : reduce(g, both).vars()) CHECK(!both.count(v));
        CHECK(reduce(g, {}) == g);
        // agrees with the brute-force reduction
        auto ref = oracle::reduce(oracle::from(g), both);
        CHECK(oracle::from(reduce(g, both)).size() == ref.size());
    }
}

TEST_CASE("assignment enumeration order") {
    auto none = enumerate_assignments({});
    REQUIRE(none.size() == 1);
    CHECK(none[0].empty());

    auto one = enumerate_assignments({1});
    REQUIRE(one.size() == 2);
    CHECK(one[0] == Assignment{{1, false}});
    CHECK(one[1] == Assignment{{1, true}});

    auto two = enumerate_assignments({1, 2});
    REQUIRE(two.size() == 4);
    CHECK(two.front() == Assignment{{1, false}, {2, false}});
    CHECK(two.back() == Assignment{{1, true}, {2, true}});
    for (std::size_t i = 0; i < two.size(); ++i) CHECK(nth_assignment({1, 2}, i) == two[i]);

    Limits lim;
    lim.enum_vars = 3;
    CHECK_THROWS_AS(enumerate_assignments({1, 2, 3, 4}, lim), BudgetError);
}

TEST_CASE("exhaustive sat agrees with truth tables") {
    auto f = cnf({{1, 2}, {-1, 2}, {1, -2}});
    auto m = sat_exhaustive(f);
    REQUIRE(m.has_value());
    CHECK(satisfies(f, *m));
    CHECK(!sat_exhaustive(cnf({{1}, {-1}})).has_value());
    CHECK(oracle::satisfiable(oracle::from(f)));
}

TEST_CASE("clauses reject complementary literals") {
    CHECK_THROWS_AS(Clause::from_dimacs({1, -1}), PreconditionError);
    CHECK(Clause::from_dimacs({3, 1, 3}).size() == 2);
    CHECK(to_string(Assignment{{1, false}, {2, true}}) == "{1=0,2=1}");
}
