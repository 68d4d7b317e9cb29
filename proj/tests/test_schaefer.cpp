#include "doctest.h"

#include "bd/schaefer.hpp"
#include "oracles.hpp"

using namespace bd;

namespace {
CnfFormula cnf(std::initializer_list<std::vector<int>> cs) {
    std::vector<Clause> out;
    for (const auto& c : cs) out.push_back(Clause::from_dimacs(c));
    return CnfFormula(out);
}
}  // namespace

TEST_CASE("clause membership") {
    CHECK(clause_in_class(Clause::from_dimacs({-1, -2, 3}), SClass::Horn));
    CHECK_FALSE(clause_in_class(Clause::from_dimacs({1, 2}), SClass::ZeroVal));
    CHECK(clause_in_class(Clause{}, SClass::OneVal));
    CHECK(clause_in_class(Clause{}, SClass::ZeroVal));
}

TEST_CASE("clause membership matches the reference predicates") {
    // every clause over 3 variables with each polarity pattern
    for (int len = 0; len <= 3; ++len)
        for (int signs = 0; signs < (1 << len); ++signs) {
            std::vector<int> codes;
            for (int i = 0; i < len; ++i) codes.push_back(((signs >> i) & 1) ? i + 1 : -(i + 1));
            auto c = Clause::from_dimacs(codes);
            for (int s = 0; s < 5; ++s)
                CHECK(clause_in_class(c, kAllClasses[static_cast<std::size_t>(s)]) == oracle::clause_in(codes, s));
        }
}

TEST_CASE("hetero membership and violations") {
    auto m = formula_in_hetero(cnf({{-1, -2}}), HeteroClass{SClass::Horn, SClass::Krom2});
    REQUIRE(m.member());
    CHECK(*m.witness == SClass::Horn);

    auto n = formula_in_hetero(cnf({{1, 2, 3}, {-1, -2, -3}}), HeteroClass{SClass::Horn, SClass::HornMinus});
    CHECK_FALSE(n.member());
    REQUIRE(n.violations.size() == 2);
    CHECK(n.violations[0].first == SClass::Horn);
    CHECK(n.violations[0].second == Clause::from_dimacs({1, 2, 3}));
    CHECK(n.violations[1].first == SClass::HornMinus);
    CHECK(n.violations[1].second == Clause::from_dimacs({-1, -2, -3}));
}

TEST_CASE("bad pairs") {
    CHECK(contains_bad_pair(HeteroClass{SClass::Horn, SClass::HornMinus}));
    CHECK_FALSE(contains_bad_pair(HeteroClass{SClass::Krom2, SClass::Horn, SClass::ZeroVal}));
    CHECK_FALSE(contains_bad_pair(HeteroClass{SClass::Horn, SClass::ZeroVal}));
    CHECK(contains_bad_pair(HeteroClass{SClass::ZeroVal, SClass::OneVal}));
    CHECK(contains_bad_pair(HeteroClass{SClass::Horn, SClass::OneVal}));
}

TEST_CASE("class tags round trip") {
    for (SClass s : kAllClasses) CHECK(parse_class_tag(tag(s)) == s);
    CHECK(HeteroClass::parse("horn,2cnf") == HeteroClass{SClass::Horn, SClass::Krom2});
    CHECK_THROWS_AS(parse_class_tag("cubic"), PreconditionError);
}

TEST_CASE("polynomial subsolvers") {
    auto r = solve_in_class(cnf({{-1, 2}, {-2}}), SClass::Horn);
    REQUIRE(r.satisfiable);
    CHECK(*r.model == Assignment{{1, false}, {2, false}});
    CHECK_FALSE(solve_in_class(cnf({{1}, {-1}}), SClass::Krom2).satisfiable);
    CHECK_FALSE(solve_in_class(cnf({{}}), SClass::ZeroVal).satisfiable);
    CHECK_THROWS_AS(solve_in_class(cnf({{1, 2}}), SClass::Horn), ClassMismatch);
}

TEST_CASE("subsolvers agree with truth tables") {
    auto corpus = std::vector<std::string>{
        "p cnf 4 5\n-1 -2 3 0\n1 0\n-3 4 0\n-4 -1 0\n2 0\n",
        "p cnf 4 4\n1 2 0\n-1 3 0\n-2 -3 0\n-3 4 0\n",
        "p cnf 3 4\n1 2 3 0\n1 -2 0\n3 0\n-1 -3 2 0\n",
        "p cnf 3 3\n-1 -2 0\n-2 -3 0\n-1 0\n",
    };
    for (const auto& text : corpus) {
        auto f = parse_dimacs(text).formula;
        const bool sat = oracle::satisfiable(oracle::from(f));
        for (SClass s : kAllClasses) {
            if (!formula_in_class(f, s)) continue;
            auto r = solve_in_class(f, s);
            CHECK(r.satisfiable == sat);
            if (r.satisfiable) CHECK(satisfies(f, *r.model));
        }
    }
}
