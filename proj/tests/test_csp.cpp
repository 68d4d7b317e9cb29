#include "doctest.h"

#include "bd/csp.hpp"
#include "oracles.hpp"

using namespace bd;

namespace {
const char* kXor = R"({"domain":2,"variables":["u","v"],"constraints":[{"scope":["u","v"],"tuples":[[0,1],[1,0]]}]})";
}

TEST_CASE("csp parsing") {
    auto inst = parse_csp(kXor);
    CHECK(inst.domain() == 2);
    CHECK(inst.num_vars() == 2);
    REQUIRE(inst.constraints().size() == 1);
    CHECK(inst.constraints()[0].relation.tuples() == std::vector<Tuple>{{0, 1}, {1, 0}});
    CHECK_THROWS_AS(parse_csp(R"({"domain":2,"variables":["u","v"],"constraints":[{"scope":["u","v"],"tuples":[[0,2]]}]})"),
                    ParseError);
    auto empty = parse_csp(R"({"domain":2,"variables":["u","v"],"constraints":[]})");
    CHECK(is_solution(empty, {{0, 1}, {1, 1}}));
    CHECK(parse_csp(write_csp(inst)).constraints()[0].relation == inst.constraints()[0].relation);
}

TEST_CASE("constraint reduction projects") {
    auto inst = parse_csp(kXor);
    auto r = reduce_constraint(inst.constraints()[0], {{0, 0}});
    CHECK(r.scope == std::vector<int>{1});
    CHECK(r.relation.tuples() == std::vector<Tuple>{{1}});
    auto full = reduce_constraint(inst.constraints()[0], {{0, 0}, {1, 1}});
    CHECK(full.relation.arity() == 0);
    CHECK(full.relation.size() == 1);
    auto none = reduce_constraint(inst.constraints()[0], {{0, 0}, {1, 0}});
    CHECK(none.relation.arity() == 0);
    CHECK(none.relation.empty());
}

TEST_CASE("exhaustive solving") {
    auto inst = parse_csp(kXor);
    auto s = solve_exhaustive(inst);
    REQUIRE(s.has_value());
    CHECK(*s == CspAssignment{{0, 0}, {1, 1}});
    auto dead = CspInstance({"u"}, 2, {Constraint{{}, Relation(0, {})}});
    CHECK_FALSE(solve_exhaustive(dead).has_value());
}

TEST_CASE("primal graph") {
    auto one = primal_graph({Constraint{{0, 1}, Relation(2, {{0, 0}})}});
    CHECK(one.edges == std::vector<std::pair<int, int>>{{0, 1}});
    auto two = primal_graph({Constraint{{0, 1}, Relation(2, {{0, 0}})}, Constraint{{2, 3}, Relation(2, {{0, 0}})}});
    CHECK(two.edges == std::vector<std::pair<int, int>>{{0, 1}, {2, 3}});
    auto tri = primal_graph({Constraint{{0, 1, 2}, Relation(3, {{0, 0, 0}})}});
    CHECK(tri.edges == std::vector<std::pair<int, int>>{{0, 1}, {0, 2}, {1, 2}});
}

TEST_CASE("reduction composes and assignment order is canonical") {
    auto inst = parse_csp(
        R"({"domain":3,"variables":["a","b","c"],"constraints":[{"scope":["a","b","c"],"tuples":[[0,1,2],[1,1,0],[2,0,0],[0,0,0]]}]})");
    for (std::uint64_t i = 0; i < assignment_count(2, 3); ++i) {
        auto tau = nth_csp_assignment({0, 2}, 3, i);
        auto split = reduce_csp(reduce_csp(inst, {{0, tau[0]}}), {{2, tau[2]}});
        CHECK(split.constraints()[0].relation == reduce_csp(inst, tau).constraints()[0].relation);
    }
    CHECK(nth_csp_assignment({0, 2}, 3, 1) == CspAssignment{{0, 0}, {2, 1}});
    CHECK(to_string(CspAssignment{{0, 1}, {2, 0}}, inst) == "{a=1,c=0}");
}
