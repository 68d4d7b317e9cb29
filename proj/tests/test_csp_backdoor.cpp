#include "doctest.h"

#include "bd/csp_backdoor.hpp"
#include "bd/generators.hpp"
#include "oracles.hpp"

using namespace bd;

namespace {
const Relation kOr(2, {{0, 1}, {1, 0}, {1, 1}});
const Relation kNand(2, {{0, 0}, {0, 1}, {1, 0}});

// Minimum strong backdoor by brute force over subsets, with membership from the naive search.
int brute_min_strong(const CspInstance& inst, const PropSet& props, int kmax) {
    std::vector<int> vars(inst.num_vars());
    for (std::size_t i = 0; i < vars.size(); ++i) vars[i] = static_cast<int>(i);
    for (int s = 0; s <= kmax; ++s) {
        bool hit = oracle::subsets(vars, static_cast<std::size_t>(s), [&](const std::vector<int>& b) {
            for (std::uint64_t i = 0; i < assignment_count(b.size(), inst.domain()); ++i) {
                auto red = reduce_csp(inst, nth_csp_assignment(b, inst.domain(), i));
                bool in = std::any_of(props.begin(), props.end(),
                                      [&](PolyProperty p) { return oracle::poly_exists_naive(red, static_cast<int>(p)); });
                if (!in) return false;
            }
            return true;
        });
        if (hit) return s;
    }
    return -1;
}
}  // namespace

TEST_CASE("closed instances need no backdoor") {
    CspInstance ors({"a", "b", "c"}, 2, {Constraint{{0, 1}, kOr}, Constraint{{1, 2}, kOr}});
    for (Mode m : {Mode::Strong, Mode::Weak}) {
        auto r = m == Mode::Strong ? detect_strong_csp(ors, 0, {PolyProperty::Majority})
                                   : detect_weak_csp(ors, 0, {PolyProperty::Majority});
        REQUIRE(r.found());
        CHECK(r.backdoor->empty());
        auto o = oracle_csp(ors, 0, {PolyProperty::Majority}, m);
        REQUIRE(o.found());
        CHECK(o.backdoor->empty());
    }
    auto sol = evaluate_strong_csp(ors, {}, {PolyProperty::Majority});
    CHECK(sol == solve_exhaustive(ors));
}

TEST_CASE("Boolean hitting-set reduction") {
    auto h = parse_set_system("1\na b\nb c\n");
    auto inst = hs_to_csp_boolean(h, {PolyProperty::Majority});
    const PropSet props{PolyProperty::Majority};
    auto r = detect_strong_csp(inst, 1, props);
    REQUIRE(r.found());
    CHECK(r.backdoor->size() <= 1);
    CHECK(verify_strong_csp(inst, *r.backdoor, props).ok);
    CHECK(verify_strong_csp(inst, {1}, props).ok);  // x_b hits both sets
    CHECK_FALSE(verify_strong_csp(inst, {0}, props).ok);

    auto w = verify_weak_csp(inst, {1}, props);
    CHECK(w.has_value());
    auto zero = reduce_csp(inst, {{1, 0}});
    CHECK(solve_exhaustive(zero).has_value());
    CHECK(detect_weak_csp(inst, 1, props).found());

    auto sol = evaluate_strong_csp(inst, {1}, props);
    REQUIRE(sol.has_value());
    CHECK(is_solution(inst, *sol));
    CHECK_THROWS_AS(evaluate_strong_csp(inst, {0}, props), ClosureError);
}

TEST_CASE("gadget oracle sizes") {
    Limits lim;
    lim.oracle_csp_domain = 8;
    auto g = chain_gadget(PolyProperty::Majority, 3);
    auto o = oracle_csp(g, 2, {PolyProperty::Majority}, Mode::Strong, lim);
    REQUIRE(o.found());
    CHECK(o.backdoor->size() == 1);
}

TEST_CASE("strong detection agrees with a brute-force minimum") {
    auto corpus = random_csp_corpus(11, 20, RandomCspParams{2, 4, 2, 2, 1, 4, 3, 50});
    const std::vector<PropSet> sets = {{PolyProperty::Majority}, {PolyProperty::MinMax, PolyProperty::Minority}};
    for (const auto& inst : corpus)
        for (const auto& props : sets) {
            const int m = brute_min_strong(inst, props, 2);
            for (int k = 0; k <= 2; ++k) CHECK(detect_strong_csp(inst, k, props).found() == (m >= 0 && m <= k));
        }
}

TEST_CASE("evaluation agrees with exhaustive solving") {
    auto corpus = random_csp_corpus(21, 20, RandomCspParams{2, 5, 2, 3, 1, 4, 3, 50});
    for (const auto& inst : corpus) {
        auto r = detect_strong_csp(inst, 2, {PolyProperty::Constant, PolyProperty::Majority});
        if (!r.found()) continue;
        auto sol = evaluate_strong_csp(inst, *r.backdoor, {PolyProperty::Constant, PolyProperty::Majority});
        CHECK(sol.has_value() == solve_exhaustive(inst).has_value());
        if (sol) CHECK(is_solution(inst, *sol));
    }
}

TEST_CASE("partition backdoors") {
    CspInstance inst({"a", "b", "c", "d"}, 2, {Constraint{{0, 1}, kOr}, Constraint{{2, 3}, kNand}, Constraint{{1, 2}, kOr}});
    const std::vector<int> all{0, 1, 2};
    CHECK(partition_backdoor(inst, all, PolyProperty::Majority, PartitionSemantics::Idempotent) == VarSet{0, 1, 2, 3});
    auto cover = partition_backdoor(inst, all, PolyProperty::Majority, PartitionSemantics::Conservative);
    CHECK(cover.size() == 2);
    // every binary Boolean relation is majority closed, so nothing needs to move
    CHECK(partition_backdoor(inst, {}, PolyProperty::Majority, PartitionSemantics::Idempotent).empty());
    CHECK(partition_backdoor(inst, {}, PolyProperty::Majority, PartitionSemantics::Conservative).empty());
    // {OR, NAND} together admit no min/max order
    CHECK_THROWS_AS(partition_backdoor(inst, {}, PolyProperty::MinMax, PartitionSemantics::Idempotent), PreconditionError);
    CHECK_THROWS_AS(partition_backdoor(inst, all, PolyProperty::Constant, PartitionSemantics::Idempotent),
                    PreconditionError);

    auto m = min_partition_backdoor(inst, PolyProperty::MinMax);
    REQUIRE(m.idempotent.has_value());
    CHECK(verify_strong_csp(inst, m.idempotent->backdoor, {PolyProperty::MinMax}).ok);
    CHECK(!m.idempotent->c1.empty());
}

TEST_CASE("vertex cover") {
    Graph g{{0, 1, 2, 3}, {{0, 1}, {1, 2}, {2, 3}}};
    CHECK(minimum_vertex_cover(g) == VarSet{0, 2});
    CHECK(minimum_vertex_cover(Graph{}).empty());
    Graph star{{0, 1, 2, 3}, {{0, 1}, {0, 2}, {0, 3}}};
    CHECK(minimum_vertex_cover(star) == VarSet{0});
}

TEST_CASE("pivot instance separates strong and partition backdoors") {
    auto inst = pivot_instance(6);
    const PropSet props{PolyProperty::Majority};
    CHECK(verify_strong_csp(inst, {0}, props).ok);
    auto m = min_partition_backdoor(inst, PolyProperty::Majority);
    REQUIRE(m.idempotent.has_value());
    CHECK(m.idempotent->backdoor.size() == 6);
}
