#include "doctest.h"

#include "bd/generators.hpp"
#include "bd/sat_backdoor.hpp"
#include "oracles.hpp"

using namespace bd;

namespace {
std::vector<VarSet> sorted(std::vector<VarSet> v) {
    std::sort(v.begin(), v.end());
    return v;
}
CnfFormula cnf(std::initializer_list<std::vector<int>> cs) {
    std::vector<Clause> out;
    for (const auto& c : cs) out.push_back(Clause::from_dimacs(c));
    return CnfFormula(out);
}
const HeteroClass kHornKrom{SClass::Horn, SClass::Krom2};
}  // namespace

TEST_CASE("formula already in the class needs no variables") {
    auto f = cnf({{-1, -2, 3}, {-3}});
    auto r = detect_strong(f, 0, HeteroClass{SClass::Horn});
    REQUIRE(r.found());
    CHECK(r.backdoor->empty());
    auto w = detect_weak_bounded(f, 0, HeteroClass{SClass::Horn});
    REQUIRE(w.found());
    CHECK(w.backdoor->empty());
}

TEST_CASE("search trees on the intro family") {
    auto f = intro_family(5);
    // every clause of F_n has a negative literal, so the triple class holds it outright
    auto r = run_branching(f, 1, [](const CnfFormula& g, int k, const VarSet& b) {
        return branch_triple(g, k, b, false);
    });
    REQUIRE(r.found());
    CHECK(r.backdoor->empty());
    CHECK(verify_strong(f, {1}, HeteroClass{SClass::Krom2, SClass::Horn, SClass::ZeroVal}).ok);

    auto h = run_branching(f, 1, [](const CnfFormula& g, int k, const VarSet& b) {
        return branch_krom_union(g, k, b, SClass::Horn);
    });
    REQUIRE(h.found());
    CHECK(*h.backdoor == VarSet{1});
}

TEST_CASE("2CNF union branchers") {
    // a..e = 1..5
    CHECK(branch_krom_union(cnf({{1, 2, 3, 4, 5}}), 1, {}, SClass::ZeroVal).family.empty());
    CHECK_FALSE(branch_krom_union(cnf({{1, 2, 3, 4, 5}}), 1, {}, SClass::ZeroVal).confirmed);
    auto q = branch_krom_union(cnf({{1, 2, 3}}), 1, {}, SClass::Horn);
    CHECK(sorted(q.family) == std::vector<VarSet>{{1}, {2}, {3}});
    CHECK(branch_krom_union(cnf({{-1, 2}, {1, 3}}), 1, {}, SClass::Horn).confirmed);
}

TEST_CASE("Horn plus 0-valid brancher") {
    auto q = branch_horn_zval(cnf({{1, 2}}), 1, {}, false);
    CHECK(sorted(q.family) == std::vector<VarSet>{{1}, {2}});
    auto e = branch_horn_zval(cnf({{1, 2, 3}}), 1, {}, false);
    CHECK_FALSE(e.confirmed);
    CHECK(e.family.empty());
    CHECK(branch_horn_zval(cnf({{-1, 2}, {-2}}), 0, {}, false).confirmed);
}

TEST_CASE("triple brancher cases") {
    CHECK(branch_triple(cnf({{-1, -2, -3}}), 0, {}, false).confirmed);
    auto e = branch_triple(cnf({{1, 2, 3, 4}}), 1, {}, false);
    CHECK_FALSE(e.confirmed);
    CHECK(e.family.empty());
    auto q = branch_triple(cnf({{1, 2, 3}}), 1, {}, false);
    CHECK(sorted(q.family) == std::vector<VarSet>{{1}, {2}, {3}});
}

TEST_CASE("bounded-length brancher") {
    auto q = branch_bounded_length(cnf({{1, 2, 3}}), 1, {}, HeteroClass{SClass::Horn, SClass::HornMinus});
    CHECK(q.confirmed);  // all-positive clause is already anti-Horn
    auto r = branch_bounded_length(cnf({{1, 2, 3}, {-1, -2, -3}}), 1, {}, HeteroClass{SClass::Horn, SClass::HornMinus});
    CHECK_FALSE(r.confirmed);
    CHECK(r.family.size() <= 2 * 3);
    for (const auto& s : r.family) CHECK(s.size() == 1);
}

TEST_CASE("branching contract is enforced") {
    auto f = cnf({{1, 2, 3}});
    CHECK_THROWS_AS(run_branching(f, 1, [](const CnfFormula&, int, const VarSet&) {
                        return BranchingResponse{false, {{1, 2}}};
                    }),
                    ContractError);
    CHECK_THROWS_AS(run_branching(f, 1, [](const CnfFormula&, int, const VarSet&) {
                        return BranchingResponse{false, {{}}};
                    }),
                    ContractError);
}

TEST_CASE("intro family detection") {
    auto f6 = intro_family(6);
    auto r = detect_strong(f6, 1, kHornKrom);
    REQUIRE(r.found());
    CHECK(*r.backdoor == VarSet{1});

    CHECK_FALSE(detect_strong(f6, 5, HeteroClass{SClass::Horn}).found());
    auto six = detect_strong(f6, 6, HeteroClass{SClass::Horn});
    REQUIRE(six.found());
    CHECK(six.backdoor->size() == 6);
    CHECK(verify_strong(f6, *six.backdoor, HeteroClass{SClass::Horn}).ok);
}

TEST_CASE("oracle minimum sizes on F_4") {
    auto f4 = intro_family(4);
    Limits lim;
    lim.oracle_vars = 20;
    auto a = oracle_backdoor(f4, 5, kHornKrom, Mode::Strong, lim);
    REQUIRE(a.found());
    CHECK(*a.backdoor == VarSet{1});
    auto b = oracle_backdoor(f4, 5, HeteroClass{SClass::Krom2}, Mode::Strong, lim);
    REQUIRE(b.found());
    CHECK(b.backdoor->size() == 3);
    CHECK(std::count(b.backdoor->begin(), b.backdoor->end(), 1) == 1);
    auto c = oracle_backdoor(f4, 5, HeteroClass{SClass::Horn}, Mode::Strong, lim);
    REQUIRE(c.found());
    CHECK(c.backdoor->size() == 4);
    // independent brute force
    const auto ref = oracle::from(f4);
    CHECK(oracle::min_backdoor(ref, HeteroClass{SClass::Krom2}.mask(), false, 5) == 3);
    CHECK(oracle::min_backdoor(ref, HeteroClass{SClass::Horn}.mask(), false, 5) == 4);
}

TEST_CASE("verification of intro family backdoors") {
    auto f5 = intro_family(5);
    auto v = verify_strong(f5, {1}, kHornKrom);
    REQUIRE(v.ok);
    REQUIRE(v.witnesses.size() == 2);
    CHECK(v.witnesses[0].first == Assignment{{1, false}});
    CHECK(v.witnesses[0].second == SClass::Horn);
    CHECK(v.witnesses[1].first == Assignment{{1, true}});
    CHECK(v.witnesses[1].second == SClass::Krom2);

    auto bad = verify_strong(f5, {7}, kHornKrom);  // b_1
    CHECK_FALSE(bad.ok);
    REQUIRE(bad.falsifying.has_value());
    CHECK_FALSE(in_hetero(reduce(f5, *bad.falsifying), kHornKrom));
    CHECK(verify_strong(f5, {}, kHornKrom).ok == false);
    CHECK(verify_strong(cnf({{-1, 2}}), {}, HeteroClass{SClass::Horn}).ok);
}

TEST_CASE("evaluation through a backdoor") {
    auto f5 = intro_family(5);
    auto r = evaluate_backdoor(f5, {1}, kHornKrom, Mode::Strong);
    REQUIRE(r.satisfiable);
    CHECK(satisfies(f5, *r.model));
    CHECK(r.model->size() == f5.variable_count());
    CHECK_FALSE(evaluate_backdoor(cnf({{1}, {-1}}), {1}, HeteroClass{SClass::Horn}, Mode::Strong).satisfiable);
    CHECK_THROWS_AS(evaluate_backdoor(f5, {7}, kHornKrom, Mode::Strong), ClassMismatch);
}

TEST_CASE("exact valid-class backdoor") {
    // 0-valid needs a negative literal in every clause
    auto f = cnf({{1, 2}, {-1, 3}, {2}});
    auto b = minimum_valid_backdoor(f, SClass::ZeroVal);
    CHECK(verify_strong(f, b, HeteroClass{SClass::ZeroVal}).ok);
    CHECK(static_cast<int>(b.size()) == oracle::min_backdoor(oracle::from(f), HeteroClass{SClass::ZeroVal}.mask(), false, 3));
}

TEST_CASE("detectors agree with brute force on small formulas") {
    auto corpus = random_cnf_corpus(99, 25, RandomCnfParams{3, 7, 1, 8, 1, 3});
    const std::vector<HeteroClass> classes = {
        HeteroClass{SClass::Horn},
        HeteroClass{SClass::Krom2},
        HeteroClass{SClass::ZeroVal},
        HeteroClass{SClass::Horn, SClass::Krom2},
        HeteroClass{SClass::Horn, SClass::ZeroVal},
        HeteroClass{SClass::Krom2, SClass::HornMinus, SClass::OneVal},
        HeteroClass{SClass::Horn, SClass::HornMinus},
    };
    for (const auto& f : corpus) {
        const auto ref = oracle::from(f);
        for (const auto& h : classes) {
            const int ms = oracle::min_backdoor(ref, h.mask(), false, 3);
            const int mw = oracle::min_backdoor(ref, h.mask(), true, 3);
            for (int k = 0; k <= 2; ++k) {
                if (!contains_bad_pair(h)) CHECK(detect_strong(f, k, h).found() == (ms >= 0 && ms <= k));
                CHECK(detect_weak_bounded(f, k, h).found() == (mw >= 0 && mw <= k));
            }
        }
    }
}

TEST_CASE("weak witness") {
    auto f5 = intro_family(5);
    auto w = verify_weak(f5, {1}, kHornKrom);
    REQUIRE(w.has_value());
    CHECK(in_hetero(reduce(f5, w->first), kHornKrom));
}
