#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bd/cnf.hpp"
#include "bd/csp.hpp"
#include "bd/polymorphism.hpp"
#include "bd/schaefer.hpp"

namespace bd {

struct SetSystem {
    std::vector<std::string> universe;    // first-appearance order
    std::vector<std::vector<int>> sets;   // indices into universe, sorted
    int k = 0;
};

// First non-empty line is k, then one set per line as whitespace-separated names.
SetSystem parse_set_system(const std::string& text);
std::string write_set_system(const SetSystem& h);

// x = 1, a_i = 1+i, b_i = 1+n+i, c_i = 1+2n+i.
CnfFormula intro_family(int n);

// A clause over variables 1..3 that lies in `from` but not in `to`.
Clause obstruction(SClass from, SClass to);

// With Padded, fresh elements that lie in no set are appended to U until |U| >= k + 2; they
// take the variables right after U. Without them both long clauses can shrink to a single
// literal once k >= |U| - 1, and the backdoor side then undercuts the hitting set.
enum class UniversePadding { AsPrinted, Padded };
CnfFormula hs_to_strong_sat(const SetSystem& h, UniversePadding padding = UniversePadding::Padded);
CnfFormula weak_obstruction_pad(const CnfFormula& f, int k, SClass s, const HeteroClass& h);

struct BooleanBarrier {
    int arity = 0;
    std::vector<Tuple> tuples;   // sorted
    std::vector<Tuple> witness;  // one tuple per argument of the operation
    auto operator<=>(const BooleanBarrier& o) const {
        if (auto c = arity <=> o.arity; c != 0) return c;
        return tuples <=> o.tuples;
    }
    bool operator==(const BooleanBarrier& o) const { return arity == o.arity && tuples == o.tuples; }
};

// Smallest barrier: by size, then arity, then lexicographic tuple set. nullopt when none exists
// within |tuples| <= arity(phi) and arity <= 2^arity(phi).
std::optional<BooleanBarrier> boolean_barrier(const OperationTable& phi);

// Deduplicated minimal barriers of every enumerated Boolean operation with one of the properties.
std::vector<BooleanBarrier> barrier_set(const std::vector<PolyProperty>& props);
CspInstance hs_to_csp_boolean(const SetSystem& h, const std::vector<PolyProperty>& props);

// k binary constraints on (v_{2i-1}, v_{2i}), each containing (0,0). Together they admit no
// operation with property c, yet fixing any single variable to any value makes them admit one.
// AsPrinted reproduces the original tables, which miss that behaviour.
enum class GadgetTables { AsPrinted, Repaired };
CspInstance chain_gadget(PolyProperty c, int k, GadgetTables tables = GadgetTables::Repaired);
int chain_gadget_domain(PolyProperty c, int k);

CspInstance hs_to_csp_arity2(const SetSystem& h, PolyProperty c, GadgetTables tables = GadgetTables::Repaired);

// x followed by y_1..y_{n-1}; one ternary constraint on (x, y_i, y_{i+1}) per i, relation
// {(0,0,1),(0,1,0),(1,0,0)}.
CspInstance pivot_instance(int n);

struct RandomCnfParams {
    int min_vars = 3, max_vars = 12;
    int min_clauses = 1, max_clauses = 20;
    int min_len = 1, max_len = 4;
};

struct RandomCspParams {
    int min_vars = 2, max_vars = 7;
    int min_domain = 2, max_domain = 3;
    int min_constraints = 1, max_constraints = 6;
    int max_arity = 3;
    int density_percent = 50;  // chance that a tuple enters a relation
};

std::vector<CnfFormula> random_cnf_corpus(std::uint64_t seed, int count, const RandomCnfParams& p = {});
std::vector<CspInstance> random_csp_corpus(std::uint64_t seed, int count, const RandomCspParams& p = {});

}  // namespace bd
