#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bd/errors.hpp"

namespace bd {

// A literal: variable index (>= 1) and polarity. Ordered by variable, negative first.
struct Literal {
    int var = 1;
    bool positive = true;

    Literal() = default;
    Literal(int v, bool pos);
    static Literal from_dimacs(int code);
    int dimacs() const { return positive ? var : -var; }
    Literal negated() const { return Literal(var, !positive); }

    auto operator<=>(const Literal&) const = default;
};

// Sorted, duplicate-free set of literals with no complementary pair.
class Clause {
public:
    Clause() = default;
    // Throws PreconditionError when the literals contain a complementary pair.
    explicit Clause(std::vector<Literal> lits);
    static Clause from_dimacs(const std::vector<int>& codes);

    const std::vector<Literal>& literals() const { return lits_; }
    std::size_t size() const { return lits_.size(); }
    bool empty() const { return lits_.empty(); }
    std::size_t positives() const;
    std::size_t negatives() const;
    std::vector<int> vars() const;
    bool contains(const Literal& l) const;
    Clause mirrored() const;

    auto operator<=>(const Clause&) const = default;
    bool operator==(const Clause&) const = default;

private:
    std::vector<Literal> lits_;
};

// Variable assignment; iteration is in ascending variable order.
using Assignment = std::map<int, bool>;
using VarSet = std::vector<int>;  // kept sorted and unique

// Set of clauses. Clauses are kept in canonical (sorted) order.
class CnfFormula {
public:
    CnfFormula() = default;
    explicit CnfFormula(std::vector<Clause> clauses);

    const std::vector<Clause>& clauses() const { return clauses_; }
    const VarSet& vars() const { return vars_; }
    std::size_t variable_count() const { return vars_.size(); }
    std::size_t size() const { return clauses_.size(); }
    std::size_t max_clause_length() const;
    int max_var() const { return vars_.empty() ? 0 : vars_.back(); }
    CnfFormula mirrored() const;

    bool operator==(const CnfFormula& o) const { return clauses_ == o.clauses_; }

private:
    std::vector<Clause> clauses_;
    VarSet vars_;
};

struct DimacsResult {
    CnfFormula formula;
    int declared_vars = 0;
    std::size_t tautologies_removed = 0;
};

DimacsResult parse_dimacs(const std::string& text);
std::string write_dimacs(const CnfFormula& f, int declared_vars = 0);

// F[tau]: drop satisfied clauses, strip falsified literals, keep empty clauses.
CnfFormula reduce(const CnfFormula& f, const Assignment& tau);

// All 2^|vars| assignments: ascending variables, binary counter, all-zero first.
std::vector<Assignment> enumerate_assignments(const VarSet& vars, const Limits& lim = {});
// The i-th assignment of that sequence, without materialising the rest.
Assignment nth_assignment(const VarSet& vars, std::uint64_t index);

bool satisfies(const CnfFormula& f, const Assignment& model);

// Complete chronological backtracking over var(F) in ascending order.
std::optional<Assignment> sat_exhaustive(const CnfFormula& f);

std::string to_string(const Literal& l);
std::string to_string(const Clause& c);
std::string to_string(const Assignment& a);

VarSet make_varset(std::vector<int> v);
VarSet varset_union(const VarSet& a, const VarSet& b);

}  // namespace bd
