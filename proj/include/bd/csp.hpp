#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bd/errors.hpp"

namespace bd {

using Tuple = std::vector<int>;

// Finite relation: fixed arity, sorted duplicate-free tuples.
class Relation {
public:
    Relation() = default;
    Relation(int arity, std::vector<Tuple> tuples);

    int arity() const { return arity_; }
    const std::vector<Tuple>& tuples() const { return tuples_; }
    std::size_t size() const { return tuples_.size(); }
    bool empty() const { return tuples_.empty(); }
    bool contains(const Tuple& t) const;
    int max_value() const;  // -1 when empty or arity 0

    auto operator<=>(const Relation&) const = default;
    bool operator==(const Relation&) const = default;

private:
    int arity_ = 0;
    std::vector<Tuple> tuples_;
};

struct Constraint {
    std::vector<int> scope;  // variable indices, duplicate free
    Relation relation;
};

// Variables are referred to by index into names(). Domain is {0, ..., d-1}.
class CspInstance {
public:
    CspInstance() = default;
    CspInstance(std::vector<std::string> variables, int domain, std::vector<Constraint> constraints);

    const std::vector<std::string>& variables() const { return vars_; }
    int domain() const { return domain_; }
    const std::vector<Constraint>& constraints() const { return cons_; }
    std::size_t num_vars() const { return vars_.size(); }
    int arity() const;  // largest scope size
    int var_index(const std::string& name) const;  // -1 when unknown

    // Optional display names for domain values, recorded when the input used named values.
    const std::vector<std::string>& value_names() const { return value_names_; }
    void set_value_names(std::vector<std::string> names) { value_names_ = std::move(names); }

    // Same variables and domain, subset of the constraints.
    CspInstance with_constraints(std::vector<Constraint> cs) const;

private:
    std::vector<std::string> vars_;
    int domain_ = 1;
    std::vector<Constraint> cons_;
    std::vector<std::string> value_names_;
};

using CspAssignment = std::map<int, int>;  // variable index -> value

CspInstance parse_csp(const std::string& json_text);
std::string write_csp(const CspInstance& inst);

// I[tau]. Variables stay declared; assigned ones simply leave every scope.
CspInstance reduce_csp(const CspInstance& inst, const CspAssignment& tau);
Constraint reduce_constraint(const Constraint& c, const CspAssignment& tau);

bool is_solution(const CspInstance& inst, const CspAssignment& full);

// Lexicographically least solution (variables in declared order, values ascending).
std::optional<CspAssignment> solve_exhaustive(const CspInstance& inst, const Limits& lim = {});

struct Graph {
    std::vector<int> vertices;
    std::vector<std::pair<int, int>> edges;  // u < v, sorted
};

Graph primal_graph(const std::vector<Constraint>& constraints);

// Assignments to vars (sorted) over {0..d-1}; first variable most significant, all-zero first.
std::uint64_t assignment_count(std::size_t nvars, int domain);
CspAssignment nth_csp_assignment(const std::vector<int>& vars, int domain, std::uint64_t index);

std::vector<int> scope_variables(const std::vector<Constraint>& constraints);
std::string to_string(const CspAssignment& a, const CspInstance& inst);

}  // namespace bd
