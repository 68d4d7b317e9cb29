#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bd/csp.hpp"

namespace bd {

enum class PolyProperty : std::uint8_t { Constant = 0, MinMax = 1, Majority = 2, Minority = 3, Malcev = 4 };

inline constexpr PolyProperty kAllProperties[] = {PolyProperty::Constant, PolyProperty::MinMax, PolyProperty::Majority,
                                                  PolyProperty::Minority, PolyProperty::Malcev};

int property_arity(PolyProperty p);
std::string tag(PolyProperty p);  // "constant", "minmax", "majority", "minority", "malcev"
PolyProperty parse_property_tag(const std::string& t);
std::vector<PolyProperty> parse_property_list(const std::string& comma_list);
bool is_idempotent_property(PolyProperty p);

// Total operation D^n -> D, outputs in lexicographic argument order (first argument most significant).
class OperationTable {
public:
    OperationTable() = default;
    OperationTable(int arity, int domain, std::vector<int> outputs);

    int arity() const { return arity_; }
    int domain() const { return domain_; }
    const std::vector<int>& outputs() const { return out_; }
    int operator()(const std::vector<int>& args) const;
    int at(std::size_t row) const { return out_[row]; }
    std::size_t rows() const { return out_.size(); }

    auto operator<=>(const OperationTable&) const = default;
    bool operator==(const OperationTable&) const = default;

private:
    int arity_ = 0;
    int domain_ = 1;
    std::vector<int> out_;
};

std::size_t row_index(const std::vector<int>& args, int domain);

// Canonically ordered, duplicate-free tables of one arity and domain, stored contiguously.
class OperationFamily {
public:
    OperationFamily() = default;
    OperationFamily(int arity, int domain) : arity_(arity), domain_(domain) {}

    int arity() const { return arity_; }
    int domain() const { return domain_; }
    std::size_t size() const { return rows_ == 0 ? 0 : data_.size() / rows_; }
    std::size_t rows() const { return rows_; }
    OperationTable operator[](std::size_t i) const;
    const std::uint8_t* raw(std::size_t i) const { return data_.data() + i * rows_; }
    void push_back(const std::vector<int>& outputs);

private:
    int arity_ = 0;
    int domain_ = 1;
    std::size_t rows_ = 0;
    std::vector<std::uint8_t> data_;
};

bool check_property(const OperationTable& phi, PolyProperty p);
bool relation_closed(const Relation& r, const OperationTable& phi);
bool instance_closed(const CspInstance& inst, const OperationTable& phi);
// Index of the first constraint not closed under phi, or -1.
int first_unclosed_constraint(const CspInstance& inst, const OperationTable& phi);

// Ternary properties only: the value the identities force at (a,b,c), or -1 for a free entry.
int forced_value(PolyProperty p, int a, int b, int c);
// Free rows of a ternary property in row order. The enumerated family is the full product
// over these rows, indexed in mixed radix d with the last free row least significant.
std::vector<std::size_t> free_rows(int domain, PolyProperty p);

// Number of tables enumerate_property_ops would emit (saturates at UINT64_MAX).
std::uint64_t property_family_size(int domain, PolyProperty p);
OperationFamily enumerate_property_ops(int domain, PolyProperty p, const Limits& lim = {});

// Some table with property p under which the instance is closed, or nullopt.
// Throws BudgetError when the search exceeds lim.poly_nodes.
std::optional<OperationTable> poly_exists(const CspInstance& inst, PolyProperty p, const Limits& lim = {});

std::optional<CspAssignment> solve_closed(const CspInstance& inst, const OperationTable& phi, const Limits& lim = {});

}  // namespace bd
