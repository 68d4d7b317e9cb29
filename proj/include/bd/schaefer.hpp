#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bd/cnf.hpp"

namespace bd {

// Declaration order is the canonical tie-break order.
enum class SClass : std::uint8_t { Horn = 0, HornMinus = 1, Krom2 = 2, ZeroVal = 3, OneVal = 4 };

inline constexpr std::array<SClass, 5> kAllClasses = {SClass::Horn, SClass::HornMinus, SClass::Krom2,
                                                      SClass::ZeroVal, SClass::OneVal};

std::string tag(SClass s);  // "horn", "antihorn", "2cnf", "0val", "1val"
SClass parse_class_tag(const std::string& t);
SClass dual(SClass s);      // polarity mirror: Horn <-> HornMinus, ZeroVal <-> OneVal

// Nonempty union of Schaefer classes, stored as a bit mask.
class HeteroClass {
public:
    HeteroClass() = default;
    HeteroClass(std::initializer_list<SClass> members);
    static HeteroClass from_mask(std::uint8_t mask);
    static HeteroClass parse(const std::string& comma_list);

    bool contains(SClass s) const { return (mask_ >> static_cast<int>(s)) & 1U; }
    std::vector<SClass> members() const;
    std::uint8_t mask() const { return mask_; }
    std::size_t size() const;
    HeteroClass mirrored() const;
    std::string to_string() const;

    bool operator==(const HeteroClass&) const = default;

private:
    std::uint8_t mask_ = 0;
};

bool clause_in_class(const Clause& c, SClass s);

// Index of the canonically first clause of F outside s, or -1 if F is in s.
int first_violation(const CnfFormula& f, SClass s);
bool formula_in_class(const CnfFormula& f, SClass s);

struct Membership {
    std::optional<SClass> witness;
    std::vector<std::pair<SClass, Clause>> violations;  // filled only when there is no witness
    bool member() const { return witness.has_value(); }
};

Membership formula_in_hetero(const CnfFormula& f, const HeteroClass& h);
// Cheaper yes/no version of formula_in_hetero.
bool in_hetero(const CnfFormula& f, const HeteroClass& h);

bool contains_bad_pair(const HeteroClass& h);

struct SatResult {
    bool satisfiable = false;
    std::optional<Assignment> model;
};

// Polynomial decision for F in s. Throws ClassMismatch otherwise.
SatResult solve_in_class(const CnfFormula& f, SClass s);

}  // namespace bd
