#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "bd/csp.hpp"
#include "bd/polymorphism.hpp"
#include "bd/sat_backdoor.hpp"

namespace bd {

using PropSet = std::vector<PolyProperty>;  // sorted, duplicate free

// The concatenation of the enumerated families of several properties, in property order.
class PolyFamily {
public:
    PolyFamily(int domain, PropSet props, const Limits& lim = {});

    int domain() const { return domain_; }
    const PropSet& props() const { return props_; }
    std::size_t size() const { return total_; }
    PolyProperty property_of(std::size_t index) const;
    OperationTable table(std::size_t index) const;

    // Segment of property props()[i]: its family and its first global index.
    const OperationFamily& segment(std::size_t i) const { return fams_[i]; }
    std::size_t offset(std::size_t i) const { return offsets_[i]; }

private:
    int domain_;
    PropSet props_;
    std::vector<OperationFamily> fams_;
    std::vector<std::size_t> offsets_;
    std::size_t total_ = 0;
};

// Depth-bounded search trees over the enumerated family. Backdoors are variable indices.
DetectionOutcome detect_strong_csp(const CspInstance& inst, int k, const PropSet& props, const Limits& lim = {});
DetectionOutcome detect_weak_csp(const CspInstance& inst, int k, const PropSet& props, const Limits& lim = {});

// Minimum-size exhaustive search; membership decided by poly_exists, solvability by solve_exhaustive.
DetectionOutcome oracle_csp(const CspInstance& inst, int k, const PropSet& props, Mode mode, const Limits& lim = {});

struct CspWitness {
    CspAssignment tau;
    PolyProperty property;
    OperationTable table;
};

struct CspVerification {
    bool ok = false;
    std::optional<CspAssignment> falsifying;
    std::vector<CspWitness> witnesses;  // one per assignment of B when ok
};

CspVerification verify_strong_csp(const CspInstance& inst, const VarSet& b, const PropSet& props,
                                  const Limits& lim = {});
// Some tau over B with I[tau] in the class and solvable, or nullopt.
std::optional<CspAssignment> verify_weak_csp(const CspInstance& inst, const VarSet& b, const PropSet& props,
                                             const Limits& lim = {});

// Decides I through B. Throws ClosureError naming the first assignment whose reduction is outside the class.
std::optional<CspAssignment> evaluate_strong_csp(const CspInstance& inst, const VarSet& b, const PropSet& props,
                                                 const Limits& lim = {});

enum class PartitionSemantics { Idempotent, Conservative };

// Backdoor induced by the partition (C1, rest). c1 holds constraint indices.
VarSet partition_backdoor(const CspInstance& inst, const std::vector<int>& c1, PolyProperty p, PartitionSemantics sem,
                          const Limits& lim = {});

struct PartitionChoice {
    std::vector<int> c1;
    VarSet backdoor;
};

struct MinPartition {
    std::optional<PartitionChoice> idempotent;  // absent for the constant property
    PartitionChoice conservative;
};

MinPartition min_partition_backdoor(const CspInstance& inst, PolyProperty p, const Limits& lim = {});

// Exact minimum vertex cover, smallest cover first in lexicographic order among minimum ones.
VarSet minimum_vertex_cover(const Graph& g);

}  // namespace bd
