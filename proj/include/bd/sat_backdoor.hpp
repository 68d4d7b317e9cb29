#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bd/cnf.hpp"
#include "bd/schaefer.hpp"

namespace bd {

enum class Mode { Strong, Weak };
std::string to_string(Mode m);

struct SearchStats {
    std::uint64_t nodes = 0;
    std::uint64_t leaves = 0;
    int max_depth = 0;
    double elapsed_ms = 0.0;
};

struct DetectionOutcome {
    std::optional<VarSet> backdoor;
    SearchStats stats;
    Mode mode = Mode::Strong;
    bool found() const { return backdoor.has_value(); }
};

// Either "B' is already a strong backdoor" or a family of variable sets to branch on.
// An empty family with confirmed == false means the node is a dead end.
struct BranchingResponse {
    bool confirmed = false;
    std::vector<VarSet> family;

    static BranchingResponse confirm() { return {true, {}}; }
    static BranchingResponse none() { return {false, {}}; }
};

using Brancher = std::function<BranchingResponse(const CnfFormula&, int k, const VarSet& bprime)>;

// Depth-bounded search tree rooted at the empty set. Throws ContractError when the brancher
// hands back a set that is empty, overlaps B', or pushes |B' u Q| past k.
DetectionOutcome run_branching(const CnfFormula& f, int k, const Brancher& brancher);

// Class 2CNF u c, c one of Horn, HornMinus, ZeroVal, OneVal.
BranchingResponse branch_krom_union(const CnfFormula& f, int k, const VarSet& bprime, SClass c);
// Class Horn u ZeroVal, or HornMinus u OneVal when dual is set.
BranchingResponse branch_horn_zval(const CnfFormula& f, int k, const VarSet& bprime, bool dual);
// Class 2CNF u Horn u ZeroVal, or its mirror when dual is set.
BranchingResponse branch_triple(const CnfFormula& f, int k, const VarSet& bprime, bool dual);
// Any class; branching factor at most |S| times the longest clause.
BranchingResponse branch_bounded_length(const CnfFormula& f, int k, const VarSet& bprime, const HeteroClass& s);
// Single Horn / HornMinus (two-way) or 2CNF (three-way).
BranchingResponse branch_single(const CnfFormula& f, int k, const VarSet& bprime, SClass s);

enum class StrongAlgorithm { ExactValid, SingleClass, KromUnion, HornZval, Triple, BoundedLength };
StrongAlgorithm strong_algorithm(const HeteroClass& h);
std::string to_string(StrongAlgorithm a);

// Smallest strong backdoor into a lone ZeroVal or OneVal class (always unique), by fixpoint.
VarSet minimum_valid_backdoor(const CnfFormula& f, SClass s);

DetectionOutcome detect_strong(const CnfFormula& f, int k, const HeteroClass& h, const Limits& lim = {});
DetectionOutcome detect_weak_bounded(const CnfFormula& f, int k, const HeteroClass& s, const Limits& lim = {});

// Exhaustive minimum-size search (size first, then lexicographic).
DetectionOutcome oracle_backdoor(const CnfFormula& f, int k, const HeteroClass& h, Mode mode,
                                 const Limits& lim = {});

struct Verification {
    bool ok = false;
    std::optional<Assignment> falsifying;
    std::vector<std::pair<SClass, Clause>> violations;
    std::vector<std::pair<Assignment, SClass>> witnesses;  // one per assignment when ok
};

Verification verify_strong(const CnfFormula& f, const VarSet& b, const HeteroClass& h, const Limits& lim = {});

// First assignment of B under which F lands in the class and is satisfiable, with its class.
std::optional<std::pair<Assignment, SClass>> verify_weak(const CnfFormula& f, const VarSet& b, const HeteroClass& h,
                                                         const Limits& lim = {});

// Strong: decides F via the subsolvers. Weak: satisfiable == false means "no witness under B".
SatResult evaluate_backdoor(const CnfFormula& f, const VarSet& b, const HeteroClass& h, Mode mode,
                            const Limits& lim = {});

}  // namespace bd
