#include "bd/sat_backdoor.hpp"

#include <algorithm>
#include <chrono>
#include <set>

namespace bd {

std::string to_string(Mode m) { return m == Mode::Strong ? "strong" : "weak"; }

std::string to_string(StrongAlgorithm a) {
    switch (a) {
        case StrongAlgorithm::ExactValid: return "exact-valid";
        case StrongAlgorithm::SingleClass: return "single-class";
        case StrongAlgorithm::KromUnion: return "krom-union";
        case StrongAlgorithm::HornZval: return "horn-zval";
        case StrongAlgorithm::Triple: return "triple";
        case StrongAlgorithm::BoundedLength: return "bounded-length";
    }
    return "?";
}

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

struct Violation {
    Assignment tau;
    CnfFormula reduced;
};

// First assignment over B' (canonical order) whose reduct leaves h.
std::optional<Violation> find_violation(const CnfFormula& f, const VarSet& bprime, const HeteroClass& h) {
    const std::uint64_t total = std::uint64_t{1} << bprime.size();
    for (std::uint64_t i = 0; i < total; ++i) {
        Assignment tau = nth_assignment(bprime, i);
        CnfFormula g = reduce(f, tau);
        if (!in_hetero(g, h)) return Violation{std::move(tau), std::move(g)};
    }
    return std::nullopt;
}

const Clause* first_outside(const CnfFormula& g, std::initializer_list<SClass> classes) {
    for (const auto& c : g.clauses()) {
        bool outside = true;
        for (SClass s : classes)
            if (clause_in_class(c, s)) outside = false;
        if (outside) return &c;
    }
    return nullptr;
}

const Clause* first_not_in(const CnfFormula& g, SClass s) {
    int i = first_violation(g, s);
    return i < 0 ? nullptr : &g.clauses()[static_cast<std::size_t>(i)];
}

std::vector<VarSet> singletons(std::vector<int> vars) {
    std::vector<VarSet> fam;
    for (int v : make_varset(std::move(vars))) fam.push_back({v});
    return fam;
}

// var(C \ O) for every 2-subset O of C, O in lexicographic order.
std::vector<VarSet> drop_two(const Clause& c) {
    std::vector<VarSet> fam;
    const auto vars = c.vars();
    for (std::size_t i = 0; i < vars.size(); ++i)
        for (std::size_t j = i + 1; j < vars.size(); ++j) {
            VarSet q;
            for (std::size_t t = 0; t < vars.size(); ++t)
                if (t != i && t != j) q.push_back(vars[t]);
            fam.push_back(q);
        }
    return fam;
}

std::vector<int> first_positive_vars(const Clause& c, std::size_t count) {
    std::vector<int> out;
    for (const auto& l : c.literals())
        if (l.positive && out.size() < count) out.push_back(l.var);
    return out;
}

// Two positive literal variables of c plus the least remaining literal variable.
std::vector<int> two_positive_plus_one(const Clause& c) {
    std::vector<int> out = first_positive_vars(c, 2);
    for (const auto& l : c.literals())
        if (std::find(out.begin(), out.end(), l.var) == out.end()) {
            out.push_back(l.var);
            break;
        }
    return out;
}

std::vector<int> first_vars(const Clause& c, std::size_t count) {
    auto vars = c.vars();
    if (vars.size() > count) vars.resize(count);
    return vars;
}

std::vector<int> concat(std::vector<int> a, const std::vector<int>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

int size_of(const VarSet& b) { return static_cast<int>(b.size()); }

}  // namespace

DetectionOutcome run_branching(const CnfFormula& f, int k, const Brancher& brancher) {
    if (k < 0) throw PreconditionError("budget k must be nonnegative");
    auto t0 = Clock::now();
    DetectionOutcome out;
    out.mode = Mode::Strong;
    std::function<bool(const VarSet&, int)> dfs = [&](const VarSet& bprime, int depth) -> bool {
        ++out.stats.nodes;
        out.stats.max_depth = std::max(out.stats.max_depth, depth);
        BranchingResponse r = brancher(f, k, bprime);
        if (r.confirmed) {
            ++out.stats.leaves;
            out.backdoor = bprime;
            return true;
        }
        if (r.family.empty()) {
            ++out.stats.leaves;
            return false;
        }
        for (const auto& q : r.family) {
            if (q.empty()) throw ContractError("brancher returned an empty set");
            for (int v : q)
                if (std::binary_search(bprime.begin(), bprime.end(), v))
                    throw ContractError("brancher returned variable " + std::to_string(v) + " already in B'");
            VarSet child = varset_union(bprime, make_varset(q));
            if (size_of(child) > k)
                throw ContractError("brancher violated |B' u Q| <= k (" + std::to_string(child.size()) + " > " +
                                    std::to_string(k) + ")");
            if (dfs(child, depth + 1)) return true;
        }
        return false;
    };
    dfs(VarSet{}, 0);
    out.stats.elapsed_ms = ms_since(t0);
    return out;
}

BranchingResponse branch_krom_union(const CnfFormula& f, int k, const VarSet& bprime, SClass c) {
    if (c == SClass::Krom2) throw PreconditionError("branch_krom_union needs a class other than 2cnf");
    if (c == SClass::HornMinus || c == SClass::OneVal) return branch_krom_union(f.mirrored(), k, bprime, dual(c));

    auto viol = find_violation(f, bprime, HeteroClass{SClass::Krom2, c});
    if (!viol) return BranchingResponse::confirm();
    if (size_of(bprime) >= k) return BranchingResponse::none();
    const CnfFormula& g = viol->reduced;

    if (const Clause* cl = first_outside(g, {SClass::Krom2, c})) {
        if (c == SClass::Horn) return {false, singletons(two_positive_plus_one(*cl))};
        // c == ZeroVal: cl is all-positive with at least three literals.
        if (size_of(bprime) + static_cast<int>(cl->size()) - 2 > k) return BranchingResponse::none();
        return {false, drop_two(*cl)};
    }
    const Clause* in_krom = first_not_in(g, c);
    const Clause* in_c = first_not_in(g, SClass::Krom2);
    return {false, singletons(concat(in_krom->vars(), first_vars(*in_c, 3)))};
}

BranchingResponse branch_horn_zval(const CnfFormula& f, int k, const VarSet& bprime, bool dual_class) {
    if (dual_class) return branch_horn_zval(f.mirrored(), k, bprime, false);

    auto viol = find_violation(f, bprime, HeteroClass{SClass::Horn, SClass::ZeroVal});
    if (!viol) return BranchingResponse::confirm();
    if (size_of(bprime) >= k) return BranchingResponse::none();
    const CnfFormula& g = viol->reduced;

    if (const Clause* cl = first_outside(g, {SClass::Horn, SClass::ZeroVal})) {
        // All-positive clause with two or more literals: keep at most one variable outside.
        if (size_of(bprime) + static_cast<int>(cl->size()) - 1 > k) return BranchingResponse::none();
        std::vector<VarSet> fam;
        const auto vars = cl->vars();
        for (int v : vars) {
            VarSet q;
            for (int w : vars)
                if (w != v) q.push_back(w);
            fam.push_back(q);
        }
        return {false, fam};
    }
    const Clause* unit = first_not_in(g, SClass::ZeroVal);  // a positive unit clause
    const Clause* wide = first_not_in(g, SClass::Horn);     // 0-valid, two or more positives
    return {false, singletons(concat(unit->vars(), first_positive_vars(*wide, 2)))};
}

BranchingResponse branch_triple(const CnfFormula& f, int k, const VarSet& bprime, bool dual_class) {
    if (dual_class) return branch_triple(f.mirrored(), k, bprime, false);

    auto viol = find_violation(f, bprime, HeteroClass{SClass::Krom2, SClass::Horn, SClass::ZeroVal});
    if (!viol) return BranchingResponse::confirm();
    if (size_of(bprime) >= k) return BranchingResponse::none();
    const CnfFormula& g = viol->reduced;

    if (const Clause* cl = first_outside(g, {SClass::Krom2, SClass::Horn, SClass::ZeroVal})) {
        if (size_of(bprime) + static_cast<int>(cl->size()) - 2 > k) return BranchingResponse::none();
        return {false, drop_two(*cl)};
    }
    const Clause* positive = first_not_in(g, SClass::ZeroVal);  // at most two literals, all positive
    if (const Clause* wide = first_outside(g, {SClass::Krom2, SClass::Horn}))
        return {false, singletons(concat(positive->vars(), two_positive_plus_one(*wide)))};
    const Clause* krom = first_not_in(g, SClass::Horn);
    const Clause* horn = first_not_in(g, SClass::Krom2);
    return {false, singletons(concat(krom->vars(), first_vars(*horn, 3)))};
}

BranchingResponse branch_bounded_length(const CnfFormula& f, int k, const VarSet& bprime, const HeteroClass& s) {
    auto viol = find_violation(f, bprime, s);
    if (!viol) return BranchingResponse::confirm();
    if (size_of(bprime) >= k) return BranchingResponse::none();
    std::vector<int> vars;
    for (SClass c : s.members()) {
        const Clause* cl = first_not_in(viol->reduced, c);
        vars = concat(std::move(vars), cl->vars());
    }
    return {false, singletons(std::move(vars))};
}

BranchingResponse branch_single(const CnfFormula& f, int k, const VarSet& bprime, SClass s) {
    if (s == SClass::HornMinus) return branch_single(f.mirrored(), k, bprime, SClass::Horn);
    if (s != SClass::Horn && s != SClass::Krom2)
        throw PreconditionError("branch_single handles horn, antihorn and 2cnf only");
    auto viol = find_violation(f, bprime, HeteroClass{s});
    if (!viol) return BranchingResponse::confirm();
    if (size_of(bprime) >= k) return BranchingResponse::none();
    const Clause* cl = first_not_in(viol->reduced, s);
    if (s == SClass::Horn) return {false, singletons(first_positive_vars(*cl, 2))};
    return {false, singletons(first_vars(*cl, 3))};
}

StrongAlgorithm strong_algorithm(const HeteroClass& h) {
    if (contains_bad_pair(h)) return StrongAlgorithm::BoundedLength;
    const std::size_t n = h.size();
    if (n == 1)
        return (h.contains(SClass::ZeroVal) || h.contains(SClass::OneVal)) ? StrongAlgorithm::ExactValid
                                                                            : StrongAlgorithm::SingleClass;
    if (n == 3) return StrongAlgorithm::Triple;
    if (h.contains(SClass::Krom2)) return StrongAlgorithm::KromUnion;
    return StrongAlgorithm::HornZval;
}

VarSet minimum_valid_backdoor(const CnfFormula& f, SClass s) {
    if (s == SClass::OneVal) return minimum_valid_backdoor(f.mirrored(), SClass::ZeroVal);
    if (s != SClass::ZeroVal) throw PreconditionError("minimum_valid_backdoor needs 0val or 1val");
    // B works iff every clause lies inside B or keeps a negative literal outside B.
    // Any valid B contains the least fixpoint of the rule below, and the fixpoint is valid.
    VarSet b;
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& c : f.clauses()) {
            bool inside = true, free_negative = false;
            for (const auto& l : c.literals()) {
                bool in_b = std::binary_search(b.begin(), b.end(), l.var);
                if (!in_b) inside = false;
                if (!in_b && !l.positive) free_negative = true;
            }
            if (inside || free_negative) continue;
            b = varset_union(b, c.vars());
            changed = true;
        }
    }
    return b;
}

DetectionOutcome detect_strong(const CnfFormula& f, int k, const HeteroClass& h, const Limits& lim) {
    (void)lim;
    if (k < 0) throw PreconditionError("budget k must be nonnegative");
    switch (strong_algorithm(h)) {
        case StrongAlgorithm::ExactValid: {
            auto t0 = Clock::now();
            DetectionOutcome out;
            VarSet b = minimum_valid_backdoor(f, h.members().front());
            if (size_of(b) <= k) out.backdoor = b;
            out.stats.nodes = out.stats.leaves = 1;
            out.stats.elapsed_ms = ms_since(t0);
            return out;
        }
        case StrongAlgorithm::SingleClass: {
            SClass s = h.members().front();
            return run_branching(f, k, [s](const CnfFormula& g, int kk, const VarSet& b) {
                return branch_single(g, kk, b, s);
            });
        }
        case StrongAlgorithm::KromUnion: {
            SClass c = h.contains(SClass::Horn)        ? SClass::Horn
                       : h.contains(SClass::HornMinus) ? SClass::HornMinus
                       : h.contains(SClass::ZeroVal)   ? SClass::ZeroVal
                                                       : SClass::OneVal;
            return run_branching(f, k, [c](const CnfFormula& g, int kk, const VarSet& b) {
                return branch_krom_union(g, kk, b, c);
            });
        }
        case StrongAlgorithm::HornZval: {
            bool d = h.contains(SClass::HornMinus);
            return run_branching(f, k, [d](const CnfFormula& g, int kk, const VarSet& b) {
                return branch_horn_zval(g, kk, b, d);
            });
        }
        case StrongAlgorithm::Triple: {
            bool d = h.contains(SClass::HornMinus);
            return run_branching(f, k, [d](const CnfFormula& g, int kk, const VarSet& b) {
                return branch_triple(g, kk, b, d);
            });
        }
        case StrongAlgorithm::BoundedLength:
            return run_branching(f, k, [h](const CnfFormula& g, int kk, const VarSet& b) {
                return branch_bounded_length(g, kk, b, h);
            });
    }
    return {};
}

DetectionOutcome detect_weak_bounded(const CnfFormula& f, int k, const HeteroClass& s, const Limits& lim) {
    if (k < 0) throw PreconditionError("budget k must be nonnegative");
    (void)lim;
    auto t0 = Clock::now();
    DetectionOutcome out;
    out.mode = Mode::Weak;
    std::set<VarSet> seen;

    std::function<bool(const VarSet&, int)> dfs = [&](const VarSet& b, int depth) -> bool {
        ++out.stats.nodes;
        out.stats.max_depth = std::max(out.stats.max_depth, depth);
        std::vector<CnfFormula> outside;
        const std::uint64_t total = std::uint64_t{1} << b.size();
        for (std::uint64_t i = 0; i < total; ++i) {
            CnfFormula g = reduce(f, nth_assignment(b, i));
            auto m = formula_in_hetero(g, s);
            if (m.member()) {
                if (solve_in_class(g, *m.witness).satisfiable) {
                    ++out.stats.leaves;
                    out.backdoor = b;
                    return true;
                }
                continue;  // an unsatisfiable reduct stays unsatisfiable below this node
            }
            outside.push_back(std::move(g));
        }
        std::vector<int> vars;
        if (size_of(b) < k)
            for (const auto& g : outside)
                for (SClass c : s.members()) vars = concat(std::move(vars), first_not_in(g, c)->vars());
        vars = make_varset(std::move(vars));
        if (vars.empty()) {
            ++out.stats.leaves;
            return false;
        }
        for (int v : vars) {
            VarSet child = varset_union(b, {v});
            if (!seen.insert(child).second) continue;
            if (dfs(child, depth + 1)) return true;
        }
        return false;
    };
    dfs(VarSet{}, 0);
    out.stats.elapsed_ms = ms_since(t0);
    return out;
}

DetectionOutcome oracle_backdoor(const CnfFormula& f, int k, const HeteroClass& h, Mode mode, const Limits& lim) {
    if (k < 0) throw PreconditionError("budget k must be nonnegative");
    const VarSet& vars = f.vars();
    if (vars.size() > lim.oracle_vars)
        throw BudgetError("oracle over " + std::to_string(vars.size()) + " variables exceeds cap " +
                          std::to_string(lim.oracle_vars));
    auto t0 = Clock::now();
    DetectionOutcome out;
    out.mode = mode;
    const int n = static_cast<int>(vars.size());
    const int kmax = std::min(k, n);

    auto accepts = [&](const VarSet& b) {
        const std::uint64_t total = std::uint64_t{1} << b.size();
        for (std::uint64_t i = 0; i < total; ++i) {
            CnfFormula g = reduce(f, nth_assignment(b, i));
            bool in = in_hetero(g, h);
            if (mode == Mode::Strong && !in) return false;
            if (mode == Mode::Weak && in && sat_exhaustive(g)) return true;
        }
        return mode == Mode::Strong;
    };

    for (int size = 0; size <= kmax; ++size) {
        std::vector<int> pick(static_cast<std::size_t>(size));
        for (int i = 0; i < size; ++i) pick[static_cast<std::size_t>(i)] = i;
        while (true) {
            VarSet b;
            for (int i : pick) b.push_back(vars[static_cast<std::size_t>(i)]);
            ++out.stats.nodes;
            if (accepts(b)) {
                out.backdoor = b;
                out.stats.leaves = out.stats.nodes;
                out.stats.max_depth = size;
                out.stats.elapsed_ms = ms_since(t0);
                return out;
            }
            int i = size - 1;
            while (i >= 0 && pick[static_cast<std::size_t>(i)] == n - size + i) --i;
            if (i < 0) break;
            ++pick[static_cast<std::size_t>(i)];
            for (int j = i + 1; j < size; ++j) pick[static_cast<std::size_t>(j)] = pick[static_cast<std::size_t>(j - 1)] + 1;
        }
    }
    out.stats.leaves = out.stats.nodes;
    out.stats.max_depth = kmax;
    out.stats.elapsed_ms = ms_since(t0);
    return out;
}

Verification verify_strong(const CnfFormula& f, const VarSet& b, const HeteroClass& h, const Limits& lim) {
    if (b.size() > lim.enum_vars)
        throw BudgetError("verification over " + std::to_string(b.size()) + " variables exceeds cap " +
                          std::to_string(lim.enum_vars));
    Verification v;
    const VarSet bs = make_varset(b);
    const std::uint64_t total = std::uint64_t{1} << bs.size();
    for (std::uint64_t i = 0; i < total; ++i) {
        Assignment tau = nth_assignment(bs, i);
        auto m = formula_in_hetero(reduce(f, tau), h);
        if (!m.member()) {
            v.ok = false;
            v.falsifying = tau;
            v.violations = m.violations;
            v.witnesses.clear();
            return v;
        }
        v.witnesses.emplace_back(std::move(tau), *m.witness);
    }
    v.ok = true;
    return v;
}

std::optional<std::pair<Assignment, SClass>> verify_weak(const CnfFormula& f, const VarSet& b, const HeteroClass& h,
                                                         const Limits& lim) {
    const VarSet bs = make_varset(b);
    if (bs.size() > lim.enum_vars) throw BudgetError("backdoor too large to enumerate");
    const std::uint64_t total = std::uint64_t{1} << bs.size();
    for (std::uint64_t i = 0; i < total; ++i) {
        Assignment tau = nth_assignment(bs, i);
        CnfFormula g = reduce(f, tau);
        auto m = formula_in_hetero(g, h);
        if (m.member() && solve_in_class(g, *m.witness).satisfiable) return std::make_pair(tau, *m.witness);
    }
    return std::nullopt;
}

SatResult evaluate_backdoor(const CnfFormula& f, const VarSet& b, const HeteroClass& h, Mode mode, const Limits& lim) {
    const VarSet bs = make_varset(b);
    if (bs.size() > lim.enum_vars) throw BudgetError("backdoor too large to enumerate");
    if (mode == Mode::Strong) {
        auto ver = verify_strong(f, bs, h, lim);
        if (!ver.ok)
            throw ClassMismatch("not a strong backdoor: assignment " + to_string(*ver.falsifying) +
                                " leaves the class");
    }
    const std::uint64_t total = std::uint64_t{1} << bs.size();
    for (std::uint64_t i = 0; i < total; ++i) {
        Assignment tau = nth_assignment(bs, i);
        CnfFormula g = reduce(f, tau);
        auto m = formula_in_hetero(g, h);
        if (!m.member()) continue;  // only reachable in weak mode
        SatResult r = solve_in_class(g, *m.witness);
        if (!r.satisfiable) continue;
        Assignment model = tau;
        for (const auto& [v, val] : *r.model) model[v] = val;
        for (int v : f.vars()) model.emplace(v, false);  // variables whose clauses vanished
        for (auto it = model.begin(); it != model.end();) {
            if (!std::binary_search(f.vars().begin(), f.vars().end(), it->first))
                it = model.erase(it);
            else
                ++it;
        }
        return {true, model};
    }
    return {false, std::nullopt};
}

}  // namespace bd
