#include "bd/schaefer.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

namespace bd {

std::string tag(SClass s) {
    switch (s) {
        case SClass::Horn: return "horn";
        case SClass::HornMinus: return "antihorn";
        case SClass::Krom2: return "2cnf";
        case SClass::ZeroVal: return "0val";
        case SClass::OneVal: return "1val";
    }
    return "?";
}

SClass parse_class_tag(const std::string& t) {
    for (SClass s : kAllClasses)
        if (tag(s) == t) return s;
    throw PreconditionError("unknown class tag '" + t + "'");
}

SClass dual(SClass s) {
    switch (s) {
        case SClass::Horn: return SClass::HornMinus;
        case SClass::HornMinus: return SClass::Horn;
        case SClass::ZeroVal: return SClass::OneVal;
        case SClass::OneVal: return SClass::ZeroVal;
        case SClass::Krom2: return SClass::Krom2;
    }
    return s;
}

HeteroClass::HeteroClass(std::initializer_list<SClass> members) {
    for (SClass s : members) mask_ |= static_cast<std::uint8_t>(1U << static_cast<int>(s));
    if (mask_ == 0) throw PreconditionError("heterogeneous class must be nonempty");
}

HeteroClass HeteroClass::from_mask(std::uint8_t mask) {
    if (mask == 0 || mask >= 32) throw PreconditionError("class mask out of range");
    HeteroClass h;
    h.mask_ = mask;
    return h;
}

HeteroClass HeteroClass::parse(const std::string& comma_list) {
    std::uint8_t mask = 0;
    std::stringstream ss(comma_list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        mask |= static_cast<std::uint8_t>(1U << static_cast<int>(parse_class_tag(item)));
    }
    if (mask == 0) throw PreconditionError("empty class list");
    return from_mask(mask);
}

std::vector<SClass> HeteroClass::members() const {
    std::vector<SClass> out;
    for (SClass s : kAllClasses)
        if (contains(s)) out.push_back(s);
    return out;
}

std::size_t HeteroClass::size() const { return members().size(); }

HeteroClass HeteroClass::mirrored() const {
    std::uint8_t m = 0;
    for (SClass s : members()) m |= static_cast<std::uint8_t>(1U << static_cast<int>(dual(s)));
    return from_mask(m);
}

std::string HeteroClass::to_string() const {
    std::string out;
    for (SClass s : members()) {
        if (!out.empty()) out += ',';
        out += tag(s);
    }
    return out;
}

bool clause_in_class(const Clause& c, SClass s) {
    switch (s) {
        case SClass::Horn: return c.positives() <= 1;
        case SClass::HornMinus: return c.negatives() <= 1;
        case SClass::Krom2: return c.size() <= 2;
        case SClass::ZeroVal: return c.empty() || c.negatives() >= 1;
        case SClass::OneVal: return c.empty() || c.positives() >= 1;
    }
    return false;
}

int first_violation(const CnfFormula& f, SClass s) {
    const auto& cs = f.clauses();
    for (std::size_t i = 0; i < cs.size(); ++i)
        if (!clause_in_class(cs[i], s)) return static_cast<int>(i);
    return -1;
}

bool formula_in_class(const CnfFormula& f, SClass s) { return first_violation(f, s) < 0; }

Membership formula_in_hetero(const CnfFormula& f, const HeteroClass& h) {
    Membership m;
    for (SClass s : h.members()) {
        int idx = first_violation(f, s);
        if (idx < 0) {
            m.witness = s;
            m.violations.clear();
            return m;
        }
        m.violations.emplace_back(s, f.clauses()[static_cast<std::size_t>(idx)]);
    }
    return m;
}

bool in_hetero(const CnfFormula& f, const HeteroClass& h) {
    for (SClass s : h.members())
        if (formula_in_class(f, s)) return true;
    return false;
}

bool contains_bad_pair(const HeteroClass& h) {
    bool left = h.contains(SClass::Horn) || h.contains(SClass::ZeroVal);
    bool right = h.contains(SClass::HornMinus) || h.contains(SClass::OneVal);
    return left && right;
}

namespace {

SatResult solve_horn(const CnfFormula& f) {
    std::set<int> truth;
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& c : f.clauses()) {
            std::optional<Literal> pos;
            bool blocked = false;
            for (const auto& l : c.literals()) {
                if (l.positive) {
                    pos = l;
                    if (truth.count(l.var)) blocked = true;  // satisfied
                } else if (!truth.count(l.var)) {
                    blocked = true;  // a negative literal is still true
                }
            }
            if (blocked) continue;
            if (!pos) return {false, std::nullopt};
            truth.insert(pos->var);
            changed = true;
        }
    }
    Assignment model;
    for (int v : f.vars()) model[v] = truth.count(v) > 0;
    return {true, model};
}

SatResult solve_krom(const CnfFormula& f) {
    const auto& vars = f.vars();
    const std::size_t n = vars.size();
    auto idx = [&](int v) {
        return static_cast<std::size_t>(std::lower_bound(vars.begin(), vars.end(), v) - vars.begin());
    };
    // Node 2i is "var i true", 2i+1 is "var i false".
    auto node = [&](const Literal& l) { return 2 * idx(l.var) + (l.positive ? 0 : 1); };
    std::vector<std::vector<std::size_t>> adj(2 * n);
    for (const auto& c : f.clauses()) {
        if (c.empty()) return {false, std::nullopt};
        const auto& ls = c.literals();
        if (ls.size() == 1) {
            adj[node(ls[0]) ^ 1U].push_back(node(ls[0]));
        } else {
            adj[node(ls[0]) ^ 1U].push_back(node(ls[1]));
            adj[node(ls[1]) ^ 1U].push_back(node(ls[0]));
        }
    }
    // Tarjan: component ids come out in reverse topological order.
    std::vector<int> index(2 * n, -1), low(2 * n, 0), comp(2 * n, -1);
    std::vector<bool> on_stack(2 * n, false);
    std::vector<std::size_t> stack;
    int counter = 0, ncomp = 0;
    std::function<void(std::size_t)> dfs = [&](std::size_t u) {
        index[u] = low[u] = counter++;
        stack.push_back(u);
        on_stack[u] = true;
        for (std::size_t w : adj[u]) {
            if (index[w] < 0) {
                dfs(w);
                low[u] = std::min(low[u], low[w]);
            } else if (on_stack[w]) {
                low[u] = std::min(low[u], index[w]);
            }
        }
        if (low[u] == index[u]) {
            std::size_t w;
            do {
                w = stack.back();
                stack.pop_back();
                on_stack[w] = false;
                comp[w] = ncomp;
            } while (w != u);
            ++ncomp;
        }
    };
    for (std::size_t u = 0; u < 2 * n; ++u)
        if (index[u] < 0) dfs(u);
    Assignment model;
    for (std::size_t i = 0; i < n; ++i) {
        if (comp[2 * i] == comp[2 * i + 1]) return {false, std::nullopt};
        model[vars[i]] = comp[2 * i] < comp[2 * i + 1];
    }
    return {true, model};
}

SatResult mirror_result(SatResult r) {
    if (r.model)
        for (auto& [v, b] : *r.model) b = !b;
    return r;
}

}  // namespace

SatResult solve_in_class(const CnfFormula& f, SClass s) {
    int bad = first_violation(f, s);
    if (bad >= 0)
        throw ClassMismatch("formula is not in class " + tag(s) + ": clause " +
                            to_string(f.clauses()[static_cast<std::size_t>(bad)]));
    switch (s) {
        case SClass::Horn: return solve_horn(f);
        case SClass::HornMinus: return mirror_result(solve_horn(f.mirrored()));
        case SClass::Krom2: return solve_krom(f);
        case SClass::ZeroVal:
        case SClass::OneVal: {
            for (const auto& c : f.clauses())
                if (c.empty()) return {false, std::nullopt};
            Assignment model;
            for (int v : f.vars()) model[v] = (s == SClass::OneVal);
            return {true, model};
        }
    }
    return {};
}

}  // namespace bd
