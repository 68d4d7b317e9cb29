#include "bd/cnf.hpp"

#include <algorithm>
#include <sstream>

namespace bd {

Literal::Literal(int v, bool pos) : var(v), positive(pos) {
    if (v < 1) throw PreconditionError("variable index must be >= 1, got " + std::to_string(v));
}

Literal Literal::from_dimacs(int code) {
    if (code == 0) throw PreconditionError("literal code 0 is reserved");
    return Literal(code > 0 ? code : -code, code > 0);
}

Clause::Clause(std::vector<Literal> lits) : lits_(std::move(lits)) {
    std::sort(lits_.begin(), lits_.end());
    lits_.erase(std::unique(lits_.begin(), lits_.end()), lits_.end());
    for (std::size_t i = 1; i < lits_.size(); ++i)
        if (lits_[i].var == lits_[i - 1].var)
            throw PreconditionError("complementary literals on variable " + std::to_string(lits_[i].var));
}

Clause Clause::from_dimacs(const std::vector<int>& codes) {
    std::vector<Literal> lits;
    lits.reserve(codes.size());
    for (int c : codes) lits.push_back(Literal::from_dimacs(c));
    return Clause(std::move(lits));
}

std::size_t Clause::positives() const {
    return static_cast<std::size_t>(std::count_if(lits_.begin(), lits_.end(), [](const Literal& l) { return l.positive; }));
}

std::size_t Clause::negatives() const { return lits_.size() - positives(); }

std::vector<int> Clause::vars() const {
    std::vector<int> out;
    out.reserve(lits_.size());
    for (const auto& l : lits_) out.push_back(l.var);
    return out;  // already sorted, one literal per variable
}

bool Clause::contains(const Literal& l) const { return std::binary_search(lits_.begin(), lits_.end(), l); }

Clause Clause::mirrored() const {
    std::vector<Literal> out;
    out.reserve(lits_.size());
    for (const auto& l : lits_) out.push_back(l.negated());
    return Clause(std::move(out));
}

CnfFormula::CnfFormula(std::vector<Clause> clauses) : clauses_(std::move(clauses)) {
    std::sort(clauses_.begin(), clauses_.end());
    clauses_.erase(std::unique(clauses_.begin(), clauses_.end()), clauses_.end());
    for (const auto& c : clauses_)
        for (const auto& l : c.literals()) vars_.push_back(l.var);
    vars_ = make_varset(std::move(vars_));
}

std::size_t CnfFormula::max_clause_length() const {
    std::size_t r = 0;
    for (const auto& c : clauses_) r = std::max(r, c.size());
    return r;
}

CnfFormula CnfFormula::mirrored() const {
    std::vector<Clause> out;
    out.reserve(clauses_.size());
    for (const auto& c : clauses_) out.push_back(c.mirrored());
    return CnfFormula(std::move(out));
}

DimacsResult parse_dimacs(const std::string& text) {
    DimacsResult res;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    bool have_header = false;
    long declared_clauses = 0;
    std::vector<Clause> clauses;
    std::vector<int> pending;
    std::size_t pending_line = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string first;
        if (!(ls >> first)) continue;
        if (first == "c" || first[0] == 'c') continue;
        if (first == "%") break;  // SATLIB trailer
        if (first == "p") {
            if (have_header) throw ParseError(lineno, "duplicate problem line");
            std::string fmt;
            long nv = -1, nc = -1;
            if (!(ls >> fmt >> nv >> nc) || fmt != "cnf" || nv < 0 || nc < 0)
                throw ParseError(lineno, "malformed header, expected 'p cnf <vars> <clauses>'");
            std::string extra;
            if (ls >> extra) throw ParseError(lineno, "trailing tokens after header");
            res.declared_vars = static_cast<int>(nv);
            declared_clauses = nc;
            have_header = true;
            continue;
        }
        if (!have_header) throw ParseError(lineno, "clause before problem line");
        std::istringstream toks(line);
        std::string tok;
        while (toks >> tok) {
            long v = 0;
            std::size_t used = 0;
            try {
                v = std::stol(tok, &used);
            } catch (const std::exception&) {
                throw ParseError(lineno, "invalid literal '" + tok + "'");
            }
            if (used != tok.size()) throw ParseError(lineno, "invalid literal '" + tok + "'");
            if (pending.empty()) pending_line = lineno;
            if (v == 0) {
                std::sort(pending.begin(), pending.end());
                pending.erase(std::unique(pending.begin(), pending.end()), pending.end());
                bool taut = false;
                for (int x : pending)
                    if (x > 0 && std::binary_search(pending.begin(), pending.end(), -x)) taut = true;
                if (taut)
                    ++res.tautologies_removed;
                else
                    clauses.push_back(Clause::from_dimacs(pending));
                pending.clear();
                continue;
            }
            if (std::labs(v) > res.declared_vars)
                throw ParseError(lineno, "literal " + tok + " exceeds declared variable count " +
                                             std::to_string(res.declared_vars));
            pending.push_back(static_cast<int>(v));
        }
    }
    if (!have_header) throw ParseError(lineno == 0 ? 1 : lineno, "missing problem line");
    if (!pending.empty()) throw ParseError(pending_line, "clause is missing its terminating 0");
    (void)declared_clauses;  // the clause count in the header is advisory
    res.formula = CnfFormula(std::move(clauses));
    return res;
}

std::string write_dimacs(const CnfFormula& f, int declared_vars) {
    std::ostringstream out;
    out << "p cnf " << std::max(declared_vars, f.max_var()) << ' ' << f.size() << '\n';
    for (const auto& c : f.clauses()) {
        for (const auto& l : c.literals()) out << l.dimacs() << ' ';
        out << "0\n";
    }
    return out.str();
}

CnfFormula reduce(const CnfFormula& f, const Assignment& tau) {
    if (tau.empty()) return f;
    std::vector<Clause> out;
    out.reserve(f.size());
    for (const auto& c : f.clauses()) {
        bool sat = false;
        std::vector<Literal> rest;
        rest.reserve(c.size());
        for (const auto& l : c.literals()) {
            auto it = tau.find(l.var);
            if (it == tau.end()) {
                rest.push_back(l);
            } else if (it->second == l.positive) {
                sat = true;
                break;
            }
        }
        if (!sat) out.emplace_back(std::move(rest));
    }
    return CnfFormula(std::move(out));
}

Assignment nth_assignment(const VarSet& vars, std::uint64_t index) {
    // Binary counter with the last (largest) variable as the least significant bit.
    Assignment a;
    const std::size_t n = vars.size();
    for (std::size_t i = 0; i < n; ++i) a[vars[i]] = ((index >> (n - 1 - i)) & 1U) != 0;
    return a;
}

std::vector<Assignment> enumerate_assignments(const VarSet& vars, const Limits& lim) {
    if (vars.size() > lim.enum_vars)
        throw BudgetError("assignment enumeration over " + std::to_string(vars.size()) +
                          " variables exceeds cap " + std::to_string(lim.enum_vars));
    const std::uint64_t total = std::uint64_t{1} << vars.size();
    std::vector<Assignment> out;
    out.reserve(total);
    for (std::uint64_t i = 0; i < total; ++i) out.push_back(nth_assignment(vars, i));
    return out;
}

bool satisfies(const CnfFormula& f, const Assignment& model) {
    for (const auto& c : f.clauses()) {
        bool ok = false;
        for (const auto& l : c.literals()) {
            auto it = model.find(l.var);
            if (it != model.end() && it->second == l.positive) {
                ok = true;
                break;
            }
        }
        if (!ok) return false;
    }
    return true;
}

namespace {

struct Backtracker {
    const CnfFormula& f;
    std::vector<int> order;
    std::map<int, int> value;  // -1 unassigned, 0, 1
    std::vector<std::vector<std::size_t>> watch;  // clause indices per position in order

    explicit Backtracker(const CnfFormula& formula) : f(formula), order(formula.vars()) {
        for (int v : order) value[v] = -1;
        // A clause can only become falsified once its largest variable is set.
        watch.resize(order.size());
        for (std::size_t ci = 0; ci < f.size(); ++ci) {
            const auto& c = f.clauses()[ci];
            if (c.empty()) continue;
            auto pos = std::lower_bound(order.begin(), order.end(), c.literals().back().var) - order.begin();
            watch[static_cast<std::size_t>(pos)].push_back(ci);
        }
    }

    bool falsified(std::size_t ci) const {
        for (const auto& l : f.clauses()[ci].literals()) {
            int v = value.at(l.var);
            if (v < 0 || (v == 1) == l.positive) return false;
        }
        return true;
    }

    bool run(std::size_t depth) {
        if (depth == order.size()) return true;
        for (int b = 0; b <= 1; ++b) {
            value[order[depth]] = b;
            bool ok = true;
            for (std::size_t ci : watch[depth])
                if (falsified(ci)) {
                    ok = false;
                    break;
                }
            if (ok && run(depth + 1)) return true;
        }
        value[order[depth]] = -1;
        return false;
    }
};

}  // namespace

std::optional<Assignment> sat_exhaustive(const CnfFormula& f) {
    for (const auto& c : f.clauses())
        if (c.empty()) return std::nullopt;
    Backtracker bt(f);
    if (!bt.run(0)) return std::nullopt;
    Assignment model;
    for (int v : bt.order) model[v] = bt.value[v] == 1;
    return model;
}

std::string to_string(const Literal& l) { return (l.positive ? "" : "-") + std::to_string(l.var); }

std::string to_string(const Clause& c) {
    std::string s = "(";
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (i) s += ' ';
        s += to_string(c.literals()[i]);
    }
    return s + ")";
}

std::string to_string(const Assignment& a) {
    std::string s = "{";
    bool first = true;
    for (const auto& [v, b] : a) {
        if (!first) s += ',';
        first = false;
        s += std::to_string(v) + "=" + (b ? "1" : "0");
    }
    return s + "}";
}

VarSet make_varset(std::vector<int> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

VarSet varset_union(const VarSet& a, const VarSet& b) {
    VarSet out;
    out.reserve(a.size() + b.size());
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

}  // namespace bd
