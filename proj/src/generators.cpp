#include "bd/generators.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <sstream>

namespace bd {

SetSystem parse_set_system(const std::string& text) {
    SetSystem h;
    std::map<std::string, int> index;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    bool have_k = false;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::vector<std::string> words;
        for (std::string w; ls >> w;) words.push_back(w);
        if (words.empty()) continue;
        if (!have_k) {
            if (words.size() != 1) throw ParseError(lineno, "expected the budget k alone on the first line");
            try {
                std::size_t used = 0;
                h.k = std::stoi(words[0], &used);
                if (used != words[0].size() || h.k < 0) throw std::invalid_argument("k");
            } catch (const std::exception&) {
                throw ParseError(lineno, "budget k must be a non-negative integer");
            }
            have_k = true;
            continue;
        }
        std::set<int> set;
        for (const auto& w : words) {
            auto [it, fresh] = index.try_emplace(w, static_cast<int>(h.universe.size()));
            if (fresh) h.universe.push_back(w);
            set.insert(it->second);
        }
        h.sets.emplace_back(set.begin(), set.end());
    }
    if (!have_k) throw ParseError(0, "empty set system");
    return h;
}

std::string write_set_system(const SetSystem& h) {
    std::ostringstream out;
    out << h.k << "\n";
    for (const auto& s : h.sets) {
        for (std::size_t i = 0; i < s.size(); ++i)
            out << (i ? " " : "") << h.universe.at(static_cast<std::size_t>(s[i]));
        out << "\n";
    }
    return out.str();
}

CnfFormula intro_family(int n) {
    if (n < 1) throw PreconditionError("intro family needs n >= 1");
    std::vector<Clause> cs;
    std::vector<Literal> c{Literal(1, true)};
    for (int i = 1; i <= n; ++i) c.emplace_back(1 + i, false);
    cs.emplace_back(c);
    for (int i = 1; i <= n; ++i)
        cs.emplace_back(std::vector<Literal>{Literal(1, false), Literal(1 + n + i, true), Literal(1 + 2 * n + i, true)});
    return CnfFormula(cs);
}

Clause obstruction(SClass from, SClass to) {
    using S = SClass;
    auto make = [](std::initializer_list<int> codes) { return Clause::from_dimacs(codes); };
    if (from == to) throw PreconditionError("an obstruction needs two different classes");
    switch (to) {
        case S::Krom2:
            if (from == S::Horn || from == S::ZeroVal) return make({-1, -2, -3});
            return make({1, 2, 3});
        case S::Horn:
            if (from == S::ZeroVal) return make({1, 2, -3});
            return make({1, 2});
        case S::HornMinus:
            if (from == S::OneVal) return make({-1, -2, 3});
            return make({-1, -2});
        case S::ZeroVal: return make({1});
        case S::OneVal: return make({-1});
    }
    throw PreconditionError("no obstruction for " + tag(from) + " to " + tag(to));
}

CnfFormula hs_to_strong_sat(const SetSystem& h, UniversePadding padding) {
    int n = static_cast<int>(h.universe.size());
    if (padding == UniversePadding::Padded) n = std::max(n, h.k + 2);
    std::vector<Clause> cs;
    int next = n + 1;
    for (const auto& q : h.sets) {
        std::vector<Literal> lits;
        for (int u : q) lits.emplace_back(u + 1, true);
        for (std::size_t i = q.size(); i < static_cast<std::size_t>(n); ++i) lits.emplace_back(next++, true);
        cs.emplace_back(lits);
    }
    std::vector<Literal> all_neg;
    for (int u = 1; u <= n; ++u) all_neg.emplace_back(u, false);
    cs.emplace_back(all_neg);
    return CnfFormula(cs);
}

CnfFormula weak_obstruction_pad(const CnfFormula& f, int k, SClass s, const HeteroClass& h) {
    if (!h.contains(s)) throw PreconditionError("the padded class must belong to the target class");
    if (k < 0) throw PreconditionError("k must be non-negative");
    std::vector<Clause> cs = f.clauses();
    int base = f.max_var();
    for (SClass t : h.members()) {
        if (t == s) continue;
        const Clause o = obstruction(s, t);
        for (int copy = 0; copy <= k; ++copy) {
            std::vector<Literal> lits;
            for (const Literal& l : o.literals()) lits.emplace_back(base + l.var, l.positive);
            base += 3;
            cs.emplace_back(lits);
        }
    }
    return CnfFormula(cs);
}

namespace {

std::vector<Tuple> all_boolean_tuples(int r) {
    std::vector<Tuple> out;
    for (int code = 0; code < (1 << r); ++code) {
        Tuple t(static_cast<std::size_t>(r));
        for (int i = 0; i < r; ++i) t[static_cast<std::size_t>(i)] = (code >> (r - 1 - i)) & 1;
        out.push_back(t);
    }
    return out;
}

// First sequence (lexicographic over indices into lambda) whose image leaves lambda.
std::optional<std::vector<Tuple>> escaping_sequence(const OperationTable& phi, const std::vector<Tuple>& lambda) {
    const int n = phi.arity();
    const std::size_t m = lambda.size();
    const std::size_t r = lambda.front().size();
    std::vector<std::size_t> pick(static_cast<std::size_t>(n), 0);
    std::vector<int> args(static_cast<std::size_t>(n));
    while (true) {
        Tuple img(r);
        for (std::size_t c = 0; c < r; ++c) {
            for (int j = 0; j < n; ++j) args[static_cast<std::size_t>(j)] = lambda[pick[static_cast<std::size_t>(j)]][c];
            img[c] = phi(args);
        }
        if (!std::binary_search(lambda.begin(), lambda.end(), img)) {
            std::vector<Tuple> w;
            for (std::size_t p : pick) w.push_back(lambda[p]);
            return w;
        }
        int j = n - 1;
        while (j >= 0 && ++pick[static_cast<std::size_t>(j)] == m) pick[static_cast<std::size_t>(j--)] = 0;
        if (j < 0) return std::nullopt;
    }
}

}  // namespace

std::optional<BooleanBarrier> boolean_barrier(const OperationTable& phi) {
    if (phi.domain() < 2) throw PreconditionError("the operation domain must contain 0 and 1");
    const int c = phi.arity();
    for (std::size_t row = 0; row < (std::size_t{1} << c); ++row) {
        std::vector<int> args(static_cast<std::size_t>(c));
        for (int i = 0; i < c; ++i) args[static_cast<std::size_t>(i)] = static_cast<int>((row >> (c - 1 - i)) & 1);
        if (phi(args) > 1) throw PreconditionError("the operation maps Boolean arguments outside {0,1}");
    }
    for (int size = 1; size <= c; ++size)
        for (int r = 1; r <= (1 << c); ++r) {
            const std::vector<Tuple> pool = all_boolean_tuples(r);
            if (static_cast<std::size_t>(size) > pool.size()) continue;
            std::vector<std::size_t> idx(static_cast<std::size_t>(size));
            for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
            while (true) {
                std::vector<Tuple> lambda;
                for (std::size_t i : idx) lambda.push_back(pool[i]);
                if (auto w = escaping_sequence(phi, lambda)) return BooleanBarrier{r, lambda, *w};
                std::size_t i = idx.size();
                while (i > 0 && idx[i - 1] == pool.size() - idx.size() + i - 1) --i;
                if (i == 0) break;
                ++idx[i - 1];
                for (std::size_t j = i; j < idx.size(); ++j) idx[j] = idx[j - 1] + 1;
            }
        }
    return std::nullopt;
}

std::vector<BooleanBarrier> barrier_set(const std::vector<PolyProperty>& props) {
    std::set<BooleanBarrier> out;
    for (PolyProperty p : props) {
        if (!is_idempotent_property(p))
            throw PreconditionError("the Boolean barrier reduction needs idempotent properties, not " + tag(p));
        const OperationFamily fam = enumerate_property_ops(2, p);
        for (std::size_t i = 0; i < fam.size(); ++i) {
            auto b = boolean_barrier(fam[i]);
            if (!b) throw PreconditionError("a " + tag(p) + " operation has no Boolean barrier");
            out.insert(*b);
        }
    }
    return {out.begin(), out.end()};
}

CspInstance hs_to_csp_boolean(const SetSystem& h, const std::vector<PolyProperty>& props) {
    const std::vector<BooleanBarrier> lambdas = barrier_set(props);
    std::vector<std::string> names;
    for (const auto& u : h.universe) names.push_back("x_" + u);
    std::vector<Constraint> cs;
    for (std::size_t l = 0; l < lambdas.size(); ++l)
        for (std::size_t q = 0; q < h.sets.size(); ++q) {
            const auto& lam = lambdas[l];
            const auto& set = h.sets[q];
            Constraint c;
            for (int j = 1; j <= lam.arity; ++j) {
                c.scope.push_back(static_cast<int>(names.size()));
                names.push_back("o" + std::to_string(j) + "_" + std::to_string(l + 1) + "_" + std::to_string(q + 1));
            }
            for (int u : set) c.scope.push_back(u);
            std::vector<Tuple> rows;
            for (std::size_t i = 0; i < lam.tuples.size(); ++i) {
                Tuple row = lam.tuples[i];
                row.insert(row.end(), set.size(), static_cast<int>((i + 1) % 2));
                rows.push_back(row);
            }
            c.relation = Relation(static_cast<int>(c.scope.size()), rows);
            cs.push_back(std::move(c));
        }
    return CspInstance(names, 2, cs);
}

int chain_gadget_domain(PolyProperty c, int k) {
    switch (c) {
        case PolyProperty::Majority: return 3 * k - 3;
        case PolyProperty::MinMax: return k + 2;
        case PolyProperty::Minority:
        case PolyProperty::Malcev: return 3 * k + 3;
        default: throw PreconditionError("no gadget for the " + tag(c) + " property");
    }
}

namespace {

std::vector<std::vector<Tuple>> chain_gadget_relations(PolyProperty c, int k, GadgetTables tables) {
    const bool printed = tables == GadgetTables::AsPrinted;
    std::vector<std::vector<Tuple>> rel;
    switch (c) {
        case PolyProperty::Majority: {
            const int x = 3 * (k - 2);
            rel.push_back({{0, 0}, {1, 3}, {1, 4}, {2, 5}});
            rel.push_back({{0, 0}, {1, 3}, {2, 4}, {1, 5}});
            rel.push_back({{0, 0}, {2, x}, {1, x + 1}, {printed ? 2 : 1, x + 2}});
            for (int i = 4; i <= k; ++i) {
                const int a = 3 * (i - 3), b = 3 * (i - 2);
                rel.push_back({{0, 0}, {a, b}, {a + 1, b + 1}, {a + 2, b + 2}});
            }
            break;
        }
        case PolyProperty::MinMax: {
            for (int i = 1; i < k; ++i) rel.push_back({{0, 0}, {i, i + 1}, {i + 1, i}, {i + 1, i + 1}});
            const int top = printed ? k + 1 : k;
            rel.push_back({{0, 0}, {1, top}, {top, 1}, {1, 1}});
            break;
        }
        case PolyProperty::Minority:
        case PolyProperty::Malcev: {
            rel.push_back({{0, 0}, {1, 3}, {1, 4}, {2, 5}});
            for (int i = 2; i < k; ++i) {
                const int a = 3 * (i - 1), b = 3 * i;
                rel.push_back({{0, 0}, {a, b}, {a + 1, b + 1}, {a + 2, b + 2}});
            }
            const int a = 3 * (k - 1);
            rel.push_back({{0, 0}, {1, a}, {2, a + 1}, {1, printed ? a + 1 : a + 2}});
            break;
        }
        default: throw PreconditionError("no gadget for the " + tag(c) + " property");
    }
    return rel;
}

}  // namespace

CspInstance chain_gadget(PolyProperty c, int k, GadgetTables tables) {
    if (k < 3) throw PreconditionError("gadgets need k >= 3");
    const auto rel = chain_gadget_relations(c, k, tables);
    std::vector<std::string> names;
    for (int i = 1; i <= 2 * k; ++i) names.push_back("v" + std::to_string(i));
    std::vector<Constraint> cs;
    for (int i = 0; i < k; ++i)
        cs.push_back({{2 * i, 2 * i + 1}, Relation(2, rel[static_cast<std::size_t>(i)])});
    return CspInstance(names, chain_gadget_domain(c, k), cs);
}

CspInstance hs_to_csp_arity2(const SetSystem& h, PolyProperty c, GadgetTables tables) {
    std::vector<std::string> names;
    for (const auto& u : h.universe) names.push_back("x_" + u);
    std::vector<Constraint> cs;
    int offset = 0;  // nonzero values of each set's gadget are shifted past those of earlier sets
    for (std::size_t q = 0; q < h.sets.size(); ++q) {
        const auto& set = h.sets[q];
        const int k = static_cast<int>(set.size());
        if (k < 3) throw PreconditionError("every set needs at least 3 elements");
        const auto rel = chain_gadget_relations(c, k, tables);
        for (int i = 0; i < k; ++i) {
            Constraint con;
            con.scope.push_back(set[static_cast<std::size_t>(i)]);
            con.scope.push_back(static_cast<int>(names.size()));
            names.push_back("y" + std::to_string(q + 1) + "_" + std::to_string(i + 1));
            std::vector<Tuple> rows;
            for (Tuple t : rel[static_cast<std::size_t>(i)]) {
                for (int& v : t)
                    if (v) v += offset;
                rows.push_back(t);
            }
            con.relation = Relation(2, rows);
            cs.push_back(std::move(con));
        }
        offset += chain_gadget_domain(c, k) - 1;
    }
    return CspInstance(names, offset + 1, cs);
}

CspInstance pivot_instance(int n) {
    if (n < 3) throw PreconditionError("the pivot instance needs at least 3 variables");
    std::vector<std::string> names{"x"};
    for (int i = 1; i < n; ++i) names.push_back("y" + std::to_string(i));
    const Relation r(3, {{0, 0, 1}, {0, 1, 0}, {1, 0, 0}});
    std::vector<Constraint> cs;
    for (int i = 1; i + 1 < n; ++i) cs.push_back({{0, i, i + 1}, r});
    return CspInstance(names, 2, cs);
}

namespace {

int draw(std::mt19937_64& rng, int lo, int hi) {
    return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

void check_range(int lo, int hi, int min_allowed, const char* what) {
    if (lo < min_allowed || hi < lo) throw PreconditionError(std::string("inconsistent bounds for ") + what);
}

// Distinct values from [0, n), in draw order.
std::vector<int> distinct(std::mt19937_64& rng, int count, int n) {
    std::vector<int> out;
    while (static_cast<int>(out.size()) < count) {
        int v = draw(rng, 0, n - 1);
        if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
    }
    return out;
}

}  // namespace

std::vector<CnfFormula> random_cnf_corpus(std::uint64_t seed, int count, const RandomCnfParams& p) {
    check_range(p.min_vars, p.max_vars, 1, "variables");
    check_range(p.min_clauses, p.max_clauses, 0, "clauses");
    check_range(p.min_len, p.max_len, 1, "clause length");
    std::mt19937_64 rng(seed);
    std::vector<CnfFormula> out;
    for (int f = 0; f < count; ++f) {
        const int n = draw(rng, p.min_vars, p.max_vars);
        const int m = draw(rng, p.min_clauses, p.max_clauses);
        std::vector<Clause> cs;
        for (int j = 0; j < m; ++j) {
            const int len = std::min(draw(rng, p.min_len, p.max_len), n);
            std::vector<Literal> lits;
            for (int v : distinct(rng, len, n)) lits.emplace_back(v + 1, rng() % 2 == 1);
            cs.emplace_back(lits);
        }
        out.emplace_back(cs);
    }
    return out;
}

std::vector<CspInstance> random_csp_corpus(std::uint64_t seed, int count, const RandomCspParams& p) {
    check_range(p.min_vars, p.max_vars, 1, "variables");
    check_range(p.min_domain, p.max_domain, 1, "domain");
    check_range(p.min_constraints, p.max_constraints, 0, "constraints");
    check_range(1, p.max_arity, 1, "arity");
    check_range(p.density_percent, p.density_percent, 0, "density");
    std::mt19937_64 rng(seed);
    std::vector<CspInstance> out;
    for (int f = 0; f < count; ++f) {
        const int n = draw(rng, p.min_vars, p.max_vars);
        const int d = draw(rng, p.min_domain, p.max_domain);
        const int m = draw(rng, p.min_constraints, p.max_constraints);
        std::vector<std::string> names;
        for (int i = 1; i <= n; ++i) names.push_back("v" + std::to_string(i));
        std::vector<Constraint> cs;
        for (int j = 0; j < m; ++j) {
            const int a = std::min(draw(rng, 1, p.max_arity), n);
            Constraint c;
            c.scope = distinct(rng, a, n);
            std::vector<Tuple> ts;
            std::uint64_t total = assignment_count(static_cast<std::size_t>(a), d);
            for (std::uint64_t code = 0; code < total; ++code) {
                if (static_cast<int>(rng() % 100) >= p.density_percent) continue;
                Tuple t(static_cast<std::size_t>(a));
                std::uint64_t x = code;
                for (int i = a - 1; i >= 0; --i) {
                    t[static_cast<std::size_t>(i)] = static_cast<int>(x % static_cast<std::uint64_t>(d));
                    x /= static_cast<std::uint64_t>(d);
                }
                ts.push_back(t);
            }
            c.relation = Relation(a, ts);
            cs.push_back(std::move(c));
        }
        out.emplace_back(names, d, cs);
    }
    return out;
}

}  // namespace bd
