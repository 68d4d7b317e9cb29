#include "bd/polymorphism.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace bd {

int property_arity(PolyProperty p) {
    switch (p) {
        case PolyProperty::Constant: return 1;
        case PolyProperty::MinMax: return 2;
        default: return 3;
    }
}

std::string tag(PolyProperty p) {
    switch (p) {
        case PolyProperty::Constant: return "constant";
        case PolyProperty::MinMax: return "minmax";
        case PolyProperty::Majority: return "majority";
        case PolyProperty::Minority: return "minority";
        case PolyProperty::Malcev: return "malcev";
    }
    return "?";
}

PolyProperty parse_property_tag(const std::string& t) {
    for (PolyProperty p : kAllProperties)
        if (tag(p) == t) return p;
    throw PreconditionError("unknown property tag '" + t + "'");
}

std::vector<PolyProperty> parse_property_list(const std::string& comma_list) {
    std::set<PolyProperty> ps;
    std::stringstream ss(comma_list);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) ps.insert(parse_property_tag(item));
    if (ps.empty()) throw PreconditionError("empty property list");
    return {ps.begin(), ps.end()};
}

bool is_idempotent_property(PolyProperty p) { return p != PolyProperty::Constant; }

OperationTable::OperationTable(int arity, int domain, std::vector<int> outputs)
    : arity_(arity), domain_(domain), out_(std::move(outputs)) {
    std::size_t rows = 1;
    for (int i = 0; i < arity; ++i) rows *= static_cast<std::size_t>(domain);
    if (out_.size() != rows) throw PreconditionError("operation table is not total");
    for (int v : out_)
        if (v < 0 || v >= domain) throw PreconditionError("operation output outside the domain");
}

std::size_t row_index(const std::vector<int>& args, int domain) {
    std::size_t r = 0;
    for (int a : args) r = r * static_cast<std::size_t>(domain) + static_cast<std::size_t>(a);
    return r;
}

int OperationTable::operator()(const std::vector<int>& args) const { return out_[row_index(args, domain_)]; }

OperationTable OperationFamily::operator[](std::size_t i) const {
    std::vector<int> out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) out[r] = data_[i * rows_ + r];
    return OperationTable(arity_, domain_, std::move(out));
}

void OperationFamily::push_back(const std::vector<int>& outputs) {
    if (rows_ == 0) rows_ = outputs.size();
    for (int v : outputs) data_.push_back(static_cast<std::uint8_t>(v));
}

namespace {

// Value an identity of p pins the entry (a,b,c) to, or -1 when the entry is free.
int forced_ternary(PolyProperty p, int a, int b, int c) {
    switch (p) {
        case PolyProperty::Majority:
            if (a == b || a == c) return a;
            if (b == c) return b;
            return -1;
        case PolyProperty::Minority:
            if (a == b) return c;
            if (a == c) return b;
            if (b == c) return a;
            return -1;
        case PolyProperty::Malcev:
            if (a == b) return c;
            if (b == c) return a;
            return -1;
        default: return -1;
    }
}

}  // namespace

int forced_value(PolyProperty p, int a, int b, int c) { return forced_ternary(p, a, b, c); }

std::vector<std::size_t> free_rows(int d, PolyProperty p) {
    std::vector<std::size_t> out;
    if (property_arity(p) != 3) return out;
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
            for (int c = 0; c < d; ++c)
                if (forced_ternary(p, a, b, c) < 0) out.push_back(static_cast<std::size_t>((a * d + b) * d + c));
    return out;
}

namespace {

void require_arity(const OperationTable& phi, PolyProperty p) {
    if (phi.arity() != property_arity(p))
        throw PreconditionError("property " + tag(p) + " needs arity " + std::to_string(property_arity(p)) +
                                ", table has arity " + std::to_string(phi.arity()));
}

std::vector<int> min_table(const std::vector<int>& rank, int d) {
    std::vector<int> out(static_cast<std::size_t>(d * d));
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) out[static_cast<std::size_t>(a * d + b)] = rank[a] <= rank[b] ? a : b;
    return out;
}

}  // namespace

bool check_property(const OperationTable& phi, PolyProperty p) {
    require_arity(phi, p);
    const int d = phi.domain();
    if (p == PolyProperty::Constant) {
        const auto& o = phi.outputs();
        return std::all_of(o.begin(), o.end(), [&](int v) { return v == o.front(); });
    }
    if (p == PolyProperty::MinMax) {
        // min (or max) under a total order iff conservative, commutative, and "phi(a,b)=a" is transitive.
        auto f = [&](int a, int b) { return phi.at(static_cast<std::size_t>(a * d + b)); };
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b) {
                int v = f(a, b);
                if ((v != a && v != b) || v != f(b, a)) return false;
            }
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b)
                for (int c = 0; c < d; ++c)
                    if (f(a, b) == a && f(b, c) == b && f(a, c) != a) return false;
        return true;
    }
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
            for (int c = 0; c < d; ++c) {
                int want = forced_ternary(p, a, b, c);
                if (want >= 0 && phi({a, b, c}) != want) return false;
            }
    return true;
}

bool relation_closed(const Relation& r, const OperationTable& phi) {
    if (r.empty() || r.arity() == 0) return true;
    if (r.max_value() >= phi.domain()) throw PreconditionError("relation uses values outside the operation domain");
    const int n = phi.arity();
    const std::size_t m = r.size();
    const auto& ts = r.tuples();
    std::vector<std::size_t> pick(static_cast<std::size_t>(n), 0);
    std::vector<int> args(static_cast<std::size_t>(n));
    Tuple out(static_cast<std::size_t>(r.arity()));
    while (true) {
        for (int c = 0; c < r.arity(); ++c) {
            for (int j = 0; j < n; ++j) args[static_cast<std::size_t>(j)] = ts[pick[static_cast<std::size_t>(j)]][static_cast<std::size_t>(c)];
            out[static_cast<std::size_t>(c)] = phi(args);
        }
        if (!r.contains(out)) return false;
        int j = n - 1;
        while (j >= 0 && ++pick[static_cast<std::size_t>(j)] == m) pick[static_cast<std::size_t>(j--)] = 0;
        if (j < 0) return true;
    }
}

bool instance_closed(const CspInstance& inst, const OperationTable& phi) { return first_unclosed_constraint(inst, phi) < 0; }

int first_unclosed_constraint(const CspInstance& inst, const OperationTable& phi) {
    if (inst.domain() != phi.domain()) throw PreconditionError("instance and operation domains differ");
    const auto& cs = inst.constraints();
    for (std::size_t i = 0; i < cs.size(); ++i)
        if (!relation_closed(cs[i].relation, phi)) return static_cast<int>(i);
    return -1;
}

std::uint64_t property_family_size(int d, PolyProperty p) {
    const auto sat = std::numeric_limits<std::uint64_t>::max();
    auto power = [&](std::uint64_t base, std::uint64_t e) {
        std::uint64_t r = 1;
        for (std::uint64_t i = 0; i < e; ++i) {
            if (base != 0 && r > sat / base) return sat;
            r *= base;
        }
        return r;
    };
    const auto ud = static_cast<std::uint64_t>(d);
    switch (p) {
        case PolyProperty::Constant: return ud;
        case PolyProperty::MinMax: {
            std::uint64_t f = 1;
            for (std::uint64_t i = 2; i <= ud; ++i) f = (f > sat / i) ? sat : f * i;
            return f;
        }
        case PolyProperty::Majority:
        case PolyProperty::Minority: return power(ud, ud * (ud - 1) * (ud > 1 ? ud - 2 : 0));
        case PolyProperty::Malcev: return power(ud, ud * (ud - 1) * (ud > 0 ? ud - 1 : 0));
    }
    return sat;
}

OperationFamily enumerate_property_ops(int d, PolyProperty p, const Limits& lim) {
    if (d < 1) throw PreconditionError("domain size must be positive");
    const int cap = p == PolyProperty::Constant ? std::numeric_limits<int>::max() : p == PolyProperty::MinMax ? 8 : 3;
    const std::uint64_t count = property_family_size(d, p);
    if (d > cap || count > lim.family_size)
        throw BudgetError("enumerating " + tag(p) + " operations on a domain of size " + std::to_string(d) +
                          " exceeds the enumeration cap; use poly_exists instead");
    OperationFamily fam(property_arity(p), d);
    if (p == PolyProperty::Constant) {
        for (int c = 0; c < d; ++c) fam.push_back(std::vector<int>(static_cast<std::size_t>(d), c));
        return fam;
    }
    if (p == PolyProperty::MinMax) {
        std::vector<int> perm(static_cast<std::size_t>(d));
        std::iota(perm.begin(), perm.end(), 0);
        std::vector<std::vector<int>> tables;
        do {
            std::vector<int> rank(static_cast<std::size_t>(d));
            for (int i = 0; i < d; ++i) rank[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])] = i;
            tables.push_back(min_table(rank, d));
        } while (std::next_permutation(perm.begin(), perm.end()));
        std::sort(tables.begin(), tables.end());
        tables.erase(std::unique(tables.begin(), tables.end()), tables.end());
        for (const auto& t : tables) fam.push_back(t);
        return fam;
    }
    std::vector<int> base(static_cast<std::size_t>(d * d * d), 0);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
            for (int c = 0; c < d; ++c) {
                int f = forced_ternary(p, a, b, c);
                if (f >= 0) base[static_cast<std::size_t>((a * d + b) * d + c)] = f;
            }
    const std::vector<std::size_t> free_rows_list = free_rows(d, p);
    // Odometer with the last free row fastest yields lexicographic order on outputs.
    while (true) {
        fam.push_back(base);
        std::size_t j = free_rows_list.size();
        while (j > 0) {
            --j;
            if (++base[free_rows_list[j]] < d) break;
            base[free_rows_list[j]] = 0;
            if (j == 0) return fam;
        }
        if (free_rows_list.empty()) return fam;
    }
}

namespace {

using Mask = std::uint64_t;
inline Mask bit(int v) { return Mask{1} << v; }

class BudgetCounter {
public:
    explicit BudgetCounter(std::uint64_t cap) : cap_(cap) {}
    void tick() {
        if (++n_ > cap_) throw BudgetError("polymorphism search exceeded its node budget of " + std::to_string(cap_));
    }

private:
    std::uint64_t cap_;
    std::uint64_t n_ = 0;
};

std::vector<const Relation*> distinct_relations(const CspInstance& inst) {
    std::set<const Relation*, bool (*)(const Relation*, const Relation*)> seen(
        [](const Relation* a, const Relation* b) { return *a < *b; });
    std::vector<const Relation*> out;
    for (const auto& c : inst.constraints()) {
        const Relation* r = &c.relation;
        if (r->empty() || r->arity() == 0) continue;  // closed under everything
        if (seen.insert(r).second) out.push_back(r);
    }
    return out;
}

// --- ternary properties: table search with generalised arc consistency -------------

struct App {
    const Relation* rel;
    std::vector<int> entries;  // one table row per coordinate
};

class TernarySearch {
public:
    TernarySearch(const CspInstance& inst, PolyProperty p, const Limits& lim)
        : d_(inst.domain()), budget_(lim.poly_nodes) {
        if (d_ > 64) throw PreconditionError("polymorphism search supports domains of size at most 64");
        const int rows = d_ * d_ * d_;
        dom_.assign(static_cast<std::size_t>(rows), d_ == 64 ? ~Mask{0} : bit(d_) - 1);
        for (int a = 0; a < d_; ++a)
            for (int b = 0; b < d_; ++b)
                for (int c = 0; c < d_; ++c) {
                    int f = forced_ternary(p, a, b, c);
                    if (f >= 0) dom_[static_cast<std::size_t>((a * d_ + b) * d_ + c)] = bit(f);
                }
        build(inst);
    }

    std::optional<OperationTable> run() {
        if (infeasible_) return std::nullopt;
        std::vector<int> all(apps_.size());
        std::iota(all.begin(), all.end(), 0);
        if (!propagate(dom_, all)) return std::nullopt;
        if (!search(dom_)) return std::nullopt;
        std::vector<int> out(dom_.size());
        for (std::size_t r = 0; r < dom_.size(); ++r) out[r] = __builtin_ctzll(solution_[r]);
        return OperationTable(3, d_, std::move(out));
    }

private:
    void build(const CspInstance& inst) {
        watchers_.resize(dom_.size());
        std::set<std::pair<const Relation*, std::vector<int>>> seen;
        for (const Relation* r : distinct_relations(inst)) {
            const auto& ts = r->tuples();
            const std::size_t m = ts.size();
            const int n = r->arity();
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = 0; j < m; ++j)
                    for (std::size_t k = 0; k < m; ++k) {
                        std::vector<int> e(static_cast<std::size_t>(n));
                        bool all_fixed = true;
                        Tuple out(static_cast<std::size_t>(n));
                        for (int c = 0; c < n; ++c) {
                            const auto cc = static_cast<std::size_t>(c);
                            int row = (ts[i][cc] * d_ + ts[j][cc]) * d_ + ts[k][cc];
                            e[cc] = row;
                            Mask dm = dom_[static_cast<std::size_t>(row)];
                            if (dm & (dm - 1))
                                all_fixed = false;
                            else
                                out[cc] = __builtin_ctzll(dm);
                        }
                        if (all_fixed) {
                            if (!r->contains(out)) infeasible_ = true;
                            continue;
                        }
                        if (!seen.insert({r, e}).second) continue;
                        const int id = static_cast<int>(apps_.size());
                        apps_.push_back({r, e});
                        std::set<int> uniq(e.begin(), e.end());
                        for (int row : uniq) {
                            watchers_[static_cast<std::size_t>(row)].push_back(id);
                            relevant_.insert(row);
                        }
                    }
        }
    }

    bool revise(std::vector<Mask>& dom, const App& app, std::vector<int>& changed) const {
        const std::size_t n = app.entries.size();
        std::vector<Mask> sup(n, 0);
        for (const auto& t : app.rel->tuples()) {
            bool ok = true;
            for (std::size_t c = 0; c < n && ok; ++c) {
                if (!(dom[static_cast<std::size_t>(app.entries[c])] & bit(t[c]))) ok = false;
                for (std::size_t c2 = 0; c2 < c && ok; ++c2)
                    if (app.entries[c2] == app.entries[c] && t[c2] != t[c]) ok = false;
            }
            if (!ok) continue;
            for (std::size_t c = 0; c < n; ++c) sup[c] |= bit(t[c]);
        }
        for (std::size_t c = 0; c < n; ++c) {
            auto& dm = dom[static_cast<std::size_t>(app.entries[c])];
            Mask nd = dm & sup[c];
            if (nd == 0) return false;
            if (nd != dm) {
                dm = nd;
                changed.push_back(app.entries[c]);
            }
        }
        return true;
    }

    bool propagate(std::vector<Mask>& dom, std::vector<int> queue) const {
        std::vector<char> queued(apps_.size(), 0);
        for (int a : queue) queued[static_cast<std::size_t>(a)] = 1;
        std::vector<int> changed;
        while (!queue.empty()) {
            int a = queue.back();
            queue.pop_back();
            queued[static_cast<std::size_t>(a)] = 0;
            changed.clear();
            if (!revise(dom, apps_[static_cast<std::size_t>(a)], changed)) return false;
            for (int row : changed)
                for (int w : watchers_[static_cast<std::size_t>(row)])
                    if (!queued[static_cast<std::size_t>(w)]) {
                        queued[static_cast<std::size_t>(w)] = 1;
                        queue.push_back(w);
                    }
        }
        return true;
    }

    bool search(std::vector<Mask>& dom) {
        budget_.tick();
        int pick = -1;
        for (int row : relevant_) {
            Mask dm = dom[static_cast<std::size_t>(row)];
            if (dm & (dm - 1)) {
                pick = row;
                break;
            }
        }
        if (pick < 0) {
            solution_ = dom;
            for (auto& dm : solution_) dm &= (~dm + 1);  // keep the lowest value of unconstrained rows
            return true;
        }
        Mask options = dom[static_cast<std::size_t>(pick)];
        for (int v = 0; v < d_; ++v) {
            if (!(options & bit(v))) continue;
            std::vector<Mask> next = dom;
            next[static_cast<std::size_t>(pick)] = bit(v);
            if (propagate(next, watchers_[static_cast<std::size_t>(pick)]) && search(next)) return true;
        }
        return false;
    }

    int d_;
    BudgetCounter budget_;
    std::vector<Mask> dom_;
    std::vector<App> apps_;
    std::vector<std::vector<int>> watchers_;
    std::set<int> relevant_;
    std::vector<Mask> solution_;
    bool infeasible_ = false;
};

// --- min/max: search for a total order -----------------------------------------------
//
// Comparison variables are the value pairs that meet in some column. Pairs are grouped so
// that groups share no application and no biconnected component of the value graph; a
// cycle of comparisons always lies inside one biconnected component, so groups can be
// solved one after another without backtracking across them.

struct PairApp {
    const Relation* rel;
    Tuple t, u;                          // two distinct tuples
    std::vector<std::pair<int, int>> pairs;  // (a,b), a<b, for the columns where they differ
};

class OrderSearch {
public:
    OrderSearch(const CspInstance& inst, const Limits& lim) : d_(inst.domain()), budget_(lim.poly_nodes) {
        if (d_ > 64) throw PreconditionError("polymorphism search supports domains of size at most 64");
        less_.assign(static_cast<std::size_t>(d_), 0);
        for (const Relation* r : distinct_relations(inst)) {
            const auto& ts = r->tuples();
            for (std::size_t i = 0; i < ts.size(); ++i)
                for (std::size_t j = i + 1; j < ts.size(); ++j) {
                    PairApp app{r, ts[i], ts[j], {}};
                    for (std::size_t c = 0; c < ts[i].size(); ++c)
                        if (ts[i][c] != ts[j][c]) app.pairs.push_back(std::minmax(ts[i][c], ts[j][c]));
                    app.pairs.erase(std::unique(app.pairs.begin(), app.pairs.end()), app.pairs.end());
                    apps_.push_back(std::move(app));
                }
        }
        group();
    }

    std::optional<OperationTable> run() {
        for (std::size_t g = 0; g < groups_.size(); ++g) {
            std::vector<Mask> state = less_;
            if (!solve_group(g, 0, state)) return std::nullopt;
            less_ = state;
        }
        // Kahn's algorithm, smallest value first, on the chosen strict order.
        std::vector<int> rank(static_cast<std::size_t>(d_), -1);
        std::vector<char> placed(static_cast<std::size_t>(d_), 0);
        for (int pos = 0; pos < d_; ++pos) {
            for (int v = 0; v < d_; ++v) {
                if (placed[static_cast<std::size_t>(v)]) continue;
                bool minimal = true;
                for (int u = 0; u < d_ && minimal; ++u)
                    if (!placed[static_cast<std::size_t>(u)] && (less_[static_cast<std::size_t>(u)] & bit(v))) minimal = false;
                if (minimal) {
                    rank[static_cast<std::size_t>(v)] = pos;
                    placed[static_cast<std::size_t>(v)] = 1;
                    break;
                }
            }
        }
        return OperationTable(2, d_, min_table(rank, d_));
    }

private:
    static int find(std::vector<int>& uf, int x) {
        while (uf[static_cast<std::size_t>(x)] != x) x = uf[static_cast<std::size_t>(x)] = uf[static_cast<std::size_t>(uf[static_cast<std::size_t>(x)])];
        return x;
    }

    void group() {
        std::set<std::pair<int, int>> pair_set;
        for (const auto& a : apps_) pair_set.insert(a.pairs.begin(), a.pairs.end());
        pairs_.assign(pair_set.begin(), pair_set.end());
        auto pid = [&](const std::pair<int, int>& pr) {
            return static_cast<int>(std::lower_bound(pairs_.begin(), pairs_.end(), pr) - pairs_.begin());
        };
        std::vector<int> uf(pairs_.size());
        std::iota(uf.begin(), uf.end(), 0);
        auto unite = [&](int x, int y) { uf[static_cast<std::size_t>(find(uf, x))] = find(uf, y); };
        for (const auto& a : apps_)
            for (std::size_t i = 1; i < a.pairs.size(); ++i) unite(pid(a.pairs[0]), pid(a.pairs[i]));
        for (const auto& comp : biconnected_edge_groups())
            for (std::size_t i = 1; i < comp.size(); ++i) unite(comp[0], comp[i]);
        std::map<int, std::size_t> gid;
        pair_group_.assign(pairs_.size(), 0);
        for (std::size_t i = 0; i < pairs_.size(); ++i) {
            int root = find(uf, static_cast<int>(i));
            if (!gid.count(root)) {
                gid[root] = groups_.size();
                groups_.emplace_back();
            }
            groups_[gid[root]].push_back(static_cast<int>(i));
            pair_group_[i] = gid[root];
        }
        group_apps_.resize(groups_.size());
        for (std::size_t a = 0; a < apps_.size(); ++a)
            group_apps_[pair_group_[static_cast<std::size_t>(pid(apps_[a].pairs[0]))]].push_back(a);
    }

    // Edge ids (indices into pairs_) grouped by biconnected component of the value graph.
    std::vector<std::vector<int>> biconnected_edge_groups() const {
        std::vector<std::vector<std::pair<int, int>>> adj(static_cast<std::size_t>(d_));  // (neighbour, edge id)
        for (std::size_t e = 0; e < pairs_.size(); ++e) {
            adj[static_cast<std::size_t>(pairs_[e].first)].push_back({pairs_[e].second, static_cast<int>(e)});
            adj[static_cast<std::size_t>(pairs_[e].second)].push_back({pairs_[e].first, static_cast<int>(e)});
        }
        std::vector<int> disc(static_cast<std::size_t>(d_), -1), low(static_cast<std::size_t>(d_), 0);
        std::vector<int> estack;
        std::vector<std::vector<int>> out;
        int timer = 0;
        std::function<void(int, int)> dfs = [&](int u, int parent_edge) {
            disc[static_cast<std::size_t>(u)] = low[static_cast<std::size_t>(u)] = timer++;
            for (auto [w, e] : adj[static_cast<std::size_t>(u)]) {
                if (e == parent_edge) continue;
                if (disc[static_cast<std::size_t>(w)] < 0) {
                    estack.push_back(e);
                    dfs(w, e);
                    low[static_cast<std::size_t>(u)] = std::min(low[static_cast<std::size_t>(u)], low[static_cast<std::size_t>(w)]);
                    if (low[static_cast<std::size_t>(w)] >= disc[static_cast<std::size_t>(u)]) {
                        std::vector<int> comp;
                        int top;
                        do {
                            top = estack.back();
                            estack.pop_back();
                            comp.push_back(top);
                        } while (top != e);
                        out.push_back(std::move(comp));
                    }
                } else if (disc[static_cast<std::size_t>(w)] < disc[static_cast<std::size_t>(u)]) {
                    estack.push_back(e);
                    low[static_cast<std::size_t>(u)] = std::min(low[static_cast<std::size_t>(u)], disc[static_cast<std::size_t>(w)]);
                }
            }
        };
        for (int v = 0; v < d_; ++v)
            if (disc[static_cast<std::size_t>(v)] < 0) dfs(v, -1);
        return out;
    }

    // Record a < b and close transitively. False on contradiction.
    bool add_less(std::vector<Mask>& lt, int a, int b) const {
        if (lt[static_cast<std::size_t>(b)] & bit(a)) return false;
        if (lt[static_cast<std::size_t>(a)] & bit(b)) return true;
        Mask above = lt[static_cast<std::size_t>(b)] | bit(b);
        for (int x = 0; x < d_; ++x)
            if (x == a || (lt[static_cast<std::size_t>(x)] & bit(a))) lt[static_cast<std::size_t>(x)] |= above;
        for (int x = 0; x < d_; ++x)
            if (lt[static_cast<std::size_t>(x)] & bit(x)) return false;
        return true;
    }

    // 1: a<b, 0: b<a, -1: open.
    static int compare(const std::vector<Mask>& lt, int a, int b) {
        if (lt[static_cast<std::size_t>(a)] & bit(b)) return 1;
        if (lt[static_cast<std::size_t>(b)] & bit(a)) return 0;
        return -1;
    }

    bool apps_ok(std::size_t g, const std::vector<Mask>& lt) const {
        for (std::size_t a : group_apps_[g]) {
            const auto& app = apps_[a];
            Tuple out(app.t.size());
            bool open = false;
            for (std::size_t c = 0; c < out.size() && !open; ++c) {
                int x = app.t[c], y = app.u[c];
                if (x == y) {
                    out[c] = x;
                    continue;
                }
                int cmp = compare(lt, x, y);
                if (cmp < 0) open = true;
                out[c] = cmp == 1 ? x : y;
            }
            if (!open && !app.rel->contains(out)) return false;
        }
        return true;
    }

    bool solve_group(std::size_t g, std::size_t idx, std::vector<Mask>& lt) {
        budget_.tick();
        const auto& members = groups_[g];
        while (idx < members.size()) {
            auto [a, b] = pairs_[static_cast<std::size_t>(members[idx])];
            if (compare(lt, a, b) < 0) break;
            ++idx;
        }
        if (idx == members.size()) return apps_ok(g, lt);
        auto [a, b] = pairs_[static_cast<std::size_t>(members[idx])];
        for (int dir = 0; dir < 2; ++dir) {
            std::vector<Mask> next = lt;
            bool ok = dir == 0 ? add_less(next, a, b) : add_less(next, b, a);
            if (ok && apps_ok(g, next) && solve_group(g, idx + 1, next)) {
                lt = next;
                return true;
            }
        }
        return false;
    }

    int d_;
    BudgetCounter budget_;
    std::vector<PairApp> apps_;
    std::vector<std::pair<int, int>> pairs_;
    std::vector<std::size_t> pair_group_;
    std::vector<std::vector<int>> groups_;
    std::vector<std::vector<std::size_t>> group_apps_;
    std::vector<Mask> less_;
};

}  // namespace

std::optional<OperationTable> poly_exists(const CspInstance& inst, PolyProperty p, const Limits& lim) {
    const int d = inst.domain();
    std::optional<OperationTable> found;
    switch (p) {
        case PolyProperty::Constant:
            for (int c = 0; c < d && !found; ++c) {
                OperationTable t(1, d, std::vector<int>(static_cast<std::size_t>(d), c));
                if (instance_closed(inst, t)) found = t;
            }
            break;
        case PolyProperty::MinMax: found = OrderSearch(inst, lim).run(); break;
        default: found = TernarySearch(inst, p, lim).run(); break;
    }
    if (found && (!check_property(*found, p) || !instance_closed(inst, *found)))
        throw ContractError("polymorphism search produced an invalid table");
    return found;
}

std::optional<CspAssignment> solve_closed(const CspInstance& inst, const OperationTable& phi, const Limits& lim) {
    int bad = first_unclosed_constraint(inst, phi);
    if (bad >= 0) throw ClosureError("constraint " + std::to_string(bad) + " is not closed under the operation");
    if (phi.arity() == 1 && check_property(phi, PolyProperty::Constant)) {
        const int c = phi.at(0);
        for (const auto& con : inst.constraints())
            if (con.relation.empty()) return std::nullopt;
        CspAssignment all;
        for (std::size_t v = 0; v < inst.num_vars(); ++v) all[static_cast<int>(v)] = c;
        if (is_solution(inst, all)) return all;
    }
    return solve_exhaustive(inst, lim);
}

}  // namespace bd
