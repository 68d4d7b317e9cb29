#include "bd/csp_backdoor.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <map>
#include <set>

namespace bd {

PolyFamily::PolyFamily(int domain, PropSet props, const Limits& lim) : domain_(domain), props_(std::move(props)) {
    std::sort(props_.begin(), props_.end());
    props_.erase(std::unique(props_.begin(), props_.end()), props_.end());
    if (props_.empty()) throw PreconditionError("at least one property is required");
    for (PolyProperty p : props_) {
        offsets_.push_back(total_);
        fams_.push_back(enumerate_property_ops(domain, p, lim));
        total_ += fams_.back().size();
    }
}

PolyProperty PolyFamily::property_of(std::size_t index) const {
    std::size_t i = props_.size() - 1;
    while (offsets_[i] > index) --i;
    return props_[i];
}

OperationTable PolyFamily::table(std::size_t index) const {
    std::size_t i = props_.size() - 1;
    while (offsets_[i] > index) --i;
    return fams_[i][index - offsets_[i]];
}

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

class Bits {
public:
    Bits() = default;
    Bits(std::size_t n, bool fill) : n_(n), w_((n + 63) / 64, fill ? ~std::uint64_t{0} : 0) { trim(); }

    void set(std::size_t i) { w_[i / 64] |= std::uint64_t{1} << (i % 64); }
    void set_range(std::size_t lo, std::size_t hi) {
        while (lo < hi && lo % 64) set(lo++);
        while (lo + 64 <= hi) {
            w_[lo / 64] = ~std::uint64_t{0};
            lo += 64;
        }
        while (lo < hi) set(lo++);
    }
    bool any() const {
        return std::any_of(w_.begin(), w_.end(), [](std::uint64_t x) { return x != 0; });
    }
    std::size_t first() const {
        for (std::size_t i = 0; i < w_.size(); ++i)
            if (w_[i]) return i * 64 + static_cast<std::size_t>(__builtin_ctzll(w_[i]));
        return n_;
    }
    Bits& operator&=(const Bits& o) {
        for (std::size_t i = 0; i < w_.size(); ++i) w_[i] &= o.w_[i];
        return *this;
    }
    Bits& operator|=(const Bits& o) {
        for (std::size_t i = 0; i < w_.size(); ++i) w_[i] |= o.w_[i];
        return *this;
    }
    // this AND NOT o
    Bits minus(const Bits& o) const {
        Bits r = *this;
        for (std::size_t i = 0; i < w_.size(); ++i) r.w_[i] &= ~o.w_[i];
        return r;
    }

private:
    void trim() {
        if (n_ % 64 && !w_.empty()) w_.back() &= (std::uint64_t{1} << (n_ % 64)) - 1;
    }
    std::size_t n_ = 0;
    std::vector<std::uint64_t> w_;
};

// For each relation, the members of the family under which it is closed.
class ClosureCache {
public:
    explicit ClosureCache(const PolyFamily& fam) : fam_(fam) {}

    const Bits& closed_under(const Relation& r) {
        auto it = cache_.find(r);
        if (it != cache_.end()) return it->second;
        return cache_.emplace(r, compute(r)).first->second;
    }

    Bits all() const { return Bits(fam_.size(), true); }

private:
    Bits compute(const Relation& r) const {
        if (r.empty() || r.arity() == 0) return all();
        Bits out(fam_.size(), false);
        for (std::size_t s = 0; s < fam_.props().size(); ++s) {
            PolyProperty p = fam_.props()[s];
            if (property_arity(p) == 3)
                ternary_segment(r, p, fam_.offset(s), out);
            else
                generic_segment(r, fam_.segment(s), fam_.offset(s), out);
        }
        return out;
    }

    static void generic_segment(const Relation& r, const OperationFamily& seg, std::size_t off, Bits& out) {
        for (std::size_t i = 0; i < seg.size(); ++i)
            if (relation_closed(r, seg[i])) out.set(off + i);
    }

    // The ternary families are full products over their free rows, so closure becomes a small
    // CSP over those rows; its solutions are exactly the family members that close r.
    void ternary_segment(const Relation& r, PolyProperty p, std::size_t off, Bits& out) const {
        const int d = fam_.domain();
        const std::vector<std::size_t> frees = free_rows(d, p);
        const std::size_t m = frees.size();
        std::vector<int> pos_of(static_cast<std::size_t>(d * d * d), -1);
        std::vector<int> forced(static_cast<std::size_t>(d * d * d), -1);
        for (std::size_t i = 0; i < m; ++i) pos_of[frees[i]] = static_cast<int>(i);
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b)
                for (int c = 0; c < d; ++c) forced[static_cast<std::size_t>((a * d + b) * d + c)] = forced_value(p, a, b, c);

        // Local constraints keyed by their sorted free positions; allowed[] over d^|E| local values.
        std::map<std::vector<int>, std::vector<char>> local;
        const auto& ts = r.tuples();
        const std::size_t n = ts.size();
        const auto ar = static_cast<std::size_t>(r.arity());
        std::vector<std::size_t> rows(ar);
        Tuple img(ar);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                for (std::size_t k = 0; k < n; ++k) {
                    std::vector<int> e;
                    for (std::size_t c = 0; c < ar; ++c) {
                        rows[c] = static_cast<std::size_t>((ts[i][c] * d + ts[j][c]) * d + ts[k][c]);
                        if (pos_of[rows[c]] >= 0) e.push_back(pos_of[rows[c]]);
                    }
                    std::sort(e.begin(), e.end());
                    e.erase(std::unique(e.begin(), e.end()), e.end());
                    std::size_t combos = 1;
                    for (std::size_t q = 0; q < e.size(); ++q) combos *= static_cast<std::size_t>(d);
                    auto [slot, fresh] = local.try_emplace(e, std::vector<char>(combos, 1));
                    (void)fresh;
                    auto& allowed = slot->second;
                    for (std::size_t code = 0; code < combos; ++code) {
                        if (!allowed[code]) continue;
                        for (std::size_t c = 0; c < ar; ++c) {
                            int pos = pos_of[rows[c]];
                            if (pos < 0) {
                                img[c] = forced[rows[c]];
                                continue;
                            }
                            // digit of pos within code, first position most significant
                            std::size_t idx = static_cast<std::size_t>(std::lower_bound(e.begin(), e.end(), pos) - e.begin());
                            std::size_t v = code;
                            for (std::size_t q = e.size() - 1; q > idx; --q) v /= static_cast<std::size_t>(d);
                            img[c] = static_cast<int>(v % static_cast<std::size_t>(d));
                        }
                        if (!r.contains(img)) allowed[code] = 0;
                    }
                }
        auto none_forced = local.find(std::vector<int>{});
        if (none_forced != local.end() && !none_forced->second[0]) return;

        struct Local {
            std::vector<int> pos;
            const std::vector<char>* allowed;
        };
        std::vector<std::vector<Local>> due(m);
        for (const auto& [e, allowed] : local)
            if (!e.empty()) due[static_cast<std::size_t>(e.back())].push_back({e, &allowed});
        std::size_t last = 0;  // no local constraint is due at or after this position
        for (std::size_t i = 0; i < m; ++i)
            if (!due[i].empty()) last = i + 1;
        std::vector<std::size_t> span(m + 1, 1);  // d^(m-i)
        for (std::size_t i = m; i-- > 0;) span[i] = span[i + 1] * static_cast<std::size_t>(d);

        std::vector<int> val(m, 0);
        std::function<void(std::size_t, std::size_t)> go = [&](std::size_t i, std::size_t prefix) {
            if (i >= last) {
                out.set_range(off + prefix * span[i], off + (prefix + 1) * span[i]);
                return;
            }
            for (int v = 0; v < d; ++v) {
                val[i] = v;
                bool ok = true;
                for (const Local& l : due[i]) {
                    std::size_t code = 0;
                    for (int q : l.pos) code = code * static_cast<std::size_t>(d) + static_cast<std::size_t>(val[static_cast<std::size_t>(q)]);
                    if (!(*l.allowed)[code]) {
                        ok = false;
                        break;
                    }
                }
                if (ok) go(i + 1, prefix * static_cast<std::size_t>(d) + static_cast<std::size_t>(v));
            }
        };
        go(0, 0);
    }

    const PolyFamily& fam_;
    std::map<Relation, Bits> cache_;
};

std::vector<int> all_vars(const CspInstance& inst) {
    std::vector<int> v(inst.num_vars());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<int>(i);
    return v;
}

VarSet with(const VarSet& b, int v) {
    VarSet out = b;
    out.insert(std::upper_bound(out.begin(), out.end(), v), v);
    return out;
}

// Calls f on each size-s subset of items in lexicographic order until f returns true.
bool for_each_subset(const std::vector<int>& items, std::size_t s, const std::function<bool(const VarSet&)>& f) {
    if (s > items.size()) return false;
    std::vector<std::size_t> idx(s);
    for (std::size_t i = 0; i < s; ++i) idx[i] = i;
    while (true) {
        VarSet pick;
        for (std::size_t i : idx) pick.push_back(items[i]);
        if (f(pick)) return true;
        std::size_t i = s;
        while (i > 0 && idx[i - 1] == items.size() - s + i - 1) --i;
        if (i == 0) return false;
        ++idx[i - 1];
        for (std::size_t j = i; j < s; ++j) idx[j] = idx[j - 1] + 1;
    }
}

std::uint64_t tau_count(const CspInstance& inst, const VarSet& b, const Limits& lim) {
    std::uint64_t n = assignment_count(b.size(), inst.domain());
    if (n > lim.csp_space) throw BudgetError("too many assignments over the backdoor candidate");
    return n;
}

std::optional<std::pair<PolyProperty, OperationTable>> class_witness(const CspInstance& inst, const PropSet& props,
                                                                     const Limits& lim) {
    for (PolyProperty p : props)
        if (auto t = poly_exists(inst, p, lim)) return std::make_pair(p, *t);
    return std::nullopt;
}

PropSet normalised(PropSet props) {
    std::sort(props.begin(), props.end());
    props.erase(std::unique(props.begin(), props.end()), props.end());
    if (props.empty()) throw PreconditionError("at least one property is required");
    return props;
}

void check_k(int k) {
    if (k < 0) throw PreconditionError("k must be non-negative");
}

}  // namespace

DetectionOutcome detect_strong_csp(const CspInstance& inst, int k, const PropSet& props, const Limits& lim) {
    check_k(k);
    const auto t0 = Clock::now();
    PolyFamily fam(inst.domain(), props, lim);
    ClosureCache cache(fam);
    DetectionOutcome out;
    out.mode = Mode::Strong;

    std::function<bool(const VarSet&)> visit = [&](const VarSet& b) -> bool {
        ++out.stats.nodes;
        out.stats.max_depth = std::max(out.stats.max_depth, static_cast<int>(b.size()));
        const std::uint64_t n = tau_count(inst, b, lim);
        std::optional<std::vector<Constraint>> falsified;
        for (std::uint64_t i = 0; i < n && !falsified; ++i) {
            CspInstance red = reduce_csp(inst, nth_csp_assignment(b, inst.domain(), i));
            Bits acc = cache.all();
            for (const auto& c : red.constraints()) acc &= cache.closed_under(c.relation);
            if (!acc.any()) falsified = red.constraints();
        }
        if (!falsified) {
            ++out.stats.leaves;
            out.backdoor = b;
            return true;
        }
        if (static_cast<int>(b.size()) >= k) {
            ++out.stats.leaves;
            return false;
        }
        // Constraint i is the first unclosed one for some member iff the members closing
        // every earlier constraint do not all close constraint i.
        std::set<int> children;
        Bits prefix = cache.all();
        for (const auto& c : *falsified) {
            const Bits& s = cache.closed_under(c.relation);
            if (prefix.minus(s).any()) children.insert(c.scope.begin(), c.scope.end());
            prefix &= s;
            if (!prefix.any()) break;
        }
        if (children.empty()) {
            ++out.stats.leaves;
            return false;
        }
        for (int v : children)
            if (visit(with(b, v))) return true;
        return false;
    };
    visit({});
    out.stats.elapsed_ms = ms_since(t0);
    return out;
}

DetectionOutcome detect_weak_csp(const CspInstance& inst, int k, const PropSet& props, const Limits& lim) {
    check_k(k);
    const auto t0 = Clock::now();
    PolyFamily fam(inst.domain(), props, lim);
    ClosureCache cache(fam);
    DetectionOutcome out;
    out.mode = Mode::Weak;

    // One search tree per family member, merged: a node carries the members whose tree contains it.
    std::map<VarSet, Bits> level;
    level.emplace(VarSet{}, cache.all());
    for (int depth = 0; depth <= k && !level.empty(); ++depth) {
        std::map<VarSet, Bits> next;
        out.stats.max_depth = depth;
        for (const auto& [b, members] : level) {
            ++out.stats.nodes;
            const std::uint64_t n = tau_count(inst, b, lim);
            bool has_child = false;
            for (std::uint64_t i = 0; i < n; ++i) {
                CspInstance red = reduce_csp(inst, nth_csp_assignment(b, inst.domain(), i));
                Bits acc = members;
                for (const auto& c : red.constraints()) acc &= cache.closed_under(c.relation);
                if (acc.any() && solve_closed(red, fam.table(acc.first()), lim)) {
                    ++out.stats.leaves;
                    out.backdoor = b;
                    out.stats.elapsed_ms = ms_since(t0);
                    return out;
                }
                if (depth == k) continue;
                for (const auto& c : red.constraints()) {
                    Bits open = members.minus(cache.closed_under(c.relation));
                    if (!open.any()) continue;
                    for (int v : c.scope) {
                        auto [it, fresh] = next.try_emplace(with(b, v), open);
                        if (!fresh) it->second |= open;
                        has_child = true;
                    }
                }
            }
            if (!has_child) ++out.stats.leaves;
        }
        level = std::move(next);
    }
    out.stats.elapsed_ms = ms_since(t0);
    return out;
}

DetectionOutcome oracle_csp(const CspInstance& inst, int k, const PropSet& props_in, Mode mode, const Limits& lim) {
    check_k(k);
    const PropSet props = normalised(props_in);
    if (inst.num_vars() > lim.oracle_csp_vars || inst.domain() > lim.oracle_csp_domain)
        throw BudgetError("brute-force CSP oracle is capped at " + std::to_string(lim.oracle_csp_vars) +
                          " variables and domain size " + std::to_string(lim.oracle_csp_domain));
    const auto t0 = Clock::now();
    DetectionOutcome out;
    out.mode = mode;
    const std::vector<int> vars = all_vars(inst);
    for (std::size_t s = 0; s <= std::min<std::size_t>(static_cast<std::size_t>(k), vars.size()); ++s) {
        bool hit = for_each_subset(vars, s, [&](const VarSet& b) {
            ++out.stats.nodes;
            bool ok = mode == Mode::Strong ? verify_strong_csp(inst, b, props, lim).ok
                                           : verify_weak_csp(inst, b, props, lim).has_value();
            if (ok) out.backdoor = b;
            return ok;
        });
        if (hit) break;
    }
    out.stats.max_depth = out.backdoor ? static_cast<int>(out.backdoor->size()) : k;
    out.stats.elapsed_ms = ms_since(t0);
    return out;
}

CspVerification verify_strong_csp(const CspInstance& inst, const VarSet& b, const PropSet& props_in,
                                  const Limits& lim) {
    const PropSet props = normalised(props_in);
    CspVerification v;
    const std::uint64_t n = tau_count(inst, b, lim);
    for (std::uint64_t i = 0; i < n; ++i) {
        CspAssignment tau = nth_csp_assignment(b, inst.domain(), i);
        auto w = class_witness(reduce_csp(inst, tau), props, lim);
        if (!w) {
            v.falsifying = tau;
            v.witnesses.clear();
            return v;
        }
        v.witnesses.push_back({tau, w->first, w->second});
    }
    v.ok = true;
    return v;
}

std::optional<CspAssignment> verify_weak_csp(const CspInstance& inst, const VarSet& b, const PropSet& props_in,
                                             const Limits& lim) {
    const PropSet props = normalised(props_in);
    const std::uint64_t n = tau_count(inst, b, lim);
    for (std::uint64_t i = 0; i < n; ++i) {
        CspAssignment tau = nth_csp_assignment(b, inst.domain(), i);
        CspInstance red = reduce_csp(inst, tau);
        if (class_witness(red, props, lim) && solve_exhaustive(red, lim)) return tau;
    }
    return std::nullopt;
}

std::optional<CspAssignment> evaluate_strong_csp(const CspInstance& inst, const VarSet& b, const PropSet& props_in,
                                                 const Limits& lim) {
    const PropSet props = normalised(props_in);
    const std::uint64_t n = tau_count(inst, b, lim);
    for (std::uint64_t i = 0; i < n; ++i) {
        CspAssignment tau = nth_csp_assignment(b, inst.domain(), i);
        CspInstance red = reduce_csp(inst, tau);
        auto w = class_witness(red, props, lim);
        if (!w) throw ClosureError("not a strong backdoor: I[" + to_string(tau, inst) + "] is outside the class");
        if (auto sol = solve_closed(red, w->second, lim)) {
            for (const auto& [var, val] : tau) (*sol)[var] = val;
            return sol;
        }
    }
    return std::nullopt;
}

VarSet minimum_vertex_cover(const Graph& g) {
    VarSet best = g.vertices;
    VarSet cur;
    std::function<void(std::size_t)> go = [&](std::size_t from) {
        if (cur.size() >= best.size()) return;
        auto covered = [&](int x) { return std::find(cur.begin(), cur.end(), x) != cur.end(); };
        while (from < g.edges.size() && (covered(g.edges[from].first) || covered(g.edges[from].second))) ++from;
        if (from == g.edges.size()) {
            VarSet sorted = cur;
            std::sort(sorted.begin(), sorted.end());
            if (sorted.size() < best.size() || (sorted.size() == best.size() && sorted < best)) best = sorted;
            return;
        }
        for (int x : {g.edges[from].first, g.edges[from].second}) {
            cur.push_back(x);
            go(from + 1);
            cur.pop_back();
        }
    };
    go(0);
    return best;
}

namespace {

std::vector<Constraint> pick(const CspInstance& inst, const std::vector<int>& idx) {
    std::vector<Constraint> out;
    for (int i : idx) out.push_back(inst.constraints().at(static_cast<std::size_t>(i)));
    return out;
}

std::vector<int> complement(const CspInstance& inst, const std::vector<int>& c1) {
    std::vector<int> out;
    for (std::size_t i = 0; i < inst.constraints().size(); ++i)
        if (std::find(c1.begin(), c1.end(), static_cast<int>(i)) == c1.end()) out.push_back(static_cast<int>(i));
    return out;
}

}  // namespace

VarSet partition_backdoor(const CspInstance& inst, const std::vector<int>& c1, PolyProperty p, PartitionSemantics sem,
                          const Limits& lim) {
    for (int i : c1)
        if (i < 0 || static_cast<std::size_t>(i) >= inst.constraints().size())
            throw PreconditionError("constraint index " + std::to_string(i) + " out of range");
    if (!poly_exists(inst.with_constraints(pick(inst, complement(inst, c1))), p, lim))
        throw PreconditionError("the remaining constraints are not in the " + tag(p) + " class");
    if (sem == PartitionSemantics::Conservative) return minimum_vertex_cover(primal_graph(pick(inst, c1)));
    if (!is_idempotent_property(p))
        throw PreconditionError("the idempotent partition clause does not apply to the constant property");
    return scope_variables(pick(inst, c1));
}

MinPartition min_partition_backdoor(const CspInstance& inst, PolyProperty p, const Limits& lim) {
    const std::size_t m = inst.constraints().size();
    if (m > lim.partition_constraints)
        throw BudgetError("partition search is capped at " + std::to_string(lim.partition_constraints) + " constraints");
    std::optional<PartitionChoice> idem, cons;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
        std::vector<int> c1, c2;
        for (std::size_t i = 0; i < m; ++i) ((mask >> i) & 1 ? c1 : c2).push_back(static_cast<int>(i));
        if (!poly_exists(inst.with_constraints(pick(inst, c2)), p, lim)) continue;
        if (is_idempotent_property(p)) {
            VarSet b = scope_variables(pick(inst, c1));
            if (!idem || b.size() < idem->backdoor.size()) idem = PartitionChoice{c1, b};
        }
        VarSet vc = minimum_vertex_cover(primal_graph(pick(inst, c1)));
        if (!cons || vc.size() < cons->backdoor.size()) cons = PartitionChoice{c1, vc};
    }
    // C1 = all constraints always qualifies, so cons is set.
    return MinPartition{idem, *cons};
}

}  // namespace bd
