#include "bd/csp.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <set>

#include "json.hpp"

namespace bd {

using nlohmann::json;

namespace {
[[noreturn]] void fail(const std::string& msg) { throw ParseError(0, msg); }
}  // namespace

Relation::Relation(int arity, std::vector<Tuple> tuples) : arity_(arity), tuples_(std::move(tuples)) {
    if (arity < 0) throw PreconditionError("negative relation arity");
    for (const auto& t : tuples_)
        if (static_cast<int>(t.size()) != arity)
            throw PreconditionError("tuple arity " + std::to_string(t.size()) + " does not match relation arity " +
                                    std::to_string(arity));
    std::sort(tuples_.begin(), tuples_.end());
    tuples_.erase(std::unique(tuples_.begin(), tuples_.end()), tuples_.end());
}

bool Relation::contains(const Tuple& t) const { return std::binary_search(tuples_.begin(), tuples_.end(), t); }

int Relation::max_value() const {
    int m = -1;
    for (const auto& t : tuples_)
        for (int v : t) m = std::max(m, v);
    return m;
}

CspInstance::CspInstance(std::vector<std::string> variables, int domain, std::vector<Constraint> constraints)
    : vars_(std::move(variables)), domain_(domain), cons_(std::move(constraints)) {
    if (domain_ < 1) throw PreconditionError("domain size must be at least 1");
    std::set<std::string> names(vars_.begin(), vars_.end());
    if (names.size() != vars_.size()) throw PreconditionError("duplicate variable name");
    const int n = static_cast<int>(vars_.size());
    for (const auto& c : cons_) {
        if (static_cast<int>(c.scope.size()) != c.relation.arity())
            throw PreconditionError("scope length does not match relation arity");
        std::set<int> seen;
        for (int v : c.scope) {
            if (v < 0 || v >= n) throw PreconditionError("scope refers to an undeclared variable");
            if (!seen.insert(v).second) throw PreconditionError("scope repeats variable " + vars_[v]);
        }
        if (c.relation.max_value() >= domain_) throw PreconditionError("tuple value outside the domain");
        for (const auto& t : c.relation.tuples())
            for (int x : t)
                if (x < 0) throw PreconditionError("negative tuple value");
    }
}

int CspInstance::arity() const {
    int a = 0;
    for (const auto& c : cons_) a = std::max(a, static_cast<int>(c.scope.size()));
    return a;
}

int CspInstance::var_index(const std::string& name) const {
    auto it = std::find(vars_.begin(), vars_.end(), name);
    return it == vars_.end() ? -1 : static_cast<int>(it - vars_.begin());
}

CspInstance CspInstance::with_constraints(std::vector<Constraint> cs) const {
    CspInstance out(vars_, domain_, std::move(cs));
    out.value_names_ = value_names_;
    return out;
}

CspInstance parse_csp(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ParseError(1, std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) fail("top level must be an object");
    if (!doc.contains("domain") || !doc["domain"].is_number_integer()) fail("missing integer field 'domain'");
    if (!doc.contains("variables") || !doc["variables"].is_array()) fail("missing array field 'variables'");
    if (!doc.contains("constraints") || !doc["constraints"].is_array()) fail("missing array field 'constraints'");
    const int domain = doc["domain"].get<int>();
    if (domain < 1) fail("domain must be at least 1");

    std::vector<std::string> value_names;
    std::map<std::string, int> value_index;
    if (doc.contains("values")) {
        if (!doc["values"].is_array()) fail("'values' must be an array of names");
        for (const auto& v : doc["values"]) {
            if (!v.is_string()) fail("'values' must be an array of names");
            value_index[v.get<std::string>()] = static_cast<int>(value_names.size());
            value_names.push_back(v.get<std::string>());
        }
        if (static_cast<int>(value_names.size()) != domain) fail("'values' length differs from 'domain'");
    }

    std::vector<std::string> vars;
    std::map<std::string, int> index;
    for (const auto& v : doc["variables"]) {
        if (!v.is_string()) fail("variable names must be strings");
        if (index.count(v.get<std::string>())) fail("duplicate variable '" + v.get<std::string>() + "'");
        index[v.get<std::string>()] = static_cast<int>(vars.size());
        vars.push_back(v.get<std::string>());
    }

    std::vector<Constraint> cons;
    std::size_t ci = 0;
    for (const auto& c : doc["constraints"]) {
        const std::string where = "constraint " + std::to_string(ci++);
        if (!c.is_object() || !c.contains("scope") || !c.contains("tuples") || !c["scope"].is_array() ||
            !c["tuples"].is_array())
            fail(where + ": needs 'scope' and 'tuples' arrays");
        Constraint con;
        std::set<int> seen;
        for (const auto& s : c["scope"]) {
            if (!s.is_string()) fail(where + ": scope entries must be variable names");
            auto it = index.find(s.get<std::string>());
            if (it == index.end()) fail(where + ": unknown variable '" + s.get<std::string>() + "'");
            if (!seen.insert(it->second).second) fail(where + ": variable '" + s.get<std::string>() + "' repeated");
            con.scope.push_back(it->second);
        }
        std::vector<Tuple> tuples;
        for (const auto& t : c["tuples"]) {
            if (!t.is_array()) fail(where + ": tuples must be arrays");
            if (t.size() != con.scope.size()) fail(where + ": tuple arity mismatch");
            Tuple tu;
            for (const auto& x : t) {
                int val = -1;
                if (x.is_number_integer()) {
                    val = x.get<int>();
                } else if (x.is_string() && value_index.count(x.get<std::string>())) {
                    val = value_index[x.get<std::string>()];
                } else {
                    fail(where + ": bad tuple entry " + x.dump());
                }
                if (val < 0 || val >= domain)
                    fail(where + ": value " + std::to_string(val) + " outside domain of size " + std::to_string(domain));
                tu.push_back(val);
            }
            tuples.push_back(std::move(tu));
        }
        con.relation = Relation(static_cast<int>(con.scope.size()), std::move(tuples));
        cons.push_back(std::move(con));
    }
    CspInstance inst(std::move(vars), domain, std::move(cons));
    inst.set_value_names(std::move(value_names));
    return inst;
}

std::string write_csp(const CspInstance& inst) {
    json doc;
    doc["domain"] = inst.domain();
    doc["variables"] = inst.variables();
    if (!inst.value_names().empty()) doc["values"] = inst.value_names();
    json cons = json::array();
    for (const auto& c : inst.constraints()) {
        json jc;
        json scope = json::array();
        for (int v : c.scope) scope.push_back(inst.variables()[static_cast<std::size_t>(v)]);
        jc["scope"] = scope;
        jc["tuples"] = c.relation.tuples();  // already sorted
        cons.push_back(jc);
    }
    doc["constraints"] = cons;
    return doc.dump(1) + "\n";
}

Constraint reduce_constraint(const Constraint& c, const CspAssignment& tau) {
    std::vector<int> keep_pos;
    Constraint out;
    for (std::size_t i = 0; i < c.scope.size(); ++i)
        if (!tau.count(c.scope[i])) {
            keep_pos.push_back(static_cast<int>(i));
            out.scope.push_back(c.scope[i]);
        }
    if (keep_pos.size() == c.scope.size()) return c;
    std::vector<Tuple> tuples;
    for (const auto& t : c.relation.tuples()) {
        bool ok = true;
        for (std::size_t i = 0; i < c.scope.size() && ok; ++i) {
            auto it = tau.find(c.scope[i]);
            if (it != tau.end() && it->second != t[i]) ok = false;
        }
        if (!ok) continue;
        Tuple r;
        r.reserve(keep_pos.size());
        for (int p : keep_pos) r.push_back(t[static_cast<std::size_t>(p)]);
        tuples.push_back(std::move(r));
    }
    out.relation = Relation(static_cast<int>(out.scope.size()), std::move(tuples));
    return out;
}

CspInstance reduce_csp(const CspInstance& inst, const CspAssignment& tau) {
    if (tau.empty()) return inst;
    std::vector<Constraint> cs;
    cs.reserve(inst.constraints().size());
    for (const auto& c : inst.constraints()) cs.push_back(reduce_constraint(c, tau));
    return inst.with_constraints(std::move(cs));
}

bool is_solution(const CspInstance& inst, const CspAssignment& full) {
    for (const auto& c : inst.constraints()) {
        Tuple t;
        for (int v : c.scope) {
            auto it = full.find(v);
            if (it == full.end()) return false;
            t.push_back(it->second);
        }
        if (!c.relation.contains(t)) return false;
    }
    return true;
}

std::uint64_t assignment_count(std::size_t nvars, int domain) {
    std::uint64_t total = 1;
    for (std::size_t i = 0; i < nvars; ++i) {
        if (total > std::numeric_limits<std::uint64_t>::max() / static_cast<std::uint64_t>(domain))
            return std::numeric_limits<std::uint64_t>::max();
        total *= static_cast<std::uint64_t>(domain);
    }
    return total;
}

CspAssignment nth_csp_assignment(const std::vector<int>& vars, int domain, std::uint64_t index) {
    CspAssignment a;
    for (std::size_t i = vars.size(); i-- > 0;) {
        a[vars[i]] = static_cast<int>(index % static_cast<std::uint64_t>(domain));
        index /= static_cast<std::uint64_t>(domain);
    }
    return a;
}

std::optional<CspAssignment> solve_exhaustive(const CspInstance& inst, const Limits& lim) {
    const std::size_t n = inst.num_vars();
    // Variables outside every scope are pinned to 0 and never branched on.
    std::vector<int> order = scope_variables(inst.constraints());
    if (assignment_count(order.size(), inst.domain()) > lim.csp_space)
        throw BudgetError("exhaustive CSP search space " + std::to_string(inst.domain()) + "^" +
                          std::to_string(order.size()) + " exceeds cap " + std::to_string(lim.csp_space));
    std::vector<std::size_t> pos(n, 0);
    for (std::size_t i = 0; i < order.size(); ++i) pos[static_cast<std::size_t>(order[i])] = i;
    // A constraint is checked once its last scope variable (in declared order) is set.
    std::vector<std::vector<const Constraint*>> due(order.size() + 1);
    for (const auto& c : inst.constraints()) {
        if (c.scope.empty()) {
            if (c.relation.empty()) return std::nullopt;
            continue;
        }
        int last = *std::max_element(c.scope.begin(), c.scope.end());
        due[pos[static_cast<std::size_t>(last)]].push_back(&c);
    }
    std::vector<int> value(n, 0);
    std::function<bool(std::size_t)> go = [&](std::size_t i) -> bool {
        if (i == order.size()) return true;
        const auto var = static_cast<std::size_t>(order[i]);
        for (int a = 0; a < inst.domain(); ++a) {
            value[var] = a;
            bool ok = true;
            for (const Constraint* c : due[i]) {
                Tuple t;
                t.reserve(c->scope.size());
                for (int v : c->scope) t.push_back(value[static_cast<std::size_t>(v)]);
                if (!c->relation.contains(t)) {
                    ok = false;
                    break;
                }
            }
            if (ok && go(i + 1)) return true;
        }
        value[var] = 0;
        return false;
    };
    if (!go(0)) return std::nullopt;
    CspAssignment sol;
    for (std::size_t i = 0; i < n; ++i) sol[static_cast<int>(i)] = value[i];
    return sol;
}

Graph primal_graph(const std::vector<Constraint>& constraints) {
    Graph g;
    std::set<int> verts;
    std::set<std::pair<int, int>> edges;
    for (const auto& c : constraints) {
        for (int v : c.scope) verts.insert(v);
        for (std::size_t i = 0; i < c.scope.size(); ++i)
            for (std::size_t j = i + 1; j < c.scope.size(); ++j)
                edges.insert(std::minmax(c.scope[i], c.scope[j]));
    }
    g.vertices.assign(verts.begin(), verts.end());
    g.edges.assign(edges.begin(), edges.end());
    return g;
}

std::vector<int> scope_variables(const std::vector<Constraint>& constraints) {
    std::set<int> vs;
    for (const auto& c : constraints) vs.insert(c.scope.begin(), c.scope.end());
    return {vs.begin(), vs.end()};
}

std::string to_string(const CspAssignment& a, const CspInstance& inst) {
    std::string s = "{";
    bool first = true;
    for (const auto& [v, x] : a) {
        if (!first) s += ',';
        first = false;
        s += inst.variables()[static_cast<std::size_t>(v)] + "=" + std::to_string(x);
    }
    return s + "}";
}

}  // namespace bd
