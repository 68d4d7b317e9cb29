#include "bd/report.hpp"

namespace bd {

Json to_json(const OperationTable& phi) {
    return Json{{"arity", phi.arity()}, {"domain", phi.domain()}, {"outputs", phi.outputs()}};
}

Json to_json(const SearchStats& s) {
    return Json{{"nodes", s.nodes}, {"leaves", s.leaves}, {"max_depth", s.max_depth}, {"elapsed_ms", s.elapsed_ms}};
}

namespace {

Json common(const DetectionOutcome& out) {
    Json j;
    j["found"] = out.found();
    j["backdoor"] = out.backdoor ? Json(*out.backdoor) : Json::array();
    j["mode"] = to_string(out.mode);
    return j;
}

void add_stats(Json& j, const SearchStats& s) {
    const Json stats = to_json(s);
    for (const auto& [key, value] : stats.items()) j[key] = value;
}

}  // namespace

Json cnf_report(const DetectionOutcome& out, const HeteroClass& h,
                const std::vector<std::pair<Assignment, SClass>>& witnesses) {
    Json j = common(out);
    Json cls = Json::array();
    for (SClass s : h.members()) cls.push_back(tag(s));
    j["class"] = cls;
    add_stats(j, out.stats);
    Json w = Json::object();
    for (const auto& [tau, s] : witnesses) w[to_string(tau)] = tag(s);
    j["witnesses"] = w;
    return j;
}

Json csp_report(const DetectionOutcome& out, const CspInstance& inst, const PropSet& props,
                const std::vector<CspWitness>& witnesses) {
    Json j = common(out);
    Json names = Json::array();
    if (out.backdoor)
        for (int v : *out.backdoor) names.push_back(inst.variables()[static_cast<std::size_t>(v)]);
    j["backdoor_names"] = names;
    Json cls = Json::array();
    for (PolyProperty p : props) cls.push_back(tag(p));
    j["class"] = cls;
    j["domain"] = inst.domain();
    j["arity"] = inst.arity();
    add_stats(j, out.stats);
    Json w = Json::object();
    Json tables = Json::object();
    for (const auto& wt : witnesses) {
        const std::string key = to_string(wt.tau, inst);
        w[key] = tag(wt.property);
        tables[key] = to_json(wt.table);
    }
    j["witnesses"] = w;
    j["witness_tables"] = tables;
    return j;
}

Json error_json(const std::exception& e) {
    const auto* be = dynamic_cast<const Error*>(&e);
    return Json{{"error", be ? be->kind() : "error"}, {"message", e.what()}};
}

}  // namespace bd
