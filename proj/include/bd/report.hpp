#pragma once

#include <optional>
#include <utility>

#include "json.hpp"

#include "bd/csp_backdoor.hpp"
#include "bd/sat_backdoor.hpp"

namespace bd {

using Json = nlohmann::ordered_json;

Json to_json(const OperationTable& phi);
Json to_json(const SearchStats& s);

// Detection report for CNF input. Witnesses map each assignment string to a class tag.
Json cnf_report(const DetectionOutcome& out, const HeteroClass& h,
                const std::vector<std::pair<Assignment, SClass>>& witnesses);

// Detection report for CSP input; adds "domain", "arity" and variable names.
Json csp_report(const DetectionOutcome& out, const CspInstance& inst, const PropSet& props,
                const std::vector<CspWitness>& witnesses);

Json error_json(const std::exception& e);

}  // namespace bd
