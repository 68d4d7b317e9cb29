#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <iterator>
#include <sstream>

#include "CLI11.hpp"

#include "bd/csp_backdoor.hpp"
#include "bd/generators.hpp"
#include "bd/report.hpp"

using namespace bd;
namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kNotFound = 1, kUsage = 2, kBudget = 3 };

struct Input {
    bool is_csp = false;
    CnfFormula cnf;
    int declared_vars = 0;
    CspInstance csp;
};

std::string read_all(const std::string& path) {
    if (path.empty() || path == "-") return {std::istreambuf_iterator<char>(std::cin), {}};
    std::ifstream in(path);
    if (!in) throw PreconditionError("cannot open " + path);
    return {std::istreambuf_iterator<char>(in), {}};
}

Input load(const std::string& path, const std::string& format) {
    const std::string text = read_all(path);
    std::string fmt = format;
    if (fmt.empty()) {
        const std::string ext = fs::path(path).extension().string();
        if (ext == ".cnf")
            fmt = "cnf";
        else if (ext == ".json")
            fmt = "csp";
        else {
            auto pos = text.find_first_not_of(" \t\r\n");
            fmt = pos != std::string::npos && text[pos] == '{' ? "csp" : "cnf";
        }
    }
    Input in;
    if (fmt == "csp") {
        in.is_csp = true;
        in.csp = parse_csp(text);
    } else if (fmt == "cnf") {
        DimacsResult r = parse_dimacs(text);
        in.cnf = r.formula;
        in.declared_vars = r.declared_vars;
    } else {
        throw PreconditionError("unknown format '" + fmt + "' (expected cnf or csp)");
    }
    return in;
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty() || out_path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw PreconditionError("cannot write " + out_path);
    out << text;
}

void print(const Json& j) { std::cout << j.dump(2) << "\n"; }

HeteroClass need_class(const std::string& tags) {
    if (tags.empty()) throw PreconditionError("--class is required for CNF input");
    return HeteroClass::parse(tags);
}

PropSet need_props(const std::string& tags) {
    if (tags.empty()) throw PreconditionError("--props is required for CSP input");
    return parse_property_list(tags);
}

Mode parse_mode(const std::string& m) {
    if (m == "strong") return Mode::Strong;
    if (m == "weak") return Mode::Weak;
    throw PreconditionError("mode must be strong or weak");
}

// Comma-separated variables: DIMACS numbers for CNF, names (or indices) for CSP.
VarSet parse_backdoor(const std::string& list, const Input& in) {
    VarSet b;
    std::stringstream ss(list);
    for (std::string item; std::getline(ss, item, ',');) {
        if (item.empty()) continue;
        if (in.is_csp) {
            int idx = in.csp.var_index(item);
            if (idx < 0) {
                try {
                    idx = std::stoi(item);
                } catch (const std::exception&) {
                    throw PreconditionError("unknown variable '" + item + "'");
                }
                if (idx < 0 || static_cast<std::size_t>(idx) >= in.csp.num_vars())
                    throw PreconditionError("variable index " + item + " out of range");
            }
            b.push_back(idx);
        } else {
            try {
                b.push_back(std::stoi(item));
            } catch (const std::exception&) {
                throw PreconditionError("backdoor variables must be integers, got '" + item + "'");
            }
        }
    }
    return make_varset(b);
}

std::string dichotomy_line(const HeteroClass& h) {
    if (!contains_bad_pair(h)) return "FPT";
    std::string a, b;
    for (SClass s : h.members()) {
        if (a.empty() && (s == SClass::Horn || s == SClass::ZeroVal)) a = tag(s);
        if (b.empty() && (s == SClass::HornMinus || s == SClass::OneVal)) b = tag(s);
    }
    return "W[2]-hard (bad pair: " + a + "/" + b + ")";
}

Json cnf_model_json(const Assignment& a) {
    Json j = Json::object();
    for (const auto& [v, val] : a) j[std::to_string(v)] = val ? 1 : 0;
    return j;
}

Json csp_model_json(const CspAssignment& a, const CspInstance& inst) {
    Json j = Json::object();
    for (const auto& [v, val] : a) j[inst.variables()[static_cast<std::size_t>(v)]] = val;
    return j;
}

std::string cnf_text(const CnfFormula& f) { return write_dimacs(f, f.max_var()); }

double bound_for(const HeteroClass& h, const CnfFormula& f, int k) {
    switch (strong_algorithm(h)) {
        case StrongAlgorithm::ExactValid: return 1;
        case StrongAlgorithm::SingleClass: return std::pow(h.contains(SClass::Krom2) ? 3.0 : 2.0, k);
        case StrongAlgorithm::KromUnion:
        case StrongAlgorithm::Triple: return std::pow(9.0, k);
        case StrongAlgorithm::HornZval: return std::pow(3.0, k);
        case StrongAlgorithm::BoundedLength:
            return std::pow(static_cast<double>(h.size()) * static_cast<double>(std::max<std::size_t>(1, f.max_clause_length())),
                            k + 1);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Backdoor set detection, verification and instance generation for SAT and CSP"};
    app.require_subcommand(1);

    std::string file, format, class_tags, prop_tags, mode = "strong", backdoor, out_path;
    int k = 0;
    bool oracle = false;
    Limits lim;
    app.add_option("--oracle-vars", lim.oracle_vars, "Variable cap of the SAT brute-force oracle");
    app.add_option("--oracle-csp-vars", lim.oracle_csp_vars, "Variable cap of the CSP brute-force oracle");
    app.add_option("--oracle-csp-domain", lim.oracle_csp_domain, "Domain cap of the CSP brute-force oracle");
    app.add_option("--poly-nodes", lim.poly_nodes, "Node budget per polymorphism search");

    auto add_input = [&](CLI::App* sub) {
        sub->add_option("file", file, "Input file (.cnf DIMACS or .json CSP); stdin when omitted or '-'");
        sub->add_option("--format", format, "Override format detection")->check(CLI::IsMember({"cnf", "csp"}));
    };
    auto add_class = [&](CLI::App* sub) {
        sub->add_option("--class", class_tags, "Schaefer classes, e.g. horn,2cnf");
        sub->add_option("--props", prop_tags, "Polymorphism properties, e.g. majority,malcev");
    };

    auto* classify = app.add_subcommand("classify", "Membership of an instance in a base class");
    add_input(classify);
    add_class(classify);

    auto* detect = app.add_subcommand("detect", "Search for a backdoor of size at most k");
    add_input(detect);
    add_class(detect);
    detect->add_option("--mode", mode)->check(CLI::IsMember({"strong", "weak"}));
    detect->add_option("-k", k, "Size budget")->required()->check(CLI::NonNegativeNumber);
    detect->add_flag("--oracle", oracle, "Use the exhaustive minimum-size search");

    auto* verify = app.add_subcommand("verify", "Check a candidate backdoor");
    add_input(verify);
    add_class(verify);
    verify->add_option("--mode", mode)->check(CLI::IsMember({"strong", "weak"}));
    verify->add_option("--backdoor", backdoor, "Comma-separated variables")->required();

    auto* solve = app.add_subcommand("solve", "Decide the instance through a backdoor");
    add_input(solve);
    add_class(solve);
    solve->add_option("--mode", mode)->check(CLI::IsMember({"strong", "weak"}));
    solve->add_option("--backdoor", backdoor, "Comma-separated variables")->required();

    auto* dichotomy = app.add_subcommand("dichotomy", "Complexity of strong backdoor detection for a class");
    dichotomy->add_option("--class", class_tags)->required();

    std::string family, sets_file, tables = "repaired", from_tag, to_tag, cnf_file;
    int n = 5, count = 0;
    std::uint64_t seed = 0;
    RandomCnfParams cnf_params;
    RandomCspParams csp_params;
    auto* gen = app.add_subcommand("gen", "Generate an instance");
    gen->add_option("family", family, "intro | obstruction | hs-sat | weak-pad | hs-csp-boolean | gadget | "
                                      "hs-csp-arity2 | pivot | random-cnf | random-csp")
        ->required();
    gen->add_option("-n", n, "Size parameter (intro, pivot)");
    gen->add_option("-k", k, "Gadget size (gadget) or padding budget (weak-pad)");
    gen->add_option("--sets", sets_file, "Set system file");
    gen->add_option("--props", prop_tags);
    gen->add_option("--class", class_tags, "Target class (weak-pad)");
    gen->add_option("--from", from_tag, "Source class (obstruction, weak-pad)");
    gen->add_option("--to", to_tag, "Target class (obstruction)");
    gen->add_option("--cnf", cnf_file, "Formula to pad (weak-pad)");
    gen->add_option("--tables", tables, "Gadget tables, and universe padding for hs-sat")->check(CLI::IsMember({"printed", "repaired"}));
    auto* seed_opt = gen->add_option("--seed", seed, "Seed for random families");
    gen->add_option("--count", count, "Write this many random instances into the -o directory");
    gen->add_option("--max-vars", cnf_params.max_vars);
    gen->add_option("--max-clauses", cnf_params.max_clauses);
    gen->add_option("--max-len", cnf_params.max_len);
    gen->add_option("--max-csp-vars", csp_params.max_vars);
    gen->add_option("--max-domain", csp_params.max_domain);
    gen->add_option("--max-arity", csp_params.max_arity);
    gen->add_option("--max-constraints", csp_params.max_constraints);
    gen->add_option("-o", out_path, "Output file (stdout by default)");

    auto* compare = app.add_subcommand("compare-partition", "Minimum strong versus partition backdoors");
    add_input(compare);
    compare->add_option("--props", prop_tags)->required();

    std::string corpus;
    auto* bench = app.add_subcommand("bench", "Search-tree sizes against the branching bounds");
    bench->add_option("--corpus", corpus, "Directory of .cnf / .json files")->required();
    add_class(bench);
    bench->add_option("-k", k)->check(CLI::NonNegativeNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << Json{{"error", "usage"}, {"message", e.what()}}.dump() << "\n";
        return kUsage;
    }

    try {
        if (*classify) {
            Input in = load(file, format);
            if (in.is_csp) {
                PropSet props = need_props(prop_tags);
                Json j{{"member", false}};
                for (PolyProperty p : props)
                    if (auto t = poly_exists(in.csp, p, lim)) {
                        j = Json{{"member", true}, {"witness", tag(p)}, {"table", to_json(*t)}};
                        break;
                    }
                print(j);
                return j["member"].get<bool>() ? kOk : kNotFound;
            }
            HeteroClass h = need_class(class_tags);
            Membership m = formula_in_hetero(in.cnf, h);
            Json viol = Json::array();
            for (const auto& [s, c] : m.violations) viol.push_back({{"class", tag(s)}, {"clause", to_string(c)}});
            print({{"member", m.member()}, {"witness", m.witness ? Json(tag(*m.witness)) : Json()}, {"violations", viol}});
            return m.member() ? kOk : kNotFound;
        }

        if (*detect) {
            Input in = load(file, format);
            const Mode md = parse_mode(mode);
            if (in.is_csp) {
                PropSet props = need_props(prop_tags);
                DetectionOutcome out = oracle ? oracle_csp(in.csp, k, props, md, lim)
                                       : md == Mode::Strong ? detect_strong_csp(in.csp, k, props, lim)
                                                            : detect_weak_csp(in.csp, k, props, lim);
                std::vector<CspWitness> ws;
                if (out.found()) {
                    if (md == Mode::Strong) {
                        CspVerification v = verify_strong_csp(in.csp, *out.backdoor, props, lim);
                        if (!v.ok) throw ContractError("detected set failed strong verification");
                        ws = std::move(v.witnesses);
                    } else {
                        auto tau = verify_weak_csp(in.csp, *out.backdoor, props, lim);
                        if (!tau) throw ContractError("detected set failed weak verification");
                        CspInstance red = reduce_csp(in.csp, *tau);
                        for (PolyProperty p : props)
                            if (auto t = poly_exists(red, p, lim)) {
                                ws.push_back({*tau, p, *t});
                                break;
                            }
                    }
                }
                print(csp_report(out, in.csp, props, ws));
                return out.found() ? kOk : kNotFound;
            }
            HeteroClass h = need_class(class_tags);
            DetectionOutcome out = oracle ? oracle_backdoor(in.cnf, k, h, md, lim)
                                   : md == Mode::Strong ? detect_strong(in.cnf, k, h, lim)
                                                        : detect_weak_bounded(in.cnf, k, h, lim);
            std::vector<std::pair<Assignment, SClass>> ws;
            if (out.found()) {
                if (md == Mode::Strong) {
                    Verification v = verify_strong(in.cnf, *out.backdoor, h, lim);
                    if (!v.ok) throw ContractError("detected set failed strong verification");
                    ws = std::move(v.witnesses);
                } else {
                    auto w = verify_weak(in.cnf, *out.backdoor, h, lim);
                    if (!w) throw ContractError("detected set failed weak verification");
                    ws.push_back(*w);
                }
            }
            print(cnf_report(out, h, ws));
            return out.found() ? kOk : kNotFound;
        }

        if (*verify) {
            Input in = load(file, format);
            const Mode md = parse_mode(mode);
            VarSet b = parse_backdoor(backdoor, in);
            Json j;
            bool ok = false;
            if (in.is_csp) {
                PropSet props = need_props(prop_tags);
                if (md == Mode::Strong) {
                    CspVerification v = verify_strong_csp(in.csp, b, props, lim);
                    ok = v.ok;
                    j["ok"] = ok;
                    j["falsifying"] = v.falsifying ? Json(to_string(*v.falsifying, in.csp)) : Json();
                    Json w = Json::object();
                    for (const auto& wt : v.witnesses) w[to_string(wt.tau, in.csp)] = tag(wt.property);
                    j["witnesses"] = w;
                } else {
                    auto tau = verify_weak_csp(in.csp, b, props, lim);
                    ok = tau.has_value();
                    j["ok"] = ok;
                    j["assignment"] = tau ? Json(to_string(*tau, in.csp)) : Json();
                }
            } else {
                HeteroClass h = need_class(class_tags);
                if (md == Mode::Strong) {
                    Verification v = verify_strong(in.cnf, b, h, lim);
                    ok = v.ok;
                    j["ok"] = ok;
                    j["falsifying"] = v.falsifying ? Json(to_string(*v.falsifying)) : Json();
                    Json viol = Json::array();
                    for (const auto& [s, c] : v.violations) viol.push_back({{"class", tag(s)}, {"clause", to_string(c)}});
                    j["violations"] = viol;
                    Json w = Json::object();
                    for (const auto& [tau, s] : v.witnesses) w[to_string(tau)] = tag(s);
                    j["witnesses"] = w;
                } else {
                    auto w = verify_weak(in.cnf, b, h, lim);
                    ok = w.has_value();
                    j["ok"] = ok;
                    j["assignment"] = w ? Json(to_string(w->first)) : Json();
                    j["class"] = w ? Json(tag(w->second)) : Json();
                }
            }
            print(j);
            return ok ? kOk : kNotFound;
        }

        if (*solve) {
            Input in = load(file, format);
            const Mode md = parse_mode(mode);
            VarSet b = parse_backdoor(backdoor, in);
            if (in.is_csp) {
                PropSet props = need_props(prop_tags);
                std::optional<CspAssignment> sol;
                if (md == Mode::Strong) {
                    sol = evaluate_strong_csp(in.csp, b, props, lim);
                } else if (auto tau = verify_weak_csp(in.csp, b, props, lim)) {
                    sol = solve_exhaustive(reduce_csp(in.csp, *tau), lim);
                    for (const auto& [v, x] : *tau) (*sol)[v] = x;
                }
                print({{"satisfiable", sol.has_value()}, {"model", sol ? csp_model_json(*sol, in.csp) : Json()}});
                return sol ? kOk : kNotFound;
            }
            HeteroClass h = need_class(class_tags);
            SatResult r = evaluate_backdoor(in.cnf, b, h, md, lim);
            print({{"satisfiable", r.satisfiable}, {"model", r.model ? cnf_model_json(*r.model) : Json()}});
            return r.satisfiable ? kOk : kNotFound;
        }

        if (*dichotomy) {
            std::cout << dichotomy_line(HeteroClass::parse(class_tags)) << "\n";
            return kOk;
        }

        if (*gen) {
            auto set_system = [&] {
                if (sets_file.empty()) throw PreconditionError("--sets is required for " + family);
                return parse_set_system(read_all(sets_file));
            };
            auto gadget_tables = tables == "printed" ? GadgetTables::AsPrinted : GadgetTables::Repaired;
            auto single_prop = [&] {
                PropSet ps = need_props(prop_tags);
                if (ps.size() != 1) throw PreconditionError(family + " takes exactly one property");
                return ps.front();
            };
            if (family == "intro") {
                emit(cnf_text(intro_family(n)), out_path);
            } else if (family == "obstruction") {
                emit(cnf_text(CnfFormula({obstruction(parse_class_tag(from_tag), parse_class_tag(to_tag))})), out_path);
            } else if (family == "hs-sat") {
                emit(cnf_text(hs_to_strong_sat(set_system(), tables == "printed" ? UniversePadding::AsPrinted
                                                                                   : UniversePadding::Padded)),
                     out_path);
            } else if (family == "weak-pad") {
                if (cnf_file.empty()) throw PreconditionError("--cnf is required for weak-pad");
                CnfFormula f = parse_dimacs(read_all(cnf_file)).formula;
                emit(cnf_text(weak_obstruction_pad(f, k, parse_class_tag(from_tag), need_class(class_tags))), out_path);
            } else if (family == "hs-csp-boolean") {
                emit(write_csp(hs_to_csp_boolean(set_system(), need_props(prop_tags))), out_path);
            } else if (family == "gadget") {
                emit(write_csp(chain_gadget(single_prop(), k, gadget_tables)), out_path);
            } else if (family == "hs-csp-arity2") {
                emit(write_csp(hs_to_csp_arity2(set_system(), single_prop(), gadget_tables)), out_path);
            } else if (family == "pivot") {
                emit(write_csp(pivot_instance(n)), out_path);
            } else if (family == "random-cnf" || family == "random-csp") {
                if (!*seed_opt) throw CLI::ValidationError("--seed", "random families require --seed");
                const bool is_cnf = family == "random-cnf";
                const int many = std::max(count, 1);
                std::vector<std::string> texts;
                if (is_cnf)
                    for (const auto& f : random_cnf_corpus(seed, many, cnf_params)) texts.push_back(cnf_text(f));
                else
                    for (const auto& c : random_csp_corpus(seed, many, csp_params)) texts.push_back(write_csp(c));
                if (count == 0) {
                    emit(texts.front(), out_path);
                } else {
                    if (out_path.empty()) throw PreconditionError("--count needs -o <directory>");
                    fs::create_directories(out_path);
                    for (int i = 0; i < count; ++i) {
                        std::ostringstream name;
                        name << "rand_" << std::setw(4) << std::setfill('0') << i << (is_cnf ? ".cnf" : ".json");
                        emit(texts[static_cast<std::size_t>(i)], (fs::path(out_path) / name.str()).string());
                    }
                }
            } else {
                throw CLI::ValidationError("family", "unknown family '" + family + "'");
            }
            return kOk;
        }

        if (*compare) {
            Input in = load(file, format.empty() ? "csp" : format);
            if (!in.is_csp) throw PreconditionError("compare-partition needs a CSP instance");
            Json rows = Json::array();
            for (PolyProperty p : need_props(prop_tags)) {
                const int nv = static_cast<int>(in.csp.num_vars());
                DetectionOutcome strong = oracle_csp(in.csp, nv, {p}, Mode::Strong, lim);
                MinPartition mp = min_partition_backdoor(in.csp, p, lim);
                Json row{{"property", tag(p)},
                         {"min_strong", strong.backdoor ? Json(strong.backdoor->size()) : Json()},
                         {"strong_backdoor", strong.backdoor ? Json(*strong.backdoor) : Json()}};
                if (mp.idempotent)
                    row["partition_idempotent"] = {{"size", mp.idempotent->backdoor.size()},
                                                   {"c1", mp.idempotent->c1},
                                                   {"backdoor", mp.idempotent->backdoor}};
                else
                    row["partition_idempotent"] = Json();
                row["partition_conservative"] = {{"size", mp.conservative.backdoor.size()},
                                                 {"c1", mp.conservative.c1},
                                                 {"backdoor", mp.conservative.backdoor}};
                rows.push_back(row);
            }
            print(rows);
            return kOk;
        }

        if (*bench) {
            std::vector<fs::path> files;
            for (const auto& e : fs::directory_iterator(corpus))
                if (e.path().extension() == ".cnf" || e.path().extension() == ".json") files.push_back(e.path());
            std::sort(files.begin(), files.end());
            std::cout << std::left << std::setw(28) << "file" << std::setw(8) << "found" << std::setw(12) << "nodes"
                      << std::setw(12) << "leaves" << std::setw(14) << "bound" << "ms\n";
            for (const auto& path : files) {
                Input in = load(path.string(), "");
                DetectionOutcome out;
                double bound = 0;
                if (in.is_csp) {
                    PropSet props = need_props(prop_tags);
                    out = detect_strong_csp(in.csp, k, props, lim);
                    PolyFamily fam(in.csp.domain(), props, lim);
                    bound = std::pow(static_cast<double>(fam.size()) * in.csp.arity(), k + 1);
                } else {
                    HeteroClass h = need_class(class_tags);
                    out = detect_strong(in.cnf, k, h, lim);
                    bound = bound_for(h, in.cnf, k);
                }
                std::cout << std::left << std::setw(28) << path.filename().string() << std::setw(8)
                          << (out.found() ? "yes" : "no") << std::setw(12) << out.stats.nodes << std::setw(12)
                          << out.stats.leaves << std::setw(14) << bound << out.stats.elapsed_ms << "\n";
            }
            return kOk;
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << Json{{"error", "usage"}, {"message", e.what()}}.dump() << "\n";
        return kUsage;
    } catch (const BudgetError& e) {
        std::cerr << error_json(e).dump() << "\n";
        return kBudget;
    } catch (const std::exception& e) {
        std::cerr << error_json(e).dump() << "\n";
        return kUsage;
    }
    return kUsage;
}
