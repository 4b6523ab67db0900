// Command-line interface: validate, generate, solve, analyze, tree-check,
// certify. Exit codes: 0 ok, 1 usage/validation failure, 2 infeasible,
// 3 non-convergence/mismatch, 4 size cap.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "gmnf/bp.hpp"
#include "gmnf/generator.hpp"
#include "gmnf/io.hpp"
#include "gmnf/oracle.hpp"
#include "gmnf/residual.hpp"
#include "gmnf/tree.hpp"
#include "gmnf/validate.hpp"

using namespace gmnf;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitNoConvergence = 3;
constexpr int kExitSizeCap = 4;

struct Report {
    std::string command;
    std::string fingerprint;
    std::string numeric_mode = "rational";
    json payload = json::object();
    std::chrono::steady_clock::time_point started = std::chrono::steady_clock::now();

    double wall_ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started)
            .count();
    }

    void emit(bool as_json) const {
        if (as_json) {
            json doc;
            doc["command"] = command;
            doc["instance"] = fingerprint;
            doc["numeric_mode"] = numeric_mode;
            doc["wall_ms"] = wall_ms();
            doc["result"] = payload;
            std::cout << doc.dump(2) << "\n";
            return;
        }
        std::cout << "command: " << command << "\n";
        if (!fingerprint.empty()) std::cout << "instance: " << fingerprint << "\n";
        std::cout << "numeric mode: " << numeric_mode << "\n";
        print_payload(payload, "");
        std::printf("wall time: %.1f ms\n", wall_ms());
    }

    static void print_payload(const json& j, const std::string& prefix) {
        for (const auto& [key, value] : j.items()) {
            if (value.is_object()) {
                print_payload(value, prefix + key + ".");
            } else if (value.is_array() && !value.empty() && value[0].is_object()) {
                for (std::size_t i = 0; i < value.size(); ++i)
                    print_payload(value[i], prefix + key + "[" + std::to_string(i) + "].");
            } else {
                std::cout << prefix << key << ": "
                          << (value.is_string() ? value.get<std::string>() : value.dump()) << "\n";
            }
        }
    }
};

json rat_array(const std::vector<Rat>& xs) {
    json arr = json::array();
    for (const auto& x : xs) arr.push_back(num::str(x));
    return arr;
}

std::pair<Rat, Rat> parse_range(const std::string& text) {
    auto colon = text.find(':');
    if (colon == std::string::npos) throw UsageError("range must be lo:hi, got " + text);
    return {num::parse<Rat>(text.substr(0, colon)), num::parse<Rat>(text.substr(colon + 1))};
}

// Loads, validates structure, and requires ratio balance.
GmnfInstance<Rat> load_checked(const std::string& path, Report& report) {
    auto inst = load_instance_rational(path);
    report.fingerprint = fingerprint_hex(inst);
    auto val = validate(inst);
    if (!val.structurally_valid()) {
        std::string msg = "instance invalid:";
        for (const auto& e : val.errors) msg += "\n  " + e;
        throw UsageError(msg);
    }
    if (!val.ratio_balance->balanced) throw UsageError("instance is not ratio-balanced");
    return inst;
}

json cycle_json(const NondirCycle& cyc) {
    json j;
    j["vertices"] = cyc.vertices;
    j["edges"] = cyc.edges;
    return j;
}

int cmd_validate(const std::string& path, bool bruteforce, bool as_json) {
    Report report;
    report.command = "validate";
    auto inst = load_instance_rational(path);
    report.fingerprint = fingerprint_hex(inst);
    auto val = validate(inst);
    report.payload["structural_errors"] = val.errors;
    bool ok = val.ok();
    if (val.ratio_balance) {
        report.payload["ratio_balanced"] = val.ratio_balance->balanced;
        if (val.ratio_balance->certificate) {
            report.payload["gauge"]["p"] = rat_array(val.ratio_balance->certificate->p);
            report.payload["gauge"]["q"] = rat_array(val.ratio_balance->certificate->q);
        }
        if (val.ratio_balance->violation) {
            report.payload["violating_cycle"] = cycle_json(*val.ratio_balance->violation);
            report.payload["violation_product"] =
                num::str(cycle_delta_product(inst, *val.ratio_balance->violation));
        }
        if (bruteforce) {
            auto slow = is_ratio_balanced_bruteforce(inst);
            report.payload["bruteforce_agrees"] = slow.balanced == val.ratio_balance->balanced;
            if (slow.balanced != val.ratio_balance->balanced) ok = false;
        }
    }
    report.payload["ok"] = ok;
    report.emit(as_json);
    return ok ? kExitOk : kExitUsage;
}

int cmd_generate(const GeneratorOptions& opt, const std::string& out_path, bool as_json) {
    Report report;
    report.command = "generate";
    auto inst = generate_instance(opt);
    report.fingerprint = fingerprint_hex(inst);
    save_instance(inst, out_path);
    report.payload["file"] = out_path;
    report.payload["vertices"] = inst.n();
    report.payload["edges"] = inst.m();
    report.payload["unique_optimum_certified"] = opt.require_unique;
    report.emit(as_json);
    return kExitOk;
}

template <class Num>
json flow_json(const std::vector<Num>& flow) {
    json arr = json::array();
    for (const auto& x : flow) arr.push_back(num::str(x));
    return arr;
}

template <class Num>
int solve_bp_typed(const GmnfInstance<Num>& inst, const BpStopping& stopping,
                   BeliefConvention convention, TieRule tie, bool dump, Report& report) {
    auto result = run(inst, stopping, convention, tie);
    report.payload["method"] = "bp";
    report.payload["iterations"] = result.iterations;
    report.payload["converged"] = result.converged;
    report.payload["infeasible"] = result.infeasible;
    if (dump) {
        json msgs = json::array();
        for (int e = 0; e < inst.m(); ++e) {
            json je;
            je["edge"] = e;
            json pts = json::array();
            for (const auto& pt : result.state.to_tail[static_cast<std::size_t>(e)].points())
                pts.push_back(json::array({num::str(pt.z), num::str(pt.v)}));
            je["to_tail"] = pts;
            pts = json::array();
            for (const auto& pt : result.state.to_head[static_cast<std::size_t>(e)].points())
                pts.push_back(json::array({num::str(pt.z), num::str(pt.v)}));
            je["to_head"] = pts;
            msgs.push_back(std::move(je));
        }
        report.payload["messages"] = std::move(msgs);
    }
    if (result.infeasible) return kExitInfeasible;
    report.payload["flow"] = flow_json(result.flow);
    report.payload["objective"] = num::str(objective(inst, result.flow));
    bool any_tie = false;
    for (bool t : result.tie) any_tie = any_tie || t;
    report.payload["ties"] = any_tie;
    return result.converged ? kExitOk : kExitNoConvergence;
}

int cmd_solve(const std::string& path, const std::string& method, int iterations, int max_iterations,
              int window, const std::string& convention_name, const std::string& tie_name,
              const std::string& numeric, double tolerance, bool dump, bool as_json) {
    Report report;
    report.command = "solve";
    report.numeric_mode = numeric;
    if (numeric != "rational" && numeric != "float")
        throw UsageError("--numeric must be rational or float");
    if (numeric == "float" && method != "bp")
        throw UsageError("float mode is only available for --method bp");
    num::float_tolerance() = tolerance;

    BpStopping stopping;
    stopping.max_iterations = max_iterations;
    stopping.stable_window = window;
    if (iterations > 0) {
        stopping.mode = BpStopping::Mode::fixed;
        stopping.fixed_n = iterations;
    }
    auto convention =
        convention_name == "paper" ? BeliefConvention::paper : BeliefConvention::count_phi_once;
    TieRule tie = tie_name == "lower"   ? TieRule::lower
                  : tie_name == "upper" ? TieRule::upper
                                        : TieRule::midpoint;

    if (method == "bp" && numeric == "float") {
        auto rational = load_checked(path, report);
        auto inst = instance_cast<double, Rat>(rational);
        int code = solve_bp_typed(inst, stopping, convention, tie, dump, report);
        report.emit(as_json);
        return code;
    }

    auto inst = load_checked(path, report);
    if (method == "bp") {
        int code = solve_bp_typed(inst, stopping, convention, tie, dump, report);
        report.emit(as_json);
        return code;
    }

    if (method == "oracle") {
        auto res = solve_exact(inst);
        report.payload["method"] = "oracle";
        if (res.status != OracleResult::Status::optimal) {
            report.payload["infeasible"] = true;
            report.emit(as_json);
            return kExitInfeasible;
        }
        report.payload["infeasible"] = false;
        report.payload["objective"] = num::str(res.value);
        report.payload["unique"] = res.unique;
        report.payload["flow"] = rat_array(res.optima[0]);
        report.emit(as_json);
        return kExitOk;
    }

    if (method != "both") throw UsageError("--method must be bp, oracle, or both");
    auto oracle = solve_exact(inst);
    int bp_code = solve_bp_typed(inst, stopping, convention, tie, dump, report);
    report.payload["method"] = "both";
    if (oracle.status != OracleResult::Status::optimal) {
        report.payload["oracle_infeasible"] = true;
        report.emit(as_json);
        return kExitInfeasible;
    }
    report.payload["oracle_objective"] = num::str(oracle.value);
    report.payload["oracle_flow"] = rat_array(oracle.optima[0]);
    if (bp_code == kExitOk) {
        bool agree = true;
        Rat max_dev = 0;
        const auto& bp_flow = report.payload["flow"];
        for (int e = 0; e < inst.m(); ++e) {
            Rat b = num::parse<Rat>(bp_flow[static_cast<std::size_t>(e)].get<std::string>());
            Rat dev = abs(b - oracle.optima[0][static_cast<std::size_t>(e)]);
            if (dev > max_dev) max_dev = dev;
            if (dev != 0) agree = false;
        }
        report.payload["agreement"] = agree;
        report.payload["max_deviation"] = num::str(max_dev);
    }
    report.emit(as_json);
    return bp_code;
}

json profile_json(const CostProfile<Rat>& profile, int n) {
    json j;
    j["sigma"] = profile.sigma ? json(num::str(*profile.sigma)) : json("inf");
    j["L"] = num::str(profile.L);
    j["T"] = num::str(profile.T);
    j["cycles"] = profile.cycle_count;
    j["paths"] = profile.path_count;
    j["certify_n"] = certification_bound(profile, n);
    return j;
}

int cmd_analyze(const std::string& path, const std::string& flow_path, bool as_json) {
    Report report;
    report.command = "analyze";
    auto inst = load_checked(path, report);
    std::vector<Rat> x;
    if (!flow_path.empty()) {
        x = load_flow_rational(flow_path, inst.m());
        report.payload["flow_source"] = "file";
    } else {
        auto res = solve_exact(inst);
        if (res.status != OracleResult::Status::optimal) {
            report.payload["infeasible"] = true;
            report.emit(as_json);
            return kExitInfeasible;
        }
        if (!res.unique)
            throw UsageError("optimum is not unique; analyze needs a unique-optimum instance or an "
                             "explicit --flow");
        x = res.optima[0];
        report.payload["flow_source"] = "oracle";
    }
    auto net = build_residual(inst, x);
    auto profile = cost_profile(net);
    if (profile.sigma && num::sign(*profile.sigma) <= 0)
        throw UsageError("sigma <= 0 at the given flow: the optimum cannot be unique");
    report.payload["flow"] = rat_array(x);
    report.payload["profile"] = profile_json(profile, inst.n());
    report.emit(as_json);
    return kExitOk;
}

// Indented dump of the unwrapped tree, one node per line.
void dump_tree(const ComputationTree& tree) {
    std::vector<std::vector<int>> children(tree.nodes.size());
    for (std::size_t node = 2; node < tree.nodes.size(); ++node) {
        int pe = tree.nodes[node].parent_edge;
        const auto& te = tree.edges[static_cast<std::size_t>(pe)];
        int parent = te.tail_node == static_cast<int>(node) ? te.head_node : te.tail_node;
        children[static_cast<std::size_t>(parent)].push_back(static_cast<int>(node));
    }
    auto print_node = [&](auto&& self, int node, int indent) -> void {
        const auto& tn = tree.nodes[static_cast<std::size_t>(node)];
        std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
        std::printf("%snode %d -> v%d (level %d", pad.c_str(), node, tn.base_vertex, tn.level);
        if (tn.parent_edge >= 0)
            std::printf(", via e%d", tree.edges[static_cast<std::size_t>(tn.parent_edge)].base_edge);
        std::printf(")\n");
        for (int child : children[static_cast<std::size_t>(node)]) self(self, child, indent + 1);
    };
    std::printf("root edge e%d = (node 0, node 1), depth %d\n", tree.base_root_edge, tree.depth);
    print_node(print_node, 0, 1);
    print_node(print_node, 1, 1);
}

int cmd_tree_check(const std::string& path, int edge, int depth_lo, int depth_hi, bool dump_trees,
                   bool as_json) {
    Report report;
    report.command = "tree-check";
    auto inst = load_checked(path, report);
    if (depth_lo < 1 || depth_hi < depth_lo) throw UsageError("--depth range must be 1 <= lo <= hi");
    bool all_hold = true;
    json table = json::array();
    for (int e = 0; e < inst.m(); ++e) {
        if (edge >= 0 && e != edge) continue;
        for (int depth = depth_lo; depth <= depth_hi; ++depth) {
            if (dump_trees) dump_tree(build_tree(inst, e, depth));
            auto res = check_lemma3(inst, e, depth);
            json row;
            row["edge"] = e;
            row["depth"] = depth;
            row["holds"] = res.holds;
            row["bp"] = num::str(res.bp_estimate);
            row["tree_lo"] = num::str(res.tree_lo);
            row["tree_hi"] = num::str(res.tree_hi);
            table.push_back(std::move(row));
            all_hold = all_hold && res.holds;
        }
    }
    report.payload["checks"] = std::move(table);
    report.payload["all_hold"] = all_hold;
    report.emit(as_json);
    return all_hold ? kExitOk : kExitNoConvergence;
}

int cmd_certify(const std::string& path, bool as_json) {
    Report report;
    report.command = "certify";
    auto inst = load_checked(path, report);
    auto oracle = solve_exact(inst);
    if (oracle.status != OracleResult::Status::optimal) {
        report.payload["infeasible"] = true;
        report.emit(as_json);
        return kExitInfeasible;
    }
    if (!oracle.unique) throw UsageError("certify requires a unique optimum");
    const auto& optimum = oracle.optima[0];
    auto net = build_residual(inst, optimum);
    auto profile = cost_profile(net);
    if (profile.sigma && num::sign(*profile.sigma) <= 0)
        throw UsageError("sigma(x*) <= 0 despite a unique optimum: inconsistent instance");
    auto bound = certification_bound(profile, inst.n());
    report.payload["profile"] = profile_json(profile, inst.n());
    report.payload["optimum"] = rat_array(optimum);
    report.payload["objective"] = num::str(oracle.value);

    BpStopping stopping;
    stopping.mode = BpStopping::Mode::fixed;
    stopping.fixed_n = static_cast<int>(bound);
    auto bp = run(inst, stopping);
    if (bp.infeasible) {
        report.payload["bp_infeasible"] = true;
        report.emit(as_json);
        return kExitInfeasible;
    }
    report.payload["bp_flow"] = rat_array(bp.flow);
    bool match = bp.flow == optimum;
    report.payload["iterations"] = bp.iterations;
    report.payload["exact_match"] = match;
    report.emit(as_json);
    return match ? kExitOk : kExitNoConvergence;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Belief-propagation solver and analysis toolkit for generalized "
                 "min-cost network flow on ratio-balanced graphs"};
    app.require_subcommand(1);
    app.fallthrough();
    bool as_json = false;
    app.add_flag("--json", as_json, "machine-readable reports");

    std::string path, out_path = "instance.json", flow_path;
    bool bruteforce = false, dump = false;

    auto* validate_cmd = app.add_subcommand("validate", "structural + ratio-balance checks");
    validate_cmd->add_option("file", path)->required();
    validate_cmd->add_flag("--bruteforce", bruteforce, "cross-check by cycle enumeration");

    GeneratorOptions gen;
    std::string cap_range = "1:4", cost_range = "-3:5";
    auto* generate_cmd = app.add_subcommand("generate", "write a random ratio-balanced instance");
    generate_cmd->add_option("-n,--vertices", gen.n)->required();
    generate_cmd->add_option("-m,--edges", gen.m)->required();
    generate_cmd->add_option("--seed", gen.seed);
    generate_cmd->add_option("--cap-range", cap_range, "capacity range lo:hi");
    generate_cmd->add_option("--cost-range", cost_range, "cost range lo:hi");
    generate_cmd->add_flag("--unique", gen.require_unique, "certify a unique optimum");
    generate_cmd->add_option("--max-retries", gen.max_retries);
    generate_cmd->add_flag("--unit", gen.unit_coefficients, "all |a| = 1");
    generate_cmd->add_flag("--tree", gen.tree_only, "acyclic graph (m = n-1)");
    generate_cmd->add_option("-o,--output", out_path);

    std::string method = "bp", convention = "default", tie = "midpoint", numeric = "rational";
    int iterations = 0, max_iterations = 1000, window = 0;
    double tolerance = 1e-9;
    auto* solve_cmd = app.add_subcommand("solve", "decode a flow via BP or the exact oracle");
    solve_cmd->add_option("file", path)->required();
    solve_cmd->add_option("--method", method, "bp | oracle | both");
    solve_cmd->add_option("--iterations", iterations, "fixed iteration count (0 = stable-argmin)");
    solve_cmd->add_option("--max-iterations", max_iterations);
    solve_cmd->add_option("--window", window, "stable-argmin window (default n)");
    solve_cmd->add_option("--belief-convention", convention, "default | paper");
    solve_cmd->add_option("--tie", tie, "midpoint | lower | upper");
    solve_cmd->add_option("--numeric", numeric, "rational | float (float: BP only)");
    solve_cmd->add_option("--tolerance", tolerance, "float-mode comparison tolerance");
    solve_cmd->add_flag("--dump-messages", dump, "dump message breakpoints");

    auto* analyze_cmd = app.add_subcommand("analyze", "sigma, L, T, and the iteration bound");
    analyze_cmd->add_option("file", path)->required();
    analyze_cmd->add_option("--flow", flow_path, "flow file (default: oracle optimum)");

    int edge = -1;
    std::string depth = "1:3";
    bool dump_trees = false;
    auto* tree_cmd = app.add_subcommand("tree-check", "BP vs computation-tree optima");
    tree_cmd->add_option("file", path)->required();
    tree_cmd->add_option("--edge", edge, "edge id (default: all)");
    tree_cmd->add_option("--depth", depth, "N or lo:hi");
    tree_cmd->add_flag("--dump", dump_trees, "print each unwrapped tree");

    auto* certify_cmd = app.add_subcommand("certify", "oracle -> bound -> BP exactness pipeline");
    certify_cmd->add_option("file", path)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        caps();  // surface malformed GMNF_SIZE_CAPS before doing any work
        if (app.got_subcommand(validate_cmd)) return cmd_validate(path, bruteforce, as_json);
        if (app.got_subcommand(generate_cmd)) {
            auto cap = parse_range(cap_range);
            auto cost = parse_range(cost_range);
            gen.capacity_lo = cap.first;
            gen.capacity_hi = cap.second;
            gen.cost_lo = cost.first;
            gen.cost_hi = cost.second;
            return cmd_generate(gen, out_path, as_json);
        }
        if (app.got_subcommand(solve_cmd))
            return cmd_solve(path, method, iterations, max_iterations, window, convention, tie,
                             numeric, tolerance, dump, as_json);
        if (app.got_subcommand(analyze_cmd)) return cmd_analyze(path, flow_path, as_json);
        if (app.got_subcommand(tree_cmd)) {
            int lo = 0, hi = 0;
            auto colon = depth.find(':');
            if (colon != std::string::npos) {
                lo = std::stoi(depth.substr(0, colon));
                hi = std::stoi(depth.substr(colon + 1));
            } else {
                lo = hi = std::stoi(depth);
            }
            return cmd_tree_check(path, edge, lo, hi, dump_trees, as_json);
        }
        if (app.got_subcommand(certify_cmd)) return cmd_certify(path, as_json);
    } catch (const SizeCapError& err) {
        std::cerr << "size cap: " << err.what() << "\n";
        return kExitSizeCap;
    } catch (const UsageError& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kExitUsage;
    } catch (const GenerationError& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
