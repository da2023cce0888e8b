// Command-line front end: instance/valuation generation, solving,
// verification, brute-force oracle runs and batch sweeps.
//
// Exit codes: 0 success, 1 check failed / infeasible parameters,
// 2 no applicable regime, 3 internal invariant breach, 4 parse error.

#include <cstdlib>
#include <future>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "efx/generate.hpp"
#include "efx/io.hpp"
#include "efx/verify.hpp"

namespace {

using namespace efx;

std::uint64_t effective_seed(std::uint64_t cli_seed) {
    if (const char* env = std::getenv("EFX_SEED")) return std::strtoull(env, nullptr, 10);
    return cli_seed;
}

struct LoadedProblem {
    MultigraphInstance inst;
    ValuationProfile profile;
};

LoadedProblem load_problem(const std::string& instance_path, const std::string& valuation_path) {
    RawInstance raw = parse_instance(read_file(instance_path));
    LoadedProblem p{build_instance(raw.n, raw.edges), {}};
    p.profile = parse_valuation(read_file(valuation_path), p.inst);
    return p;
}

std::optional<Regime> regime_flag(const std::string& name) {
    if (name.empty()) return std::nullopt;
    return regime_of(family_from_name(name));
}

int cmd_gen(const std::string& family_name_arg, const GenParams& params, std::uint64_t seed,
            const std::string& vals, Value scale, const std::string& out_prefix) {
    Family family = family_from_name(family_name_arg);
    MultigraphInstance inst = generate_instance(family, params, seed);
    ValuationProfile profile =
        generate_valuation(inst, valuation_family_from_name(vals), seed, scale);
    write_file(out_prefix + ".instance", write_instance(inst));
    write_file(out_prefix + ".valuation", write_valuation(profile, inst));
    std::cout << "wrote " << out_prefix << ".instance (" << inst.n << " vertices, "
              << inst.real_edge_count << " edges) and " << out_prefix << ".valuation\n";
    return 0;
}

int cmd_solve(const std::string& instance_path, const std::string& valuation_path,
              const std::string& forced, const std::string& out_path,
              const std::string& trace_path) {
    LoadedProblem p = load_problem(instance_path, valuation_path);
    AuditReport audit = audit_monotone(p.profile, p.inst);
    if (!audit.violations.empty()) {
        const auto& v = audit.violations.front();
        std::cerr << "valuation audit failed: vertex " << v.vertex << " has v(S) = "
                  << v.value_subset << " > v(T) = " << v.value_superset << "\n";
        return 1;
    }
    SolveResult result = solve(p.profile, p.inst, regime_flag(forced));
    std::string alloc_text = write_allocation(result.allocation);
    if (!out_path.empty())
        write_file(out_path, alloc_text);
    else
        std::cout << alloc_text;
    if (!trace_path.empty()) write_file(trace_path, write_trace(result.trace));
    std::cerr << "solved via " << regime_name(result.trace.regime) << " regime; "
              << result.parked << " bundle(s) parked in step 3\n";
    return 0;
}

int cmd_verify(const std::string& instance_path, const std::string& valuation_path,
               const std::string& allocation_path, const std::string& trace_path) {
    LoadedProblem p = load_problem(instance_path, valuation_path);
    VerifyReport report;
    if (!allocation_path.empty()) {
        auto allocation = parse_allocation(read_file(allocation_path), p.inst.n);
        report = verify_allocation(p.profile, p.inst, allocation);
    } else {
        ParsedTrace trace = parse_trace(read_file(trace_path));
        report = audit_trace(p.profile, p.inst, trace);
    }
    for (const std::string& line : report.lines) std::cout << line << "\n";
    std::cout << (report.pass ? "VERIFY PASS" : "VERIFY FAIL") << "\n";
    return report.pass ? 0 : 1;
}

int cmd_oracle(const std::string& instance_path, const std::string& valuation_path, long long cap,
               int jobs, const std::string& check_path) {
    LoadedProblem p = load_problem(instance_path, valuation_path);
    OracleResult oracle = brute_force_efx(p.profile, p.inst, cap, jobs);
    if (oracle.capped) {
        std::cerr << "oracle refused: n^m exceeds the cap " << cap << "\n";
        return 1;
    }
    std::cout << "enumerated " << oracle.enumerated << " complete allocations, "
              << oracle.efx_owner_vectors.size() << " EFX\n";
    if (!check_path.empty()) {
        auto allocation = parse_allocation(read_file(check_path), p.inst.n);
        std::vector<VertexId> owners = owners_of(p.inst, allocation);
        bool member = std::count(oracle.efx_owner_vectors.begin(), oracle.efx_owner_vectors.end(),
                                 owners) > 0;
        std::cout << "allocation " << (member ? "is" : "is NOT") << " in the oracle's EFX set\n";
        return member ? 0 : 1;
    }
    return 0;
}

struct SweepRow {
    bool failed = false;
    std::string error;
    std::string line;
    bool status_efx = false;
};

int cmd_sweep(const std::string& family_arg, const std::string& n_list, int seeds,
              std::uint64_t seed0, const std::string& vals, Value scale, int mult, int neighbors,
              int jobs, const std::string& out_path) {
    Family family = family_from_name(family_arg);
    std::vector<int> sizes;
    {
        std::istringstream in(n_list);
        std::string tok;
        while (std::getline(in, tok, ',')) sizes.push_back(std::stoi(tok));
    }
    struct Task {
        int n;
        std::uint64_t seed;
        ValuationFamily vfam;
    };
    std::vector<Task> tasks;
    for (int n : sizes)
        for (int s = 0; s < seeds; ++s) {
            ValuationFamily vfam = vals == "additive"   ? ValuationFamily::Additive
                                   : vals == "monotone" ? ValuationFamily::Monotone
                                   : (s % 2 == 0 ? ValuationFamily::Additive
                                                 : ValuationFamily::Monotone);
            tasks.push_back({n, seed0 + static_cast<std::uint64_t>(s), vfam});
        }

    auto run_task = [&](const Task& task) {
        SweepRow row;
        try {
            GenParams params;
            params.n = task.n;
            params.max_multiplicity = mult;
            params.neighbors = neighbors > 0 ? neighbors : std::max(1, task.n / 4);
            MultigraphInstance inst = generate_instance(family, params, task.seed);
            ValuationProfile profile = generate_valuation(inst, task.vfam, task.seed, scale);
            SolveResult result = solve(profile, inst);
            VerifyReport check = verify_allocation(profile, inst, result.allocation);
            row.status_efx = check.pass;
            const StageSnapshot& initial = result.trace.stages.at(1);
            int envied_step1 =
                envy_report(profile, initial.table, initial.state).envied_count();
            std::ostringstream line;
            line << regime_name(result.trace.regime) << "," << task.n << ","
                 << inst.real_edge_count << "," << task.seed << ","
                 << valuation_family_name(task.vfam) << "," << envied_step1 << ","
                 << result.step2.envied_rounds << "," << result.parked << ","
                 << (check.pass ? "EFX" : "FAIL");
            row.line = line.str();
            if (!check.pass) {
                row.failed = true;
                row.error = "verification failed";
            }
        } catch (const std::exception& err) {
            row.failed = true;
            row.error = err.what();
        }
        return row;
    };

    std::vector<SweepRow> rows(tasks.size());
    if (jobs <= 1) {
        for (std::size_t k = 0; k < tasks.size(); ++k) rows[k] = run_task(tasks[k]);
    } else {
        std::vector<std::future<SweepRow>> futures;
        for (const Task& task : tasks)
            futures.push_back(std::async(std::launch::async, run_task, task));
        for (std::size_t k = 0; k < tasks.size(); ++k) rows[k] = futures[k].get();
    }

    std::string csv = "regime,n,m,seed,vals,envied_step1,step2_rounds,parked,status\n";
    int solved = 0;
    for (std::size_t k = 0; k < rows.size(); ++k) {
        if (rows[k].failed) {
            std::cerr << "sweep aborted: seed " << tasks[k].seed << " (n=" << tasks[k].n
                      << "): " << rows[k].error << "\n";
            return 3;  // a failing accepted instance means a solver defect, not bad input
        }
        csv += rows[k].line + "\n";
        solved++;
    }
    if (solved > 0) csv += "# total " + std::to_string(solved) + " instances, all EFX\n";
    write_file(out_path, csv);
    std::cout << "wrote " << out_path << " (" << solved << " rows)\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Complete EFX allocations on multigraphs"};
    app.require_subcommand(1);

    // gen
    std::string gen_family, gen_vals = "additive", gen_out = "efx";
    GenParams gen_params;
    std::uint64_t gen_seed = 1;
    long long gen_scale = 12;
    auto* gen = app.add_subcommand("gen", "generate an instance and valuation file");
    gen->add_option("family", gen_family, "bipartite|bounded|girth6")->required();
    gen->add_option("--n", gen_params.n, "vertex count");
    gen->add_option("--mult", gen_params.max_multiplicity, "max parallel edges per pair");
    gen->add_option("--neighbors", gen_params.neighbors, "neighbor cap (bounded family)");
    gen->add_option("--max-edges", gen_params.max_edges, "real edge budget");
    gen->add_option("--seed", gen_seed, "generation seed (EFX_SEED overrides)");
    gen->add_option("--vals", gen_vals, "additive|monotone");
    gen->add_option("--scale", gen_scale, "value scale");
    gen->add_option("--out", gen_out, "output path prefix");

    // solve
    std::string solve_instance, solve_valuation, solve_regime, solve_out, solve_trace;
    auto* solve_cmd = app.add_subcommand("solve", "compute a complete EFX allocation");
    solve_cmd->add_option("instance", solve_instance)->required();
    solve_cmd->add_option("valuation", solve_valuation)->required();
    solve_cmd->add_option("--regime", solve_regime, "force bipartite|bounded|girth6");
    solve_cmd->add_option("--out", solve_out, "allocation output file (default stdout)");
    solve_cmd->add_option("--trace", solve_trace, "write the pipeline trace here");

    // verify
    std::string verify_instance, verify_valuation, verify_allocation_path, verify_trace_path;
    auto* verify_cmd = app.add_subcommand("verify", "re-check an allocation or audit a trace");
    verify_cmd->add_option("instance", verify_instance)->required();
    verify_cmd->add_option("valuation", verify_valuation)->required();
    auto* opt_alloc = verify_cmd->add_option("--allocation", verify_allocation_path);
    auto* opt_trace = verify_cmd->add_option("--trace", verify_trace_path);
    opt_alloc->excludes(opt_trace);

    // oracle
    std::string oracle_instance, oracle_valuation, oracle_check;
    long long oracle_cap = kDefaultOracleCap;
    int oracle_jobs = 1;
    auto* oracle_cmd = app.add_subcommand("oracle", "enumerate all complete EFX allocations");
    oracle_cmd->add_option("instance", oracle_instance)->required();
    oracle_cmd->add_option("valuation", oracle_valuation)->required();
    oracle_cmd->add_option("--cap", oracle_cap, "refuse when n^m exceeds this");
    oracle_cmd->add_option("--jobs", oracle_jobs, "parallel workers");
    oracle_cmd->add_option("--check", oracle_check, "test membership of this allocation file");

    // sweep
    std::string sweep_family, sweep_sizes = "4,6,8", sweep_vals = "both", sweep_out = "sweep.csv";
    int sweep_seeds = 20, sweep_mult = 3, sweep_neighbors = 0, sweep_jobs = 1;
    std::uint64_t sweep_seed = 1;
    long long sweep_scale = 12;
    auto* sweep_cmd = app.add_subcommand("sweep", "batch-solve a family and write a CSV report");
    sweep_cmd->add_option("family", sweep_family, "bipartite|bounded|girth6")->required();
    sweep_cmd->add_option("--sizes", sweep_sizes, "comma-separated vertex counts");
    sweep_cmd->add_option("--seeds", sweep_seeds, "seeds per size");
    sweep_cmd->add_option("--seed", sweep_seed, "base seed (EFX_SEED overrides)");
    sweep_cmd->add_option("--vals", sweep_vals, "additive|monotone|both");
    sweep_cmd->add_option("--scale", sweep_scale, "value scale");
    sweep_cmd->add_option("--mult", sweep_mult, "max parallel edges per pair");
    sweep_cmd->add_option("--neighbors", sweep_neighbors, "neighbor cap (bounded family)");
    sweep_cmd->add_option("--jobs", sweep_jobs, "parallel workers");
    sweep_cmd->add_option("--out", sweep_out, "CSV output path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed())
            return cmd_gen(gen_family, gen_params, effective_seed(gen_seed), gen_vals, gen_scale,
                           gen_out);
        if (solve_cmd->parsed())
            return cmd_solve(solve_instance, solve_valuation, solve_regime, solve_out, solve_trace);
        if (verify_cmd->parsed()) {
            if (verify_allocation_path.empty() && verify_trace_path.empty()) {
                std::cerr << "verify needs --allocation or --trace\n";
                return 1;
            }
            return cmd_verify(verify_instance, verify_valuation, verify_allocation_path,
                              verify_trace_path);
        }
        if (oracle_cmd->parsed())
            return cmd_oracle(oracle_instance, oracle_valuation, oracle_cap, oracle_jobs,
                              oracle_check);
        if (sweep_cmd->parsed())
            return cmd_sweep(sweep_family, sweep_sizes, sweep_seeds, effective_seed(sweep_seed),
                             sweep_vals, sweep_scale, sweep_mult, sweep_neighbors, sweep_jobs,
                             sweep_out);
    } catch (const ParseError& err) {
        std::cerr << "parse error: " << err.what() << "\n";
        return 4;
    } catch (const RegimeError& err) {
        std::cerr << "no regime: " << err.what() << "\n";
        return 2;
    } catch (const InvariantError& err) {
        std::cerr << "internal invariant breach: " << err.what() << "\n";
        return 3;
    } catch (const InputError& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    }
    return 0;
}
