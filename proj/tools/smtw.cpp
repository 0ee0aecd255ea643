#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "smtw/fpt.hpp"
#include "smtw/formats.hpp"
#include "smtw/gale_shapley.hpp"
#include "smtw/oracle.hpp"
#include "smtw/random_instance.hpp"
#include "smtw/reductions.hpp"
#include "smtw/report.hpp"
#include "smtw/rotations.hpp"
#include "smtw/selftest.hpp"
#include "smtw/treedec.hpp"
#include "smtw/xp.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

using namespace smtw;

NiceTreeDecomposition decomposition_for(const Graph& g, const std::string& td_file) {
    TreeDecomposition td;
    if (td_file.empty()) {
        td = min_fill_decomposition(g);
    } else {
        td = read_td_file(td_file);
    }
    return make_nice(td, g);
}

int cmd_solve(const std::string& problem, const std::string& method,
              const std::string& instance_file, const std::string& td_file,
              const std::string& graph_sel, bool want_witness, bool parallel,
              std::uint64_t seed) {
    Instance inst = read_instance_file(instance_file);
    Objective obj = objective_from_name(problem);
    SolveReport rep;

    if (method == "oracle") {
        OracleResult res = oracle_optimum(inst, obj);
        rep.objective = problem;
        rep.method = "oracle";
        rep.optimum = res.optimum;
        rep.pair_set = res.pair_set;
        if (want_witness) rep.witness = res.witness;
    } else if (method == "gs") {
        Matching mu = inst.has_ties() ? stable_with_tiebreak(inst, seed)
                                      : man_optimal(inst);
        Scores sc = score(inst, mu);
        rep.objective = problem;
        rep.method = "gs";
        switch (obj) {
            case Objective::Sesm: rep.optimum = std::abs(sc.delta); break;
            case Objective::Bsm: rep.optimum = sc.bal; break;
            case Objective::MaxSmt:
            case Objective::MinSmt: rep.optimum = sc.size; break;
            case Objective::Gsm: rep.pair_set = {{sc.sat_m, sc.sat_w}}; break;
        }
        if (want_witness) rep.witness = mu;
    } else if (method == "xp") {
        if (obj == Objective::Gsm)
            throw ValidationError("gsm is solved by --method fpt or oracle");
        if (graph_sel == "rotation")
            throw ValidationError("--method xp works on the primal graph");
        auto ntd = decomposition_for(primal_graph(inst), td_file);
        XpOptions opt;
        opt.want_witness = want_witness;
        rep = xp_solve(inst, ntd, obj, opt);
        if (!want_witness) rep.witness.reset();
    } else if (method == "fpt") {
        if (graph_sel == "primal")
            throw ValidationError("--method fpt works on the rotation digraph");
        RotationStructure rs = build_rotation_structure(inst);
        auto ntd = decomposition_for(rotation_graph(rs), td_file);
        FptOptions opt;
        opt.want_witness = want_witness;
        opt.parallel = parallel;
        switch (obj) {
            case Objective::Sesm: rep = fpt_solve_sesm(inst, rs, ntd, opt); break;
            case Objective::Bsm: rep = fpt_solve_bsm(inst, rs, ntd, opt); break;
            case Objective::Gsm: rep = fpt_solve_gsm(inst, rs, ntd, opt); break;
            default:
                throw ValidationError("--method fpt supports sesm, bsm and gsm only");
        }
        if (!want_witness) rep.witness.reset();
    } else {
        throw ValidationError("unknown method: " + method);
    }
    std::cout << report_to_json(rep) << "\n";
    return 0;
}

int cmd_rotations(const std::string& instance_file, bool dot, const std::string& out) {
    Instance inst = read_instance_file(instance_file);
    RotationStructure rs = build_rotation_structure(inst);
    std::string text;
    if (dot) {
        text = rotation_dot(rs);
    } else {
        std::ostringstream os;
        os << "rotations " << rs.num_rotations() << "\n";
        for (const auto& rot : rs.rotations) {
            os << "r" << rot.id << " :";
            for (auto [m, w] : rot.cycle) os << " (" << m + 1 << "," << w + 1 << ")";
            os << "\n";
        }
        for (int a = 0; a < rs.num_rotations(); ++a)
            for (int b : rs.arcs[a]) os << "r" << a << " -> r" << b << "\n";
        text = os.str();
    }
    if (out.empty())
        std::cout << text;
    else
        write_text_file(out, text);
    return 0;
}

int cmd_decompose(const std::string& instance_file, const std::string& graph_sel,
                  const std::string& out) {
    Instance inst = read_instance_file(instance_file);
    Graph g;
    if (graph_sel == "rotation") {
        RotationStructure rs = build_rotation_structure(inst);
        g = rotation_graph(rs);
    } else {
        g = primal_graph(inst);
    }
    TreeDecomposition td = min_fill_decomposition(g);
    validate(td, g);
    std::string text = format_td(td);
    if (out.empty())
        std::cout << text;
    else
        write_text_file(out, text);
    return 0;
}

ReductionOutput run_generator(const std::string& kind, const std::string& input,
                              const std::string& partition_file, int block_size,
                              const CliqueSpacers& csp, const SatSpacers& ssp) {
    if (kind.rfind("clique-", 0) == 0) {
        Graph g = read_graph_file(input);
        if (partition_file.empty())
            throw ValidationError("clique reductions need --partition");
        CliqueInput in = CliqueInput::make(g, read_partition_file(partition_file));
        if (kind == "clique-sesm") return reduce_clique_to_sesm(in, csp);
        if (kind == "clique-bsm") return reduce_clique_to_bsm(in, csp);
        if (kind == "clique-maxsmt") return reduce_clique_to_max_smt(in);
        if (kind == "clique-minsmt") return reduce_clique_to_min_smt(in);
    } else if (kind.rfind("sat-", 0) == 0) {
        SatInput in = SatInput::make(read_dimacs_file(input), block_size);
        if (kind == "sat-sesm") return reduce_sat_to_sesm(in, ssp);
        if (kind == "sat-bsm") return reduce_sat_to_bsm(in, ssp);
    }
    throw ValidationError("unknown reduction kind: " + kind);
}

int cmd_fuzz(int max_side, int trials, std::uint64_t seed, bool ties, bool parallel) {
    int failures = 0;
    std::vector<std::string> errors;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (parallel)
#endif
    for (int t = 0; t < trials; ++t) {
        auto err = ties ? equivalence_trial_tied(seed + t, max_side)
                        : equivalence_trial_strict(seed + t, max_side);
        if (err) {
#ifdef _OPENMP
#pragma omp critical
#endif
            {
                ++failures;
                if (errors.size() < 10) errors.push_back(*err);
            }
        }
    }
    std::cout << "fuzz: " << trials - failures << "/" << trials << " trials passed\n";
    for (const auto& e : errors) std::cout << "  " << e << "\n";
    return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Treewidth solvers for hard stable-marriage optimization"};
    app.require_subcommand(1);

    std::string problem = "sesm", method = "oracle", instance_file, td_file,
                graph_sel, out_file, meta_file, kind, input_file, partition_file;
    bool witness = false, dot = false, parallel = false, relaxed = true;
    std::uint64_t seed = 1;
    int trials = 100, max_side = 6, block_size = 1;
    bool ties = false;
    CliqueSpacers csp;
    SatSpacers ssp;

    auto* solve = app.add_subcommand("solve", "solve one objective on an instance");
    solve->add_option("--problem", problem, "sesm|bsm|max-smt|min-smt|gsm")->required();
    solve->add_option("--method", method, "xp|fpt|oracle|gs")->required();
    solve->add_option("--instance", instance_file)->required();
    solve->add_option("--td", td_file, "external .td decomposition");
    solve->add_option("--graph", graph_sel, "primal|rotation (defaulted by method)");
    solve->add_flag("--witness", witness, "emit the witness matching");
    solve->add_flag("--parallel", parallel, "OpenMP state-parallel tables");
    solve->add_option("--seed", seed, "tie-break seed for --method gs");

    auto* rot = app.add_subcommand("rotations", "rotation structure of an instance");
    rot->add_option("--instance", instance_file)->required();
    rot->add_flag("--dot", dot, "emit DOT");
    rot->add_option("--out", out_file);

    auto* dec = app.add_subcommand("decompose", "min-fill tree decomposition");
    dec->add_option("--instance", instance_file)->required();
    dec->add_option("--graph", graph_sel, "primal|rotation");
    dec->add_option("--out", out_file);

    auto* gen = app.add_subcommand("generate", "emit a hardness-reduction instance");
    gen->add_option("--kind", kind,
                    "clique-sesm|clique-bsm|clique-maxsmt|clique-minsmt|sat-sesm|sat-bsm")
        ->required();
    gen->add_option("--input", input_file, "edge-list graph or DIMACS CNF")->required();
    gen->add_option("--partition", partition_file, "color classes (clique kinds)");
    gen->add_option("--block-size", block_size, "clauses per block (sat kinds)");
    gen->add_option("--s10", csp.s10);
    gen->add_option("--s20", csp.s20);
    gen->add_option("--s30", csp.s30);
    gen->add_option("--s40", csp.s40);
    gen->add_option("--happy-mult", csp.happy_mult);
    gen->add_option("--scale", ssp.scale);
    gen->add_option("--tau", ssp.tau);
    gen->add_flag("--relaxed,!--strict", relaxed, "relaxed spacer magnitudes");
    gen->add_option("--out", out_file, "instance file to write")->required();
    gen->add_option("--meta", meta_file, "side-car metadata file");

    auto* ver = app.add_subcommand("verify-reduction", "generate and verify structurally");
    ver->add_option("--kind", kind)->required();
    ver->add_option("--input", input_file)->required();
    ver->add_option("--partition", partition_file);
    ver->add_option("--block-size", block_size);
    ver->add_option("--s10", csp.s10);
    ver->add_option("--s20", csp.s20);
    ver->add_option("--s30", csp.s30);
    ver->add_option("--s40", csp.s40);
    ver->add_option("--happy-mult", csp.happy_mult);
    ver->add_option("--scale", ssp.scale);
    ver->add_option("--tau", ssp.tau);
    ver->add_flag("--relaxed,!--strict", relaxed);

    auto* fuzz = app.add_subcommand("fuzz", "randomized oracle-equivalence suite");
    fuzz->add_option("--n", max_side, "max agents per side");
    fuzz->add_option("--trials", trials);
    fuzz->add_option("--seed", seed);
    fuzz->add_flag("--ties", ties, "tied instances (max/min-SMT suite)");
    fuzz->add_flag("--parallel", parallel);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        csp.relaxed = relaxed;
        if (solve->parsed())
            return cmd_solve(problem, method, instance_file, td_file, graph_sel, witness,
                             parallel, seed);
        if (rot->parsed()) return cmd_rotations(instance_file, dot, out_file);
        if (dec->parsed()) return cmd_decompose(instance_file, graph_sel, out_file);
        if (gen->parsed()) {
            ReductionOutput out = run_generator(kind, input_file, partition_file,
                                                block_size, csp, ssp);
            write_text_file(out_file, format_instance(out.instance));
            if (!meta_file.empty()) write_text_file(meta_file, reduction_metadata(out));
            std::cout << "wrote " << out_file << " (" << out.instance.total_agents()
                      << " agents)\n";
            return 0;
        }
        if (ver->parsed()) {
            ReductionOutput out = run_generator(kind, input_file, partition_file,
                                                block_size, csp, ssp);
            VerificationReport rep = verify_reduction(out);
            std::cout << verification_to_json(rep) << "\n";
            return rep.all_passed() ? 0 : 1;
        }
        if (fuzz->parsed()) return cmd_fuzz(max_side, trials, seed, ties, parallel);
    } catch (const GuardExceeded& e) {
        std::cerr << "guard exceeded: " << e.what() << "\n";
        return 3;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
