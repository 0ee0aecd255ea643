// Times the FPT table computation with serial vs OpenMP state loops on a
// family of instances whose rotation-graph width spans 1..6.
#include <chrono>
#include <cstdio>
#include <vector>

#include "smtw/fpt.hpp"
#include "smtw/reductions.hpp"
#include "smtw/rotations.hpp"
#include "smtw/treedec.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace smtw;

namespace {

double run_once(const Instance& inst, const RotationStructure& rs,
                const NiceTreeDecomposition& ntd, bool parallel) {
    FptOptions opt;
    opt.parallel = parallel;
    opt.want_witness = false;
    auto t0 = std::chrono::steady_clock::now();
    fpt_solve_gsm(inst, rs, ntd, opt);
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                     t0)
        .count();
}

struct Family {
    int num_vars;
    int block;
    std::vector<std::vector<int>> clauses;
};

}  // namespace

int main(int argc, char** argv) {
    int reps = argc > 1 ? std::atoi(argv[1]) : 3;
#ifdef _OPENMP
    std::printf("openmp threads: %d\n", omp_get_max_threads());
#else
    std::printf("built without openmp; parallel runs fall back to serial\n");
#endif
    // Rotation-graph widths 1..6 (same family the acceptance suite pins),
    // plus two wider members to give the parallel loop something to chew on.
    std::vector<Family> family = {
        {2, 2, {{1, 2}, {-1, -2}}},          {2, 1, {{1, 2}}},
        {3, 2, {{1, 2, 3}, {-1, -2}}},       {3, 2, {{1, 2}, {2, 3}}},
        {3, 2, {{1, 2, 3}, {-1, -2, -3}}},   {3, 1, {{-1, 2, 3}}},
        {4, 2, {{1, 2}, {3, 4}}},            {4, 1, {{-1, 2, 3, 4}}},
    };
    std::printf("%6s %7s %6s %10s %12s %12s %8s\n", "width", "agents", "rots", "states",
                "serial-ms", "openmp-ms", "speedup");
    for (const auto& fam : family) {
        CnfFormula f;
        f.num_vars = fam.num_vars;
        f.clauses = fam.clauses;
        SatSpacers sp;
        sp.scale = 2;
        sp.tau = 1;
        ReductionOutput out = reduce_sat_to_sesm(SatInput::make(f, fam.block), sp);
        const Instance& inst = out.instance;
        RotationStructure rs = build_rotation_structure(inst);
        Graph gpi = rotation_graph(rs);
        TreeDecomposition td = min_fill_decomposition(gpi);
        NiceTreeDecomposition ntd = make_nice(td, gpi);
        FptOptions probe_opt;
        probe_opt.want_witness = false;
        auto probe = fpt_solve_gsm(inst, rs, ntd, probe_opt);
        double serial = 1e18, par = 1e18;
        for (int r = 0; r < reps; ++r) {
            serial = std::min(serial, run_once(inst, rs, ntd, false));
            par = std::min(par, run_once(inst, rs, ntd, true));
        }
        std::printf("%6d %7d %6d %10lld %12.3f %12.3f %8.2f\n", td.width(),
                    inst.total_agents(), rs.num_rotations(),
                    (long long)probe.stats.states, serial, par, serial / par);
    }
    return 0;
}
