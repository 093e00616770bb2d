#include <benchmark/benchmark.h>

#include "poroflow/barus_direct.hpp"
#include "poroflow/darcy_linear.hpp"
#include "poroflow/geometry.hpp"

using namespace poroflow;

namespace {

// Reference reservoir fluid, refined by a factor taken from the benchmark range.
struct Setup {
    explicit Setup(std::int64_t refine, double p_inj)
        : mesh(make_reservoir_mesh({100.0, 30.0, 0.2, static_cast<std::size_t>(10 * refine),
                                    static_cast<std::size_t>(3 * refine)})),
          K(PermeabilityField::uniform(*mesh, 1e-12)),
          bcs(reservoir_bcs(p_inj, 101325.0)) {}

    MeshPtr mesh;
    FluidModel fluid;
    PermeabilityField K;
    BoundarySpec bcs;
};

void BM_Assemble(benchmark::State& state) {
    Setup s(state.range(0), 10.0 * 101325.0);
    const MobilityField mobility = transformed_mobility(*s.mesh, s.K, s.fluid, {});
    for (auto _ : state) benchmark::DoNotOptimize(assemble(s.mesh, mobility, s.bcs));
    state.counters["nodes"] = static_cast<double>(s.mesh->node_count());
}

void BM_HopfCole(benchmark::State& state) {
    Setup s(state.range(0), static_cast<double>(state.range(1)) * 101325.0);
    for (auto _ : state) benchmark::DoNotOptimize(solve_transformed_bvp(s.mesh, s.fluid, {}, s.K, s.bcs));
    state.counters["nodes"] = static_cast<double>(s.mesh->node_count());
}

void BM_Picard(benchmark::State& state) {
    Setup s(state.range(0), static_cast<double>(state.range(1)) * 101325.0);
    std::size_t iterations = 0;
    for (auto _ : state) {
        auto r = picard_solve(s.mesh, s.fluid, {}, s.K, s.bcs);
        iterations = r.iterations;
        benchmark::DoNotOptimize(r);
    }
    state.counters["nodes"] = static_cast<double>(s.mesh->node_count());
    state.counters["picard_iterations"] = static_cast<double>(iterations);
}

}  // namespace

BENCHMARK(BM_Assemble)->Arg(2)->Arg(5)->Arg(10)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_HopfCole)->ArgsProduct({{2, 5, 10}, {10, 10000}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Picard)->ArgsProduct({{2, 5, 10}, {10, 10000}})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
