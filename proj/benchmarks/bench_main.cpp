#include <vshd/export.hpp>
#include <vshd/simulator.hpp>
#include <vshd/stability.hpp>

#include <benchmark/benchmark.h>

#include <sstream>

namespace {

using namespace vshd;

void BM_Simulate(benchmark::State& state) {
	sim::ScenarioConfig cfg;
	cfg.params.b = 0.3;
	cfg.profile = sim::SuddenStop{};
	cfg.scheme = state.range(0) == 0 ? sim::Scheme::Euler : sim::Scheme::RK4;
	for (auto _ : state) benchmark::DoNotOptimize(sim::run(cfg));
}
BENCHMARK(BM_Simulate)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_TrajectoryCsv(benchmark::State& state) {
	sim::ScenarioConfig cfg;
	cfg.profile = sim::RandomFluctuation{};
	const auto rec = sim::run(cfg);
	for (auto _ : state) {
		std::ostringstream out;
		io::write_trajectory_csv(rec, out);
		benchmark::DoNotOptimize(out.str().size());
	}
}
BENCHMARK(BM_TrajectoryCsv)->Unit(benchmark::kMillisecond);

void BM_HinfSweep(benchmark::State& state) {
	stability::SweepOptions opts;
	opts.n_samples = static_cast<std::size_t>(state.range(0));
	for (auto _ : state) benchmark::DoNotOptimize(stability::hinf_satisfied(2.0, 5.0, 0.9, -0.4, opts));
}
BENCHMARK(BM_HinfSweep)->Arg(256)->Arg(2048)->Arg(16384);

void BM_NeutralSurfaceMesh(benchmark::State& state) {
	model::ModelParams p;
	p.b = 0.3;
	std::vector<double> v, dx;
	for (int k = 0; k < 100; ++k) v.push_back(0.5 + 0.19 * k);
	for (int k = 0; k < 100; ++k) dx.push_back(0.3 * k);
	for (auto _ : state) {
		benchmark::DoNotOptimize(stability::neutral_surface(p, v, stability::MeshDx{dx}, stability::ProportionalLambda{1.0}));
	}
}
BENCHMARK(BM_NeutralSurfaceMesh);

void BM_Equilibrium(benchmark::State& state) {
	model::ModelParams p;
	p.b = 0.3;
	double v = 1.0;
	for (auto _ : state) {
		benchmark::DoNotOptimize(stability::equilibrium(v, p));
		v = v > 18.0 ? 1.0 : v + 0.37;
	}
}
BENCHMARK(BM_Equilibrium);

}  // namespace

BENCHMARK_MAIN();
