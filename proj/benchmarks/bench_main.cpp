#include <benchmark/benchmark.h>

#include "spin1bell/analyzer.hpp"
#include "spin1bell/bell.hpp"
#include "spin1bell/experiment.hpp"
#include "spin1bell/linalg.hpp"
#include "spin1bell/noisevis.hpp"
#include "spin1bell/optimizer.hpp"
#include "spin1bell/qstate.hpp"

using namespace spin1bell;

static void BM_JointProbabilitiesPure(benchmark::State& state)
{
    const JointState singlet = make_spin1_singlet();
    double angle = 0.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(joint_probabilities(singlet, angle, angle + 11.25));
        angle += 0.1;
    }
}
BENCHMARK(BM_JointProbabilitiesPure);

static void BM_JointProbabilitiesMixed(benchmark::State& state)
{
    const JointState noisy = make_noisy_state(0.69);
    double angle = 0.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(joint_probabilities(noisy, angle, angle + 11.25));
        angle += 0.1;
    }
}
BENCHMARK(BM_JointProbabilitiesMixed);

static void BM_Chsh(benchmark::State& state)
{
    const JointState noisy = make_noisy_state(0.69);
    const BellSettings settings{-16.0, 4.0, -6.0, 14.0};
    for (auto _ : state) benchmark::DoNotOptimize(chsh(noisy, settings));
}
BENCHMARK(BM_Chsh);

static void BM_LhvMax(benchmark::State& state)
{
    for (auto _ : state) benchmark::DoNotOptimize(lhv_max());
}
BENCHMARK(BM_LhvMax);

static void BM_Visibility(benchmark::State& state)
{
    for (auto _ : state) benchmark::DoNotOptimize(visibility(0.69));
}
BENCHMARK(BM_Visibility);

static void BM_OptimizeSymmetric(benchmark::State& state)
{
    for (auto _ : state) benchmark::DoNotOptimize(optimize_symmetric(0.69));
}
BENCHMARK(BM_OptimizeSymmetric);

static void BM_OptimizeFree(benchmark::State& state)
{
    const JointState noisy = make_noisy_state(0.69);
    for (auto _ : state) benchmark::DoNotOptimize(optimize_free(noisy));
}
BENCHMARK(BM_OptimizeFree);

static void BM_EigenvaluesHermitian(benchmark::State& state)
{
    const linalg::Matrix9 rho = make_noisy_state(0.69).density_matrix();
    for (auto _ : state)
        benchmark::DoNotOptimize(linalg::eigenvalues_hermitian(rho));
}
BENCHMARK(BM_EigenvaluesHermitian);

static void BM_SimulateCounts(benchmark::State& state)
{
    ExperimentConfig cfg;
    for (auto _ : state) {
        benchmark::DoNotOptimize(simulate_counts(cfg));
        ++cfg.seed;
    }
}
BENCHMARK(BM_SimulateCounts);

static void BM_EstimateBell(benchmark::State& state)
{
    const ExperimentConfig cfg;
    const CountTable table = simulate_counts(cfg);
    for (auto _ : state)
        benchmark::DoNotOptimize(estimate_bell(table, cfg.det));
}
BENCHMARK(BM_EstimateBell);

BENCHMARK_MAIN();
