#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "squeezelab/extreme.hpp"
#include "squeezelab/lg.hpp"
#include "squeezelab/oracle.hpp"
#include "squeezelab/ssi.hpp"
#include "squeezelab/states.hpp"

using namespace sqz;

namespace {

LgParams reference_lg() {
    LgParams p;
    p.gauss.n_atoms = 2e6;
    p.gauss.n_photons = 5e8;
    p.gauss.g = 1e-7;
    p.gauss.eta = 0.5e-9;
    p.gauss.j_atom = 1.0;
    return p;
}

void BM_FCurve(benchmark::State& st) {
    const double J = st.range(0) / 2.0;
    for (auto _ : st) benchmark::DoNotOptimize(f_curve(J));
}
BENCHMARK(BM_FCurve)->Arg(2)->Arg(8)->Arg(40)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_FDual(benchmark::State& st) {
    const double J = static_cast<double>(st.range(0));
    for (auto _ : st) benchmark::DoNotOptimize(f_dual(J, 0.3));
}
BENCHMARK(BM_FDual)->Arg(100)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);

void BM_XiG(benchmark::State& st) {
    const auto md = oat_state(200, 0.02).moments;
    for (auto _ : st) benchmark::DoNotOptimize(xi_G(md));
}
BENCHMARK(BM_XiG);

void BM_SsiSearch(benchmark::State& st) {
    const auto md = oat_state(200, 0.02).moments;
    for (auto _ : st) benchmark::DoNotOptimize(ssi_search(md));
}
BENCHMARK(BM_SsiSearch)->Unit(benchmark::kMillisecond);

void BM_Kn(benchmark::State& st) {
    const auto p = reference_lg();
    const int n = static_cast<int>(st.range(0));
    for (auto _ : st) benchmark::DoNotOptimize(k_n(M_PI / 2, n, p));
}
BENCHMARK(BM_Kn)->Arg(3)->Arg(7)->Arg(9)->Unit(benchmark::kMillisecond);

void BM_Simulate(benchmark::State& st) {
    const auto p = reference_lg();
    std::vector<int> slots;
    for (int i = 1; i <= st.range(0); ++i) slots.push_back(i);
    const auto seq = MeasurementSequence::slots(slots, 0.4);
    for (auto _ : st) benchmark::DoNotOptimize(simulate(seq, p));
}
BENCHMARK(BM_Simulate)->Arg(3)->Arg(9)->Arg(16);

void BM_FullSpaceMoments(benchmark::State& st) {
    const int N = static_cast<int>(st.range(0));
    std::mt19937_64 rng(1);
    const CVec psi = oracle::random_pure_state(1 << N, rng);
    for (auto _ : st) benchmark::DoNotOptimize(oracle::full_space_moments(psi, N, 0.5));
}
BENCHMARK(BM_FullSpaceMoments)->Arg(4)->Arg(8)->Arg(12);

}  // namespace
BENCHMARK_MAIN();
