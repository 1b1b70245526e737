/*
   Copyright 2026 The unisde Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/


#include <vector>

#include <benchmark/benchmark.h>

#include "unisde/analysis.hpp"
#include "unisde/moments.hpp"
#include "unisde/normal.hpp"
#include "unisde/rng.hpp"
#include "unisde/simulate.hpp"

namespace {

void BM_PhiloxBlock(benchmark::State& state) {
    unisde::Philox4x32::Counter ctr{0, 0, 0, 0};
    const unisde::Philox4x32::Key key{1, 2};
    for (auto _ : state) {
        auto out = unisde::Philox4x32::block(ctr, key);
        benchmark::DoNotOptimize(out);
        ++ctr[0];
    }
}
BENCHMARK(BM_PhiloxBlock);

void BM_StreamNormal(benchmark::State& state) {
    unisde::PathStream s(7, 0);
    for (auto _ : state) benchmark::DoNotOptimize(s.normal());
}
BENCHMARK(BM_StreamNormal);

void BM_InverseNormal(benchmark::State& state) {
    double p = 0.001;
    for (auto _ : state) {
        benchmark::DoNotOptimize(unisde::inverse_normal_cdf(p));
        p += 0.000997;
        if (p >= 1.0) p -= 0.999;
    }
}
BENCHMARK(BM_InverseNormal);

// Items processed = path-steps.
void BM_EulerConic(benchmark::State& state) {
    const auto paths = static_cast<std::size_t>(state.range(0));
    unisde::SimConfig cfg{unisde::Process::conic_x(unisde::Boundary{unisde::Power{1.0, 1.0}}), unisde::TimeGrid(0.0, 1.0, 0.01),
                          paths, 1, unisde::PointMass{0.0}, unisde::TerminalOnly{}};
    for (auto _ : state) benchmark::DoNotOptimize(unisde::euler_simulate(cfg, 1).fingerprint);
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(paths * 100));
}
BENCHMARK(BM_EulerConic)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_EulerPhi(benchmark::State& state) {
    unisde::SimConfig cfg{unisde::Process::phi_uniform(), unisde::TimeGrid(0.01, 1.0, 0.01), 10000, 1,
                          unisde::UniformOnSupport{}, unisde::TerminalOnly{}};
    for (auto _ : state) benchmark::DoNotOptimize(unisde::euler_simulate(cfg, 1).fingerprint);
    state.SetItemsProcessed(state.iterations() * 10000 * 99);
}
BENCHMARK(BM_EulerPhi)->Unit(benchmark::kMillisecond);

void BM_ConditionalMoment(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    unisde::alpha_matrix(n);
    double z = -0.9;
    for (auto _ : state) {
        benchmark::DoNotOptimize(unisde::conditional_moment_ratio(n, 0.6, z));
        z = z > 0.9 ? -0.9 : z + 0.01;
    }
}
BENCHMARK(BM_ConditionalMoment)->Arg(6)->Arg(24);

void BM_MomentOde(benchmark::State& state) {
    const unisde::MomentQuery q{8, 2.0, 10.0, -0.95, unisde::Boundary{unisde::Power{2.0, 1.5}}};
    for (auto _ : state) benchmark::DoNotOptimize(unisde::moment_ode_oracle(q, 2000));
}
BENCHMARK(BM_MomentOde);

void BM_KsUniform(benchmark::State& state) {
    const auto sample = unisde::exact_uniform_reference(static_cast<std::size_t>(state.range(0)), 3);
    for (auto _ : state) benchmark::DoNotOptimize(unisde::ks_uniform(sample, {-1.0, 1.0}).statistic);
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_KsUniform)->Arg(100000)->Arg(1000000)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
