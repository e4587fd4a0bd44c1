// SPDX-License-Identifier: Apache-2.0
//
// probeopt - probing beam optimization for cell-free hybrid beamforming
// Copyright (C) 2026 probeopt contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include <benchmark/benchmark.h>

#include "probeopt/beamforming.hpp"
#include "probeopt/channel.hpp"

using namespace probeopt;

static ScenarioConfig bench_scenario()
{
    ScenarioConfig scenario = ScenarioConfig::defaults();
    scenario.noise_power_w = 1e-12;
    return scenario;
}

static void BM_GenerateChannel(benchmark::State &state)
{
    const ScenarioConfig scenario = bench_scenario();
    std::uint64_t seed = 0;
    for (auto _ : state)
        benchmark::DoNotOptimize(generate_channel(scenario, seed++));
}
BENCHMARK(BM_GenerateChannel);

static void BM_ComputePbm(benchmark::State &state)
{
    const ScenarioConfig scenario = bench_scenario();
    const ChannelRealization channel = generate_channel(scenario, 1);
    const ProbingConfig probing =
        horizontal_sector_combo(scenario.geometry, scenario.num_aps, 8, 8, 1);
    for (auto _ : state)
        benchmark::DoNotOptimize(compute_pbm(channel, probing));
}
BENCHMARK(BM_ComputePbm);

static void BM_EvaluateProbingConfig(benchmark::State &state)
{
    const ScenarioConfig scenario = bench_scenario();
    const ChannelRealization channel = generate_channel(scenario, 1);
    const ProbingConfig probing =
        horizontal_sector_combo(scenario.geometry, scenario.num_aps, 8, 8, 1);
    const PipelineParams params;
    for (auto _ : state)
        benchmark::DoNotOptimize(evaluate_probing_config(channel, probing, scenario, params));
}
BENCHMARK(BM_EvaluateProbingConfig);

static void BM_LmmseDigital(benchmark::State &state)
{
    const ScenarioConfig scenario = bench_scenario();
    const ChannelRealization channel = generate_channel(scenario, 1);
    const ProbingConfig probing =
        horizontal_sector_combo(scenario.geometry, scenario.num_aps, 8, 8, 1);
    const arma::cx_mat h = channel.stacked();
    const PbmVector pbm = compute_pbm(channel, probing);
    const auto classes = compress_beamspace(pbm, probing, scenario.geometry.size(), 8, 2);
    const arma::cx_mat f_rf =
        assemble_analog_matrix(channel.geometry, select_analog_beams_sbf(channel, classes));
    const arma::vec powers(scenario.num_users,
                           arma::fill::value(scenario.tx_power_w * scenario.num_aps /
                                             (double)scenario.num_users));
    const double lambda = (double)scenario.num_users * scenario.noise_power_w /
                          (scenario.tx_power_w * scenario.num_aps);
    for (auto _ : state)
        benchmark::DoNotOptimize(lmmse_digital(f_rf, h, lambda, powers));
}
BENCHMARK(BM_LmmseDigital);

BENCHMARK_MAIN();
