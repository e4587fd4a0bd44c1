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

#include "probeopt/metrics.hpp"
#include "probeopt/mixture.hpp"

using namespace probeopt;

static void BM_Mmd(benchmark::State &state)
{
    const arma::uword d = 144, n = (arma::uword)state.range(0);
    arma::arma_rng::set_seed(1);
    const arma::mat x(d, n, arma::fill::randn);
    const arma::mat y = x + 0.1 * arma::mat(d, n, arma::fill::randn);
    const double h = median_bandwidth(x);
    for (auto _ : state)
        benchmark::DoNotOptimize(mmd(x, y, h));
}
BENCHMARK(BM_Mmd)->Arg(50)->Arg(100)->Arg(200);

static void BM_MedianBandwidth(benchmark::State &state)
{
    const arma::uword d = 144, n = (arma::uword)state.range(0);
    arma::arma_rng::set_seed(1);
    const arma::mat x(d, n, arma::fill::randn);
    for (auto _ : state)
        benchmark::DoNotOptimize(median_bandwidth(x));
}
BENCHMARK(BM_MedianBandwidth)->Arg(100)->Arg(400);

static void BM_MixtureLogDensity(benchmark::State &state)
{
    const arma::uword d = 64, g = 8;
    arma::arma_rng::set_seed(2);
    MixtureDensity mix;
    mix.weights = arma::vec(g, arma::fill::value(1.0 / (double)g));
    for (arma::uword k = 0; k < g; ++k)
    {
        mix.means.push_back(arma::vec(d, arma::fill::randn));
        arma::mat u = arma::trimatu(arma::mat(d, d, arma::fill::randn) * 0.1);
        u.diag() = arma::abs(u.diag()) + 1.0;
        mix.chol.push_back(u);
    }
    const arma::vec x(d, arma::fill::randn);
    for (auto _ : state)
        benchmark::DoNotOptimize(mixture_log_density(mix, x));
}
BENCHMARK(BM_MixtureLogDensity);

BENCHMARK_MAIN();
