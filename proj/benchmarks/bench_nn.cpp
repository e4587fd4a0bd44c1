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

#include "probeopt/augmenter.hpp"
#include "probeopt/nn.hpp"

using namespace probeopt;

static DenseNetSpec bench_spec()
{
    DenseNetSpec spec;
    spec.input_width = 208;
    spec.layers = {{256, Activation::prelu, 0.3},
                   {128, Activation::prelu, 0.3},
                   {128, Activation::identity, 0.0}};
    return spec;
}

static void BM_Forward(benchmark::State &state)
{
    const DenseNetSpec spec = bench_spec();
    const arma::vec params = init_params(spec, 1);
    const arma::mat input(spec.input_width, (arma::uword)state.range(0), arma::fill::randn);
    for (auto _ : state)
        benchmark::DoNotOptimize(forward(spec, params, input, NetMode::train, 7));
}
BENCHMARK(BM_Forward)->Arg(1)->Arg(64);

static void BM_ForwardBackward(benchmark::State &state)
{
    const DenseNetSpec spec = bench_spec();
    const arma::vec params = init_params(spec, 1);
    const arma::mat input(spec.input_width, (arma::uword)state.range(0), arma::fill::randn);
    for (auto _ : state)
    {
        const ForwardTape tape = forward(spec, params, input, NetMode::train, 7);
        const arma::mat out_grad(tape.output().n_rows, tape.output().n_cols, arma::fill::ones);
        benchmark::DoNotOptimize(backward(tape, out_grad));
    }
}
BENCHMARK(BM_ForwardBackward)->Arg(1)->Arg(64);

static void BM_Loss1Batch(benchmark::State &state)
{
    AugmenterHyper hyper;
    hyper.latent_width = 16;
    hyper.components = 4;
    hyper.encoder_hidden = {64, 32};
    hyper.decoder_hidden = {64, 32};
    const arma::uword data_dim = 48, cond_width = 16, n = 64;
    const AugmenterModel model = make_augmenter(data_dim, cond_width, hyper);
    const arma::mat pbm = arma::abs(arma::mat(data_dim, n, arma::fill::randn));
    const arma::mat cond(cond_width, n, arma::fill::randn);
    const arma::mat eps(hyper.latent_width, n, arma::fill::randn);
    std::uint64_t seed = 0;
    for (auto _ : state)
        benchmark::DoNotOptimize(loss1_batch(model, pbm, cond, eps, NetMode::train, seed++));
}
BENCHMARK(BM_Loss1Batch);

BENCHMARK_MAIN();
