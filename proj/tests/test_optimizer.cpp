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

#include <catch2/catch_amalgamated.hpp>

#include "probeopt/optimizer.hpp"

using namespace probeopt;
using Catch::Matchers::WithinAbs;

namespace
{

    CombinationPool make_pool(std::vector<std::vector<double>> sampled,
                              std::vector<std::vector<double>> augmented)
    {
        CombinationPool pool;
        pool.sampled = std::move(sampled);
        pool.augmented = std::move(augmented);
        return pool;
    }

    CombinationPool random_pool(arma::uword total, Rng &rng)
    {
        std::uniform_real_distribution<double> uni(0.0, 10.0);
        CombinationPool pool;
        pool.sampled.resize(total);
        pool.augmented.resize(total);
        for (arma::uword l = 0; l < total; ++l)
        {
            const arma::uword n_sampled = 1 + rng() % 4, n_augmented = rng() % 4;
            for (arma::uword i = 0; i < n_sampled; ++i)
                pool.sampled[l].push_back(uni(rng));
            for (arma::uword i = 0; i < n_augmented; ++i)
                pool.augmented[l].push_back(uni(rng));
        }
        return pool;
    }

    // Independent best-mean search, ties to the lowest index
    arma::uword best_mean_oracle(const CombinationPool &pool)
    {
        arma::uword best = 1;
        double best_mean = -1.0;
        for (arma::uword l = 1; l <= pool.total_combos(); ++l)
        {
            double sum = 0.0;
            arma::uword count = 0;
            for (double r : pool.sampled[l - 1])
            {
                sum += r;
                ++count;
            }
            for (double r : pool.augmented[l - 1])
            {
                sum += r;
                ++count;
            }
            if (sum / count > best_mean)
            {
                best_mean = sum / count;
                best = l;
            }
        }
        return best;
    }

} // namespace

TEST_CASE("fitness is the mean over sampled and augmented rates")
{
    const CombinationPool pool = make_pool({{2.0}, {5.0}}, {{4.0}, {}});
    CHECK_THAT(fitness(pool, 1), WithinAbs(3.0, 1.0e-14));
    CHECK_THAT(fitness(pool, 2), WithinAbs(5.0, 1.0e-14));

    CHECK_THROWS_AS(fitness(pool, 0), std::invalid_argument);
    CHECK_THROWS_AS(fitness(pool, 3), std::invalid_argument);

    const CombinationPool holed = make_pool({{1.0}, {}}, {{}, {}});
    CHECK_THROWS_AS(fitness(holed, 2), std::invalid_argument);
}

TEST_CASE("pool validation rejects malformed rate lists")
{
    CHECK_THROWS_AS(make_pool({}, {}).validate(), std::invalid_argument);
    CHECK_THROWS_AS(make_pool({{1.0}}, {{1.0}, {2.0}}).validate(), std::invalid_argument);
    CHECK_THROWS_AS(make_pool({{1.0, -0.5}}, {{}}).validate(), std::invalid_argument);
    CHECK_THROWS_AS(make_pool({{1.0}}, {{arma::datum::inf}}).validate(), std::invalid_argument);
    make_pool({{0.0, 1.0}}, {{2.0}}).validate();
}

TEST_CASE("exhaustive selection picks the best mean with low-index ties")
{
    CHECK(exhaustive_select(make_pool({{1.0}, {3.0}, {2.0}}, {{}, {}, {}})) == 2);
    CHECK(exhaustive_select(make_pool({{2.0}, {2.0}}, {{}, {}})) == 1);

    Rng rng(3);
    for (int trial = 0; trial < 50; ++trial)
    {
        const CombinationPool pool = random_pool(8, rng);
        CHECK(exhaustive_select(pool) == best_mean_oracle(pool));
    }
}

TEST_CASE("exhaustive selection names every combination without rates")
{
    const CombinationPool pool = make_pool({{1.0}, {}, {2.0}, {}, {3.0}},
                                           {{}, {}, {}, {}, {}});
    CHECK_THROWS_WITH(exhaustive_select(pool),
                      Catch::Matchers::ContainsSubstring("2") &&
                          Catch::Matchers::ContainsSubstring("4"));
}

TEST_CASE("selection is invariant under positive affine rate rescaling")
{
    Rng rng(5);
    for (int trial = 0; trial < 20; ++trial)
    {
        const CombinationPool pool = random_pool(8, rng);
        CombinationPool scaled = pool;
        for (auto *lists : {&scaled.sampled, &scaled.augmented})
            for (auto &rates : *lists)
                for (double &r : rates)
                    r = 3.5 * r + 2.0;

        CHECK(exhaustive_select(scaled) == exhaustive_select(pool));

        GaConfig config;
        config.population = 8; // Covers all codes, so the search is exhaustive
        config.seed = (std::uint64_t)trial;
        CHECK(ga_optimize(scaled, config).combo_index == ga_optimize(pool, config).combo_index);
    }
}

TEST_CASE("a single-combination pool is trivially optimal")
{
    const CombinationPool pool = make_pool({{4.0, 6.0}}, {{}});
    CHECK(exhaustive_select(pool) == 1);

    const GaResult result = ga_optimize(pool, GaConfig{});
    CHECK(result.combo_index == 1);
    CHECK_THAT(result.fitness, WithinAbs(5.0, 1.0e-14));
}

TEST_CASE("full-coverage population with elitism always matches exhaustive search")
{
    Rng rng(7);
    GaConfig config;
    config.population = 8;
    config.elitism = 1;

    for (int trial = 0; trial < 100; ++trial)
    {
        const CombinationPool pool = random_pool(8, rng);
        config.seed = (std::uint64_t)trial;
        const GaResult result = ga_optimize(pool, config);
        CHECK(result.combo_index == exhaustive_select(pool));
        CHECK_THAT(result.fitness, WithinAbs(fitness(pool, result.combo_index), 1.0e-14));
    }
}

TEST_CASE("default settings recover the exhaustive optimum on almost every pool")
{
    Rng rng(11);
    int matches = 0;
    for (int trial = 0; trial < 50; ++trial)
    {
        const CombinationPool pool = random_pool(8, rng);
        GaConfig config;
        config.seed = (std::uint64_t)trial;
        if (ga_optimize(pool, config).combo_index == exhaustive_select(pool))
            ++matches;
    }
    CHECK(matches >= 45);
}

TEST_CASE("elitism makes the per-restart best fitness monotone")
{
    Rng rng(13);
    GaConfig config;
    config.elitism = 1;
    config.generations = 8;

    for (int trial = 0; trial < 10; ++trial)
    {
        const CombinationPool pool = random_pool(6, rng);
        config.seed = (std::uint64_t)(100 + trial);
        const GaResult result = ga_optimize(pool, config);

        double last = -arma::datum::inf;
        for (const GaTraceRow &row : result.trace)
        {
            if (row.generation == 0)
                last = -arma::datum::inf;
            CHECK(row.best_fitness >= last);
            last = row.best_fitness;
        }
        // The returned best can never fall below any population snapshot
        for (const GaTraceRow &row : result.trace)
            CHECK(result.fitness >= row.best_fitness - 1.0e-14);
    }
}

TEST_CASE("the trace covers every restart and generation exactly once")
{
    Rng rng(17);
    const CombinationPool pool = random_pool(5, rng);
    GaConfig config;
    config.restarts = 3;
    config.generations = 4;
    config.seed = 21;

    const GaResult result = ga_optimize(pool, config);
    REQUIRE(result.trace.size() == 3 * 5);
    arma::uword i = 0;
    for (arma::uword restart = 0; restart < 3; ++restart)
        for (arma::uword generation = 0; generation <= 4; ++generation, ++i)
        {
            CHECK(result.trace[i].restart == restart);
            CHECK(result.trace[i].generation == generation);
            CHECK(result.trace[i].mean_fitness <= result.trace[i].best_fitness + 1.0e-14);
        }
}

TEST_CASE("the genetic search is deterministic in its seed")
{
    Rng rng(19);
    const CombinationPool pool = random_pool(8, rng);
    GaConfig config;
    config.seed = 33;

    const GaResult a = ga_optimize(pool, config);
    const GaResult b = ga_optimize(pool, config);
    CHECK(a.combo_index == b.combo_index);
    CHECK(a.fitness == b.fitness);
    REQUIRE(a.trace.size() == b.trace.size());
    for (size_t i = 0; i < a.trace.size(); ++i)
    {
        CHECK(a.trace[i].best_fitness == b.trace[i].best_fitness);
        CHECK(a.trace[i].mean_fitness == b.trace[i].mean_fitness);
    }
}

TEST_CASE("genetic search settings are validated")
{
    GaConfig config;
    config.population = 1;
    CHECK_THROWS_AS(config.validate(), std::invalid_argument);

    config = GaConfig{};
    config.restarts = 0;
    CHECK_THROWS_AS(config.validate(), std::invalid_argument);

    config = GaConfig{};
    config.generations = 0;
    CHECK_THROWS_AS(config.validate(), std::invalid_argument);

    config = GaConfig{};
    config.crossover = 1.2;
    CHECK_THROWS_AS(config.validate(), std::invalid_argument);

    config = GaConfig{};
    config.mutation = -0.1;
    CHECK_THROWS_AS(config.validate(), std::invalid_argument);

    config = GaConfig{};
    config.elitism = 2;
    CHECK_THROWS_AS(config.validate(), std::invalid_argument);

    GaConfig{}.validate();
}
