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

#include "probeopt/optimizer.hpp"

#include <sstream>
#include <stdexcept>

namespace probeopt
{

    void CombinationPool::validate() const
    {
        if (sampled.empty())
            throw std::invalid_argument("CombinationPool: at least one combination required");
        if (augmented.size() != sampled.size())
            throw std::invalid_argument("CombinationPool: sampled/augmented combo counts differ");
        for (const auto &lists : {&sampled, &augmented})
            for (const auto &rates : **&lists)
                for (double rate : rates)
                    if (!std::isfinite(rate) || rate < 0.0)
                        throw std::invalid_argument("CombinationPool: rates must be finite and >= 0");
    }

    double fitness(const CombinationPool &pool, arma::uword combo_index)
    {
        pool.validate();
        if (combo_index < 1 || combo_index > pool.total_combos())
            throw std::invalid_argument("fitness: combo_index out of range (1-based)");

        const auto &sampled = pool.sampled[combo_index - 1];
        const auto &augmented = pool.augmented[combo_index - 1];
        const arma::uword count = sampled.size() + augmented.size();
        if (count == 0)
            throw std::invalid_argument("fitness: combo " + std::to_string(combo_index) +
                                        " has no sampled or augmented rates");

        double sum = 0.0;
        for (double rate : sampled)
            sum += rate;
        for (double rate : augmented)
            sum += rate;
        return sum / (double)count;
    }

    arma::uword exhaustive_select(const CombinationPool &pool)
    {
        pool.validate();
        std::vector<arma::uword> empty;
        for (arma::uword l = 1; l <= pool.total_combos(); ++l)
            if (pool.sampled[l - 1].empty() && pool.augmented[l - 1].empty())
                empty.push_back(l);
        if (!empty.empty())
        {
            std::ostringstream msg;
            msg << "exhaustive_select: combos without any rates:";
            for (arma::uword l : empty)
                msg << " " << l;
            throw std::invalid_argument(msg.str());
        }

        arma::uword best = 1;
        double best_fitness = fitness(pool, 1);
        for (arma::uword l = 2; l <= pool.total_combos(); ++l)
        {
            double f = fitness(pool, l);
            if (f > best_fitness)
            {
                best = l;
                best_fitness = f;
            }
        }
        return best;
    }

    void GaConfig::validate() const
    {
        if (population < 2)
            throw std::invalid_argument("GaConfig: population must be >= 2");
        if (restarts < 1 || generations < 1)
            throw std::invalid_argument("GaConfig: restarts and generations must be >= 1");
        if (crossover < 0.0 || crossover > 1.0 || mutation < 0.0 || mutation > 1.0)
            throw std::invalid_argument("GaConfig: probabilities must lie in [0, 1]");
        if (elitism > 1)
            throw std::invalid_argument("GaConfig: elitism must be 0 or 1");
    }

    GaResult ga_optimize(const CombinationPool &pool, const GaConfig &config)
    {
        pool.validate();
        config.validate();

        const arma::uword total = pool.total_combos();
        arma::uword bits = 1;
        while ((1ULL << bits) < total)
            ++bits;

        // Fitness of every code; evaluates each combo once and also surfaces
        // empty-combo errors up-front.
        arma::vec combo_fitness(total);
        for (arma::uword l = 0; l < total; ++l)
            combo_fitness(l) = fitness(pool, l + 1);
        auto fitness_of = [&](arma::uword code) { return combo_fitness(code % total); };

        GaResult result;
        result.combo_index = 1;
        result.fitness = -arma::datum::inf;
        auto offer = [&](arma::uword code) {
            double f = fitness_of(code);
            if (f > result.fitness)
            {
                result.fitness = f;
                result.combo_index = code % total + 1;
            }
        };

        for (arma::uword restart = 0; restart < config.restarts; ++restart)
        {
            Rng rng(mix_seed(config.seed, restart));
            std::uniform_real_distribution<double> uni(0.0, 1.0);

            // Initial population: full code coverage when it fits, random fill
            std::vector<arma::uword> population(config.population);
            for (arma::uword i = 0; i < config.population; ++i)
                population[i] = config.population >= total && i < total
                                    ? i
                                    : (arma::uword)(rng() % (1ULL << bits)) % total;

            for (arma::uword generation = 0;; ++generation)
            {
                arma::vec fit(config.population);
                for (arma::uword i = 0; i < config.population; ++i)
                {
                    fit(i) = fitness_of(population[i]);
                    offer(population[i]);
                }

                GaTraceRow row;
                row.restart = restart;
                row.generation = generation;
                row.best_fitness = fit.max();
                row.mean_fitness = arma::mean(fit);
                result.trace.push_back(row);
                if (generation == config.generations)
                    break;

                // Roulette-wheel selection on shifted-positive fitness
                const arma::vec shifted = fit - fit.min() + 1.0e-9;
                const double total_weight = arma::accu(shifted);
                std::vector<arma::uword> parents(config.population);
                for (arma::uword i = 0; i < config.population; ++i)
                {
                    double ticket = uni(rng) * total_weight, cursor = 0.0;
                    arma::uword pick = config.population - 1;
                    for (arma::uword j = 0; j < config.population; ++j)
                    {
                        cursor += shifted(j);
                        if (ticket < cursor)
                        {
                            pick = j;
                            break;
                        }
                    }
                    parents[i] = population[pick];
                }

                // Single-point crossover on consecutive pairs
                std::vector<arma::uword> children = parents;
                for (arma::uword i = 0; i + 1 < config.population; i += 2)
                    if (bits >= 2 && uni(rng) < config.crossover)
                    {
                        arma::uword point = 1 + (arma::uword)(rng() % (bits - 1));
                        arma::uword mask = (1ULL << point) - 1;
                        children[i] = (parents[i] & ~mask) | (parents[i + 1] & mask);
                        children[i + 1] = (parents[i + 1] & ~mask) | (parents[i] & mask);
                    }

                // Single-bit mutation and modulo repair
                for (auto &code : children)
                {
                    if (uni(rng) < config.mutation)
                        code ^= 1ULL << (rng() % bits);
                    code %= total;
                }

                // Elitism: the best current individual survives in place of the
                // weakest child
                if (config.elitism == 1)
                {
                    arma::uword best_parent = population[fit.index_max()];
                    arma::vec child_fit(config.population);
                    for (arma::uword i = 0; i < config.population; ++i)
                        child_fit(i) = fitness_of(children[i]);
                    children[child_fit.index_min()] = best_parent;
                }
                population = children;
            }
        }
        return result;
    }

} // namespace probeopt
