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

#ifndef probeopt_optimizer_H
#define probeopt_optimizer_H

#include <armadillo>
#include <vector>

#include "probeopt/common.hpp"

namespace probeopt
{

    // Per probing combination: the sum rates of its collected (sampled) data
    // and of its augmented data. Unsampled combos simply have an empty sampled
    // list. Combination indices are 1-based throughout.
    struct CombinationPool
    {
        std::vector<std::vector<double>> sampled;
        std::vector<std::vector<double>> augmented;

        arma::uword total_combos() const { return sampled.size(); }
        void validate() const;
    };

    // Average of all sampled and augmented rates of the combo; the quantity
    // the selection maximizes. Throws on a combo with no rates at all.
    double fitness(const CombinationPool &pool, arma::uword combo_index);

    // Argmax of fitness over every combination, ties to the lowest index;
    // requires every combo to be nonempty.
    arma::uword exhaustive_select(const CombinationPool &pool);

    struct GaConfig
    {
        arma::uword population = 6;
        arma::uword restarts = 3;    // Independent reruns, best-of-all returned
        arma::uword generations = 5; // Evolution steps per restart
        double crossover = 0.9;      // Single-point crossover probability per pair
        double mutation = 0.1;       // Single-bit flip probability per individual
        arma::uword elitism = 1;     // Best-individual carryover (0 or 1)
        std::uint64_t seed = 0;

        void validate() const;
    };

    struct GaTraceRow
    {
        arma::uword restart = 0;
        arma::uword generation = 0;
        double best_fitness = 0.0;
        double mean_fitness = 0.0;
    };

    struct GaResult
    {
        arma::uword combo_index = 1; // Best individual seen, 1-based
        double fitness = 0.0;
        std::vector<GaTraceRow> trace;
    };

    // Genetic search over binary-encoded combination indices: roulette-wheel
    // selection on shifted-positive fitness, single-point crossover, single-bit
    // mutation, elitism, modulo repair of codes beyond the combo count. When the
    // population is at least the combo count, the initial population enumerates
    // every code once (then random fill), which makes a full-coverage first
    // generation deterministic.
    GaResult ga_optimize(const CombinationPool &pool, const GaConfig &config);

} // namespace probeopt

#endif
