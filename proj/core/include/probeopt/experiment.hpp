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

#ifndef probeopt_experiment_H
#define probeopt_experiment_H

#include <map>
#include <string>
#include <vector>

#include "probeopt/augmenter.hpp"
#include "probeopt/beamforming.hpp"
#include "probeopt/dataset.hpp"
#include "probeopt/optimizer.hpp"
#include "probeopt/rate_mapper.hpp"

namespace probeopt
{

    // Minimal CSV container: a provenance comment line, column names, string
    // cells. All experiment reports are written and re-read through this.
    struct CsvTable
    {
        std::string comment; // Written as "# <comment>"
        std::vector<std::string> columns;
        std::vector<std::vector<std::string>> rows;

        void write(const std::filesystem::path &path) const;
        static CsvTable read(const std::filesystem::path &path);
    };

    // Full description of one experiment: scenario, probing partition, data
    // sizes, model and optimizer settings, seeds and output directory.
    struct ExperimentConfig
    {
        ScenarioConfig scenario;
        arma::uword beams_per_ap = 8; // Probing beams per AP and combo
        arma::uword total_combos = 8;
        std::vector<arma::uword> sampled_combos; // 1-based; default all
        arma::uword location_sets = 200;
        arma::uword train_per_combo = 100;   // Training samples used per combo
        arma::uword augment_per_combo = 100; // Generated samples per combo
        PipelineParams pipeline;
        AugmenterHyper augmenter;
        MapperHyper mapper;
        GaConfig ga;
        std::string baseline = "cvae-mdn"; // cvae | vae-mdn | cvae-mdn
        std::uint64_t seed = 1;
        std::filesystem::path out_dir = "probeopt-out";
        std::uint64_t config_hash = 0; // Hash of the canonical key-value form

        static ExperimentConfig from_kv(const KeyValueConfig &kv);
        static ExperimentConfig from_file(const std::filesystem::path &path);
        void validate() const;

        arma::uword pbm_dim() const;         // users * APs * beams_per_ap
        arma::uword condition_width() const; // 2 * beams_per_ap * M
        ProbingConfig combo(arma::uword combo_index) const;
        arma::vec condition_of(arma::uword combo_index) const;
        std::uint64_t channel_seed(arma::uword location_set) const;

        std::filesystem::path dataset_path(Split split) const;
        std::filesystem::path augmenter_path() const;                      // Single-model baselines
        std::filesystem::path augmenter_path(arma::uword combo_index) const; // Per-combo farm
        std::filesystem::path mapper_path() const;
    };

    struct GenerateResult
    {
        SampleDataset train;
        SampleDataset validation;
        SampleDataset test;
    };

    // Draws every location set, runs the probing pipeline for every sampled
    // combo and writes the three split datasets (binary + CSV).
    GenerateResult cmd_generate(const ExperimentConfig &config);

    struct TrainArtifacts
    {
        std::vector<AugmenterTrainResult> augmenters;
        std::vector<arma::uword> augmenter_combos; // Parallel to augmenters for vae-mdn, else {0}
        MapperTrainResult mapper;
    };

    // Trains the augmenter (one conditioned model, or one per sampled combo
    // for the vae-mdn baseline) and the rate mapper; writes checkpoints and
    // loss curves.
    TrainArtifacts cmd_train(const ExperimentConfig &config);

    struct OptimizeReport
    {
        CombinationPool pool;
        std::vector<double> combo_fitness; // Per combo, 1-based offset
        arma::uword exhaustive_choice = 1;
        arma::uword ga_choice = 1;
        GaResult ga;
        std::map<arma::uword, double> mmd_per_combo; // Sampled combos with >= 2 test PBMs
    };

    // Generates augmented PBMs per combo, predicts their rates, assembles the
    // combination pool and selects via exhaustive scan and the genetic
    // algorithm; writes selection, GA-trace, distribution-distance and CDF
    // reports.
    OptimizeReport cmd_optimize(const ExperimentConfig &config);

    struct EvaluateReport
    {
        arma::vec true_mean_rates; // Per combo over the test split, 1-based offset
        arma::uword best_combo = 1;
        double compressed_mean_rate = 0.0; // Pipeline default compression
        double full_sbf_mean_rate = 0.0;   // Uncompressed beamspace
        arma::uword exhaustive_choice = 0; // 0: no selection report present
        arma::uword ga_choice = 0;
        double exhaustive_ratio = 0.0; // True mean of the choice over the best
        double ga_ratio = 0.0;
    };

    // Ground-truth evaluation on the test split: true per-combo mean sum rates
    // by direct simulation, the compression cost against full-beamspace
    // selection, and (when a selection report exists) the quality of the
    // optimizer's choices.
    EvaluateReport cmd_evaluate(const ExperimentConfig &config);

} // namespace probeopt

#endif
