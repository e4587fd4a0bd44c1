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

#ifndef probeopt_rate_mapper_H
#define probeopt_rate_mapper_H

#include <armadillo>
#include <filesystem>
#include <vector>

#include "probeopt/augmenter.hpp"
#include "probeopt/nn.hpp"

namespace probeopt
{

    struct MapperHyper
    {
        std::vector<arma::uword> hidden = {256, 128, 64};
        double dropout = 0.3;
        bool log_transform = true; // Normalize PBM inputs in the log domain

        arma::uword epochs = 200;
        arma::uword batch_size = 64;
        double base_lr = 1.0e-3;
        arma::uword lr_step = 50;
        double lr_gamma = 0.5;
        std::uint64_t init_seed = 3;
        std::uint64_t train_seed = 4;
    };

    // Regressor from (PBM vector, probing condition) to the sum rate. Inputs
    // are normalized PBMs concatenated with the condition; labels are
    // standardized with training-set statistics.
    struct RateMapperModel
    {
        DenseNetSpec spec;
        arma::vec params;
        arma::uword data_dim = 0;
        arma::uword condition_width = 0;
        PbmNormalizer normalizer;
        double rate_mean = 0.0;
        double rate_std = 1.0;

        void validate() const;
        void save(const std::filesystem::path &path, std::uint64_t config_hash,
                  std::uint64_t seed) const;
        static RateMapperModel load(const std::filesystem::path &path);
    };

    // Eval-mode forward pass, denormalized and clamped at 0 (rates cannot be
    // negative)
    double predict_rate(const RateMapperModel &model, const arma::vec &r, const arma::vec &condition);

    // Batch version; one prediction per column
    arma::vec predict_rates(const RateMapperModel &model, const arma::mat &r,
                            const arma::mat &condition);

    struct MapperTrainResult
    {
        RateMapperModel model; // Lowest-validation-RMSE state
        std::vector<TrainEpoch> log; // train_loss/val_loss carry RMSE in rate units
        double best_val_rmse = 0.0;
        bool aborted = false;
    };

    // Mini-batch mean-squared-error training with the step learning-rate
    // schedule; returns the best-validation model.
    MapperTrainResult train_mapper(const ConditionedSamples &train, const arma::vec &train_rates,
                                   const ConditionedSamples &validation, const arma::vec &val_rates,
                                   const MapperHyper &hyper);

} // namespace probeopt

#endif
