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

#include "probeopt/rate_mapper.hpp"

#include <algorithm>
#include <stdexcept>

namespace probeopt
{

    void RateMapperModel::validate() const
    {
        if (data_dim < 1)
            throw std::invalid_argument("RateMapperModel: data_dim must be >= 1");
        spec.validate();
        if (spec.input_width != data_dim + condition_width)
            throw std::invalid_argument("RateMapperModel: input width mismatch");
        if (spec.output_width() != 1)
            throw std::invalid_argument("RateMapperModel: output width must be 1");
        if (params.n_elem != ParamLayout(spec).total)
            throw std::invalid_argument("RateMapperModel: parameter vector length mismatch");
        normalizer.validate();
        if (normalizer.mean.n_elem != data_dim)
            throw std::invalid_argument("RateMapperModel: normalizer dimension mismatch");
        if (!std::isfinite(rate_mean) || !std::isfinite(rate_std) || rate_std <= 0.0)
            throw std::invalid_argument("RateMapperModel: invalid rate statistics");
    }

    static arma::mat mapper_input(const RateMapperModel &model, const arma::mat &r,
                                  const arma::mat &condition)
    {
        if (r.n_rows != model.data_dim || condition.n_rows != model.condition_width ||
            r.n_cols != condition.n_cols)
            throw std::invalid_argument("rate mapper: input shape mismatch");
        return arma::join_cols(model.normalizer.normalize_batch(r), condition);
    }

    arma::vec predict_rates(const RateMapperModel &model, const arma::mat &r,
                            const arma::mat &condition)
    {
        model.validate();
        const arma::mat out =
            forward(model.spec, model.params, mapper_input(model, r, condition), NetMode::eval)
                .output();
        arma::vec rates = out.row(0).t() * model.rate_std + model.rate_mean;
        return arma::clamp(rates, 0.0, arma::datum::inf);
    }

    double predict_rate(const RateMapperModel &model, const arma::vec &r, const arma::vec &condition)
    {
        return predict_rates(model, r, condition)(0);
    }

    MapperTrainResult train_mapper(const ConditionedSamples &train, const arma::vec &train_rates,
                                   const ConditionedSamples &validation, const arma::vec &val_rates,
                                   const MapperHyper &hyper)
    {
        train.validate();
        validation.validate();
        if (train.size() < 1)
            throw std::invalid_argument("train_mapper: empty training set");
        if (train_rates.n_elem != train.size() || val_rates.n_elem != validation.size())
            throw std::invalid_argument("train_mapper: one rate label per sample required");
        if (!train_rates.is_finite() || !val_rates.is_finite())
            throw std::invalid_argument("train_mapper: non-finite labels");

        MapperTrainResult result;
        RateMapperModel &model = result.model;
        model.data_dim = train.pbm.n_rows;
        model.condition_width = train.condition.n_rows;

        model.spec.input_width = model.data_dim + model.condition_width;
        for (arma::uword width : hyper.hidden)
            model.spec.layers.push_back({width, Activation::prelu, hyper.dropout});
        model.spec.layers.push_back({1, Activation::identity, 0.0});
        model.params = init_params(model.spec, hyper.init_seed);

        model.normalizer = PbmNormalizer::fit(train.pbm, hyper.log_transform);
        model.rate_mean = arma::mean(train_rates);
        model.rate_std = train_rates.n_elem > 1 ? arma::stddev(train_rates) : 0.0;
        model.rate_std = std::max(model.rate_std, PbmNormalizer::min_std);
        model.validate();

        const arma::mat train_in = mapper_input(model, train.pbm, train.condition);
        const arma::rowvec train_labels = ((train_rates - model.rate_mean) / model.rate_std).t();
        arma::mat val_in;
        arma::rowvec val_labels;
        if (validation.size() > 0)
        {
            val_in = mapper_input(model, validation.pbm, validation.condition);
            val_labels = ((val_rates - model.rate_mean) / model.rate_std).t();
        }

        result.best_val_rmse = arma::datum::inf;
        arma::vec best_params = model.params;
        AdamState state;
        AdamConfig adam;
        Rng shuffle_rng(mix_seed(hyper.train_seed, 21));
        const arma::uword n = train.size();
        const arma::uword batch = std::min<arma::uword>(std::max<arma::uword>(hyper.batch_size, 1), n);

        auto rmse_of = [&](const arma::mat &in, const arma::rowvec &labels) -> double {
            const arma::mat out = forward(model.spec, model.params, in, NetMode::eval).output();
            return std::sqrt(arma::accu(arma::square(out.row(0) - labels)) / (double)labels.n_elem) *
                   model.rate_std;
        };

        for (arma::uword epoch = 0; epoch < hyper.epochs; ++epoch)
        {
            adam.lr = step_lr_schedule(hyper.base_lr, hyper.lr_step, hyper.lr_gamma, epoch);
            arma::uvec order = arma::regspace<arma::uvec>(0, n - 1);
            std::shuffle(order.begin(), order.end(), shuffle_rng);

            bool diverged = false;
            for (arma::uword start = 0; start < n && !diverged; start += batch)
            {
                const arma::uvec cols = order.subvec(start, std::min(start + batch, n) - 1);
                const ForwardTape tape =
                    forward(model.spec, model.params, train_in.cols(cols), NetMode::train,
                            mix_seed(hyper.train_seed, epoch * 100003 + start));
                const arma::rowvec err = tape.output().row(0) - train_labels.cols(cols);
                if (!err.is_finite())
                {
                    diverged = true;
                    break;
                }
                const arma::mat out_grad = 2.0 * err / (double)cols.n_elem;
                adam_step(model.params, backward(tape, out_grad).params, state, adam);
            }
            if (diverged)
            {
                result.aborted = true;
                break;
            }

            TrainEpoch row;
            row.epoch = epoch;
            row.train_loss = rmse_of(train_in, train_labels);
            row.val_loss = validation.size() > 0 ? rmse_of(val_in, val_labels) : row.train_loss;
            row.lr = adam.lr;
            result.log.push_back(row);

            if (row.val_loss < result.best_val_rmse)
            {
                result.best_val_rmse = row.val_loss;
                best_params = model.params;
            }
        }

        model.params = best_params;
        return result;
    }

    // --- Checkpoint IO ----------------------------------------------------

    void RateMapperModel::save(const std::filesystem::path &path, std::uint64_t config_hash,
                               std::uint64_t seed) const
    {
        validate();
        Checkpoint ck;
        ck.model = "rate-mapper";
        ck.config_hash = config_hash;
        ck.seed = seed;
        ck.scalars["data_dim"] = (double)data_dim;
        ck.scalars["condition_width"] = (double)condition_width;
        ck.scalars["log_transform"] = normalizer.log_transform ? 1.0 : 0.0;
        ck.scalars["rate_mean"] = rate_mean;
        ck.scalars["rate_std"] = rate_std;
        ck.vectors["norm_mean"] = normalizer.mean;
        ck.vectors["norm_std"] = normalizer.std_dev;
        ck.networks["mapper"] = {spec, params};
        ck.save(path);
    }

    RateMapperModel RateMapperModel::load(const std::filesystem::path &path)
    {
        const Checkpoint ck = Checkpoint::load(path);
        if (ck.model != "rate-mapper")
            throw std::runtime_error("'" + path.string() + "' is not a rate-mapper checkpoint");

        RateMapperModel model;
        model.data_dim = (arma::uword)ck.scalars.at("data_dim");
        model.condition_width = (arma::uword)ck.scalars.at("condition_width");
        model.normalizer.log_transform = ck.scalars.at("log_transform") != 0.0;
        model.normalizer.mean = ck.vectors.at("norm_mean");
        model.normalizer.std_dev = ck.vectors.at("norm_std");
        model.rate_mean = ck.scalars.at("rate_mean");
        model.rate_std = ck.scalars.at("rate_std");
        model.spec = ck.networks.at("mapper").first;
        model.params = ck.networks.at("mapper").second;
        model.validate();
        return model;
    }

} // namespace probeopt
