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

#include "probeopt/augmenter.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace probeopt
{

    void LatentGaussian::validate() const
    {
        if (mu.n_elem != sigma.n_elem)
            throw std::invalid_argument("LatentGaussian: mu and sigma lengths differ");
        if (!mu.is_finite() || !sigma.is_finite() || sigma.min() <= 0.0)
            throw std::invalid_argument("LatentGaussian: sigma must be finite and > 0");
    }

    // --- PbmNormalizer ----------------------------------------------------

    PbmNormalizer PbmNormalizer::fit(const arma::mat &samples, bool log_transform)
    {
        if (samples.n_cols < 1)
            throw std::invalid_argument("PbmNormalizer::fit: at least one sample required");
        PbmNormalizer norm;
        norm.log_transform = log_transform;
        const arma::mat x = log_transform ? arma::mat(arma::log(samples + log_eps)) : samples;
        if (!x.is_finite())
            throw std::invalid_argument("PbmNormalizer::fit: non-finite transformed samples");
        norm.mean = arma::mean(x, 1);
        norm.std_dev = samples.n_cols > 1 ? arma::vec(arma::stddev(x, 0, 1))
                                          : arma::vec(x.n_rows, arma::fill::zeros);
        norm.std_dev = arma::clamp(norm.std_dev, min_std, arma::datum::inf);
        return norm;
    }

    void PbmNormalizer::validate() const
    {
        if (mean.n_elem != std_dev.n_elem)
            throw std::invalid_argument("PbmNormalizer: statistics lengths differ");
        if (!mean.is_finite() || !std_dev.is_finite() || std_dev.min() <= 0.0)
            throw std::invalid_argument("PbmNormalizer: statistics must be finite with std > 0");
    }

    arma::vec PbmNormalizer::normalize(const arma::vec &r) const
    {
        validate();
        if (r.n_elem != mean.n_elem)
            throw std::invalid_argument("PbmNormalizer: input length mismatch");
        const arma::vec x = log_transform ? arma::vec(arma::log(r + log_eps)) : r;
        return (x - mean) / std_dev;
    }

    arma::mat PbmNormalizer::normalize_batch(const arma::mat &r) const
    {
        validate();
        if (r.n_rows != mean.n_elem)
            throw std::invalid_argument("PbmNormalizer: input length mismatch");
        arma::mat x = log_transform ? arma::mat(arma::log(r + log_eps)) : r;
        x.each_col() -= mean;
        x.each_col() /= std_dev;
        return x;
    }

    arma::vec PbmNormalizer::denormalize(const arma::vec &x) const
    {
        validate();
        if (x.n_elem != mean.n_elem)
            throw std::invalid_argument("PbmNormalizer: input length mismatch");
        const arma::vec raw = x % std_dev + mean;
        return log_transform ? arma::vec(arma::exp(raw) - log_eps) : raw;
    }

    // --- Model assembly ---------------------------------------------------

    arma::uword AugmenterModel::tri_size() const
    {
        return covariance == CovarianceMode::full ? data_dim * (data_dim + 1) / 2 : data_dim;
    }

    arma::uword AugmenterModel::decoder_output_width() const
    {
        return components * (1 + data_dim + tri_size());
    }

    void AugmenterModel::validate() const
    {
        if (data_dim < 1 || latent_width < 1 || components < 1)
            throw std::invalid_argument("AugmenterModel: dimensions must be >= 1");
        encoder_spec.validate();
        decoder_spec.validate();
        if (encoder_spec.input_width != data_dim + condition_width)
            throw std::invalid_argument("AugmenterModel: encoder input width mismatch");
        if (encoder_spec.output_width() != 2 * latent_width)
            throw std::invalid_argument("AugmenterModel: encoder output width mismatch");
        if (decoder_spec.input_width != latent_width + condition_width)
            throw std::invalid_argument("AugmenterModel: decoder input width mismatch");
        if (decoder_spec.output_width() != decoder_output_width())
            throw std::invalid_argument("AugmenterModel: decoder output width mismatch");
        if (encoder_params.n_elem != ParamLayout(encoder_spec).total ||
            decoder_params.n_elem != ParamLayout(decoder_spec).total)
            throw std::invalid_argument("AugmenterModel: parameter vector length mismatch");
        normalizer.validate();
        if (normalizer.mean.n_elem != data_dim)
            throw std::invalid_argument("AugmenterModel: normalizer dimension mismatch");
    }

    static DenseNetSpec hidden_stack(arma::uword input_width, const std::vector<arma::uword> &hidden,
                                     arma::uword output_width, double dropout)
    {
        DenseNetSpec spec;
        spec.input_width = input_width;
        for (arma::uword width : hidden)
            spec.layers.push_back({width, Activation::prelu, dropout});
        spec.layers.push_back({output_width, Activation::identity, 0.0});
        return spec;
    }

    AugmenterModel make_augmenter(arma::uword data_dim, arma::uword condition_width,
                                  const AugmenterHyper &hyper)
    {
        if (data_dim < 1 || hyper.latent_width < 1 || hyper.components < 1)
            throw std::invalid_argument("make_augmenter: dimensions must be >= 1");

        AugmenterModel model;
        model.data_dim = data_dim;
        model.condition_width = condition_width;
        model.latent_width = hyper.latent_width;
        model.components = hyper.components;
        model.covariance = hyper.covariance;
        model.condition_enabled = hyper.condition_enabled;

        model.encoder_spec = hidden_stack(data_dim + condition_width, hyper.encoder_hidden,
                                          2 * hyper.latent_width, hyper.dropout);
        model.decoder_spec = hidden_stack(hyper.latent_width + condition_width, hyper.decoder_hidden,
                                          model.decoder_output_width(), hyper.dropout);
        model.encoder_params = init_params(model.encoder_spec, mix_seed(hyper.init_seed, 1));
        model.decoder_params = init_params(model.decoder_spec, mix_seed(hyper.init_seed, 2));

        model.normalizer.mean.zeros(data_dim);
        model.normalizer.std_dev.ones(data_dim);
        model.normalizer.log_transform = hyper.log_transform;
        model.validate();
        return model;
    }

    static arma::vec effective_condition(const AugmenterModel &model, const arma::vec &condition)
    {
        if (condition.n_elem != model.condition_width)
            throw std::invalid_argument("augmenter: condition width mismatch");
        return model.condition_enabled ? condition : arma::vec(model.condition_width, arma::fill::zeros);
    }

    LatentGaussian encode(const AugmenterModel &model, const arma::vec &r, const arma::vec &condition)
    {
        model.validate();
        const arma::vec input =
            arma::join_cols(model.normalizer.normalize(r), effective_condition(model, condition));
        const arma::mat out = forward(model.encoder_spec, model.encoder_params, input, NetMode::eval)
                                  .output();
        LatentGaussian lat;
        lat.mu = out.submat(0, 0, model.latent_width - 1, 0);
        lat.sigma = arma::exp(out.submat(model.latent_width, 0, 2 * model.latent_width - 1, 0));
        lat.validate();
        return lat;
    }

    arma::vec reparameterize(const LatentGaussian &lat, const arma::vec &eps)
    {
        lat.validate();
        if (eps.n_elem != lat.mu.n_elem)
            throw std::invalid_argument("reparameterize: eps length mismatch");
        return lat.mu + eps % lat.sigma;
    }

    // Builds one component's triangular factor from its raw values; entries are
    // laid out row-major over the upper triangle, diagonals passed through
    // exp(clamp(., +-diag_clamp)).
    static arma::mat assemble_factor(const AugmenterModel &model, const arma::vec &tri_raw)
    {
        const arma::uword d = model.data_dim;
        arma::mat u(d, d, arma::fill::zeros);
        if (model.covariance == CovarianceMode::diagonal)
        {
            for (arma::uword i = 0; i < d; ++i)
                u(i, i) = std::exp(std::clamp(tri_raw(i), -AugmenterModel::diag_clamp,
                                              AugmenterModel::diag_clamp));
            return u;
        }
        arma::uword k = 0;
        for (arma::uword i = 0; i < d; ++i)
            for (arma::uword j = i; j < d; ++j, ++k)
                u(i, j) = i == j ? std::exp(std::clamp(tri_raw(k), -AugmenterModel::diag_clamp,
                                                       AugmenterModel::diag_clamp))
                                 : tri_raw(k);
        return u;
    }

    // Raw decoder output layout: [G logits | G*d means | G*tri factor values]
    static MixtureDensity mixture_from_raw(const AugmenterModel &model, const arma::vec &raw)
    {
        const arma::uword g = model.components, d = model.data_dim, t = model.tri_size();
        MixtureDensity mix;
        arma::vec logits = raw.subvec(0, g - 1);
        logits -= logits.max();
        mix.weights = arma::exp(logits) / arma::accu(arma::exp(logits));
        for (arma::uword i = 0; i < g; ++i)
        {
            mix.means.push_back(raw.subvec(g + i * d, g + (i + 1) * d - 1));
            mix.chol.push_back(assemble_factor(model, raw.subvec(g + g * d + i * t,
                                                                 g + g * d + (i + 1) * t - 1)));
        }
        mix.validate();
        return mix;
    }

    MixtureDensity decode(const AugmenterModel &model, const arma::vec &z, const arma::vec &condition)
    {
        model.validate();
        if (z.n_elem != model.latent_width)
            throw std::invalid_argument("decode: latent width mismatch");
        const arma::vec input = arma::join_cols(z, effective_condition(model, condition));
        const arma::mat raw = forward(model.decoder_spec, model.decoder_params, input, NetMode::eval)
                                  .output();
        return mixture_from_raw(model, raw.col(0));
    }

    double kl_to_standard_normal(const LatentGaussian &lat)
    {
        lat.validate();
        return 0.5 * arma::accu(arma::square(lat.mu) + arma::square(lat.sigma) -
                                2.0 * arma::log(lat.sigma) - 1.0);
    }

    Loss1Result loss1(const AugmenterModel &model, const arma::vec &r, const arma::vec &condition,
                      const arma::vec &eps, NetMode mode, std::uint64_t dropout_seed)
    {
        return loss1_batch(model, r, condition, eps, mode, dropout_seed);
    }

    Loss1Result loss1_batch(const AugmenterModel &model, const arma::mat &r, const arma::mat &condition,
                            const arma::mat &eps, NetMode mode, std::uint64_t dropout_seed)
    {
        model.validate();
        const arma::uword n = r.n_cols, d = model.data_dim, nz = model.latent_width;
        const arma::uword g = model.components, t = model.tri_size();
        if (n < 1)
            throw std::invalid_argument("loss1: empty batch");
        if (r.n_rows != d || condition.n_rows != model.condition_width || condition.n_cols != n ||
            eps.n_rows != nz || eps.n_cols != n)
            throw std::invalid_argument("loss1: input shape mismatch");

        const arma::mat x = model.normalizer.normalize_batch(r);
        const arma::mat cond_eff = model.condition_enabled
                                       ? condition
                                       : arma::mat(model.condition_width, n, arma::fill::zeros);

        // Encoder pass and reparameterization
        const ForwardTape enc_tape = forward(model.encoder_spec, model.encoder_params,
                                             arma::join_cols(x, cond_eff), mode,
                                             mix_seed(dropout_seed, 0xE1));
        const arma::mat mu = enc_tape.output().rows(0, nz - 1);
        const arma::mat t_raw = enc_tape.output().rows(nz, 2 * nz - 1);
        const arma::mat sigma = arma::exp(t_raw);
        const arma::mat z = mu + eps % sigma;

        // Decoder pass
        const ForwardTape dec_tape = forward(model.decoder_spec, model.decoder_params,
                                             arma::join_cols(z, cond_eff), mode,
                                             mix_seed(dropout_seed, 0xD2));
        const arma::mat &raw = dec_tape.output();

        const double log2pi_term = -0.5 * (double)d * std::log(2.0 * arma::datum::pi);
        arma::mat d_raw(raw.n_rows, n, arma::fill::zeros);
        Loss1Result res;

        for (arma::uword i = 0; i < n; ++i)
        {
            const arma::vec raw_i = raw.col(i);
            arma::vec logits = raw_i.subvec(0, g - 1);
            const double logit_lse =
                logits.max() + std::log(arma::accu(arma::exp(logits - logits.max())));
            const arma::vec log_pi = logits - logit_lse;
            const arma::vec pi = arma::exp(log_pi);

            std::vector<arma::mat> u(g);
            std::vector<arma::vec> s(g), e(g);
            arma::vec log_p(g);
            for (arma::uword c = 0; c < g; ++c)
            {
                const arma::vec tri_raw = raw_i.subvec(g + g * d + c * t, g + g * d + (c + 1) * t - 1);
                u[c] = assemble_factor(model, tri_raw);
                s[c] = x.col(i) - raw_i.subvec(g + c * d, g + (c + 1) * d - 1);
                e[c] = u[c] * s[c];
                log_p(c) = log2pi_term - 0.5 * arma::dot(e[c], e[c]) +
                           arma::accu(arma::log(u[c].diag()));
            }

            const arma::vec scored = log_pi + log_p;
            const double mix_lse =
                scored.max() + std::log(arma::accu(arma::exp(scored - scored.max())));

            const double kl_i = 0.5 * arma::accu(arma::square(mu.col(i)) + arma::square(sigma.col(i)) -
                                                 2.0 * t_raw.col(i) - 1.0);
            const double nll_i = -mix_lse;
            const double ad_i = -arma::accu(log_p) / (double)g;
            if (!std::isfinite(nll_i + kl_i + ad_i))
            {
                arma::uword worst = arma::index_min(log_p);
                std::ostringstream msg;
                msg << "loss1: non-finite loss at sample " << i << " (nll " << nll_i << ", kl "
                    << kl_i << ", anti-degeneracy " << ad_i << "; worst component " << worst
                    << ", diag range [" << u[worst].diag().min() << ", " << u[worst].diag().max()
                    << "])";
                throw std::runtime_error(msg.str());
            }
            res.nll += nll_i;
            res.kl += kl_i;
            res.anti_degeneracy += ad_i;

            // Gradients with respect to the raw decoder outputs
            const arma::vec gamma = arma::exp(scored - mix_lse); // Responsibilities
            d_raw.submat(0, i, g - 1, i) = pi - gamma;
            for (arma::uword c = 0; c < g; ++c)
            {
                const double w = gamma(c) + 1.0 / (double)g;
                d_raw.submat(g + c * d, i, g + (c + 1) * d - 1, i) = -w * (u[c].t() * e[c]);

                arma::vec d_tri(t, arma::fill::zeros);
                const arma::vec tri_raw = raw_i.subvec(g + g * d + c * t, g + g * d + (c + 1) * t - 1);
                if (model.covariance == CovarianceMode::diagonal)
                {
                    for (arma::uword ii = 0; ii < d; ++ii)
                        if (std::abs(tri_raw(ii)) < AugmenterModel::diag_clamp)
                            d_tri(ii) = w * (e[c](ii) * s[c](ii) * u[c](ii, ii) - 1.0);
                }
                else
                {
                    arma::uword k = 0;
                    for (arma::uword ii = 0; ii < d; ++ii)
                        for (arma::uword jj = ii; jj < d; ++jj, ++k)
                        {
                            if (ii == jj)
                            {
                                if (std::abs(tri_raw(k)) < AugmenterModel::diag_clamp)
                                    d_tri(k) = w * (e[c](ii) * s[c](ii) * u[c](ii, ii) - 1.0);
                            }
                            else
                                d_tri(k) = w * e[c](ii) * s[c](jj);
                        }
                }
                d_raw.submat(g + g * d + c * t, i, g + g * d + (c + 1) * t - 1, i) = d_tri;
            }
        }

        const double inv_n = 1.0 / (double)n;
        res.nll *= inv_n;
        res.kl *= inv_n;
        res.anti_degeneracy *= inv_n;
        res.loss = res.nll + res.kl + res.anti_degeneracy;

        // Decoder backward, then the chain into the encoder through z
        const NetGradients dec_grads = backward(dec_tape, d_raw * inv_n);
        res.decoder_grad = dec_grads.params;

        const arma::mat d_z = dec_grads.input.rows(0, nz - 1);
        const arma::mat d_mu = d_z + mu * inv_n;
        const arma::mat d_t = d_z % eps % sigma + (arma::square(sigma) - 1.0) * inv_n;
        const NetGradients enc_grads = backward(enc_tape, arma::join_cols(d_mu, d_t));
        res.encoder_grad = enc_grads.params;
        return res;
    }

    // --- Training ---------------------------------------------------------

    void ConditionedSamples::validate() const
    {
        if (pbm.n_cols != condition.n_cols)
            throw std::invalid_argument("ConditionedSamples: PBM and condition counts differ");
        if (!pbm.is_finite() || !condition.is_finite())
            throw std::invalid_argument("ConditionedSamples: non-finite entries");
    }

    static arma::mat draw_normal(arma::uword rows, arma::uword cols, Rng &rng)
    {
        std::normal_distribution<double> normal(0.0, 1.0);
        arma::mat m(rows, cols);
        for (arma::uword i = 0; i < m.n_elem; ++i)
            m(i) = normal(rng);
        return m;
    }

    AugmenterTrainResult train_augmenter(const ConditionedSamples &train,
                                         const ConditionedSamples &validation,
                                         const AugmenterHyper &hyper)
    {
        train.validate();
        validation.validate();
        if (train.size() < 1)
            throw std::invalid_argument("train_augmenter: empty training set");
        if (validation.size() > 0 && (validation.pbm.n_rows != train.pbm.n_rows ||
                                      validation.condition.n_rows != train.condition.n_rows))
            throw std::invalid_argument("train_augmenter: train/validation dimension mismatch");

        AugmenterModel model = make_augmenter(train.pbm.n_rows, train.condition.n_rows, hyper);
        model.normalizer = PbmNormalizer::fit(train.pbm, hyper.log_transform);
        model.validate();

        AugmenterTrainResult result;
        result.best_val_loss = arma::datum::inf;
        arma::vec best_enc = model.encoder_params, best_dec = model.decoder_params;

        AdamState enc_state, dec_state;
        AdamConfig adam;
        Rng shuffle_rng(mix_seed(hyper.train_seed, 11));
        Rng eps_rng(mix_seed(hyper.train_seed, 12));
        const arma::uword n = train.size();
        const arma::uword batch = std::min<arma::uword>(std::max<arma::uword>(hyper.batch_size, 1), n);

        auto validation_loss = [&](arma::uword epoch) -> double {
            const ConditionedSamples &eval_set = validation.size() > 0 ? validation : train;
            Rng val_rng(mix_seed(hyper.train_seed, 13)); // Same noise every epoch
            arma::mat eps = draw_normal(hyper.latent_width, eval_set.size(), val_rng);
            return loss1_batch(model, eval_set.pbm, eval_set.condition, eps, NetMode::eval,
                               mix_seed(hyper.train_seed, epoch))
                .loss;
        };

        for (arma::uword epoch = 0; epoch < hyper.epochs; ++epoch)
        {
            adam.lr = step_lr_schedule(hyper.base_lr, hyper.lr_step, hyper.lr_gamma, epoch);
            arma::uvec order = arma::regspace<arma::uvec>(0, n - 1);
            std::shuffle(order.begin(), order.end(), shuffle_rng);

            double epoch_loss = 0.0;
            try
            {
                for (arma::uword start = 0; start < n; start += batch)
                {
                    const arma::uvec cols = order.subvec(start, std::min(start + batch, n) - 1);
                    const arma::mat eps = draw_normal(hyper.latent_width, cols.n_elem, eps_rng);
                    Loss1Result step =
                        loss1_batch(model, train.pbm.cols(cols), train.condition.cols(cols), eps,
                                    NetMode::train, mix_seed(hyper.train_seed, epoch * 100003 + start));
                    epoch_loss += step.loss * (double)cols.n_elem;
                    adam_step(model.encoder_params, step.encoder_grad, enc_state, adam);
                    adam_step(model.decoder_params, step.decoder_grad, dec_state, adam);
                }

                TrainEpoch row;
                row.epoch = epoch;
                row.train_loss = epoch_loss / (double)n;
                row.val_loss = validation_loss(epoch);
                row.lr = adam.lr;
                result.log.push_back(row);

                if (row.val_loss < result.best_val_loss)
                {
                    result.best_val_loss = row.val_loss;
                    best_enc = model.encoder_params;
                    best_dec = model.decoder_params;
                }
            }
            catch (const std::runtime_error &)
            {
                // Divergence: fall back to the last stable (best validation) state
                result.aborted = true;
                break;
            }
        }

        model.encoder_params = best_enc;
        model.decoder_params = best_dec;
        if (!std::isfinite(result.best_val_loss))
            result.best_val_loss = result.log.empty() ? arma::datum::inf : result.log.back().val_loss;
        result.model = model;
        return result;
    }

    arma::mat generate_pbms(const AugmenterModel &model, const arma::vec &condition,
                            arma::uword count, std::uint64_t seed)
    {
        model.validate();
        if (count < 1)
            throw std::invalid_argument("generate_pbms: count must be >= 1");
        const arma::vec cond = effective_condition(model, condition);

        Rng rng(seed);
        arma::mat out(model.data_dim, count);
        for (arma::uword i = 0; i < count; ++i)
        {
            const arma::vec z = draw_normal(model.latent_width, 1, rng);
            const MixtureDensity mix = decode(model, z, cond);
            const arma::vec x = sample_mixture(mix, rng);
            out.col(i) = arma::clamp(model.normalizer.denormalize(x), 0.0, arma::datum::inf);
        }
        return out;
    }

    // --- Checkpoint IO ----------------------------------------------------

    void AugmenterModel::save(const std::filesystem::path &path, std::uint64_t config_hash,
                              std::uint64_t seed) const
    {
        validate();
        Checkpoint ck;
        ck.model = "augmenter";
        ck.config_hash = config_hash;
        ck.seed = seed;
        ck.scalars["data_dim"] = (double)data_dim;
        ck.scalars["condition_width"] = (double)condition_width;
        ck.scalars["latent_width"] = (double)latent_width;
        ck.scalars["components"] = (double)components;
        ck.scalars["covariance_full"] = covariance == CovarianceMode::full ? 1.0 : 0.0;
        ck.scalars["condition_enabled"] = condition_enabled ? 1.0 : 0.0;
        ck.scalars["log_transform"] = normalizer.log_transform ? 1.0 : 0.0;
        ck.vectors["norm_mean"] = normalizer.mean;
        ck.vectors["norm_std"] = normalizer.std_dev;
        ck.networks["encoder"] = {encoder_spec, encoder_params};
        ck.networks["decoder"] = {decoder_spec, decoder_params};
        ck.save(path);
    }

    AugmenterModel AugmenterModel::load(const std::filesystem::path &path)
    {
        const Checkpoint ck = Checkpoint::load(path);
        if (ck.model != "augmenter")
            throw std::runtime_error("'" + path.string() + "' is not an augmenter checkpoint");

        AugmenterModel model;
        model.data_dim = (arma::uword)ck.scalars.at("data_dim");
        model.condition_width = (arma::uword)ck.scalars.at("condition_width");
        model.latent_width = (arma::uword)ck.scalars.at("latent_width");
        model.components = (arma::uword)ck.scalars.at("components");
        model.covariance = ck.scalars.at("covariance_full") != 0.0 ? CovarianceMode::full
                                                                   : CovarianceMode::diagonal;
        model.condition_enabled = ck.scalars.at("condition_enabled") != 0.0;
        model.normalizer.log_transform = ck.scalars.at("log_transform") != 0.0;
        model.normalizer.mean = ck.vectors.at("norm_mean");
        model.normalizer.std_dev = ck.vectors.at("norm_std");
        model.encoder_spec = ck.networks.at("encoder").first;
        model.encoder_params = ck.networks.at("encoder").second;
        model.decoder_spec = ck.networks.at("decoder").first;
        model.decoder_params = ck.networks.at("decoder").second;
        model.validate();
        return model;
    }

} // namespace probeopt
