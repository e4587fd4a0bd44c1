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

#ifndef probeopt_augmenter_H
#define probeopt_augmenter_H

#include <armadillo>
#include <filesystem>
#include <vector>

#include "probeopt/mixture.hpp"
#include "probeopt/nn.hpp"

namespace probeopt
{

    // Diagonal Gaussian over the latent space, inferred by the encoder
    struct LatentGaussian
    {
        arma::vec mu;    // Length latent_width
        arma::vec sigma; // > 0 elementwise
        void validate() const;
    };

    enum class CovarianceMode
    {
        full,    // Upper-triangular precision factors, d(d+1)/2 values per component
        diagonal // Diagonal factors only, d values per component
    };

    // Per-coordinate affine normalization of PBM vectors, optionally in the
    // log domain ln(r + 1e-12). Statistics come from the fitting set only; all
    // model inputs, generated samples and distribution metrics live in this
    // normalized space.
    struct PbmNormalizer
    {
        static constexpr double log_eps = 1.0e-12;
        static constexpr double min_std = 1.0e-6;

        arma::vec mean;
        arma::vec std_dev;
        bool log_transform = true;

        static PbmNormalizer fit(const arma::mat &samples, bool log_transform); // samples: d x n
        arma::vec normalize(const arma::vec &r) const;
        arma::mat normalize_batch(const arma::mat &r) const;
        arma::vec denormalize(const arma::vec &x) const;
        void validate() const;
    };

    struct AugmenterHyper
    {
        arma::uword latent_width = 64;
        arma::uword components = 8;
        std::vector<arma::uword> encoder_hidden = {256, 128};
        std::vector<arma::uword> decoder_hidden = {256, 128};
        double dropout = 0.3;
        CovarianceMode covariance = CovarianceMode::full;
        bool condition_enabled = true; // false: condition input zeroed (plain VAE baseline)
        bool log_transform = true;     // Normalize PBMs in the log domain

        arma::uword epochs = 50;
        arma::uword batch_size = 64;
        double base_lr = 1.0e-3;
        arma::uword lr_step = 50;
        double lr_gamma = 0.5;
        std::uint64_t init_seed = 1;
        std::uint64_t train_seed = 2;
    };

    // Conditional VAE encoder plus mixture-density decoder. The decoder's raw
    // output concatenates [G mixture logits | G x d component means |
    // G x tri_size() triangular factor values].
    struct AugmenterModel
    {
        DenseNetSpec encoder_spec;
        DenseNetSpec decoder_spec;
        arma::vec encoder_params;
        arma::vec decoder_params;

        arma::uword data_dim = 0;        // d, the PBM vector length
        arma::uword condition_width = 0;
        arma::uword latent_width = 0;
        arma::uword components = 0;      // G
        CovarianceMode covariance = CovarianceMode::full;
        bool condition_enabled = true;
        PbmNormalizer normalizer;

        // Diagonal pre-activations are clamped to this range before exp
        static constexpr double diag_clamp = 7.0;

        arma::uword tri_size() const;
        arma::uword decoder_output_width() const;
        void validate() const;

        void save(const std::filesystem::path &path, std::uint64_t config_hash,
                  std::uint64_t seed) const;
        static AugmenterModel load(const std::filesystem::path &path);
    };

    // Fresh model with Glorot-initialized networks; the normalizer is identity
    // until train_augmenter fits it.
    AugmenterModel make_augmenter(arma::uword data_dim, arma::uword condition_width,
                                  const AugmenterHyper &hyper);

    // Encoder pass (eval mode) on a raw PBM vector: returns the latent Gaussian
    LatentGaussian encode(const AugmenterModel &model, const arma::vec &r, const arma::vec &condition);

    // z = mu + eps o sigma
    arma::vec reparameterize(const LatentGaussian &lat, const arma::vec &eps);

    // Decoder pass (eval mode): mixture over the normalized PBM space
    MixtureDensity decode(const AugmenterModel &model, const arma::vec &z, const arma::vec &condition);

    // KL(N(mu, diag sigma^2) || N(0, I)) = 0.5 sum (mu^2 + sigma^2 - 2 ln sigma - 1)
    double kl_to_standard_normal(const LatentGaussian &lat);

    struct Loss1Result
    {
        double loss = 0.0;            // nll + kl + anti_degeneracy, batch mean
        double nll = 0.0;             // -ln mixture density of the data
        double kl = 0.0;
        double anti_degeneracy = 0.0; // -(1/G) sum_g ln p_g, discourages dead components
        arma::vec encoder_grad;
        arma::vec decoder_grad;
    };

    // Training loss and exact parameter gradients for one sample. The noise
    // eps must be a latent_width draw from N(0, I).
    Loss1Result loss1(const AugmenterModel &model, const arma::vec &r, const arma::vec &condition,
                      const arma::vec &eps, NetMode mode = NetMode::eval,
                      std::uint64_t dropout_seed = 0);

    // Batch version: columns are samples; loss and gradients are batch means
    Loss1Result loss1_batch(const AugmenterModel &model, const arma::mat &r, const arma::mat &condition,
                            const arma::mat &eps, NetMode mode, std::uint64_t dropout_seed);

    struct TrainEpoch
    {
        arma::uword epoch = 0;
        double train_loss = 0.0;
        double val_loss = 0.0;
        double lr = 0.0;
    };

    struct AugmenterTrainResult
    {
        AugmenterModel model; // Lowest-validation-loss state
        std::vector<TrainEpoch> log;
        double best_val_loss = 0.0;
        bool aborted = false; // True if training hit a non-finite loss
    };

    // Paired PBM/condition training data, columns = samples
    struct ConditionedSamples
    {
        arma::mat pbm;       // data_dim x n, raw PBM domain
        arma::mat condition; // condition_width x n
        arma::uword size() const { return pbm.n_cols; }
        void validate() const;
    };

    // Mini-batch training of Loss1 with the step learning-rate schedule.
    // Fits the normalizer on the training set, tracks the validation loss each
    // epoch and returns the best-validation model. A non-finite loss aborts
    // training and returns the last stable state.
    AugmenterTrainResult train_augmenter(const ConditionedSamples &train,
                                         const ConditionedSamples &validation,
                                         const AugmenterHyper &hyper);

    // Generation: draws z ~ N(0, I), decodes under the condition, samples the
    // mixture, maps back to the raw PBM domain and clamps at 0. Columns are
    // samples; pure function of (model, condition, count, seed).
    arma::mat generate_pbms(const AugmenterModel &model, const arma::vec &condition,
                            arma::uword count, std::uint64_t seed);

} // namespace probeopt

#endif
