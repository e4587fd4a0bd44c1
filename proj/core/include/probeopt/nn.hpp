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

#ifndef probeopt_nn_H
#define probeopt_nn_H

#include <armadillo>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "probeopt/common.hpp"

namespace probeopt
{

    enum class Activation
    {
        identity,
        prelu,       // One learned slope per layer
        softmax,     // Columnwise; final layer only
        exponential
    };

    std::string to_string(Activation activation);
    Activation activation_from_string(const std::string &name);

    struct LayerSpec
    {
        arma::uword width = 1;
        Activation activation = Activation::identity;
        double dropout = 0.0; // Drop probability, applied after the activation
    };

    // Dense feed-forward network; data flows as columns of a matrix so a batch
    // is a single input_width x batch_size matrix.
    struct DenseNetSpec
    {
        arma::uword input_width = 1;
        std::vector<LayerSpec> layers;

        arma::uword output_width() const;
        void validate() const;
    };

    // Flat parameter storage per layer: weights (output x input, column-major),
    // then biases, then the PReLU slope if the layer has one.
    struct ParamLayout
    {
        struct Layer
        {
            arma::uword weight_offset = 0;
            arma::uword input_width = 0;
            arma::uword output_width = 0;
            arma::uword bias_offset = 0;
            arma::uword slope_offset = 0;
            bool has_slope = false;
        };

        explicit ParamLayout(const DenseNetSpec &spec);

        arma::uword total = 0;
        std::vector<Layer> layers;
    };

    // Glorot-uniform weights (limit sqrt(6 / (fan_in + fan_out))), zero biases,
    // PReLU slopes 0.25; deterministic in the seed.
    arma::vec init_params(const DenseNetSpec &spec, std::uint64_t seed);

    enum class NetMode
    {
        train,
        eval
    };

    // Everything forward() records so backward() can produce exact gradients:
    // per-layer inputs, pre-activations, activations, dropout scale masks, and
    // a snapshot of the parameters the pass used.
    struct ForwardTape
    {
        DenseNetSpec spec;
        NetMode mode = NetMode::eval;
        std::uint64_t seed = 0;
        arma::vec params;              // Snapshot used by this pass
        std::uint64_t params_stamp = 0;
        arma::mat input;
        std::vector<arma::mat> pre;    // Z_l = W_l A_{l-1} + b_l
        std::vector<arma::mat> post;   // activation(Z_l), before dropout
        std::vector<arma::mat> masks;  // Dropout scales 0 or 1/(1-p); empty when unused
        std::vector<arma::mat> out;    // Layer outputs after dropout

        const arma::mat &output() const { return out.back(); }

        // Throws if "params" no longer matches the snapshot this tape was
        // recorded with (stale-tape contract violation).
        void require_fresh(const arma::vec &params) const;
    };

    // Runs the network on a batch (columns = samples). Train mode applies
    // inverted dropout (kept units scaled by 1/(1-p)) with masks drawn
    // deterministically from the seed; eval mode ignores dropout and the seed.
    ForwardTape forward(const DenseNetSpec &spec, const arma::vec &params, const arma::mat &input,
                        NetMode mode, std::uint64_t seed = 0);

    struct NetGradients
    {
        arma::vec params; // d loss / d parameter, flat layout
        arma::mat input;  // d loss / d input entry
    };

    // Exact reverse-mode gradients of a scalar loss given d loss / d output.
    NetGradients backward(const ForwardTape &tape, const arma::mat &output_grad);

    // Adaptive-moment estimation with bias correction
    struct AdamConfig
    {
        double lr = 1.0e-3;
        double beta1 = 0.9;
        double beta2 = 0.999;
        double eps = 1.0e-8;
    };

    struct AdamState
    {
        arma::vec m;
        arma::vec v;
        arma::uword t = 0;
    };

    void adam_step(arma::vec &params, const arma::vec &grad, AdamState &state, const AdamConfig &cfg);

    // lr = base_lr * gamma^floor(epoch / step_size)
    double step_lr_schedule(double base_lr, arma::uword step_size, double gamma, arma::uword epoch);

    // Versioned checkpoint container: named networks (spec + flat parameters),
    // named vectors (e.g. normalization statistics) and named scalars, plus the
    // provenance pair (config hash, seed). Text header per entry, parameter
    // payloads as little-endian doubles.
    struct Checkpoint
    {
        std::string model;
        std::uint64_t config_hash = 0;
        std::uint64_t seed = 0;
        std::map<std::string, double> scalars;
        std::map<std::string, arma::vec> vectors;
        std::map<std::string, std::pair<DenseNetSpec, arma::vec>> networks;

        void save(const std::filesystem::path &path) const;
        static Checkpoint load(const std::filesystem::path &path);
    };

} // namespace probeopt

#endif
