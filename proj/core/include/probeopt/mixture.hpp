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

#ifndef probeopt_mixture_H
#define probeopt_mixture_H

#include <armadillo>
#include <vector>

#include "probeopt/common.hpp"

namespace probeopt
{

    // Gaussian mixture parameterized by upper-triangular Cholesky factors of
    // the per-component precisions: precision_g = chol_g^T chol_g, so the
    // covariance is (chol_g^T chol_g)^-1 without any explicit inversion.
    struct MixtureDensity
    {
        arma::vec weights;            // Simplex of length G
        std::vector<arma::vec> means; // G vectors of length d
        std::vector<arma::mat> chol;  // G upper-triangular d x d, positive diagonal

        arma::uword components() const { return weights.n_elem; }
        arma::uword dim() const { return means.empty() ? 0 : means[0].n_elem; }
        void validate() const;
    };

    // ln N(r; mean, (U^T U)^-1) = -(d/2) ln(2 pi) - 0.5 ||U (r - mean)||^2 + sum_j ln U_jj
    double component_log_density(const arma::vec &mean, const arma::mat &chol_precision,
                                 const arma::vec &r);

    // ln sum_g pi_g p_g(r), stabilized by subtracting the largest exponent
    double mixture_log_density(const MixtureDensity &mix, const arma::vec &r);

    // mean_g + U_g^-1 eps by back-substitution, eps ~ N(0, I)
    arma::vec sample_component(const MixtureDensity &mix, arma::uword component, Rng &rng);

    // Draws the component from the weights, then the Gaussian; unclamped
    arma::vec sample_mixture(const MixtureDensity &mix, Rng &rng);

    // One mixture draw clamped elementwise at 0 (probing beam measurements are
    // received powers); pure function of (mix, seed).
    arma::vec sample_pbm(const MixtureDensity &mix, std::uint64_t seed);

} // namespace probeopt

#endif
