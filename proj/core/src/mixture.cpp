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

#include "probeopt/mixture.hpp"

#include <stdexcept>

namespace probeopt
{

    void MixtureDensity::validate() const
    {
        const arma::uword g = components();
        if (g < 1)
            throw std::invalid_argument("MixtureDensity: at least one component required");
        if (means.size() != g || chol.size() != g)
            throw std::invalid_argument("MixtureDensity: weights, means and factors must agree on G");
        if (!weights.is_finite() || weights.min() < 0.0 ||
            std::abs(arma::accu(weights) - 1.0) > 1.0e-9)
            throw std::invalid_argument("MixtureDensity: weights must form a simplex");

        const arma::uword d = dim();
        for (arma::uword i = 0; i < g; ++i)
        {
            if (means[i].n_elem != d || chol[i].n_rows != d || chol[i].n_cols != d)
                throw std::invalid_argument("MixtureDensity: inconsistent dimensions");
            if (!means[i].is_finite() || !chol[i].is_finite())
                throw std::invalid_argument("MixtureDensity: non-finite parameters");
            for (arma::uword r = 0; r < d; ++r)
            {
                if (chol[i](r, r) <= 0.0)
                    throw std::invalid_argument("MixtureDensity: factor diagonals must be > 0");
                for (arma::uword c = 0; c < r; ++c)
                    if (chol[i](r, c) != 0.0)
                        throw std::invalid_argument("MixtureDensity: factors must be upper-triangular");
            }
        }
    }

    double component_log_density(const arma::vec &mean, const arma::mat &chol_precision,
                                 const arma::vec &r)
    {
        const arma::uword d = mean.n_elem;
        if (r.n_elem != d || chol_precision.n_rows != d || chol_precision.n_cols != d)
            throw std::invalid_argument("component_log_density: dimension mismatch");

        const arma::vec e = chol_precision * (r - mean);
        return -0.5 * (double)d * std::log(2.0 * arma::datum::pi) - 0.5 * arma::dot(e, e) +
               arma::accu(arma::log(chol_precision.diag()));
    }

    double mixture_log_density(const MixtureDensity &mix, const arma::vec &r)
    {
        mix.validate();
        const arma::uword g = mix.components();
        arma::vec terms(g);
        for (arma::uword i = 0; i < g; ++i)
            terms(i) = mix.weights(i) > 0.0
                           ? std::log(mix.weights(i)) + component_log_density(mix.means[i], mix.chol[i], r)
                           : -arma::datum::inf;

        const double top = terms.max();
        if (!std::isfinite(top))
            return top;
        return top + std::log(arma::accu(arma::exp(terms - top)));
    }

    arma::vec sample_component(const MixtureDensity &mix, arma::uword component, Rng &rng)
    {
        mix.validate();
        if (component >= mix.components())
            throw std::invalid_argument("sample_component: component index out of range");

        std::normal_distribution<double> normal(0.0, 1.0);
        arma::vec eps(mix.dim());
        for (arma::uword i = 0; i < eps.n_elem; ++i)
            eps(i) = normal(rng);
        return mix.means[component] + arma::solve(arma::trimatu(mix.chol[component]), eps);
    }

    arma::vec sample_mixture(const MixtureDensity &mix, Rng &rng)
    {
        mix.validate();
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        const double u = uni(rng);
        double cumulative = 0.0;
        arma::uword g = mix.components() - 1; // Fall through to the last component
        for (arma::uword i = 0; i < mix.components(); ++i)
        {
            cumulative += mix.weights(i);
            if (u < cumulative)
            {
                g = i;
                break;
            }
        }
        return sample_component(mix, g, rng);
    }

    arma::vec sample_pbm(const MixtureDensity &mix, std::uint64_t seed)
    {
        Rng rng(seed);
        return arma::clamp(sample_mixture(mix, rng), 0.0, arma::datum::inf);
    }

} // namespace probeopt
