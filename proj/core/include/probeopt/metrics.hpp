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

#ifndef probeopt_metrics_H
#define probeopt_metrics_H

#include <armadillo>
#include <string>

namespace probeopt
{

    // A set of equal-dimension sample vectors (columns) with its origin tag
    struct SampleSet
    {
        enum class Provenance
        {
            real,
            augmented,
            baseline
        };

        arma::mat values; // dim x count
        Provenance tag = Provenance::real;

        void validate() const;
    };

    std::string to_string(SampleSet::Provenance tag);

    // exp(-||x - y||^2 / (2 h^2)), in (0, 1]
    double gaussian_kernel(const arma::vec &x, const arma::vec &y, double bandwidth);

    // Median of the pairwise Euclidean distances between the columns of the
    // pooled set; falls back to 1 when every point coincides.
    double median_bandwidth(const arma::mat &pooled);

    // Biased maximum-mean-discrepancy statistic with the Gaussian kernel:
    // (1/n^2) sum k(x,x') + (1/m^2) sum k(y,y') - (2/nm) sum k(x,y)
    double mmd(const arma::mat &x, const arma::mat &y, double bandwidth);
    double mmd(const SampleSet &x, const SampleSet &y, double bandwidth);

    // Right-continuous empirical CDF as rows of (value, probability), sorted
    // ascending with probabilities k/n
    arma::mat empirical_cdf(const arma::vec &values);

} // namespace probeopt

#endif
