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

#include "probeopt/metrics.hpp"

#include <stdexcept>

namespace probeopt
{

    void SampleSet::validate() const
    {
        if (values.n_cols < 1 || values.n_rows < 1)
            throw std::invalid_argument("SampleSet: at least one sample of dimension >= 1 required");
        if (!values.is_finite())
            throw std::invalid_argument("SampleSet: non-finite entries");
    }

    std::string to_string(SampleSet::Provenance tag)
    {
        switch (tag)
        {
        case SampleSet::Provenance::real:
            return "real";
        case SampleSet::Provenance::augmented:
            return "augmented";
        case SampleSet::Provenance::baseline:
            return "baseline";
        }
        throw std::invalid_argument("to_string: unknown provenance");
    }

    double gaussian_kernel(const arma::vec &x, const arma::vec &y, double bandwidth)
    {
        if (x.n_elem != y.n_elem)
            throw std::invalid_argument("gaussian_kernel: dimension mismatch");
        if (bandwidth <= 0.0)
            throw std::invalid_argument("gaussian_kernel: bandwidth must be > 0");
        const arma::vec diff = x - y;
        return std::exp(-arma::dot(diff, diff) / (2.0 * bandwidth * bandwidth));
    }

    double median_bandwidth(const arma::mat &pooled)
    {
        const arma::uword n = pooled.n_cols;
        if (n < 2)
            throw std::invalid_argument("median_bandwidth: at least two points required");

        arma::vec distances(n * (n - 1) / 2);
        arma::uword k = 0;
        for (arma::uword i = 0; i < n; ++i)
            for (arma::uword j = i + 1; j < n; ++j)
                distances(k++) = arma::norm(pooled.col(i) - pooled.col(j));

        const double med = arma::median(distances);
        return med > 0.0 ? med : 1.0;
    }

    double mmd(const arma::mat &x, const arma::mat &y, double bandwidth)
    {
        if (x.n_rows != y.n_rows)
            throw std::invalid_argument("mmd: sample dimension mismatch");
        const arma::uword n = x.n_cols, m = y.n_cols;
        if (n < 1 || m < 1)
            throw std::invalid_argument("mmd: empty sample set");

        double kxx = 0.0, kyy = 0.0, kxy = 0.0;
        for (arma::uword i = 0; i < n; ++i)
            for (arma::uword j = 0; j < n; ++j)
                kxx += gaussian_kernel(x.col(i), x.col(j), bandwidth);
        for (arma::uword i = 0; i < m; ++i)
            for (arma::uword j = 0; j < m; ++j)
                kyy += gaussian_kernel(y.col(i), y.col(j), bandwidth);
        for (arma::uword i = 0; i < n; ++i)
            for (arma::uword j = 0; j < m; ++j)
                kxy += gaussian_kernel(x.col(i), y.col(j), bandwidth);

        return kxx / (double)(n * n) + kyy / (double)(m * m) - 2.0 * kxy / (double)(n * m);
    }

    double mmd(const SampleSet &x, const SampleSet &y, double bandwidth)
    {
        x.validate();
        y.validate();
        return mmd(x.values, y.values, bandwidth);
    }

    arma::mat empirical_cdf(const arma::vec &values)
    {
        if (values.n_elem < 1)
            throw std::invalid_argument("empirical_cdf: empty input");
        const arma::vec sorted = arma::sort(values);
        arma::mat cdf(values.n_elem, 2);
        for (arma::uword i = 0; i < sorted.n_elem; ++i)
        {
            cdf(i, 0) = sorted(i);
            cdf(i, 1) = (double)(i + 1) / (double)sorted.n_elem;
        }
        return cdf;
    }

} // namespace probeopt
