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

#include <algorithm>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "probeopt/common.hpp"
#include "probeopt/metrics.hpp"

using namespace probeopt;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace
{

    arma::mat random_mat(arma::uword rows, arma::uword cols, Rng &rng)
    {
        std::normal_distribution<double> normal(0.0, 1.0);
        arma::mat m(rows, cols);
        for (arma::uword i = 0; i < m.n_elem; ++i)
            m(i) = normal(rng);
        return m;
    }

    // Scalar-loop discrepancy oracle over the three kernel sums
    double mmd_oracle(const arma::mat &x, const arma::mat &y, double h)
    {
        const arma::uword n = x.n_cols, m = y.n_cols;
        auto k = [&](const arma::vec &a, const arma::vec &b) {
            double q = 0.0;
            for (arma::uword i = 0; i < a.n_elem; ++i)
                q += (a(i) - b(i)) * (a(i) - b(i));
            return std::exp(-q / (2.0 * h * h));
        };

        double kxx = 0.0, kyy = 0.0, kxy = 0.0;
        for (arma::uword i = 0; i < n; ++i)
            for (arma::uword j = 0; j < n; ++j)
                kxx += k(x.col(i), x.col(j));
        for (arma::uword i = 0; i < m; ++i)
            for (arma::uword j = 0; j < m; ++j)
                kyy += k(y.col(i), y.col(j));
        for (arma::uword i = 0; i < n; ++i)
            for (arma::uword j = 0; j < m; ++j)
                kxy += k(x.col(i), y.col(j));
        return kxx / (n * n) + kyy / (m * m) - 2.0 * kxy / (n * m);
    }

} // namespace

TEST_CASE("the kernel is one at zero distance and follows the squared exponential")
{
    const arma::vec x{1.0, 2.0, 3.0};
    CHECK_THAT(gaussian_kernel(x, x, 0.7), WithinAbs(1.0, 1.0e-15));

    // Squared distance equal to 2 h^2 gives exactly exp(-1)
    const arma::vec y{1.0, 2.0, 3.0 + std::sqrt(2.0) * 0.7};
    CHECK_THAT(gaussian_kernel(x, y, 0.7), WithinRel(std::exp(-1.0), 1.0e-12));

    Rng rng(3);
    for (int trial = 0; trial < 20; ++trial)
    {
        const arma::vec a = random_mat(4, 1, rng).col(0);
        const arma::vec b = random_mat(4, 1, rng).col(0);
        const double d2 = arma::dot(a - b, a - b);
        CHECK_THAT(gaussian_kernel(a, b, 1.3), WithinRel(std::exp(-d2 / (2.0 * 1.69)), 1.0e-12));
        CHECK_THAT(gaussian_kernel(a, b, 1.3), WithinRel(gaussian_kernel(b, a, 1.3), 1.0e-15));
    }

    CHECK_THROWS_AS(gaussian_kernel(x, arma::vec{1.0}, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(gaussian_kernel(x, x, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(gaussian_kernel(x, x, -1.0), std::invalid_argument);
}

TEST_CASE("the median bandwidth follows the pairwise distances")
{
    // Two points four apart: the only pairwise distance is the median
    arma::mat two(1, 2);
    two(0, 0) = 0.0;
    two(0, 1) = 4.0;
    CHECK_THAT(median_bandwidth(two), WithinAbs(4.0, 1.0e-14));

    // Identical points collapse the median to zero, which falls back to one
    CHECK_THAT(median_bandwidth(arma::mat(3, 5, arma::fill::ones)), WithinAbs(1.0, 1.0e-15));

    Rng rng(5);
    const arma::mat pooled = random_mat(3, 12, rng);
    std::vector<double> dists;
    for (arma::uword i = 0; i < 12; ++i)
        for (arma::uword j = i + 1; j < 12; ++j)
            dists.push_back(arma::norm(pooled.col(i) - pooled.col(j)));
    std::sort(dists.begin(), dists.end());
    // 66 distances: the median is the midpoint of the two central order statistics
    const double expected = 0.5 * (dists[32] + dists[33]);
    CHECK_THAT(median_bandwidth(pooled), WithinRel(expected, 1.0e-12));

    CHECK_THROWS_AS(median_bandwidth(arma::mat(3, 1, arma::fill::zeros)), std::invalid_argument);
}

TEST_CASE("the discrepancy of a set against itself vanishes")
{
    Rng rng(7);
    const arma::mat x = random_mat(5, 20, rng);
    CHECK(std::abs(mmd(x, x, 1.0)) <= 1.0e-12);
}

TEST_CASE("two singleton sets reduce to two minus twice the kernel")
{
    const arma::vec x{0.5, 1.0};
    const arma::vec y{-0.5, 2.0};
    const double expected = 2.0 - 2.0 * gaussian_kernel(x, y, 0.8);
    CHECK_THAT(mmd(arma::mat(x), arma::mat(y), 0.8), WithinRel(expected, 1.0e-13));
}

TEST_CASE("the discrepancy matches a naive double loop")
{
    Rng rng(11);
    const arma::mat x = random_mat(4, 20, rng);
    const arma::mat y = random_mat(4, 20, rng) + 0.5;
    const double h = median_bandwidth(arma::join_rows(x, y));
    CHECK(std::abs(mmd(x, y, h) - mmd_oracle(x, y, h)) <= 1.0e-12);
}

TEST_CASE("the discrepancy is symmetric and invariant to sample order")
{
    Rng rng(13);
    const arma::mat x = random_mat(3, 10, rng);
    const arma::mat y = random_mat(3, 14, rng);
    CHECK_THAT(mmd(x, y, 1.1), WithinRel(mmd(y, x, 1.1), 1.0e-13));

    arma::mat shuffled = x.cols(arma::shuffle(arma::regspace<arma::uvec>(0, 9)));
    CHECK_THAT(mmd(shuffled, y, 1.1), WithinRel(mmd(x, y, 1.1), 1.0e-12));
}

TEST_CASE("the discrepancy grows as distributions separate")
{
    Rng rng(17);
    const arma::mat x = random_mat(3, 30, rng);
    const arma::mat near = random_mat(3, 30, rng) + 0.2;
    const arma::mat far = random_mat(3, 30, rng) + 3.0;
    CHECK(mmd(x, far, 1.0) > mmd(x, near, 1.0));
}

TEST_CASE("the discrepancy rejects mismatched or empty inputs")
{
    CHECK_THROWS_AS(mmd(arma::mat(3, 2, arma::fill::zeros), arma::mat(4, 2, arma::fill::zeros), 1.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(mmd(arma::mat(3, 0), arma::mat(3, 2, arma::fill::zeros), 1.0),
                    std::invalid_argument);
}

TEST_CASE("tagged sample sets validate and carry their provenance")
{
    SampleSet real;
    real.values = arma::mat(3, 4, arma::fill::ones);
    real.tag = SampleSet::Provenance::real;
    real.validate();
    CHECK(to_string(real.tag) == "real");
    CHECK(to_string(SampleSet::Provenance::augmented) == "augmented");
    CHECK(to_string(SampleSet::Provenance::baseline) == "baseline");

    SampleSet fake = real;
    fake.tag = SampleSet::Provenance::augmented;
    Rng rng(19);
    real.values = random_mat(3, 10, rng);
    fake.values = random_mat(3, 12, rng);
    CHECK_THAT(mmd(real, fake, 1.0), WithinRel(mmd(real.values, fake.values, 1.0), 1.0e-15));

    SampleSet empty;
    empty.values.set_size(3, 0);
    CHECK_THROWS_AS(empty.validate(), std::invalid_argument);

    SampleSet bad = real;
    bad.values(0, 0) = arma::datum::nan;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("the empirical distribution function matches hand-computed steps")
{
    const arma::mat one = empirical_cdf(arma::vec{5.0});
    REQUIRE(one.n_rows == 1);
    CHECK(one(0, 0) == 5.0);
    CHECK(one(0, 1) == 1.0);

    const arma::mat two = empirical_cdf(arma::vec{2.0, 1.0});
    REQUIRE(two.n_rows == 2);
    CHECK(two(0, 0) == 1.0);
    CHECK_THAT(two(0, 1), WithinAbs(0.5, 1.0e-15));
    CHECK(two(1, 0) == 2.0);
    CHECK(two(1, 1) == 1.0);

    CHECK_THROWS_AS(empirical_cdf(arma::vec()), std::invalid_argument);
}

TEST_CASE("the empirical distribution is sorted, monotone and ends at one")
{
    Rng rng(23);
    const arma::vec values = random_mat(41, 1, rng).col(0);
    const arma::mat cdf = empirical_cdf(values);
    REQUIRE(cdf.n_rows == 41);

    // Rank oracle: the probability at each abscissa is its sorted position
    arma::vec sorted = arma::sort(values);
    for (arma::uword i = 0; i < 41; ++i)
    {
        CHECK(cdf(i, 0) == sorted(i));
        CHECK_THAT(cdf(i, 1), WithinAbs((double)(i + 1) / 41.0, 1.0e-15));
        if (i > 0)
        {
            CHECK(cdf(i, 0) >= cdf(i - 1, 0));
            CHECK(cdf(i, 1) > cdf(i - 1, 1));
        }
    }
    CHECK(cdf(40, 1) == 1.0);
}
