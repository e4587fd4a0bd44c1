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

#include <catch2/catch_amalgamated.hpp>

#include "probeopt/channel.hpp"

using namespace probeopt;
using Catch::Matchers::WithinAbs;

namespace
{

    // Independent scalar-loop evaluation of the planar response: entry
    // (ky * m_z + kz) computed term by term without any Kronecker machinery.
    arma::cx_vec response_oracle(double az, double el, const ArrayGeometry &g)
    {
        arma::cx_vec a(g.size());
        for (arma::uword ky = 0; ky < g.m_y; ++ky)
            for (arma::uword kz = 0; kz < g.m_z; ++kz)
            {
                const double phase_y = arma::datum::pi * (double)ky * std::sin(el) * std::sin(az);
                const double phase_z = arma::datum::pi * (double)kz * std::cos(el);
                a(ky * g.m_z + kz) = std::complex<double>(std::cos(phase_y), std::sin(phase_y)) *
                                     std::complex<double>(std::cos(phase_z), std::sin(phase_z));
            }
        return a;
    }

} // namespace

TEST_CASE("array response at boresight is all ones")
{
    const ArrayGeometry g{3, 5};
    const arma::cx_vec a = array_response(0.0, arma::datum::pi / 2.0, g);
    REQUIRE(a.n_elem == 15);
    CHECK(arma::norm(a - arma::cx_vec(15, arma::fill::ones)) < 1e-12);
}

TEST_CASE("2x1 array at azimuth pi/2 gives [1, -1]")
{
    const ArrayGeometry g{2, 1};
    const arma::cx_vec a = array_response(arma::datum::pi / 2.0, arma::datum::pi / 2.0, g);
    CHECK_THAT(a(0).real(), WithinAbs(1.0, 1e-12));
    CHECK_THAT(a(0).imag(), WithinAbs(0.0, 1e-12));
    CHECK_THAT(a(1).real(), WithinAbs(-1.0, 1e-12));
    CHECK_THAT(a(1).imag(), WithinAbs(0.0, 1e-12));
}

TEST_CASE("array response matches the scalar-loop oracle on random angles")
{
    const ArrayGeometry g{8, 8};
    Rng rng(123);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial)
    {
        const double az = (2.0 * uni(rng) - 1.0) * arma::datum::pi;
        const double el = 0.1 + 0.8 * arma::datum::pi * uni(rng);
        const arma::cx_vec a = array_response(az, el, g);
        CHECK(arma::norm(a - response_oracle(az, el, g)) < 1e-12);
        for (const auto &entry : a)
            CHECK_THAT(std::abs(entry), WithinAbs(1.0, 1e-12));
    }
}

TEST_CASE("DFT codebook of a single antenna is [[1]]")
{
    const arma::cx_mat f = dft_codebook(ArrayGeometry{1, 1});
    REQUIRE(f.n_rows == 1);
    REQUIRE(f.n_cols == 1);
    CHECK(std::abs(f(0, 0) - std::complex<double>(1.0, 0.0)) < 1e-15);
}

TEST_CASE("2-point DFT codebook columns")
{
    const arma::cx_mat f = dft_codebook(ArrayGeometry{2, 1});
    const double s = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(f(0, 0) - std::complex<double>(s, 0.0)) < 1e-12);
    CHECK(std::abs(f(1, 0) - std::complex<double>(s, 0.0)) < 1e-12);
    CHECK(std::abs(f(0, 1) - std::complex<double>(s, 0.0)) < 1e-12);
    CHECK(std::abs(f(1, 1) - std::complex<double>(-s, 0.0)) < 1e-12);
}

TEST_CASE("8x8 DFT codebook is unitary")
{
    const ArrayGeometry g{8, 8};
    const arma::cx_mat f = dft_codebook(g);
    const arma::cx_mat gram = f.t() * f;
    CHECK(arma::norm(gram - arma::cx_mat(arma::eye<arma::mat>(64, 64), arma::mat(64, 64)), "inf") <
          1e-12);
}

TEST_CASE("single unit-gain zero-delay path reproduces the array response")
{
    const ArrayGeometry g{4, 4};
    const PathComponent path{1.0, 0.0, 0.3, 1.4};
    const arma::cx_vec h = synthesize_link(g, {path}, 100.0e6);
    CHECK(arma::norm(h - array_response(0.3, 1.4, g)) < 1e-12);
}

TEST_CASE("three fixed paths match the hand-summed oracle")
{
    const ArrayGeometry g{3, 2};
    const double w = 100.0e6;
    const std::vector<PathComponent> paths = {{0.8, 10.0e-9, 0.5, 1.5},
                                              {0.3, 42.0e-9, -1.1, 1.6},
                                              {0.05, 77.0e-9, 2.0, 1.45}};
    arma::cx_vec expected(g.size(), arma::fill::zeros);
    for (const auto &p : paths)
    {
        const double phase = 2.0 * arma::datum::pi * p.delay * w;
        expected += std::sqrt(p.gain) * std::complex<double>(std::cos(phase), std::sin(phase)) *
                    response_oracle(p.azimuth, p.elevation, g);
    }
    CHECK(arma::norm(synthesize_link(g, paths, w) - expected) < 1e-12);
}

TEST_CASE("synthesize_link validates path parameters")
{
    const ArrayGeometry g{2, 2};
    CHECK_THROWS_AS(synthesize_link(g, {{-0.1, 0.0, 0.0, 1.5}}, 1.0e8), std::invalid_argument);
    CHECK_THROWS_AS(synthesize_link(g, {{1.0, 0.0, 0.0, 0.0}}, 1.0e8), std::invalid_argument);
}

TEST_CASE("orthogonal-path channel energy is M times the gain sum")
{
    // el = pi/2 makes a_z constant; sin(az) in {0, 1/2} makes a_y ramps that
    // are columns of the 4-point DFT grid, hence orthogonal.
    const ArrayGeometry g{4, 1};
    const std::vector<PathComponent> paths = {{0.7, 3.0e-9, 0.0, arma::datum::pi / 2.0},
                                              {0.2, 9.0e-9, std::asin(0.5), arma::datum::pi / 2.0}};
    const arma::cx_vec h = synthesize_link(g, paths, 100.0e6);
    const double energy = std::pow(arma::norm(h), 2);
    CHECK_THAT(energy, WithinAbs(4.0 * (0.7 + 0.2), 1e-9));
}

TEST_CASE("default deployment geometry")
{
    const ScenarioConfig s = ScenarioConfig::defaults();
    s.validate();
    REQUIRE(s.ap_positions.n_cols == 3);
    REQUIRE(s.region_centers.n_cols == 6);
    // First AP on the -y side of the 40 m circle at 8 m height
    CHECK_THAT(s.ap_positions(0, 0), WithinAbs(0.0, 1e-9));
    CHECK_THAT(s.ap_positions(1, 0), WithinAbs(-40.0, 1e-9));
    CHECK_THAT(s.ap_positions(2, 0), WithinAbs(8.0, 1e-9));
    for (arma::uword b = 0; b < 3; ++b)
        CHECK_THAT(std::hypot(s.ap_positions(0, b), s.ap_positions(1, b)), WithinAbs(40.0, 1e-9));
    // Regions 6 m apart on the x-axis at 1.5 m height, centered on the origin
    for (arma::uword u = 0; u + 1 < 6; ++u)
        CHECK_THAT(s.region_centers(0, u + 1) - s.region_centers(0, u), WithinAbs(6.0, 1e-9));
    CHECK_THAT(s.region_centers(0, 0), WithinAbs(-15.0, 1e-9));
    CHECK_THAT(s.region_centers(1, 2), WithinAbs(0.0, 1e-9));
    CHECK_THAT(s.region_centers(2, 5), WithinAbs(1.5, 1e-9));
}

TEST_CASE("scenario validation rejects bad parameters")
{
    ScenarioConfig s = ScenarioConfig::defaults();
    s.tx_power_w = 0.0;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s = ScenarioConfig::defaults();
    s.noise_power_w = -1.0;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s = ScenarioConfig::defaults();
    s.ap_positions = arma::mat(3, 2, arma::fill::zeros); // Wrong AP count
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}

TEST_CASE("generate_channel is deterministic in the seed")
{
    ScenarioConfig s = ScenarioConfig::defaults();
    s.num_aps = 2;
    s.num_users = 2;
    s.ap_positions = ScenarioConfig::default_ap_positions(2);
    s.region_centers = ScenarioConfig::default_region_centers(2);
    const ChannelRealization a = generate_channel(s, 99);
    const ChannelRealization b = generate_channel(s, 99);
    const ChannelRealization c = generate_channel(s, 100);
    REQUIRE(a.h.n_rows == 64);
    REQUIRE(a.h.n_cols == 2);
    REQUIRE(a.h.n_slices == 2);
    CHECK(arma::approx_equal(arma::abs(a.h - b.h), arma::cube(64, 2, 2, arma::fill::zeros),
                             "absdiff", 0.0));
    CHECK(arma::norm(arma::vectorise(a.h - c.h)) > 0.0);
    CHECK(arma::approx_equal(a.user_positions, b.user_positions, "absdiff", 0.0));
}

TEST_CASE("stacked channel concatenates per-AP links columnwise")
{
    ScenarioConfig s = ScenarioConfig::defaults();
    s.num_aps = 2;
    s.num_users = 3;
    s.ap_positions = ScenarioConfig::default_ap_positions(2);
    s.region_centers = ScenarioConfig::default_region_centers(3);
    const ChannelRealization ch = generate_channel(s, 5);
    const arma::cx_mat h = ch.stacked();
    REQUIRE(h.n_rows == 2 * 64);
    REQUIRE(h.n_cols == 3);
    for (arma::uword u = 0; u < 3; ++u)
    {
        CHECK(arma::norm(h.col(u).rows(0, 63) - ch.h.slice(0).col(u)) == 0.0);
        CHECK(arma::norm(h.col(u).rows(64, 127) - ch.h.slice(1).col(u)) == 0.0);
    }
}

TEST_CASE("sampled paths respect the configured ranges")
{
    const ScenarioConfig s = ScenarioConfig::defaults();
    Rng rng(7);
    const arma::vec pos = s.region_centers.col(0);
    for (int trial = 0; trial < 10; ++trial)
    {
        const auto paths = sample_paths(s, 0, 0, pos, rng);
        REQUIRE(paths.size() == s.paths_per_link);
        double total_gain = 0.0;
        for (const auto &p : paths)
        {
            CHECK(p.gain >= 0.0);
            CHECK(p.delay >= 0.0);
            CHECK(p.delay <= s.delay_max_s);
            CHECK(p.elevation >= s.elevation_min_rad);
            CHECK(p.elevation <= s.elevation_max_rad);
            CHECK(p.azimuth >= -arma::datum::pi);
            CHECK(p.azimuth < arma::datum::pi);
            total_gain += p.gain;
        }
        // Total gain equals the log-distance pathloss of the link
        const double dist = arma::norm(pos - s.ap_positions.col(0));
        const double lam = 299792458.0 / s.carrier_hz;
        const double pathloss = std::pow(lam / (4.0 * arma::datum::pi), 2) /
                                std::pow(dist, s.pathloss_exponent);
        CHECK_THAT(total_gain, WithinAbs(pathloss, 1e-12 + 1e-9 * pathloss));
    }
}

TEST_CASE("user positions stay inside their region squares")
{
    const ScenarioConfig s = ScenarioConfig::defaults();
    Rng rng(3);
    const arma::mat pos = sample_user_positions(s, rng);
    REQUIRE(pos.n_cols == s.num_users);
    for (arma::uword u = 0; u < s.num_users; ++u)
    {
        CHECK(std::abs(pos(0, u) - s.region_centers(0, u)) <= s.region_side / 2.0);
        CHECK(std::abs(pos(1, u) - s.region_centers(1, u)) <= s.region_side / 2.0);
        CHECK(pos(2, u) == s.region_centers(2, u));
    }
}

TEST_CASE("noise calibration hits the target median MRT SNR")
{
    ScenarioConfig s = ScenarioConfig::defaults();
    const std::uint64_t seed = 17;
    const arma::uword sets = 32;
    s.noise_power_w = calibrate_noise_power(s, seed, sets, 10.0);
    CHECK(s.noise_power_w > 0.0);

    // Oracle: recompute the median best-AP MRT receive power over the same
    // channel draws and verify power / noise is 10 dB.
    std::vector<double> snr_db;
    for (arma::uword i = 0; i < sets; ++i)
    {
        const ChannelRealization ch = generate_channel(s, mix_seed(seed, i));
        for (arma::uword u = 0; u < s.num_users; ++u)
        {
            double best = 0.0;
            for (arma::uword b = 0; b < s.num_aps; ++b)
                best = std::max(best,
                                s.tx_power_w * std::pow(arma::norm(ch.h.slice(b).col(u)), 2));
            snr_db.push_back(10.0 * std::log10(best / s.noise_power_w));
        }
    }
    std::sort(snr_db.begin(), snr_db.end());
    const double median = snr_db[snr_db.size() / 2];
    CHECK_THAT(median, WithinAbs(10.0, 0.5));
}

TEST_CASE("scenario round-trips through the key-value reader")
{
    const auto cfg = KeyValueConfig::from_string("num_aps = 2\n"
                                                 "num_users = 4\n"
                                                 "m_y = 4\n"
                                                 "m_z = 4\n"
                                                 "paths_per_link = 3\n"
                                                 "tx_power_w = 5\n"
                                                 "noise_power_w = 1e-10\n"
                                                 "region_side_m = 2\n");
    const ScenarioConfig s = ScenarioConfig::from_config(cfg);
    CHECK(s.num_aps == 2);
    CHECK(s.num_users == 4);
    CHECK(s.geometry.m_y == 4);
    CHECK(s.paths_per_link == 3);
    CHECK(s.tx_power_w == 5.0);
    CHECK(s.noise_power_w == 1e-10);
    CHECK(s.region_side == 2.0);
    CHECK(s.ap_positions.n_cols == 2);
    CHECK(s.region_centers.n_cols == 4);
}
