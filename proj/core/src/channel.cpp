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

#include "probeopt/channel.hpp"

#include <stdexcept>

namespace probeopt
{

    void ArrayGeometry::validate() const
    {
        if (m_y < 1 || m_z < 1)
            throw std::invalid_argument("ArrayGeometry: antenna counts must be >= 1");
    }

    ScenarioConfig ScenarioConfig::defaults()
    {
        ScenarioConfig cfg;
        cfg.ap_positions = default_ap_positions(cfg.num_aps);
        cfg.region_centers = default_region_centers(cfg.num_users);
        return cfg;
    }

    arma::mat ScenarioConfig::default_ap_positions(arma::uword num_aps)
    {
        if (num_aps < 1)
            throw std::invalid_argument("ScenarioConfig: num_aps must be >= 1");
        const double radius = 40.0, height = 8.0;
        arma::mat pos(3, num_aps);
        for (arma::uword b = 0; b < num_aps; ++b)
        {
            double angle = -0.5 * arma::datum::pi + 2.0 * arma::datum::pi * (double)b / (double)num_aps;
            pos(0, b) = radius * std::cos(angle);
            pos(1, b) = radius * std::sin(angle);
            pos(2, b) = height;
        }
        return pos;
    }

    arma::mat ScenarioConfig::default_region_centers(arma::uword num_users)
    {
        if (num_users < 1)
            throw std::invalid_argument("ScenarioConfig: num_users must be >= 1");
        const double spacing = 6.0, height = 1.5;
        arma::mat pos(3, num_users);
        for (arma::uword u = 0; u < num_users; ++u)
        {
            pos(0, u) = spacing * ((double)u - 0.5 * (double)(num_users - 1));
            pos(1, u) = 0.0;
            pos(2, u) = height;
        }
        return pos;
    }

    ScenarioConfig ScenarioConfig::from_config(const KeyValueConfig &cfg)
    {
        ScenarioConfig sc;
        sc.num_aps = cfg.get_uword("num_aps", sc.num_aps);
        sc.num_users = cfg.get_uword("num_users", sc.num_users);
        sc.geometry.m_y = cfg.get_uword("m_y", sc.geometry.m_y);
        sc.geometry.m_z = cfg.get_uword("m_z", sc.geometry.m_z);
        sc.paths_per_link = cfg.get_uword("paths_per_link", sc.paths_per_link);
        sc.bandwidth_hz = cfg.get_double("bandwidth_hz", sc.bandwidth_hz);
        sc.carrier_hz = cfg.get_double("carrier_hz", sc.carrier_hz);
        sc.tx_power_w = cfg.get_double("tx_power_w", sc.tx_power_w);
        sc.region_side = cfg.get_double("region_side_m", sc.region_side);
        sc.azimuth_spread_rad = cfg.get_double("azimuth_spread_deg", 30.0) * arma::datum::pi / 180.0;
        sc.elevation_min_rad = cfg.get_double("elevation_min_deg", 80.0) * arma::datum::pi / 180.0;
        sc.elevation_max_rad = cfg.get_double("elevation_max_deg", 100.0) * arma::datum::pi / 180.0;
        sc.delay_max_s = cfg.get_double("delay_max_s", sc.delay_max_s);
        sc.pathloss_exponent = cfg.get_double("pathloss_exponent", sc.pathloss_exponent);

        sc.ap_positions = cfg.has("ap_positions") ? cfg.get_points("ap_positions")
                                                  : default_ap_positions(sc.num_aps);
        sc.region_centers = cfg.has("region_centers") ? cfg.get_points("region_centers")
                                                      : default_region_centers(sc.num_users);

        // Noise power: explicit value wins, otherwise calibrated to the default
        // 10 dB median single-AP MRT SNR on this scenario.
        if (cfg.has("noise_power_w"))
            sc.noise_power_w = cfg.get_double("noise_power_w");
        else
        {
            sc.noise_power_w = 1.0; // Placeholder so validate() passes during calibration
            sc.validate();
            sc.noise_power_w = calibrate_noise_power(sc, cfg.get_u64("calibration_seed", 20260823ULL));
        }
        sc.validate();
        return sc;
    }

    void ScenarioConfig::validate() const
    {
        geometry.validate();
        if (num_aps < 1)
            throw std::invalid_argument("ScenarioConfig: num_aps must be >= 1");
        if (num_users < 1)
            throw std::invalid_argument("ScenarioConfig: num_users must be >= 1");
        if (paths_per_link < 1)
            throw std::invalid_argument("ScenarioConfig: paths_per_link must be >= 1");
        if (bandwidth_hz <= 0.0 || carrier_hz <= 0.0)
            throw std::invalid_argument("ScenarioConfig: bandwidth and carrier must be > 0");
        if (tx_power_w <= 0.0)
            throw std::invalid_argument("ScenarioConfig: tx_power_w must be > 0");
        if (noise_power_w <= 0.0)
            throw std::invalid_argument("ScenarioConfig: noise_power_w must be > 0");
        if (region_side <= 0.0)
            throw std::invalid_argument("ScenarioConfig: region_side must be > 0");
        if (ap_positions.n_rows != 3 || ap_positions.n_cols != num_aps)
            throw std::invalid_argument("ScenarioConfig: ap_positions must be 3 x num_aps");
        if (region_centers.n_rows != 3 || region_centers.n_cols != num_users)
            throw std::invalid_argument("ScenarioConfig: region_centers must be 3 x num_users");
        if (elevation_min_rad <= 0.0 || elevation_max_rad >= arma::datum::pi ||
            elevation_min_rad > elevation_max_rad)
            throw std::invalid_argument("ScenarioConfig: elevation range must satisfy 0 < min <= max < pi");
        if (delay_max_s < 0.0)
            throw std::invalid_argument("ScenarioConfig: delay_max_s must be >= 0");
    }

    arma::cx_mat ChannelRealization::stacked() const
    {
        const arma::uword m = h.n_rows, u = h.n_cols, b = h.n_slices;
        arma::cx_mat big(b * m, u);
        for (arma::uword ib = 0; ib < b; ++ib)
            big.rows(ib * m, (ib + 1) * m - 1) = h.slice(ib);
        return big;
    }

    arma::cx_vec array_response(double azimuth, double elevation, const ArrayGeometry &geometry)
    {
        geometry.validate();
        const std::complex<double> j(0.0, 1.0);
        const double wy = arma::datum::pi * std::sin(elevation) * std::sin(azimuth);
        const double wz = arma::datum::pi * std::cos(elevation);

        arma::cx_vec a_y(geometry.m_y), a_z(geometry.m_z);
        for (arma::uword k = 0; k < geometry.m_y; ++k)
            a_y(k) = std::exp(j * (wy * (double)k));
        for (arma::uword k = 0; k < geometry.m_z; ++k)
            a_z(k) = std::exp(j * (wz * (double)k));

        return arma::kron(a_y, a_z);
    }

    arma::cx_mat dft_codebook(const ArrayGeometry &geometry)
    {
        geometry.validate();
        const std::complex<double> j(0.0, 1.0);
        auto dft = [&](arma::uword n) {
            arma::cx_mat f(n, n);
            for (arma::uword r = 0; r < n; ++r)
                for (arma::uword c = 0; c < n; ++c)
                    f(r, c) = std::exp(-j * (2.0 * arma::datum::pi * (double)(r * c) / (double)n)) /
                              std::sqrt((double)n);
            return f;
        };
        return arma::kron(dft(geometry.m_y), dft(geometry.m_z));
    }

    arma::cx_vec synthesize_link(const ArrayGeometry &geometry, const std::vector<PathComponent> &paths,
                                 double bandwidth_hz)
    {
        geometry.validate();
        if (bandwidth_hz <= 0.0)
            throw std::invalid_argument("synthesize_link: bandwidth must be > 0");

        const std::complex<double> j(0.0, 1.0);
        arma::cx_vec h(geometry.size(), arma::fill::zeros);
        for (const auto &p : paths)
        {
            if (p.gain < 0.0)
                throw std::invalid_argument("synthesize_link: path gain must be >= 0");
            if (p.elevation <= 0.0 || p.elevation >= arma::datum::pi)
                throw std::invalid_argument("synthesize_link: elevation must lie in (0, pi)");
            std::complex<double> phase = std::exp(j * (2.0 * arma::datum::pi * p.delay * bandwidth_hz));
            h += std::sqrt(p.gain) * phase * array_response(p.azimuth, p.elevation, geometry);
        }
        return h;
    }

    std::vector<PathComponent> sample_paths(const ScenarioConfig &scenario, arma::uword ap, arma::uword user,
                                            const arma::vec &user_position, Rng &rng)
    {
        if (ap >= scenario.num_aps || user >= scenario.num_users)
            throw std::invalid_argument("sample_paths: ap or user index out of range");
        if (user_position.n_elem != 3)
            throw std::invalid_argument("sample_paths: user_position must have 3 elements");

        const arma::vec ap_pos = scenario.ap_positions.col(ap);
        const arma::vec region = scenario.region_centers.col(user);

        // AP boresight points at the centroid of all user regions; path azimuths
        // are drawn around the user's bearing in this AP-local frame.
        const arma::vec centroid = arma::mean(scenario.region_centers, 1);
        const double boresight = std::atan2(centroid(1) - ap_pos(1), centroid(0) - ap_pos(0));
        const double bearing = std::atan2(region(1) - ap_pos(1), region(0) - ap_pos(0));
        const double bearing_local = wrap_to_pi(bearing - boresight);

        const double distance = arma::norm(user_position - ap_pos);
        const double wavelength = 299792458.0 / scenario.carrier_hz;
        const double pathloss = std::pow(wavelength / (4.0 * arma::datum::pi), 2.0) *
                                std::pow(distance, -scenario.pathloss_exponent);

        std::uniform_real_distribution<double> uni(0.0, 1.0);
        std::exponential_distribution<double> expo(1.0);

        const arma::uword n = scenario.paths_per_link;
        std::vector<PathComponent> paths(n);
        arma::vec weights(n);
        for (arma::uword l = 0; l < n; ++l)
        {
            auto &p = paths[l];
            p.azimuth = wrap_to_pi(bearing_local + scenario.azimuth_spread_rad * (2.0 * uni(rng) - 1.0));
            p.elevation = scenario.elevation_min_rad +
                          (scenario.elevation_max_rad - scenario.elevation_min_rad) * uni(rng);
            p.delay = scenario.delay_max_s * uni(rng);
            weights(l) = std::exp(-(double)l) * expo(rng); // Decaying power profile with jitter
        }
        weights /= arma::accu(weights);
        for (arma::uword l = 0; l < n; ++l)
            paths[l].gain = pathloss * weights(l);
        return paths;
    }

    arma::mat sample_user_positions(const ScenarioConfig &scenario, Rng &rng)
    {
        std::uniform_real_distribution<double> uni(-0.5, 0.5);
        arma::mat pos(3, scenario.num_users);
        for (arma::uword u = 0; u < scenario.num_users; ++u)
        {
            pos(0, u) = scenario.region_centers(0, u) + scenario.region_side * uni(rng);
            pos(1, u) = scenario.region_centers(1, u) + scenario.region_side * uni(rng);
            pos(2, u) = scenario.region_centers(2, u);
        }
        return pos;
    }

    ChannelRealization generate_channel(const ScenarioConfig &scenario, std::uint64_t seed)
    {
        scenario.validate();
        Rng rng(seed);

        ChannelRealization out;
        out.geometry = scenario.geometry;
        out.user_positions = sample_user_positions(scenario, rng);
        out.h.set_size(scenario.geometry.size(), scenario.num_users, scenario.num_aps);
        for (arma::uword b = 0; b < scenario.num_aps; ++b)
            for (arma::uword u = 0; u < scenario.num_users; ++u)
            {
                auto paths = sample_paths(scenario, b, u, out.user_positions.col(u), rng);
                out.h.slice(b).col(u) = synthesize_link(scenario.geometry, paths, scenario.bandwidth_hz);
            }
        return out;
    }

    double calibrate_noise_power(const ScenarioConfig &scenario, std::uint64_t seed,
                                 arma::uword num_sets, double snr_target_db)
    {
        scenario.validate();
        if (num_sets < 1)
            throw std::invalid_argument("calibrate_noise_power: num_sets must be >= 1");

        // Per user and location set: received power of the strongest AP under MRT
        arma::vec rx(num_sets * scenario.num_users);
        for (arma::uword s = 0; s < num_sets; ++s)
        {
            auto ch = generate_channel(scenario, mix_seed(seed, s));
            for (arma::uword u = 0; u < scenario.num_users; ++u)
            {
                double best = 0.0;
                for (arma::uword b = 0; b < scenario.num_aps; ++b)
                {
                    double p = scenario.tx_power_w *
                               std::pow(arma::norm(ch.h.slice(b).col(u)), 2.0);
                    best = std::max(best, p);
                }
                rx(s * scenario.num_users + u) = best;
            }
        }
        return arma::median(rx) / std::pow(10.0, snr_target_db / 10.0);
    }

} // namespace probeopt
