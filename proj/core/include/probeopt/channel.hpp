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

#ifndef probeopt_channel_H
#define probeopt_channel_H

#include <armadillo>
#include <vector>

#include "probeopt/common.hpp"
#include "probeopt/config.hpp"

namespace probeopt
{

    // Rectangular uniform planar array, half-wavelength spacing (implicit).
    struct ArrayGeometry
    {
        arma::uword m_y = 8; // Antenna count, horizontal
        arma::uword m_z = 8; // Antenna count, vertical

        arma::uword size() const { return m_y * m_z; }
        void validate() const;
    };

    // One multipath component of a link.
    struct PathComponent
    {
        double gain = 0.0;      // Linear power, >= 0
        double delay = 0.0;     // Seconds
        double azimuth = 0.0;   // Radians in [-pi, pi)
        double elevation = 0.0; // Radians in (0, pi), measured from the vertical axis
    };

    // Cell-free deployment: "num_aps" access points, each with the same planar
    // array, serving "num_users" single-antenna users, one user per region.
    struct ScenarioConfig
    {
        arma::uword num_aps = 3;
        arma::uword num_users = 6;
        ArrayGeometry geometry;
        arma::uword paths_per_link = 5;

        double bandwidth_hz = 100.0e6;
        double carrier_hz = 28.0e9;
        double tx_power_w = 10.0;      // Per AP
        double noise_power_w = 2.0e-9; // Receiver noise power; see calibrate_noise_power

        arma::mat ap_positions;    // 3 x num_aps, meters
        arma::mat region_centers;  // 3 x num_users, meters
        double region_side = 4.0;  // User region squares, meters

        // Path parameter distributions
        double azimuth_spread_rad = 30.0 * arma::datum::pi / 180.0; // Around the AP-region bearing
        double elevation_min_rad = 80.0 * arma::datum::pi / 180.0;
        double elevation_max_rad = 100.0 * arma::datum::pi / 180.0;
        double delay_max_s = 100.0e-9;
        double pathloss_exponent = 3.0;

        // Default deployment: APs on a 40 m circle at 8 m height, user regions
        // spaced 6 m apart on the x-axis at 1.5 m height.
        static ScenarioConfig defaults();
        static ScenarioConfig from_config(const KeyValueConfig &cfg);

        // AP layout on a circle (radius 40 m, height 8 m, first AP at -y)
        static arma::mat default_ap_positions(arma::uword num_aps);
        // Region centers on the x-axis, 6 m spacing, centered on the origin
        static arma::mat default_region_centers(arma::uword num_users);

        void validate() const;
    };

    // One draw of all links; h.slice(b).col(u) is the channel of AP b to user u.
    struct ChannelRealization
    {
        ArrayGeometry geometry;   // Array used by every AP
        arma::cx_cube h;          // M x num_users x num_aps
        arma::mat user_positions; // 3 x num_users, meters

        // Stacked channel matrix of size (num_aps * M) x num_users; column u is
        // the concatenation of h_{b,u} over APs.
        arma::cx_mat stacked() const;
    };

    // Planar array response a_y kron a_z with a_y[k] = exp(j pi k sin(el) sin(az))
    // and a_z[k] = exp(j pi k cos(el)); entry (ky * m_z + kz) = a_y[ky] * a_z[kz].
    arma::cx_vec array_response(double azimuth, double elevation, const ArrayGeometry &geometry);

    // Unitary 2D-DFT codebook kron(F_y, F_z), each F_n[j,k] = exp(-2 pi i j k / n) / sqrt(n)
    arma::cx_mat dft_codebook(const ArrayGeometry &geometry);

    // h = sum_l sqrt(gain_l) * exp(j 2 pi delay_l * bandwidth) * a(azimuth_l, elevation_l)
    arma::cx_vec synthesize_link(const ArrayGeometry &geometry, const std::vector<PathComponent> &paths,
                                 double bandwidth_hz);

    // Draws the multipath parameters of one AP-user link. Azimuths are uniform
    // around the AP-local bearing of the user region, elevations and delays are
    // uniform in their configured ranges, and gains follow an exponential decay
    // profile normalized to the log-distance pathloss of the link.
    std::vector<PathComponent> sample_paths(const ScenarioConfig &scenario, arma::uword ap, arma::uword user,
                                            const arma::vec &user_position, Rng &rng);

    // Uniform user positions, one per region square; 3 x num_users.
    arma::mat sample_user_positions(const ScenarioConfig &scenario, Rng &rng);

    // Draws user positions and all link channels; pure function of (scenario, seed).
    ChannelRealization generate_channel(const ScenarioConfig &scenario, std::uint64_t seed);

    // Noise power such that the median per-user receive SNR under single-AP
    // maximum-ratio transmission (best AP, full AP power) is snr_target_db.
    double calibrate_noise_power(const ScenarioConfig &scenario, std::uint64_t seed,
                                 arma::uword num_sets = 64, double snr_target_db = 10.0);

} // namespace probeopt

#endif
