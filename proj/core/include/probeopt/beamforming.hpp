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

#ifndef probeopt_beamforming_H
#define probeopt_beamforming_H

#include <armadillo>
#include <vector>

#include "probeopt/channel.hpp"

namespace probeopt
{

    // The probing beams each AP sweeps: one column of codebook indices per AP,
    // all APs probing the same number of beams.
    struct ProbingConfig
    {
        arma::umat beam_indices;     // beams_per_ap x num_aps, codebook column indices
        arma::uword combo_index = 1; // 1-based position in the combination list

        arma::uword beams_per_ap() const { return beam_indices.n_rows; }
        arma::uword num_aps() const { return beam_indices.n_cols; }

        // Flattened probing codewords of the first AP: for each of its beams,
        // the real then the imaginary part of the codeword (2 * beams_per_ap * M
        // values). Conditions generative models on the probing configuration.
        arma::vec condition_vector(const ArrayGeometry &geometry) const;

        void validate(arma::uword codebook_size) const;
    };

    // Probing combination "combo_index" (1-based): every AP sweeps the beams of
    // horizontal sector combo_index, i.e. codebook columns
    // [(combo_index-1) * beams_per_ap, combo_index * beams_per_ap).
    ProbingConfig horizontal_sector_combo(const ArrayGeometry &geometry, arma::uword num_aps,
                                          arma::uword beams_per_ap, arma::uword total_combos,
                                          arma::uword combo_index);

    // Probing beam measurements of all (user, AP, beam) triples as one vector,
    // user-major: values[u * N + b * beams_per_ap + j] with N = num_aps * beams_per_ap.
    struct PbmVector
    {
        arma::vec values;
        arma::uword num_users = 0;
        arma::uword num_aps = 0;
        arma::uword beams_per_ap = 0;

        arma::uword dim() const { return num_users * num_aps * beams_per_ap; }
        arma::uword index(arma::uword user, arma::uword ap, arma::uword beam) const
        {
            return user * num_aps * beams_per_ap + ap * beams_per_ap + beam;
        }
        void validate() const;
    };

    // r_{b,u,i} = |codeword_i^H h_{b,u}|^2 over the configured probing beams
    PbmVector compute_pbm(const ChannelRealization &channel, const ProbingConfig &config);

    // Candidate beam selection from measured PBMs: the beamspace of each AP is
    // partitioned into "classes" contiguous sectors of M / classes beams; sectors
    // are ranked by the total measured PBM energy of the probing beams falling in
    // them (ties: lower sector index) and the indices of the best "keep" sectors
    // are returned per AP, sorted ascending.
    std::vector<arma::uvec> compress_beamspace(const PbmVector &pbm, const ProbingConfig &config,
                                               arma::uword codebook_size, arma::uword classes,
                                               arma::uword keep);

    // Strongest-beam-first analog selection over per-AP candidate sets: users are
    // processed in descending order of their best candidate gain (ties: lower
    // user index) and each receives its strongest still-free beam (ties: lower
    // beam index). Entry u of the returned per-AP vector is user u's beam.
    std::vector<arma::uvec> select_analog_beams_sbf(const ChannelRealization &channel,
                                                    const std::vector<arma::uvec> &candidates);

    // Block-diagonal analog beamforming matrix (num_aps*M x num_aps*U); block b
    // holds the selected DFT codewords of AP b, column u serving user u.
    arma::cx_mat assemble_analog_matrix(const ArrayGeometry &geometry,
                                        const std::vector<arma::uvec> &analog_beams);

    // Regularized LMMSE digital precoder: with Hbar = F_RF^H H,
    // Wbar = Hbar (Hbar^H Hbar + lambda I)^-1, column u is scaled so the
    // effective precoder F_RF * W_BB[:,u] has power exactly powers[u].
    arma::cx_mat lmmse_digital(const arma::cx_mat &f_rf, const arma::cx_mat &h_stacked, double lambda,
                               const arma::vec &powers);

    // Per-user rate log2(1 + S_u / (I_u + noise_power)) with S_u the intended
    // power and I_u the inter-user interference through F_RF * W_BB
    arma::vec user_rates(const arma::cx_mat &h_stacked, const arma::cx_mat &f_rf,
                         const arma::cx_mat &w_bb, double noise_power);

    double sum_rate(const arma::cx_mat &h_stacked, const arma::cx_mat &f_rf, const arma::cx_mat &w_bb,
                    double noise_power);

    // Analog selection plus digital precoder of one pipeline run
    struct HybridBeamformer
    {
        std::vector<arma::uvec> analog_beams; // Per AP, entry u = user u's beam
        arma::cx_mat f_rf;                    // num_aps*M x num_aps*U, block diagonal
        arma::cx_mat w_bb;                    // num_aps*U x U
    };

    struct PipelineParams
    {
        arma::uword compress_classes = 8;
        arma::uword compress_keep = 2;
        double lambda = -1.0; // Regularizer; < 0 selects U * noise / total power
    };

    struct ProbingEvaluation
    {
        PbmVector pbm;
        HybridBeamformer beamformer;
        double sum_rate = 0.0;
    };

    // Full pipeline on one channel draw: measure PBMs, compress the beamspace,
    // SBF analog selection, LMMSE digital precoder, sum rate. Power is split
    // equally across users from the total num_aps * tx_power budget.
    ProbingEvaluation evaluate_probing_config(const ChannelRealization &channel,
                                              const ProbingConfig &config,
                                              const ScenarioConfig &scenario,
                                              const PipelineParams &params = {});

} // namespace probeopt

#endif
