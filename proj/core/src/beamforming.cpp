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

#include "probeopt/beamforming.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace probeopt
{

    void ProbingConfig::validate(arma::uword codebook_size) const
    {
        if (beam_indices.n_rows == 0 || beam_indices.n_cols == 0)
            throw std::invalid_argument("ProbingConfig: beam_indices must be non-empty");
        if (combo_index < 1)
            throw std::invalid_argument("ProbingConfig: combo_index is 1-based");
        for (arma::uword b = 0; b < beam_indices.n_cols; ++b)
        {
            arma::uvec col = arma::sort(beam_indices.col(b));
            for (arma::uword j = 0; j < col.n_elem; ++j)
            {
                if (col(j) >= codebook_size)
                    throw std::invalid_argument("ProbingConfig: beam index out of codebook range");
                if (j > 0 && col(j) == col(j - 1))
                    throw std::invalid_argument("ProbingConfig: beam indices must be distinct per AP");
            }
        }
    }

    arma::vec ProbingConfig::condition_vector(const ArrayGeometry &geometry) const
    {
        validate(geometry.size());
        const arma::cx_mat codebook = dft_codebook(geometry);
        const arma::uword m = geometry.size(), nb = beams_per_ap();
        arma::vec out(2 * nb * m);
        for (arma::uword j = 0; j < nb; ++j)
        {
            const arma::cx_vec f = codebook.col(beam_indices(j, 0));
            out.subvec(2 * j * m, (2 * j + 1) * m - 1) = arma::real(f);
            out.subvec((2 * j + 1) * m, (2 * j + 2) * m - 1) = arma::imag(f);
        }
        return out;
    }

    ProbingConfig horizontal_sector_combo(const ArrayGeometry &geometry, arma::uword num_aps,
                                          arma::uword beams_per_ap, arma::uword total_combos,
                                          arma::uword combo_index)
    {
        geometry.validate();
        if (num_aps < 1 || beams_per_ap < 1 || total_combos < 1)
            throw std::invalid_argument("horizontal_sector_combo: counts must be >= 1");
        if (combo_index < 1 || combo_index > total_combos)
            throw std::invalid_argument("horizontal_sector_combo: combo_index out of range");
        if (total_combos * beams_per_ap > geometry.size())
            throw std::invalid_argument("horizontal_sector_combo: sectors exceed the codebook");

        ProbingConfig cfg;
        cfg.combo_index = combo_index;
        cfg.beam_indices.set_size(beams_per_ap, num_aps);
        for (arma::uword b = 0; b < num_aps; ++b)
            for (arma::uword j = 0; j < beams_per_ap; ++j)
                cfg.beam_indices(j, b) = (combo_index - 1) * beams_per_ap + j;
        return cfg;
    }

    void PbmVector::validate() const
    {
        if (values.n_elem != dim())
            throw std::invalid_argument("PbmVector: length does not match (users, APs, beams)");
        if (!values.is_finite() || (values.n_elem > 0 && values.min() < 0.0))
            throw std::invalid_argument("PbmVector: entries must be finite and >= 0");
    }

    PbmVector compute_pbm(const ChannelRealization &channel, const ProbingConfig &config)
    {
        const arma::uword m = channel.geometry.size();
        config.validate(m);
        if (channel.h.n_rows != m || channel.h.n_slices != config.num_aps())
            throw std::invalid_argument("compute_pbm: channel and probing config disagree on shape");

        const arma::cx_mat codebook = dft_codebook(channel.geometry);
        PbmVector pbm;
        pbm.num_users = channel.h.n_cols;
        pbm.num_aps = config.num_aps();
        pbm.beams_per_ap = config.beams_per_ap();
        pbm.values.set_size(pbm.dim());
        for (arma::uword u = 0; u < pbm.num_users; ++u)
            for (arma::uword b = 0; b < pbm.num_aps; ++b)
                for (arma::uword j = 0; j < pbm.beams_per_ap; ++j)
                {
                    std::complex<double> g =
                        arma::cdot(codebook.col(config.beam_indices(j, b)), channel.h.slice(b).col(u));
                    pbm.values(pbm.index(u, b, j)) = std::norm(g);
                }
        return pbm;
    }

    std::vector<arma::uvec> compress_beamspace(const PbmVector &pbm, const ProbingConfig &config,
                                               arma::uword codebook_size, arma::uword classes,
                                               arma::uword keep)
    {
        pbm.validate();
        config.validate(codebook_size);
        if (classes < 1 || codebook_size % classes != 0)
            throw std::invalid_argument("compress_beamspace: classes must divide the codebook size");
        if (keep < 1 || keep > classes)
            throw std::invalid_argument("compress_beamspace: keep must lie in [1, classes]");
        if (pbm.num_aps != config.num_aps() || pbm.beams_per_ap != config.beams_per_ap())
            throw std::invalid_argument("compress_beamspace: PBM and probing config disagree on shape");

        const arma::uword sector = codebook_size / classes;
        std::vector<arma::uvec> candidates(pbm.num_aps);
        for (arma::uword b = 0; b < pbm.num_aps; ++b)
        {
            arma::vec energy(classes, arma::fill::zeros);
            for (arma::uword j = 0; j < pbm.beams_per_ap; ++j)
            {
                arma::uword cls = config.beam_indices(j, b) / sector;
                for (arma::uword u = 0; u < pbm.num_users; ++u)
                    energy(cls) += pbm.values(pbm.index(u, b, j));
            }

            // Rank sectors by energy, ties to the lower sector index
            std::vector<arma::uword> order(classes);
            std::iota(order.begin(), order.end(), 0);
            std::stable_sort(order.begin(), order.end(),
                             [&](arma::uword a, arma::uword c) { return energy(a) > energy(c); });
            order.resize(keep);
            std::sort(order.begin(), order.end());

            arma::uvec beams(keep * sector);
            for (arma::uword c = 0; c < keep; ++c)
                for (arma::uword i = 0; i < sector; ++i)
                    beams(c * sector + i) = order[c] * sector + i;
            candidates[b] = beams;
        }
        return candidates;
    }

    std::vector<arma::uvec> select_analog_beams_sbf(const ChannelRealization &channel,
                                                    const std::vector<arma::uvec> &candidates)
    {
        const arma::uword num_users = channel.h.n_cols, num_aps = channel.h.n_slices;
        if (candidates.size() != num_aps)
            throw std::invalid_argument("select_analog_beams_sbf: one candidate set per AP required");

        const arma::cx_mat codebook = dft_codebook(channel.geometry);
        std::vector<arma::uvec> selected(num_aps);
        for (arma::uword b = 0; b < num_aps; ++b)
        {
            const arma::uvec &cand = candidates[b];
            if (cand.n_elem < num_users)
                throw std::invalid_argument("select_analog_beams_sbf: fewer candidate beams than users");
            if (cand.n_elem > 0 && cand.max() >= channel.geometry.size())
                throw std::invalid_argument("select_analog_beams_sbf: candidate index out of range");

            // Beam gains |f_m^H h_{b,u}|^2 for every candidate beam and user
            arma::mat gains(cand.n_elem, num_users);
            for (arma::uword c = 0; c < cand.n_elem; ++c)
                for (arma::uword u = 0; u < num_users; ++u)
                    gains(c, u) = std::norm(arma::cdot(codebook.col(cand(c)), channel.h.slice(b).col(u)));

            // Users in descending order of their strongest candidate, ties to
            // the lower user index
            std::vector<arma::uword> order(num_users);
            std::iota(order.begin(), order.end(), 0);
            std::stable_sort(order.begin(), order.end(), [&](arma::uword a, arma::uword c)
                             { return gains.col(a).max() > gains.col(c).max(); });

            arma::uvec beam_of_user(num_users);
            std::vector<bool> taken(cand.n_elem, false);
            for (arma::uword user : order)
            {
                arma::uword best = cand.n_elem; // Candidates are ascending, so the
                double best_gain = -1.0;        // first strict max is the lowest index
                for (arma::uword c = 0; c < cand.n_elem; ++c)
                    if (!taken[c] && gains(c, user) > best_gain)
                    {
                        best = c;
                        best_gain = gains(c, user);
                    }
                taken[best] = true;
                beam_of_user(user) = cand(best);
            }
            selected[b] = beam_of_user;
        }
        return selected;
    }

    arma::cx_mat assemble_analog_matrix(const ArrayGeometry &geometry,
                                        const std::vector<arma::uvec> &analog_beams)
    {
        geometry.validate();
        if (analog_beams.empty())
            throw std::invalid_argument("assemble_analog_matrix: no APs");
        const arma::uword m = geometry.size(), num_aps = analog_beams.size();
        const arma::uword num_users = analog_beams[0].n_elem;

        const arma::cx_mat codebook = dft_codebook(geometry);
        arma::cx_mat f_rf(num_aps * m, num_aps * num_users, arma::fill::zeros);
        for (arma::uword b = 0; b < num_aps; ++b)
        {
            if (analog_beams[b].n_elem != num_users)
                throw std::invalid_argument("assemble_analog_matrix: per-AP beam counts differ");
            if (analog_beams[b].max() >= m)
                throw std::invalid_argument("assemble_analog_matrix: beam index out of range");
            for (arma::uword u = 0; u < num_users; ++u)
                f_rf.submat(b * m, b * num_users + u, (b + 1) * m - 1, b * num_users + u) =
                    codebook.col(analog_beams[b](u));
        }
        return f_rf;
    }

    arma::cx_mat lmmse_digital(const arma::cx_mat &f_rf, const arma::cx_mat &h_stacked, double lambda,
                               const arma::vec &powers)
    {
        const arma::uword num_users = h_stacked.n_cols;
        if (f_rf.n_rows != h_stacked.n_rows)
            throw std::invalid_argument("lmmse_digital: F_RF and H row counts differ");
        if (powers.n_elem != num_users)
            throw std::invalid_argument("lmmse_digital: one power per user required");
        if (lambda < 0.0 || powers.min() <= 0.0)
            throw std::invalid_argument("lmmse_digital: lambda must be >= 0 and powers > 0");

        const arma::cx_mat h_bar = f_rf.t() * h_stacked; // .t() is the conjugate transpose
        const arma::cx_mat gram = h_bar.t() * h_bar +
                                  lambda * arma::cx_mat(arma::eye(num_users, num_users),
                                                        arma::zeros(num_users, num_users));
        arma::cx_mat gram_inv;
        if (!arma::inv_sympd(gram_inv, gram))
            throw std::runtime_error("lmmse_digital: singular system (rank-deficient channel with lambda = 0)");

        arma::cx_mat w_bar = h_bar * gram_inv;
        const arma::cx_mat w_eff = f_rf * w_bar;
        for (arma::uword u = 0; u < num_users; ++u)
        {
            double nrm = arma::norm(w_eff.col(u));
            if (!std::isfinite(nrm) || nrm <= 0.0)
                throw std::runtime_error("lmmse_digital: zero effective precoder for user " +
                                         std::to_string(u));
            w_bar.col(u) *= std::sqrt(powers(u)) / nrm;
        }
        return w_bar;
    }

    arma::vec user_rates(const arma::cx_mat &h_stacked, const arma::cx_mat &f_rf,
                         const arma::cx_mat &w_bb, double noise_power)
    {
        if (noise_power <= 0.0)
            throw std::invalid_argument("user_rates: noise_power must be > 0");
        const arma::uword num_users = h_stacked.n_cols;
        if (f_rf.n_rows != h_stacked.n_rows || f_rf.n_cols != w_bb.n_rows || w_bb.n_cols != num_users)
            throw std::invalid_argument("user_rates: inconsistent shapes");

        const arma::cx_mat link = h_stacked.t() * (f_rf * w_bb); // (u,v): user u hears stream v
        arma::vec rates(num_users);
        for (arma::uword u = 0; u < num_users; ++u)
        {
            double signal = std::norm(link(u, u));
            double interference = 0.0;
            for (arma::uword v = 0; v < num_users; ++v)
                if (v != u)
                    interference += std::norm(link(u, v));
            rates(u) = std::log2(1.0 + signal / (interference + noise_power));
        }
        return rates;
    }

    double sum_rate(const arma::cx_mat &h_stacked, const arma::cx_mat &f_rf, const arma::cx_mat &w_bb,
                    double noise_power)
    {
        return arma::accu(user_rates(h_stacked, f_rf, w_bb, noise_power));
    }

    ProbingEvaluation evaluate_probing_config(const ChannelRealization &channel,
                                              const ProbingConfig &config,
                                              const ScenarioConfig &scenario,
                                              const PipelineParams &params)
    {
        scenario.validate();
        const arma::uword m = scenario.geometry.size();
        if (channel.h.n_rows != m || channel.h.n_cols != scenario.num_users ||
            channel.h.n_slices != scenario.num_aps)
            throw std::invalid_argument("evaluate_probing_config: channel does not match the scenario");

        ProbingEvaluation out;
        out.pbm = compute_pbm(channel, config);
        auto candidates = compress_beamspace(out.pbm, config, m, params.compress_classes,
                                             params.compress_keep);
        out.beamformer.analog_beams = select_analog_beams_sbf(channel, candidates);
        out.beamformer.f_rf = assemble_analog_matrix(scenario.geometry, out.beamformer.analog_beams);

        const double total_power = (double)scenario.num_aps * scenario.tx_power_w;
        const double lambda = params.lambda < 0.0
                                  ? (double)scenario.num_users * scenario.noise_power_w / total_power
                                  : params.lambda;
        const arma::vec powers(scenario.num_users,
                               arma::fill::value(total_power / (double)scenario.num_users));

        const arma::cx_mat h_stacked = channel.stacked();
        out.beamformer.w_bb = lmmse_digital(out.beamformer.f_rf, h_stacked, lambda, powers);
        out.sum_rate = sum_rate(h_stacked, out.beamformer.f_rf, out.beamformer.w_bb,
                                scenario.noise_power_w);
        return out;
    }

} // namespace probeopt
