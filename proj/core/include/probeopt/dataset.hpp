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

#ifndef probeopt_dataset_H
#define probeopt_dataset_H

#include <armadillo>
#include <filesystem>
#include <string>
#include <vector>

namespace probeopt
{

    enum class Split
    {
        train,
        validation,
        test
    };

    std::string to_string(Split split);
    Split split_from_string(const std::string &name);

    // 70/15/15 partition by location-set index: the first 70% of sets train,
    // the next 15% validate, the rest test. Splitting by location set keeps all
    // combos of one channel draw in the same split.
    Split split_of_location_set(arma::uword location_set, arma::uword total_sets);

    // One pipeline run: the measured PBM vector and its sum-rate label.
    struct LabeledSample
    {
        arma::uword combo_index = 1;  // 1-based probing combination
        arma::uword location_set = 0; // Channel draw this sample came from
        double sum_rate = 0.0;        // bits/s/Hz
        arma::vec pbm;                // Length pbm_dim
    };

    // A split-tagged collection of labeled samples with its provenance
    // (config hash and seed). Binary format "probeopt-dataset v1": a text
    // header (one "key value" line each for endianness, pbm_dim, combo_count,
    // sample_count, config_hash, seed, split, closed by "end-header"), then
    // per sample: u64 combo_index, u64 location_set, f64 sum_rate, f64[pbm_dim].
    struct SampleDataset
    {
        arma::uword pbm_dim = 0;
        arma::uword combo_count = 0; // Total number of probing combinations
        std::uint64_t config_hash = 0;
        std::uint64_t seed = 0;
        Split split = Split::train;
        std::vector<LabeledSample> samples;

        void validate() const;

        // Indices of the samples of one combo, in stored order
        std::vector<arma::uword> combo_sample_indices(arma::uword combo_index) const;

        void save(const std::filesystem::path &path) const;
        static SampleDataset load(const std::filesystem::path &path);

        // Inspection export: a provenance comment line, a column header, then
        // one row per sample.
        void save_csv(const std::filesystem::path &path) const;
    };

    // Guard for training code: throws if the dataset is test-tagged.
    void require_trainable(const SampleDataset &dataset, const std::string &consumer);

} // namespace probeopt

#endif
