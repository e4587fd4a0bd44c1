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

#include "probeopt/dataset.hpp"

#include <bit>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "probeopt/common.hpp"

namespace probeopt
{

    static_assert(std::endian::native == std::endian::little,
                  "dataset files are little-endian; big-endian hosts are unsupported");

    std::string to_string(Split split)
    {
        switch (split)
        {
        case Split::train:
            return "train";
        case Split::validation:
            return "validation";
        case Split::test:
            return "test";
        }
        throw std::invalid_argument("to_string: unknown split");
    }

    Split split_from_string(const std::string &name)
    {
        if (name == "train")
            return Split::train;
        if (name == "validation")
            return Split::validation;
        if (name == "test")
            return Split::test;
        throw std::invalid_argument("split_from_string: unknown split '" + name + "'");
    }

    Split split_of_location_set(arma::uword location_set, arma::uword total_sets)
    {
        if (total_sets < 1)
            throw std::invalid_argument("split_of_location_set: total_sets must be >= 1");
        if (location_set >= total_sets)
            throw std::invalid_argument("split_of_location_set: location_set out of range");
        const arma::uword n_train = (arma::uword)(0.70 * (double)total_sets);
        const arma::uword n_val = (arma::uword)(0.15 * (double)total_sets);
        if (location_set < n_train)
            return Split::train;
        if (location_set < n_train + n_val)
            return Split::validation;
        return Split::test;
    }

    void SampleDataset::validate() const
    {
        if (pbm_dim < 1)
            throw std::invalid_argument("SampleDataset: pbm_dim must be >= 1");
        if (combo_count < 1)
            throw std::invalid_argument("SampleDataset: combo_count must be >= 1");
        for (const auto &s : samples)
        {
            if (s.pbm.n_elem != pbm_dim)
                throw std::invalid_argument("SampleDataset: sample PBM length mismatch");
            if (s.combo_index < 1 || s.combo_index > combo_count)
                throw std::invalid_argument("SampleDataset: combo_index out of range");
            if (!s.pbm.is_finite() || !std::isfinite(s.sum_rate) || s.sum_rate < 0.0)
                throw std::invalid_argument("SampleDataset: sample rate and PBM must be finite, rate >= 0");
        }
    }

    std::vector<arma::uword> SampleDataset::combo_sample_indices(arma::uword combo_index) const
    {
        if (combo_index < 1 || combo_index > combo_count)
            throw std::invalid_argument("SampleDataset: combo_index out of range");
        std::vector<arma::uword> idx;
        for (arma::uword i = 0; i < samples.size(); ++i)
            if (samples[i].combo_index == combo_index)
                idx.push_back(i);
        return idx;
    }

    void SampleDataset::save(const std::filesystem::path &path) const
    {
        validate();
        std::ofstream f(path, std::ios::binary);
        if (!f)
            throw std::runtime_error("Cannot write dataset file '" + path.string() + "'");

        f << "probeopt-dataset v1\n"
          << "endianness little\n"
          << "pbm_dim " << pbm_dim << "\n"
          << "combo_count " << combo_count << "\n"
          << "sample_count " << samples.size() << "\n"
          << "config_hash " << hash_hex(config_hash) << "\n"
          << "seed " << seed << "\n"
          << "split " << to_string(split) << "\n"
          << "end-header\n";

        for (const auto &s : samples)
        {
            std::uint64_t combo = s.combo_index, loc = s.location_set;
            f.write(reinterpret_cast<const char *>(&combo), sizeof(combo));
            f.write(reinterpret_cast<const char *>(&loc), sizeof(loc));
            f.write(reinterpret_cast<const char *>(&s.sum_rate), sizeof(double));
            f.write(reinterpret_cast<const char *>(s.pbm.memptr()), (std::streamsize)(pbm_dim * sizeof(double)));
        }
        if (!f)
            throw std::runtime_error("Write failed for dataset file '" + path.string() + "'");
    }

    SampleDataset SampleDataset::load(const std::filesystem::path &path)
    {
        std::ifstream f(path, std::ios::binary);
        if (!f)
            throw std::runtime_error("Cannot open dataset file '" + path.string() + "'");

        std::string line;
        if (!std::getline(f, line) || line != "probeopt-dataset v1")
            throw std::runtime_error("'" + path.string() + "' is not a probeopt-dataset v1 file");

        SampleDataset ds;
        std::uint64_t sample_count = 0;
        while (std::getline(f, line) && line != "end-header")
        {
            std::istringstream ss(line);
            std::string key, value;
            ss >> key >> value;
            if (key == "endianness" && value != "little")
                throw std::runtime_error("Unsupported dataset endianness '" + value + "'");
            else if (key == "pbm_dim")
                ds.pbm_dim = std::stoull(value);
            else if (key == "combo_count")
                ds.combo_count = std::stoull(value);
            else if (key == "sample_count")
                sample_count = std::stoull(value);
            else if (key == "config_hash")
                ds.config_hash = std::stoull(value, nullptr, 16);
            else if (key == "seed")
                ds.seed = std::stoull(value);
            else if (key == "split")
                ds.split = split_from_string(value);
        }
        if (line != "end-header")
            throw std::runtime_error("Dataset header of '" + path.string() + "' is not terminated");

        ds.samples.resize(sample_count);
        for (auto &s : ds.samples)
        {
            std::uint64_t combo = 0, loc = 0;
            f.read(reinterpret_cast<char *>(&combo), sizeof(combo));
            f.read(reinterpret_cast<char *>(&loc), sizeof(loc));
            f.read(reinterpret_cast<char *>(&s.sum_rate), sizeof(double));
            s.pbm.set_size(ds.pbm_dim);
            f.read(reinterpret_cast<char *>(s.pbm.memptr()), (std::streamsize)(ds.pbm_dim * sizeof(double)));
            if (!f)
                throw std::runtime_error("Truncated dataset file '" + path.string() + "'");
            s.combo_index = combo;
            s.location_set = loc;
        }
        ds.validate();
        return ds;
    }

    void SampleDataset::save_csv(const std::filesystem::path &path) const
    {
        validate();
        std::ofstream f(path);
        if (!f)
            throw std::runtime_error("Cannot write CSV file '" + path.string() + "'");
        f << "# config_hash=" << hash_hex(config_hash) << " seed=" << seed
          << " split=" << to_string(split) << "\n";
        f << "combo_index,location_set,sum_rate";
        for (arma::uword j = 0; j < pbm_dim; ++j)
            f << ",pbm_" << j;
        f << "\n";
        f.precision(17);
        for (const auto &s : samples)
        {
            f << s.combo_index << "," << s.location_set << "," << s.sum_rate;
            for (arma::uword j = 0; j < pbm_dim; ++j)
                f << "," << s.pbm(j);
            f << "\n";
        }
    }

    void require_trainable(const SampleDataset &dataset, const std::string &consumer)
    {
        if (dataset.split == Split::test)
            throw std::invalid_argument(consumer + ": refusing to train on a test-tagged dataset");
    }

} // namespace probeopt
