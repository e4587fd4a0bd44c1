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

#ifndef probeopt_config_H
#define probeopt_config_H

#include <armadillo>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace probeopt
{

    // Flat key-value config file reader. One "key = value" pair per line,
    // '#' starts a comment, blank lines are ignored. SI units throughout.
    //
    // Value syntax:
    //   scalar          tx_power_w = 10
    //   list            sampled_combos = 1, 3, 5, 7
    //   point list      ap_positions = 0,-40,8; -30,35,8; 30,35,8
    class KeyValueConfig
    {
    public:
        static KeyValueConfig from_file(const std::filesystem::path &path);
        static KeyValueConfig from_string(const std::string &text);

        bool has(const std::string &key) const;

        std::string get_string(const std::string &key) const;
        std::string get_string(const std::string &key, const std::string &fallback) const;
        double get_double(const std::string &key) const;
        double get_double(const std::string &key, double fallback) const;
        arma::uword get_uword(const std::string &key) const;
        arma::uword get_uword(const std::string &key, arma::uword fallback) const;
        std::uint64_t get_u64(const std::string &key, std::uint64_t fallback) const;

        // Comma separated scalars.
        std::vector<double> get_double_list(const std::string &key) const;
        std::vector<arma::uword> get_uword_list(const std::string &key) const;

        // Semicolon separated points, each a comma separated x,y,z triple.
        // Returned as a 3 x n matrix.
        arma::mat get_points(const std::string &key) const;

        void set(const std::string &key, const std::string &value);

        // Sorted "key = value" lines; the canonical form used for hashing.
        std::string canonical() const;

        const std::map<std::string, std::string> &entries() const { return values_; }

    private:
        std::map<std::string, std::string> values_;
    };

} // namespace probeopt

#endif
