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

#ifndef probeopt_common_H
#define probeopt_common_H

#include <cstdint>
#include <random>
#include <string>

namespace probeopt
{

    // All stochastic code takes an explicit seed or engine; nothing shares
    // global random state.
    using Rng = std::mt19937_64;

    // Derives an independent stream seed from a base seed (splitmix64 step).
    std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

    // FNV-1a, used for config hashes embedded in output files.
    std::uint64_t fnv1a(const void *data, std::size_t size);
    std::uint64_t fnv1a(const std::string &text);
    std::string hash_hex(std::uint64_t value);

    // Wraps an angle to [-pi, pi).
    double wrap_to_pi(double angle);

} // namespace probeopt

#endif
