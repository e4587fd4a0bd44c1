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

#include "probeopt/common.hpp"

#include <cmath>
#include <cstdio>

namespace probeopt
{

    std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream)
    {
        std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t fnv1a(const void *data, std::size_t size)
    {
        const auto *bytes = static_cast<const unsigned char *>(data);
        std::uint64_t hash = 0xcbf29ce484222325ULL;
        for (std::size_t i = 0; i < size; ++i)
        {
            hash ^= static_cast<std::uint64_t>(bytes[i]);
            hash *= 0x100000001b3ULL;
        }
        return hash;
    }

    std::uint64_t fnv1a(const std::string &text)
    {
        return fnv1a(text.data(), text.size());
    }

    std::string hash_hex(std::uint64_t value)
    {
        char buffer[17];
        std::snprintf(buffer, sizeof(buffer), "%016llx", static_cast<unsigned long long>(value));
        return std::string(buffer);
    }

    double wrap_to_pi(double angle)
    {
        const double two_pi = 6.283185307179586476925286766559;
        double wrapped = std::fmod(angle + 3.1415926535897932384626433832795, two_pi);
        if (wrapped < 0.0)
            wrapped += two_pi;
        return wrapped - 3.1415926535897932384626433832795;
    }

} // namespace probeopt
