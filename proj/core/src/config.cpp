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

#include "probeopt/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace probeopt
{

    static std::string trim(const std::string &s)
    {
        const char *ws = " \t\r\n";
        auto first = s.find_first_not_of(ws);
        if (first == std::string::npos)
            return "";
        auto last = s.find_last_not_of(ws);
        return s.substr(first, last - first + 1);
    }

    static std::vector<std::string> split(const std::string &s, char sep)
    {
        std::vector<std::string> parts;
        std::stringstream ss(s);
        std::string item;
        while (std::getline(ss, item, sep))
            parts.push_back(trim(item));
        if (!s.empty() && s.back() == sep)
            parts.push_back("");
        return parts;
    }

    KeyValueConfig KeyValueConfig::from_file(const std::filesystem::path &path)
    {
        std::ifstream f(path);
        if (!f)
            throw std::runtime_error("Cannot open config file '" + path.string() + "'");
        std::stringstream ss;
        ss << f.rdbuf();
        return from_string(ss.str());
    }

    KeyValueConfig KeyValueConfig::from_string(const std::string &text)
    {
        KeyValueConfig cfg;
        std::stringstream ss(text);
        std::string line;
        arma::uword line_no = 0;
        while (std::getline(ss, line))
        {
            ++line_no;
            auto hash = line.find('#');
            if (hash != std::string::npos)
                line = line.substr(0, hash);
            line = trim(line);
            if (line.empty())
                continue;
            auto eq = line.find('=');
            if (eq == std::string::npos)
                throw std::runtime_error("Config line " + std::to_string(line_no) + " has no '='");
            std::string key = trim(line.substr(0, eq));
            std::string value = trim(line.substr(eq + 1));
            if (key.empty())
                throw std::runtime_error("Config line " + std::to_string(line_no) + " has empty key");
            cfg.values_[key] = value;
        }
        return cfg;
    }

    bool KeyValueConfig::has(const std::string &key) const
    {
        return values_.count(key) != 0;
    }

    std::string KeyValueConfig::get_string(const std::string &key) const
    {
        auto it = values_.find(key);
        if (it == values_.end())
            throw std::invalid_argument("Missing config key '" + key + "'");
        return it->second;
    }

    std::string KeyValueConfig::get_string(const std::string &key, const std::string &fallback) const
    {
        auto it = values_.find(key);
        return it == values_.end() ? fallback : it->second;
    }

    static double parse_double(const std::string &key, const std::string &value)
    {
        try
        {
            size_t pos = 0;
            double v = std::stod(value, &pos);
            if (pos != value.size())
                throw std::invalid_argument("trailing characters");
            return v;
        }
        catch (const std::exception &)
        {
            throw std::invalid_argument("Config key '" + key + "' has non-numeric value '" + value + "'");
        }
    }

    double KeyValueConfig::get_double(const std::string &key) const
    {
        return parse_double(key, get_string(key));
    }

    double KeyValueConfig::get_double(const std::string &key, double fallback) const
    {
        auto it = values_.find(key);
        return it == values_.end() ? fallback : parse_double(key, it->second);
    }

    arma::uword KeyValueConfig::get_uword(const std::string &key) const
    {
        double v = get_double(key);
        if (v < 0.0 || v != std::floor(v))
            throw std::invalid_argument("Config key '" + key + "' must be a non-negative integer");
        return (arma::uword)v;
    }

    arma::uword KeyValueConfig::get_uword(const std::string &key, arma::uword fallback) const
    {
        return has(key) ? get_uword(key) : fallback;
    }

    std::uint64_t KeyValueConfig::get_u64(const std::string &key, std::uint64_t fallback) const
    {
        if (!has(key))
            return fallback;
        const std::string value = get_string(key);
        try
        {
            size_t pos = 0;
            unsigned long long v = std::stoull(value, &pos);
            if (pos != value.size())
                throw std::invalid_argument("trailing characters");
            return (std::uint64_t)v;
        }
        catch (const std::exception &)
        {
            throw std::invalid_argument("Config key '" + key + "' has non-integer value '" + value + "'");
        }
    }

    std::vector<double> KeyValueConfig::get_double_list(const std::string &key) const
    {
        std::vector<double> out;
        for (const auto &tok : split(get_string(key), ','))
            out.push_back(parse_double(key, tok));
        return out;
    }

    std::vector<arma::uword> KeyValueConfig::get_uword_list(const std::string &key) const
    {
        std::vector<arma::uword> out;
        for (double v : get_double_list(key))
        {
            if (v < 0.0 || v != std::floor(v))
                throw std::invalid_argument("Config key '" + key + "' must list non-negative integers");
            out.push_back((arma::uword)v);
        }
        return out;
    }

    arma::mat KeyValueConfig::get_points(const std::string &key) const
    {
        auto groups = split(get_string(key), ';');
        arma::mat points(3, groups.size());
        for (size_t i = 0; i < groups.size(); ++i)
        {
            auto coords = split(groups[i], ',');
            if (coords.size() != 3)
                throw std::invalid_argument("Config key '" + key + "' entry " + std::to_string(i) +
                                            " is not an x,y,z triple");
            for (size_t d = 0; d < 3; ++d)
                points(d, i) = parse_double(key, coords[d]);
        }
        return points;
    }

    void KeyValueConfig::set(const std::string &key, const std::string &value)
    {
        if (key.empty())
            throw std::invalid_argument("Config key must not be empty");
        values_[key] = value;
    }

    std::string KeyValueConfig::canonical() const
    {
        std::stringstream ss;
        for (const auto &[k, v] : values_)
            ss << k << " = " << v << "\n";
        return ss.str();
    }

} // namespace probeopt
