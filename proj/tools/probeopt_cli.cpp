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

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "probeopt/experiment.hpp"

namespace
{

    struct CliOptions
    {
        std::string config_path;
        std::string out_dir;
        std::string baseline;
        std::uint64_t seed = 0;
        bool seed_given = false;
    };

    void add_common_flags(CLI::App *cmd, CliOptions &opt)
    {
        cmd->add_option("--config", opt.config_path, "Key-value config file");
        cmd->add_option("--out", opt.out_dir, "Output directory (overrides config)");
        cmd->add_option("--baseline", opt.baseline, "Generative model: cvae, vae-mdn or cvae-mdn")
            ->check(CLI::IsMember({"cvae", "vae-mdn", "cvae-mdn"}));
        cmd->add_option("--seed", opt.seed, "Master seed (overrides config)")
            ->each([&opt](const std::string &) { opt.seed_given = true; });
    }

    probeopt::ExperimentConfig build_config(const CliOptions &opt)
    {
        probeopt::KeyValueConfig kv;
        if (!opt.config_path.empty())
            kv = probeopt::KeyValueConfig::from_file(opt.config_path);
        if (opt.seed_given)
            kv.set("seed", std::to_string(opt.seed));
        if (!opt.out_dir.empty())
            kv.set("out_dir", opt.out_dir);
        if (!opt.baseline.empty())
            kv.set("baseline", opt.baseline);
        return probeopt::ExperimentConfig::from_kv(kv);
    }

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"probeopt - probing beam optimization for cell-free hybrid beamforming"};
    app.require_subcommand(1);

    CliOptions opt;
    CLI::App *generate = app.add_subcommand("generate", "Sample channels and write labeled datasets");
    CLI::App *train = app.add_subcommand("train", "Train the augmenter and the rate mapper");
    CLI::App *optimize = app.add_subcommand("optimize", "Augment, score and select a probing combo");
    CLI::App *evaluate = app.add_subcommand("evaluate", "Score all combos by direct simulation");
    for (CLI::App *cmd : {generate, train, optimize, evaluate})
        add_common_flags(cmd, opt);

    CLI11_PARSE(app, argc, argv);

    try
    {
        const probeopt::ExperimentConfig cfg = build_config(opt);
        if (generate->parsed())
        {
            const probeopt::GenerateResult result = probeopt::cmd_generate(cfg);
            std::cout << "generated " << result.train.samples.size() << " train, "
                      << result.validation.samples.size() << " validation, "
                      << result.test.samples.size() << " test samples in " << cfg.out_dir.string()
                      << "\n";
        }
        else if (train->parsed())
        {
            const probeopt::TrainArtifacts artifacts = probeopt::cmd_train(cfg);
            for (size_t i = 0; i < artifacts.augmenters.size(); ++i)
            {
                std::cout << "augmenter";
                if (artifacts.augmenter_combos[i] > 0)
                    std::cout << " (combo " << artifacts.augmenter_combos[i] << ")";
                std::cout << ": best validation loss "
                          << artifacts.augmenters[i].best_val_loss
                          << (artifacts.augmenters[i].aborted ? " (diverged, best kept)" : "")
                          << "\n";
            }
            std::cout << "rate mapper: validation RMSE " << artifacts.mapper.best_val_rmse
                      << " bit/s/Hz\n";
        }
        else if (optimize->parsed())
        {
            const probeopt::OptimizeReport report = probeopt::cmd_optimize(cfg);
            std::cout << "exhaustive choice: combo " << report.exhaustive_choice << "\n"
                      << "ga choice: combo " << report.ga_choice << "\n";
            for (const auto &[combo, value] : report.mmd_per_combo)
                std::cout << "mmd combo " << combo << ": " << value << "\n";
        }
        else if (evaluate->parsed())
        {
            const probeopt::EvaluateReport report = probeopt::cmd_evaluate(cfg);
            std::cout << "best combo by true mean rate: " << report.best_combo << "\n"
                      << "compression ratio vs full beamspace: "
                      << report.compressed_mean_rate / report.full_sbf_mean_rate << "\n";
            if (report.exhaustive_choice > 0)
                std::cout << "exhaustive choice true-rate ratio: " << report.exhaustive_ratio << "\n";
            if (report.ga_choice > 0)
                std::cout << "ga choice true-rate ratio: " << report.ga_ratio << "\n";
        }
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
