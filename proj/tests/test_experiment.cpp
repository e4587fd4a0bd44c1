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

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <catch2/catch_amalgamated.hpp>

#include "probeopt/experiment.hpp"

using namespace probeopt;

namespace
{

    // Small two-AP scenario that runs the full pipeline in seconds
    std::filesystem::path write_config(const std::string &name,
                                       const std::map<std::string, std::string> &extra)
    {
        const auto dir = std::filesystem::temp_directory_path() / "probeopt_experiment_tests";
        std::filesystem::create_directories(dir);

        std::map<std::string, std::string> kv = {
            {"num_aps", "2"},          {"num_users", "2"},
            {"m_y", "4"},              {"m_z", "2"},
            {"paths_per_link", "3"},   {"beams_per_ap", "2"},
            {"total_combos", "4"},     {"location_sets", "10"},
            {"train_per_combo", "10"}, {"augment_per_combo", "5"},
            {"latent_width", "4"},     {"components", "2"},
            {"encoder_hidden", "16"},  {"decoder_hidden", "16"},
            {"augmenter_epochs", "3"}, {"mapper_hidden", "16"},
            {"mapper_epochs", "3"},    {"batch_size", "8"},
            {"seed", "7"},             {"out_dir", (dir / (name + "_out")).string()},
        };
        for (const auto &[key, value] : extra)
            kv[key] = value;

        const auto path = dir / (name + ".cfg");
        std::ofstream f(path);
        for (const auto &[key, value] : kv)
            f << key << " = " << value << "\n";
        return path;
    }

    std::string read_bytes(const std::filesystem::path &path)
    {
        std::ifstream f(path, std::ios::binary);
        REQUIRE(f.good());
        std::ostringstream ss;
        ss << f.rdbuf();
        return ss.str();
    }

} // namespace

TEST_CASE("report tables round-trip through disk")
{
    CsvTable table;
    table.comment = "config_hash=deadbeef seed=3";
    table.columns = {"combo_index", "value"};
    table.rows = {{"1", "0.5"}, {"2", "1.25"}, {"3", "-7"}};

    const auto path = std::filesystem::temp_directory_path() / "probeopt_csv_rt.csv";
    table.write(path);
    const CsvTable loaded = CsvTable::read(path);
    CHECK(loaded.comment == table.comment);
    CHECK(loaded.columns == table.columns);
    CHECK(loaded.rows == table.rows);
    std::filesystem::remove(path);

    CHECK_THROWS_AS(CsvTable::read(std::filesystem::temp_directory_path() / "probeopt_absent.csv"),
                    std::runtime_error);
}

TEST_CASE("experiment settings resolve defaults and honor overrides")
{
    const ExperimentConfig defaults = ExperimentConfig::from_kv(KeyValueConfig{});
    CHECK(defaults.beams_per_ap == 8);
    CHECK(defaults.total_combos == 8);
    CHECK(defaults.location_sets == 200);
    CHECK(defaults.train_per_combo == 100);
    CHECK(defaults.augment_per_combo == 100);
    CHECK(defaults.baseline == "cvae-mdn");
    REQUIRE(defaults.sampled_combos.size() == 8);
    CHECK(defaults.sampled_combos.front() == 1);
    CHECK(defaults.sampled_combos.back() == 8);
    defaults.validate();

    KeyValueConfig kv;
    kv.set("total_combos", "4");
    kv.set("beams_per_ap", "2");
    kv.set("m_y", "4");
    kv.set("m_z", "2");
    kv.set("sampled_combos", "1, 3");
    kv.set("baseline", "cvae");
    kv.set("seed", "42");
    const ExperimentConfig cfg = ExperimentConfig::from_kv(kv);
    CHECK(cfg.total_combos == 4);
    CHECK(cfg.sampled_combos == std::vector<arma::uword>{1, 3});
    CHECK(cfg.baseline == "cvae");
    CHECK(cfg.seed == 42);
    cfg.validate();
}

TEST_CASE("experiment validation rejects inconsistent settings")
{
    KeyValueConfig kv;
    kv.set("baseline", "gan");
    CHECK_THROWS_AS(ExperimentConfig::from_kv(kv).validate(), std::invalid_argument);

    kv = KeyValueConfig{};
    kv.set("total_combos", "9"); // 9 sectors of 8 beams exceed the 64-beam codebook
    CHECK_THROWS_AS(ExperimentConfig::from_kv(kv).validate(), std::invalid_argument);

    kv = KeyValueConfig{};
    kv.set("sampled_combos", "1, 9");
    CHECK_THROWS_AS(ExperimentConfig::from_kv(kv).validate(), std::invalid_argument);

    kv = KeyValueConfig{};
    kv.set("sampled_combos", "2, 2");
    CHECK_THROWS_AS(ExperimentConfig::from_kv(kv).validate(), std::invalid_argument);
}

TEST_CASE("the configuration hash tracks the canonical key set")
{
    KeyValueConfig kv;
    kv.set("seed", "1");
    const ExperimentConfig a = ExperimentConfig::from_kv(kv);
    const ExperimentConfig b = ExperimentConfig::from_kv(kv);
    CHECK(a.config_hash == b.config_hash);
    CHECK(a.config_hash != 0);

    kv.set("seed", "2");
    CHECK(ExperimentConfig::from_kv(kv).config_hash != a.config_hash);
    kv.set("seed", "1");
    kv.set("total_combos", "4");
    CHECK(ExperimentConfig::from_kv(kv).config_hash != a.config_hash);
}

TEST_CASE("baseline choices reshape the generative model")
{
    KeyValueConfig kv;
    const ExperimentConfig full = ExperimentConfig::from_kv(kv);
    CHECK(full.augmenter.components == 8);
    CHECK(full.augmenter.covariance == CovarianceMode::full);
    CHECK(full.augmenter.condition_enabled);

    kv.set("baseline", "cvae");
    const ExperimentConfig cvae = ExperimentConfig::from_kv(kv);
    CHECK(cvae.augmenter.components == 1);
    CHECK(cvae.augmenter.covariance == CovarianceMode::diagonal);
    CHECK(cvae.augmenter.condition_enabled);

    kv.set("baseline", "vae-mdn");
    const ExperimentConfig vae = ExperimentConfig::from_kv(kv);
    CHECK(vae.augmenter.components == 8);
    CHECK(vae.augmenter.covariance == CovarianceMode::full);
    CHECK_FALSE(vae.augmenter.condition_enabled);
}

TEST_CASE("derived probing quantities follow the scenario shape")
{
    const ExperimentConfig cfg = ExperimentConfig::from_file(write_config("derived", {}));
    CHECK(cfg.pbm_dim() == 2 * 2 * 2);
    CHECK(cfg.condition_width() == 2 * 2 * 8);

    const ProbingConfig first = cfg.combo(1);
    const ProbingConfig second = cfg.combo(2);
    first.validate(cfg.scenario.geometry.m_y * cfg.scenario.geometry.m_z);
    second.validate(cfg.scenario.geometry.m_y * cfg.scenario.geometry.m_z);
    CHECK(arma::accu(first.beam_indices != second.beam_indices) > 0);

    const arma::vec c1 = cfg.condition_of(1);
    const arma::vec c2 = cfg.condition_of(2);
    REQUIRE(c1.n_elem == cfg.condition_width());
    CHECK_FALSE(arma::approx_equal(c1, c2, "absdiff", 1.0e-12));

    CHECK(cfg.channel_seed(0) == cfg.channel_seed(0));
    CHECK(cfg.channel_seed(0) != cfg.channel_seed(1));
}

TEST_CASE("the full pipeline runs end to end on a small scenario")
{
    const ExperimentConfig cfg = ExperimentConfig::from_file(write_config("pipeline", {}));
    std::filesystem::remove_all(cfg.out_dir);

    // Generation: 10 location sets split 7/1/2, each probed under 4 combos
    const GenerateResult gen = cmd_generate(cfg);
    CHECK(gen.train.samples.size() == 7 * 4);
    CHECK(gen.validation.samples.size() == 1 * 4);
    CHECK(gen.test.samples.size() == 2 * 4);
    for (const Split split : {Split::train, Split::validation, Split::test})
    {
        CHECK(std::filesystem::exists(cfg.dataset_path(split)));
        auto csv = cfg.dataset_path(split);
        csv.replace_extension(".csv");
        CHECK(std::filesystem::exists(csv));
    }
    CHECK(std::filesystem::exists(cfg.out_dir / "combos.csv"));
    CHECK(CsvTable::read(cfg.out_dir / "combos.csv").rows.size() == 4);

    for (const LabeledSample &sample : gen.train.samples)
    {
        CHECK(sample.pbm.n_elem == cfg.pbm_dim());
        CHECK(sample.sum_rate >= 0.0);
    }

    // Regeneration is byte-identical
    const std::string first_bytes = read_bytes(cfg.dataset_path(Split::train));
    cmd_generate(cfg);
    CHECK(read_bytes(cfg.dataset_path(Split::train)) == first_bytes);

    // Training: one shared augmenter plus the rate mapper
    const TrainArtifacts artifacts = cmd_train(cfg);
    REQUIRE(artifacts.augmenters.size() == 1);
    CHECK(artifacts.augmenters[0].log.size() == 3);
    CHECK(artifacts.mapper.log.size() == 3);
    CHECK(std::filesystem::exists(cfg.augmenter_path()));
    CHECK(std::filesystem::exists(cfg.mapper_path()));
    CHECK(CsvTable::read(cfg.out_dir / "augmenter_loss.csv").rows.size() == 3);
    CHECK(CsvTable::read(cfg.out_dir / "mapper_loss.csv").rows.size() == 3);

    // Optimization: pool sizes, reports and machine-readable summary
    const OptimizeReport opt = cmd_optimize(cfg);
    CHECK(opt.exhaustive_choice >= 1);
    CHECK(opt.exhaustive_choice <= 4);
    CHECK(opt.ga_choice >= 1);
    CHECK(opt.ga_choice <= 4);
    REQUIRE(opt.pool.total_combos() == 4);
    for (arma::uword l = 1; l <= 4; ++l)
    {
        CHECK(opt.pool.sampled[l - 1].size() == 7);
        CHECK(opt.pool.augmented[l - 1].size() == 5);
    }
    CHECK(opt.mmd_per_combo.size() == 4); // Two test samples per combo suffice
    for (const auto &[l, value] : opt.mmd_per_combo)
    {
        CHECK(l >= 1);
        CHECK(std::isfinite(value));
    }
    CHECK(CsvTable::read(cfg.out_dir / "selection.csv").rows.size() == 4);
    CHECK(CsvTable::read(cfg.out_dir / "ga_trace.csv").rows.size() == opt.ga.trace.size());
    CHECK(CsvTable::read(cfg.out_dir / "mmd_report.csv").rows.size() == 4);
    CHECK(std::filesystem::exists(cfg.out_dir / "cdf_real.csv"));
    CHECK(std::filesystem::exists(cfg.out_dir / "cdf_predicted.csv"));

    const std::string summary = read_bytes(cfg.out_dir / "summary.txt");
    CHECK(summary.find("exhaustive_choice " + std::to_string(opt.exhaustive_choice)) !=
          std::string::npos);
    CHECK(summary.find("ga_choice " + std::to_string(opt.ga_choice)) != std::string::npos);

    // Evaluation: ground-truth rates and the parsed selections
    const EvaluateReport eval = cmd_evaluate(cfg);
    REQUIRE(eval.true_mean_rates.n_elem == 4);
    CHECK(eval.true_mean_rates.min() > 0.0);
    CHECK(eval.best_combo >= 1);
    CHECK(eval.best_combo <= 4);
    CHECK(eval.exhaustive_choice == opt.exhaustive_choice);
    CHECK(eval.ga_choice == opt.ga_choice);
    CHECK(eval.exhaustive_ratio > 0.0);
    CHECK(eval.exhaustive_ratio <= 1.0 + 1.0e-12);
    CHECK(eval.ga_ratio > 0.0);
    CHECK(eval.ga_ratio <= 1.0 + 1.0e-12);
    CHECK(eval.compressed_mean_rate > 0.0);
    CHECK(eval.full_sbf_mean_rate > 0.0);
    CHECK(std::filesystem::exists(cfg.out_dir / "true_rates.csv"));
    CHECK(std::filesystem::exists(cfg.out_dir / "evaluation_summary.txt"));
    CHECK(CsvTable::read(cfg.out_dir / "true_rates.csv").rows.size() == 4);

    std::filesystem::remove_all(cfg.out_dir);
}

TEST_CASE("restricting the sampled combinations excludes the rest from the data")
{
    const ExperimentConfig cfg =
        ExperimentConfig::from_file(write_config("subset", {{"sampled_combos", "1, 3"}}));
    std::filesystem::remove_all(cfg.out_dir);

    const GenerateResult gen = cmd_generate(cfg);
    CHECK(gen.train.samples.size() == 7 * 2);
    for (const SampleDataset *ds : {&gen.train, &gen.validation, &gen.test})
        for (const LabeledSample &sample : ds->samples)
            CHECK((sample.combo_index == 1 || sample.combo_index == 3));

    std::filesystem::remove_all(cfg.out_dir);
}

TEST_CASE("without augmentation the selection is the best sampled mean")
{
    const ExperimentConfig cfg =
        ExperimentConfig::from_file(write_config("sampled_only", {{"augment_per_combo", "0"}}));
    std::filesystem::remove_all(cfg.out_dir);

    cmd_generate(cfg);
    cmd_train(cfg);
    const OptimizeReport opt = cmd_optimize(cfg);

    // Oracle: per-combo mean of the training rates, first-seen maximum
    const SampleDataset train = SampleDataset::load(cfg.dataset_path(Split::train));
    arma::uword best = 1;
    double best_mean = -1.0;
    for (arma::uword l = 1; l <= 4; ++l)
    {
        double sum = 0.0;
        arma::uword count = 0;
        for (arma::uword i : train.combo_sample_indices(l))
        {
            sum += train.samples[i].sum_rate;
            ++count;
        }
        if (sum / count > best_mean)
        {
            best_mean = sum / count;
            best = l;
        }
    }

    CHECK(opt.exhaustive_choice == best);
    CHECK(opt.ga_choice == best); // Population 6 >= 4 codes: the search is exhaustive
    for (arma::uword l = 1; l <= 4; ++l)
        CHECK(opt.pool.augmented[l - 1].empty());
    CHECK(opt.mmd_per_combo.empty());

    std::filesystem::remove_all(cfg.out_dir);
}

TEST_CASE("the per-combo model farm needs every combination sampled")
{
    const ExperimentConfig cfg = ExperimentConfig::from_file(
        write_config("farm_partial", {{"baseline", "vae-mdn"}, {"sampled_combos", "1, 2"}}));
    std::filesystem::remove_all(cfg.out_dir);

    cmd_generate(cfg);
    const TrainArtifacts artifacts = cmd_train(cfg);
    REQUIRE(artifacts.augmenters.size() == 2);
    CHECK(artifacts.augmenter_combos == std::vector<arma::uword>{1, 2});
    CHECK(std::filesystem::exists(cfg.augmenter_path(1)));
    CHECK(std::filesystem::exists(cfg.augmenter_path(2)));

    CHECK_THROWS_WITH(cmd_optimize(cfg), Catch::Matchers::ContainsSubstring("vae-mdn"));
    std::filesystem::remove_all(cfg.out_dir);
}

TEST_CASE("the per-combo model farm optimizes when fully sampled")
{
    const ExperimentConfig cfg = ExperimentConfig::from_file(
        write_config("farm_full", {{"baseline", "vae-mdn"}, {"total_combos", "2"}}));
    std::filesystem::remove_all(cfg.out_dir);

    cmd_generate(cfg);
    cmd_train(cfg);
    const OptimizeReport opt = cmd_optimize(cfg);
    CHECK(opt.exhaustive_choice >= 1);
    CHECK(opt.exhaustive_choice <= 2);
    CHECK(opt.pool.augmented[0].size() == 5);
    CHECK(opt.pool.augmented[1].size() == 5);

    std::filesystem::remove_all(cfg.out_dir);
}

TEST_CASE("stages demand their inputs and a lone location set still evaluates")
{
    const ExperimentConfig cfg = ExperimentConfig::from_file(write_config("missing", {}));
    std::filesystem::remove_all(cfg.out_dir);
    CHECK_THROWS_AS(cmd_train(cfg), std::runtime_error);
    CHECK_THROWS_AS(cmd_optimize(cfg), std::runtime_error);

    // floor(0.7 n) + floor(0.15 n) < n for every n, so even a single location
    // set falls into the test split and evaluation proceeds
    const ExperimentConfig tiny =
        ExperimentConfig::from_file(write_config("too_few", {{"location_sets", "1"}}));
    const EvaluateReport report = cmd_evaluate(tiny);
    CHECK(report.compressed_mean_rate > 0.0);
    CHECK(report.full_sbf_mean_rate > 0.0);
    std::filesystem::remove_all(tiny.out_dir);
    std::filesystem::remove_all(cfg.out_dir);
}

TEST_CASE("evaluation without a selection summary reports no choices")
{
    const ExperimentConfig cfg = ExperimentConfig::from_file(write_config("eval_only", {}));
    std::filesystem::remove_all(cfg.out_dir);

    const EvaluateReport eval = cmd_evaluate(cfg);
    CHECK(eval.exhaustive_choice == 0);
    CHECK(eval.ga_choice == 0);
    CHECK(eval.exhaustive_ratio == 0.0);
    CHECK(eval.ga_ratio == 0.0);
    CHECK(eval.true_mean_rates.min() > 0.0);

    std::filesystem::remove_all(cfg.out_dir);
}
