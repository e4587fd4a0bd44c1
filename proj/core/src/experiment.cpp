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

#include "probeopt/experiment.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "probeopt/metrics.hpp"

namespace probeopt
{

    // --- CsvTable ---------------------------------------------------------

    void CsvTable::write(const std::filesystem::path &path) const
    {
        std::ofstream f(path);
        if (!f)
            throw std::runtime_error("Cannot write CSV file '" + path.string() + "'");
        if (!comment.empty())
            f << "# " << comment << "\n";
        for (size_t c = 0; c < columns.size(); ++c)
            f << (c ? "," : "") << columns[c];
        f << "\n";
        for (const auto &row : rows)
        {
            if (row.size() != columns.size())
                throw std::invalid_argument("CsvTable: row width differs from the column count");
            for (size_t c = 0; c < row.size(); ++c)
                f << (c ? "," : "") << row[c];
            f << "\n";
        }
    }

    static std::vector<std::string> split_csv_line(const std::string &line)
    {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ','))
            cells.push_back(cell);
        if (!line.empty() && line.back() == ',')
            cells.push_back("");
        return cells;
    }

    CsvTable CsvTable::read(const std::filesystem::path &path)
    {
        std::ifstream f(path);
        if (!f)
            throw std::runtime_error("Cannot open CSV file '" + path.string() + "'");
        CsvTable table;
        std::string line;
        bool have_columns = false;
        while (std::getline(f, line))
        {
            if (!line.empty() && line.back() == '\r')
                line.pop_back();
            if (line.empty())
                continue;
            if (line[0] == '#')
            {
                table.comment = line.substr(line.size() > 1 && line[1] == ' ' ? 2 : 1);
                continue;
            }
            if (!have_columns)
            {
                table.columns = split_csv_line(line);
                have_columns = true;
            }
            else
                table.rows.push_back(split_csv_line(line));
        }
        if (!have_columns)
            throw std::runtime_error("CSV file '" + path.string() + "' has no header row");
        return table;
    }

    static std::string fmt(double value)
    {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.17g", value);
        return buf;
    }

    // --- ExperimentConfig -------------------------------------------------

    ExperimentConfig ExperimentConfig::from_file(const std::filesystem::path &path)
    {
        return from_kv(KeyValueConfig::from_file(path));
    }

    ExperimentConfig ExperimentConfig::from_kv(const KeyValueConfig &kv)
    {
        ExperimentConfig cfg;
        cfg.scenario = ScenarioConfig::from_config(kv);

        cfg.beams_per_ap = kv.get_uword("beams_per_ap", cfg.beams_per_ap);
        cfg.total_combos = kv.get_uword("total_combos", cfg.total_combos);
        if (kv.has("sampled_combos"))
            cfg.sampled_combos = kv.get_uword_list("sampled_combos");
        else
            for (arma::uword l = 1; l <= cfg.total_combos; ++l)
                cfg.sampled_combos.push_back(l);
        cfg.location_sets = kv.get_uword("location_sets", cfg.location_sets);
        cfg.train_per_combo = kv.get_uword("train_per_combo", cfg.train_per_combo);
        cfg.augment_per_combo = kv.get_uword("augment_per_combo", cfg.augment_per_combo);

        cfg.pipeline.compress_classes = kv.get_uword("compress_classes", cfg.pipeline.compress_classes);
        cfg.pipeline.compress_keep = kv.get_uword("compress_keep", cfg.pipeline.compress_keep);
        cfg.pipeline.lambda = kv.get_double("lmmse_lambda", cfg.pipeline.lambda);

        cfg.augmenter.latent_width = kv.get_uword("latent_width", cfg.augmenter.latent_width);
        cfg.augmenter.components = kv.get_uword("components", cfg.augmenter.components);
        if (kv.has("encoder_hidden"))
            cfg.augmenter.encoder_hidden = kv.get_uword_list("encoder_hidden");
        if (kv.has("decoder_hidden"))
            cfg.augmenter.decoder_hidden = kv.get_uword_list("decoder_hidden");
        cfg.augmenter.dropout = kv.get_double("dropout", cfg.augmenter.dropout);
        cfg.augmenter.epochs = kv.get_uword("augmenter_epochs", cfg.augmenter.epochs);
        cfg.augmenter.batch_size = kv.get_uword("batch_size", cfg.augmenter.batch_size);
        cfg.augmenter.base_lr = kv.get_double("base_lr", cfg.augmenter.base_lr);
        cfg.augmenter.lr_step = kv.get_uword("lr_step", cfg.augmenter.lr_step);
        cfg.augmenter.lr_gamma = kv.get_double("lr_gamma", cfg.augmenter.lr_gamma);

        if (kv.has("mapper_hidden"))
            cfg.mapper.hidden = kv.get_uword_list("mapper_hidden");
        cfg.mapper.dropout = kv.get_double("mapper_dropout", cfg.augmenter.dropout);
        cfg.mapper.epochs = kv.get_uword("mapper_epochs", cfg.mapper.epochs);
        cfg.mapper.batch_size = cfg.augmenter.batch_size;
        cfg.mapper.base_lr = kv.get_double("mapper_base_lr", cfg.augmenter.base_lr);
        cfg.mapper.lr_step = cfg.augmenter.lr_step;
        cfg.mapper.lr_gamma = cfg.augmenter.lr_gamma;

        cfg.ga.population = kv.get_uword("ga_population", cfg.ga.population);
        cfg.ga.restarts = kv.get_uword("ga_restarts", cfg.ga.restarts);
        cfg.ga.generations = kv.get_uword("ga_generations", cfg.ga.generations);
        cfg.ga.crossover = kv.get_double("ga_crossover", cfg.ga.crossover);
        cfg.ga.mutation = kv.get_double("ga_mutation", cfg.ga.mutation);
        cfg.ga.elitism = kv.get_uword("ga_elitism", cfg.ga.elitism);

        cfg.baseline = kv.get_string("baseline", cfg.baseline);
        cfg.seed = kv.get_u64("seed", cfg.seed);
        cfg.out_dir = kv.get_string("out_dir", cfg.out_dir.string());
        cfg.config_hash = fnv1a(kv.canonical());

        // Derived sub-seeds keep the stages decoupled but reproducible
        cfg.augmenter.init_seed = mix_seed(cfg.seed, 101);
        cfg.augmenter.train_seed = mix_seed(cfg.seed, 102);
        cfg.mapper.init_seed = mix_seed(cfg.seed, 103);
        cfg.mapper.train_seed = mix_seed(cfg.seed, 104);
        cfg.ga.seed = mix_seed(cfg.seed, 105);

        // Baseline selects the generative-model family
        if (cfg.baseline == "cvae")
        {
            cfg.augmenter.components = 1;
            cfg.augmenter.covariance = CovarianceMode::diagonal;
            cfg.augmenter.condition_enabled = true;
        }
        else if (cfg.baseline == "vae-mdn")
            cfg.augmenter.condition_enabled = false;
        else if (cfg.baseline == "cvae-mdn")
            cfg.augmenter.condition_enabled = true;

        cfg.validate();
        return cfg;
    }

    void ExperimentConfig::validate() const
    {
        scenario.validate();
        if (baseline != "cvae" && baseline != "vae-mdn" && baseline != "cvae-mdn")
            throw std::invalid_argument("ExperimentConfig: baseline must be cvae, vae-mdn or cvae-mdn");
        if (total_combos < 1 || beams_per_ap < 1)
            throw std::invalid_argument("ExperimentConfig: combo partition must be >= 1");
        if (total_combos * beams_per_ap > scenario.geometry.size())
            throw std::invalid_argument("ExperimentConfig: probing sectors exceed the codebook");
        if (sampled_combos.empty())
            throw std::invalid_argument("ExperimentConfig: at least one sampled combo required");
        std::vector<arma::uword> sorted = sampled_combos;
        std::sort(sorted.begin(), sorted.end());
        for (size_t i = 0; i < sorted.size(); ++i)
        {
            if (sorted[i] < 1 || sorted[i] > total_combos)
                throw std::invalid_argument("ExperimentConfig: sampled combo out of range");
            if (i > 0 && sorted[i] == sorted[i - 1])
                throw std::invalid_argument("ExperimentConfig: duplicate sampled combo");
        }
        if (location_sets < 1)
            throw std::invalid_argument("ExperimentConfig: location_sets must be >= 1");
        ga.validate();
    }

    arma::uword ExperimentConfig::pbm_dim() const
    {
        return scenario.num_users * scenario.num_aps * beams_per_ap;
    }

    arma::uword ExperimentConfig::condition_width() const
    {
        return 2 * beams_per_ap * scenario.geometry.size();
    }

    ProbingConfig ExperimentConfig::combo(arma::uword combo_index) const
    {
        return horizontal_sector_combo(scenario.geometry, scenario.num_aps, beams_per_ap,
                                       total_combos, combo_index);
    }

    arma::vec ExperimentConfig::condition_of(arma::uword combo_index) const
    {
        return combo(combo_index).condition_vector(scenario.geometry);
    }

    std::uint64_t ExperimentConfig::channel_seed(arma::uword location_set) const
    {
        return mix_seed(mix_seed(seed, 42), location_set);
    }

    std::filesystem::path ExperimentConfig::dataset_path(Split split) const
    {
        return out_dir / ("dataset_" + to_string(split) + ".bin");
    }

    std::filesystem::path ExperimentConfig::augmenter_path() const
    {
        return out_dir / "augmenter.ckpt";
    }

    std::filesystem::path ExperimentConfig::augmenter_path(arma::uword combo_index) const
    {
        return out_dir / ("augmenter_combo" + std::to_string(combo_index) + ".ckpt");
    }

    std::filesystem::path ExperimentConfig::mapper_path() const
    {
        return out_dir / "mapper.ckpt";
    }

    static std::string provenance_comment(const ExperimentConfig &cfg)
    {
        return "config_hash=" + hash_hex(cfg.config_hash) + " seed=" + std::to_string(cfg.seed);
    }

    // --- cmd_generate -----------------------------------------------------

    GenerateResult cmd_generate(const ExperimentConfig &cfg)
    {
        cfg.validate();
        std::filesystem::create_directories(cfg.out_dir);

        GenerateResult result;
        for (SampleDataset *ds : {&result.train, &result.validation, &result.test})
        {
            ds->pbm_dim = cfg.pbm_dim();
            ds->combo_count = cfg.total_combos;
            ds->config_hash = cfg.config_hash;
            ds->seed = cfg.seed;
        }
        result.train.split = Split::train;
        result.validation.split = Split::validation;
        result.test.split = Split::test;

        std::vector<ProbingConfig> combos;
        for (arma::uword l : cfg.sampled_combos)
            combos.push_back(cfg.combo(l));

        for (arma::uword ls = 0; ls < cfg.location_sets; ++ls)
        {
            const ChannelRealization channel = generate_channel(cfg.scenario, cfg.channel_seed(ls));
            const Split split = split_of_location_set(ls, cfg.location_sets);
            SampleDataset &target = split == Split::train
                                        ? result.train
                                        : (split == Split::validation ? result.validation : result.test);
            for (size_t c = 0; c < combos.size(); ++c)
            {
                const ProbingEvaluation eval =
                    evaluate_probing_config(channel, combos[c], cfg.scenario, cfg.pipeline);
                LabeledSample sample;
                sample.combo_index = cfg.sampled_combos[c];
                sample.location_set = ls;
                sample.sum_rate = eval.sum_rate;
                sample.pbm = eval.pbm.values;
                target.samples.push_back(std::move(sample));
            }
        }

        for (const SampleDataset *ds : {&result.train, &result.validation, &result.test})
        {
            ds->save(cfg.dataset_path(ds->split));
            std::filesystem::path csv = cfg.dataset_path(ds->split);
            csv.replace_extension(".csv");
            ds->save_csv(csv);
        }

        CsvTable combos_csv;
        combos_csv.comment = provenance_comment(cfg);
        combos_csv.columns = {"combo_index", "first_beam", "last_beam", "sampled"};
        for (arma::uword l = 1; l <= cfg.total_combos; ++l)
        {
            bool sampled = std::find(cfg.sampled_combos.begin(), cfg.sampled_combos.end(), l) !=
                           cfg.sampled_combos.end();
            combos_csv.rows.push_back({std::to_string(l), std::to_string((l - 1) * cfg.beams_per_ap),
                                       std::to_string(l * cfg.beams_per_ap - 1),
                                       sampled ? "1" : "0"});
        }
        combos_csv.write(cfg.out_dir / "combos.csv");
        return result;
    }

    // --- cmd_train --------------------------------------------------------

    static SampleDataset load_split(const ExperimentConfig &cfg, Split split)
    {
        const auto path = cfg.dataset_path(split);
        if (!std::filesystem::exists(path))
            throw std::runtime_error("Missing dataset '" + path.string() + "'; run generate first");
        SampleDataset ds = SampleDataset::load(path);
        if (ds.pbm_dim != cfg.pbm_dim() || ds.combo_count != cfg.total_combos)
            throw std::runtime_error("Dataset '" + path.string() + "' does not match this config");
        if (ds.split != split)
            throw std::runtime_error("Dataset '" + path.string() + "' carries the wrong split tag");
        return ds;
    }

    // Gathers (pbm, condition, rate) columns of one dataset, keeping at most
    // per_combo_cap samples per combo (0 = no cap), restricted to given combos.
    struct AssembledData
    {
        ConditionedSamples inputs;
        arma::vec rates;
    };

    static AssembledData assemble(const ExperimentConfig &cfg, const SampleDataset &ds,
                                  const std::vector<arma::uword> &combos, arma::uword per_combo_cap)
    {
        std::vector<arma::uword> keep;
        for (arma::uword l : combos)
        {
            auto idx = ds.combo_sample_indices(l);
            if (per_combo_cap > 0 && idx.size() > per_combo_cap)
                idx.resize(per_combo_cap);
            keep.insert(keep.end(), idx.begin(), idx.end());
        }
        std::sort(keep.begin(), keep.end()); // Stored order: location set then combo

        AssembledData data;
        data.inputs.pbm.set_size(cfg.pbm_dim(), keep.size());
        data.inputs.condition.set_size(cfg.condition_width(), keep.size());
        data.rates.set_size(keep.size());

        std::map<arma::uword, arma::vec> conditions;
        for (arma::uword l : combos)
            conditions[l] = cfg.condition_of(l);

        for (size_t i = 0; i < keep.size(); ++i)
        {
            const LabeledSample &s = ds.samples[keep[i]];
            data.inputs.pbm.col(i) = s.pbm;
            data.inputs.condition.col(i) = conditions.at(s.combo_index);
            data.rates(i) = s.sum_rate;
        }
        return data;
    }

    static void write_loss_csv(const ExperimentConfig &cfg, const std::filesystem::path &path,
                               const std::vector<TrainEpoch> &log)
    {
        CsvTable table;
        table.comment = provenance_comment(cfg);
        table.columns = {"epoch", "train_loss", "val_loss", "lr"};
        for (const auto &row : log)
            table.rows.push_back({std::to_string(row.epoch), fmt(row.train_loss), fmt(row.val_loss),
                                  fmt(row.lr)});
        table.write(path);
    }

    TrainArtifacts cmd_train(const ExperimentConfig &cfg)
    {
        cfg.validate();
        std::filesystem::create_directories(cfg.out_dir);
        const SampleDataset train_ds = load_split(cfg, Split::train);
        const SampleDataset val_ds = load_split(cfg, Split::validation);
        require_trainable(train_ds, "cmd_train");
        require_trainable(val_ds, "cmd_train");

        for (arma::uword l : cfg.sampled_combos)
            if (train_ds.combo_sample_indices(l).empty())
                throw std::runtime_error("cmd_train: combo " + std::to_string(l) +
                                         " has no training samples");

        TrainArtifacts artifacts;
        if (cfg.baseline == "vae-mdn")
        {
            // One unconditioned model per sampled combo
            for (arma::uword l : cfg.sampled_combos)
            {
                const AssembledData tr = assemble(cfg, train_ds, {l}, cfg.train_per_combo);
                const AssembledData va = assemble(cfg, val_ds, {l}, 0);
                AugmenterTrainResult res = train_augmenter(tr.inputs, va.inputs, cfg.augmenter);
                res.model.save(cfg.augmenter_path(l), cfg.config_hash, cfg.seed);
                write_loss_csv(cfg, cfg.out_dir / ("augmenter_loss_combo" + std::to_string(l) + ".csv"),
                               res.log);
                artifacts.augmenters.push_back(std::move(res));
                artifacts.augmenter_combos.push_back(l);
            }
        }
        else
        {
            const AssembledData tr = assemble(cfg, train_ds, cfg.sampled_combos, cfg.train_per_combo);
            const AssembledData va = assemble(cfg, val_ds, cfg.sampled_combos, 0);
            AugmenterTrainResult res = train_augmenter(tr.inputs, va.inputs, cfg.augmenter);
            res.model.save(cfg.augmenter_path(), cfg.config_hash, cfg.seed);
            write_loss_csv(cfg, cfg.out_dir / "augmenter_loss.csv", res.log);
            artifacts.augmenters.push_back(std::move(res));
            artifacts.augmenter_combos.push_back(0);
        }

        const AssembledData tr = assemble(cfg, train_ds, cfg.sampled_combos, cfg.train_per_combo);
        const AssembledData va = assemble(cfg, val_ds, cfg.sampled_combos, 0);
        artifacts.mapper = train_mapper(tr.inputs, tr.rates, va.inputs, va.rates, cfg.mapper);
        artifacts.mapper.model.save(cfg.mapper_path(), cfg.config_hash, cfg.seed);
        write_loss_csv(cfg, cfg.out_dir / "mapper_loss.csv", artifacts.mapper.log);
        return artifacts;
    }

    // --- cmd_optimize -----------------------------------------------------

    static bool is_sampled(const ExperimentConfig &cfg, arma::uword combo_index)
    {
        return std::find(cfg.sampled_combos.begin(), cfg.sampled_combos.end(), combo_index) !=
               cfg.sampled_combos.end();
    }

    OptimizeReport cmd_optimize(const ExperimentConfig &cfg)
    {
        cfg.validate();
        std::filesystem::create_directories(cfg.out_dir);
        const SampleDataset train_ds = load_split(cfg, Split::train);
        const SampleDataset test_ds = load_split(cfg, Split::test);
        const RateMapperModel mapper = RateMapperModel::load(cfg.mapper_path());

        // Load the generative model(s)
        std::map<arma::uword, AugmenterModel> per_combo_models;
        AugmenterModel shared_model;
        if (cfg.baseline == "vae-mdn")
            for (arma::uword l : cfg.sampled_combos)
                per_combo_models[l] = AugmenterModel::load(cfg.augmenter_path(l));
        else
            shared_model = AugmenterModel::load(cfg.augmenter_path());

        OptimizeReport report;
        report.pool.sampled.resize(cfg.total_combos);
        report.pool.augmented.resize(cfg.total_combos);

        std::map<arma::uword, arma::mat> generated; // Raw PBM columns per combo
        for (arma::uword l = 1; l <= cfg.total_combos; ++l)
        {
            // Sampled rates: the combo's training data (capped like training)
            if (is_sampled(cfg, l))
            {
                auto idx = train_ds.combo_sample_indices(l);
                if (cfg.train_per_combo > 0 && idx.size() > cfg.train_per_combo)
                    idx.resize(cfg.train_per_combo);
                for (arma::uword i : idx)
                    report.pool.sampled[l - 1].push_back(train_ds.samples[i].sum_rate);
            }

            if (cfg.augment_per_combo > 0)
            {
                const AugmenterModel *model = &shared_model;
                if (cfg.baseline == "vae-mdn")
                {
                    auto it = per_combo_models.find(l);
                    if (it == per_combo_models.end())
                        throw std::runtime_error(
                            "cmd_optimize: baseline vae-mdn has no model for unsampled combo " +
                            std::to_string(l));
                    model = &it->second;
                }
                const arma::vec condition = cfg.condition_of(l);
                const arma::mat pbms = generate_pbms(*model, condition, cfg.augment_per_combo,
                                                     mix_seed(cfg.seed, 5000 + l));
                generated[l] = pbms;
                arma::mat cond_batch(cfg.condition_width(), pbms.n_cols);
                cond_batch.each_col() = condition;
                const arma::vec rates = predict_rates(mapper, pbms, cond_batch);
                for (double r : rates)
                    report.pool.augmented[l - 1].push_back(r);
            }
        }

        report.exhaustive_choice = exhaustive_select(report.pool);
        report.ga = ga_optimize(report.pool, cfg.ga);
        report.ga_choice = report.ga.combo_index;
        for (arma::uword l = 1; l <= cfg.total_combos; ++l)
            report.combo_fitness.push_back(fitness(report.pool, l));

        // Distribution distance per sampled combo: generated vs held-out test
        // PBMs, in log space standardized by the real side, bandwidth from the
        // real side only (so models are compared on one scale).
        for (arma::uword l : cfg.sampled_combos)
        {
            const auto idx = test_ds.combo_sample_indices(l);
            if (idx.size() < 2 || generated.find(l) == generated.end())
                continue;
            arma::mat real(cfg.pbm_dim(), idx.size());
            for (size_t i = 0; i < idx.size(); ++i)
                real.col(i) = test_ds.samples[idx[i]].pbm;

            const PbmNormalizer ref = PbmNormalizer::fit(real, true);
            const arma::mat real_n = ref.normalize_batch(real);
            const arma::mat gen_n = ref.normalize_batch(generated.at(l));
            report.mmd_per_combo[l] = mmd(real_n, gen_n, median_bandwidth(real_n));
        }

        // Reports
        CsvTable selection;
        selection.comment = provenance_comment(cfg);
        selection.columns = {"combo_index", "n_sampled", "n_augmented", "fitness", "exhaustive_choice",
                             "ga_choice"};
        for (arma::uword l = 1; l <= cfg.total_combos; ++l)
            selection.rows.push_back({std::to_string(l),
                                      std::to_string(report.pool.sampled[l - 1].size()),
                                      std::to_string(report.pool.augmented[l - 1].size()),
                                      fmt(report.combo_fitness[l - 1]),
                                      l == report.exhaustive_choice ? "1" : "0",
                                      l == report.ga_choice ? "1" : "0"});
        selection.write(cfg.out_dir / "selection.csv");

        CsvTable trace;
        trace.comment = provenance_comment(cfg);
        trace.columns = {"restart", "generation", "best_fitness", "mean_fitness"};
        for (const auto &row : report.ga.trace)
            trace.rows.push_back({std::to_string(row.restart), std::to_string(row.generation),
                                  fmt(row.best_fitness), fmt(row.mean_fitness)});
        trace.write(cfg.out_dir / "ga_trace.csv");

        CsvTable mmd_csv;
        mmd_csv.comment = provenance_comment(cfg);
        mmd_csv.columns = {"train_size", "model_tag", "combo_index", "mmd"};
        for (const auto &[l, value] : report.mmd_per_combo)
            mmd_csv.rows.push_back({std::to_string(cfg.train_per_combo), cfg.baseline,
                                    std::to_string(l), fmt(value)});
        mmd_csv.write(cfg.out_dir / "mmd_report.csv");

        // Rate CDFs: real test-split rates vs predicted rates of the
        // generated samples
        arma::vec real_rates(test_ds.samples.size());
        for (size_t i = 0; i < test_ds.samples.size(); ++i)
            real_rates(i) = test_ds.samples[i].sum_rate;
        std::vector<double> predicted;
        for (arma::uword l = 1; l <= cfg.total_combos; ++l)
            for (double r : report.pool.augmented[l - 1])
                predicted.push_back(r);

        auto write_cdf = [&](const arma::vec &values, const std::filesystem::path &path) {
            CsvTable cdf_csv;
            cdf_csv.comment = provenance_comment(cfg);
            cdf_csv.columns = {"rate", "probability"};
            if (values.n_elem > 0)
            {
                const arma::mat cdf = empirical_cdf(values);
                for (arma::uword i = 0; i < cdf.n_rows; ++i)
                    cdf_csv.rows.push_back({fmt(cdf(i, 0)), fmt(cdf(i, 1))});
            }
            cdf_csv.write(path);
        };
        write_cdf(real_rates, cfg.out_dir / "cdf_real.csv");
        write_cdf(arma::vec(predicted), cfg.out_dir / "cdf_predicted.csv");

        std::ofstream summary(cfg.out_dir / "summary.txt");
        summary << "probeopt selection summary\n"
                << "config_hash " << hash_hex(cfg.config_hash) << "\n"
                << "seed " << cfg.seed << "\n"
                << "baseline " << cfg.baseline << "\n"
                << "exhaustive_choice " << report.exhaustive_choice << "\n"
                << "ga_choice " << report.ga_choice << "\n";
        for (arma::uword l = 1; l <= cfg.total_combos; ++l)
            summary << "combo " << l << " fitness " << fmt(report.combo_fitness[l - 1]) << " sampled "
                    << report.pool.sampled[l - 1].size() << " augmented "
                    << report.pool.augmented[l - 1].size() << "\n";
        return report;
    }

    // --- cmd_evaluate -----------------------------------------------------

    EvaluateReport cmd_evaluate(const ExperimentConfig &cfg)
    {
        cfg.validate();
        std::filesystem::create_directories(cfg.out_dir);

        const arma::uword n_train = (arma::uword)(0.70 * (double)cfg.location_sets);
        const arma::uword n_val = (arma::uword)(0.15 * (double)cfg.location_sets);
        const arma::uword test_begin = n_train + n_val;
        if (test_begin >= cfg.location_sets)
            throw std::invalid_argument("cmd_evaluate: no test location sets for this split");

        EvaluateReport report;
        report.true_mean_rates.zeros(cfg.total_combos);
        double compressed_sum = 0.0, full_sum = 0.0;
        PipelineParams full = cfg.pipeline;
        full.compress_classes = 1;
        full.compress_keep = 1;

        for (arma::uword ls = test_begin; ls < cfg.location_sets; ++ls)
        {
            const ChannelRealization channel = generate_channel(cfg.scenario, cfg.channel_seed(ls));
            double best_compressed = -arma::datum::inf, best_full = -arma::datum::inf;
            for (arma::uword l = 1; l <= cfg.total_combos; ++l)
            {
                const ProbingConfig probing = cfg.combo(l);
                const double rate =
                    evaluate_probing_config(channel, probing, cfg.scenario, cfg.pipeline).sum_rate;
                report.true_mean_rates(l - 1) += rate;
                best_compressed = std::max(best_compressed, rate);
                best_full = std::max(
                    best_full, evaluate_probing_config(channel, probing, cfg.scenario, full).sum_rate);
            }
            compressed_sum += best_compressed;
            full_sum += best_full;
        }

        const double n_test = (double)(cfg.location_sets - test_begin);
        report.true_mean_rates /= n_test;
        report.best_combo = report.true_mean_rates.index_max() + 1;
        report.compressed_mean_rate = compressed_sum / n_test;
        report.full_sbf_mean_rate = full_sum / n_test;

        // Pull the optimizer's choices if a selection summary exists
        const auto summary_path = cfg.out_dir / "summary.txt";
        if (std::filesystem::exists(summary_path))
        {
            std::ifstream f(summary_path);
            std::string key;
            while (f >> key)
            {
                if (key == "exhaustive_choice")
                    f >> report.exhaustive_choice;
                else if (key == "ga_choice")
                    f >> report.ga_choice;
                else
                    f.ignore(std::numeric_limits<std::streamsize>::max(), '\n');
            }
        }
        const double best_rate = report.true_mean_rates(report.best_combo - 1);
        if (report.exhaustive_choice >= 1 && report.exhaustive_choice <= cfg.total_combos)
            report.exhaustive_ratio = report.true_mean_rates(report.exhaustive_choice - 1) / best_rate;
        if (report.ga_choice >= 1 && report.ga_choice <= cfg.total_combos)
            report.ga_ratio = report.true_mean_rates(report.ga_choice - 1) / best_rate;

        CsvTable table;
        table.comment = provenance_comment(cfg);
        table.columns = {"combo_index", "true_mean_rate", "ratio_to_best"};
        for (arma::uword l = 1; l <= cfg.total_combos; ++l)
            table.rows.push_back({std::to_string(l), fmt(report.true_mean_rates(l - 1)),
                                  fmt(report.true_mean_rates(l - 1) / best_rate)});
        table.write(cfg.out_dir / "true_rates.csv");

        std::ofstream summary(cfg.out_dir / "evaluation_summary.txt");
        summary << "probeopt evaluation summary\n"
                << "config_hash " << hash_hex(cfg.config_hash) << "\n"
                << "seed " << cfg.seed << "\n"
                << "best_combo " << report.best_combo << "\n"
                << "compressed_mean_rate " << fmt(report.compressed_mean_rate) << "\n"
                << "full_sbf_mean_rate " << fmt(report.full_sbf_mean_rate) << "\n"
                << "compression_ratio " << fmt(report.compressed_mean_rate / report.full_sbf_mean_rate)
                << "\n";
        if (report.exhaustive_choice > 0)
            summary << "exhaustive_choice " << report.exhaustive_choice << " true_ratio "
                    << fmt(report.exhaustive_ratio) << "\n";
        if (report.ga_choice > 0)
            summary << "ga_choice " << report.ga_choice << " true_ratio " << fmt(report.ga_ratio)
                    << "\n";
        return report;
    }

} // namespace probeopt
