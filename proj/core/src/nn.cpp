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

#include "probeopt/nn.hpp"

#include <bit>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace probeopt
{

    static_assert(std::endian::native == std::endian::little,
                  "checkpoint files are little-endian; big-endian hosts are unsupported");

    std::string to_string(Activation activation)
    {
        switch (activation)
        {
        case Activation::identity:
            return "identity";
        case Activation::prelu:
            return "prelu";
        case Activation::softmax:
            return "softmax";
        case Activation::exponential:
            return "exponential";
        }
        throw std::invalid_argument("to_string: unknown activation");
    }

    Activation activation_from_string(const std::string &name)
    {
        if (name == "identity")
            return Activation::identity;
        if (name == "prelu")
            return Activation::prelu;
        if (name == "softmax")
            return Activation::softmax;
        if (name == "exponential")
            return Activation::exponential;
        throw std::invalid_argument("activation_from_string: unknown activation '" + name + "'");
    }

    arma::uword DenseNetSpec::output_width() const
    {
        validate();
        return layers.back().width;
    }

    void DenseNetSpec::validate() const
    {
        if (input_width < 1)
            throw std::invalid_argument("DenseNetSpec: input_width must be >= 1");
        if (layers.empty())
            throw std::invalid_argument("DenseNetSpec: at least one layer required");
        for (size_t l = 0; l < layers.size(); ++l)
        {
            if (layers[l].width < 1)
                throw std::invalid_argument("DenseNetSpec: layer widths must be >= 1");
            if (layers[l].dropout < 0.0 || layers[l].dropout >= 1.0)
                throw std::invalid_argument("DenseNetSpec: dropout must lie in [0, 1)");
            if (layers[l].activation == Activation::softmax && l + 1 != layers.size())
                throw std::invalid_argument("DenseNetSpec: softmax is only valid on the final layer");
        }
    }

    ParamLayout::ParamLayout(const DenseNetSpec &spec)
    {
        spec.validate();
        arma::uword offset = 0, in = spec.input_width;
        for (const auto &ls : spec.layers)
        {
            Layer v;
            v.input_width = in;
            v.output_width = ls.width;
            v.weight_offset = offset;
            offset += in * ls.width;
            v.bias_offset = offset;
            offset += ls.width;
            v.has_slope = ls.activation == Activation::prelu;
            if (v.has_slope)
                v.slope_offset = offset++;
            layers.push_back(v);
            in = ls.width;
        }
        total = offset;
    }

    arma::vec init_params(const DenseNetSpec &spec, std::uint64_t seed)
    {
        const ParamLayout layout(spec);
        arma::vec params(layout.total, arma::fill::zeros);
        Rng rng(seed);
        for (const auto &v : layout.layers)
        {
            double limit = std::sqrt(6.0 / (double)(v.input_width + v.output_width));
            std::uniform_real_distribution<double> uni(-limit, limit);
            for (arma::uword i = 0; i < v.input_width * v.output_width; ++i)
                params(v.weight_offset + i) = uni(rng);
            if (v.has_slope)
                params(v.slope_offset) = 0.25;
        }
        return params;
    }

    // Read-only aliases into a flat parameter vector (no copies)
    static arma::mat weight_view(const arma::vec &flat, const ParamLayout::Layer &v)
    {
        return arma::mat(const_cast<double *>(flat.memptr()) + v.weight_offset, v.output_width,
                         v.input_width, false, true);
    }

    static arma::vec bias_view(const arma::vec &flat, const ParamLayout::Layer &v)
    {
        return arma::vec(const_cast<double *>(flat.memptr()) + v.bias_offset, v.output_width, false, true);
    }

    static std::uint64_t stamp_of(const arma::vec &params)
    {
        return mix_seed(fnv1a(params.memptr(), params.n_elem * sizeof(double)), params.n_elem);
    }

    void ForwardTape::require_fresh(const arma::vec &current) const
    {
        if (stamp_of(current) != params_stamp)
            throw std::logic_error("ForwardTape: stale tape (parameters changed since forward)");
    }

    static arma::mat apply_activation(Activation activation, const arma::mat &z, double slope)
    {
        switch (activation)
        {
        case Activation::identity:
            return z;
        case Activation::prelu:
        {
            arma::mat a = z;
            a.transform([slope](double v) { return v > 0.0 ? v : slope * v; });
            return a;
        }
        case Activation::softmax:
        {
            arma::mat a = z;
            for (arma::uword c = 0; c < a.n_cols; ++c)
            {
                arma::vec col = a.col(c);
                col = arma::exp(col - col.max());
                a.col(c) = col / arma::accu(col);
            }
            return a;
        }
        case Activation::exponential:
            return arma::exp(z);
        }
        throw std::invalid_argument("apply_activation: unknown activation");
    }

    ForwardTape forward(const DenseNetSpec &spec, const arma::vec &params, const arma::mat &input,
                        NetMode mode, std::uint64_t seed)
    {
        const ParamLayout layout(spec);
        if (params.n_elem != layout.total)
            throw std::invalid_argument("forward: parameter vector has wrong length");
        if (input.n_rows != spec.input_width)
            throw std::invalid_argument("forward: input width mismatch");

        ForwardTape tape;
        tape.spec = spec;
        tape.mode = mode;
        tape.seed = seed;
        tape.params = params;
        tape.params_stamp = stamp_of(params);
        tape.input = input;

        const size_t n_layers = spec.layers.size();
        tape.pre.resize(n_layers);
        tape.post.resize(n_layers);
        tape.masks.resize(n_layers);
        tape.out.resize(n_layers);

        const arma::mat *x = &tape.input;
        for (size_t l = 0; l < n_layers; ++l)
        {
            const auto &v = layout.layers[l];
            const auto &ls = spec.layers[l];
            double slope = v.has_slope ? params(v.slope_offset) : 0.0;

            tape.pre[l] = weight_view(params, v) * (*x);
            tape.pre[l].each_col() += bias_view(params, v);
            tape.post[l] = apply_activation(ls.activation, tape.pre[l], slope);

            if (mode == NetMode::train && ls.dropout > 0.0)
            {
                Rng rng(mix_seed(seed, (std::uint64_t)l));
                std::uniform_real_distribution<double> uni(0.0, 1.0);
                arma::mat mask(tape.post[l].n_rows, tape.post[l].n_cols);
                const double keep_scale = 1.0 / (1.0 - ls.dropout);
                for (arma::uword i = 0; i < mask.n_elem; ++i)
                    mask(i) = uni(rng) < ls.dropout ? 0.0 : keep_scale;
                tape.masks[l] = mask;
                tape.out[l] = tape.post[l] % mask;
            }
            else
                tape.out[l] = tape.post[l];
            x = &tape.out[l];
        }
        return tape;
    }

    NetGradients backward(const ForwardTape &tape, const arma::mat &output_grad)
    {
        const ParamLayout layout(tape.spec);
        if (output_grad.n_rows != tape.spec.output_width() || output_grad.n_cols != tape.input.n_cols)
            throw std::invalid_argument("backward: output gradient shape mismatch");

        NetGradients grads;
        grads.params.zeros(layout.total);

        arma::mat d_out = output_grad;
        for (size_t li = tape.spec.layers.size(); li-- > 0;)
        {
            const auto &v = layout.layers[li];
            const auto &ls = tape.spec.layers[li];

            if (!tape.masks[li].is_empty())
                d_out %= tape.masks[li];

            arma::mat d_pre;
            switch (ls.activation)
            {
            case Activation::identity:
                d_pre = std::move(d_out);
                break;
            case Activation::prelu:
            {
                double slope = tape.params(v.slope_offset);
                const arma::mat &z = tape.pre[li];
                d_pre.set_size(z.n_rows, z.n_cols);
                double d_slope = 0.0;
                for (arma::uword i = 0; i < z.n_elem; ++i)
                {
                    if (z(i) > 0.0)
                        d_pre(i) = d_out(i);
                    else
                    {
                        d_pre(i) = slope * d_out(i);
                        d_slope += z(i) * d_out(i);
                    }
                }
                grads.params(v.slope_offset) = d_slope;
                break;
            }
            case Activation::softmax:
            {
                const arma::mat &s = tape.post[li];
                d_pre.set_size(s.n_rows, s.n_cols);
                for (arma::uword c = 0; c < s.n_cols; ++c)
                {
                    double dot = arma::dot(s.col(c), d_out.col(c));
                    d_pre.col(c) = s.col(c) % (d_out.col(c) - dot);
                }
                break;
            }
            case Activation::exponential:
                d_pre = d_out % tape.post[li]; // d exp(z)/dz = exp(z)
                break;
            }

            const arma::mat &layer_in = li == 0 ? tape.input : tape.out[li - 1];
            arma::mat d_w(grads.params.memptr() + v.weight_offset, v.output_width, v.input_width,
                          false, true);
            arma::vec d_b(grads.params.memptr() + v.bias_offset, v.output_width, false, true);
            d_w = d_pre * layer_in.t();
            d_b = arma::sum(d_pre, 1);

            if (li == 0)
                grads.input = weight_view(tape.params, v).t() * d_pre;
            else
                d_out = weight_view(tape.params, v).t() * d_pre;
        }
        return grads;
    }

    void adam_step(arma::vec &params, const arma::vec &grad, AdamState &state, const AdamConfig &cfg)
    {
        if (grad.n_elem != params.n_elem)
            throw std::invalid_argument("adam_step: gradient length mismatch");
        if (state.m.n_elem == 0)
        {
            state.m.zeros(params.n_elem);
            state.v.zeros(params.n_elem);
        }
        if (state.m.n_elem != params.n_elem)
            throw std::invalid_argument("adam_step: optimizer state length mismatch");

        state.t += 1;
        state.m = cfg.beta1 * state.m + (1.0 - cfg.beta1) * grad;
        state.v = cfg.beta2 * state.v + (1.0 - cfg.beta2) * arma::square(grad);
        const double m_corr = 1.0 - std::pow(cfg.beta1, (double)state.t);
        const double v_corr = 1.0 - std::pow(cfg.beta2, (double)state.t);
        params -= cfg.lr * (state.m / m_corr) / (arma::sqrt(state.v / v_corr) + cfg.eps);
    }

    double step_lr_schedule(double base_lr, arma::uword step_size, double gamma, arma::uword epoch)
    {
        if (gamma <= 0.0 || gamma > 1.0)
            throw std::invalid_argument("step_lr_schedule: gamma must lie in (0, 1]");
        if (step_size < 1)
            throw std::invalid_argument("step_lr_schedule: step_size must be >= 1");
        return base_lr * std::pow(gamma, (double)(epoch / step_size));
    }

    // --- Checkpoint IO ----------------------------------------------------

    static void write_doubles(std::ofstream &f, const arma::vec &v)
    {
        f.write(reinterpret_cast<const char *>(v.memptr()), (std::streamsize)(v.n_elem * sizeof(double)));
        f << "\n";
    }

    static arma::vec read_doubles(std::ifstream &f, arma::uword n)
    {
        arma::vec v(n);
        f.read(reinterpret_cast<char *>(v.memptr()), (std::streamsize)(n * sizeof(double)));
        std::string rest;
        std::getline(f, rest); // Consume the trailing newline
        if (!f)
            throw std::runtime_error("Checkpoint payload truncated");
        return v;
    }

    void Checkpoint::save(const std::filesystem::path &path) const
    {
        std::ofstream f(path, std::ios::binary);
        if (!f)
            throw std::runtime_error("Cannot write checkpoint file '" + path.string() + "'");
        f.precision(17);

        f << "probeopt-checkpoint v1\n"
          << "model " << model << "\n"
          << "config_hash " << hash_hex(config_hash) << "\n"
          << "seed " << seed << "\n";
        for (const auto &[name, value] : scalars)
            f << "scalar " << name << " " << value << "\n";
        for (const auto &[name, v] : vectors)
        {
            f << "vec " << name << " " << v.n_elem << "\n";
            write_doubles(f, v);
        }
        for (const auto &[name, net] : networks)
        {
            const auto &[spec, params] = net;
            spec.validate();
            f << "net " << name << " input_width " << spec.input_width << " layers "
              << spec.layers.size() << "\n";
            for (const auto &ls : spec.layers)
                f << "layer " << ls.width << " " << to_string(ls.activation) << " " << ls.dropout << "\n";
            f << "params " << params.n_elem << "\n";
            write_doubles(f, params);
        }
        f << "end\n";
        if (!f)
            throw std::runtime_error("Write failed for checkpoint file '" + path.string() + "'");
    }

    Checkpoint Checkpoint::load(const std::filesystem::path &path)
    {
        std::ifstream f(path, std::ios::binary);
        if (!f)
            throw std::runtime_error("Cannot open checkpoint file '" + path.string() + "'");

        std::string line;
        if (!std::getline(f, line) || line != "probeopt-checkpoint v1")
            throw std::runtime_error("'" + path.string() + "' is not a probeopt-checkpoint v1 file");

        Checkpoint ck;
        bool ended = false;
        while (!ended && std::getline(f, line))
        {
            std::istringstream ss(line);
            std::string key;
            ss >> key;
            if (key == "end")
                ended = true;
            else if (key == "model")
                ss >> ck.model;
            else if (key == "config_hash")
            {
                std::string hex;
                ss >> hex;
                ck.config_hash = std::stoull(hex, nullptr, 16);
            }
            else if (key == "seed")
                ss >> ck.seed;
            else if (key == "scalar")
            {
                std::string name;
                double value;
                ss >> name >> value;
                ck.scalars[name] = value;
            }
            else if (key == "vec")
            {
                std::string name;
                arma::uword n;
                ss >> name >> n;
                ck.vectors[name] = read_doubles(f, n);
            }
            else if (key == "net")
            {
                std::string name, kw1, kw2;
                DenseNetSpec spec;
                arma::uword n_layers;
                ss >> name >> kw1 >> spec.input_width >> kw2 >> n_layers;
                for (arma::uword l = 0; l < n_layers; ++l)
                {
                    if (!std::getline(f, line))
                        throw std::runtime_error("Checkpoint net section truncated");
                    std::istringstream ls(line);
                    std::string lkey, act;
                    LayerSpec layer;
                    ls >> lkey >> layer.width >> act >> layer.dropout;
                    layer.activation = activation_from_string(act);
                    spec.layers.push_back(layer);
                }
                if (!std::getline(f, line))
                    throw std::runtime_error("Checkpoint net section truncated");
                std::istringstream ps(line);
                std::string pkey;
                arma::uword n_params;
                ps >> pkey >> n_params;
                if (pkey != "params")
                    throw std::runtime_error("Checkpoint net section missing params line");
                spec.validate();
                if (ParamLayout(spec).total != n_params)
                    throw std::runtime_error("Checkpoint parameter count disagrees with its spec");
                ck.networks[name] = {spec, read_doubles(f, n_params)};
            }
            else
                throw std::runtime_error("Unknown checkpoint entry '" + key + "'");
        }
        if (!ended)
            throw std::runtime_error("Checkpoint file '" + path.string() + "' is not terminated");
        return ck;
    }

} // namespace probeopt
