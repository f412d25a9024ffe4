// Copyright 2026 The NBV Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "nbv/gnn.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "nbv/error.hpp"

namespace nbv {

GnnArchitecture GnnArchitecture::from_hidden(std::span<const int> hidden) {
  GnnArchitecture a;
  a.layer_sizes.push_back(kGnnInputs);
  a.layer_sizes.insert(a.layer_sizes.end(), hidden.begin(), hidden.end());
  a.layer_sizes.push_back(kGnnOutputs);
  return a;
}

GnnArchitecture GnnArchitecture::standard() {
  static constexpr int kHidden[] = {25, 40, 60};
  return from_hidden(kHidden);
}

GnnArchitecture GnnArchitecture::parse_hidden(std::string_view csv) {
  std::vector<int> hidden;
  std::size_t pos = 0;
  while (pos < csv.size()) {
    const std::size_t comma = std::min(csv.find(',', pos), csv.size());
    const std::string_view tok = csv.substr(pos, comma - pos);
    int v = 0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (tok.empty() || ec != std::errc() || ptr != tok.data() + tok.size())
      throw UsageError("bad hidden layer list '" + std::string(csv) + "'");
    hidden.push_back(v);
    pos = comma + 1;
  }
  GnnArchitecture a = from_hidden(hidden);
  a.validate_generator();
  return a;
}

std::vector<int> GnnArchitecture::hidden() const {
  if (layer_sizes.size() < 2) return {};
  return {layer_sizes.begin() + 1, layer_sizes.end() - 1};
}

void GnnArchitecture::validate() const {
  const auto n = layer_sizes.size();
  if (n < 2 || n > kMaxGnnLayerEntries)
    throw UsageError("architecture must have 2 to 8 layer sizes, got " + std::to_string(n));
  for (int s : layer_sizes)
    if (s < 1 || s > kMaxGnnLayerSize)
      throw UsageError("layer size " + std::to_string(s) + " outside [1,4096]");
}

void GnnArchitecture::validate_generator() const {
  validate();
  if (layer_sizes.front() != kGnnInputs || layer_sizes.back() != kGnnOutputs)
    throw UsageError("generator architecture must map 3 inputs to 1536 outputs, got " +
                     to_string());
}

std::string GnnArchitecture::to_string() const {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < layer_sizes.size(); ++i) os << (i ? "," : "") << layer_sizes[i];
  os << ']';
  return os.str();
}

std::vector<std::size_t> layer_param_counts(const GnnArchitecture& arch) {
  std::vector<std::size_t> counts;
  for (std::size_t l = 0; l + 1 < arch.layer_sizes.size(); ++l)
    counts.push_back(static_cast<std::size_t>(arch.layer_sizes[l + 1]) *
                     (static_cast<std::size_t>(arch.layer_sizes[l]) + 1));
  return counts;
}

std::size_t param_count(const GnnArchitecture& arch) {
  const auto counts = layer_param_counts(arch);
  return std::accumulate(counts.begin(), counts.end(), std::size_t{0});
}

GnnParams GnnParams::zeros(const GnnArchitecture& arch) {
  arch.validate();
  GnnParams p;
  for (std::size_t l = 0; l + 1 < arch.layer_sizes.size(); ++l) {
    DenseLayer d;
    d.in = arch.layer_sizes[l];
    d.out = arch.layer_sizes[l + 1];
    d.weights.assign(static_cast<std::size_t>(d.in) * d.out, 0.0);
    d.bias.assign(d.out, 0.0);
    p.layers.push_back(std::move(d));
  }
  return p;
}

GnnArchitecture GnnParams::architecture() const {
  GnnArchitecture a;
  if (layers.empty()) return a;
  a.layer_sizes.push_back(layers.front().in);
  for (const auto& l : layers) a.layer_sizes.push_back(l.out);
  return a;
}

std::vector<double> forward(const GnnParams& params, std::span<const double> input) {
  if (params.layers.empty()) throw UsageError("forward: empty network");
  if (input.size() != static_cast<std::size_t>(params.layers.front().in))
    throw UsageError("forward: input width mismatch");
  std::vector<double> a(input.begin(), input.end());
  std::vector<double> next;
  for (const DenseLayer& layer : params.layers) {
    if (static_cast<std::size_t>(layer.in) != a.size())
      throw UsageError("forward: layer shape mismatch");
    next.assign(layer.out, 0.0);
    for (int o = 0; o < layer.out; ++o) {
      const double* w = &layer.weights[static_cast<std::size_t>(o) * layer.in];
      double acc = 0.0;
      for (int i = 0; i < layer.in; ++i) acc += w[i] * a[i];
      acc += layer.bias[o];
      next[o] = acc > 0.0 ? acc : 0.0;
    }
    a.swap(next);
  }
  return a;
}

void Dataset::add(std::span<const double> input, std::span<const double> target) {
  if (input.size() != static_cast<std::size_t>(input_dim) ||
      target.size() != static_cast<std::size_t>(output_dim))
    throw UsageError("dataset sample has wrong shape");
  inputs.insert(inputs.end(), input.begin(), input.end());
  targets.insert(targets.end(), target.begin(), target.end());
}

namespace {

void check_shapes(const GnnParams& params, const Dataset& data) {
  if (params.layers.empty()) throw UsageError("empty network");
  if (params.layers.front().in != data.input_dim || params.layers.back().out != data.output_dim)
    throw UsageError("dataset shape does not match network");
}

// Activations are stored feature-major (feature x batch) so the inner loops
// run over the batch with unit stride.
class BatchPass {
 public:
  BatchPass(const GnnParams& params, const Dataset& data, std::span<const std::size_t> batch)
      : params_(params), n_(batch.size()) {
    const int in = data.input_dim;
    acts_.emplace_back(static_cast<std::size_t>(in) * n_);
    for (std::size_t s = 0; s < n_; ++s) {
      const auto x = data.input(batch[s]);
      for (int i = 0; i < in; ++i) acts_[0][i * n_ + s] = x[i];
    }
    for (const DenseLayer& layer : params.layers) {
      const std::vector<double>& a = acts_.back();
      std::vector<double> z(static_cast<std::size_t>(layer.out) * n_, 0.0);
      for (int o = 0; o < layer.out; ++o) {
        double* zo = &z[o * n_];
        const double* w = &layer.weights[static_cast<std::size_t>(o) * layer.in];
        for (int i = 0; i < layer.in; ++i) {
          const double wi = w[i];
          const double* ai = &a[i * n_];
          for (std::size_t s = 0; s < n_; ++s) zo[s] += wi * ai[s];
        }
        const double b = layer.bias[o];
        for (std::size_t s = 0; s < n_; ++s) {
          const double v = zo[s] + b;
          zo[s] = v > 0.0 ? v : 0.0;
        }
      }
      acts_.push_back(std::move(z));
    }
  }

  Gradients gradients(const Dataset& data, std::span<const std::size_t> batch) const {
    Gradients g;
    g.grad = GnnParams::zeros(params_.architecture());
    const int out_dim = data.output_dim;
    const double norm = 1.0 / (static_cast<double>(n_) * out_dim);

    // dL/dz at the output, masked by the ReLU.
    const std::vector<double>& y = acts_.back();
    std::vector<double> delta(y.size());
    double total = 0.0;
    for (int o = 0; o < out_dim; ++o) {
      for (std::size_t s = 0; s < n_; ++s) {
        const double yo = y[o * n_ + s];
        const double diff = yo - data.targets[batch[s] * out_dim + o];
        total += diff * diff;
        delta[o * n_ + s] = yo > 0.0 ? 2.0 * diff * norm : 0.0;
      }
    }
    g.loss = total * norm;

    std::vector<double> a_rows;
    for (std::size_t l = params_.layers.size(); l-- > 0;) {
      const DenseLayer& layer = params_.layers[l];
      DenseLayer& gl = g.grad.layers[l];
      const std::vector<double>& a = acts_[l];

      // Sample-major copy of the layer input for the weight-gradient axpy.
      a_rows.resize(a.size());
      for (int i = 0; i < layer.in; ++i)
        for (std::size_t s = 0; s < n_; ++s) a_rows[s * layer.in + i] = a[i * n_ + s];

      for (int o = 0; o < layer.out; ++o) {
        const double* d = &delta[o * n_];
        double* gw = &gl.weights[static_cast<std::size_t>(o) * layer.in];
        double db = 0.0;
        for (std::size_t s = 0; s < n_; ++s) {
          const double ds = d[s];
          db += ds;
          if (ds == 0.0) continue;
          const double* as = &a_rows[s * layer.in];
          for (int i = 0; i < layer.in; ++i) gw[i] += ds * as[i];
        }
        gl.bias[o] = db;
      }
      if (l == 0) break;

      std::vector<double> prev(static_cast<std::size_t>(layer.in) * n_, 0.0);
      for (int o = 0; o < layer.out; ++o) {
        const double* d = &delta[o * n_];
        const double* w = &layer.weights[static_cast<std::size_t>(o) * layer.in];
        for (int i = 0; i < layer.in; ++i) {
          const double wi = w[i];
          if (wi == 0.0) continue;
          double* pi = &prev[i * n_];
          for (std::size_t s = 0; s < n_; ++s) pi[s] += wi * d[s];
        }
      }
      for (std::size_t k = 0; k < prev.size(); ++k)
        if (!(a[k] > 0.0)) prev[k] = 0.0;
      delta.swap(prev);
    }
    return g;
  }

 private:
  const GnnParams& params_;
  std::size_t n_;
  std::vector<std::vector<double>> acts_;
};

// 53-bit uniform in [0, 1) from the raw engine output, independent of the
// standard library's distribution implementations.
// Output units start at mid-gray so none begins dead under the output ReLU.
constexpr double kOutputBiasInit = 0.5;

double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::vector<std::size_t> iota_indices(std::size_t n) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  return idx;
}

void shuffle(std::vector<std::size_t>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace

double loss(const GnnParams& params, const Dataset& data) {
  check_shapes(params, data);
  if (data.empty()) throw UsageError("loss: empty dataset");
  double total = 0.0;
  for (std::size_t s = 0; s < data.size(); ++s) {
    const std::vector<double> y = forward(params, data.input(s));
    const auto t = data.target(s);
    double e = 0.0;
    for (std::size_t o = 0; o < y.size(); ++o) e += (y[o] - t[o]) * (y[o] - t[o]);
    total += e / static_cast<double>(y.size());
  }
  return total / static_cast<double>(data.size());
}

Gradients backward(const GnnParams& params, const Dataset& data,
                   std::span<const std::size_t> batch) {
  check_shapes(params, data);
  if (batch.empty()) throw UsageError("backward: empty batch");
  for (std::size_t i : batch)
    if (i >= data.size()) throw UsageError("backward: batch index out of range");
  return BatchPass(params, data, batch).gradients(data, batch);
}

Gradients backward(const GnnParams& params, const Dataset& data) {
  const std::vector<std::size_t> all = iota_indices(data.size());
  return backward(params, data, all);
}

GnnParams initialize(const GnnArchitecture& arch, std::uint64_t seed) {
  GnnParams p = GnnParams::zeros(arch);
  std::mt19937_64 rng(seed);
  for (DenseLayer& layer : p.layers) {
    if (&layer == &p.layers.back()) std::fill(layer.bias.begin(), layer.bias.end(), kOutputBiasInit);
    const double bound = std::sqrt(6.0 / layer.in);
    for (double& w : layer.weights) w = (2.0 * unit_uniform(rng) - 1.0) * bound;
  }
  return p;
}

TrainResult train(const GnnArchitecture& arch, const Dataset& data, const TrainOptions& options) {
  if (data.empty()) throw UsageError("train: empty dataset");
  if (options.steps < 0) throw UsageError("train: negative step count");
  if (!(options.learning_rate > 0.0)) throw UsageError("train: learning rate must be positive");

  TrainResult result;
  result.params = initialize(arch, options.seed);
  check_shapes(result.params, data);
  result.initial_loss = loss(result.params, data);
  result.best_batch_loss = result.initial_loss;

  const std::size_t n = data.size();
  std::size_t batch_size = options.batch_size;
  if (batch_size == 0) batch_size = std::min<std::size_t>(n, 1024);
  batch_size = std::min(batch_size, n);

  std::mt19937_64 rng(options.seed ^ 0x9E3779B97F4A7C15ull);
  std::vector<std::size_t> order = iota_indices(n);
  std::size_t cursor = n;  // forces a shuffle before the first mini-batch
  std::vector<std::size_t> batch;

  std::vector<std::vector<double>> m1;
  std::vector<std::vector<double>> m2;
  for (const DenseLayer& l : result.params.layers) {
    const std::size_t sz = l.weights.size() + l.bias.size();
    m1.emplace_back(sz, 0.0);
    m2.emplace_back(sz, 0.0);
  }
  double beta1_pow = 1.0;
  double beta2_pow = 1.0;

  for (int step = 0; step < options.steps; ++step) {
    if (batch_size == n) {
      batch = order;
    } else {
      batch.clear();
      while (batch.size() < batch_size) {
        if (cursor == n) {
          shuffle(order, rng);
          cursor = 0;
        }
        batch.push_back(order[cursor++]);
      }
    }
    Gradients g = backward(result.params, data, batch);
    result.best_batch_loss = std::min(result.best_batch_loss, g.loss);

    beta1_pow *= options.adam_beta1;
    beta2_pow *= options.adam_beta2;
    for (std::size_t l = 0; l < result.params.layers.size(); ++l) {
      DenseLayer& layer = result.params.layers[l];
      const DenseLayer& grad = g.grad.layers[l];
      const std::size_t nw = layer.weights.size();
      auto update = [&](double& p, double gv, std::size_t k) {
        if (options.optimizer == Optimizer::kSgd) {
          p -= options.learning_rate * gv;
          return;
        }
        double& m = m1[l][k];
        double& v = m2[l][k];
        m = options.adam_beta1 * m + (1.0 - options.adam_beta1) * gv;
        v = options.adam_beta2 * v + (1.0 - options.adam_beta2) * gv * gv;
        const double mhat = m / (1.0 - beta1_pow);
        const double vhat = v / (1.0 - beta2_pow);
        p -= options.learning_rate * mhat / (std::sqrt(vhat) + options.adam_epsilon);
      };
      for (std::size_t k = 0; k < nw; ++k) update(layer.weights[k], grad.weights[k], k);
      for (std::size_t k = 0; k < layer.bias.size(); ++k)
        update(layer.bias[k], grad.bias[k], nw + k);
    }
  }
  result.final_loss = loss(result.params, data);
  return result;
}

GnnArchitecture QuantizedGnnParams::architecture() const {
  GnnArchitecture a;
  if (layers.empty()) return a;
  a.layer_sizes.push_back(layers.front().in);
  for (const auto& l : layers) a.layer_sizes.push_back(l.out);
  return a;
}

QuantizedGnnParams quantize_params(const GnnParams& params) {
  QuantizedGnnParams q;
  for (const DenseLayer& layer : params.layers) {
    QuantizedLayer ql;
    ql.in = layer.in;
    ql.out = layer.out;
    double max_abs = 0.0;
    auto scan = [&](double v) {
      if (!std::isfinite(v)) throw UsageError("cannot quantize non-finite parameter");
      max_abs = std::max(max_abs, std::abs(v));
    };
    std::for_each(layer.weights.begin(), layer.weights.end(), scan);
    std::for_each(layer.bias.begin(), layer.bias.end(), scan);

    ql.scale = static_cast<float>(max_abs / kQuantMax);
    const bool zero = !(ql.scale > 0.0f);
    if (zero) ql.scale = 1.0f;
    ql.values.reserve(layer.weights.size() + layer.bias.size());
    auto code = [&](double v) {
      if (zero) return std::int16_t{0};
      const double r = std::round(v / static_cast<double>(ql.scale));
      return static_cast<std::int16_t>(std::clamp(r, double{-kQuantMax}, double{kQuantMax}));
    };
    for (double w : layer.weights) ql.values.push_back(code(w));
    for (double b : layer.bias) ql.values.push_back(code(b));
    q.layers.push_back(std::move(ql));
  }
  return q;
}

GnnParams dequantize_params(const QuantizedGnnParams& q) {
  GnnParams p;
  for (const QuantizedLayer& ql : q.layers) {
    DenseLayer d;
    d.in = ql.in;
    d.out = ql.out;
    const std::size_t nw = static_cast<std::size_t>(ql.in) * ql.out;
    if (ql.values.size() != nw + static_cast<std::size_t>(ql.out))
      throw UsageError("quantized layer has wrong value count");
    const double scale = ql.scale;
    d.weights.resize(nw);
    d.bias.resize(ql.out);
    for (std::size_t k = 0; k < nw; ++k) d.weights[k] = ql.values[k] * scale;
    for (int k = 0; k < ql.out; ++k) d.bias[k] = ql.values[nw + k] * scale;
    p.layers.push_back(std::move(d));
  }
  return p;
}

GnnInput make_input(BlockCoord c, int frame_index, const SetContext& ctx) {
  GnnInput in;
  in.bx = ctx.grid.cols > 1 ? static_cast<double>(c.bx) / (ctx.grid.cols - 1) : 0.0;
  in.by = ctx.grid.rows > 1 ? static_cast<double>(c.by) / (ctx.grid.rows - 1) : 0.0;
  in.frame = static_cast<double>(frame_index - ctx.set_start_frame) /
             std::max(1, ctx.set_span - 1);
  return in;
}

std::vector<double> normalized_block(const Block32& block) {
  std::vector<double> t(kBlockSamples);
  for (int i = 0; i < kBlockSamples; ++i) t[i] = block.sample(i) / 255.0;
  return t;
}

Block32 generate_block(const GnnParams& dequantized, BlockCoord c, int frame_index,
                       const SetContext& ctx) {
  const GnnInput in = make_input(c, frame_index, ctx);
  const double x[kGnnInputs] = {in.bx, in.by, in.frame};
  const std::vector<double> y = forward(dequantized, x);
  if (y.size() != static_cast<std::size_t>(kBlockSamples))
    throw UsageError("generator must produce 1536 outputs");
  Block32 b;
  for (int i = 0; i < kBlockSamples; ++i) {
    const double v = std::round(std::clamp(y[i], 0.0, 1.0) * 255.0);
    b.set_sample(i, static_cast<std::uint8_t>(v));
  }
  return b;
}

Block32 generate_block(const QuantizedGnnParams& q, BlockCoord c, int frame_index,
                       const SetContext& ctx) {
  return generate_block(dequantize_params(q), c, frame_index, ctx);
}

}  // namespace nbv
