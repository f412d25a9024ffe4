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

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nbv/frame.hpp"

namespace nbv {

inline constexpr int kGnnInputs = 3;
inline constexpr int kGnnOutputs = kBlockSamples;
inline constexpr int kMaxGnnLayerEntries = 8;
inline constexpr int kMaxGnnLayerSize = 4096;
inline constexpr int kQuantMax = 511;  // signed 10-bit, symmetric

// Layer sizes including the input and output widths.
struct GnnArchitecture {
  std::vector<int> layer_sizes;

  // {3, hidden..., 1536}
  static GnnArchitecture from_hidden(std::span<const int> hidden);
  // The four-layer 3-25-40-60-1536 network.
  static GnnArchitecture standard();

  int weight_layers() const { return static_cast<int>(layer_sizes.size()) - 1; }
  std::vector<int> hidden() const;

  // Decoder caps: 2..8 entries, each in [1, 4096]. Throws UsageError.
  void validate() const;
  // Caps plus the 3-input / 1536-output generation contract.
  void validate_generator() const;

  std::string to_string() const;
  // Comma-separated hidden sizes, e.g. "25,40,60"; empty for none.
  static GnnArchitecture parse_hidden(std::string_view csv);
  bool operator==(const GnnArchitecture&) const = default;
};

// Sum over layers of out * (in + 1).
std::size_t param_count(const GnnArchitecture& arch);
std::vector<std::size_t> layer_param_counts(const GnnArchitecture& arch);

struct DenseLayer {
  int in = 0;
  int out = 0;
  std::vector<double> weights;  // out x in, row-major
  std::vector<double> bias;     // out
  bool operator==(const DenseLayer&) const = default;
};

struct GnnParams {
  std::vector<DenseLayer> layers;

  static GnnParams zeros(const GnnArchitecture& arch);
  GnnArchitecture architecture() const;
  bool operator==(const GnnParams&) const = default;
};

// Every layer computes ReLU(W a + b), output layer included. Dot products run
// input-index ascending, then the bias is added.
std::vector<double> forward(const GnnParams& params, std::span<const double> input);

// Row-major sample matrices; targets are normalized to [0, 1].
struct Dataset {
  int input_dim = 0;
  int output_dim = 0;
  std::vector<double> inputs;
  std::vector<double> targets;

  Dataset() = default;
  Dataset(int in, int out) : input_dim(in), output_dim(out) {}

  std::size_t size() const { return input_dim == 0 ? 0 : inputs.size() / input_dim; }
  bool empty() const { return size() == 0; }
  void add(std::span<const double> input, std::span<const double> target);
  std::span<const double> input(std::size_t i) const {
    return {inputs.data() + i * input_dim, static_cast<std::size_t>(input_dim)};
  }
  std::span<const double> target(std::size_t i) const {
    return {targets.data() + i * output_dim, static_cast<std::size_t>(output_dim)};
  }
};

// Mean over samples of the per-sample mean squared error.
double loss(const GnnParams& params, const Dataset& data);

struct Gradients {
  GnnParams grad;
  double loss = 0.0;
};

// Exact gradient of the batch loss. ReLU'(0) is taken as 0.
Gradients backward(const GnnParams& params, const Dataset& data,
                   std::span<const std::size_t> batch);
Gradients backward(const GnnParams& params, const Dataset& data);

enum class Optimizer { kSgd, kAdam };

struct TrainOptions {
  Optimizer optimizer = Optimizer::kAdam;
  double learning_rate = 1e-3;
  int steps = 5000;
  // 0: whole dataset when it has at most 1024 samples, else batches of 1024.
  std::size_t batch_size = 0;
  std::uint64_t seed = 1;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
};

struct TrainResult {
  GnnParams params;
  double initial_loss = 0.0;  // full-dataset loss at initialization
  double final_loss = 0.0;    // full-dataset loss after the last step
  double best_batch_loss = 0.0;
};

// He-uniform weights, bound sqrt(6 / fan_in). Hidden biases start at 0,
// output biases at 0.5.
GnnParams initialize(const GnnArchitecture& arch, std::uint64_t seed);

// Runs exactly options.steps optimizer steps. Deterministic for a given seed.
TrainResult train(const GnnArchitecture& arch, const Dataset& data, const TrainOptions& options);

struct QuantizedLayer {
  int in = 0;
  int out = 0;
  float scale = 1.0f;
  std::vector<std::int16_t> values;  // weights row-major, then biases
  bool operator==(const QuantizedLayer&) const = default;
};

struct QuantizedGnnParams {
  std::vector<QuantizedLayer> layers;

  GnnArchitecture architecture() const;
  bool operator==(const QuantizedGnnParams&) const = default;
};

// Per layer: scale = max|v| / 511 (1 for an all-zero layer), q = round(v / scale).
QuantizedGnnParams quantize_params(const GnnParams& params);
GnnParams dequantize_params(const QuantizedGnnParams& q);

struct GnnInput {
  double bx = 0.0;
  double by = 0.0;
  double frame = 0.0;
};

// Normalization context of one parameter set.
struct SetContext {
  GridDims grid;
  int set_start_frame = 0;
  int set_span = 1;
};

GnnInput make_input(BlockCoord c, int frame_index, const SetContext& ctx);

// Block target scaled to [0, 1] in generation order.
std::vector<double> normalized_block(const Block32& block);

// 1536 outputs -> pixels: clamp(round(255 * y), 0, 255), luma then Cb then Cr.
Block32 generate_block(const GnnParams& dequantized, BlockCoord c, int frame_index,
                       const SetContext& ctx);
Block32 generate_block(const QuantizedGnnParams& q, BlockCoord c, int frame_index,
                       const SetContext& ctx);

}  // namespace nbv
