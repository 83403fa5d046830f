// Copyright 2026 The gazekit Authors.
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

#include "gazekit/regressor.h"

#include <array>
#include <cmath>
#include <numeric>
#include <sstream>

#include "adam.h"
#include "gazekit/error.h"
#include "gazekit/random.h"
#include "text_io.h"

namespace gazekit {
namespace {

constexpr std::string_view kFormatTag = "gazekit-cgu";
constexpr int kFormatVersion = 1;

using R = CguRegressor;

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double relu(double z) { return z > 0.0 ? z : 0.0; }

// Intermediate values of one forward pass, kept for backpropagation.
struct Trace {
  std::array<double, R::kUnits> v{};     // coordinate input per unit
  std::array<double, R::kUnits> c{};     // confidence input per unit
  std::array<double, R::kUnits> r{};     // a v + b
  std::array<double, R::kUnits> gate{};  // sigmoid(p c + q)
  std::array<double, R::kUnits> h0{};
  std::array<double, R::kHidden> z1{};
  std::array<double, R::kHidden> h1{};
  std::array<double, R::kHidden> z2{};
  std::array<double, R::kHidden> h2{};
  std::array<double, R::kOutputs> out{};
};

Trace run_forward(std::span<const double> w, const FeatureVector& fv) {
  Trace t;
  for (int j = 0; j < R::kUnits; ++j) {
    const int kp = j / 2;
    const auto ju = static_cast<std::size_t>(j);
    t.v[ju] = (j % 2 == 0) ? fv.x(kp) : fv.y(kp);
    t.c[ju] = fv.k(kp);
    const double* u = &w[R::kCguOffset + 4 * ju];
    t.r[ju] = u[0] * t.v[ju] + u[1];
    t.gate[ju] = sigmoid(u[2] * t.c[ju] + u[3]);
    t.h0[ju] = relu(t.r[ju]) * t.gate[ju];
  }
  for (int o = 0; o < R::kHidden; ++o) {
    const auto ou = static_cast<std::size_t>(o);
    double z = w[R::kB1Offset + ou];
    for (int j = 0; j < R::kUnits; ++j) {
      z += w[R::kW1Offset + ou * R::kUnits + static_cast<std::size_t>(j)] *
           t.h0[static_cast<std::size_t>(j)];
    }
    t.z1[ou] = z;
    t.h1[ou] = relu(z);
  }
  for (int o = 0; o < R::kHidden; ++o) {
    const auto ou = static_cast<std::size_t>(o);
    double z = w[R::kB2Offset + ou];
    for (int j = 0; j < R::kHidden; ++j) {
      z += w[R::kW2Offset + ou * R::kHidden + static_cast<std::size_t>(j)] *
           t.h1[static_cast<std::size_t>(j)];
    }
    t.z2[ou] = z;
    t.h2[ou] = relu(z);
  }
  for (int o = 0; o < R::kOutputs; ++o) {
    const auto ou = static_cast<std::size_t>(o);
    double z = w[R::kB3Offset + ou];
    for (int j = 0; j < R::kHidden; ++j) {
      z += w[R::kW3Offset + ou * R::kHidden + static_cast<std::size_t>(j)] *
           t.h2[static_cast<std::size_t>(j)];
    }
    t.out[ou] = z;
  }
  return t;
}

Vec2 pixels(const CguRegressor& net, const Trace& t) {
  return net.output_offset + net.output_scale.cwiseProduct(Vec2(t.out[0], t.out[1]));
}

double penalty(const CguRegressor& net) {
  const auto w = net.parameters();
  double cgu = 0.0;
  for (std::size_t i = R::kCguOffset; i < R::kW1Offset; ++i) cgu += w[i] * w[i];
  double fc = 0.0;
  for (std::size_t i = R::kW1Offset; i < R::kB1Offset; ++i) fc += w[i] * w[i];
  for (std::size_t i = R::kW2Offset; i < R::kB2Offset; ++i) fc += w[i] * w[i];
  return net.l2_cgu * cgu + net.l2_fc * fc;
}

void write_block(std::ostringstream& out, std::span<const double> w,
                 std::size_t offset, int rows, int cols) {
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (c) out << ' ';
      out << text_io::format_double(
          w[offset + static_cast<std::size_t>(r) * static_cast<std::size_t>(cols) +
            static_cast<std::size_t>(c)]);
    }
    out << '\n';
  }
}

void read_block(text_io::TokenReader& in, std::span<double> w,
                std::size_t offset, std::size_t count) {
  for (std::size_t i = 0; i < count; ++i) w[offset + i] = in.number();
}

}  // namespace

double cgu_forward(const CguUnit& unit, double v, double c) {
  return relu(unit.a * v + unit.b) * sigmoid(unit.p * c + unit.q);
}

void TrainConfig::validate() const {
  if (epochs < 1 || batch_size <= 0) {
    throw Error(ErrorCode::kConfigError, "epochs and batch_size must be positive");
  }
  if (!(lr0 > 0.0) || !(lr_decay > 0.0 && lr_decay <= 1.0)) {
    throw Error(ErrorCode::kConfigError,
                "lr0 must be positive and lr_decay in (0, 1]");
  }
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0) ||
      !(epsilon > 0.0) || !(init_stddev >= 0.0)) {
    throw Error(ErrorCode::kConfigError, "invalid optimizer settings");
  }
}

CguRegressor::CguRegressor() : params_(kNumParameters, 0.0) {
  for (std::size_t i = kCguOffset; i < kW1Offset; ++i) params_[i] = 1.0;
}

CguRegressor CguRegressor::initialized(std::uint64_t seed, double stddev) {
  CguRegressor net;
  Rng rng(seed);
  const auto fill = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) net.params_[i] = rng.normal(0.0, stddev);
  };
  fill(kW1Offset, kB1Offset);
  fill(kW2Offset, kB2Offset);
  fill(kW3Offset, kB3Offset);
  return net;
}

CguUnit CguRegressor::unit(int j) const {
  const double* u = &params_[kCguOffset + 4 * static_cast<std::size_t>(j)];
  return {u[0], u[1], u[2], u[3]};
}

void CguRegressor::set_unit(int j, const CguUnit& u) {
  double* p = &params_[kCguOffset + 4 * static_cast<std::size_t>(j)];
  p[0] = u.a;
  p[1] = u.b;
  p[2] = u.p;
  p[3] = u.q;
}

RegressorOutput forward(const CguRegressor& net, const FeatureVector& fv) {
  const Trace t = run_forward(net.parameters(), fv);
  return {pixels(net, t), sigmoid(t.out[2])};
}

LossTerms loss_terms(const CguRegressor& net,
                     std::span<const RegressionSample> batch) {
  if (batch.empty()) throw Error(ErrorCode::kEmptyBatch, "empty batch");
  double sum = 0.0;
  for (const auto& s : batch) {
    const Trace t = run_forward(net.parameters(), s.features);
    sum += (pixels(net, t) - s.target).squaredNorm();
  }
  LossTerms terms;
  terms.data = std::sqrt(sum / (2.0 * static_cast<double>(batch.size())));
  terms.penalty = penalty(net);
  return terms;
}

std::vector<double> backward(const CguRegressor& net,
                             std::span<const RegressionSample> batch) {
  if (batch.empty()) throw Error(ErrorCode::kEmptyBatch, "empty batch");
  const auto w = net.parameters();
  std::vector<double> g(R::kNumParameters, 0.0);

  std::vector<Trace> traces;
  traces.reserve(batch.size());
  double sum = 0.0;
  for (const auto& s : batch) {
    traces.push_back(run_forward(w, s.features));
    sum += (pixels(net, traces.back()) - s.target).squaredNorm();
  }
  const double two_b = 2.0 * static_cast<double>(batch.size());
  const double data = std::sqrt(sum / two_b);

  if (data > 0.0) {
    // dL/de = e / (2B * L_data) for each coordinate error e.
    const double scale = 1.0 / (two_b * data);
    for (std::size_t n = 0; n < batch.size(); ++n) {
      const Trace& t = traces[n];
      const Vec2 e = pixels(net, t) - batch[n].target;
      std::array<double, R::kOutputs> d_out = {
          e.x() * net.output_scale.x() * scale, e.y() * net.output_scale.y() * scale,
          0.0};

      std::array<double, R::kHidden> d_z2{};
      for (int o = 0; o < R::kOutputs; ++o) {
        const auto ou = static_cast<std::size_t>(o);
        if (d_out[ou] == 0.0) continue;
        g[R::kB3Offset + ou] += d_out[ou];
        for (int j = 0; j < R::kHidden; ++j) {
          const auto ju = static_cast<std::size_t>(j);
          g[R::kW3Offset + ou * R::kHidden + ju] += d_out[ou] * t.h2[ju];
          d_z2[ju] += w[R::kW3Offset + ou * R::kHidden + ju] * d_out[ou];
        }
      }
      for (int j = 0; j < R::kHidden; ++j) {
        if (!(t.z2[static_cast<std::size_t>(j)] > 0.0)) d_z2[static_cast<std::size_t>(j)] = 0.0;
      }

      std::array<double, R::kHidden> d_z1{};
      for (int o = 0; o < R::kHidden; ++o) {
        const auto ou = static_cast<std::size_t>(o);
        if (d_z2[ou] == 0.0) continue;
        g[R::kB2Offset + ou] += d_z2[ou];
        for (int j = 0; j < R::kHidden; ++j) {
          const auto ju = static_cast<std::size_t>(j);
          g[R::kW2Offset + ou * R::kHidden + ju] += d_z2[ou] * t.h1[ju];
          d_z1[ju] += w[R::kW2Offset + ou * R::kHidden + ju] * d_z2[ou];
        }
      }
      for (int j = 0; j < R::kHidden; ++j) {
        if (!(t.z1[static_cast<std::size_t>(j)] > 0.0)) d_z1[static_cast<std::size_t>(j)] = 0.0;
      }

      std::array<double, R::kUnits> d_h0{};
      for (int o = 0; o < R::kHidden; ++o) {
        const auto ou = static_cast<std::size_t>(o);
        if (d_z1[ou] == 0.0) continue;
        g[R::kB1Offset + ou] += d_z1[ou];
        for (int j = 0; j < R::kUnits; ++j) {
          const auto ju = static_cast<std::size_t>(j);
          g[R::kW1Offset + ou * R::kUnits + ju] += d_z1[ou] * t.h0[ju];
          d_h0[ju] += w[R::kW1Offset + ou * R::kUnits + ju] * d_z1[ou];
        }
      }

      for (int j = 0; j < R::kUnits; ++j) {
        const auto ju = static_cast<std::size_t>(j);
        const double active = t.r[ju] > 0.0 ? 1.0 : 0.0;
        const double d_r = d_h0[ju] * t.gate[ju] * active;
        const double d_gate_in =
            d_h0[ju] * relu(t.r[ju]) * t.gate[ju] * (1.0 - t.gate[ju]);
        double* gu = &g[R::kCguOffset + 4 * ju];
        gu[0] += d_r * t.v[ju];
        gu[1] += d_r;
        gu[2] += d_gate_in * t.c[ju];
        gu[3] += d_gate_in;
      }
    }
  }

  for (std::size_t i = R::kCguOffset; i < R::kW1Offset; ++i) {
    g[i] += 2.0 * net.l2_cgu * w[i];
  }
  for (std::size_t i = R::kW1Offset; i < R::kB1Offset; ++i) {
    g[i] += 2.0 * net.l2_fc * w[i];
  }
  for (std::size_t i = R::kW2Offset; i < R::kB2Offset; ++i) {
    g[i] += 2.0 * net.l2_fc * w[i];
  }
  return g;
}

RegressorTrainResult train_regressor(std::span<const RegressionSample> samples,
                                     const TrainConfig& config) {
  config.validate();
  if (samples.empty()) {
    throw Error(ErrorCode::kEmptyBatch, "no regression samples to train on");
  }
  RegressorTrainResult result;
  result.net = CguRegressor::initialized(config.seed, config.init_stddev);
  result.net.train_config = config;
  Vec2 mean = Vec2::Zero();
  for (const auto& s : samples) mean += s.target;
  mean /= static_cast<double>(samples.size());
  Vec2 var = Vec2::Zero();
  for (const auto& s : samples) var += (s.target - mean).cwiseAbs2();
  var /= static_cast<double>(samples.size());
  result.net.output_offset = mean;
  for (int i = 0; i < 2; ++i) {
    result.net.output_scale[i] = var[i] > 1e-12 ? std::sqrt(var[i]) : 1.0;
  }
  AdamState adam(R::kNumParameters, config.beta1, config.beta2, config.epsilon);
  Rng rng(config.seed ^ 0xd1b54a32d192ed03ULL);

  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<RegressionSample> batch;
  double lr = config.lr0;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    double epoch_loss = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t end =
          std::min(order.size(), start + static_cast<std::size_t>(config.batch_size));
      batch.clear();
      for (std::size_t i = start; i < end; ++i) batch.push_back(samples[order[i]]);
      const double batch_loss = loss(result.net, batch);
      if (!std::isfinite(batch_loss)) {
        throw Error(ErrorCode::kNonFiniteLoss,
                    "regressor loss became non-finite in epoch " +
                        std::to_string(epoch));
      }
      const std::vector<double> grad = backward(result.net, batch);
      adam.step(result.net.parameters(), grad, lr);
      epoch_loss += batch_loss;
      ++batches;
    }
    result.log.push_back({epoch, lr, epoch_loss / static_cast<double>(batches)});
    lr *= config.lr_decay;
  }
  return result;
}

std::string serialize_regressor(const CguRegressor& net) {
  using text_io::format_double;
  const TrainConfig& cfg = net.train_config;
  const auto w = net.parameters();
  std::ostringstream out;
  out << kFormatTag << " v" << kFormatVersion << '\n';
  out << "train_config epochs " << cfg.epochs << " batch_size " << cfg.batch_size
      << " lr0 " << format_double(cfg.lr0) << " lr_decay "
      << format_double(cfg.lr_decay) << " beta1 " << format_double(cfg.beta1)
      << " beta2 " << format_double(cfg.beta2) << " epsilon "
      << format_double(cfg.epsilon) << " init_stddev "
      << format_double(cfg.init_stddev) << " seed " << cfg.seed << '\n';
  out << "l2 cgu " << format_double(net.l2_cgu) << " fc " << format_double(net.l2_fc)
      << '\n';
  out << "output_affine " << format_double(net.output_offset.x()) << ' '
      << format_double(net.output_offset.y()) << ' '
      << format_double(net.output_scale.x()) << ' '
      << format_double(net.output_scale.y()) << '\n';
  out << "cgu " << R::kUnits << " 4\n";
  write_block(out, w, R::kCguOffset, R::kUnits, 4);
  out << "fc1 " << R::kHidden << ' ' << R::kUnits << '\n';
  write_block(out, w, R::kW1Offset, R::kHidden, R::kUnits);
  out << "fc1_bias " << R::kHidden << '\n';
  write_block(out, w, R::kB1Offset, 1, R::kHidden);
  out << "fc2 " << R::kHidden << ' ' << R::kHidden << '\n';
  write_block(out, w, R::kW2Offset, R::kHidden, R::kHidden);
  out << "fc2_bias " << R::kHidden << '\n';
  write_block(out, w, R::kB2Offset, 1, R::kHidden);
  out << "output " << R::kOutputs << ' ' << R::kHidden << '\n';
  write_block(out, w, R::kW3Offset, R::kOutputs, R::kHidden);
  out << "output_bias " << R::kOutputs << '\n';
  write_block(out, w, R::kB3Offset, 1, R::kOutputs);
  out << "end\n";
  return out.str();
}

CguRegressor parse_regressor(std::string_view text) {
  text_io::TokenReader in(text);
  in.expect(kFormatTag);
  in.expect("v" + std::to_string(kFormatVersion));
  CguRegressor net;
  TrainConfig& cfg = net.train_config;
  in.expect("train_config");
  in.expect("epochs");
  cfg.epochs = static_cast<int>(in.integer());
  in.expect("batch_size");
  cfg.batch_size = static_cast<int>(in.integer());
  in.expect("lr0");
  cfg.lr0 = in.number();
  in.expect("lr_decay");
  cfg.lr_decay = in.number();
  in.expect("beta1");
  cfg.beta1 = in.number();
  in.expect("beta2");
  cfg.beta2 = in.number();
  in.expect("epsilon");
  cfg.epsilon = in.number();
  in.expect("init_stddev");
  cfg.init_stddev = in.number();
  in.expect("seed");
  cfg.seed = std::stoull(std::string(in.next()));
  in.expect("l2");
  in.expect("cgu");
  net.l2_cgu = in.number();
  in.expect("fc");
  net.l2_fc = in.number();
  in.expect("output_affine");
  net.output_offset.x() = in.number();
  net.output_offset.y() = in.number();
  net.output_scale.x() = in.number();
  net.output_scale.y() = in.number();

  const auto block = [&](std::string_view name, std::initializer_list<long> shape,
                         std::size_t offset) {
    in.expect(name);
    std::size_t count = 1;
    for (long dim : shape) {
      if (in.integer() != dim) {
        text_io::TokenReader::fail("unexpected shape for block " + std::string(name));
      }
      count *= static_cast<std::size_t>(dim);
    }
    read_block(in, net.parameters(), offset, count);
  };
  block("cgu", {R::kUnits, 4}, R::kCguOffset);
  block("fc1", {R::kHidden, R::kUnits}, R::kW1Offset);
  block("fc1_bias", {R::kHidden}, R::kB1Offset);
  block("fc2", {R::kHidden, R::kHidden}, R::kW2Offset);
  block("fc2_bias", {R::kHidden}, R::kB2Offset);
  block("output", {R::kOutputs, R::kHidden}, R::kW3Offset);
  block("output_bias", {R::kOutputs}, R::kB3Offset);
  in.expect("end");
  return net;
}

void save_regressor(const CguRegressor& net, const std::filesystem::path& path) {
  text_io::write_file(path.string(), serialize_regressor(net));
}

CguRegressor load_regressor(const std::filesystem::path& path) {
  return parse_regressor(text_io::read_file(path.string()));
}

}  // namespace gazekit
