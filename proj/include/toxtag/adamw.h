// Copyright 2026 The Toxtag Authors.
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

#ifndef TOXTAG_ADAMW_H_
#define TOXTAG_ADAMW_H_

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace toxtag {

struct AdamWConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double weight_decay = 0.0;

  bool operator==(const AdamWConfig&) const = default;
};

inline void validate(const AdamWConfig& c) {
  if (!(c.beta1 >= 0.0 && c.beta1 < 1.0) || !(c.beta2 >= 0.0 && c.beta2 < 1.0)) {
    throw std::invalid_argument("moment decay rates must lie in [0, 1)");
  }
  if (!(c.epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
  if (!(c.weight_decay >= 0.0)) throw std::invalid_argument("weight decay must be >= 0");
}

// Adam with decoupled weight decay. Each parameter tensor owns a slot with
// its own moment estimates; call next_step() once per optimizer step and
// then update() for every slot.
class AdamW {
 public:
  AdamW(double learning_rate, const AdamWConfig& config)
      : lr_(learning_rate), config_(config) {}

  void next_step() { ++step_; }

  void update(std::size_t slot, std::span<double> params, std::span<const double> grads) {
    if (params.size() != grads.size()) {
      throw std::invalid_argument("AdamW: parameter and gradient sizes differ");
    }
    if (slot >= first_.size()) {
      first_.resize(slot + 1);
      second_.resize(slot + 1);
    }
    auto& m = first_[slot];
    auto& v = second_[slot];
    if (m.empty()) {
      m.assign(params.size(), 0.0);
      v.assign(params.size(), 0.0);
    }
    const double t = static_cast<double>(step_);
    const double c1 = 1.0 - std::pow(config_.beta1, t);
    const double c2 = 1.0 - std::pow(config_.beta2, t);
    for (std::size_t i = 0; i < params.size(); ++i) {
      m[i] = config_.beta1 * m[i] + (1.0 - config_.beta1) * grads[i];
      v[i] = config_.beta2 * v[i] + (1.0 - config_.beta2) * grads[i] * grads[i];
      const double m_hat = m[i] / c1;
      const double v_hat = v[i] / c2;
      params[i] -= lr_ * (m_hat / (std::sqrt(v_hat) + config_.epsilon) +
                          config_.weight_decay * params[i]);
    }
  }

  long step() const { return step_; }

 private:
  double lr_;
  AdamWConfig config_;
  long step_ = 0;
  std::vector<std::vector<double>> first_;
  std::vector<std::vector<double>> second_;
};

template <typename Tensor>
std::span<double> as_span(Tensor& t) {
  return {t.data(), static_cast<std::size_t>(t.size())};
}

template <typename Tensor>
std::span<const double> as_span(const Tensor& t) {
  return {t.data(), static_cast<std::size_t>(t.size())};
}

}  // namespace toxtag

#endif  // TOXTAG_ADAMW_H_
