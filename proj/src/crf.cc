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

#include "toxtag/crf.h"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace toxtag {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_sum_exp(const double* values, Eigen::Index count) {
  double m = kNegInf;
  for (Eigen::Index i = 0; i < count; ++i) m = std::max(m, values[i]);
  if (m == kNegInf) return kNegInf;
  double s = 0.0;
  for (Eigen::Index i = 0; i < count; ++i) s += std::exp(values[i] - m);
  return m + std::log(s);
}

void check_shapes(const Matrix& e, const Matrix& t) {
  if (e.rows() < 1) throw std::invalid_argument("CRF needs at least one position");
  if (t.rows() != e.cols() || t.cols() != e.cols()) {
    throw std::invalid_argument("transition matrix is " + std::to_string(t.rows()) + "x" +
                                std::to_string(t.cols()) + " but there are " +
                                std::to_string(e.cols()) + " labels");
  }
}

void check_labels(const Matrix& e, std::span<const int> labels) {
  if (static_cast<Eigen::Index>(labels.size()) != e.rows()) {
    throw std::invalid_argument("label sequence has length " + std::to_string(labels.size()) +
                                ", expected " + std::to_string(e.rows()));
  }
  for (int y : labels) {
    if (y < 0 || y >= e.cols()) {
      throw std::invalid_argument("label index " + std::to_string(y) + " out of range [0, " +
                                  std::to_string(e.cols()) + ")");
    }
  }
}

// alpha(i, c) = log sum over prefixes ending in c at position i.
Matrix forward(const Matrix& e, const Matrix& t) {
  const Eigen::Index n = e.rows(), c = e.cols();
  Matrix alpha(n, c);
  alpha.row(0) = e.row(0);
  std::vector<double> scratch(static_cast<std::size_t>(c));
  for (Eigen::Index i = 1; i < n; ++i) {
    for (Eigen::Index to = 0; to < c; ++to) {
      for (Eigen::Index from = 0; from < c; ++from) {
        scratch[static_cast<std::size_t>(from)] = alpha(i - 1, from) + t(from, to);
      }
      alpha(i, to) = log_sum_exp(scratch.data(), c) + e(i, to);
    }
  }
  return alpha;
}

// beta(i, c) = log sum over suffixes after position i given y_i = c.
Matrix backward(const Matrix& e, const Matrix& t) {
  const Eigen::Index n = e.rows(), c = e.cols();
  Matrix beta(n, c);
  beta.row(n - 1).setZero();
  std::vector<double> scratch(static_cast<std::size_t>(c));
  for (Eigen::Index i = n - 2; i >= 0; --i) {
    for (Eigen::Index from = 0; from < c; ++from) {
      for (Eigen::Index to = 0; to < c; ++to) {
        scratch[static_cast<std::size_t>(to)] = t(from, to) + e(i + 1, to) + beta(i + 1, to);
      }
      beta(i, from) = log_sum_exp(scratch.data(), c);
    }
  }
  return beta;
}

}  // namespace

CrfHead CrfHead::zeros(int dim, int num_tags) {
  return CrfHead{Matrix::Zero(dim, num_tags), Vector::Zero(num_tags),
                 Matrix::Zero(num_tags, num_tags)};
}

CrfHead CrfHead::random(int dim, int num_tags, double scale, Rng& rng) {
  CrfHead head = zeros(dim, num_tags);
  for (Eigen::Index i = 0; i < head.weights.rows(); ++i) {
    for (Eigen::Index j = 0; j < head.weights.cols(); ++j) {
      head.weights(i, j) = (2.0 * rng.uniform() - 1.0) * scale;
    }
  }
  for (Eigen::Index j = 0; j < head.bias.size(); ++j) {
    head.bias(j) = (2.0 * rng.uniform() - 1.0) * scale;
  }
  return head;
}

HeadGradients HeadGradients::zeros_like(const CrfHead& head) {
  return HeadGradients{Matrix::Zero(head.weights.rows(), head.weights.cols()),
                       Vector::Zero(head.bias.size()),
                       Matrix::Zero(head.transitions.rows(), head.transitions.cols())};
}

HeadGradients& HeadGradients::operator+=(const HeadGradients& other) {
  weights += other.weights;
  bias += other.bias;
  transitions += other.transitions;
  return *this;
}

HeadGradients& HeadGradients::operator*=(double factor) {
  weights *= factor;
  bias *= factor;
  transitions *= factor;
  return *this;
}

Matrix emissions(const Matrix& embeddings, const CrfHead& head) {
  if (embeddings.cols() != head.weights.rows()) {
    throw std::invalid_argument("embedding dimension " + std::to_string(embeddings.cols()) +
                                " does not match emission weights with " +
                                std::to_string(head.weights.rows()) + " rows");
  }
  Matrix out = embeddings * head.weights;
  out.rowwise() += head.bias.transpose();
  return out;
}

double score_sequence(const Matrix& e, const Matrix& t, std::span<const int> labels) {
  check_labels(e, labels);
  double s = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    s += e(static_cast<Eigen::Index>(i), labels[i]);
    if (i + 1 < labels.size()) s += t(labels[i], labels[i + 1]);
  }
  return s;
}

double log_partition(const Matrix& e, const Matrix& t) {
  check_shapes(e, t);
  const Matrix alpha = forward(e, t);
  return log_sum_exp(alpha.row(e.rows() - 1).data(), e.cols());
}

Marginals forward_backward(const Matrix& e, const Matrix& t) {
  check_shapes(e, t);
  const Eigen::Index n = e.rows(), c = e.cols();
  const Matrix alpha = forward(e, t);
  const Matrix beta = backward(e, t);
  Marginals m;
  m.log_partition = log_sum_exp(alpha.row(n - 1).data(), c);
  m.unary = (alpha + beta).array() - m.log_partition;
  m.unary = m.unary.array().exp();
  m.pairwise = Matrix::Zero(c, c);
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    for (Eigen::Index from = 0; from < c; ++from) {
      for (Eigen::Index to = 0; to < c; ++to) {
        const double lp =
            alpha(i, from) + t(from, to) + e(i + 1, to) + beta(i + 1, to) - m.log_partition;
        if (lp != kNegInf) m.pairwise(from, to) += std::exp(lp);
      }
    }
  }
  return m;
}

double nll(const Matrix& e, const Matrix& t, std::span<const int> gold) {
  const double gold_score = score_sequence(e, t, gold);
  return log_partition(e, t) - gold_score;
}

CrfGradients nll_gradients(const Matrix& e, const Matrix& t, std::span<const int> gold,
                           std::span<const double> token_weights) {
  check_labels(e, gold);
  const Eigen::Index n = e.rows();
  if (!token_weights.empty() && static_cast<Eigen::Index>(token_weights.size()) != n) {
    throw std::invalid_argument("token weights have length " +
                                std::to_string(token_weights.size()) + ", expected " +
                                std::to_string(n));
  }
  const Marginals m = forward_backward(e, t);
  CrfGradients g;
  g.loss = m.log_partition - score_sequence(e, t, gold);
  g.emissions = m.unary;
  g.transitions = m.pairwise;
  for (Eigen::Index i = 0; i < n; ++i) {
    g.emissions(i, gold[static_cast<std::size_t>(i)]) -= 1.0;
    if (i + 1 < n) {
      g.transitions(gold[static_cast<std::size_t>(i)], gold[static_cast<std::size_t>(i + 1)]) -=
          1.0;
    }
  }
  if (!token_weights.empty()) {
    double mean = 0.0;
    for (double w : token_weights) mean += w;
    mean /= static_cast<double>(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      g.emissions.row(i) *= token_weights[static_cast<std::size_t>(i)];
    }
    g.transitions *= mean;
    g.loss *= mean;
  }
  return g;
}

HeadGradients backprop_head(const Matrix& embeddings, const CrfGradients& grads) {
  return HeadGradients{embeddings.transpose() * grads.emissions,
                       grads.emissions.colwise().sum().transpose(), grads.transitions};
}

std::vector<int> viterbi_decode(const Matrix& e, const Matrix& t) {
  check_shapes(e, t);
  const Eigen::Index n = e.rows(), c = e.cols();
  Matrix best(n, c);
  Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> back(n, c);
  best.row(0) = e.row(0);
  back.row(0).setZero();
  for (Eigen::Index i = 1; i < n; ++i) {
    for (Eigen::Index to = 0; to < c; ++to) {
      double top = kNegInf;
      int arg = 0;
      for (Eigen::Index from = 0; from < c; ++from) {
        const double v = best(i - 1, from) + t(from, to);
        if (v > top) {
          top = v;
          arg = static_cast<int>(from);
        }
      }
      best(i, to) = top + e(i, to);
      back(i, to) = arg;
    }
  }
  std::vector<int> path(static_cast<std::size_t>(n));
  int last = 0;
  for (Eigen::Index to = 1; to < c; ++to) {
    if (best(n - 1, to) > best(n - 1, last)) last = static_cast<int>(to);
  }
  path[static_cast<std::size_t>(n - 1)] = last;
  for (Eigen::Index i = n - 1; i > 0; --i) {
    path[static_cast<std::size_t>(i - 1)] = back(i, path[static_cast<std::size_t>(i)]);
  }
  return path;
}

}  // namespace toxtag
