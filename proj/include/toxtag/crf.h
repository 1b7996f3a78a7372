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

// Linear-chain CRF over an n x C emission matrix and a C x C transition
// matrix. A label sequence y scores
//
//   score(y) = sum_i E[i, y_i] + sum_{i<n-1} T[y_i, y_{i+1}]
//
// with no start or stop transitions. All dynamic programs run in log space.
// Transition entries may be -inf to forbid a transition.

#ifndef TOXTAG_CRF_H_
#define TOXTAG_CRF_H_

#include <span>
#include <vector>

#include "toxtag/linalg.h"
#include "toxtag/rng.h"

namespace toxtag {

// Linear emission layer (d x C weights, C bias) plus the transition matrix.
struct CrfHead {
  Matrix weights;
  Vector bias;
  Matrix transitions;

  int dim() const { return static_cast<int>(weights.rows()); }
  int num_tags() const { return static_cast<int>(weights.cols()); }

  static CrfHead zeros(int dim, int num_tags);
  // W, b uniform in [-scale, scale]; T = 0.
  static CrfHead random(int dim, int num_tags, double scale, Rng& rng);
};

// Gradients of the NLL with respect to the emissions and transitions.
struct CrfGradients {
  double loss = 0.0;
  Matrix emissions;
  Matrix transitions;
};

struct HeadGradients {
  Matrix weights;
  Vector bias;
  Matrix transitions;

  static HeadGradients zeros_like(const CrfHead& head);
  HeadGradients& operator+=(const HeadGradients& other);
  HeadGradients& operator*=(double factor);
};

// Posterior marginals from forward-backward.
struct Marginals {
  double log_partition = 0.0;
  Matrix unary;     // n x C, P(y_i = c)
  Matrix pairwise;  // C x C, sum_i P(y_i = c, y_{i+1} = c')
};

// E = H W + b. Throws std::invalid_argument on a dimension mismatch.
Matrix emissions(const Matrix& embeddings, const CrfHead& head);

// Throws std::invalid_argument for a wrong length or out-of-range label.
double score_sequence(const Matrix& emissions, const Matrix& transitions,
                      std::span<const int> labels);

// log Z by the forward recursion. n must be at least 1.
double log_partition(const Matrix& emissions, const Matrix& transitions);

Marginals forward_backward(const Matrix& emissions, const Matrix& transitions);

double nll(const Matrix& emissions, const Matrix& transitions, std::span<const int> gold);

// d nll / dE[i,c] = P(y_i = c) - [gold_i = c] and
// d nll / dT[c,c'] = sum_i P(y_i = c, y_{i+1} = c') - #(c -> c' in gold).
//
// With `token_weights`, row i of the emission gradient is scaled by
// weights[i], and the reported loss and the transition gradient are scaled
// by the mean weight. Unit weights reproduce the unweighted result.
CrfGradients nll_gradients(const Matrix& emissions, const Matrix& transitions,
                           std::span<const int> gold,
                           std::span<const double> token_weights = {});

// Chain rule from emission gradients to W and b.
HeadGradients backprop_head(const Matrix& embeddings, const CrfGradients& grads);

// argmax_y score(y); ties go to the lowest label index at each step.
std::vector<int> viterbi_decode(const Matrix& emissions, const Matrix& transitions);

}  // namespace toxtag

#endif  // TOXTAG_CRF_H_
