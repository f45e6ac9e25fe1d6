// Copyright 2026 The TLNS Authors
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

// Learned fixing policy: bipartite features of an LNS state and the forward
// pass of a simplified graph transformer that scores every variable.
//
// Forward pass, with N = n + m nodes and width d:
//   H0  = [embed_var(var_feats); embed_con(con_feats)]
//   Q, K, V = attn_q(H0), attn_k(H0), attn_v(H0); Q~ = Q/|Q|_F, K~ = K/|K|_F
//   H   = beta * D^-1 [V + Q~(K~'V)/N] + (1 - beta) * H0,
//         D = diag(1 + Q~(K~'1)/N)
//   G   = conv_var(conv_con(H0))        (constraint update, then variable)
//   H_O = (1 - alpha) * H + alpha * G
//   score_i = sigmoid(head(H_O[i])) for variable rows i
//
// A half-convolution updates one side of the graph:
//   h_v <- fc2(relu(fc1([h_v || sum_u e_uv * h_u])))
// where e_uv = embed_edge(edge feature) and * is elementwise.
//
// Weights file ("sgtw-1"): one line of JSON
//   {"format_version":"sgtw-1","d":..,"alpha":..,"beta":..,
//    "tensors":[{"name":..,"shape":[..],"offset":..},..]}
// then '\n' and a blob of little-endian float32 values. Offsets count
// elements from the start of the blob. Matrices are (out, in), row-major.

#ifndef TLNS_POLICY_H_
#define TLNS_POLICY_H_

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tlns/milp.h"
#include "tlns/neighborhoods.h"
#include "tlns/rng.h"

namespace tlns {

inline constexpr int kVarFeatures = 7;
inline constexpr int kConFeatures = 6;
inline constexpr int kEdgeFeatures = 1;

struct PolicyState {
  BipartiteGraph graph;
  // Variable columns: objective / max|c|, mean |A_.i|, degree / m, max
  // coefficient, min coefficient, integrality flag, incumbent value.
  Eigen::MatrixXd var_feats;  // n x 7
  // Constraint columns: mean coefficient, degree / n, rhs / max|b|, sense
  // (LE -1, EQ 0, GE +1), row norm / max row norm, cosine with c.
  Eigen::MatrixXd con_feats;  // m x 6
  // A_ji / max_k |A_jk|, aligned with graph.edges.
  std::vector<double> edge_feats;
};

// Throws ContractError when the incumbent length is not n.
PolicyState ExtractFeatures(const MilpInstance& model, std::span<const double> incumbent);

struct Linear {
  Eigen::MatrixXd weight;  // out x in
  Eigen::VectorXd bias;    // out

  // Rows of `x` are inputs.
  Eigen::MatrixXd Apply(const Eigen::MatrixXd& x) const;
};

struct Mlp2 {
  Linear fc1;
  Linear fc2;
};

struct SgtWeights {
  int d = 32;
  double alpha = 0.5;
  double beta = 0.5;
  Linear embed_var;   // d x 7
  Linear embed_con;   // d x 6
  Linear embed_edge;  // d x 1
  Linear attn_q;      // d x d
  Linear attn_k;
  Linear attn_v;
  Mlp2 conv_con;      // fc1 d x 2d, fc2 d x d
  Mlp2 conv_var;
  Mlp2 head;          // fc1 d x d, fc2 1 x d

  // All tensors zero.
  static SgtWeights Zeros(int d = 32, double alpha = 0.5, double beta = 0.5);
  // Entries uniform in [-scale, scale].
  static SgtWeights Random(Rng& rng, int d = 32, double scale = 0.3,
                           double alpha = 0.5, double beta = 0.5);

  // Throws ContractError naming the first tensor whose shape does not fit d,
  // or when alpha or beta is outside [0, 1].
  void Validate() const;

  friend bool operator==(const SgtWeights& a, const SgtWeights& b);
};

SgtWeights LoadWeights(const std::string& path);
void SaveWeights(const SgtWeights& weights, const std::string& path);

// Linear attention in factored O(N d^2) order.
Eigen::MatrixXd LinearAttention(const Eigen::MatrixXd& h0, const SgtWeights& w);

// Scores in (0, 1), one per variable. Throws ContractError on shape mismatch
// and NumericalError naming the stage that produced a non-finite value.
std::vector<double> SgtForward(const PolicyState& state, const SgtWeights& weights);

// Fixer that scores variables with the network and unfixes by ScoreUnfix.
Fixer LearnedFixer(SgtWeights weights);

}  // namespace tlns

#endif  // TLNS_POLICY_H_
