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

#include "tlns/policy.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <map>
#include <memory>
#include <utility>

#include "json.hpp"
#include "tlns/errors.h"

namespace tlns {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using Json = nlohmann::json;

constexpr const char* kFormatVersion = "sgtw-1";

// Calls f(name, linear) for every linear layer in file order.
template <typename W, typename F>
void ForEachLinear(W& w, F&& f) {
  f("embed_var", w.embed_var);
  f("embed_con", w.embed_con);
  f("embed_edge", w.embed_edge);
  f("attn_q", w.attn_q);
  f("attn_k", w.attn_k);
  f("attn_v", w.attn_v);
  f("conv_con.fc1", w.conv_con.fc1);
  f("conv_con.fc2", w.conv_con.fc2);
  f("conv_var.fc1", w.conv_var.fc1);
  f("conv_var.fc2", w.conv_var.fc2);
  f("head.fc1", w.head.fc1);
  f("head.fc2", w.head.fc2);
}

// (out, in) of every linear layer for width d.
std::map<std::string, std::pair<int, int>> ExpectedShapes(int d) {
  return {{"embed_var", {d, kVarFeatures}},
          {"embed_con", {d, kConFeatures}},
          {"embed_edge", {d, kEdgeFeatures}},
          {"attn_q", {d, d}},
          {"attn_k", {d, d}},
          {"attn_v", {d, d}},
          {"conv_con.fc1", {d, 2 * d}},
          {"conv_con.fc2", {d, d}},
          {"conv_var.fc1", {d, 2 * d}},
          {"conv_var.fc2", {d, d}},
          {"head.fc1", {d, d}},
          {"head.fc2", {1, d}}};
}

void ShapeAll(SgtWeights& w) {
  const auto shapes = ExpectedShapes(w.d);
  ForEachLinear(w, [&](const std::string& name, Linear& l) {
    const auto [out, in] = shapes.at(name);
    l.weight = MatrixXd::Zero(out, in);
    l.bias = VectorXd::Zero(out);
  });
}

void CheckFinite(const MatrixXd& x, const char* stage) {
  if (!x.allFinite()) {
    throw NumericalError(std::string("non-finite value in the ") + stage + " stage");
  }
}

MatrixXd Relu(MatrixXd x) { return x.cwiseMax(0.0); }

MatrixXd ApplyMlp(const Mlp2& mlp, const MatrixXd& x) {
  return mlp.fc2.Apply(Relu(mlp.fc1.Apply(x)));
}

// One half-convolution: rows of `self` are updated from `other` through the
// edges, each message scaled elementwise by its embedded edge feature.
MatrixXd HalfConvolution(const Mlp2& mlp, const MatrixXd& self, const MatrixXd& other,
                         const std::vector<BipartiteEdge>& edges, const MatrixXd& edge_emb,
                         bool update_constraints) {
  const int d = static_cast<int>(self.cols());
  MatrixXd input(self.rows(), 2 * d);
  input.leftCols(d) = self;
  input.rightCols(d).setZero();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const int to = update_constraints ? edges[e].con : edges[e].var;
    const int from = update_constraints ? edges[e].var : edges[e].con;
    input.row(to).tail(d) += other.row(from).cwiseProduct(edge_emb.row(e));
  }
  return ApplyMlp(mlp, input);
}

float ToFloatChecked(double v, const std::string& name) {
  if (!std::isfinite(v)) throw ContractError("tensor " + name + " holds a non-finite value");
  return static_cast<float>(v);
}

std::uint32_t ToLittle(std::uint32_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    v = ((v & 0xFFu) << 24) | ((v & 0xFF00u) << 8) | ((v >> 8) & 0xFF00u) | (v >> 24);
  }
  return v;
}

}  // namespace

PolicyState ExtractFeatures(const MilpInstance& model, std::span<const double> incumbent) {
  const int n = model.n();
  const int m = model.m();
  if (static_cast<int>(incumbent.size()) != n) {
    throw ContractError("incumbent length " + std::to_string(incumbent.size()) +
                        " does not match n = " + std::to_string(n));
  }
  PolicyState s;
  s.graph = ToBipartiteGraph(model);

  const auto obj = model.obj();
  double c_max = 0.0;
  double c_norm2 = 0.0;
  for (double c : obj) {
    c_max = std::max(c_max, std::abs(c));
    c_norm2 += c * c;
  }
  const double c_scale = c_max > 0.0 ? c_max : 1.0;
  const double c_norm = std::sqrt(c_norm2);

  s.var_feats = MatrixXd::Zero(n, kVarFeatures);
  for (int i = 0; i < n; ++i) {
    const ColView col = model.col(i);
    double abs_sum = 0.0;
    double hi = 0.0;
    double lo = 0.0;
    for (int k = 0; k < col.size(); ++k) {
      const double a = col.vals[k];
      abs_sum += std::abs(a);
      hi = k == 0 ? a : std::max(hi, a);
      lo = k == 0 ? a : std::min(lo, a);
    }
    s.var_feats(i, 0) = obj[i] / c_scale;
    s.var_feats(i, 1) = col.size() > 0 ? abs_sum / col.size() : 0.0;
    s.var_feats(i, 2) = m > 0 ? static_cast<double>(col.size()) / m : 0.0;
    s.var_feats(i, 3) = hi;
    s.var_feats(i, 4) = lo;
    s.var_feats(i, 5) = model.is_integer(i) ? 1.0 : 0.0;
    s.var_feats(i, 6) = incumbent[i];
  }

  const auto rhs = model.rhs();
  double b_max = 0.0;
  for (double b : rhs) b_max = std::max(b_max, std::abs(b));
  const double b_scale = b_max > 0.0 ? b_max : 1.0;
  std::vector<double> norms(m, 0.0);
  double norm_max = 0.0;
  for (int j = 0; j < m; ++j) {
    for (double a : model.row(j).vals) norms[j] += a * a;
    norms[j] = std::sqrt(norms[j]);
    norm_max = std::max(norm_max, norms[j]);
  }
  const double norm_scale = norm_max > 0.0 ? norm_max : 1.0;

  s.con_feats = MatrixXd::Zero(m, kConFeatures);
  s.edge_feats.reserve(s.graph.edges.size());
  for (int j = 0; j < m; ++j) {
    const RowView row = model.row(j);
    double sum = 0.0;
    double dot = 0.0;
    double abs_max = 0.0;
    for (int k = 0; k < row.size(); ++k) {
      sum += row.vals[k];
      dot += row.vals[k] * obj[row.cols[k]];
      abs_max = std::max(abs_max, std::abs(row.vals[k]));
    }
    s.con_feats(j, 0) = row.size() > 0 ? sum / row.size() : 0.0;
    s.con_feats(j, 1) = n > 0 ? static_cast<double>(row.size()) / n : 0.0;
    s.con_feats(j, 2) = rhs[j] / b_scale;
    s.con_feats(j, 3) = model.sense(j) == Sense::kLe ? -1.0 : model.sense(j) == Sense::kGe ? 1.0 : 0.0;
    s.con_feats(j, 4) = norms[j] / norm_scale;
    s.con_feats(j, 5) = norms[j] > 0.0 && c_norm > 0.0 ? dot / (norms[j] * c_norm) : 0.0;
    const double a_scale = abs_max > 0.0 ? abs_max : 1.0;
    for (double a : row.vals) s.edge_feats.push_back(a / a_scale);
  }
  return s;
}

MatrixXd Linear::Apply(const MatrixXd& x) const {
  MatrixXd y = x * weight.transpose();
  y.rowwise() += bias.transpose();
  return y;
}

SgtWeights SgtWeights::Zeros(int d, double alpha, double beta) {
  if (d < 1) throw ContractError("width d must be >= 1");
  SgtWeights w;
  w.d = d;
  w.alpha = alpha;
  w.beta = beta;
  ShapeAll(w);
  w.Validate();
  return w;
}

SgtWeights SgtWeights::Random(Rng& rng, int d, double scale, double alpha, double beta) {
  SgtWeights w = Zeros(d, alpha, beta);
  // Values are rounded to float so that a save/load roundtrip is exact.
  auto draw = [&] { return static_cast<double>(static_cast<float>(scale * (2.0 * rng.Uniform() - 1.0))); };
  ForEachLinear(w, [&](const std::string&, Linear& l) {
    for (Eigen::Index k = 0; k < l.weight.size(); ++k) l.weight.data()[k] = draw();
    for (Eigen::Index k = 0; k < l.bias.size(); ++k) l.bias[k] = draw();
  });
  return w;
}

void SgtWeights::Validate() const {
  if (d < 1) throw ContractError("width d must be >= 1");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ContractError("alpha must lie in [0, 1]");
  if (!(beta >= 0.0 && beta <= 1.0)) throw ContractError("beta must lie in [0, 1]");
  const auto shapes = ExpectedShapes(d);
  ForEachLinear(*this, [&](const std::string& name, const Linear& l) {
    const auto [out, in] = shapes.at(name);
    if (l.weight.rows() != out || l.weight.cols() != in) {
      throw ContractError("tensor " + name + ".weight has shape [" +
                          std::to_string(l.weight.rows()) + ", " +
                          std::to_string(l.weight.cols()) + "], expected [" +
                          std::to_string(out) + ", " + std::to_string(in) + "]");
    }
    if (l.bias.size() != out) {
      throw ContractError("tensor " + name + ".bias has length " +
                          std::to_string(l.bias.size()) + ", expected " + std::to_string(out));
    }
  });
}

bool operator==(const SgtWeights& a, const SgtWeights& b) {
  if (a.d != b.d || a.alpha != b.alpha || a.beta != b.beta) return false;
  bool same = true;
  std::vector<const Linear*> other;
  ForEachLinear(b, [&](const std::string&, const Linear& l) { other.push_back(&l); });
  std::size_t k = 0;
  ForEachLinear(a, [&](const std::string&, const Linear& l) {
    const Linear& r = *other[k++];
    same = same && l.weight.rows() == r.weight.rows() && l.weight.cols() == r.weight.cols() &&
           l.bias.size() == r.bias.size() && l.weight == r.weight && l.bias == r.bias;
  });
  return same;
}

void SaveWeights(const SgtWeights& weights, const std::string& path) {
  weights.Validate();
  Json tensors = Json::array();
  std::vector<float> blob;
  ForEachLinear(weights, [&](const std::string& name, const Linear& l) {
    tensors.push_back({{"name", name + ".weight"},
                       {"shape", {l.weight.rows(), l.weight.cols()}},
                       {"offset", blob.size()}});
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) {
        blob.push_back(ToFloatChecked(l.weight(r, c), name + ".weight"));
      }
    }
    tensors.push_back({{"name", name + ".bias"}, {"shape", {l.bias.size()}}, {"offset", blob.size()}});
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) {
      blob.push_back(ToFloatChecked(l.bias[r], name + ".bias"));
    }
  });
  const Json header = {{"format_version", kFormatVersion},
                       {"d", weights.d},
                       {"alpha", weights.alpha},
                       {"beta", weights.beta},
                       {"tensors", tensors}};
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path + " for writing");
  out << header.dump() << '\n';
  for (float f : blob) {
    const std::uint32_t bits = ToLittle(std::bit_cast<std::uint32_t>(f));
    char bytes[4];
    std::memcpy(bytes, &bits, 4);
    out.write(bytes, 4);
  }
  if (!out) throw Error("failed writing " + path);
}

SgtWeights LoadWeights(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open weights file " + path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path + ": missing header line");
  Json header;
  try {
    header = Json::parse(line);
  } catch (const Json::exception& e) {
    throw ParseError(path + ": bad header: " + e.what());
  }
  const std::string blob_bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (blob_bytes.size() % 4 != 0) throw ParseError(path + ": blob size is not a multiple of 4");
  const std::size_t blob_len = blob_bytes.size() / 4;
  auto value_at = [&](std::size_t k) {
    std::uint32_t bits;
    std::memcpy(&bits, blob_bytes.data() + 4 * k, 4);
    return static_cast<double>(std::bit_cast<float>(ToLittle(bits)));
  };

  SgtWeights w;
  try {
    const std::string version = header.at("format_version").get<std::string>();
    if (version != kFormatVersion) {
      throw ParseError(path + ": unsupported format_version '" + version + "'");
    }
    w.d = header.at("d").get<int>();
    w.alpha = header.at("alpha").get<double>();
    w.beta = header.at("beta").get<double>();
    if (w.d < 1) throw ParseError(path + ": d must be >= 1");
    ShapeAll(w);
    const auto shapes = ExpectedShapes(w.d);
    std::map<std::string, std::pair<Eigen::Index, Eigen::Index>> declared;
    std::map<std::string, std::pair<double*, std::size_t>> targets;
    ForEachLinear(w, [&](const std::string& name, Linear& l) {
      targets[name + ".weight"] = {l.weight.data(), static_cast<std::size_t>(l.weight.size())};
      targets[name + ".bias"] = {l.bias.data(), static_cast<std::size_t>(l.bias.size())};
    });
    std::map<std::string, bool> seen;
    for (const Json& t : header.at("tensors")) {
      const std::string name = t.at("name").get<std::string>();
      const std::vector<std::int64_t> shape = t.at("shape").get<std::vector<std::int64_t>>();
      const std::int64_t offset = t.at("offset").get<std::int64_t>();
      const auto dot = name.rfind('.');
      const std::string layer = dot == std::string::npos ? name : name.substr(0, dot);
      const std::string kind = dot == std::string::npos ? "" : name.substr(dot + 1);
      if (!shapes.contains(layer) || (kind != "weight" && kind != "bias")) {
        throw ParseError(path + ": unknown tensor '" + name + "'");
      }
      if (seen[name]) throw ParseError(path + ": tensor '" + name + "' appears twice");
      seen[name] = true;
      const auto [out, in_dim] = shapes.at(layer);
      const std::vector<std::int64_t> want =
          kind == "weight" ? std::vector<std::int64_t>{out, in_dim} : std::vector<std::int64_t>{out};
      if (shape != want) {
        std::string got;
        for (std::int64_t s : shape) got += (got.empty() ? "" : ", ") + std::to_string(s);
        throw ParseError(path + ": tensor '" + name + "' has shape [" + got +
                         "], which does not match d = " + std::to_string(w.d));
      }
      auto [dst, count] = targets.at(name);
      if (offset < 0 || static_cast<std::size_t>(offset) + count > blob_len) {
        throw ParseError(path + ": tensor '" + name + "' lies outside the blob");
      }
      if (kind == "weight") {
        // Row-major (out, in) in the file, column-major in memory.
        Eigen::Map<MatrixXd> target(dst, out, in_dim);
        for (int r = 0; r < out; ++r) {
          for (int c = 0; c < in_dim; ++c) target(r, c) = value_at(offset + r * in_dim + c);
        }
      } else {
        for (std::size_t k = 0; k < count; ++k) dst[k] = value_at(offset + k);
      }
    }
    for (const auto& [name, target] : targets) {
      if (!seen[name]) throw ParseError(path + ": missing tensor '" + name + "'");
    }
  } catch (const Json::exception& e) {
    throw ParseError(path + ": bad header: " + e.what());
  }
  try {
    w.Validate();
  } catch (const ContractError& e) {
    throw ParseError(path + ": " + e.what());
  }
  return w;
}

MatrixXd LinearAttention(const MatrixXd& h0, const SgtWeights& w) {
  const double n_nodes = static_cast<double>(h0.rows());
  MatrixXd q = w.attn_q.Apply(h0);
  MatrixXd k = w.attn_k.Apply(h0);
  const MatrixXd v = w.attn_v.Apply(h0);
  const double qn = q.norm();
  const double kn = k.norm();
  if (qn > 0.0) q /= qn;
  if (kn > 0.0) k /= kn;
  const MatrixXd ktv = k.transpose() * v;             // d x d
  const VectorXd kt1 = k.transpose().rowwise().sum();  // d
  MatrixXd num = v + (q * ktv) / n_nodes;
  const VectorXd den = (q * kt1).array() / n_nodes + 1.0;
  num.array().colwise() /= den.array();
  return w.beta * num + (1.0 - w.beta) * h0;
}

std::vector<double> SgtForward(const PolicyState& state, const SgtWeights& w) {
  w.Validate();
  const int n = static_cast<int>(state.var_feats.rows());
  const int m = static_cast<int>(state.con_feats.rows());
  if (state.var_feats.cols() != kVarFeatures || state.con_feats.cols() != kConFeatures ||
      state.graph.n_var != n || state.graph.n_con != m ||
      state.edge_feats.size() != state.graph.edges.size()) {
    throw ContractError("policy state shapes are inconsistent");
  }
  if (n == 0) return {};
  const int d = w.d;

  MatrixXd h0(n + m, d);
  h0.topRows(n) = w.embed_var.Apply(state.var_feats);
  if (m > 0) h0.bottomRows(m) = w.embed_con.Apply(state.con_feats);
  const MatrixXd edge_emb = w.embed_edge.Apply(
      Eigen::Map<const MatrixXd>(state.edge_feats.data(), static_cast<Eigen::Index>(state.edge_feats.size()), 1));
  CheckFinite(h0, "embedding");
  CheckFinite(edge_emb, "embedding");

  const MatrixXd h = LinearAttention(h0, w);
  CheckFinite(h, "attention");

  const MatrixXd vars0 = h0.topRows(n);
  const MatrixXd cons0 = h0.bottomRows(m);
  const MatrixXd cons1 = HalfConvolution(w.conv_con, cons0, vars0, state.graph.edges, edge_emb, true);
  const MatrixXd vars1 = HalfConvolution(w.conv_var, vars0, cons1, state.graph.edges, edge_emb, false);
  CheckFinite(cons1, "convolution");
  CheckFinite(vars1, "convolution");

  // Only variable rows reach the head.
  const MatrixXd out = (1.0 - w.alpha) * h.topRows(n) + w.alpha * vars1;
  const MatrixXd logits = ApplyMlp(w.head, out);
  CheckFinite(logits, "head");

  constexpr double kLow = std::numeric_limits<double>::min();
  constexpr double kHigh = 1.0 - std::numeric_limits<double>::epsilon() / 2;
  std::vector<double> scores(n);
  for (int i = 0; i < n; ++i) {
    scores[i] = std::clamp(1.0 / (1.0 + std::exp(-logits(i, 0))), kLow, kHigh);
  }
  return scores;
}

Fixer LearnedFixer(SgtWeights weights) {
  weights.Validate();
  auto shared = std::make_shared<const SgtWeights>(std::move(weights));
  return [shared](const MilpInstance& model, const Solution& incumbent, int r, Rng& rng) {
    const PolicyState state = ExtractFeatures(model, incumbent.x);
    const std::vector<double> scores = SgtForward(state, *shared);
    return ScoreUnfix(model, scores, r, rng);
  };
}

}  // namespace tlns
