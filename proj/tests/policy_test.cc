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

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "sgt_oracles.h"
#include "tiny.h"
#include "tlns/errors.h"
#include "tlns/instance_gen.h"
#include "tlns/policy.h"

namespace tlns {
namespace {

using Eigen::MatrixXd;
using oracle::DenseAttention;
using oracle::Permuted;
using oracle::Shuffled;

MilpInstance Mixed(std::uint64_t seed) {
  Rng rng(seed);
  return tiny::PlantedModel(rng, 30, 25, true).model;
}

TEST_CASE("variable and constraint features") {
  MilpData d;
  d.name = "feat";
  d.num_vars = 3;
  d.rows = {{{0, 1}, {2.0, -4.0}}, {{1, 2}, {1.0, 1.0}}, {{0}, {3.0}}};
  d.sense = {Sense::kLe, Sense::kGe, Sense::kEq};
  d.rhs = {4.0, -2.0, 1.0};
  d.obj = {1.0, -2.0, 0.0};
  d.lower = {0, 0, 0};
  d.upper = {1, 1, 5};
  d.is_integer = {true, true, false};
  MilpInstance m(d);
  const std::vector<double> x = {1.0, 0.0, 2.5};
  PolicyState s = ExtractFeatures(m, x);
  REQUIRE(s.var_feats.rows() == 3);
  REQUIRE(s.var_feats.cols() == kVarFeatures);
  REQUIRE(s.con_feats.rows() == 3);
  REQUIRE(s.con_feats.cols() == kConFeatures);

  CHECK(s.var_feats(0, 0) == doctest::Approx(0.5));
  CHECK(s.var_feats(1, 0) == doctest::Approx(-1.0));
  CHECK(s.var_feats(0, 1) == doctest::Approx(2.5));
  CHECK(s.var_feats(1, 1) == doctest::Approx(2.5));
  CHECK(s.var_feats(0, 2) == doctest::Approx(2.0 / 3));
  CHECK(s.var_feats(2, 2) == doctest::Approx(1.0 / 3));
  CHECK(s.var_feats(0, 3) == 3.0);
  CHECK(s.var_feats(0, 4) == 2.0);
  CHECK(s.var_feats(1, 3) == 1.0);
  CHECK(s.var_feats(1, 4) == -4.0);
  CHECK(s.var_feats(2, 5) == 0.0);
  CHECK(s.var_feats(0, 5) == 1.0);
  for (int i = 0; i < 3; ++i) CHECK(s.var_feats(i, 6) == x[i]);

  CHECK(s.con_feats(0, 0) == doctest::Approx(-1.0));
  CHECK(s.con_feats(0, 1) == doctest::Approx(2.0 / 3));
  CHECK(s.con_feats(0, 2) == doctest::Approx(1.0));
  CHECK(s.con_feats(1, 2) == doctest::Approx(-0.5));
  CHECK(s.con_feats(0, 3) == -1.0);
  CHECK(s.con_feats(1, 3) == 1.0);
  CHECK(s.con_feats(2, 3) == 0.0);
  CHECK(s.con_feats(0, 4) == doctest::Approx(1.0));
  CHECK(s.con_feats(2, 4) == doctest::Approx(3.0 / std::sqrt(20.0)));
  // Row 0 is (2, -4) and c is (1, -2, 0): parallel.
  CHECK(s.con_feats(0, 5) == doctest::Approx(1.0));
  CHECK(s.con_feats(1, 5) == doctest::Approx(-2.0 / (std::sqrt(2.0) * std::sqrt(5.0))));

  REQUIRE(s.edge_feats.size() == 5);
  CHECK(s.edge_feats[0] == doctest::Approx(0.5));
  CHECK(s.edge_feats[1] == doctest::Approx(-1.0));
  CHECK(s.edge_feats[4] == doctest::Approx(1.0));
  CHECK_THROWS_AS(ExtractFeatures(m, std::vector<double>{1.0}), ContractError);
}

TEST_CASE("degree features recount the nonzeros") {
  for (Family f : tiny::kFamilies) {
    MilpInstance m = tiny::OfFamily(f, 16, 4);
    std::vector<double> x(m.n(), 0.0);
    PolicyState s = ExtractFeatures(m, x);
    std::vector<int> col(m.n(), 0);
    std::vector<int> row(m.m(), 0);
    for (int j = 0; j < m.m(); ++j) {
      for (int i : m.row(j).cols) {
        ++col[i];
        ++row[j];
      }
    }
    for (int i = 0; i < m.n(); ++i) CHECK(s.var_feats(i, 2) == doctest::Approx(double(col[i]) / m.m()));
    for (int j = 0; j < m.m(); ++j) CHECK(s.con_feats(j, 1) == doctest::Approx(double(row[j]) / m.n()));
    CHECK(s.var_feats.allFinite());
    CHECK(s.con_feats.allFinite());
  }
}

TEST_CASE("zero objective gives a zero first column") {
  MilpData d = tiny::OfFamily(Family::kSetCover, 10, 2).ToData();
  std::fill(d.obj.begin(), d.obj.end(), 0.0);
  MilpInstance m(d);
  PolicyState s = ExtractFeatures(m, std::vector<double>(m.n(), 1.0));
  CHECK(s.var_feats.col(0).isZero());
  CHECK(s.con_feats.col(5).isZero());
}

TEST_CASE("factored attention matches the pairwise oracle") {
  Rng rng(1);
  double worst = 0.0;
  for (int c = 0; c < 100; ++c) {
    const int n = 1 + static_cast<int>(rng.Below(200));
    SgtWeights w = SgtWeights::Random(rng, 32, 0.5, 0.5, rng.Uniform());
    MatrixXd h0(n, 32);
    for (Eigen::Index k = 0; k < h0.size(); ++k) h0.data()[k] = 4.0 * rng.Uniform() - 2.0;
    const MatrixXd fast = LinearAttention(h0, w);
    const MatrixXd slow = DenseAttention(h0, w);
    const double rel = (fast - slow).cwiseAbs().maxCoeff() / std::max(1.0, slow.cwiseAbs().maxCoeff());
    worst = std::max(worst, rel);
  }
  CHECK(worst <= 1e-5);
}

TEST_CASE("zero weights score one half") {
  MilpInstance m = Mixed(3);
  PolicyState s = ExtractFeatures(m, std::vector<double>(m.n(), 0.0));
  std::vector<double> scores = SgtForward(s, SgtWeights::Zeros());
  REQUIRE(scores.size() == static_cast<std::size_t>(m.n()));
  for (double v : scores) CHECK(v == 0.5);
}

TEST_CASE("scores are equivariant under reindexing") {
  Rng rng(8);
  for (int c = 0; c < 10; ++c) {
    MilpInstance m = c % 2 ? Mixed(c) : tiny::OfFamily(tiny::kFamilies[c / 2 % 4], 20, c);
    std::vector<double> x(m.n());
    for (double& v : x) v = rng.Bernoulli(0.5) ? 1.0 : 0.0;
    SgtWeights w = SgtWeights::Random(rng);
    const std::vector<int> vp = Shuffled(m.n(), rng);
    const std::vector<int> cp = Shuffled(m.m(), rng);
    MilpInstance pm = Permuted(m, vp, cp);
    std::vector<double> px(m.n());
    for (int i = 0; i < m.n(); ++i) px[vp[i]] = x[i];
    const std::vector<double> a = SgtForward(ExtractFeatures(m, x), w);
    const std::vector<double> b = SgtForward(ExtractFeatures(pm, px), w);
    for (int i = 0; i < m.n(); ++i) CHECK(std::abs(a[i] - b[vp[i]]) <= 1e-6);
    for (double v : a) CHECK((v > 0.0 && v < 1.0));
  }
}

TEST_CASE("blend parameters switch stages off") {
  Rng rng(4);
  MilpInstance m = Mixed(5);
  PolicyState s = ExtractFeatures(m, std::vector<double>(m.n(), 0.0));
  SgtWeights w = SgtWeights::Random(rng, 32, 0.3, 1.0, 0.5);
  SgtWeights other = w;
  other.attn_q = SgtWeights::Random(rng).attn_q;
  other.attn_v = SgtWeights::Random(rng).attn_v;
  CHECK(SgtForward(s, w) == SgtForward(s, other));
  other.alpha = 0.5;
  w.alpha = 0.5;
  CHECK(SgtForward(s, w) != SgtForward(s, other));

  SgtWeights b0 = SgtWeights::Random(rng, 16, 0.3, 0.5, 0.0);
  MatrixXd h0 = MatrixXd::Random(40, 16);
  CHECK(LinearAttention(h0, b0) == h0);
}

TEST_CASE("weights roundtrip exactly") {
  Rng rng(2);
  SgtWeights w = SgtWeights::Random(rng, 32, 0.3, 0.25, 0.75);
  const std::string path = "/tmp/tlns_policy_test.sgtw";
  SaveWeights(w, path);
  SgtWeights back = LoadWeights(path);
  CHECK(back == w);
  MilpInstance m = Mixed(6);
  PolicyState s = ExtractFeatures(m, std::vector<double>(m.n(), 1.0));
  CHECK(SgtForward(s, back) == SgtForward(s, w));

  std::ifstream in(path, std::ios::binary);
  std::string header;
  std::getline(in, header);
  nlohmann::json j = nlohmann::json::parse(header);
  CHECK(j["format_version"] == "sgtw-1");
  CHECK(j["d"] == 32);
  CHECK(j["tensors"].size() == 24);
  CHECK(j["tensors"][0]["name"] == "embed_var.weight");
  CHECK(j["tensors"][0]["shape"] == nlohmann::json::array({32, 7}));
  CHECK(j["tensors"][1]["offset"] == 32 * 7);
  std::remove(path.c_str());
}

void WriteEdited(const std::string& src, const std::string& dst,
                 const std::function<void(nlohmann::json&)>& edit) {
  std::ifstream in(src, std::ios::binary);
  std::string header;
  std::getline(in, header);
  std::string blob((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  nlohmann::json j = nlohmann::json::parse(header);
  edit(j);
  std::ofstream out(dst, std::ios::binary);
  out << j.dump() << '\n' << blob;
}

std::string LoadError(const std::string& path) {
  try {
    LoadWeights(path);
  } catch (const ParseError& e) {
    return e.what();
  }
  return "";
}

TEST_CASE("malformed weight files are rejected") {
  Rng rng(3);
  const std::string good = "/tmp/tlns_policy_good.sgtw";
  const std::string bad = "/tmp/tlns_policy_bad.sgtw";
  SaveWeights(SgtWeights::Random(rng, 16), good);
  SaveWeights(SgtWeights::Random(rng, 32), bad);
  // Declares d = 32 but the tensors are 16 wide.
  WriteEdited(good, bad, [](nlohmann::json& j) { j["d"] = 32; });
  CHECK(LoadError(bad).find("embed_var.weight") != std::string::npos);

  WriteEdited(good, bad, [](nlohmann::json& j) { j["tensors"][5]["shape"] = {16, 8}; });
  CHECK(LoadError(bad).find("embed_edge.bias") != std::string::npos);

  WriteEdited(good, bad, [](nlohmann::json& j) { j["format_version"] = "sgtw-2"; });
  CHECK(LoadError(bad).find("format_version") != std::string::npos);

  WriteEdited(good, bad, [](nlohmann::json& j) { j["tensors"][3]["name"] = "gate.bias"; });
  CHECK(LoadError(bad).find("gate.bias") != std::string::npos);

  WriteEdited(good, bad, [](nlohmann::json& j) { j["tensors"].erase(j["tensors"].begin()); });
  CHECK(LoadError(bad).find("embed_var.weight") != std::string::npos);

  WriteEdited(good, bad, [](nlohmann::json& j) { j["tensors"][23]["offset"] = 1 << 20; });
  CHECK(LoadError(bad).find("head.fc2.bias") != std::string::npos);

  CHECK_THROWS_AS(LoadWeights("/nonexistent/w.sgtw"), ParseError);
  std::remove(good.c_str());
  std::remove(bad.c_str());
}

TEST_CASE("shape validation names the tensor") {
  SgtWeights w = SgtWeights::Zeros(8);
  w.conv_var.fc1.weight = MatrixXd::Zero(8, 8);
  try {
    w.Validate();
    FAIL("expected a contract error");
  } catch (const ContractError& e) {
    CHECK(std::string(e.what()).find("conv_var.fc1.weight") != std::string::npos);
  }
  SgtWeights a = SgtWeights::Zeros();
  a.alpha = 1.5;
  CHECK_THROWS_AS(a.Validate(), ContractError);
}

TEST_CASE("learned fixer unfixes r integer variables") {
  Rng rng(9);
  MilpInstance m = tiny::OfFamily(Family::kIndependentSet, 30, 1);
  Fixer fixer = LearnedFixer(SgtWeights::Random(rng));
  Solution x = Solution::Of(m, std::vector<double>(m.n(), 0.0));
  for (int r : {0, 1, 7, 30}) {
    FixingSet f = fixer(m, x, r, rng);
    CHECK(f.size() == m.num_integer() - r);
  }
}

}  // namespace
}  // namespace tlns
