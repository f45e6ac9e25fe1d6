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

#include "tlns/instance_io.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "tlns/errors.h"

namespace tlns {
namespace {

using nlohmann::json;

const json& Field(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw ParseError(std::string("instance: missing field \"") + key + "\"");
  }
  return *it;
}

double ToDouble(const json& v, const std::string& where) {
  double out = 0.0;
  if (v.is_number()) {
    out = v.get<double>();
  } else if (v.is_string()) {
    const std::string& s = v.get_ref<const std::string&>();
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      throw ParseError(where + ": cannot parse number \"" + s + "\"");
    }
  } else {
    throw ParseError(where + ": expected a number");
  }
  if (!std::isfinite(out)) throw ParseError(where + ": non-finite value");
  return out;
}

const json& Array(const json& obj, const char* key, std::size_t want) {
  const json& a = Field(obj, key);
  if (!a.is_array()) {
    throw ParseError(std::string("instance: field \"") + key +
                     "\" is not an array");
  }
  if (a.size() != want) {
    throw ParseError(std::string("instance: field \"") + key +
                     "\" has length " + std::to_string(a.size()) +
                     ", expected " + std::to_string(want));
  }
  return a;
}

std::vector<double> Doubles(const json& obj, const char* key,
                            std::size_t want) {
  const json& a = Array(obj, key, want);
  std::vector<double> out(want);
  for (std::size_t i = 0; i < want; ++i) {
    out[i] = ToDouble(a[i], std::string(key) + "[" + std::to_string(i) + "]");
  }
  return out;
}

int Count(const json& obj, const char* key) {
  const json& v = Field(obj, key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw ParseError(std::string("instance: field \"") + key +
                     "\" must be a nonnegative integer");
  }
  return v.get<int>();
}

Sense ParseSense(const json& v, std::size_t j) {
  if (v.is_string()) {
    const std::string& s = v.get_ref<const std::string&>();
    if (s == "LE") return Sense::kLe;
    if (s == "GE") return Sense::kGe;
    if (s == "EQ") return Sense::kEq;
  }
  throw ParseError("sense[" + std::to_string(j) +
                   "]: expected one of LE, GE, EQ");
}

}  // namespace

std::string InstanceToJson(const MilpInstance& model) {
  json j;
  j["format_version"] = kInstanceFormat;
  j["name"] = model.name();
  j["n"] = model.n();
  j["m"] = model.m();
  json sense = json::array();
  for (Sense s : model.senses()) sense.push_back(SenseName(s));
  j["sense"] = std::move(sense);
  j["b"] = std::vector<double>(model.rhs().begin(), model.rhs().end());
  j["c"] = std::vector<double>(model.obj().begin(), model.obj().end());
  j["l"] = std::vector<double>(model.lower().begin(), model.lower().end());
  j["u"] = std::vector<double>(model.upper().begin(), model.upper().end());
  json ints = json::array();
  for (int i = 0; i < model.n(); ++i) ints.push_back(model.is_integer(i));
  j["is_integer"] = std::move(ints);
  json rows = json::array();
  for (int r = 0; r < model.m(); ++r) {
    RowView row = model.row(r);
    rows.push_back({{"cols", std::vector<int>(row.cols.begin(), row.cols.end())},
                    {"vals", std::vector<double>(row.vals.begin(), row.vals.end())}});
  }
  j["rows"] = std::move(rows);
  return j.dump();
}

MilpInstance InstanceFromJson(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("instance: malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("instance: top level is not an object");
  const json& version = Field(j, "format_version");
  if (!version.is_string() || version.get<std::string>() != kInstanceFormat) {
    throw ParseError("instance: unsupported format_version " + version.dump() +
                     " (expected \"tlns-1\")");
  }
  MilpData d;
  const json& name = Field(j, "name");
  if (!name.is_string()) throw ParseError("instance: field \"name\" is not a string");
  d.name = name.get<std::string>();
  d.num_vars = Count(j, "n");
  const std::size_t n = d.num_vars;
  const std::size_t m = Count(j, "m");
  const json& sense = Array(j, "sense", m);
  d.sense.reserve(m);
  for (std::size_t r = 0; r < m; ++r) d.sense.push_back(ParseSense(sense[r], r));
  d.rhs = Doubles(j, "b", m);
  d.obj = Doubles(j, "c", n);
  d.lower = Doubles(j, "l", n);
  d.upper = Doubles(j, "u", n);
  const json& ints = Array(j, "is_integer", n);
  d.is_integer.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!ints[i].is_boolean()) {
      throw ParseError("is_integer[" + std::to_string(i) + "]: expected a boolean");
    }
    d.is_integer[i] = ints[i].get<bool>();
  }
  const json& rows = Array(j, "rows", m);
  d.rows.resize(m);
  for (std::size_t r = 0; r < m; ++r) {
    const std::string where = "rows[" + std::to_string(r) + "]";
    if (!rows[r].is_object()) throw ParseError(where + ": expected an object");
    auto cols = rows[r].find("cols");
    auto vals = rows[r].find("vals");
    if (cols == rows[r].end() || !cols->is_array()) {
      throw ParseError(where + ": missing field \"cols\"");
    }
    if (vals == rows[r].end() || !vals->is_array()) {
      throw ParseError(where + ": missing field \"vals\"");
    }
    if (cols->size() != vals->size()) {
      throw ParseError(where + ": cols and vals differ in length");
    }
    for (std::size_t k = 0; k < cols->size(); ++k) {
      const json& c = (*cols)[k];
      if (!c.is_number_integer()) {
        throw ParseError(where + ".cols[" + std::to_string(k) + "]: expected an integer");
      }
      d.rows[r].cols.push_back(c.get<int>());
      d.rows[r].vals.push_back(
          ToDouble((*vals)[k], where + ".vals[" + std::to_string(k) + "]"));
    }
  }
  try {
    return MilpInstance(std::move(d));
  } catch (const ContractError& e) {
    throw ParseError(std::string("instance: ") + e.what());
  }
}

void WriteInstance(const MilpInstance& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path + " for writing");
  out << InstanceToJson(model) << '\n';
  if (!out) throw Error("write failed: " + path);
}

MilpInstance ReadInstance(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open instance file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return InstanceFromJson(buf.str());
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

}  // namespace tlns
