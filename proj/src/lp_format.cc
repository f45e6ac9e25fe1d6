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

#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "tlns/bnb.h"
#include "tlns/errors.h"

extern char** environ;

namespace tlns {
namespace {

std::string Num(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

double ParseNum(const std::string& tok, int line) {
  double v = 0.0;
  const char* b = tok.data();
  const char* e = b + tok.size();
  if (!tok.empty() && tok[0] == '+') ++b;
  auto [ptr, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || ptr != e) {
    throw ParseError("LP line " + std::to_string(line) + ": bad number '" + tok + "'");
  }
  return v;
}

int ParseVar(const std::string& tok, int line) {
  int v = -1;
  if (tok.size() >= 2 && tok[0] == 'x') {
    auto [ptr, ec] = std::from_chars(tok.data() + 1, tok.data() + tok.size(), v);
    if (ec == std::errc() && ptr == tok.data() + tok.size() && v >= 0) return v;
  }
  throw ParseError("LP line " + std::to_string(line) + ": bad variable '" + tok + "'");
}

void WriteTerms(std::ostringstream& out, RowView row) {
  for (int k = 0; k < row.size(); ++k) {
    const double a = row.vals[k];
    out << (a < 0 ? " - " : " + ") << Num(std::abs(a)) << " x" << row.cols[k];
  }
}

std::string Lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

// Parses "[+|-] coef var" triples until the end of `toks` or a relation.
std::size_t ParseTerms(const std::vector<std::string>& toks, std::size_t pos, int line,
                       SparseRow& row) {
  while (pos < toks.size()) {
    const std::string& t = toks[pos];
    if (t == "<=" || t == ">=" || t == "=") break;
    if (pos + 2 >= toks.size()) {
      throw ParseError("LP line " + std::to_string(line) + ": truncated term");
    }
    double sign = 1.0;
    if (t == "-") {
      sign = -1.0;
    } else if (t != "+") {
      throw ParseError("LP line " + std::to_string(line) + ": expected sign, got '" + t + "'");
    }
    row.vals.push_back(sign * ParseNum(toks[pos + 1], line));
    row.cols.push_back(ParseVar(toks[pos + 2], line));
    pos += 3;
  }
  return pos;
}

bool FindExecutable(const std::string& cmd) {
  if (cmd.empty()) return false;
  if (cmd.find('/') != std::string::npos) return access(cmd.c_str(), X_OK) == 0;
  const char* path = std::getenv("PATH");
  if (path == nullptr) return false;
  std::stringstream ss(path);
  std::string dir;
  while (std::getline(ss, dir, ':')) {
    if (dir.empty()) dir = ".";
    const std::string full = dir + "/" + cmd;
    if (access(full.c_str(), X_OK) == 0 && !std::filesystem::is_directory(full)) return true;
  }
  return false;
}

}  // namespace

std::string WriteLpFormat(const MilpInstance& model) {
  const int n = model.n();
  std::ostringstream out;
  out << "\\ Problem: " << model.name() << "\n";
  out << "Minimize\n obj:";
  bool any = false;
  for (int i = 0; i < n; ++i) {
    const double c = model.obj()[i];
    if (c == 0.0) continue;
    out << (c < 0 ? " - " : " + ") << Num(std::abs(c)) << " x" << i;
    any = true;
  }
  if (!any && n > 0) out << " + 0 x0";
  out << "\nSubject To\n";
  for (int j = 0; j < model.m(); ++j) {
    out << " c" << j << ":";
    RowView r = model.row(j);
    if (r.size() == 0) {
      if (n == 0) throw ContractError("LP format cannot express a row without variables");
      out << " + 0 x0";
    }
    WriteTerms(out, r);
    const char* rel = model.sense(j) == Sense::kLe ? "<=" : (model.sense(j) == Sense::kGe ? ">=" : "=");
    out << " " << rel << " " << Num(model.rhs()[j]) << "\n";
  }
  out << "Bounds\n";
  for (int i = 0; i < n; ++i) {
    const double lo = model.lower()[i];
    const double up = model.upper()[i];
    if (lo == up) {
      out << " x" << i << " = " << Num(lo) << "\n";
    } else {
      out << " " << Num(lo) << " <= x" << i << " <= " << Num(up) << "\n";
    }
  }
  std::vector<int> binaries;
  std::vector<int> generals;
  for (int i = 0; i < n; ++i) {
    if (!model.is_integer(i)) continue;
    (model.lower()[i] == 0.0 && model.upper()[i] == 1.0 ? binaries : generals).push_back(i);
  }
  if (!binaries.empty()) {
    out << "Binaries\n";
    for (int i : binaries) out << " x" << i << "\n";
  }
  if (!generals.empty()) {
    out << "Generals\n";
    for (int i : generals) out << " x" << i << "\n";
  }
  out << "End\n";
  return out.str();
}

MilpInstance ReadLpFormat(const std::string& text) {
  enum class Section { kNone, kObjective, kRows, kBounds, kBinaries, kGenerals, kEnd };
  Section section = Section::kNone;
  MilpData d;
  std::vector<std::pair<int, double>> obj_terms;
  struct Bound {
    int var;
    double lo;
    double up;
  };
  std::vector<Bound> bounds;
  std::vector<int> ints;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (!raw.empty() && raw[0] == '\\') {
      const std::string tag = "\\ Problem: ";
      if (raw.rfind(tag, 0) == 0) d.name = raw.substr(tag.size());
      continue;
    }
    std::istringstream ls(raw);
    std::vector<std::string> toks;
    for (std::string t; ls >> t;) toks.push_back(t);
    if (toks.empty()) continue;
    const std::string head = Lower(raw.substr(raw.find_first_not_of(" \t")));
    if (head == "minimize") {
      section = Section::kObjective;
      continue;
    }
    if (head == "subject to") {
      section = Section::kRows;
      continue;
    }
    if (head == "bounds") {
      section = Section::kBounds;
      continue;
    }
    if (head == "binaries") {
      section = Section::kBinaries;
      continue;
    }
    if (head == "generals") {
      section = Section::kGenerals;
      continue;
    }
    if (head == "end") {
      section = Section::kEnd;
      continue;
    }
    switch (section) {
      case Section::kObjective: {
        if (toks[0] != "obj:") throw ParseError("LP line " + std::to_string(line) + ": expected 'obj:'");
        SparseRow r;
        if (ParseTerms(toks, 1, line, r) != toks.size()) {
          throw ParseError("LP line " + std::to_string(line) + ": relation in objective");
        }
        for (std::size_t k = 0; k < r.cols.size(); ++k) obj_terms.emplace_back(r.cols[k], r.vals[k]);
        break;
      }
      case Section::kRows: {
        if (toks[0].empty() || toks[0].back() != ':') {
          throw ParseError("LP line " + std::to_string(line) + ": expected row label");
        }
        SparseRow r;
        const std::size_t pos = ParseTerms(toks, 1, line, r);
        if (pos + 2 != toks.size()) {
          throw ParseError("LP line " + std::to_string(line) + ": expected relation and rhs");
        }
        d.sense.push_back(toks[pos] == "<=" ? Sense::kLe : (toks[pos] == ">=" ? Sense::kGe : Sense::kEq));
        d.rhs.push_back(ParseNum(toks[pos + 1], line));
        d.rows.push_back(std::move(r));
        break;
      }
      case Section::kBounds:
        if (toks.size() == 3 && toks[1] == "=") {
          const double v = ParseNum(toks[2], line);
          bounds.push_back({ParseVar(toks[0], line), v, v});
        } else if (toks.size() == 5 && toks[1] == "<=" && toks[3] == "<=") {
          bounds.push_back({ParseVar(toks[2], line), ParseNum(toks[0], line), ParseNum(toks[4], line)});
        } else {
          throw ParseError("LP line " + std::to_string(line) + ": unsupported bound");
        }
        break;
      case Section::kBinaries:
      case Section::kGenerals:
        for (const std::string& t : toks) ints.push_back(ParseVar(t, line));
        break;
      case Section::kNone:
      case Section::kEnd:
        throw ParseError("LP line " + std::to_string(line) + ": text outside a section");
    }
  }
  if (section != Section::kEnd) throw ParseError("LP text has no End section");
  const int n = static_cast<int>(bounds.size());
  d.num_vars = n;
  d.obj.assign(n, 0.0);
  d.lower.assign(n, 0.0);
  d.upper.assign(n, 0.0);
  d.is_integer.assign(n, false);
  std::vector<char> seen(n, 0);
  for (const Bound& b : bounds) {
    if (b.var >= n || seen[b.var]) throw ParseError("LP bounds do not list x0..x" + std::to_string(n - 1));
    seen[b.var] = 1;
    d.lower[b.var] = b.lo;
    d.upper[b.var] = b.up;
  }
  for (auto [i, c] : obj_terms) {
    if (i >= n) throw ParseError("LP objective uses undeclared x" + std::to_string(i));
    d.obj[i] += c;
  }
  for (int i : ints) {
    if (i >= n) throw ParseError("LP integer section uses undeclared x" + std::to_string(i));
    d.is_integer[i] = true;
  }
  return MilpInstance(std::move(d));
}

SolverResult ExternalSolve(const MilpInstance& model, const SolveOptions& options,
                           const std::string& solver_cmd) {
  ValidateSolveOptions(options);
  if (!FindExecutable(solver_cmd)) {
    throw AdapterUnavailableError("external solver '" + solver_cmd + "' is not available");
  }
  const auto start = std::chrono::steady_clock::now();
  std::string tmpl = (std::filesystem::temp_directory_path() / "tlns-XXXXXX").string();
  if (mkdtemp(tmpl.data()) == nullptr) throw AdapterError("cannot create a temporary directory");
  const std::filesystem::path dir(tmpl);
  struct Cleanup {
    std::filesystem::path p;
    ~Cleanup() {
      std::error_code ec;
      std::filesystem::remove_all(p, ec);
    }
  } cleanup{dir};
  const std::string lp_path = (dir / "model.lp").string();
  const std::string sol_path = (dir / "solution.sol").string();
  {
    std::ofstream f(lp_path);
    f << WriteLpFormat(model);
    if (!f) throw AdapterError("cannot write " + lp_path);
  }
  const std::string limit = std::isfinite(options.time_limit) ? Num(options.time_limit) : "1e9";
  std::vector<std::string> args = {solver_cmd, lp_path, sol_path, limit};
  std::vector<char*> argv;
  for (std::string& a : args) argv.push_back(a.data());
  argv.push_back(nullptr);
  pid_t pid = 0;
  if (posix_spawnp(&pid, solver_cmd.c_str(), nullptr, nullptr, argv.data(), environ) != 0) {
    throw AdapterUnavailableError("cannot start '" + solver_cmd + "'");
  }
  int wstatus = 0;
  if (waitpid(pid, &wstatus, 0) < 0) throw AdapterError("waitpid failed");
  if (!WIFEXITED(wstatus) || WEXITSTATUS(wstatus) != 0) {
    throw AdapterError("external solver exited with status " +
                       std::to_string(WIFEXITED(wstatus) ? WEXITSTATUS(wstatus) : -1));
  }

  std::ifstream f(sol_path);
  if (!f) throw AdapterError("external solver wrote no solution file");
  std::vector<double> x(model.n(), 0.0);
  bool infeasible = false;
  bool optimal = false;
  bool any = false;
  std::string raw;
  int line = 0;
  while (std::getline(f, raw)) {
    ++line;
    if (raw.empty()) continue;
    if (raw[0] == '#') {
      const std::string l = Lower(raw);
      infeasible |= l.find("infeasible") != std::string::npos;
      optimal |= l.find("optimal") != std::string::npos;
      continue;
    }
    std::istringstream ls(raw);
    std::string name, value;
    if (!(ls >> name >> value)) throw AdapterError("solution line " + std::to_string(line) + " is malformed");
    int i = -1;
    double v = 0.0;
    try {
      i = ParseVar(name, line);
      v = ParseNum(value, line);
    } catch (const ParseError& e) {
      throw AdapterError(std::string("solution file: ") + e.what());
    }
    if (i >= model.n()) throw AdapterError("solution names unknown variable " + name);
    x[i] = v;
    any = true;
  }
  SolverResult result;
  result.elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (infeasible) {
    result.status = SolveStatus::kInfeasible;
    result.dual_bound = std::numeric_limits<double>::infinity();
    return result;
  }
  if (!any && model.n() > 0) throw AdapterError("solution file holds no values");
  for (int i = 0; i < model.n(); ++i) {
    if (model.is_integer(i)) x[i] = std::round(x[i]);
  }
  if (!IsFeasible(model, x)) throw AdapterError("external solution is infeasible");
  Solution s = Solution::Of(model, std::move(x));
  result.status = optimal ? SolveStatus::kOptimal : SolveStatus::kFeasible;
  result.dual_bound = optimal ? s.objective : -std::numeric_limits<double>::infinity();
  result.best = s;
  result.pool.push_back({result.elapsed, std::move(s)});
  return result;
}

}  // namespace tlns
