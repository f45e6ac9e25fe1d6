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

#include "tlns/bench.h"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "tlns/bnb.h"
#include "tlns/errors.h"
#include "tlns/instance_io.h"
#include "tlns/policy.h"

namespace tlns {
namespace {

using Json = nlohmann::json;
namespace fs = std::filesystem;

double AxisValue(const LnsEvent& e, TimeAxis axis) {
  switch (axis) {
    case TimeAxis::kSteps:
      return static_cast<double>(e.step);
    case TimeAxis::kWork:
      return static_cast<double>(e.work);
    case TimeAxis::kSeconds:
      break;
  }
  return e.elapsed;
}

std::string Num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string Short(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string CsvField(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string XmlEscape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string FileStem(const std::string& s) {
  std::string out;
  for (char c : s) out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-') ? c : '_';
  return out;
}

std::string LogKey(const std::string& instance, const std::string& method, std::uint64_t seed) {
  return instance + "|" + method + "|" + std::to_string(seed);
}

template <typename T>
T Field(const Json& j, const char* key, const std::string& where, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw ParseError(where + "." + key + ": " + e.what());
  }
}

MethodSpec ParseMethod(const Json& j, const std::string& where, const fs::path& base) {
  MethodSpec m;
  if (!j.is_object()) throw ParseError(where + " is not an object");
  m.name = Field<std::string>(j, "name", where, "");
  if (m.name.empty()) throw ParseError(where + ".name is missing");
  const std::string engine = Field<std::string>(j, "engine", where, "lns");
  if (engine == "lns") {
    m.engine = EngineKind::kLns;
  } else if (engine == "tlns") {
    m.engine = EngineKind::kTlns;
  } else if (engine == "exact") {
    m.engine = EngineKind::kExact;
  } else {
    throw ParseError(where + ".engine: unknown engine '" + engine + "'");
  }
  const std::string policy = Field<std::string>(j, "policy", where, "random");
  if (policy == "random") {
    m.policy = PolicyKind::kRandom;
  } else if (policy == "learned") {
    m.policy = PolicyKind::kLearned;
  } else {
    throw ParseError(where + ".policy: unknown policy '" + policy + "'");
  }
  m.weights = Field<std::string>(j, "weights", where, "");
  if (!m.weights.empty() && fs::path(m.weights).is_relative()) {
    m.weights = (base / m.weights).string();
  }
  LnsParams& o = m.outer;
  LnsParams& in = m.inner;
  in.eta = 1.15;
  if (m.engine == EngineKind::kTlns) {
    o.r = Field<int>(j, "r1", where, o.r);
    in.r = Field<int>(j, "r2", where, in.r);
  } else {
    o.r = Field<int>(j, "r", where, o.r);
  }
  o.eta = Field<double>(j, "eta1", where, Field<double>(j, "eta", where, o.eta));
  in.eta = Field<double>(j, "eta2", where, in.eta);
  in.count_limit = o.count_limit = Field<int>(j, "count_limit", where, o.count_limit);
  in.sub_time_limit = o.sub_time_limit =
      Field<double>(j, "sub_time_limit", where, o.sub_time_limit);
  in.sub_node_limit = o.sub_node_limit =
      Field<std::int64_t>(j, "sub_node_limit", where, o.sub_node_limit);
  return m;
}

struct Cell {
  int instance;
  int method;
  std::uint64_t seed;
  bool prepass;
};

struct CellOutput {
  RunLog log;
  double final_pb = std::numeric_limits<double>::infinity();
  std::string error;
};

RunLog ExactLog(const SolverResult& res) {
  RunLog log;
  for (const PoolEntry& e : res.pool) {
    log.events.push_back({e.elapsed, 1, EventKind::kIncumbent, e.solution.objective, 0, 0});
  }
  log.iterations = 1;
  log.subsolves = 1;
  log.elapsed = res.elapsed;
  log.phase_times[static_cast<int>(Phase::kSubSolve)] = res.elapsed;
  return log;
}

int PoolWidth(int requested, std::size_t cells) {
  int width = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
  if (const char* env = std::getenv("TLNS_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) width = std::min(width, cap);
  }
  return std::clamp(width, 1, static_cast<int>(std::max<std::size_t>(cells, 1)));
}

}  // namespace

double PrimalGap(double pb, double bks) {
  if (pb == 0.0 && bks == 0.0) return 0.0;
  if (pb * bks < 0.0) return 1.0;
  return std::abs(pb - bks) / std::max(std::abs(pb), std::abs(bks));
}

double PrimalIntegral(const RunLog& log, double bks, double horizon, TimeAxis axis) {
  if (!std::isfinite(bks)) throw ContractError("bks must be finite");
  if (!(horizon > 0.0)) throw ContractError("horizon must be > 0");
  double pi = 0.0;
  double prev = 0.0;
  double gamma = 1.0;
  for (const LnsEvent& e : log.events) {
    if (e.kind != EventKind::kIncumbent) continue;
    const double t = std::max(AxisValue(e, axis), 0.0);
    if (t < prev) throw ContractError("incumbent events are not in time order");
    if (t > horizon) break;
    pi += gamma * (t - prev);
    prev = t;
    gamma = PrimalGap(e.objective, bks);
  }
  return pi + gamma * (horizon - prev);
}

std::optional<double> PrimalBoundAt(const RunLog& log, double at, TimeAxis axis) {
  std::optional<double> pb;
  for (const LnsEvent& e : log.events) {
    if (e.kind != EventKind::kIncumbent) continue;
    if (AxisValue(e, axis) > at) break;
    pb = e.objective;
  }
  return pb;
}

void ValidateBenchConfig(const BenchConfig& c) {
  if (c.iteration_budget < 0) throw ContractError("iteration_budget must be >= 0");
  if (c.iteration_budget == 0 && !(c.time_limit > 0.0)) {
    throw ContractError("time_limit must be > 0");
  }
  if (c.seeds.empty()) throw ContractError("no seeds");
  if (c.methods.empty()) throw ContractError("no methods");
  if (c.bks_factor < 0.0) throw ContractError("bks_factor must be >= 0");
  std::set<std::string> names;
  for (const MethodSpec& m : c.methods) {
    if (!names.insert(m.name).second) throw ContractError("duplicate method name " + m.name);
    if (m.policy == PolicyKind::kLearned && m.weights.empty()) {
      throw ContractError("learned method " + m.name + " has no weights");
    }
    if (m.engine == EngineKind::kExact && c.iteration_budget > 0 &&
        c.budget_unit == BudgetUnit::kLpIterations) {
      throw ContractError("exact method " + m.name + " cannot run under an lp_iterations budget");
    }
    if (m.engine != EngineKind::kExact) {
      ValidateLnsParams(m.outer);
      ValidateLnsParams(m.inner);
    }
  }
}

BenchConfig ReadBenchConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open bench config " + path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  const fs::path base = fs::path(path).parent_path();
  BenchConfig c;
  const std::string where = path;
  for (const std::string& p : Field<std::vector<std::string>>(j, "instances", where, {})) {
    c.instances.push_back(fs::path(p).is_relative() ? (base / p).string() : p);
  }
  if (!j.contains("methods") || !j["methods"].is_array()) {
    throw ParseError(path + ": methods must be a list");
  }
  for (std::size_t k = 0; k < j["methods"].size(); ++k) {
    c.methods.push_back(
        ParseMethod(j["methods"][k], path + ": methods[" + std::to_string(k) + "]", base));
  }
  c.time_limit = Field<double>(j, "time_limit", where, c.time_limit);
  c.iteration_budget = Field<std::int64_t>(j, "iteration_budget", where, 0);
  const std::string unit = Field<std::string>(j, "budget_unit", where, "subsolves");
  if (unit != "subsolves" && unit != "lp_iterations") {
    throw ParseError(path + ": budget_unit must be subsolves or lp_iterations");
  }
  c.budget_unit = unit == "subsolves" ? BudgetUnit::kSubsolves : BudgetUnit::kLpIterations;
  c.seeds = Field<std::vector<std::uint64_t>>(j, "seeds", where, c.seeds);
  const std::string policy = Field<std::string>(j, "bks_policy", where, "computed");
  if (policy != "computed" && policy != "provided") {
    throw ParseError(path + ": bks_policy must be computed or provided");
  }
  c.computed_bks = policy == "computed";
  for (const auto& [k, v] : Field<std::map<std::string, double>>(j, "bks", where, {})) {
    c.bks[fs::path(k).is_relative() ? (base / k).string() : k] = v;
  }
  c.bks_factor = Field<double>(j, "bks_factor", where, c.bks_factor);
  c.start = Field<std::string>(j, "start", where, c.start);
  c.init_time_limit = Field<double>(j, "init_time_limit", where, c.init_time_limit);
  c.threads = Field<int>(j, "threads", where, 0);
  try {
    ValidateBenchConfig(c);
  } catch (const ContractError& e) {
    throw ParseError(path + ": " + e.what());
  }
  return c;
}

BenchResults RunBenchmark(const BenchConfig& config, const std::string& out_dir) {
  ValidateBenchConfig(config);
  const bool iter_mode = config.iteration_budget > 0;
  const bool work_mode = iter_mode && config.budget_unit == BudgetUnit::kLpIterations;
  const TimeAxis axis =
      !iter_mode ? TimeAxis::kSeconds : work_mode ? TimeAxis::kWork : TimeAxis::kSteps;
  const double horizon =
      iter_mode ? static_cast<double>(config.iteration_budget) : config.time_limit;

  BenchResults results;
  std::vector<int> loaded;
  std::vector<std::unique_ptr<MilpInstance>> models(config.instances.size());
  std::vector<std::optional<Solution>> starts(config.instances.size());
  for (std::size_t i = 0; i < config.instances.size(); ++i) {
    const std::string& path = config.instances[i];
    try {
      models[i] = std::make_unique<MilpInstance>(ReadInstance(path));
      starts[i] = config.start == "solver" ? InitialIncumbent(*models[i], config.init_time_limit)
                                           : TrivialIncumbent(*models[i]);
      if (!config.computed_bks && !config.bks.count(path)) {
        throw ContractError("no provided bks");
      }
      loaded.push_back(static_cast<int>(i));
    } catch (const Error& e) {
      results.errors.push_back(path + ": " + e.what());
    }
  }

  std::vector<std::shared_ptr<const SgtWeights>> weights(config.methods.size());
  for (std::size_t k = 0; k < config.methods.size(); ++k) {
    if (config.methods[k].policy == PolicyKind::kLearned) {
      weights[k] = std::make_shared<const SgtWeights>(LoadWeights(config.methods[k].weights));
    }
  }

  std::vector<Cell> cells;
  for (int i : loaded) {
    for (int k = 0; k < static_cast<int>(config.methods.size()); ++k) {
      for (std::uint64_t s : config.seeds) cells.push_back({i, k, s, false});
    }
  }
  const std::size_t main_cells = cells.size();
  if (config.computed_bks && config.bks_factor > 0.0) {
    for (int i : loaded) {
      for (int k = 0; k < static_cast<int>(config.methods.size()); ++k) {
        cells.push_back({i, k, config.seeds.front(), true});
      }
    }
  }

  std::vector<CellOutput> outputs(cells.size());
  auto run_cell = [&](const Cell& cell) {
    const MethodSpec& m = config.methods[cell.method];
    const MilpInstance& model = *models[cell.instance];
    const double scale = cell.prepass ? config.bks_factor : 1.0;
    Fixer fixer = m.policy == PolicyKind::kLearned ? LearnedFixer(*weights[cell.method])
                                                   : RandomFixer();
    if (m.engine == EngineKind::kExact) {
      SolveOptions so;
      so.time_limit = config.time_limit * scale;
      so.node_limit = m.outer.sub_node_limit;
      so.start = &starts[cell.instance]->x;
      RunLog log = ExactLog(SolveMilp(model, so));
      return log;
    }
    LnsParams outer = m.outer;
    if (iter_mode) {
      const auto budget =
          static_cast<std::int64_t>(std::llround(static_cast<double>(config.iteration_budget) * scale));
      (work_mode ? outer.max_lp_iterations : outer.max_subsolves) = budget;
      outer.time_limit = std::numeric_limits<double>::infinity();
    } else {
      outer.time_limit = config.time_limit * scale;
    }
    Rng rng(cell.seed);
    const Solution& start = *starts[cell.instance];
    LnsResult res = m.engine == EngineKind::kTlns
                        ? RunTlns(model, start, fixer, outer, m.inner, rng)
                        : RunLns(model, start, fixer, outer, rng);
    return std::move(res.log);
  };

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t c = next++; c < cells.size(); c = next++) {
      try {
        outputs[c].log = run_cell(cells[c]);
        for (const LnsEvent& e : outputs[c].log.events) {
          if (e.kind == EventKind::kIncumbent) outputs[c].final_pb = e.objective;
        }
      } catch (const std::exception& e) {
        outputs[c].error = e.what();
      }
    }
  };
  const int width = PoolWidth(config.threads, cells.size());
  std::vector<std::thread> pool;
  for (int w = 1; w < width; ++w) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();

  for (int i : loaded) {
    const std::string& path = config.instances[i];
    if (!config.computed_bks) {
      results.bks[path] = config.bks.at(path);
      continue;
    }
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (cells[c].instance == i) best = std::min(best, outputs[c].final_pb);
    }
    if (std::isfinite(best)) results.bks[path] = best;
  }

  for (std::size_t c = 0; c < main_cells; ++c) {
    const Cell& cell = cells[c];
    const std::string& path = config.instances[cell.instance];
    const MethodSpec& m = config.methods[cell.method];
    if (!outputs[c].error.empty()) {
      results.errors.push_back(path + " " + m.name + " seed " + std::to_string(cell.seed) +
                               ": " + outputs[c].error);
      continue;
    }
    const RunLog& log = outputs[c].log;
    BenchRow row;
    row.instance = path;
    row.method = m.name;
    row.seed = cell.seed;
    row.pb_at_t = PrimalBoundAt(log, horizon, axis);
    auto bks = results.bks.find(path);
    row.pi = bks == results.bks.end() ? horizon : PrimalIntegral(log, bks->second, horizon, axis);
    row.iterations = log.iterations;
    row.phase_times = log.phase_times;
    results.rows.push_back(std::move(row));
    results.logs[LogKey(path, m.name, cell.seed)] = log;
  }

  if (!out_dir.empty()) {
    fs::create_directories(fs::path(out_dir) / "runs");
    fs::create_directories(fs::path(out_dir) / "plots");
    std::ofstream(fs::path(out_dir) / "results.csv") << ResultsCsv(results, iter_mode);
    Json manifest = {{"csv_schema", kCsvSchema},
                     {"mode", iter_mode ? "iterations" : "seconds"},
                     {"budget_unit", work_mode ? "lp_iterations" : "subsolves"},
                     {"horizon", horizon},
                     {"bks", results.bks},
                     {"errors", results.errors}};
    std::ofstream(fs::path(out_dir) / "manifest.json") << manifest.dump(2) << '\n';
    for (const BenchRow& row : results.rows) {
      const std::string stem = FileStem(fs::path(row.instance).stem().string()) + "__" +
                               FileStem(row.method) + "__" + std::to_string(row.seed);
      WriteRunLog(results.logs.at(LogKey(row.instance, row.method, row.seed)),
                  (fs::path(out_dir) / "runs" / (stem + ".jsonl")).string());
    }
    for (int i : loaded) {
      const std::string& path = config.instances[i];
      auto bks = results.bks.find(path);
      if (bks == results.bks.end()) continue;
      std::vector<PlotCurve> curves;
      for (const MethodSpec& m : config.methods) {
        auto it = results.logs.find(LogKey(path, m.name, config.seeds.front()));
        if (it != results.logs.end()) curves.push_back({m.name, it->second});
      }
      if (curves.empty()) continue;
      EmitPlot(curves, bks->second, horizon,
               (fs::path(out_dir) / "plots" / (FileStem(fs::path(path).stem().string()) + ".svg"))
                   .string(),
               axis);
    }
  }
  return results;
}

std::string ResultsCsv(const BenchResults& results, bool iteration_mode) {
  std::ostringstream out;
  out << kCsvHeader << '\n';
  for (const BenchRow& r : results.rows) {
    out << CsvField(r.instance) << ',' << CsvField(r.method) << ',' << r.seed << ','
        << (r.pb_at_t ? Num(*r.pb_at_t) : "") << ',' << Num(r.pi) << ',' << r.iterations;
    for (double t : r.phase_times) out << ',' << (iteration_mode ? "" : Num(t));
    out << '\n';
  }
  return out.str();
}

std::string RenderPlot(const std::vector<PlotCurve>& curves, double bks, double horizon,
                       TimeAxis axis) {
  if (curves.empty()) throw ContractError("nothing to plot");
  if (!(horizon > 0.0)) throw ContractError("horizon must be > 0");
  static constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                            "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};
  constexpr double kW = 720, kH = 420, kLeft = 80, kRight = 180, kTop = 30, kBottom = 50;
  double lo = bks;
  double hi = bks;
  for (const PlotCurve& c : curves) {
    for (const LnsEvent& e : c.log.events) {
      if (e.kind != EventKind::kIncumbent || AxisValue(e, axis) > horizon) continue;
      lo = std::min(lo, e.objective);
      hi = std::max(hi, e.objective);
    }
  }
  const double pad = hi > lo ? 0.05 * (hi - lo) : std::max(1.0, std::abs(hi) * 0.05);
  lo -= pad;
  hi += pad;
  const double pw = kW - kLeft - kRight;
  const double ph = kH - kTop - kBottom;
  auto px = [&](double t) { return kLeft + pw * std::clamp(t / horizon, 0.0, 1.0); };
  auto py = [&](double v) { return kTop + ph * (hi - v) / (hi - lo); };

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\""
    << ph << "\" fill=\"none\" stroke=\"#444\"/>\n";
  s << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kH - 12 << "\" text-anchor=\"middle\">"
    << (axis == TimeAxis::kSteps  ? "exact solves"
        : axis == TimeAxis::kWork ? "simplex iterations"
                                  : "time (s)")
    << "</text>\n";
  s << "<text x=\"16\" y=\"" << kTop + ph / 2 << "\" transform=\"rotate(-90 16 "
    << kTop + ph / 2 << ")\" text-anchor=\"middle\">primal bound</text>\n";
  for (int k = 0; k <= 4; ++k) {
    const double t = horizon * k / 4.0;
    const double v = lo + (hi - lo) * k / 4.0;
    s << "<text x=\"" << px(t) << "\" y=\"" << kTop + ph + 16
      << "\" text-anchor=\"middle\">" << Short(t) << "</text>\n";
    s << "<text x=\"" << kLeft - 6 << "\" y=\"" << py(v) + 4 << "\" text-anchor=\"end\">"
      << Short(v) << "</text>\n";
  }
  s << "<line class=\"bks\" x1=\"" << kLeft << "\" y1=\"" << py(bks) << "\" x2=\""
    << kLeft + pw << "\" y2=\"" << py(bks)
    << "\" stroke=\"#000\" stroke-dasharray=\"6 4\"/>\n";

  for (std::size_t c = 0; c < curves.size(); ++c) {
    const char* color = kColors[c % std::size(kColors)];
    const std::string name = XmlEscape(curves[c].method);
    std::ostringstream path;
    std::ostringstream marks;
    bool started = false;
    for (const LnsEvent& e : curves[c].log.events) {
      if (e.kind != EventKind::kIncumbent) continue;
      const double t = AxisValue(e, axis);
      if (t > horizon) break;
      if (!started) {
        path << "M" << px(t) << "," << py(e.objective);
        started = true;
      } else {
        path << " H" << px(t) << " V" << py(e.objective);
      }
      marks << "<circle class=\"incumbent\" data-method=\"" << name << "\" cx=\"" << px(t)
            << "\" cy=\"" << py(e.objective) << "\" r=\"2.5\" fill=\"" << color << "\"/>\n";
    }
    if (started) {
      path << " H" << px(horizon);
      s << "<path class=\"curve\" data-method=\"" << name << "\" d=\"" << path.str()
        << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\"/>\n";
    }
    s << marks.str();
    const double ly = kTop + 14 + 18.0 * static_cast<double>(c);
    s << "<line x1=\"" << kW - kRight + 12 << "\" y1=\"" << ly - 4 << "\" x2=\""
      << kW - kRight + 32 << "\" y2=\"" << ly - 4 << "\" stroke=\"" << color
      << "\" stroke-width=\"2\"/>\n";
    s << "<text class=\"legend\" x=\"" << kW - kRight + 38 << "\" y=\"" << ly << "\">" << name
      << "</text>\n";
  }
  const double ly = kTop + 14 + 18.0 * static_cast<double>(curves.size());
  s << "<line x1=\"" << kW - kRight + 12 << "\" y1=\"" << ly - 4 << "\" x2=\""
    << kW - kRight + 32 << "\" y2=\"" << ly - 4
    << "\" stroke=\"#000\" stroke-dasharray=\"6 4\"/>\n";
  s << "<text class=\"legend\" x=\"" << kW - kRight + 38 << "\" y=\"" << ly << "\">BKS "
    << Short(bks) << "</text>\n";
  s << "</svg>\n";
  return s.str();
}

void EmitPlot(const std::vector<PlotCurve>& curves, double bks, double horizon,
              const std::string& path, TimeAxis axis) {
  const std::string svg = RenderPlot(curves, bks, horizon, axis);
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path + " for writing");
  out << svg;
}

}  // namespace tlns
