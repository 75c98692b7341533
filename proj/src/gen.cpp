#include "mgroute/gen.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace mgroute {

Distribution parse_distribution(const std::string& name, int& x_out) {
  std::string s;
  for (char c : name) s.push_back(static_cast<char>(std::tolower(c)));
  x_out = 1;
  if (s == "euc") return Distribution::Euc;
  if (s == "tmat") return Distribution::Tmat;
  if (s == "xasy") return Distribution::Xasy;
  auto tail_int = [&](std::size_t prefix) {
    if (s.size() == prefix) return 1;
    return std::stoi(s.substr(prefix));
  };
  if (s.rfind("fix", 0) == 0) {
    x_out = tail_int(3);
    return Distribution::Fix;
  }
  if (s.rfind("flex", 0) == 0) {
    x_out = tail_int(4);
    return Distribution::Flex;
  }
  throw ContractError("unknown distribution '" + name + "'");
}

std::string distribution_name(Distribution d, int x) {
  switch (d) {
    case Distribution::Euc: return "euc";
    case Distribution::Tmat: return "tmat";
    case Distribution::Xasy: return "xasy";
    case Distribution::Fix: return "fix" + std::to_string(x);
    case Distribution::Flex: return "flex" + std::to_string(x);
  }
  return "?";
}

ProblemKind parse_problem(const std::string& name) {
  std::string s;
  for (char c : name) s.push_back(static_cast<char>(std::tolower(c)));
  if (s == "motsp") return ProblemKind::MOTSP;
  if (s == "mocvrp") return ProblemKind::MOCVRP;
  if (s == "mgmotsp") return ProblemKind::MGMOTSP;
  if (s == "mgmocvrp") return ProblemKind::MGMOCVRP;
  if (s == "mgmotsptw") return ProblemKind::MGMOTSPTW;
  throw ContractError("unknown problem '" + name + "'");
}

std::string problem_name(ProblemKind k) {
  switch (k) {
    case ProblemKind::MOTSP: return "motsp";
    case ProblemKind::MOCVRP: return "mocvrp";
    case ProblemKind::MGMOTSP: return "mgmotsp";
    case ProblemKind::MGMOCVRP: return "mgmocvrp";
    case ProblemKind::MGMOTSPTW: return "mgmotsptw";
  }
  return "?";
}

void GenSpec::validate() const {
  require(n >= 3, "GenSpec: n must be >= 3");
  require(m >= 1, "GenSpec: m must be >= 1");
  bool multigraph = dist == Distribution::Fix || dist == Distribution::Flex;
  require(!multigraph || x >= 1, "GenSpec: x must be >= 1 for FIX/FLEX");
  require(x < 100, "GenSpec: x must be < 100 (chromosome gene base)");
  require(multigraph || x == 1, "GenSpec: x implies FIX/FLEX");
  if (problem == ProblemKind::MOCVRP)
    require(m == 1, "GenSpec: MOCVRP uses one distance feature");
  if (problem == ProblemKind::MGMOTSPTW)
    require(m == 2 && multigraph,
            "GenSpec: MGMOTSPTW requires FIX/FLEX with m=2 (time, distance)");
  if (problem == ProblemKind::MGMOTSP || problem == ProblemKind::MGMOCVRP)
    require(multigraph, "GenSpec: MG problems require FIX/FLEX");
}

namespace {

MultiGraphInstance from_matrices(int n, const std::vector<std::vector<double>>& d) {
  const int m = static_cast<int>(d.size());
  MultiGraphInstance inst = MultiGraphInstance::empty(n, m);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      CostVector c(static_cast<std::size_t>(m));
      for (int k = 0; k < m; ++k) c[k] = d[k][static_cast<std::size_t>(i) * n + j];
      inst.pair_slots(i, j).push_back(std::move(c));
    }
  }
  return inst;
}

}  // namespace

MultiGraphInstance gen_euc(int n, int m, Rng& rng) {
  std::vector<std::vector<double>> mats(m, std::vector<double>(static_cast<std::size_t>(n) * n, 0.0));
  for (int k = 0; k < m; ++k) {
    std::vector<double> xs(n), ys(n);
    for (int i = 0; i < n; ++i) {
      xs[i] = rng.uniform();
      ys[i] = rng.uniform();
    }
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        mats[k][static_cast<std::size_t>(i) * n + j] =
            std::hypot(xs[i] - xs[j], ys[i] - ys[j]);
  }
  return from_matrices(n, mats);
}

MultiGraphInstance gen_tmat(int n, int m, Rng& rng) {
  std::vector<std::vector<double>> mats(m, std::vector<double>(static_cast<std::size_t>(n) * n, 0.0));
  for (int k = 0; k < m; ++k) {
    auto& d = mats[k];
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j) d[static_cast<std::size_t>(i) * n + j] = rng.uniform();
    // shortest-path closure; afterwards no triple violates the triangle
    // inequality and one more pass changes nothing
    for (int via = 0; via < n; ++via)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          double alt = d[static_cast<std::size_t>(i) * n + via] +
                       d[static_cast<std::size_t>(via) * n + j];
          double& cur = d[static_cast<std::size_t>(i) * n + j];
          if (i != j && alt < cur) cur = alt;
        }
  }
  return from_matrices(n, mats);
}

MultiGraphInstance gen_xasy(int n, int m, Rng& rng) {
  std::vector<std::vector<double>> mats(m, std::vector<double>(static_cast<std::size_t>(n) * n, 0.0));
  for (int k = 0; k < m; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j) mats[k][static_cast<std::size_t>(i) * n + j] = rng.uniform();
  return from_matrices(n, mats);
}

MultiGraphInstance gen_fix(int n, int x, int m, Rng& rng) {
  require(x >= 1, "gen_fix: x must be >= 1");
  MultiGraphInstance inst = MultiGraphInstance::empty(n, m);
  std::vector<double> col(static_cast<std::size_t>(x));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      auto& slots = inst.pair_slots(i, j);
      slots.assign(static_cast<std::size_t>(x), CostVector(static_cast<std::size_t>(m)));
      for (int s = 0; s < x; ++s)
        for (int k = 0; k < m; ++k) slots[s][k] = rng.uniform();
      // objective 1 ascending, objective 2 descending; objective 3, when
      // present, keeps its sampled order
      for (int s = 0; s < x; ++s) col[s] = slots[s][0];
      std::sort(col.begin(), col.end());
      for (int s = 0; s < x; ++s) slots[s][0] = col[s];
      if (m >= 2) {
        for (int s = 0; s < x; ++s) col[s] = slots[s][1];
        std::sort(col.begin(), col.end(), std::greater<>());
        for (int s = 0; s < x; ++s) slots[s][1] = col[s];
      }
    }
  }
  return inst;
}

MultiGraphInstance gen_flex(int n, int x, int m, Rng& rng) {
  require(x >= 1, "gen_flex: x must be >= 1");
  MultiGraphInstance inst = MultiGraphInstance::empty(n, m);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      std::vector<CostVector> sampled(static_cast<std::size_t>(x),
                                      CostVector(static_cast<std::size_t>(m)));
      for (int s = 0; s < x; ++s)
        for (int k = 0; k < m; ++k) sampled[s][k] = rng.uniform();
      inst.pair_slots(i, j) = pareto_filter(sampled);
    }
  }
  return inst;
}

void attach_cvrp(MultiGraphInstance& inst, Rng& rng) {
  require(inst.demands.empty() && !inst.depot, "attach_cvrp: payloads present");
  const int n = inst.n;
  inst.depot = 0;
  inst.capacity = n <= 20 ? 30 : (n <= 50 ? 40 : 50);
  inst.demands.assign(static_cast<std::size_t>(n), 0);
  for (int v = 1; v < n; ++v)
    inst.demands[v] = 1 + static_cast<int>(rng.uniform_int(9));
}

void attach_time_windows(MultiGraphInstance& inst, Rng& rng) {
  require(!inst.has_windows, "attach_time_windows: windows present");
  require(inst.m == 2, "attach_time_windows: needs (time, distance) features");
  const int n = inst.n;
  const double horizon = 0.5 * n;
  inst.depot = inst.depot.value_or(0);
  inst.has_windows = true;
  inst.windows.assign(static_cast<std::size_t>(n), TimeWindow{});
  for (int v = 0; v < n; ++v) {
    if (v == *inst.depot) continue;
    double start = rng.uniform(0.0, horizon);
    double width = rng.uniform(0.05 * horizon, 0.2 * horizon);
    inst.windows[v] = {start, start + width};
  }
}

MultiGraphInstance generate(const GenSpec& spec, std::uint64_t index) {
  spec.validate();
  Rng rng = Rng::stream(spec.seed, index);
  MultiGraphInstance inst;
  switch (spec.dist) {
    case Distribution::Euc: inst = gen_euc(spec.n, spec.m, rng); break;
    case Distribution::Tmat: inst = gen_tmat(spec.n, spec.m, rng); break;
    case Distribution::Xasy: inst = gen_xasy(spec.n, spec.m, rng); break;
    case Distribution::Fix: inst = gen_fix(spec.n, spec.x, spec.m, rng); break;
    case Distribution::Flex: inst = gen_flex(spec.n, spec.x, spec.m, rng); break;
  }
  if (spec.problem == ProblemKind::MOCVRP || spec.problem == ProblemKind::MGMOCVRP)
    attach_cvrp(inst, rng);
  if (spec.problem == ProblemKind::MGMOTSPTW) {
    inst.depot = 0;
    attach_time_windows(inst, rng);
  }
  return inst;
}

std::vector<MultiGraphInstance> generate_batch(const GenSpec& spec, int count) {
  std::vector<MultiGraphInstance> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) out.push_back(generate(spec, static_cast<std::uint64_t>(i)));
  return out;
}

namespace {

void fmt_double(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

}  // namespace

std::string instance_to_json(const MultiGraphInstance& inst) {
  std::string s;
  s.reserve(static_cast<std::size_t>(inst.total_edges()) * 24 + 64);
  s += "{\"n\":" + std::to_string(inst.n) + ",\"m\":" + std::to_string(inst.m);
  if (inst.depot) s += ",\"depot\":" + std::to_string(*inst.depot);
  if (inst.capacity) s += ",\"capacity\":" + std::to_string(*inst.capacity);
  if (!inst.demands.empty()) {
    s += ",\"demands\":[";
    for (int v = 0; v < inst.n; ++v) {
      if (v) s += ',';
      s += std::to_string(inst.demands[v]);
    }
    s += ']';
  }
  if (inst.has_windows) {
    s += ",\"windows\":[";
    for (int v = 0; v < inst.n; ++v) {
      if (v) s += ',';
      if (inst.depot && v == *inst.depot) {
        s += "null";
      } else {
        s += '[';
        fmt_double(s, inst.windows[v].start);
        s += ',';
        fmt_double(s, inst.windows[v].end);
        s += ']';
      }
    }
    s += ']';
  }
  s += ",\"edges\":[";
  bool first = true;
  for (int i = 0; i < inst.n; ++i) {
    for (int j = 0; j < inst.n; ++j) {
      if (i == j) continue;
      if (!first) s += ',';
      first = false;
      s += '[' + std::to_string(i) + ',' + std::to_string(j) + ",[";
      const auto& slots = inst.pair_slots(i, j);
      for (std::size_t k = 0; k < slots.size(); ++k) {
        if (k) s += ',';
        s += '[';
        for (std::size_t c = 0; c < slots[k].size(); ++c) {
          if (c) s += ',';
          fmt_double(s, slots[k][c]);
        }
        s += ']';
      }
      s += "]]";
    }
  }
  s += "]}";
  return s;
}

MultiGraphInstance instance_from_json(const std::string& line, int lineno) {
  const std::string where = "line " + std::to_string(lineno);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw ContractError("parse error at " + where + ": " + e.what());
  }
  try {
    MultiGraphInstance inst = MultiGraphInstance::empty(j.at("n").get<int>(),
                                                        j.at("m").get<int>());
    if (j.contains("depot")) inst.depot = j["depot"].get<int>();
    if (j.contains("capacity")) inst.capacity = j["capacity"].get<int>();
    if (j.contains("demands")) inst.demands = j["demands"].get<std::vector<int>>();
    if (j.contains("windows")) {
      inst.has_windows = true;
      inst.windows.assign(static_cast<std::size_t>(inst.n), TimeWindow{});
      const auto& ws = j["windows"];
      require(static_cast<int>(ws.size()) == inst.n,
              where + ": windows length != n");
      for (int v = 0; v < inst.n; ++v) {
        if (ws[v].is_null()) continue;
        inst.windows[v] = {ws[v][0].get<double>(), ws[v][1].get<double>()};
      }
    }
    for (const auto& rec : j.at("edges")) {
      int from = rec.at(0).get<int>();
      int to = rec.at(1).get<int>();
      require(from >= 0 && from < inst.n && to >= 0 && to < inst.n && from != to,
              where + ": edge endpoints out of range");
      auto& slots = inst.pair_slots(from, to);
      require(slots.empty(), where + ": duplicate pair record");
      for (const auto& cv : rec.at(2)) {
        CostVector c = cv.get<CostVector>();
        require(static_cast<int>(c.size()) == inst.m,
                where + ": cost dimension != m");
        slots.push_back(std::move(c));
      }
    }
    try {
      check_instance(inst);
    } catch (const ContractError& e) {
      throw ContractError(where + ": " + e.what());
    }
    return inst;
  } catch (const nlohmann::json::exception& e) {
    throw ContractError("invalid record at " + where + ": " + e.what());
  }
}

void check_instance(const MultiGraphInstance& inst) {
  require(inst.n >= 3, "instance: n must be >= 3");
  require(inst.m >= 1, "instance: m must be >= 1");
  require(static_cast<int>(inst.slots.size()) == inst.n * inst.n,
          "instance: slot table size mismatch");
  for (int i = 0; i < inst.n; ++i) {
    for (int j = 0; j < inst.n; ++j) {
      const auto& slots = inst.pair_slots(i, j);
      if (i == j) {
        require(slots.empty(), "instance: self edge present");
        continue;
      }
      require(!slots.empty(), "instance: missing edge for pair (" +
                                  std::to_string(i) + "," + std::to_string(j) + ")");
      for (const auto& c : slots) {
        require(static_cast<int>(c.size()) == inst.m, "instance: cost dim != m");
        for (double v : c)
          require(std::isfinite(v) && v >= 0.0, "instance: cost not finite/>=0");
      }
    }
  }
  if (inst.capacity) {
    require(inst.depot.has_value(), "instance: capacity without depot");
    require(static_cast<int>(inst.demands.size()) == inst.n,
            "instance: demands length != n");
    for (int v = 0; v < inst.n; ++v) {
      if (v == *inst.depot) continue;
      require(inst.demands[v] >= 1 && inst.demands[v] <= 9 &&
                  inst.demands[v] <= *inst.capacity,
              "instance: demand out of range at node " + std::to_string(v));
    }
  }
  if (inst.has_windows) {
    require(static_cast<int>(inst.windows.size()) == inst.n,
            "instance: windows length != n");
    for (int v = 0; v < inst.n; ++v) {
      if (inst.depot && v == *inst.depot) continue;
      require(inst.windows[v].start < inst.windows[v].end,
              "instance: window start >= end at node " + std::to_string(v));
    }
  }
}

void save_instances(const std::string& path,
                    const std::vector<MultiGraphInstance>& instances) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), "save_instances: cannot open '" + path + "'");
  for (const auto& inst : instances) out << instance_to_json(inst) << '\n';
  require(out.good(), "save_instances: write failed for '" + path + "'");
}

std::vector<MultiGraphInstance> load_instances(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), "load_instances: cannot open '" + path + "'");
  std::vector<MultiGraphInstance> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    out.push_back(instance_from_json(line, lineno));
  }
  return out;
}

}  // namespace mgroute
