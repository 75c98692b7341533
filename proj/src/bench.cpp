#include "mgroute/bench.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>

#include <json.hpp>

#include "mgroute/neural/checkpoint.hpp"
#include "mgroute/neural/train.hpp"
#include "mgroute/problems.hpp"

namespace mgroute {

int resolve_workers(int requested) {
  if (const char* env = std::getenv("MGROUTE_WORKERS")) {
    int v = std::atoi(env);
    if (v >= 1) return v;
  }
  return requested >= 1 ? requested : 1;
}

ProblemKind infer_problem(const MultiGraphInstance& inst) {
  if (inst.has_windows) return ProblemKind::MGMOTSPTW;
  bool multi = inst.max_parallel() > 1;
  if (inst.capacity) return multi ? ProblemKind::MGMOCVRP : ProblemKind::MOCVRP;
  return multi ? ProblemKind::MGMOTSP : ProblemKind::MOTSP;
}

namespace {

int objective_dim(const MultiGraphInstance& inst, ProblemKind kind) {
  if (kind == ProblemKind::MOCVRP || kind == ProblemKind::MGMOTSPTW) return 2;
  return inst.m;
}

ParetoArchive solve_classical(const MultiGraphInstance& inst, ProblemKind kind,
                              const SolveOptions& opts) {
  SweepConfig cfg;
  cfg.max_moves = opts.max_moves;
  cfg.nn_all_starts = opts.nn_all_starts;
  if (opts.solver == "nn") {
    cfg.inner = InnerHeuristic::NN;
  } else if (opts.solver == "nn2opt") {
    cfg.inner = InnerHeuristic::NN;
    cfg.two_opt = true;
  } else if (opts.solver == "ni") {
    cfg.inner = InnerHeuristic::NI;
  } else if (opts.solver == "fi") {
    cfg.inner = InnerHeuristic::FI;
  } else {
    throw ContractError("unknown solver '" + opts.solver + "'");
  }
  auto prefs = preference_grid(objective_dim(inst, kind), opts.pref_count);
  return scalarized_sweep(inst, kind, prefs, cfg);
}

}  // namespace

ParetoArchive solve_instance(const MultiGraphInstance& inst, ProblemKind kind,
                             const SolveOptions& opts, int instance_index) {
  if (opts.solver == "moea") {
    MoeaConfig cfg = opts.moea;
    cfg.seed = Rng::stream(opts.seed, static_cast<std::uint64_t>(instance_index))
                   .next_u64();
    return nsga2_run(inst, kind, cfg);
  }
  if (opts.solver == "gms-eb" || opts.solver == "gms-dh" ||
      opts.solver == "gms-dh-simple") {
    require(!opts.checkpoint.empty(),
            "solver '" + opts.solver + "' requires --checkpoint");
    neural::Checkpoint ckpt = neural::load_checkpoint(opts.checkpoint);
    auto prefs = preference_grid(objective_dim(inst, kind), opts.pref_count);
    if (opts.solver == "gms-eb") {
      require(ckpt.model_type == "gms-eb", "checkpoint is not a gms-eb model");
      neural::GmsEb model;
      model.cfg = ckpt.cfg;
      model.params = std::move(ckpt.params);
      return neural::eval_eb_greedy(model, inst, prefs);
    }
    require(ckpt.model_type == "gms-dh", "checkpoint is not a gms-dh model");
    neural::GmsDh model;
    model.cfg = ckpt.cfg;
    model.params = std::move(ckpt.params);
    return neural::eval_dh_greedy(model, inst, prefs,
                                  opts.solver == "gms-dh-simple");
  }
  return solve_classical(inst, kind, opts);
}

namespace {

void append_edge_seq(std::string& s, const std::vector<EdgeRef>& steps) {
  s += '[';
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (i) s += ',';
    s += '[' + std::to_string(steps[i].from) + ',' + std::to_string(steps[i].to) +
         ',' + std::to_string(steps[i].slot) + ']';
  }
  s += ']';
}

void fmt_double(std::string& s, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  s += buf;
}

}  // namespace

std::string archive_to_json(int instance_index, const ParetoArchive& archive) {
  std::string s = "{\"instance\":" + std::to_string(instance_index) +
                  ",\"entries\":[";
  bool first = true;
  for (const ArchiveEntry& e : archive.entries()) {
    if (!first) s += ',';
    first = false;
    s += "{\"cost\":[";
    for (std::size_t i = 0; i < e.cost.size(); ++i) {
      if (i) s += ',';
      fmt_double(s, e.cost[i]);
    }
    s += ']';
    if (const Tour* t = std::get_if<Tour>(&e.sol)) {
      s += ",\"tour\":";
      append_edge_seq(s, t->steps);
    } else if (const RouteSet* rs = std::get_if<RouteSet>(&e.sol)) {
      s += ",\"routes\":[";
      for (std::size_t r = 0; r < rs->routes.size(); ++r) {
        if (r) s += ',';
        append_edge_seq(s, rs->routes[r]);
      }
      s += ']';
    }
    s += '}';
  }
  s += "]}";
  return s;
}

void save_archives(const std::string& path,
                   const std::vector<ParetoArchive>& archives) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), "save_archives: cannot open '" + path + "'");
  for (std::size_t i = 0; i < archives.size(); ++i)
    out << archive_to_json(static_cast<int>(i), archives[i]) << '\n';
  require(out.good(), "save_archives: write failed");
}

std::vector<std::vector<CostVector>> load_archive_costs(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), "load_archive_costs: cannot open '" + path + "'");
  std::vector<std::vector<CostVector>> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      nlohmann::json j = nlohmann::json::parse(line);
      std::vector<CostVector> costs;
      for (const auto& e : j.at("entries"))
        costs.push_back(e.at("cost").get<CostVector>());
      out.push_back(std::move(costs));
    } catch (const nlohmann::json::exception& e) {
      throw ContractError("archive parse error at line " +
                          std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

void write_manifest(const std::string& path,
                    const std::vector<std::pair<std::string, std::string>>& fields) {
  nlohmann::json j;
  for (const auto& [k, v] : fields) j[k] = v;
  std::ofstream out(path, std::ios::binary);
  require(out.good(), "write_manifest: cannot open '" + path + "'");
  out << j.dump() << '\n';
}

std::string markdown_table(const std::vector<std::string>& header,
                           const std::vector<std::vector<std::string>>& rows) {
  std::string s = "|";
  for (const auto& h : header) s += " " + h + " |";
  s += "\n|";
  for (std::size_t i = 0; i < header.size(); ++i) s += "---|";
  s += "\n";
  for (const auto& row : rows) {
    s += "|";
    for (const auto& cell : row) s += " " + cell + " |";
    s += "\n";
  }
  return s;
}

}  // namespace mgroute
