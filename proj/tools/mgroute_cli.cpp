#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "mgroute/bench.hpp"
#include "mgroute/gen.hpp"
#include "mgroute/metrics.hpp"
#include "mgroute/neural/checkpoint.hpp"
#include "mgroute/neural/train.hpp"
#include "mgroute/problems.hpp"

using namespace mgroute;

namespace {

constexpr const char* kVersion = "0.1.0";

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

GenSpec make_spec(const std::string& dist, const std::string& problem, int n,
                  int m, std::uint64_t seed) {
  GenSpec spec;
  spec.dist = parse_distribution(dist, spec.x);
  spec.problem = parse_problem(problem);
  spec.n = n;
  spec.m = spec.problem == ProblemKind::MOCVRP ? 1 : m;
  spec.seed = seed;
  spec.validate();
  return spec;
}

struct GenerateArgs {
  std::string dist = "fix2";
  std::string problem = "mgmotsp";
  int n = 10;
  int m = 2;
  int count = 200;
  std::uint64_t seed = 0;
  std::string out = "instances.jsonl";
};

int run_generate(const GenerateArgs& a) {
  GenSpec spec = make_spec(a.dist, a.problem, a.n, a.m, a.seed);
  auto t0 = std::chrono::steady_clock::now();
  auto batch = generate_batch(spec, a.count);
  save_instances(a.out, batch);
  write_manifest(a.out + ".manifest.json",
                 {{"command", "generate"},
                  {"version", kVersion},
                  {"dist", a.dist},
                  {"problem", a.problem},
                  {"n", std::to_string(spec.n)},
                  {"m", std::to_string(spec.m)},
                  {"count", std::to_string(a.count)},
                  {"seed", std::to_string(a.seed)},
                  {"rng", "splitmix64 (stream = seed, instance index)"},
                  {"wall_clock_s", std::to_string(seconds_since(t0))}});
  std::cout << "wrote " << a.count << " instances to " << a.out << "\n";
  return 0;
}

struct SolveArgs {
  std::string in;
  std::string out = "archives.jsonl";
  std::string solver = "nn";
  std::string problem;  // optional override
  std::string checkpoint;
  int prefs = 101;
  int max_moves = 0;
  bool nn_all_starts = false;
  int workers = 1;
  std::uint64_t seed = 0;
  int moea_pop = 32;
  int moea_gens = 100;
  int moea_ls = 20;
  double moea_mut = 0.5;
  double moea_cx = 0.9;
};

int run_solve(const SolveArgs& a) {
  auto instances = load_instances(a.in);
  require(!instances.empty(), "solve: no instances in '" + a.in + "'");
  ProblemKind kind = a.problem.empty() ? infer_problem(instances[0])
                                       : parse_problem(a.problem);
  SolveOptions opts;
  opts.solver = a.solver;
  opts.pref_count = a.prefs;
  opts.max_moves = a.max_moves;
  opts.nn_all_starts = a.nn_all_starts;
  opts.checkpoint = a.checkpoint;
  opts.seed = a.seed;
  opts.moea.population = a.moea_pop;
  opts.moea.generations = a.moea_gens;
  opts.moea.local_search_moves = a.moea_ls;
  opts.moea.mutation_rate = a.moea_mut;
  opts.moea.crossover_rate = a.moea_cx;

  int workers = resolve_workers(a.workers);
  auto t0 = std::chrono::steady_clock::now();
  auto archives = parallel_eval<ParetoArchive>(
      static_cast<int>(instances.size()), workers,
      [&](int i) { return solve_instance(instances[i], kind, opts, i); });
  double elapsed = seconds_since(t0);
  save_archives(a.out, archives);
  write_manifest(a.out + ".manifest.json",
                 {{"command", "solve"},
                  {"version", kVersion},
                  {"input", a.in},
                  {"solver", a.solver},
                  {"problem", problem_name(kind)},
                  {"prefs", std::to_string(a.prefs)},
                  {"max_moves", std::to_string(a.max_moves)},
                  {"nn_all_starts", a.nn_all_starts ? "true" : "false"},
                  {"checkpoint", a.checkpoint},
                  {"seed", std::to_string(a.seed)},
                  {"workers", std::to_string(workers)},
                  {"moea_pop", std::to_string(a.moea_pop)},
                  {"moea_gens", std::to_string(a.moea_gens)},
                  {"moea_ls", std::to_string(a.moea_ls)},
                  {"wall_clock_s", std::to_string(elapsed)}});
  std::cout << "solved " << instances.size() << " instances with " << a.solver
            << " in " << elapsed << "s (workers=" << workers << ")\n";
  return 0;
}

struct TrainArgs {
  std::string model = "gms-eb";
  std::string dist = "xasy";
  std::string problem = "motsp";
  int n = 10;
  int m = 2;
  int epochs = 2;
  int batches = 200;
  int batch_size = 16;
  int embed_dim = 32;
  int heads = 4;
  int layers = 2;
  int l1 = 2, l2 = 1, l3 = 1;
  double lr = 1e-4;
  int k = 0, k1 = 4, k2 = 0;
  std::string reward = "chebyshev";
  std::string score_cost = "linear";
  std::string norm = "instance";
  int hyper_hidden = 64;
  int ffn_mult = 2;
  std::uint64_t seed = 0;
  std::string curriculum;       // "size:epochs,size:epochs"
  int dh_prestage_epochs = -1;  // -1: auto (1 for multigraph gms-dh)
  int val_instances = 50;
  int val_prefs = 21;
  std::string out = "model.bin";
};

int run_train(const TrainArgs& a) {
  GenSpec target = make_spec(a.dist, a.problem, a.n, a.m, a.seed);

  neural::ModelConfig cfg;
  cfg.embed_dim = a.embed_dim;
  cfg.heads = a.heads;
  cfg.layers = a.layers;
  cfg.l1 = a.l1;
  cfg.l2 = a.l2;
  cfg.l3 = a.l3;
  cfg.hyper_hidden = a.hyper_hidden;
  cfg.ffn_mult = a.ffn_mult;
  cfg.score_cost = a.score_cost == "chebyshev" ? ScalarKind::Chebyshev
                                               : ScalarKind::Linear;
  cfg.norm = a.norm == "layer"
                 ? neural::NormKind::Layer
                 : (a.norm == "none" ? neural::NormKind::None
                                     : neural::NormKind::Instance);
  cfg.kind = target.problem;
  cfg.cost_dim = target.m;
  cfg.validate();

  neural::TrainConfig tc;
  tc.batch_size = a.batch_size;
  tc.lr = a.lr;
  tc.k_rollouts = a.k;
  tc.k1 = a.k1;
  tc.k2 = a.k2;
  tc.reward_kind =
      a.reward == "linear" ? ScalarKind::Linear : ScalarKind::Chebyshev;
  tc.seed = a.seed;
  tc.val_instances = a.val_instances;
  tc.val_prefs = a.val_prefs;

  std::vector<neural::TrainStage> stages;
  bool multigraph =
      target.dist == Distribution::Fix || target.dist == Distribution::Flex;
  int prestage = a.dh_prestage_epochs;
  if (prestage < 0) prestage = (a.model == "gms-dh" && multigraph) ? 1 : 0;
  if (a.model == "gms-dh" && prestage > 0 && multigraph) {
    // routing-head warm-up on simple graphs keeps the selection reward
    // signal accurate from the first multigraph batches
    neural::TrainStage pre;
    pre.gen = make_spec("xasy", "motsp", a.n, a.m, a.seed ^ 0x5bf03ULL);
    pre.epochs = prestage;
    pre.batches_per_epoch = a.batches;
    stages.push_back(pre);
  }
  if (!a.curriculum.empty()) {
    for (const std::string& part : split_csv(a.curriculum)) {
      auto colon = part.find(':');
      require(colon != std::string::npos,
              "train: curriculum entries are size:epochs");
      neural::TrainStage st;
      st.gen = target;
      st.gen.n = std::stoi(part.substr(0, colon));
      st.epochs = std::stoi(part.substr(colon + 1));
      st.batches_per_epoch = a.batches;
      stages.push_back(st);
    }
  } else {
    neural::TrainStage st;
    st.gen = target;
    st.epochs = a.epochs;
    st.batches_per_epoch = a.batches;
    stages.push_back(st);
  }

  auto t0 = std::chrono::steady_clock::now();
  neural::TrainHistory history;
  if (a.model == "gms-eb") {
    neural::GmsEb model = neural::GmsEb::init(cfg, a.seed);
    history = neural::curriculum_run_eb(model, stages, tc);
    neural::save_checkpoint(a.out, {"gms-eb", model.cfg, model.params});
  } else if (a.model == "gms-dh") {
    neural::GmsDh model = neural::GmsDh::init(cfg, a.seed);
    history = neural::curriculum_run_dh(model, stages, tc);
    neural::save_checkpoint(a.out, {"gms-dh", model.cfg, model.params});
  } else {
    throw ContractError("train: unknown model '" + a.model + "'");
  }
  double elapsed = seconds_since(t0);

  std::string history_path = a.out + ".history.csv";
  {
    std::ofstream h(history_path);
    h << "epoch,val_hv,mean_reward\n";
    for (std::size_t ep = 0; ep < history.epoch_val_hv.size(); ++ep)
      h << ep << ',' << history.epoch_val_hv[ep] << ','
        << history.epoch_mean_reward[ep] << '\n';
  }
  write_manifest(
      a.out + ".manifest.json",
      {{"command", "train"},
       {"version", kVersion},
       {"scale", "desk-scale"},
       {"model", a.model},
       {"dist", a.dist},
       {"problem", a.problem},
       {"n", std::to_string(a.n)},
       {"m", std::to_string(target.m)},
       {"epochs", std::to_string(a.epochs)},
       {"batches_per_epoch", std::to_string(a.batches)},
       {"batch_size", std::to_string(a.batch_size)},
       {"embed_dim", std::to_string(a.embed_dim)},
       {"heads", std::to_string(a.heads)},
       {"layers", std::to_string(a.layers)},
       {"l1_l2_l3", std::to_string(a.l1) + "," + std::to_string(a.l2) + "," +
                        std::to_string(a.l3)},
       {"lr", std::to_string(a.lr)},
       {"k_k1_k2", std::to_string(a.k) + "," + std::to_string(a.k1) + "," +
                       std::to_string(a.k2)},
       {"reward", a.reward},
       {"score_cost", a.score_cost},
       {"norm", a.norm},
       {"tanh_clip", "10"},
       {"hyper_hidden", std::to_string(a.hyper_hidden)},
       {"ideal_point", "zeros"},
       {"optimizer", "adam beta=(0.9,0.999) eps=1e-8"},
       {"init", "uniform(-1/sqrt(fan_in), +1/sqrt(fan_in))"},
       {"curriculum", a.curriculum},
       {"dh_prestage_epochs", std::to_string(prestage)},
       {"seed", std::to_string(a.seed)},
       {"wall_clock_s", std::to_string(elapsed)}});
  std::cout << "trained " << a.model << " in " << elapsed << "s; history at "
            << history_path << "\n";
  if (!history.epoch_val_hv.empty())
    std::cout << "final validation HV " << history.epoch_val_hv.back() << "\n";
  return 0;
}

struct EvalArgs {
  std::string archives;
  std::string baseline;
  std::string problem = "mgmotsp";
  std::string dist = "fix2";
  int n = 10;
  std::string ref_override;  // "r1,r2"
  std::string out = "report.csv";
  std::string markdown;
};

int run_eval(const EvalArgs& a) {
  auto t0 = std::chrono::steady_clock::now();
  auto archive_costs = load_archive_costs(a.archives);
  require(!archive_costs.empty(), "eval: no archives in '" + a.archives + "'");
  CostVector ref;
  if (!a.ref_override.empty()) {
    for (const std::string& part : split_csv(a.ref_override))
      ref.push_back(std::stod(part));
  } else {
    int dim = archive_costs[0].empty() ? 2
                                       : static_cast<int>(archive_costs[0][0].size());
    ref = hv_reference(a.problem, a.dist, a.n, dim);
  }

  std::vector<double> hvs;
  int clipped_total = 0;
  for (const auto& costs : archive_costs) {
    HvResult r = normalized_hv(costs, ref);
    hvs.push_back(r.value);
    clipped_total += r.clipped;
  }
  double mean_hv = 0.0;
  for (double v : hvs) mean_hv += v;
  mean_hv /= static_cast<double>(hvs.size());

  double baseline_mean = 0.0;
  bool have_baseline = !a.baseline.empty();
  if (have_baseline) {
    auto base_costs = load_archive_costs(a.baseline);
    require(base_costs.size() == archive_costs.size(),
            "eval: baseline instance count differs");
    for (const auto& costs : base_costs)
      baseline_mean += normalized_hv(costs, ref).value;
    baseline_mean /= static_cast<double>(base_costs.size());
  }

  {
    std::ofstream csv(a.out);
    csv << "instance,normalized_hv\n";
    for (std::size_t i = 0; i < hvs.size(); ++i)
      csv << i << ',' << hvs[i] << '\n';
    csv << "mean," << mean_hv << '\n';
  }

  // solve wall-clock from the archives' manifest, when present
  std::string solve_time = "-";
  {
    std::ifstream m(a.archives + ".manifest.json");
    if (m.good()) {
      std::string line;
      std::getline(m, line);
      auto at = line.find("\"wall_clock_s\":\"");
      if (at != std::string::npos) {
        auto rest = line.substr(at + 16);
        solve_time = rest.substr(0, rest.find('"')) + "s";
      }
    }
  }

  char hv_s[32], gap_s[32];
  std::snprintf(hv_s, sizeof hv_s, "%.4f", mean_hv);
  std::string gap = "-";
  if (have_baseline && baseline_mean > 0.0) {
    double best = std::max(mean_hv, baseline_mean);
    std::snprintf(gap_s, sizeof gap_s, "%.2f%%", hv_gap(mean_hv, best));
    gap = gap_s;
  }
  std::string table = markdown_table({"Method", "HV", "Gap", "Time"},
                                     {{a.archives, hv_s, gap, solve_time}});
  if (!a.markdown.empty()) {
    std::ofstream md(a.markdown);
    md << table;
  }
  std::cout << table;
  if (clipped_total > 0)
    std::cout << "warning: " << clipped_total
              << " points beyond the reference were clipped\n";
  write_manifest(a.out + ".manifest.json",
                 {{"command", "eval"},
                  {"version", kVersion},
                  {"archives", a.archives},
                  {"baseline", a.baseline},
                  {"problem", a.problem},
                  {"dist", a.dist},
                  {"n", std::to_string(a.n)},
                  {"ref_override", a.ref_override},
                  {"mean_hv", std::to_string(mean_hv)},
                  {"wall_clock_s", std::to_string(seconds_since(t0))}});
  return 0;
}

struct BenchArgs {
  std::string dists = "fix2";
  std::string sizes = "10";
  std::string solvers = "nn,nn2opt";
  std::string problem = "mgmotsp";
  int count = 200;
  int prefs = 101;
  int workers = 1;
  std::uint64_t seed = 0;
  std::string out_dir = "bench_out";
  std::string checkpoint;
  int moea_gens = 100;
};

int run_bench(const BenchArgs& a) {
  std::vector<std::vector<std::string>> rows;
  std::string csv = "dist,n,solver,mean_hv,wall_clock_s\n";
  for (const std::string& dist : split_csv(a.dists)) {
    for (const std::string& size_s : split_csv(a.sizes)) {
      int n = std::stoi(size_s);
      std::string tag = dist + "-" + size_s;
      GenerateArgs g;
      g.dist = dist;
      g.problem = a.problem;
      g.n = n;
      g.count = a.count;
      g.seed = a.seed;
      g.out = a.out_dir + "/" + tag + ".jsonl";
      run_generate(g);
      double best_hv = 0.0;
      std::vector<std::pair<std::string, std::pair<double, double>>> results;
      for (const std::string& solver : split_csv(a.solvers)) {
        SolveArgs s;
        s.in = g.out;
        s.out = a.out_dir + "/" + tag + "." + solver + ".jsonl";
        s.solver = solver;
        s.prefs = a.prefs;
        s.workers = a.workers;
        s.seed = a.seed;
        s.checkpoint = a.checkpoint;
        s.moea_gens = a.moea_gens;
        auto t0 = std::chrono::steady_clock::now();
        run_solve(s);
        double elapsed = seconds_since(t0);
        auto costs = load_archive_costs(s.out);
        CostVector ref = hv_reference(a.problem, dist, n,
                                      static_cast<int>(costs[0][0].size()));
        double mean_hv = 0.0;
        for (const auto& c : costs) mean_hv += normalized_hv(c, ref).value;
        mean_hv /= static_cast<double>(costs.size());
        best_hv = std::max(best_hv, mean_hv);
        results.push_back({solver, {mean_hv, elapsed}});
      }
      for (const auto& [solver, hv_time] : results) {
        char hv_s[32], gap_s[32], t_s[32];
        std::snprintf(hv_s, sizeof hv_s, "%.4f", hv_time.first);
        std::snprintf(gap_s, sizeof gap_s, "%.2f%%",
                      best_hv > 0 ? hv_gap(hv_time.first, best_hv) : 0.0);
        std::snprintf(t_s, sizeof t_s, "%.2fs", hv_time.second);
        rows.push_back({tag, solver, hv_s, gap_s, t_s});
        csv += dist + "," + size_s + "," + solver + "," + hv_s + "," + t_s + "\n";
      }
    }
  }
  std::string table =
      markdown_table({"Instance", "Method", "HV", "Gap", "Time"}, rows);
  std::cout << table;
  {
    std::ofstream md(a.out_dir + "/report.md");
    md << table;
    std::ofstream c(a.out_dir + "/report.csv");
    c << csv;
  }
  write_manifest(a.out_dir + "/bench.manifest.json",
                 {{"command", "bench"},
                  {"version", kVersion},
                  {"dists", a.dists},
                  {"sizes", a.sizes},
                  {"solvers", a.solvers},
                  {"problem", a.problem},
                  {"count", std::to_string(a.count)},
                  {"prefs", std::to_string(a.prefs)},
                  {"seed", std::to_string(a.seed)}});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multi-objective multigraph routing workbench"};
  app.require_subcommand(1);

  GenerateArgs g;
  auto* gen_cmd = app.add_subcommand("generate", "generate instance files");
  gen_cmd->add_option("--dist", g.dist, "euc|tmat|xasy|fixX|flexX");
  gen_cmd->add_option("--problem", g.problem,
                      "motsp|mocvrp|mgmotsp|mgmocvrp|mgmotsptw");
  gen_cmd->add_option("--n", g.n, "node count");
  gen_cmd->add_option("--m", g.m, "objective count");
  gen_cmd->add_option("--count", g.count, "instance count");
  gen_cmd->add_option("--seed", g.seed, "base seed");
  gen_cmd->add_option("--out", g.out, "output JSONL path");

  SolveArgs s;
  auto* solve_cmd = app.add_subcommand("solve", "solve an instance file");
  solve_cmd->add_option("--in", s.in, "instance JSONL")->required();
  solve_cmd->add_option("--out", s.out, "archive JSONL output");
  solve_cmd->add_option("--solver", s.solver,
                        "nn|ni|fi|nn2opt|moea|gms-eb|gms-dh|gms-dh-simple");
  solve_cmd->add_option("--problem", s.problem, "override problem kind");
  solve_cmd->add_option("--checkpoint", s.checkpoint, "model checkpoint");
  solve_cmd->add_option("--prefs", s.prefs, "preference count");
  solve_cmd->add_option("--max-moves", s.max_moves, "2-opt move budget");
  solve_cmd->add_flag("--nn-all-starts", s.nn_all_starts,
                      "sweep all NN start nodes");
  solve_cmd->add_option("--workers", s.workers, "parallel workers");
  solve_cmd->add_option("--seed", s.seed, "solver seed");
  solve_cmd->add_option("--moea-pop", s.moea_pop, "MOEA population");
  solve_cmd->add_option("--moea-gens", s.moea_gens, "MOEA generations");
  solve_cmd->add_option("--moea-ls", s.moea_ls, "MOEA local-search moves");
  solve_cmd->add_option("--moea-mut", s.moea_mut, "MOEA mutation rate");
  solve_cmd->add_option("--moea-cx", s.moea_cx, "MOEA crossover rate");

  TrainArgs t;
  auto* train_cmd = app.add_subcommand("train", "train a model (desk scale)");
  train_cmd->add_option("--model", t.model, "gms-eb|gms-dh");
  train_cmd->add_option("--dist", t.dist, "training distribution");
  train_cmd->add_option("--problem", t.problem, "problem kind");
  train_cmd->add_option("--n", t.n, "node count");
  train_cmd->add_option("--m", t.m, "objective count");
  train_cmd->add_option("--epochs", t.epochs, "epochs (single stage)");
  train_cmd->add_option("--batches", t.batches, "batches per epoch");
  train_cmd->add_option("--batch-size", t.batch_size, "instances per batch");
  train_cmd->add_option("--embed-dim", t.embed_dim, "embedding dimension");
  train_cmd->add_option("--heads", t.heads, "attention heads");
  train_cmd->add_option("--layers", t.layers, "GMS-EB encoder layers");
  train_cmd->add_option("--l1", t.l1, "GMS-DH shared layers");
  train_cmd->add_option("--l2", t.l2, "GMS-DH node transformer layers");
  train_cmd->add_option("--l3", t.l3, "GMS-DH selection layers");
  train_cmd->add_option("--lr", t.lr, "learning rate");
  train_cmd->add_option("--k", t.k, "EB rollouts (0: problem size)");
  train_cmd->add_option("--k1", t.k1, "DH selections per instance");
  train_cmd->add_option("--k2", t.k2, "DH tours per selection (0: size)");
  train_cmd->add_option("--reward", t.reward, "chebyshev|linear");
  train_cmd->add_option("--score-cost", t.score_cost,
                        "cost scalarization inside scores");
  train_cmd->add_option("--norm", t.norm, "instance|layer|none");
  train_cmd->add_option("--hyper-hidden", t.hyper_hidden, "hypernet width");
  train_cmd->add_option("--ffn-mult", t.ffn_mult, "FFN width multiplier");
  train_cmd->add_option("--seed", t.seed, "training seed");
  train_cmd->add_option("--curriculum", t.curriculum,
                        "stages as size:epochs,size:epochs");
  train_cmd->add_option("--dh-prestage-epochs", t.dh_prestage_epochs,
                        "simple-graph warm-up epochs (-1: auto)");
  train_cmd->add_option("--val-instances", t.val_instances, "validation size");
  train_cmd->add_option("--val-prefs", t.val_prefs, "validation preferences");
  train_cmd->add_option("--out", t.out, "checkpoint path");

  EvalArgs e;
  auto* eval_cmd = app.add_subcommand("eval", "hypervolume report for archives");
  eval_cmd->add_option("--archives", e.archives, "archive JSONL")->required();
  eval_cmd->add_option("--baseline", e.baseline, "baseline archive JSONL");
  eval_cmd->add_option("--problem", e.problem, "problem for reference preset");
  eval_cmd->add_option("--dist", e.dist, "distribution for reference preset");
  eval_cmd->add_option("--n", e.n, "node count for reference preset");
  eval_cmd->add_option("--ref", e.ref_override, "explicit reference r1,r2[,r3]");
  eval_cmd->add_option("--out", e.out, "CSV output");
  eval_cmd->add_option("--markdown", e.markdown, "Markdown table output");

  BenchArgs b;
  auto* bench_cmd = app.add_subcommand("bench", "matrix of dist x size x solver");
  bench_cmd->set_config("--config", "", "TOML config for these options");
  bench_cmd->add_option("--dists", b.dists, "comma-separated distributions");
  bench_cmd->add_option("--sizes", b.sizes, "comma-separated node counts");
  bench_cmd->add_option("--solvers", b.solvers, "comma-separated solvers");
  bench_cmd->add_option("--problem", b.problem, "problem kind");
  bench_cmd->add_option("--count", b.count, "instances per cell");
  bench_cmd->add_option("--prefs", b.prefs, "preference count");
  bench_cmd->add_option("--workers", b.workers, "parallel workers");
  bench_cmd->add_option("--seed", b.seed, "base seed");
  bench_cmd->add_option("--out-dir", b.out_dir, "output directory");
  bench_cmd->add_option("--checkpoint", b.checkpoint, "checkpoint for gms-*");
  bench_cmd->add_option("--moea-gens", b.moea_gens, "MOEA generations");

  CLI11_PARSE(app, argc, argv);
  try {
    if (gen_cmd->parsed()) return run_generate(g);
    if (solve_cmd->parsed()) return run_solve(s);
    if (train_cmd->parsed()) return run_train(t);
    if (eval_cmd->parsed()) return run_eval(e);
    if (bench_cmd->parsed()) return run_bench(b);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
  return 0;
}
