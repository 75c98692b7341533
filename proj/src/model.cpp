#include "mgroute/neural/model.hpp"

#include <algorithm>
#include <cmath>

#include "mgroute/problems.hpp"
#include "mgroute/prune.hpp"

namespace mgroute::neural {

int ModelConfig::feature_dim() const {
  switch (kind) {
    case ProblemKind::MOTSP:
    case ProblemKind::MGMOTSP:
      return cost_dim;
    case ProblemKind::MOCVRP:
    case ProblemKind::MGMOCVRP:
      return cost_dim + 1;  // + successor demand
    case ProblemKind::MGMOTSPTW:
      return cost_dim + 2;  // + successor window (start, end)
  }
  return cost_dim;
}

void ModelConfig::validate() const {
  require(embed_dim >= 2 && heads >= 1, "ModelConfig: bad dims");
  require(embed_dim % heads == 0, "ModelConfig: embed_dim % heads != 0");
  require(embed_dim % (2 * heads) == 0,
          "ModelConfig: embed_dim must be divisible by 2*heads");
  require(layers >= 1 && l1 >= 2 && l2 >= 1 && l3 >= 1,
          "ModelConfig: layer counts");
  require(tanh_clip > 0.0, "ModelConfig: tanh_clip must be positive");
  require(hyper_hidden >= 1 && ffn_mult >= 1, "ModelConfig: sizes");
}

namespace {

// objective dimension (= preference dimension); MOCVRP's pair is
// (total, makespan) even though edges carry one feature
int objective_dim(const ModelConfig& cfg) {
  if (cfg.kind == ProblemKind::MOCVRP) return 2;
  if (cfg.kind == ProblemKind::MGMOTSPTW) return 2;
  return cfg.cost_dim;
}

// cost term subtracted inside pointer scores; falls back to the plain sum
// when edge features and preference dimensions differ (MOCVRP)
double score_cost(const CostVector& c, const Preference& pref,
                  const ModelConfig& cfg) {
  if (c.size() == pref.dim()) {
    if (cfg.score_cost == ScalarKind::Linear) {
      double s = 0.0;
      for (std::size_t i = 0; i < c.size(); ++i) s += pref[i] * c[i];
      return s;
    }
    double s = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i)
      s = std::max(s, pref[i] * std::fabs(c[i]));
    return s;
  }
  double s = 0.0;
  for (double v : c) s += v;
  return s;
}

double tw_horizon(const MultiGraphInstance& inst) { return 0.5 * inst.n; }

}  // namespace

Tensor& ParameterSet::at(const std::string& path) {
  auto it = params.find(path);
  require(it != params.end(), "ParameterSet: unknown path '" + path + "'");
  return it->second;
}

const Tensor& ParameterSet::at(const std::string& path) const {
  auto it = params.find(path);
  require(it != params.end(), "ParameterSet: unknown path '" + path + "'");
  return it->second;
}

std::size_t ParameterSet::total_values() const {
  std::size_t total = 0;
  for (const auto& [path, t] : params) total += t.size();
  return total;
}

Var ParamContext::operator()(const std::string& path) {
  auto it = leaves_.find(path);
  if (it != leaves_.end()) return it->second;
  Var v = tape_.leaf(ps_.at(path));
  leaves_.emplace(path, v);
  return v;
}

void ParamContext::accumulate_grads(std::map<std::string, Tensor>& grads) const {
  for (const auto& [path, var] : leaves_) {
    const Tensor& g = tape_.grad(var);
    if (g.rows == 0) continue;  // parameter untouched by the loss
    auto it = grads.find(path);
    if (it == grads.end()) {
      grads.emplace(path, g);
    } else {
      require(it->second.same_shape(g), "grad shape mismatch at " + path);
      for (std::size_t i = 0; i < g.size(); ++i)
        it->second.data[i] += g.data[i];
    }
  }
}

EdgeIndex EdgeIndex::build(const MultiGraphInstance& inst) {
  EdgeIndex ei;
  ei.n = inst.n;
  ei.pair_offset.assign(static_cast<std::size_t>(inst.n) * inst.n, -1);
  ei.pair_count.assign(static_cast<std::size_t>(inst.n) * inst.n, 0);
  ei.out_edges.resize(static_cast<std::size_t>(inst.n));
  ei.in_edges.resize(static_cast<std::size_t>(inst.n));
  int id = 0;
  for (int i = 0; i < inst.n; ++i)
    for (int j = 0; j < inst.n; ++j) {
      if (i == j) continue;
      const auto& slots = inst.pair_slots(i, j);
      ei.pair_offset[static_cast<std::size_t>(i) * inst.n + j] = id;
      ei.pair_count[static_cast<std::size_t>(i) * inst.n + j] =
          static_cast<int>(slots.size());
      for (int s = 0; s < static_cast<int>(slots.size()); ++s) {
        ei.from.push_back(i);
        ei.to.push_back(j);
        ei.slot.push_back(s);
        ei.out_edges[i].push_back(id);
        ei.in_edges[j].push_back(id);
        ++id;
      }
    }
  ei.total = id;
  return ei;
}

Tensor edge_features(const MultiGraphInstance& inst, const EdgeIndex& ei,
                     const ModelConfig& cfg) {
  const int f = cfg.feature_dim();
  Tensor feat(ei.total, f);
  const double horizon = tw_horizon(inst);
  for (int e = 0; e < ei.total; ++e) {
    const CostVector& c = inst.pair_slots(ei.from[e], ei.to[e])[ei.slot[e]];
    int at = 0;
    for (int k = 0; k < cfg.cost_dim; ++k) feat.at(e, at++) = c[k];
    if (cfg.kind == ProblemKind::MOCVRP || cfg.kind == ProblemKind::MGMOCVRP) {
      double cap = static_cast<double>(inst.capacity.value_or(1));
      feat.at(e, at++) = inst.demands.empty()
                             ? 0.0
                             : inst.demands[ei.to[e]] / cap;
    } else if (cfg.kind == ProblemKind::MGMOTSPTW) {
      int to = ei.to[e];
      if (inst.depot && to == *inst.depot) {
        feat.at(e, at++) = 0.0;
        feat.at(e, at++) = 1.0;
      } else {
        feat.at(e, at++) = inst.windows[to].start / horizon;
        feat.at(e, at++) = inst.windows[to].end / horizon;
      }
    }
  }
  return feat;
}

namespace {

Var apply_norm(Tape& tape, const ModelConfig& cfg, Var x) {
  switch (cfg.norm) {
    case NormKind::Instance: return tape.instance_norm(x);
    case NormKind::Layer: return tape.layer_norm(x);
    case NormKind::None: return x;
  }
  return x;
}

// Attention over one edge set: query from the set mean, per-head softmax,
// value half-width d/2. Returns [1, d/2]; empty sets cannot occur on
// complete multigraphs.
Var set_attention(ParamContext& ctx, const ModelConfig& cfg,
                  const std::string& prefix, Var edge_emb,
                  const std::vector<int>& set) {
  Tape& tape = ctx.tape();
  const int dh = cfg.head_dim();
  const int vh = cfg.embed_dim / (2 * cfg.heads);
  Var gathered = tape.gather_rows(edge_emb, set);
  Var query = tape.matmul(tape.mean_rows(gathered), ctx(prefix + ".wq"));
  Var keys = tape.matmul(gathered, ctx(prefix + ".wk"));
  Var values = tape.matmul(gathered, ctx(prefix + ".wv"));
  Var out;
  for (int h = 0; h < cfg.heads; ++h) {
    Var qh = tape.slice_cols(query, h * dh, (h + 1) * dh);
    Var kh = tape.slice_cols(keys, h * dh, (h + 1) * dh);
    Var scores = tape.scale(tape.matmul(kh, tape.transpose(qh)),
                            1.0 / std::sqrt(static_cast<double>(dh)));
    Var alpha = tape.softmax(scores);
    Var vh_slice = tape.slice_cols(values, h * vh, (h + 1) * vh);
    Var oh = tape.matmul(tape.transpose(alpha), vh_slice);
    out = out.valid() ? tape.concat_cols(out, oh) : oh;
  }
  return out;
}

}  // namespace

Var great_aggregate_nodes(ParamContext& ctx, const ModelConfig& cfg,
                          const std::string& prefix,
                          const std::vector<std::vector<int>>& out_sets,
                          const std::vector<std::vector<int>>& in_sets,
                          Var edge_emb) {
  Tape& tape = ctx.tape();
  std::vector<Var> rows;
  rows.reserve(out_sets.size());
  for (std::size_t i = 0; i < out_sets.size(); ++i) {
    Var out_half = set_attention(ctx, cfg, prefix + ".att_out", edge_emb, out_sets[i]);
    Var in_half = set_attention(ctx, cfg, prefix + ".att_in", edge_emb, in_sets[i]);
    rows.push_back(tape.concat_cols(out_half, in_half));
  }
  return tape.concat_rows(rows);
}

Var great_layer(ParamContext& ctx, const ModelConfig& cfg, const EdgeIndex& ei,
                const std::string& prefix, Var edge_emb) {
  Tape& tape = ctx.tape();
  Var x = great_aggregate_nodes(ctx, cfg, prefix, ei.out_edges, ei.in_edges,
                                edge_emb);
  // re-expand node features to edges: e'_l = (x_start || x_end) W2
  Var x_start = tape.gather_rows(x, ei.from);
  Var x_end = tape.gather_rows(x, ei.to);
  Var expanded =
      tape.matmul(tape.concat_cols(x_start, x_end), ctx(prefix + ".w2"));
  Var e = apply_norm(tape, cfg, tape.add(edge_emb, expanded));
  Var ffn = tape.matmul(tape.relu(tape.matmul(e, ctx(prefix + ".ffn.w1"))),
                        ctx(prefix + ".ffn.w2"));
  return apply_norm(tape, cfg, tape.add(e, ffn));
}

Var transformer_layer(ParamContext& ctx, const ModelConfig& cfg,
                      const std::string& prefix, Var node_emb) {
  Tape& tape = ctx.tape();
  const int dh = cfg.head_dim();
  Var q_all = tape.matmul(node_emb, ctx(prefix + ".attn.wq"));
  Var k_all = tape.matmul(node_emb, ctx(prefix + ".attn.wk"));
  Var v_all = tape.matmul(node_emb, ctx(prefix + ".attn.wv"));
  Var heads;
  for (int h = 0; h < cfg.heads; ++h) {
    Var qh = tape.slice_cols(q_all, h * dh, (h + 1) * dh);
    Var kh = tape.slice_cols(k_all, h * dh, (h + 1) * dh);
    Var vh = tape.slice_cols(v_all, h * dh, (h + 1) * dh);
    Var scores = tape.scale(tape.matmul(qh, tape.transpose(kh)),
                            1.0 / std::sqrt(static_cast<double>(dh)));
    Var attn = tape.matmul(tape.softmax_rows(scores), vh);
    heads = heads.valid() ? tape.concat_cols(heads, attn) : attn;
  }
  Var mixed = tape.matmul(heads, ctx(prefix + ".attn.wo"));
  Var x = apply_norm(tape, cfg, tape.add(node_emb, mixed));
  Var ffn = tape.matmul(tape.relu(tape.matmul(x, ctx(prefix + ".ffn.w1"))),
                        ctx(prefix + ".ffn.w2"));
  return apply_norm(tape, cfg, tape.add(x, ffn));
}

Var hypernet_forward(ParamContext& ctx, const ModelConfig& cfg,
                     const std::string& prefix, const Preference& pref) {
  Tape& tape = ctx.tape();
  Tensor lambda(1, static_cast<int>(pref.dim()));
  for (std::size_t i = 0; i < pref.dim(); ++i) lambda.data[i] = pref[i];
  Var h = tape.constant(std::move(lambda));
  h = tape.tanh(tape.matmul(h, ctx(prefix + ".w0")));
  h = tape.tanh(tape.matmul(h, ctx(prefix + ".w1")));
  return tape.matmul(h, ctx(prefix + ".w2"));
}

Var mp_scores(Tape& tape, const ModelConfig& cfg, Var query, Var keys,
              const std::vector<Var>& wq, const std::vector<Var>& wk,
              const std::vector<double>& scalar_costs) {
  Var acc;
  for (int h = 0; h < cfg.heads; ++h) {
    Var qh = tape.matmul(query, wq[h]);
    Var kh = tape.matmul(keys, wk[h]);
    Var s = tape.matmul(kh, tape.transpose(qh));
    acc = acc.valid() ? tape.add(acc, s) : s;
  }
  // d_k is the key embedding dimension
  acc = tape.scale(acc, 1.0 / (cfg.heads *
                               std::sqrt(static_cast<double>(cfg.embed_dim))));
  Tensor costs(static_cast<int>(scalar_costs.size()), 1);
  for (std::size_t i = 0; i < scalar_costs.size(); ++i)
    costs.data[i] = -scalar_costs[i];
  return tape.add_tensor(acc, costs);
}

// ---------------------------------------------------------------------------
// parameter initialization

namespace {

void init_great_layer(ParameterSet& ps, const ModelConfig& cfg,
                      const std::string& prefix, Rng& rng) {
  const int d = cfg.embed_dim;
  for (const char* tag : {".att_out", ".att_in"}) {
    ps.params.emplace(prefix + tag + ".wq", Tensor::init_uniform(d, d, rng));
    ps.params.emplace(prefix + tag + ".wk", Tensor::init_uniform(d, d, rng));
    ps.params.emplace(prefix + tag + ".wv",
                      Tensor::init_uniform(d, d / 2, rng));
  }
  ps.params.emplace(prefix + ".w2", Tensor::init_uniform(2 * d, d, rng));
  ps.params.emplace(prefix + ".ffn.w1",
                    Tensor::init_uniform(d, cfg.ffn_mult * d, rng));
  ps.params.emplace(prefix + ".ffn.w2",
                    Tensor::init_uniform(cfg.ffn_mult * d, d, rng));
}

void init_transformer_layer(ParameterSet& ps, const ModelConfig& cfg,
                            const std::string& prefix, Rng& rng) {
  const int d = cfg.embed_dim;
  ps.params.emplace(prefix + ".attn.wq", Tensor::init_uniform(d, d, rng));
  ps.params.emplace(prefix + ".attn.wk", Tensor::init_uniform(d, d, rng));
  ps.params.emplace(prefix + ".attn.wv", Tensor::init_uniform(d, d, rng));
  ps.params.emplace(prefix + ".attn.wo", Tensor::init_uniform(d, d, rng));
  ps.params.emplace(prefix + ".ffn.w1",
                    Tensor::init_uniform(d, cfg.ffn_mult * d, rng));
  ps.params.emplace(prefix + ".ffn.w2",
                    Tensor::init_uniform(cfg.ffn_mult * d, d, rng));
}

void init_hypernet(ParameterSet& ps, const ModelConfig& cfg,
                   const std::string& prefix, int out_size, Rng& rng) {
  ps.params.emplace(prefix + ".w0",
                    Tensor::init_uniform(objective_dim(cfg), cfg.hyper_hidden, rng));
  ps.params.emplace(prefix + ".w1",
                    Tensor::init_uniform(cfg.hyper_hidden, cfg.hyper_hidden, rng));
  ps.params.emplace(prefix + ".w2",
                    Tensor::init_uniform(cfg.hyper_hidden, out_size, rng));
}

struct MpSlices {
  int d, dh, heads;
  bool ctx_row;
  int total() const {
    return 4 * d * d + 2 * heads * d * dh + (ctx_row ? d : 0);
  }
};

MpSlices mp_slices(const ModelConfig& cfg) {
  return {cfg.embed_dim, cfg.head_dim(), cfg.heads, cfg.needs_context_scalar()};
}

MpWeights slice_mp_weights(Tape& tape, const ModelConfig& cfg, Var flat) {
  MpSlices s = mp_slices(cfg);
  int at = 0;
  auto take = [&](int rows, int cols) {
    Var v = tape.reshape(tape.slice_cols(flat, at, at + rows * cols), rows, cols);
    at += rows * cols;
    return v;
  };
  MpWeights w;
  w.w1 = take(s.d, s.d);
  w.w2 = take(s.d, s.d);
  w.w3 = take(s.d, s.d);
  w.w4 = take(s.d, s.d);
  for (int h = 0; h < s.heads; ++h) w.wq.push_back(take(s.d, s.dh));
  for (int h = 0; h < s.heads; ++h) w.wk.push_back(take(s.d, s.dh));
  if (s.ctx_row) w.w_ctx = take(1, s.d);
  return w;
}

SelWeights slice_sel_weights(Tape& tape, const ModelConfig& cfg, Var flat) {
  const int d = cfg.embed_dim;
  const int dh = cfg.head_dim();
  int at = 0;
  auto take = [&](int rows, int cols) {
    Var v = tape.reshape(tape.slice_cols(flat, at, at + rows * cols), rows, cols);
    at += rows * cols;
    return v;
  };
  SelWeights w;
  for (int h = 0; h < cfg.heads; ++h) w.wq.push_back(take(d, dh));
  for (int h = 0; h < cfg.heads; ++h) w.wk.push_back(take(d, dh));
  return w;
}

int sample_index(const Tensor& log_probs, Rng& rng) {
  double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t i = 0; i < log_probs.size(); ++i) {
    acc += std::exp(log_probs.data[i]);
    if (u < acc) return static_cast<int>(i);
  }
  return static_cast<int>(log_probs.size()) - 1;
}

int argmax_index(const Tensor& log_probs) {
  int best = 0;
  for (std::size_t i = 1; i < log_probs.size(); ++i)
    if (log_probs.data[i] > log_probs.data[best]) best = static_cast<int>(i);
  return best;
}

std::vector<double> probs_of(const Tensor& log_probs) {
  std::vector<double> p(log_probs.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::exp(log_probs.data[i]);
  return p;
}

}  // namespace

// ---------------------------------------------------------------------------
// GMS-EB

std::size_t GmsEb::hyper_out_size() const {
  return static_cast<std::size_t>(mp_slices(cfg).total());
}

GmsEb GmsEb::init(const ModelConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  GmsEb model;
  model.cfg = cfg;
  Rng rng(seed);
  model.params.params.emplace(
      "embed.w", Tensor::init_uniform(cfg.feature_dim(), cfg.embed_dim, rng));
  for (int l = 0; l < cfg.layers; ++l)
    init_great_layer(model.params, cfg, "enc.l" + std::to_string(l), rng);
  init_hypernet(model.params, cfg, "hyper",
                static_cast<int>(model.hyper_out_size()), rng);
  return model;
}

Var GmsEb::encode(ParamContext& ctx, const MultiGraphInstance& inst,
                  const EdgeIndex& ei) const {
  Tape& tape = ctx.tape();
  Var e = tape.matmul(tape.constant(edge_features(inst, ei, cfg)),
                      ctx("embed.w"));
  for (int l = 0; l < cfg.layers; ++l)
    e = great_layer(ctx, cfg, ei, "enc.l" + std::to_string(l), e);
  return e;
}

MpWeights GmsEb::decoder_weights(ParamContext& ctx, const Preference& pref) const {
  Var flat = hypernet_forward(ctx, cfg, "hyper", pref);
  return slice_mp_weights(ctx.tape(), cfg, flat);
}

std::vector<Rollout> GmsEb::rollout(ParamContext& ctx,
                                    const MultiGraphInstance& inst,
                                    const EdgeIndex& ei, Var edge_emb,
                                    const Preference& pref, DecodeMode mode,
                                    int K, Rng& rng,
                                    const std::vector<Solution>* forced) const {
  require(K >= 1, "rollout_eb: K must be >= 1");
  require(pref.dim() == static_cast<std::size_t>(objective_dim(cfg)),
          "rollout_eb: preference dimension mismatch");
  Tape& tape = ctx.tape();
  const int n = inst.n;
  const bool cvrp =
      cfg.kind == ProblemKind::MOCVRP || cfg.kind == ProblemKind::MGMOCVRP;
  const bool tw = cfg.kind == ProblemKind::MGMOTSPTW;
  const int depot = inst.depot.value_or(0);
  const double horizon = tw_horizon(inst);

  MpWeights w = decoder_weights(ctx, pref);
  Var graph_term = tape.scale(tape.matmul(tape.sum_rows(edge_emb), w.w3),
                              1.0 / n);

  // scalar score costs per edge id
  std::vector<double> edge_cost(static_cast<std::size_t>(ei.total));
  for (int e = 0; e < ei.total; ++e)
    edge_cost[e] = score_cost(inst.pair_slots(ei.from[e], ei.to[e])[ei.slot[e]],
                              pref, cfg);

  auto best_out_edge = [&](int node, const std::vector<bool>& visited) {
    int best = -1;
    for (int e : ei.out_edges[node]) {
      if (visited[ei.to[e]]) continue;
      if (best < 0 || edge_cost[e] < edge_cost[best]) best = e;
    }
    return best;
  };

  std::vector<Rollout> rollouts;
  rollouts.reserve(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k) {
    const Solution* replay = forced ? &(*forced)[k] : nullptr;
    std::vector<int> replay_edges;
    if (replay) {
      if (const Tour* t = std::get_if<Tour>(replay)) {
        for (const EdgeRef& e : t->steps)
          replay_edges.push_back(ei.edge_id(e.from, e.to, e.slot));
      } else {
        const RouteSet& rs = std::get<RouteSet>(*replay);
        for (const auto& route : rs.routes)
          for (const EdgeRef& e : route)
            replay_edges.push_back(ei.edge_id(e.from, e.to, e.slot));
      }
    }

    std::vector<bool> visited(static_cast<std::size_t>(n), false);
    std::vector<int> chosen_edges;
    std::vector<std::vector<double>> step_probs;
    Var log_prob;
    double log_prob_value = 0.0;

    const int start = tw || cvrp ? depot : k % n;
    visited[start] = true;

    // forced first step: linear-best outgoing edge (CVRP: toward the k-th
    // customer for POMO diversity)
    int first_edge;
    if (cvrp) {
      std::vector<int> customers;
      for (int v = 0; v < n; ++v)
        if (v != depot) customers.push_back(v);
      int target = customers[k % customers.size()];
      int off = ei.pair_offset[static_cast<std::size_t>(start) * n + target];
      first_edge = off;
      for (int s = 1; s < ei.pair_count[static_cast<std::size_t>(start) * n + target]; ++s)
        if (edge_cost[off + s] < edge_cost[first_edge]) first_edge = off + s;
    } else {
      first_edge = best_out_edge(start, visited);
    }
    if (replay) first_edge = replay_edges[0];
    chosen_edges.push_back(first_edge);
    visited[ei.to[first_edge]] = true;
    int cur = ei.to[first_edge];
    double now = tw ? inst.pair_slots(ei.from[first_edge], cur)[ei.slot[first_edge]][0]
                    : 0.0;
    int load = 0;
    int served = 1;
    if (cvrp) {
      load = *inst.capacity - inst.demands[cur];
      if (cur == depot) --served;
    }

    Var e_first = tape.gather_rows(edge_emb, {first_edge});
    Var first_term = tape.matmul(e_first, w.w1);
    Var visited_sum = e_first;

    auto feasible_targets = [&]() {
      std::vector<int> targets;
      if (cvrp) {
        for (int v = 0; v < n; ++v)
          if (!visited[v] && v != depot && inst.demands[v] <= load)
            targets.push_back(v);
        if (served == n - 1) return std::vector<int>{depot};
        if (cur != depot) targets.push_back(depot);
        return targets;
      }
      for (int v = 0; v < n; ++v)
        if (!visited[v]) targets.push_back(v);
      if (targets.empty()) targets.push_back(start);  // closing leg
      return targets;
    };

    for (;;) {
      if (cvrp && served == n - 1 && cur == depot) break;
      std::vector<int> targets = feasible_targets();

      std::vector<int> cand;
      for (int v : targets) {
        int off = ei.pair_offset[static_cast<std::size_t>(cur) * n + v];
        int cnt = ei.pair_count[static_cast<std::size_t>(cur) * n + v];
        for (int s = 0; s < cnt; ++s) cand.push_back(off + s);
      }
      require(!cand.empty(), "rollout_eb: no feasible edge");

      int pick_idx;
      if (cand.size() == 1) {
        pick_idx = 0;
        step_probs.push_back({1.0});
      } else {
        Var e_last = tape.gather_rows(edge_emb, {chosen_edges.back()});
        Var q = tape.add(tape.add(first_term, tape.matmul(e_last, w.w2)),
                         tape.add(graph_term,
                                  tape.scale(tape.matmul(visited_sum, w.w4),
                                             1.0 / n)));
        if (cfg.needs_context_scalar()) {
          double ctx_val = cvrp ? static_cast<double>(load) /
                                      *inst.capacity
                                : now / horizon;
          q = tape.add(q, tape.scale(w.w_ctx, ctx_val));
        }
        Var keys = tape.gather_rows(edge_emb, cand);
        std::vector<double> costs;
        costs.reserve(cand.size());
        for (int e : cand) costs.push_back(edge_cost[e]);
        Var alpha = mp_scores(tape, cfg, q, keys, w.wq, w.wk, costs);
        Var logits = tape.scale(tape.tanh(alpha), cfg.tanh_clip);
        Var lp = tape.log_softmax(logits);
        Tensor lp_val = tape.value(lp);  // copy: ops below may reallocate the tape
        step_probs.push_back(probs_of(lp_val));
        if (replay) {
          int want = replay_edges[chosen_edges.size()];
          pick_idx = -1;
          for (std::size_t i = 0; i < cand.size(); ++i)
            if (cand[i] == want) pick_idx = static_cast<int>(i);
          require(pick_idx >= 0, "rollout_eb: forced edge infeasible");
        } else {
          pick_idx = mode == DecodeMode::Greedy ? argmax_index(lp_val)
                                                : sample_index(lp_val, rng);
        }
        Var term = tape.pick(lp, pick_idx);
        log_prob = log_prob.valid() ? tape.add(log_prob, term) : term;
        log_prob_value += lp_val.data[static_cast<std::size_t>(pick_idx)];
      }

      int edge = cand[static_cast<std::size_t>(pick_idx)];
      chosen_edges.push_back(edge);
      visited_sum = tape.add(visited_sum, tape.gather_rows(edge_emb, {edge}));
      int to = ei.to[edge];
      if (tw) now += inst.pair_slots(ei.from[edge], to)[ei.slot[edge]][0];
      if (cvrp) {
        if (to == depot) {
          load = *inst.capacity;
        } else {
          visited[to] = true;
          load -= inst.demands[to];
          ++served;
        }
      } else if (to != start) {
        visited[to] = true;
      }
      cur = to;
      if (!cvrp && static_cast<int>(chosen_edges.size()) == n) break;
    }

    Rollout r;
    if (cvrp) {
      RouteSet rs;
      std::vector<EdgeRef> route;
      for (int e : chosen_edges) {
        route.push_back({ei.from[e], ei.to[e], ei.slot[e]});
        if (ei.to[e] == depot) {
          rs.routes.push_back(route);
          route.clear();
        }
      }
      r.cost = eval_cvrp(inst, rs);
      r.sol = std::move(rs);
    } else {
      Tour t;
      for (int e : chosen_edges) t.steps.push_back({ei.from[e], ei.to[e], ei.slot[e]});
      r.cost = tw ? eval_tsptw(inst, t) : eval_tsp(inst, t);
      r.sol = std::move(t);
    }
    r.log_prob = log_prob;
    r.log_prob_value = log_prob_value;
    r.step_probs = std::move(step_probs);
    rollouts.push_back(std::move(r));
  }
  return rollouts;
}

// ---------------------------------------------------------------------------
// GMS-DH

std::size_t GmsDh::hyper_out_size() const {
  return static_cast<std::size_t>(mp_slices(cfg).total());
}

std::size_t GmsDh::sel_hyper_out_size() const {
  return static_cast<std::size_t>(2 * cfg.heads * cfg.embed_dim * cfg.head_dim());
}

bool GmsDh::is_selection_path(const std::string& path) {
  return path.rfind("sel.", 0) == 0;
}

GmsDh GmsDh::init(const ModelConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  GmsDh model;
  model.cfg = cfg;
  Rng rng(seed);
  model.params.params.emplace(
      "embed.w", Tensor::init_uniform(cfg.feature_dim(), cfg.embed_dim, rng));
  for (int l = 0; l < cfg.l1 - 1; ++l)
    init_great_layer(model.params, cfg, "enc.l" + std::to_string(l), rng);
  // final aggregation layer: Eq. 6 halves only
  {
    const int d = cfg.embed_dim;
    for (const char* tag : {".att_out", ".att_in"}) {
      model.params.params.emplace(std::string("agg") + tag + ".wq",
                                  Tensor::init_uniform(d, d, rng));
      model.params.params.emplace(std::string("agg") + tag + ".wk",
                                  Tensor::init_uniform(d, d, rng));
      model.params.params.emplace(std::string("agg") + tag + ".wv",
                                  Tensor::init_uniform(d, d / 2, rng));
    }
  }
  for (int l = 0; l < cfg.l2; ++l)
    init_transformer_layer(model.params, cfg, "node.l" + std::to_string(l), rng);
  for (int l = 0; l < cfg.l3; ++l)
    init_great_layer(model.params, cfg, "sel.l" + std::to_string(l), rng);
  init_hypernet(model.params, cfg, "sel.hyper",
                static_cast<int>(model.sel_hyper_out_size()), rng);
  init_hypernet(model.params, cfg, "hyper",
                static_cast<int>(model.hyper_out_size()), rng);
  return model;
}

Var GmsDh::encode_trunk(ParamContext& ctx, const MultiGraphInstance& inst,
                        const EdgeIndex& ei) const {
  ++trunk_calls;
  Tape& tape = ctx.tape();
  Var e = tape.matmul(tape.constant(edge_features(inst, ei, cfg)),
                      ctx("embed.w"));
  for (int l = 0; l < cfg.l1 - 1; ++l)
    e = great_layer(ctx, cfg, ei, "enc.l" + std::to_string(l), e);
  return e;
}

SelectionOutcome GmsDh::simple_selection(const MultiGraphInstance& inst,
                                         const Preference& pref) const {
  Preference edge_pref = pref;
  if (pref.dim() != static_cast<std::size_t>(inst.m))
    edge_pref = Preference(std::vector<double>(static_cast<std::size_t>(inst.m),
                                               1.0 / inst.m));
  PrunedInstance pruned = prune_linear(inst, edge_pref);
  SelectionOutcome out;
  out.kept_slot = pruned.kept_slot;
  return out;
}

std::vector<SelectionOutcome> GmsDh::select(
    ParamContext& ctx, const MultiGraphInstance& inst, const EdgeIndex& ei,
    Var trunk, const Preference& pref, DecodeMode mode, int K, Rng& rng,
    const std::vector<std::vector<int>>* forced) const {
  Tape& tape = ctx.tape();
  const int n = inst.n;

  // single-slot instances: the selection head is a no-op
  if (inst.max_parallel() == 1) {
    SelectionOutcome out;
    out.kept_slot.assign(static_cast<std::size_t>(n) * n, 0);
    return std::vector<SelectionOutcome>(static_cast<std::size_t>(K), out);
  }

  // selection-specialization layers on detached trunk: the shared encoder is
  // frozen with respect to the selection loss
  Var e = tape.detach(trunk);
  for (int l = 0; l < cfg.l3; ++l)
    e = great_layer(ctx, cfg, ei, "sel.l" + std::to_string(l), e);

  SelWeights w = slice_sel_weights(
      tape, cfg, hypernet_forward(ctx, cfg, "sel.hyper", pref));

  // per-pair log-probability vectors, shared across the K selections
  struct PairLp {
    int offset = -1;
    Var lp;
  };
  std::vector<PairLp> pair_lps(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      int cnt = ei.pair_count[static_cast<std::size_t>(i) * n + j];
      if (cnt < 2) continue;
      int off = ei.pair_offset[static_cast<std::size_t>(i) * n + j];
      std::vector<int> ids(static_cast<std::size_t>(cnt));
      for (int s = 0; s < cnt; ++s) ids[s] = off + s;
      Var gathered = tape.gather_rows(e, ids);
      Var q = tape.mean_rows(gathered);
      std::vector<double> costs(static_cast<std::size_t>(cnt));
      for (int s = 0; s < cnt; ++s)
        costs[s] = score_cost(inst.pair_slots(i, j)[s], pref, cfg);
      Var alpha = mp_scores(tape, cfg, q, gathered, w.wq, w.wk, costs);
      Var logits = tape.scale(tape.tanh(alpha), cfg.tanh_clip);
      pair_lps[static_cast<std::size_t>(i) * n + j] = {off,
                                                       tape.log_softmax(logits)};
    }

  std::vector<SelectionOutcome> outcomes;
  outcomes.reserve(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k) {
    SelectionOutcome out;
    out.kept_slot.assign(static_cast<std::size_t>(n) * n, 0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        const PairLp& pl = pair_lps[static_cast<std::size_t>(i) * n + j];
        if (!pl.lp.valid()) {
          out.pair_probs.push_back({1.0});
          continue;
        }
        Tensor lp_val = tape.value(pl.lp);
        out.pair_probs.push_back(probs_of(lp_val));
        int slot;
        if (forced) {
          slot = (*forced)[k][static_cast<std::size_t>(i) * n + j];
        } else if (mode == DecodeMode::Greedy) {
          slot = argmax_index(lp_val);
        } else {
          slot = sample_index(lp_val, rng);
        }
        out.kept_slot[static_cast<std::size_t>(i) * n + j] = slot;
        Var term = tape.pick(pl.lp, slot);
        out.log_prob = out.log_prob.valid() ? tape.add(out.log_prob, term) : term;
        out.log_prob_value += lp_val.data[static_cast<std::size_t>(slot)];
      }
    outcomes.push_back(std::move(out));
  }
  return outcomes;
}

Var GmsDh::node_embeddings(ParamContext& ctx, const MultiGraphInstance& inst,
                           const EdgeIndex& ei, Var trunk,
                           const std::vector<int>& kept_slot) const {
  const int n = inst.n;
  std::vector<std::vector<int>> out_sets(static_cast<std::size_t>(n));
  std::vector<std::vector<int>> in_sets(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      int id = ei.edge_id(i, j, kept_slot[static_cast<std::size_t>(i) * n + j]);
      out_sets[i].push_back(id);
      in_sets[j].push_back(id);
    }
  Var x = great_aggregate_nodes(ctx, cfg, "agg", out_sets, in_sets, trunk);
  for (int l = 0; l < cfg.l2; ++l)
    x = transformer_layer(ctx, cfg, "node.l" + std::to_string(l), x);
  return x;
}

MpWeights GmsDh::decoder_weights(ParamContext& ctx, const Preference& pref) const {
  Var flat = hypernet_forward(ctx, cfg, "hyper", pref);
  return slice_mp_weights(ctx.tape(), cfg, flat);
}

std::vector<Rollout> GmsDh::rollout(ParamContext& ctx,
                                    const MultiGraphInstance& inst, Var node_emb,
                                    const std::vector<int>& kept_slot,
                                    const Preference& pref, DecodeMode mode,
                                    int K, Rng& rng,
                                    const std::vector<Solution>* forced) const {
  require(K >= 1, "rollout_dh: K must be >= 1");
  Tape& tape = ctx.tape();
  const int n = inst.n;
  const bool cvrp =
      cfg.kind == ProblemKind::MOCVRP || cfg.kind == ProblemKind::MGMOCVRP;
  const bool tw = cfg.kind == ProblemKind::MGMOTSPTW;
  const int depot = inst.depot.value_or(0);
  const double horizon = tw_horizon(inst);

  MpWeights w = decoder_weights(ctx, pref);
  Var graph_term = tape.scale(tape.matmul(tape.sum_rows(node_emb), w.w3),
                              1.0 / n);

  auto slot_of = [&](int i, int j) {
    return kept_slot[static_cast<std::size_t>(i) * n + j];
  };
  auto edge_vec = [&](int i, int j) -> const CostVector& {
    return inst.pair_slots(i, j)[slot_of(i, j)];
  };

  std::vector<Rollout> rollouts;
  rollouts.reserve(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k) {
    const Solution* replay = forced ? &(*forced)[k] : nullptr;
    std::vector<int> replay_nodes;
    if (replay) {
      if (const Tour* t = std::get_if<Tour>(replay)) {
        for (const EdgeRef& e : t->steps) replay_nodes.push_back(e.to);
        replay_nodes.pop_back();  // closing leg is implicit
      } else {
        const RouteSet& rs = std::get<RouteSet>(*replay);
        for (const auto& route : rs.routes)
          for (const EdgeRef& e : route) replay_nodes.push_back(e.to);
        replay_nodes.pop_back();
      }
    }

    std::vector<bool> visited(static_cast<std::size_t>(n), false);
    std::vector<int> seq;
    std::vector<std::vector<double>> step_probs;
    Var log_prob;
    double log_prob_value = 0.0;

    int start;
    if (tw || cvrp) {
      start = depot;
    } else {
      start = k % n;
    }
    seq.push_back(start);
    visited[start] = true;
    int cur = start;
    double now = 0.0;
    int load = cvrp ? *inst.capacity : 0;
    int served = 0;
    std::size_t replay_at = 0;

    Var x_first = tape.gather_rows(node_emb, {start});
    Var first_term = tape.matmul(x_first, w.w1);
    Var visited_sum = x_first;

    // CVRP POMO diversity: force the first customer
    if (cvrp && !replay) {
      std::vector<int> customers;
      for (int v = 0; v < n; ++v)
        if (v != depot) customers.push_back(v);
      int target = customers[k % customers.size()];
      seq.push_back(target);
      visited[target] = true;
      visited_sum = tape.add(visited_sum, tape.gather_rows(node_emb, {target}));
      load -= inst.demands[target];
      ++served;
      cur = target;
    } else if (cvrp && replay) {
      int target = replay_nodes[replay_at++];
      seq.push_back(target);
      visited[target] = true;
      visited_sum = tape.add(visited_sum, tape.gather_rows(node_emb, {target}));
      load -= inst.demands[target];
      ++served;
      cur = target;
    }

    auto feasible = [&]() {
      std::vector<int> targets;
      if (cvrp) {
        for (int v = 0; v < n; ++v)
          if (!visited[v] && v != depot && inst.demands[v] <= load)
            targets.push_back(v);
        if (served == n - 1) return std::vector<int>{depot};
        if (cur != depot) targets.push_back(depot);
        return targets;
      }
      for (int v = 0; v < n; ++v)
        if (!visited[v]) targets.push_back(v);
      return targets;
    };

    for (;;) {
      if (cvrp && served == n - 1 && cur == depot) break;
      if (!cvrp && static_cast<int>(seq.size()) == n) break;
      std::vector<int> cand = feasible();
      require(!cand.empty(), "rollout_dh: no feasible node");

      int pick_idx;
      if (cand.size() == 1) {
        pick_idx = 0;
        step_probs.push_back({1.0});
      } else {
        Var x_cur = tape.gather_rows(node_emb, {cur});
        Var q = tape.add(tape.add(first_term, tape.matmul(x_cur, w.w2)),
                         tape.add(graph_term,
                                  tape.scale(tape.matmul(visited_sum, w.w4),
                                             1.0 / n)));
        if (cfg.needs_context_scalar()) {
          double ctx_val = cvrp ? static_cast<double>(load) / *inst.capacity
                                : now / horizon;
          q = tape.add(q, tape.scale(w.w_ctx, ctx_val));
        }
        Var keys = tape.gather_rows(node_emb, cand);
        std::vector<double> costs;
        costs.reserve(cand.size());
        for (int v : cand) costs.push_back(score_cost(edge_vec(cur, v), pref, cfg));
        Var alpha = mp_scores(tape, cfg, q, keys, w.wq, w.wk, costs);
        Var logits = tape.scale(tape.tanh(alpha), cfg.tanh_clip);
        Var lp = tape.log_softmax(logits);
        Tensor lp_val = tape.value(lp);  // copy: ops below may reallocate the tape
        step_probs.push_back(probs_of(lp_val));
        if (replay) {
          int want = replay_nodes[replay_at];
          pick_idx = -1;
          for (std::size_t i = 0; i < cand.size(); ++i)
            if (cand[i] == want) pick_idx = static_cast<int>(i);
          require(pick_idx >= 0, "rollout_dh: forced node infeasible");
        } else {
          pick_idx = mode == DecodeMode::Greedy ? argmax_index(lp_val)
                                                : sample_index(lp_val, rng);
        }
        Var term = tape.pick(lp, pick_idx);
        log_prob = log_prob.valid() ? tape.add(log_prob, term) : term;
        log_prob_value += lp_val.data[static_cast<std::size_t>(pick_idx)];
      }

      int v = cand[static_cast<std::size_t>(pick_idx)];
      if (replay) ++replay_at;
      seq.push_back(v);
      visited_sum = tape.add(visited_sum, tape.gather_rows(node_emb, {v}));
      if (tw) now += edge_vec(cur, v)[0];
      if (cvrp) {
        if (v == depot) {
          load = *inst.capacity;
        } else {
          visited[v] = true;
          load -= inst.demands[v];
          ++served;
        }
      } else {
        visited[v] = true;
      }
      cur = v;
    }

    Rollout r;
    if (cvrp) {
      RouteSet rs;
      std::vector<EdgeRef> route;
      for (std::size_t t = 0; t + 1 < seq.size(); ++t) {
        route.push_back({seq[t], seq[t + 1], slot_of(seq[t], seq[t + 1])});
        if (seq[t + 1] == depot) {
          rs.routes.push_back(route);
          route.clear();
        }
      }
      r.cost = eval_cvrp(inst, rs);
      r.sol = std::move(rs);
    } else {
      Tour t;
      for (std::size_t s = 0; s < seq.size(); ++s) {
        int a = seq[s];
        int b = seq[(s + 1) % seq.size()];
        t.steps.push_back({a, b, slot_of(a, b)});
      }
      r.cost = tw ? eval_tsptw(inst, t) : eval_tsp(inst, t);
      r.sol = std::move(t);
    }
    r.log_prob = log_prob;
    r.log_prob_value = log_prob_value;
    r.step_probs = std::move(step_probs);
    rollouts.push_back(std::move(r));
  }
  return rollouts;
}

}  // namespace mgroute::neural
