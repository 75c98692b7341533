#ifndef MGROUTE_NEURAL_MODEL_HPP
#define MGROUTE_NEURAL_MODEL_HPP

#include <map>
#include <string>
#include <vector>

#include "mgroute/core.hpp"
#include "mgroute/gen.hpp"
#include "mgroute/neural/tape.hpp"
#include "mgroute/scalarize.hpp"

namespace mgroute::neural {

enum class NormKind { Layer, Instance, None };

struct ModelConfig {
  int embed_dim = 128;
  int heads = 8;
  int layers = 6;               // GMS-EB encoder depth L
  int l1 = 5;                   // GMS-DH shared GREAT layers (last one selective)
  int l2 = 2;                   // node transformer layers after aggregation
  int l3 = 2;                   // selection-specialization GREAT layers
  double tanh_clip = 10.0;
  int hyper_hidden = 128;       // hyper-network width (2 hidden layers)
  int ffn_mult = 4;
  ScalarKind score_cost = ScalarKind::Linear;
  NormKind norm = NormKind::Instance;
  ProblemKind kind = ProblemKind::MOTSP;
  int cost_dim = 2;             // edge cost dimension m

  int head_dim() const { return embed_dim / heads; }
  // raw costs, plus successor demand (CVRP) or successor window (TW)
  int feature_dim() const;
  bool needs_context_scalar() const {
    return kind == ProblemKind::MOCVRP || kind == ProblemKind::MGMOCVRP ||
           kind == ProblemKind::MGMOTSPTW;
  }
  void validate() const;
};

// Named trainable arrays; std::map keeps iteration deterministic.
struct ParameterSet {
  std::map<std::string, Tensor> params;

  Tensor& at(const std::string& path);
  const Tensor& at(const std::string& path) const;
  bool has(const std::string& path) const { return params.count(path) > 0; }
  std::size_t total_values() const;
};

// Per-tape cache of parameter leaves, so each parameter becomes exactly one
// tape node per forward pass.
class ParamContext {
 public:
  ParamContext(Tape& tape, const ParameterSet& ps) : tape_(tape), ps_(ps) {}

  Var operator()(const std::string& path);
  Tape& tape() { return tape_; }

  // Adds d(loss)/d(param) into grads (creating zero tensors on first use).
  void accumulate_grads(std::map<std::string, Tensor>& grads) const;

 private:
  Tape& tape_;
  const ParameterSet& ps_;
  std::map<std::string, Var> leaves_;
};

// Flat view of all directed edges (every slot) of an instance.
struct EdgeIndex {
  int n = 0;
  int total = 0;
  std::vector<int> from, to, slot;        // per edge id
  std::vector<int> pair_offset;           // [i*n+j] -> first edge id, -1 diag
  std::vector<int> pair_count;
  std::vector<std::vector<int>> out_edges, in_edges;

  int edge_id(int i, int j, int s) const {
    return pair_offset[static_cast<std::size_t>(i) * n + j] + s;
  }
  static EdgeIndex build(const MultiGraphInstance& inst);
};

// Raw edge features lifted by the models' input layer.
Tensor edge_features(const MultiGraphInstance& inst, const EdgeIndex& ei,
                     const ModelConfig& cfg);

// One GREAT node-based layer: per-node attention over outgoing/incoming edge
// sets, node features re-expanded to edges, then FFN with residuals and
// normalization. Returns new [E, d] edge embeddings.
Var great_layer(ParamContext& ctx, const ModelConfig& cfg, const EdgeIndex& ei,
                const std::string& prefix, Var edge_emb);

// The node-aggregation half of a GREAT layer (used as GMS-DH's final layer):
// attention over the given per-node edge id sets only. Returns [n, d].
Var great_aggregate_nodes(ParamContext& ctx, const ModelConfig& cfg,
                          const std::string& prefix,
                          const std::vector<std::vector<int>>& out_sets,
                          const std::vector<std::vector<int>>& in_sets,
                          Var edge_emb);

// Standard transformer encoder layer over node embeddings [n, d].
Var transformer_layer(ParamContext& ctx, const ModelConfig& cfg,
                      const std::string& prefix, Var node_emb);

// Hyper-network: MLP(lambda) -> flat decoder weight vector [1, out_size].
Var hypernet_forward(ParamContext& ctx, const ModelConfig& cfg,
                     const std::string& prefix, const Preference& pref);

// Multi-pointer decoder weights generated per preference.
struct MpWeights {
  Var w1, w2, w3, w4;       // [d, d] context projections
  std::vector<Var> wq, wk;  // per head [d, head_dim]
  Var w_ctx;                // [1, d] scalar-context row (CVRP load / TW time)
};

struct SelWeights {
  std::vector<Var> wq, wk;  // per head [d, head_dim]
};

enum class DecodeMode { Greedy, Sample };

struct Rollout {
  Solution sol;
  CostVector cost;
  Var log_prob;         // invalid when the rollout had no stochastic step
  double log_prob_value = 0.0;
  // probabilities over the feasible candidates of each decoded step
  std::vector<std::vector<double>> step_probs;
};

struct SelectionOutcome {
  std::vector<int> kept_slot;  // [i*n+j] -> slot
  Var log_prob;                // joint over pairs; invalid if all pairs single
  double log_prob_value = 0.0;
  // per-pair slot probabilities in (i, j) row-major order, singletons included
  std::vector<std::vector<double>> pair_probs;
};

// ---------------------------------------------------------------------------
// GMS-EB: edge-based autoregressive model on the multigraph.
class GmsEb {
 public:
  ModelConfig cfg;
  ParameterSet params;

  static GmsEb init(const ModelConfig& cfg, std::uint64_t seed);

  // Encoder (preference-agnostic): L GREAT layers.
  Var encode(ParamContext& ctx, const MultiGraphInstance& inst,
             const EdgeIndex& ei) const;

  MpWeights decoder_weights(ParamContext& ctx, const Preference& pref) const;

  // K POMO rollouts; rollout k forces start node k mod n and the linear-
  // best outgoing edge as the first step. forced, when non-null, replays
  // the given solutions (teacher forcing) instead of sampling.
  std::vector<Rollout> rollout(ParamContext& ctx, const MultiGraphInstance& inst,
                               const EdgeIndex& ei, Var edge_emb,
                               const Preference& pref, DecodeMode mode, int K,
                               Rng& rng,
                               const std::vector<Solution>* forced = nullptr) const;

  std::size_t hyper_out_size() const;
};

// ---------------------------------------------------------------------------
// GMS-DH: dual-head model; selection head prunes slots, routing head
// constructs node tours on the pruned graph.
class GmsDh {
 public:
  ModelConfig cfg;
  ParameterSet params;

  static GmsDh init(const ModelConfig& cfg, std::uint64_t seed);

  // First l1-1 GREAT layers; run once per instance (preference-agnostic).
  Var encode_trunk(ParamContext& ctx, const MultiGraphInstance& inst,
                   const EdgeIndex& ei) const;

  // forward-call probe used by tests
  mutable int trunk_calls = 0;

  // Selection branch: l3 GREAT layers on detached trunk output, then per-pair
  // slot probabilities. K selections sampled (or argmax).
  std::vector<SelectionOutcome> select(ParamContext& ctx,
                                       const MultiGraphInstance& inst,
                                       const EdgeIndex& ei, Var trunk,
                                       const Preference& pref, DecodeMode mode,
                                       int K, Rng& rng,
                                       const std::vector<std::vector<int>>* forced =
                                           nullptr) const;

  // Pruning by linear scalarized cost in place of the selection head.
  SelectionOutcome simple_selection(const MultiGraphInstance& inst,
                                    const Preference& pref) const;

  // Final GREAT aggregation over the selected edges + l2 transformer layers.
  Var node_embeddings(ParamContext& ctx, const MultiGraphInstance& inst,
                      const EdgeIndex& ei, Var trunk,
                      const std::vector<int>& kept_slot) const;

  MpWeights decoder_weights(ParamContext& ctx, const Preference& pref) const;

  // K2 node-level POMO rollouts on the pruned graph defined by kept_slot.
  std::vector<Rollout> rollout(ParamContext& ctx, const MultiGraphInstance& inst,
                               Var node_emb, const std::vector<int>& kept_slot,
                               const Preference& pref, DecodeMode mode, int K,
                               Rng& rng,
                               const std::vector<Solution>* forced = nullptr) const;

  std::size_t hyper_out_size() const;
  std::size_t sel_hyper_out_size() const;

  // Parameter paths updated by the selection loss (theta-tilde).
  static bool is_selection_path(const std::string& path);
};

// Shared scoring helper: per-head pointer scores for a key matrix against a
// query row, averaged over heads, scaled by 1/sqrt(d), minus scalar costs.
Var mp_scores(Tape& tape, const ModelConfig& cfg, Var query, Var keys,
              const std::vector<Var>& wq, const std::vector<Var>& wk,
              const std::vector<double>& scalar_costs);

}  // namespace mgroute::neural

#endif
