#include "mgroute/neural/train.hpp"

#include <algorithm>
#include <cmath>

namespace mgroute::neural {

void Adam::step(ParameterSet& params, const std::map<std::string, Tensor>& grads,
                const std::function<bool(const std::string&)>& filter) {
  ++t_;
  const double bc1 = 1.0 - std::pow(beta1_, t_);
  const double bc2 = 1.0 - std::pow(beta2_, t_);
  for (auto& [path, p] : params.params) {
    if (filter && !filter(path)) continue;
    auto git = grads.find(path);
    auto& m = m_.try_emplace(path, Tensor(p.rows, p.cols)).first->second;
    auto& v = v_.try_emplace(path, Tensor(p.rows, p.cols)).first->second;
    for (std::size_t i = 0; i < p.size(); ++i) {
      double g = git == grads.end() ? 0.0 : git->second.data[i];
      m.data[i] = beta1_ * m.data[i] + (1.0 - beta1_) * g;
      v.data[i] = beta2_ * v.data[i] + (1.0 - beta2_) * g * g;
      double mhat = m.data[i] / bc1;
      double vhat = v.data[i] / bc2;
      p.data[i] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
    }
  }
}

void TrainConfig::validate() const {
  require(batch_size >= 1 && lr > 0.0, "TrainConfig: batch/lr");
  require(k_rollouts >= 0 && k1 >= 1 && k2 >= 0, "TrainConfig: rollout counts");
}

namespace {

void check_grads_finite(const std::map<std::string, Tensor>& grads) {
  for (const auto& [path, g] : grads)
    require(g.all_finite(), "non-finite gradient at parameter '" + path + "'");
}

double grad_norm(const std::map<std::string, Tensor>& grads) {
  double sq = 0.0;
  for (const auto& [path, g] : grads)
    for (double v : g.data) sq += v * v;
  return std::sqrt(sq);
}

}  // namespace

BatchReport reinforce_batch_eb(GmsEb& model, Adam& opt,
                               const std::vector<MultiGraphInstance>& instances,
                               const Preference& pref, const TrainConfig& cfg,
                               Rng& rng) {
  cfg.validate();
  const int B = static_cast<int>(instances.size());
  require(B >= 1, "reinforce_batch_eb: empty batch");
  const IdealPoint z = IdealPoint::zeros(static_cast<int>(pref.dim()));

  std::map<std::string, Tensor> grads;
  BatchReport report;
  Tape tape;
  for (const MultiGraphInstance& inst : instances) {
    tape.reset();
    ParamContext ctx(tape, model.params);
    EdgeIndex ei = EdgeIndex::build(inst);
    Var emb = model.encode(ctx, inst, ei);
    const int K = cfg.k_rollouts > 0 ? cfg.k_rollouts : inst.n;
    auto rollouts = model.rollout(ctx, inst, ei, emb, pref, DecodeMode::Sample,
                                  K, rng);
    std::vector<double> rewards(rollouts.size());
    double baseline = 0.0;
    for (std::size_t j = 0; j < rollouts.size(); ++j) {
      rewards[j] = reward(rollouts[j].cost, pref, z, cfg.reward_kind);
      baseline += rewards[j];
    }
    baseline /= static_cast<double>(rollouts.size());
    report.mean_baseline += baseline / B;

    Var loss;
    for (std::size_t j = 0; j < rollouts.size(); ++j) {
      report.mean_reward += rewards[j] / (B * static_cast<double>(rollouts.size()));
      if (!rollouts[j].log_prob.valid()) continue;
      double coeff = -(rewards[j] - baseline) / (B * static_cast<double>(K));
      Var term = tape.scale(rollouts[j].log_prob, coeff);
      loss = loss.valid() ? tape.add(loss, term) : term;
    }
    if (loss.valid()) {
      tape.backward(loss);
      ctx.accumulate_grads(grads);
    }
  }
  check_grads_finite(grads);
  report.grad_norm = grad_norm(grads);
  opt.step(model.params, grads);
  return report;
}

BatchReport reinforce_batch_dh(GmsDh& model, Adam& opt_route, Adam& opt_sel,
                               const std::vector<MultiGraphInstance>& instances,
                               const Preference& pref, const TrainConfig& cfg,
                               Rng& rng) {
  cfg.validate();
  const int B = static_cast<int>(instances.size());
  require(B >= 1, "reinforce_batch_dh: empty batch");
  const IdealPoint z = IdealPoint::zeros(static_cast<int>(pref.dim()));

  std::map<std::string, Tensor> grads;
  BatchReport report;
  Tape tape;
  for (const MultiGraphInstance& inst : instances) {
    tape.reset();
    ParamContext ctx(tape, model.params);
    EdgeIndex ei = EdgeIndex::build(inst);
    Var trunk = model.encode_trunk(ctx, inst, ei);
    const int K1 = cfg.k1;
    const int K2 = cfg.k2 > 0 ? cfg.k2 : inst.n;
    auto selections = model.select(ctx, inst, ei, trunk, pref,
                                   DecodeMode::Sample, K1, rng);
    Var loss;
    std::vector<double> r1(selections.size());
    for (std::size_t j = 0; j < selections.size(); ++j) {
      Var node_emb =
          model.node_embeddings(ctx, inst, ei, trunk, selections[j].kept_slot);
      auto rollouts = model.rollout(ctx, inst, node_emb,
                                    selections[j].kept_slot, pref,
                                    DecodeMode::Sample, K2, rng);
      std::vector<double> r2(rollouts.size());
      double b2 = 0.0;
      double best = -std::numeric_limits<double>::infinity();
      for (std::size_t t = 0; t < rollouts.size(); ++t) {
        r2[t] = reward(rollouts[t].cost, pref, z, cfg.reward_kind);
        b2 += r2[t];
        best = std::max(best, r2[t]);
      }
      b2 /= static_cast<double>(rollouts.size());
      r1[j] = best;  // optimal-tour reward approximated by the sample max
      for (std::size_t t = 0; t < rollouts.size(); ++t) {
        report.mean_reward +=
            r2[t] / (B * static_cast<double>(selections.size() * rollouts.size()));
        if (!rollouts[t].log_prob.valid()) continue;
        double coeff = -(r2[t] - b2) / (B * static_cast<double>(K1 * K2));
        Var term = tape.scale(rollouts[t].log_prob, coeff);
        loss = loss.valid() ? tape.add(loss, term) : term;
      }
    }
    double b1 = 0.0;
    for (double v : r1) b1 += v;
    b1 /= static_cast<double>(r1.size());
    report.mean_baseline += b1 / B;
    for (std::size_t j = 0; j < selections.size(); ++j) {
      if (!selections[j].log_prob.valid()) continue;
      double coeff = -(r1[j] - b1) / (B * static_cast<double>(K1));
      Var term = tape.scale(selections[j].log_prob, coeff);
      loss = loss.valid() ? tape.add(loss, term) : term;
    }
    if (loss.valid()) {
      tape.backward(loss);
      ctx.accumulate_grads(grads);
    }
  }
  check_grads_finite(grads);
  report.grad_norm = grad_norm(grads);
  opt_route.step(model.params, grads,
                 [](const std::string& p) { return !GmsDh::is_selection_path(p); });
  opt_sel.step(model.params, grads,
               [](const std::string& p) { return GmsDh::is_selection_path(p); });
  return report;
}

ParetoArchive eval_eb_greedy(const GmsEb& model, const MultiGraphInstance& inst,
                             const std::vector<Preference>& prefs) {
  ParetoArchive archive;
  Rng rng(0);  // greedy decoding never consumes randomness
  EdgeIndex ei = EdgeIndex::build(inst);
  // the encoder is preference-agnostic: one forward pass serves all prefs
  Tape tape;
  ParamContext ctx(tape, model.params);
  Var emb = model.encode(ctx, inst, ei);
  for (const Preference& pref : prefs) {
    auto rollouts = model.rollout(ctx, inst, ei, emb, pref, DecodeMode::Greedy,
                                  inst.n, rng);
    for (const Rollout& r : rollouts) archive.insert(r.cost, r.sol);
  }
  return archive;
}

ParetoArchive eval_dh_greedy(const GmsDh& model, const MultiGraphInstance& inst,
                             const std::vector<Preference>& prefs,
                             bool simple_pruning) {
  ParetoArchive archive;
  Rng rng(0);
  EdgeIndex ei = EdgeIndex::build(inst);
  // the l1-1 trunk layers run once per instance, not once per preference
  Tape tape;
  ParamContext ctx(tape, model.params);
  Var trunk = model.encode_trunk(ctx, inst, ei);
  for (const Preference& pref : prefs) {
    SelectionOutcome sel;
    if (simple_pruning) {
      sel = model.simple_selection(inst, pref);
    } else {
      sel = model.select(ctx, inst, ei, trunk, pref, DecodeMode::Greedy, 1,
                         rng)[0];
    }
    Var node_emb = model.node_embeddings(ctx, inst, ei, trunk, sel.kept_slot);
    auto rollouts = model.rollout(ctx, inst, node_emb, sel.kept_slot, pref,
                                  DecodeMode::Greedy, inst.n, rng);
    for (const Rollout& r : rollouts) archive.insert(r.cost, r.sol);
  }
  return archive;
}

namespace {

struct ValSetup {
  std::vector<MultiGraphInstance> instances;
  std::vector<Preference> prefs;
  CostVector ref;
};

ValSetup make_validation(const GenSpec& spec, const TrainConfig& cfg) {
  ValSetup v;
  GenSpec val_spec = spec;
  val_spec.seed = spec.seed ^ 0x9e3779b97f4a7c15ULL;  // held-out stream
  v.instances = generate_batch(val_spec, cfg.val_instances);
  int pref_dim = spec.problem == ProblemKind::MOCVRP ||
                         spec.problem == ProblemKind::MGMOTSPTW
                     ? 2
                     : spec.m;
  v.prefs = preference_grid(pref_dim, cfg.val_prefs);
  v.ref = hv_reference(problem_name(spec.problem),
                       distribution_name(spec.dist, spec.x), spec.n, pref_dim);
  return v;
}

template <typename EvalFn>
double validate(const ValSetup& v, EvalFn&& eval) {
  double sum = 0.0;
  for (const auto& inst : v.instances) {
    ParetoArchive a = eval(inst);
    sum += normalized_hv(a.costs(), v.ref).value;
  }
  return sum / static_cast<double>(v.instances.size());
}

}  // namespace

TrainHistory curriculum_run_eb(GmsEb& model, const std::vector<TrainStage>& stages,
                               const TrainConfig& cfg) {
  cfg.validate();
  TrainHistory history;
  Adam opt(cfg.lr);
  Rng rng(cfg.seed);
  std::uint64_t instance_counter = 0;
  for (const TrainStage& stage : stages) {
    ValSetup val = make_validation(stage.gen, cfg);
    for (int epoch = 0; epoch < stage.epochs; ++epoch) {
      double reward_sum = 0.0;
      for (int b = 0; b < stage.batches_per_epoch; ++b) {
        Preference pref = sample_preference(
            static_cast<int>(val.prefs[0].dim()), rng);
        std::vector<MultiGraphInstance> batch;
        batch.reserve(static_cast<std::size_t>(cfg.batch_size));
        for (int i = 0; i < cfg.batch_size; ++i)
          batch.push_back(generate(stage.gen, instance_counter++));
        reward_sum +=
            reinforce_batch_eb(model, opt, batch, pref, cfg, rng).mean_reward;
      }
      history.epoch_mean_reward.push_back(reward_sum / stage.batches_per_epoch);
      history.epoch_val_hv.push_back(validate(val, [&](const auto& inst) {
        return eval_eb_greedy(model, inst, val.prefs);
      }));
    }
  }
  return history;
}

TrainHistory curriculum_run_dh(GmsDh& model, const std::vector<TrainStage>& stages,
                               const TrainConfig& cfg) {
  cfg.validate();
  TrainHistory history;
  Adam opt_route(cfg.lr);
  Adam opt_sel(cfg.lr);
  Rng rng(cfg.seed);
  std::uint64_t instance_counter = 0;
  for (const TrainStage& stage : stages) {
    ValSetup val = make_validation(stage.gen, cfg);
    for (int epoch = 0; epoch < stage.epochs; ++epoch) {
      double reward_sum = 0.0;
      for (int b = 0; b < stage.batches_per_epoch; ++b) {
        Preference pref = sample_preference(
            static_cast<int>(val.prefs[0].dim()), rng);
        std::vector<MultiGraphInstance> batch;
        batch.reserve(static_cast<std::size_t>(cfg.batch_size));
        for (int i = 0; i < cfg.batch_size; ++i)
          batch.push_back(generate(stage.gen, instance_counter++));
        reward_sum += reinforce_batch_dh(model, opt_route, opt_sel, batch, pref,
                                         cfg, rng)
                          .mean_reward;
      }
      history.epoch_mean_reward.push_back(reward_sum / stage.batches_per_epoch);
      history.epoch_val_hv.push_back(validate(val, [&](const auto& inst) {
        return eval_dh_greedy(model, inst, val.prefs);
      }));
    }
  }
  return history;
}

}  // namespace mgroute::neural
