#ifndef MGROUTE_NEURAL_TRAIN_HPP
#define MGROUTE_NEURAL_TRAIN_HPP

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "mgroute/gen.hpp"
#include "mgroute/metrics.hpp"
#include "mgroute/neural/model.hpp"

namespace mgroute::neural {

// Adaptive-moment optimizer; one state per parameter subset.
class Adam {
 public:
  explicit Adam(double lr) : lr_(lr) {}

  // Applies one update to every parameter accepted by filter; parameters
  // missing from grads are treated as zero-gradient.
  void step(ParameterSet& params, const std::map<std::string, Tensor>& grads,
            const std::function<bool(const std::string&)>& filter = nullptr);

  double lr() const { return lr_; }

 private:
  double lr_;
  double beta1_ = 0.9;
  double beta2_ = 0.999;
  double eps_ = 1e-8;
  int t_ = 0;
  std::map<std::string, Tensor> m_, v_;
};

struct TrainConfig {
  int batch_size = 64;
  double lr = 1e-4;
  int k_rollouts = 0;        // GMS-EB; 0 = problem size
  int k1 = 4;                // GMS-DH selection samples (training)
  int k2 = 0;                // GMS-DH tours per selection; 0 = problem size
  ScalarKind reward_kind = ScalarKind::Chebyshev;
  std::uint64_t seed = 0;
  int val_instances = 50;
  int val_prefs = 21;

  void validate() const;
};

struct BatchReport {
  double mean_reward = 0.0;
  double mean_baseline = 0.0;
  double grad_norm = 0.0;
};

// One POMO-baseline REINFORCE step for GMS-EB (Chebyshev reward by default).
BatchReport reinforce_batch_eb(GmsEb& model, Adam& opt,
                               const std::vector<MultiGraphInstance>& instances,
                               const Preference& pref, const TrainConfig& cfg,
                               Rng& rng);

// One dual-head REINFORCE step for GMS-DH; opt_route updates theta (encoder,
// routing pathway) and opt_sel updates theta-tilde (selection pathway).
BatchReport reinforce_batch_dh(GmsDh& model, Adam& opt_route, Adam& opt_sel,
                               const std::vector<MultiGraphInstance>& instances,
                               const Preference& pref, const TrainConfig& cfg,
                               Rng& rng);

// Greedy POMO inference: per preference, n forced-start greedy rollouts
// merged into one archive.
ParetoArchive eval_eb_greedy(const GmsEb& model, const MultiGraphInstance& inst,
                             const std::vector<Preference>& prefs);

// simple_pruning replaces the learned selection head ("gms-dh-simple").
ParetoArchive eval_dh_greedy(const GmsDh& model, const MultiGraphInstance& inst,
                             const std::vector<Preference>& prefs,
                             bool simple_pruning = false);

struct TrainStage {
  GenSpec gen;
  int epochs = 1;
  int batches_per_epoch = 100;
};

struct TrainHistory {
  std::vector<double> epoch_val_hv;  // mean normalized HV on held-out set
  std::vector<double> epoch_mean_reward;
};

// Sequential staged training; one history entry per epoch. Validation uses
// held-out instances from a stream disjoint from the training stream.
TrainHistory curriculum_run_eb(GmsEb& model, const std::vector<TrainStage>& stages,
                               const TrainConfig& cfg);
TrainHistory curriculum_run_dh(GmsDh& model, const std::vector<TrainStage>& stages,
                               const TrainConfig& cfg);

}  // namespace mgroute::neural

#endif
