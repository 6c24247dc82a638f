#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "auxrl/env/grid.hpp"
#include "auxrl/ltl/formula.hpp"
#include "auxrl/ltl/trace.hpp"
#include "auxrl/util/rng.hpp"

namespace auxrl::learn {

struct LearnerConfig {
  double alpha = 0.5;      // learning rate, (0, 1]
  double gamma = 0.95;     // discount, [0, 1]
  double epsilon = 0.1;    // exploration rate, [0, 1]
  int max_steps_per_episode = 500;
  int episodes = 2000;
  int eval_period = 25;    // episodes between evaluation points

  void validate() const;   // throws InvalidArgumentError on out-of-range values
};

enum class PolicyKind { EpsilonGreedyOnGivenTask, UniformRandom };

struct TransitionRecord {
  env::Cell state;
  env::Action action;
  env::Cell next_state;
  ltl::TruthAssignment next_label;
};

/// Reward the transition would have earned if `f` were the objective:
/// progresses f through the new state's label; reward 1 iff the progressed
/// form is TrueConst.
std::pair<double, ltl::Formula> counterfactual_reward(
    const ltl::Formula& f, const ltl::TruthAssignment& next_label);

/// One sparse state-action value table per progression-closure formula; the
/// multitask policy bank. Lookups of unseen (state, action) pairs return 0.
class QBank {
 public:
  QBank() = default;

  std::size_t table_count() const { return keys_.size(); }
  const std::vector<std::string>& keys() const { return keys_; }  // sorted
  bool has_table(const std::string& key) const { return index_.count(key) != 0; }
  bool has_table(const ltl::Formula& f) const;

  double q(const std::string& key, env::Cell s, env::Action a) const;
  double max_q(const std::string& key, env::Cell s) const;

  /// Progression-chain queries against the bank's cached transitions.
  /// Indices are positions in keys(); TrueConst/FalseConst map to sentinels.
  static constexpr int kTrueIndex = -1;
  static constexpr int kFalseIndex = -2;
  int chain_start(const ltl::Formula& f) const;
  int chain_advance(int index, const ltl::TruthAssignment& label);
  const ltl::Formula& formula_at(std::size_t index) const { return formulas_[index]; }

  /// Canonical-formula key serialisation:
  /// {"<formula>": [[x, y, "<action>", q], ...], ...}
  void dump_json(const std::filesystem::path& path) const;
  static QBank load_json(const std::filesystem::path& path);

  bool operator==(const QBank& other) const {
    return keys_ == other.keys_ && tables_ == other.tables_;
  }

 private:
  friend QBank init_bank(const std::vector<ltl::Formula>& tasks);
  friend void q_update(QBank&, const ltl::Formula&, const TransitionRecord&,
                       const LearnerConfig&);
  friend void all_updates(QBank&, const TransitionRecord&, const LearnerConfig&);

  struct LabelTransition {
    double reward = 0.0;
    int next_table = kFalseIndex;
  };

  static int pack(env::Cell s, env::Action a) {
    return ((s.x << 12) | s.y) << 2 | static_cast<int>(a);
  }

  std::size_t index_of(const std::string& key) const;
  int label_id(const ltl::TruthAssignment& sigma);
  const LabelTransition& transition(std::size_t table, int label);
  void update_one(std::size_t table, const TransitionRecord& t,
                  const LearnerConfig& config);

  std::vector<std::string> keys_;            // sorted canonical renderings
  std::vector<ltl::Formula> formulas_;       // parallel to keys_
  std::map<std::string, std::size_t> index_;
  std::vector<std::unordered_map<int, double>> tables_;

  // Progression cache: per table, per interned label, the counterfactual
  // reward and successor table.
  std::map<std::string, int> label_ids_;
  std::vector<std::vector<std::optional<LabelTransition>>> transitions_;
};

/// Zero-initialised bank keyed by progression_closure(tasks).
QBank init_bank(const std::vector<ltl::Formula>& tasks);

/// Eq.-style tabular update for one table:
///   Q(s,a) += alpha * (r + gamma * max_a' Q_next(s',a') - Q(s,a))
/// where (r, next) = counterfactual_reward(f, t.next_label) and the bootstrap
/// is 0 when the progressed form is TrueConst or FalseConst.
void q_update(QBank& bank, const ltl::Formula& f, const TransitionRecord& t,
              const LearnerConfig& config);

/// q_update applied to every table for the same transition, in sorted key
/// order.
void all_updates(QBank& bank, const TransitionRecord& t, const LearnerConfig& config);

/// Behavior action choice. UniformRandom ignores the bank. Epsilon-greedy
/// draws one uniform per call and breaks argmax ties uniformly.
env::Action choose_action(const QBank& bank, const ltl::Formula& current_task_form,
                          env::Cell s, PolicyKind policy, double epsilon,
                          util::Rng& rng);

struct EpisodeResult {
  std::vector<TransitionRecord> transitions;
  double episode_return = 0.0;  // gamma^n at the satisfaction step, else 0
  int steps = 0;
  bool satisfied = false;
};

/// Runs one training episode: behavior conditioned on the progressed form of
/// `given`, off-policy updates to every table on every transition. The
/// initial state's label is consumed before the first step. Ends at
/// TrueConst/FalseConst or the step cap. Visited cells (one per step) are
/// recorded into `heatmap` when non-null.
EpisodeResult run_episode(const env::GridMap& map, QBank& bank,
                          const ltl::Formula& given, PolicyKind policy,
                          const LearnerConfig& config, util::Rng& action_rng,
                          env::Heatmap* heatmap = nullptr);

struct EvalResult {
  bool success = false;
  double discounted_return = 0.0;
  int steps = 0;
};

/// Greedy (epsilon = 0) rollout with progression switching and deterministic
/// tie-breaks (first action in Up, Down, Left, Right order). Performs no
/// learning updates and never mutates the bank.
EvalResult evaluate(const QBank& bank, const ltl::Formula& task,
                    const env::GridMap& map, const LearnerConfig& config);

/// Minimum number of steps satisfying the task from the start cell, by BFS
/// over (cell, progressed form). Throws InfeasibleTaskError when no prefix
/// satisfies the task.
int min_steps_to_satisfy(const env::GridMap& map, const ltl::Formula& task);

/// discounted_return / gamma^(L*) with L* = min_steps_to_satisfy(map, task).
double normalized_return(double discounted_return, const ltl::Formula& task,
                         const env::GridMap& map, double gamma);

}  // namespace auxrl::learn
