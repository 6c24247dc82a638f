#include "auxrl/learn/learner.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>

#include <json.hpp>

#include "auxrl/ltl/parse.hpp"
#include "auxrl/ltl/progression.hpp"
#include "auxrl/util/errors.hpp"

namespace auxrl::learn {

using ltl::Formula;

void LearnerConfig::validate() const {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw InvalidArgumentError("LearnerConfig: alpha must be in (0,1]");
  }
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    throw InvalidArgumentError("LearnerConfig: gamma must be in [0,1]");
  }
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw InvalidArgumentError("LearnerConfig: epsilon must be in [0,1]");
  }
  if (max_steps_per_episode < 1) {
    throw InvalidArgumentError("LearnerConfig: max_steps_per_episode must be >= 1");
  }
  if (episodes < 0) throw InvalidArgumentError("LearnerConfig: episodes must be >= 0");
  if (eval_period < 1) throw InvalidArgumentError("LearnerConfig: eval_period must be >= 1");
}

std::pair<double, Formula> counterfactual_reward(const Formula& f,
                                                 const ltl::TruthAssignment& next_label) {
  Formula next = ltl::progress(f, next_label);
  return {next.is_true() ? 1.0 : 0.0, next};
}

bool QBank::has_table(const Formula& f) const {
  return has_table(ltl::to_string(ltl::canonicalize(f)));
}

std::size_t QBank::index_of(const std::string& key) const {
  auto it = index_.find(key);
  if (it == index_.end()) {
    throw InvalidArgumentError("QBank: no table for formula '" + key + "'");
  }
  return it->second;
}

double QBank::q(const std::string& key, env::Cell s, env::Action a) const {
  const auto& table = tables_[index_of(key)];
  auto it = table.find(pack(s, a));
  return it == table.end() ? 0.0 : it->second;
}

double QBank::max_q(const std::string& key, env::Cell s) const {
  double best = 0.0;
  const auto& table = tables_[index_of(key)];
  for (env::Action a : env::kAllActions) {
    auto it = table.find(pack(s, a));
    const double v = it == table.end() ? 0.0 : it->second;
    if (v > best) best = v;
  }
  return best;
}

int QBank::label_id(const ltl::TruthAssignment& sigma) {
  const std::string key = ltl::assignment_key(sigma);
  auto it = label_ids_.find(key);
  if (it != label_ids_.end()) return it->second;
  const int id = static_cast<int>(label_ids_.size());
  label_ids_.emplace(key, id);
  return id;
}

const QBank::LabelTransition& QBank::transition(std::size_t table, int label) {
  auto& row = transitions_[table];
  if (static_cast<std::size_t>(label) >= row.size()) row.resize(label + 1);
  std::optional<LabelTransition>& slot = row[label];
  if (!slot) {
    // Reconstruct the assignment from its key; cheap and done once per
    // (table, label) pair.
    std::string key;
    for (const auto& [k, id] : label_ids_) {
      if (id == label) {
        key = k;
        break;
      }
    }
    ltl::TruthAssignment sigma;
    std::size_t pos = 0;
    while (pos < key.size()) {
      const std::size_t comma = key.find(',', pos);
      const std::size_t end = comma == std::string::npos ? key.size() : comma;
      sigma.insert(key.substr(pos, end - pos));
      pos = end + 1;
    }
    auto [reward, next] = counterfactual_reward(formulas_[table], sigma);
    LabelTransition t;
    t.reward = reward;
    if (next.is_true()) {
      t.next_table = kTrueIndex;
    } else if (next.is_false()) {
      t.next_table = kFalseIndex;
    } else {
      t.next_table = static_cast<int>(index_of(ltl::to_string(next)));
    }
    slot = t;
  }
  return *slot;
}

int QBank::chain_start(const ltl::Formula& f) const {
  const Formula canon = ltl::canonicalize(f);
  if (canon.is_true()) return kTrueIndex;
  if (canon.is_false()) return kFalseIndex;
  return static_cast<int>(index_of(ltl::to_string(canon)));
}

int QBank::chain_advance(int index, const ltl::TruthAssignment& label) {
  if (index < 0) return index;
  return transition(static_cast<std::size_t>(index), label_id(label)).next_table;
}

void QBank::update_one(std::size_t table, const TransitionRecord& t,
                       const LearnerConfig& config) {
  const LabelTransition& lt = transition(table, label_id(t.next_label));
  double bootstrap = 0.0;
  if (lt.next_table >= 0) {
    const auto& next_q = tables_[lt.next_table];
    for (env::Action a : env::kAllActions) {
      auto it = next_q.find(pack(t.next_state, a));
      if (it != next_q.end() && it->second > bootstrap) bootstrap = it->second;
    }
  }
  double& q = tables_[table][pack(t.state, t.action)];
  q += config.alpha * (lt.reward + config.gamma * bootstrap - q);
}

QBank init_bank(const std::vector<Formula>& tasks) {
  const std::vector<Formula> closure = ltl::progression_closure(tasks);
  QBank bank;
  for (const auto& f : closure) {
    bank.keys_.push_back(ltl::to_string(f));
    bank.formulas_.push_back(f);
  }
  for (std::size_t i = 0; i < bank.keys_.size(); ++i) bank.index_[bank.keys_[i]] = i;
  bank.tables_.resize(bank.keys_.size());
  bank.transitions_.resize(bank.keys_.size());
  return bank;
}

void q_update(QBank& bank, const Formula& f, const TransitionRecord& t,
              const LearnerConfig& config) {
  bank.update_one(bank.index_of(ltl::to_string(ltl::canonicalize(f))), t, config);
}

void all_updates(QBank& bank, const TransitionRecord& t, const LearnerConfig& config) {
  for (std::size_t i = 0; i < bank.tables_.size(); ++i) {
    bank.update_one(i, t, config);
  }
}

env::Action choose_action(const QBank& bank, const Formula& current_task_form,
                          env::Cell s, PolicyKind policy, double epsilon,
                          util::Rng& rng) {
  if (policy == PolicyKind::UniformRandom) {
    return env::kAllActions[rng.uniform_index(4)];
  }
  if (current_task_form.is_constant()) {
    throw InvalidArgumentError("choose_action: episode is already over");
  }
  const std::string key = ltl::to_string(ltl::canonicalize(current_task_form));
  if (!bank.has_table(key)) {
    throw InvalidArgumentError("choose_action: no table for '" + key + "'");
  }
  if (rng.next_double() < epsilon) {
    return env::kAllActions[rng.uniform_index(4)];
  }
  double best = -std::numeric_limits<double>::infinity();
  std::vector<env::Action> argmax;
  for (env::Action a : env::kAllActions) {
    const double v = bank.q(key, s, a);
    if (v > best) {
      best = v;
      argmax.clear();
      argmax.push_back(a);
    } else if (v == best) {
      argmax.push_back(a);
    }
  }
  if (argmax.size() == 1) return argmax.front();
  return argmax[rng.uniform_index(argmax.size())];
}

EpisodeResult run_episode(const env::GridMap& map, QBank& bank, const Formula& given,
                          PolicyKind policy, const LearnerConfig& config,
                          util::Rng& action_rng, env::Heatmap* heatmap) {
  EpisodeResult result;
  env::EnvState s = env::reset(map);
  // The initial state's label counts (satisfaction index n = 0).
  int chain = bank.chain_advance(bank.chain_start(given), env::label(map, s));
  if (chain == QBank::kTrueIndex) {
    result.satisfied = true;
    result.episode_return = 1.0;  // gamma^0
    return result;
  }

  while (s.steps_taken < config.max_steps_per_episode && chain >= 0) {
    const env::Action a =
        choose_action(bank, bank.formula_at(chain), s.agent_cell, policy,
                      config.epsilon, action_rng);
    const env::EnvState next = env::step(map, s, a);
    TransitionRecord t{s.agent_cell, a, next.agent_cell, env::label(map, next)};
    all_updates(bank, t, config);
    if (heatmap != nullptr) env::record_visit(*heatmap, next);
    chain = bank.chain_advance(chain, t.next_label);
    result.transitions.push_back(std::move(t));
    s = next;
    if (chain == QBank::kTrueIndex) {
      result.satisfied = true;
      result.episode_return = std::pow(config.gamma, s.steps_taken);
      break;
    }
  }
  result.steps = s.steps_taken;
  return result;
}

EvalResult evaluate(const QBank& bank, const Formula& task, const env::GridMap& map,
                    const LearnerConfig& config) {
  EvalResult result;
  env::EnvState s = env::reset(map);
  Formula form = ltl::progress(ltl::canonicalize(task), env::label(map, s));
  if (form.is_true()) {
    return EvalResult{true, 1.0, 0};
  }

  while (s.steps_taken < config.max_steps_per_episode && !form.is_constant()) {
    const std::string key = ltl::to_string(form);
    // Greedy with a fixed tie-break: first maximiser in action order.
    env::Action best_action = env::Action::Up;
    double best = -std::numeric_limits<double>::infinity();
    for (env::Action a : env::kAllActions) {
      const double v = bank.q(key, s.agent_cell, a);
      if (v > best) {
        best = v;
        best_action = a;
      }
    }
    s = env::step(map, s, best_action);
    form = ltl::progress(form, env::label(map, s));
    if (form.is_true()) {
      result.success = true;
      result.discounted_return = std::pow(config.gamma, s.steps_taken);
      break;
    }
  }
  result.steps = s.steps_taken;
  return result;
}

int min_steps_to_satisfy(const env::GridMap& map, const Formula& task) {
  const Formula canon = ltl::canonicalize(task);
  if (canon.is_false()) throw InfeasibleTaskError("task is unsatisfiable");

  constexpr int kTrueId = -1;
  constexpr int kFalseId = -2;

  // Progressed-form interning for the product-space search.
  std::vector<Formula> forms;
  std::map<std::string, int> form_ids;
  const auto intern = [&](const Formula& f) -> int {
    if (f.is_true()) return kTrueId;
    if (f.is_false()) return kFalseId;
    const std::string key = ltl::to_string(f);
    auto it = form_ids.find(key);
    if (it != form_ids.end()) return it->second;
    const int id = static_cast<int>(forms.size());
    forms.push_back(f);
    form_ids.emplace(key, id);
    return id;
  };

  const env::EnvState start = env::reset(map);
  const int f0 = intern(ltl::progress(canon, env::label(map, start)));
  if (f0 == kTrueId) return 0;
  if (f0 == kFalseId) throw InfeasibleTaskError("task fails on the start cell");

  std::set<std::pair<int, std::pair<int, int>>> visited;
  std::deque<std::pair<std::pair<int, env::Cell>, int>> queue;  // ((form, cell), depth)
  queue.push_back({{f0, start.agent_cell}, 0});
  visited.insert({f0, {start.agent_cell.x, start.agent_cell.y}});

  while (!queue.empty()) {
    auto [node, depth] = queue.front();
    queue.pop_front();
    const auto [form_id, cell] = node;
    for (env::Action a : env::kAllActions) {
      const env::EnvState next = env::step(map, env::EnvState{cell, 0}, a);
      if (next.agent_cell == cell) continue;  // blocked moves never help
      const Formula next_form =
          ltl::progress(forms[form_id], env::label(map, next));
      if (next_form.is_true()) return depth + 1;
      if (next_form.is_false()) continue;
      const int next_id = intern(next_form);
      if (visited.insert({next_id, {next.agent_cell.x, next.agent_cell.y}}).second) {
        queue.push_back({{next_id, next.agent_cell}, depth + 1});
      }
    }
  }
  throw InfeasibleTaskError("task '" + ltl::to_string(canon) +
                            "' is unreachable from the start cell");
}

double normalized_return(double discounted_return, const Formula& task,
                         const env::GridMap& map, double gamma) {
  const int optimal = min_steps_to_satisfy(map, task);
  const double best = std::pow(gamma, optimal);
  if (best <= 0.0) {
    throw InvalidArgumentError("normalized_return: gamma^L* is zero");
  }
  return discounted_return / best;
}

namespace {

nlohmann::json action_token(env::Action a) { return env::action_name(a); }

}  // namespace

void QBank::dump_json(const std::filesystem::path& path) const {
  nlohmann::json doc = nlohmann::json::object();
  for (std::size_t i = 0; i < keys_.size(); ++i) {
    // Deterministic entry order: by (x, y, action).
    std::vector<std::tuple<int, int, int, double>> rows;
    for (const auto& [packed, value] : tables_[i]) {
      const int action = packed & 3;
      const int xy = packed >> 2;
      rows.emplace_back(xy >> 12, xy & 0xfff, action, value);
    }
    std::sort(rows.begin(), rows.end());
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& [x, y, action, value] : rows) {
      entries.push_back({x, y, action_token(static_cast<env::Action>(action)), value});
    }
    doc[keys_[i]] = std::move(entries);
  }
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

QBank QBank::load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("bad Q-bank file " + path.string() + ": " + e.what());
  }
  QBank bank;
  for (const auto& [key, entries] : doc.items()) bank.keys_.push_back(key);
  std::sort(bank.keys_.begin(), bank.keys_.end());
  for (const auto& k : bank.keys_) {
    bank.formulas_.push_back(ltl::canonicalize(ltl::parse(k)));
    bank.index_[k] = bank.formulas_.size() - 1;
  }
  bank.tables_.resize(bank.keys_.size());
  bank.transitions_.resize(bank.keys_.size());
  for (const auto& [key, entries] : doc.items()) {
    auto& table = bank.tables_[bank.index_.at(key)];
    for (const auto& row : entries) {
      const int x = row.at(0).get<int>();
      const int y = row.at(1).get<int>();
      const auto action = env::action_from_name(row.at(2).get<std::string>());
      if (!action) throw ConfigError("bad action name in " + path.string());
      table[pack(env::Cell{x, y}, *action)] = row.at(3).get<double>();
    }
  }
  return bank;
}

}  // namespace auxrl::learn
