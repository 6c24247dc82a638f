#include "auxrl/gen/taskgen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "auxrl/ltl/progression.hpp"
#include "auxrl/util/errors.hpp"
#include "auxrl/util/rng.hpp"

namespace auxrl::gen {

using ltl::Formula;

namespace {

void collect_template_nodes(const Formula& f, const embed::EmbeddingStore& store,
                            std::vector<TemplateNode>& out) {
  if (f.kind() == ltl::Kind::Atom) {
    if (!store.contains(f.name())) {
      throw InvalidArgumentError("build_template: no embedding for atom '" +
                                 f.name() + "'");
    }
    out.push_back(TemplateNode{f.name(), store.embedding(f.name())});
    return;
  }
  if (!f.has_children()) return;
  collect_template_nodes(f.left(), store, out);
  if (f.is_binary()) collect_template_nodes(f.right(), store, out);
}

// Rebuilds f with proposition slot `next` (depth-first counter) replaced
// according to `chosen`.
Formula substitute(const Formula& f, const std::vector<std::string>& chosen,
                   std::size_t& next) {
  switch (f.kind()) {
    case ltl::Kind::True:
    case ltl::Kind::False:
      return f;
    case ltl::Kind::Atom:
      return Formula::Atom(chosen[next++]);
    case ltl::Kind::Not:
      return Formula::Not(substitute(f.left(), chosen, next));
    case ltl::Kind::Next:
      return Formula::Next(substitute(f.left(), chosen, next));
    case ltl::Kind::Eventually:
      return Formula::Eventually(substitute(f.left(), chosen, next));
    case ltl::Kind::Always:
      return Formula::Always(substitute(f.left(), chosen, next));
    case ltl::Kind::And: {
      Formula l = substitute(f.left(), chosen, next);
      return Formula::And(std::move(l), substitute(f.right(), chosen, next));
    }
    case ltl::Kind::Or: {
      Formula l = substitute(f.left(), chosen, next);
      return Formula::Or(std::move(l), substitute(f.right(), chosen, next));
    }
    case ltl::Kind::Implies: {
      Formula l = substitute(f.left(), chosen, next);
      return Formula::Implies(std::move(l), substitute(f.right(), chosen, next));
    }
    case ltl::Kind::Until: {
      Formula l = substitute(f.left(), chosen, next);
      return Formula::Until(std::move(l), substitute(f.right(), chosen, next));
    }
  }
  throw std::logic_error("substitute: unhandled kind");
}

std::vector<std::string> top_cosine_neighbours(const TemplateNode& node,
                                               const embed::EmbeddingStore& store,
                                               std::size_t count) {
  std::vector<std::pair<double, std::string>> scored;
  for (const auto& prop : store.propositions()) {
    scored.emplace_back(embed::cosine_similarity(node.embedding, store.embedding(prop)),
                        prop);
  }
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < scored.size() && i < count; ++i) {
    out.push_back(scored[i].second);
  }
  return out;
}

}  // namespace

TaskTemplate build_template(const Formula& f, const embed::EmbeddingStore& store) {
  TaskTemplate tmpl;
  tmpl.source = f;
  tmpl.skeleton = ltl::ast_graph(f);
  collect_template_nodes(f, store, tmpl.nodes);
  return tmpl;
}

std::string select_object(const TemplateNode& node,
                          const std::vector<std::string>& candidates,
                          SelectionState& state, const embed::EmbeddingStore& store) {
  if (candidates.empty()) {
    throw InvalidArgumentError("select_object: empty candidate list");
  }
  std::vector<std::string> sorted = candidates;
  std::sort(sorted.begin(), sorted.end());

  std::string best;
  double best_score = -std::numeric_limits<double>::infinity();
  for (const auto& obj : sorted) {
    const double sim = embed::cosine_similarity(node.embedding, store.embedding(obj));
    double score = sim;
    if (state.exploration_c > 0.0) {
      const std::uint64_t n_obj = state.count_of(obj);
      if (n_obj == 0) {
        score = std::numeric_limits<double>::infinity();
      } else {
        score += state.exploration_c *
                 std::sqrt(std::log(static_cast<double>(state.total_trials)) /
                           static_cast<double>(n_obj));
      }
    }
    if (score > best_score) {
      best_score = score;
      best = obj;
    }
  }
  ++state.per_object_counts[best];
  ++state.total_trials;
  return best;
}

AuxiliaryTaskSet generate_auxiliary_tasks(const TaskTemplate& tmpl,
                                          const embed::ClusterModel& model,
                                          const embed::EmbeddingStore& store, int x,
                                          SelectionState& state, std::uint64_t seed) {
  if (x < 1) throw InvalidArgumentError("generate_auxiliary_tasks: x must be >= 1");

  AuxiliaryTaskSet result;
  result.seed = seed;
  result.exploration_c = state.exploration_c;

  const std::string source_key = ltl::to_string(ltl::canonicalize(tmpl.source));
  std::set<std::string> produced;  // canonical keys of emitted tasks

  const std::size_t num_nodes = tmpl.nodes.size();
  // Per-node exclusions, rotated through on structural collisions so a
  // deterministic selector still reaches fresh combinations.
  std::vector<std::set<std::string>> banned(num_nodes);
  std::size_t collisions = 0;

  const int budget = 50 * x;
  for (int attempt = 0; attempt < budget && static_cast<int>(result.tasks.size()) < x;
       ++attempt) {
    std::vector<std::string> chosen;
    std::set<std::string> used;
    bool dead_end = false;
    for (std::size_t i = 0; i < num_nodes; ++i) {
      const TemplateNode& node = tmpl.nodes[i];
      std::vector<std::string> pool;
      for (const auto& p : embed::cluster_members(model, node.source_proposition)) {
        if (!used.count(p)) pool.push_back(p);
      }
      if (pool.empty()) {
        // Small clusters must not abort generation: widen to the nearest
        // cosine neighbours store-wide.
        for (const auto& p : top_cosine_neighbours(node, store, 5)) {
          if (!used.count(p)) pool.push_back(p);
        }
      }
      pool.erase(std::remove_if(pool.begin(), pool.end(),
                                [&](const std::string& p) {
                                  return banned[i].count(p) != 0;
                                }),
                 pool.end());
      if (pool.empty()) {
        dead_end = true;
        break;
      }
      std::string pick = select_object(node, pool, state, store);
      used.insert(pick);
      chosen.push_back(std::move(pick));
    }

    if (!dead_end) {
      std::size_t cursor = 0;
      Formula candidate = substitute(tmpl.source, chosen, cursor);
      const std::string key = ltl::to_string(ltl::canonicalize(candidate));
      if (key != source_key && !produced.count(key)) {
        produced.insert(key);
        result.tasks.push_back(AuxiliaryTask{std::move(candidate), chosen});
        for (auto& b : banned) b.clear();
        continue;
      }
    }

    // Collision (or no viable pool): ban one of this attempt's picks,
    // cycling through the nodes, before retrying.
    if (!chosen.empty()) {
      const std::size_t node_idx = collisions % chosen.size();
      banned[node_idx].insert(chosen[node_idx]);
    }
    ++collisions;
  }

  result.shortfall = static_cast<int>(result.tasks.size()) < x;
  return result;
}

Formula sequence_task(const std::vector<std::string>& props) {
  if (props.empty()) throw InvalidArgumentError("sequence_task: no propositions");
  Formula f = Formula::Eventually(Formula::Atom(props.back()));
  for (std::size_t i = props.size() - 1; i-- > 0;) {
    f = Formula::Eventually(Formula::And(Formula::Atom(props[i]), std::move(f)));
  }
  return f;
}

AuxiliaryTaskSet sample_random_tasks(const std::set<std::string>& propositions,
                                     int length, int x, std::uint64_t seed) {
  if (length < 1) throw InvalidArgumentError("sample_random_tasks: length must be >= 1");
  if (x < 1) throw InvalidArgumentError("sample_random_tasks: x must be >= 1");
  if (static_cast<int>(propositions.size()) < length) {
    throw InvalidArgumentError(
        "sample_random_tasks: insufficient propositions (" +
        std::to_string(propositions.size()) + " < " + std::to_string(length) + ")");
  }

  const std::vector<std::string> universe(propositions.begin(), propositions.end());
  util::Rng rng(seed);

  AuxiliaryTaskSet result;
  result.seed = seed;
  std::set<std::string> produced;

  const int budget = 50 * x;
  for (int attempt = 0; attempt < budget && static_cast<int>(result.tasks.size()) < x;
       ++attempt) {
    // Partial Fisher-Yates: the first `length` entries are a uniform draw
    // of distinct propositions.
    std::vector<std::string> pool = universe;
    std::vector<std::string> picks;
    for (int i = 0; i < length; ++i) {
      const std::size_t j = i + rng.uniform_index(pool.size() - i);
      std::swap(pool[i], pool[j]);
      picks.push_back(pool[i]);
    }
    Formula f = sequence_task(picks);
    const std::string key = ltl::to_string(ltl::canonicalize(f));
    if (produced.count(key)) continue;
    produced.insert(key);
    result.tasks.push_back(AuxiliaryTask{std::move(f), std::move(picks)});
  }
  result.shortfall = static_cast<int>(result.tasks.size()) < x;
  return result;
}

void write_task_set(const AuxiliaryTaskSet& set, const SelectionState* state,
                    const std::filesystem::path& tasks_path,
                    const std::filesystem::path& provenance_path) {
  {
    std::ofstream out(tasks_path);
    if (!out) throw ConfigError("cannot write " + tasks_path.string());
    for (const auto& t : set.tasks) {
      out << ltl::to_string(ltl::canonicalize(t.formula)) << '\n';
    }
  }
  nlohmann::json prov;
  prov["seed"] = set.seed;
  prov["exploration_c"] = set.exploration_c;
  prov["shortfall"] = set.shortfall;
  prov["tasks"] = nlohmann::json::array();
  for (const auto& t : set.tasks) {
    nlohmann::json rec;
    rec["formula"] = ltl::to_string(ltl::canonicalize(t.formula));
    rec["substitution"] = t.substitution;
    prov["tasks"].push_back(std::move(rec));
  }
  if (state != nullptr) {
    prov["selection_counts"] = state->per_object_counts;
    prov["total_trials"] = state->total_trials;
  }
  std::ofstream out(provenance_path);
  if (!out) throw ConfigError("cannot write " + provenance_path.string());
  out << prov.dump(2) << '\n';
}

}  // namespace auxrl::gen
