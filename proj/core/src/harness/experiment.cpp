#include "auxrl/harness/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "auxrl/embed/kmeans.hpp"
#include "auxrl/embed/provider.hpp"
#include "auxrl/ltl/parse.hpp"
#include "auxrl/ltl/progression.hpp"
#include "auxrl/util/errors.hpp"
#include "auxrl/util/rng.hpp"

namespace auxrl::harness {

using nlohmann::json;

const char* condition_name(Condition c) {
  switch (c) {
    case Condition::Ours: return "ours";
    case Condition::RandomBehavior: return "random-behavior";
    case Condition::RandomTasks: return "random-tasks";
  }
  return "?";
}

std::optional<Condition> condition_from_name(const std::string& name) {
  for (Condition c : {Condition::Ours, Condition::RandomBehavior, Condition::RandomTasks}) {
    if (name == condition_name(c)) return c;
  }
  return std::nullopt;
}

void ExperimentConfig::validate() const {
  if (map_path.empty()) throw ConfigError("config: map_path is required");
  if (task.empty()) throw ConfigError("config: task is required");
  if (aux_count < 1) throw ConfigError("config: aux_count must be >= 1");
  if (k < 1) throw ConfigError("config: k must be >= 1");
  if (ucb_c < 0.0) throw ConfigError("config: ucb_c must be >= 0");
  if (seeds.empty()) throw ConfigError("config: seeds must be non-empty");
  if (min_aux_tasks < 0) throw ConfigError("config: min_aux_tasks must be >= 0");
  if (provider.mode != "offline" && provider.mode != "remote" && provider.mode != "stub") {
    throw ConfigError("config: provider.mode must be offline, remote or stub");
  }
  try {
    learner.validate();
  } catch (const InvalidArgumentError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

namespace {

template <typename T>
void read_field(const json& j, const char* key, T& out) {
  if (j.contains(key)) {
    try {
      out = j.at(key).get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(std::string("config: bad value for '") + key + "': " + e.what());
    }
  }
}

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig cfg;
  read_field(j, "map_path", cfg.map_path);
  read_field(j, "task", cfg.task);
  if (j.contains("condition")) {
    const std::string name = j.at("condition").get<std::string>();
    const auto c = condition_from_name(name);
    if (!c) throw ConfigError("config: unknown condition '" + name + "'");
    cfg.condition = *c;
  }
  read_field(j, "aux_count", cfg.aux_count);
  read_field(j, "k", cfg.k);
  read_field(j, "ucb_c", cfg.ucb_c);
  read_field(j, "alpha", cfg.learner.alpha);
  read_field(j, "gamma", cfg.learner.gamma);
  read_field(j, "epsilon", cfg.learner.epsilon);
  read_field(j, "max_steps", cfg.learner.max_steps_per_episode);
  read_field(j, "episodes", cfg.learner.episodes);
  read_field(j, "eval_period", cfg.learner.eval_period);
  read_field(j, "seeds", cfg.seeds);
  if (j.contains("provider")) {
    const json& p = j.at("provider");
    read_field(p, "mode", cfg.provider.mode);
    read_field(p, "describe_url", cfg.provider.describe_url);
    read_field(p, "embed_url", cfg.provider.embed_url);
    read_field(p, "token_env", cfg.provider.token_env);
    read_field(p, "prompt_template", cfg.provider.prompt_template);
  }
  read_field(j, "cache_path", cfg.cache_path);
  read_field(j, "out_dir", cfg.out_dir);
  read_field(j, "min_aux_tasks", cfg.min_aux_tasks);
  return cfg;
}

json config_to_json(const ExperimentConfig& cfg) {
  json j;
  j["map_path"] = cfg.map_path;
  j["task"] = cfg.task;
  j["condition"] = condition_name(cfg.condition);
  j["aux_count"] = cfg.aux_count;
  j["k"] = cfg.k;
  j["ucb_c"] = cfg.ucb_c;
  j["alpha"] = cfg.learner.alpha;
  j["gamma"] = cfg.learner.gamma;
  j["epsilon"] = cfg.learner.epsilon;
  j["max_steps"] = cfg.learner.max_steps_per_episode;
  j["episodes"] = cfg.learner.episodes;
  j["eval_period"] = cfg.learner.eval_period;
  j["seeds"] = cfg.seeds;
  j["provider"]["mode"] = cfg.provider.mode;
  j["provider"]["describe_url"] = cfg.provider.describe_url;
  j["provider"]["embed_url"] = cfg.provider.embed_url;
  j["provider"]["token_env"] = cfg.provider.token_env;
  j["provider"]["prompt_template"] = cfg.provider.prompt_template;
  j["cache_path"] = cfg.cache_path;
  j["out_dir"] = cfg.out_dir;
  j["min_aux_tasks"] = cfg.min_aux_tasks;
  return j;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("bad JSON in " + path.string() + ": " + e.what());
  }
  if (j.contains("config")) j = j.at("config");  // accept manifest.json
  ExperimentConfig cfg = config_from_json(j);
  cfg.validate();
  return cfg;
}

std::string config_to_json_string(const ExperimentConfig& cfg) {
  return config_to_json(cfg).dump(2);
}

embed::EmbeddingStore build_store(const ExperimentConfig& cfg, const env::GridMap& map) {
  std::vector<embed::ObjectName> names;
  for (const auto& o : map.objects()) {
    names.push_back(embed::ObjectName{o.proposition, o.display_name});
  }

  if (cfg.provider.mode == "offline") {
    if (cfg.cache_path.empty()) {
      throw ConfigError("config: offline provider mode needs cache_path");
    }
    embed::EmbeddingStore store = embed::EmbeddingStore::load_jsonl(cfg.cache_path);
    for (const auto& n : names) {
      if (!store.contains(n.proposition)) {
        throw ProviderError("missing fixture entry for '" + n.display_name +
                            "' (proposition '" + n.proposition + "')");
      }
    }
    return store;
  }

  if (cfg.provider.mode == "stub") {
    embed::StubDescriptionProvider desc;
    embed::StubEmbeddingProvider emb(0);
    auto descriptions = embed::describe_objects(names, desc);
    return embed::embed_objects(descriptions, emb);
  }

  // remote
  embed::RemoteEndpointConfig endpoint;
  endpoint.describe_url = cfg.provider.describe_url;
  endpoint.embed_url = cfg.provider.embed_url;
  endpoint.token_env = cfg.provider.token_env;
  endpoint.prompt_template = cfg.provider.prompt_template;
  embed::RemoteDescriptionProvider desc(endpoint);
  embed::RemoteEmbeddingProvider emb(endpoint);
  auto descriptions = embed::describe_objects(names, desc);
  std::optional<std::filesystem::path> cache;
  if (!cfg.cache_path.empty()) cache = cfg.cache_path;
  return embed::embed_objects(descriptions, emb, cache);
}

RunResult run_condition(const ExperimentConfig& cfg, std::uint64_t seed,
                        learn::QBank* final_bank) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();

  const env::GridMap map = env::GridMap::from_file(cfg.map_path);
  const ltl::Formula given = ltl::parse(cfg.task);
  learn::min_steps_to_satisfy(map, given);  // throws when infeasible

  RunResult result;
  result.condition = cfg.condition;
  result.seed = seed;
  result.heatmap = env::Heatmap(map);
  result.selection.exploration_c = cfg.ucb_c;

  // Independent named streams per run.
  util::Rng action_rng(util::derive_stream_seed(seed, "action"));
  const std::uint64_t kmeans_seed = util::derive_stream_seed(seed, "kmeans");
  const std::uint64_t generation_seed = util::derive_stream_seed(seed, "generation");
  const std::uint64_t sampling_seed = util::derive_stream_seed(seed, "task-sampling");

  // Auxiliary task set.
  if (cfg.condition == Condition::RandomTasks) {
    // Same proposition count as the given task keeps the difficulty level.
    std::size_t length = 0;
    for (const auto& node : ltl::ast_graph(given).nodes) {
      if (node.is_proposition) ++length;
    }
    result.tasks = gen::sample_random_tasks(map.propositions(),
                                            static_cast<int>(length), cfg.aux_count,
                                            sampling_seed);
  } else {
    const embed::EmbeddingStore store = build_store(cfg, map);
    const embed::ClusterModel model = embed::kmeans(store, cfg.k, kmeans_seed);
    const gen::TaskTemplate tmpl = gen::build_template(given, store);
    result.tasks = gen::generate_auxiliary_tasks(tmpl, model, store, cfg.aux_count,
                                                 result.selection, generation_seed);
  }
  if (static_cast<int>(result.tasks.tasks.size()) < cfg.min_aux_tasks) {
    throw ConfigError("generation shortfall: produced " +
                      std::to_string(result.tasks.tasks.size()) + " of " +
                      std::to_string(cfg.aux_count) + " tasks (minimum " +
                      std::to_string(cfg.min_aux_tasks) + ")");
  }

  std::vector<ltl::Formula> bank_tasks{given};
  for (const auto& t : result.tasks.tasks) bank_tasks.push_back(t.formula);
  learn::QBank bank = learn::init_bank(bank_tasks);

  const learn::PolicyKind policy = cfg.condition == Condition::RandomBehavior
                                       ? learn::PolicyKind::UniformRandom
                                       : learn::PolicyKind::EpsilonGreedyOnGivenTask;

  // Evaluation is greedy and capped like training but performs no updates.
  const int optimal_steps = learn::min_steps_to_satisfy(map, given);
  const double optimal_return = std::pow(cfg.learner.gamma, optimal_steps);

  for (int episode = 0; episode < cfg.learner.episodes; ++episode) {
    const learn::EpisodeResult ep = learn::run_episode(
        map, bank, given, policy, cfg.learner, action_rng, &result.heatmap);
    result.total_behavior_steps += ep.steps;

    if ((episode + 1) % cfg.learner.eval_period == 0) {
      EvalPoint point;
      point.episode = episode + 1;
      const learn::EvalResult given_eval = learn::evaluate(bank, given, map, cfg.learner);
      point.given_norm_return = given_eval.discounted_return / optimal_return;
      double successes = 0.0;
      for (const auto& aux : result.tasks.tasks) {
        if (learn::evaluate(bank, aux.formula, map, cfg.learner).success) {
          successes += 1.0;
        }
      }
      point.aux_success_rate =
          result.tasks.tasks.empty() ? 0.0 : successes / result.tasks.tasks.size();
      result.series.push_back(point);
    }
  }

  if (final_bank != nullptr) *final_bank = bank;
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

std::vector<AggregatePoint> aggregate(const std::vector<RunResult>& results) {
  if (results.empty()) return {};
  const std::size_t len = results.front().series.size();
  for (const auto& r : results) {
    if (r.series.size() != len) {
      throw InvalidArgumentError("aggregate: series length mismatch");
    }
  }
  std::vector<AggregatePoint> out(len);
  const double n = static_cast<double>(results.size());
  for (std::size_t i = 0; i < len; ++i) {
    AggregatePoint& p = out[i];
    p.episode = results.front().series[i].episode;
    double sg = 0, sa = 0;
    for (const auto& r : results) {
      sg += r.series[i].given_norm_return;
      sa += r.series[i].aux_success_rate;
    }
    p.mean_given = sg / n;
    p.mean_aux = sa / n;
    double vg = 0, va = 0;
    for (const auto& r : results) {
      vg += (r.series[i].given_norm_return - p.mean_given) *
            (r.series[i].given_norm_return - p.mean_given);
      va += (r.series[i].aux_success_rate - p.mean_aux) *
            (r.series[i].aux_success_rate - p.mean_aux);
    }
    p.std_given = std::sqrt(vg / n);  // population stddev
    p.std_aux = std::sqrt(va / n);
  }
  return out;
}

void emit(const std::vector<RunResult>& results, const ExperimentConfig& cfg,
          const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);

  {
    std::ofstream curves(out_dir / "curves.csv");
    if (!curves) throw ConfigError("cannot write " + (out_dir / "curves.csv").string());
    curves << "condition,seed,episode,given_norm_return,aux_success_rate\n";
    for (const auto& r : results) {
      for (const auto& p : r.series) {
        curves << condition_name(r.condition) << ',' << r.seed << ',' << p.episode
               << ',' << format_double(p.given_norm_return) << ','
               << format_double(p.aux_success_rate) << '\n';
      }
    }
  }

  {
    // Group by condition, preserving first-appearance order.
    std::vector<Condition> order;
    std::map<Condition, std::vector<RunResult>> groups;
    for (const auto& r : results) {
      if (!groups.count(r.condition)) order.push_back(r.condition);
      groups[r.condition].push_back(r);
    }
    std::ofstream agg(out_dir / "aggregate.csv");
    agg << "condition,episode,mean_given_norm_return,std_given_norm_return,"
           "mean_aux_success_rate,std_aux_success_rate\n";
    for (Condition c : order) {
      for (const auto& p : aggregate(groups[c])) {
        agg << condition_name(c) << ',' << p.episode << ',' << format_double(p.mean_given)
            << ',' << format_double(p.std_given) << ',' << format_double(p.mean_aux)
            << ',' << format_double(p.std_aux) << '\n';
      }
    }
  }

  for (const auto& r : results) {
    const std::string stem =
        std::string(condition_name(r.condition)) + "_" + std::to_string(r.seed);
    {
      std::ofstream heat(out_dir / ("heatmap_" + stem + ".csv"));
      r.heatmap.write_csv(heat);
    }
    gen::write_task_set(r.tasks, &r.selection, out_dir / ("tasks_" + stem + ".txt"),
                        out_dir / ("tasks_" + stem + ".provenance.json"));
  }

  {
    json manifest;
    manifest["auxrl_version"] = "0.1.0";
    manifest["config"] = config_to_json(cfg);
    std::ofstream out(out_dir / "manifest.json");
    out << manifest.dump(2) << '\n';
  }
}

}  // namespace auxrl::harness
