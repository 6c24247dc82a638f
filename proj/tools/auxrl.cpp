// auxrl command line tool: embedding cache construction, clustering,
// auxiliary task generation, training, evaluation and the full experiment
// protocol.
//
// Exit codes: 0 success, 1 configuration error, 2 provider error,
// 3 infeasible task.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "auxrl/embed/kmeans.hpp"
#include "auxrl/embed/provider.hpp"
#include "auxrl/harness/experiment.hpp"
#include "auxrl/ltl/parse.hpp"
#include "auxrl/ltl/progression.hpp"
#include "auxrl/util/errors.hpp"
#include "auxrl/util/rng.hpp"

namespace {

using namespace auxrl;

struct Overrides {
  std::optional<std::string> map_path, task, condition, cache_path, out_dir,
      provider_mode;
  std::optional<int> aux_count, k, max_steps, episodes, eval_period, min_aux_tasks;
  std::optional<double> ucb_c, alpha, gamma, epsilon;
  std::optional<std::vector<std::uint64_t>> seeds;
};

// Every subcommand shares the config-plus-override flags.
void add_common_flags(CLI::App* cmd, std::string& config_path, Overrides& ov) {
  cmd->add_option("--config", config_path, "JSON config file (or manifest.json)")
      ->required();
  cmd->add_option("--map", ov.map_path, "override map_path");
  cmd->add_option("--task", ov.task, "override task formula");
  cmd->add_option("--condition", ov.condition,
                  "override condition: ours | random-behavior | random-tasks");
  cmd->add_option("--aux-count", ov.aux_count, "override aux_count");
  cmd->add_option("--k", ov.k, "override cluster count");
  cmd->add_option("--ucb-c", ov.ucb_c, "override UCB exploration constant");
  cmd->add_option("--alpha", ov.alpha, "override learning rate");
  cmd->add_option("--gamma", ov.gamma, "override discount");
  cmd->add_option("--epsilon", ov.epsilon, "override exploration rate");
  cmd->add_option("--max-steps", ov.max_steps, "override max_steps");
  cmd->add_option("--episodes", ov.episodes, "override episodes");
  cmd->add_option("--eval-period", ov.eval_period, "override eval_period");
  cmd->add_option("--seeds", ov.seeds, "override seeds (space separated)");
  cmd->add_option("--provider-mode", ov.provider_mode,
                  "override provider.mode: offline | remote | stub");
  cmd->add_option("--cache", ov.cache_path, "override cache_path");
  cmd->add_option("--out-dir", ov.out_dir, "override out_dir");
  cmd->add_option("--min-aux-tasks", ov.min_aux_tasks, "override min_aux_tasks");
}

harness::ExperimentConfig resolve_config(const std::string& config_path,
                                         const Overrides& ov) {
  harness::ExperimentConfig cfg = harness::load_config(config_path);
  if (ov.map_path) cfg.map_path = *ov.map_path;
  if (ov.task) cfg.task = *ov.task;
  if (ov.condition) {
    const auto c = harness::condition_from_name(*ov.condition);
    if (!c) throw ConfigError("unknown condition '" + *ov.condition + "'");
    cfg.condition = *c;
  }
  if (ov.aux_count) cfg.aux_count = *ov.aux_count;
  if (ov.k) cfg.k = *ov.k;
  if (ov.ucb_c) cfg.ucb_c = *ov.ucb_c;
  if (ov.alpha) cfg.learner.alpha = *ov.alpha;
  if (ov.gamma) cfg.learner.gamma = *ov.gamma;
  if (ov.epsilon) cfg.learner.epsilon = *ov.epsilon;
  if (ov.max_steps) cfg.learner.max_steps_per_episode = *ov.max_steps;
  if (ov.episodes) cfg.learner.episodes = *ov.episodes;
  if (ov.eval_period) cfg.learner.eval_period = *ov.eval_period;
  if (ov.seeds) cfg.seeds = *ov.seeds;
  if (ov.provider_mode) cfg.provider.mode = *ov.provider_mode;
  if (ov.cache_path) cfg.cache_path = *ov.cache_path;
  if (ov.out_dir) cfg.out_dir = *ov.out_dir;
  if (ov.min_aux_tasks) cfg.min_aux_tasks = *ov.min_aux_tasks;
  cfg.validate();
  return cfg;
}

int cmd_embed(const harness::ExperimentConfig& cfg) {
  const env::GridMap map = env::GridMap::from_file(cfg.map_path);
  const embed::EmbeddingStore store = harness::build_store(cfg, map);
  if (cfg.cache_path.empty()) throw ConfigError("embed: cache_path is required");
  store.save_jsonl(cfg.cache_path);
  std::cout << "wrote " << store.size() << " embeddings to " << cfg.cache_path << "\n";
  return 0;
}

int cmd_cluster(const harness::ExperimentConfig& cfg, std::uint64_t seed,
                const std::string& out_file) {
  const env::GridMap map = env::GridMap::from_file(cfg.map_path);
  const embed::EmbeddingStore store = harness::build_store(cfg, map);
  const embed::ClusterModel model =
      embed::kmeans(store, cfg.k, util::derive_stream_seed(seed, "kmeans"));
  const std::filesystem::path out =
      out_file.empty() ? std::filesystem::path(cfg.out_dir) / "clusters.csv"
                       : std::filesystem::path(out_file);
  std::filesystem::create_directories(out.parent_path().empty() ? "." : out.parent_path());
  std::ofstream os(out);
  if (!os) throw ConfigError("cannot write " + out.string());
  os << "proposition,cluster\n";
  for (const auto& [prop, cluster] : model.assignment) {
    os << prop << ',' << cluster << '\n';
  }
  std::cout << "k=" << model.k << " inertia=" << model.inertia << " iterations="
            << model.inertia_history.size() << " -> " << out.string() << "\n";
  return 0;
}

int cmd_gen_tasks(const harness::ExperimentConfig& cfg, std::uint64_t seed) {
  const env::GridMap map = env::GridMap::from_file(cfg.map_path);
  const ltl::Formula given = ltl::parse(cfg.task);

  gen::AuxiliaryTaskSet tasks;
  gen::SelectionState state;
  state.exploration_c = cfg.ucb_c;
  if (cfg.condition == harness::Condition::RandomTasks) {
    std::size_t length = 0;
    for (const auto& node : ltl::ast_graph(given).nodes) {
      if (node.is_proposition) ++length;
    }
    tasks = gen::sample_random_tasks(map.propositions(), static_cast<int>(length),
                                     cfg.aux_count,
                                     util::derive_stream_seed(seed, "task-sampling"));
  } else {
    const embed::EmbeddingStore store = harness::build_store(cfg, map);
    const embed::ClusterModel model =
        embed::kmeans(store, cfg.k, util::derive_stream_seed(seed, "kmeans"));
    const gen::TaskTemplate tmpl = gen::build_template(given, store);
    tasks = gen::generate_auxiliary_tasks(tmpl, model, store, cfg.aux_count, state,
                                          util::derive_stream_seed(seed, "generation"));
  }

  std::filesystem::create_directories(cfg.out_dir);
  const std::string stem = std::string("tasks_") +
                           harness::condition_name(cfg.condition) + "_" +
                           std::to_string(seed);
  const auto tasks_path = std::filesystem::path(cfg.out_dir) / (stem + ".txt");
  const auto prov_path =
      std::filesystem::path(cfg.out_dir) / (stem + ".provenance.json");
  gen::write_task_set(tasks, &state, tasks_path, prov_path);
  std::cout << "generated " << tasks.tasks.size() << " tasks"
            << (tasks.shortfall ? " (shortfall)" : "") << " -> " << tasks_path.string()
            << "\n";
  return 0;
}

int cmd_train(const harness::ExperimentConfig& cfg, std::uint64_t seed) {
  learn::QBank bank;
  const harness::RunResult result = harness::run_condition(cfg, seed, &bank);
  harness::emit({result}, cfg, cfg.out_dir);
  const std::string stem = std::string(harness::condition_name(cfg.condition)) + "_" +
                           std::to_string(seed);
  const auto bank_path = std::filesystem::path(cfg.out_dir) / ("qbank_" + stem + ".json");
  bank.dump_json(bank_path);
  std::cout << "condition=" << harness::condition_name(cfg.condition) << " seed=" << seed
            << " episodes=" << cfg.learner.episodes << " steps="
            << result.total_behavior_steps << " tables=" << bank.table_count()
            << " wall=" << result.wall_seconds << "s\n";
  if (!result.series.empty()) {
    const auto& last = result.series.back();
    std::cout << "final: given_norm_return=" << last.given_norm_return
              << " aux_success_rate=" << last.aux_success_rate << "\n";
  }
  std::cout << "bank -> " << bank_path.string() << "\n";
  return 0;
}

int cmd_eval(const harness::ExperimentConfig& cfg, const std::string& bank_file,
             const std::string& task_text) {
  const env::GridMap map = env::GridMap::from_file(cfg.map_path);
  const learn::QBank bank = learn::QBank::load_json(bank_file);
  const ltl::Formula task = ltl::parse(task_text.empty() ? cfg.task : task_text);
  const learn::EvalResult r = learn::evaluate(bank, task, map, cfg.learner);
  const double norm =
      learn::normalized_return(r.discounted_return, task, map, cfg.learner.gamma);
  std::cout << "task: " << ltl::to_string(ltl::canonicalize(task)) << "\n"
            << "success: " << (r.success ? "true" : "false") << "\n"
            << "steps: " << r.steps << "\n"
            << "discounted_return: " << r.discounted_return << "\n"
            << "normalized_return: " << norm << "\n";
  return 0;
}

int cmd_experiment(const harness::ExperimentConfig& cfg) {
  std::vector<harness::RunResult> results;
  for (harness::Condition condition :
       {harness::Condition::Ours, harness::Condition::RandomBehavior,
        harness::Condition::RandomTasks}) {
    harness::ExperimentConfig run_cfg = cfg;
    run_cfg.condition = condition;
    for (std::uint64_t seed : cfg.seeds) {
      results.push_back(harness::run_condition(run_cfg, seed));
      const auto& r = results.back();
      std::cout << harness::condition_name(condition) << " seed=" << seed << " steps="
                << r.total_behavior_steps << " wall=" << r.wall_seconds << "s";
      if (!r.series.empty()) {
        std::cout << " given=" << r.series.back().given_norm_return
                  << " aux=" << r.series.back().aux_success_rate;
      }
      std::cout << std::endl;
    }
  }
  harness::emit(results, cfg, cfg.out_dir);
  std::cout << "wrote results to " << cfg.out_dir << "\n";
  return 0;
}

int cmd_heatmap(const harness::ExperimentConfig& cfg, std::uint64_t seed,
                const std::string& out_file) {
  const harness::RunResult result = harness::run_condition(cfg, seed);
  const std::filesystem::path out =
      out_file.empty()
          ? std::filesystem::path(cfg.out_dir) /
                ("heatmap_" + std::string(harness::condition_name(cfg.condition)) + "_" +
                 std::to_string(seed) + ".csv")
          : std::filesystem::path(out_file);
  if (!out.parent_path().empty()) std::filesystem::create_directories(out.parent_path());
  std::ofstream os(out);
  if (!os) throw ConfigError("cannot write " + out.string());
  result.heatmap.write_csv(os);
  std::cout << "total steps: " << result.heatmap.total() << " -> " << out.string()
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multitask temporal-logic reinforcement learning in grid worlds"};
  app.require_subcommand(1);

  std::string config_path;
  Overrides ov;
  std::uint64_t seed_flag = 0;
  bool seed_given = false;
  std::string out_file, bank_file, task_text;

  CLI::App* embed_cmd = app.add_subcommand("embed", "build or refresh the embedding cache");
  add_common_flags(embed_cmd, config_path, ov);

  CLI::App* cluster_cmd = app.add_subcommand("cluster", "k-means over the embedding store");
  add_common_flags(cluster_cmd, config_path, ov);
  cluster_cmd->add_option("--seed", seed_flag, "clustering seed")->each([&](auto) {
    seed_given = true;
  });
  cluster_cmd->add_option("--out", out_file, "output CSV path");

  CLI::App* gen_cmd = app.add_subcommand("gen-tasks", "generate auxiliary tasks");
  add_common_flags(gen_cmd, config_path, ov);
  gen_cmd->add_option("--seed", seed_flag, "generation seed")->each([&](auto) {
    seed_given = true;
  });

  CLI::App* train_cmd = app.add_subcommand("train", "train one condition/seed run");
  add_common_flags(train_cmd, config_path, ov);
  train_cmd->add_option("--seed", seed_flag, "run seed")->each([&](auto) {
    seed_given = true;
  });

  CLI::App* eval_cmd = app.add_subcommand("eval", "greedy evaluation from a Q-bank dump");
  add_common_flags(eval_cmd, config_path, ov);
  eval_cmd->add_option("--qbank", bank_file, "Q-bank JSON dump")->required();
  eval_cmd->add_option("--eval-task", task_text, "task to evaluate (default: config task)");

  CLI::App* exp_cmd =
      app.add_subcommand("experiment", "full three-condition protocol over all seeds");
  add_common_flags(exp_cmd, config_path, ov);

  CLI::App* heat_cmd = app.add_subcommand("heatmap", "train one run, write its heatmap");
  add_common_flags(heat_cmd, config_path, ov);
  heat_cmd->add_option("--seed", seed_flag, "run seed")->each([&](auto) {
    seed_given = true;
  });
  heat_cmd->add_option("--out", out_file, "output CSV path");

  CLI11_PARSE(app, argc, argv);

  try {
    const harness::ExperimentConfig cfg = resolve_config(config_path, ov);
    const std::uint64_t seed = seed_given ? seed_flag : cfg.seeds.front();
    if (embed_cmd->parsed()) return cmd_embed(cfg);
    if (cluster_cmd->parsed()) return cmd_cluster(cfg, seed, out_file);
    if (gen_cmd->parsed()) return cmd_gen_tasks(cfg, seed);
    if (train_cmd->parsed()) return cmd_train(cfg, seed);
    if (eval_cmd->parsed()) return cmd_eval(cfg, bank_file, task_text);
    if (exp_cmd->parsed()) return cmd_experiment(cfg);
    if (heat_cmd->parsed()) return cmd_heatmap(cfg, seed, out_file);
  } catch (const ProviderError& e) {
    std::cerr << "provider error: " << e.what() << "\n";
    return 2;
  } catch (const InfeasibleTaskError& e) {
    std::cerr << "infeasible task: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
