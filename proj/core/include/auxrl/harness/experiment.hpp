#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "auxrl/embed/store.hpp"
#include "auxrl/env/grid.hpp"
#include "auxrl/gen/taskgen.hpp"
#include "auxrl/learn/learner.hpp"

namespace auxrl::harness {

enum class Condition { Ours, RandomBehavior, RandomTasks };

const char* condition_name(Condition c);  // "ours" / "random-behavior" / "random-tasks"
std::optional<Condition> condition_from_name(const std::string& name);

struct ProviderSettings {
  std::string mode = "offline";  // offline | remote | stub
  std::string describe_url;
  std::string embed_url;
  std::string token_env = "AUXRL_PROVIDER_TOKEN";
  std::string prompt_template =
      "Describe the household object '<name>', including its typical room, "
      "purpose, and related objects.";
};

struct ExperimentConfig {
  std::string map_path;
  std::string task;
  Condition condition = Condition::Ours;
  int aux_count = 20;   // x
  int k = 4;            // clusters; heuristic: distinct exploration zones
  double ucb_c = 0.5;
  learn::LearnerConfig learner;
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4, 5, 6};
  ProviderSettings provider;
  std::string cache_path;
  std::string out_dir = "runs";
  int min_aux_tasks = 1;  // generation shortfall below this aborts the run

  void validate() const;
};

/// Reads a JSON config file (or a manifest.json wrapping one under "config").
ExperimentConfig load_config(const std::filesystem::path& path);

/// Serialised resolved config (manifest body).
std::string config_to_json_string(const ExperimentConfig& cfg);

/// Builds the embedding store for the configured provider mode. Offline mode
/// reads cache_path; remote mode queries both endpoints and writes through to
/// cache_path; stub mode derives deterministic vectors from descriptions.
embed::EmbeddingStore build_store(const ExperimentConfig& cfg, const env::GridMap& map);

struct EvalPoint {
  int episode = 0;               // 1-based episode count at this point
  double given_norm_return = 0;  // normalized discounted return on the given task
  double aux_success_rate = 0;   // mean success over auxiliary tasks
};

struct RunResult {
  Condition condition = Condition::Ours;
  std::uint64_t seed = 0;
  std::vector<EvalPoint> series;
  env::Heatmap heatmap{0, 0};
  gen::AuxiliaryTaskSet tasks;
  gen::SelectionState selection;
  long long total_behavior_steps = 0;
  double wall_seconds = 0.0;
};

/// Trains one (condition, seed) run end to end and evaluates every
/// eval_period episodes. Throws InfeasibleTaskError when the given task
/// cannot be satisfied on the map and ConfigError when generation falls
/// below min_aux_tasks. The trained bank is copied out through `final_bank`
/// when non-null.
RunResult run_condition(const ExperimentConfig& cfg, std::uint64_t seed,
                        learn::QBank* final_bank = nullptr);

struct AggregatePoint {
  int episode = 0;
  double mean_given = 0, std_given = 0;
  double mean_aux = 0, std_aux = 0;
};

/// Pointwise mean and population standard deviation over same-length series.
std::vector<AggregatePoint> aggregate(const std::vector<RunResult>& results);

/// Writes curves.csv, aggregate.csv, per-run heatmap CSVs, task lists with
/// provenance sidecars, and manifest.json. Reruns with identical inputs
/// produce identical bytes.
void emit(const std::vector<RunResult>& results, const ExperimentConfig& cfg,
          const std::filesystem::path& out_dir);

}  // namespace auxrl::harness
