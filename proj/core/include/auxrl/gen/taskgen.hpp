#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "auxrl/embed/kmeans.hpp"
#include "auxrl/embed/store.hpp"
#include "auxrl/ltl/formula.hpp"

namespace auxrl::gen {

/// A proposition slot of the template: the source atom with its embedding.
struct TemplateNode {
  std::string source_proposition;
  embed::EmbeddingVector embedding;
};

/// The source formula's syntax graph with proposition nodes replaced by
/// (proposition, embedding) payloads. Proposition slots are numbered in
/// depth-first order, matching ast_graph's proposition vertices.
struct TaskTemplate {
  ltl::Formula source;
  ltl::AstGraph skeleton;
  std::vector<TemplateNode> nodes;
};

/// Throws InvalidArgumentError naming the first atom of f absent from the
/// store.
TaskTemplate build_template(const ltl::Formula& f, const embed::EmbeddingStore& store);

/// Selection counters shared across all nodes and all tasks of one
/// generation run. total_trials starts at 1 so log(N_t) is defined on the
/// first trial.
struct SelectionState {
  double exploration_c = 0.5;
  std::uint64_t total_trials = 1;
  std::map<std::string, std::uint64_t> per_object_counts;

  std::uint64_t count_of(const std::string& obj) const {
    auto it = per_object_counts.find(obj);
    return it == per_object_counts.end() ? 0 : it->second;
  }
};

/// Upper-confidence object choice for one template node:
///
///   argmax over candidates of  sim(node, obj) + c * sqrt(ln N_t / N_t^obj)
///
/// A never-selected candidate has an infinite bonus when c > 0. Ties break on
/// the smaller proposition name; with c = 0 the rule is the plain cosine
/// argmax. Increments the winner's count and the total. Throws
/// InvalidArgumentError on an empty candidate list.
std::string select_object(const TemplateNode& node,
                          const std::vector<std::string>& candidates,
                          SelectionState& state, const embed::EmbeddingStore& store);

struct AuxiliaryTask {
  ltl::Formula formula;
  std::vector<std::string> substitution;  // chosen proposition per template node
};

struct AuxiliaryTaskSet {
  std::vector<AuxiliaryTask> tasks;
  bool shortfall = false;  // fewer distinct tasks than requested
  std::uint64_t seed = 0;
  double exploration_c = 0.0;
};

/// Generates up to x distinct auxiliary formulas by object substitution on
/// the template. Candidate pools come from the node's embedding cluster
/// (falling back to the 5 nearest cosine neighbours when the pool is empty);
/// one task never repeats a proposition, and the source formula is excluded.
/// A shortfall is reported, not fatal.
AuxiliaryTaskSet generate_auxiliary_tasks(const TaskTemplate& tmpl,
                                          const embed::ClusterModel& model,
                                          const embed::EmbeddingStore& store, int x,
                                          SelectionState& state, std::uint64_t seed);

/// Baseline sampler: x distinct nested-eventually sequences
/// F (p1 & F (p2 & ... F pn)) over pairwise-distinct propositions drawn
/// uniformly. Throws InvalidArgumentError when fewer than `length`
/// propositions exist.
AuxiliaryTaskSet sample_random_tasks(const std::set<std::string>& propositions,
                                     int length, int x, std::uint64_t seed);

/// Builds the nested-eventually sequence task over the given propositions.
ltl::Formula sequence_task(const std::vector<std::string>& props);

/// Writes one canonical formula per line plus a JSON provenance sidecar
/// (substitutions, selection counters, c, seed).
void write_task_set(const AuxiliaryTaskSet& set, const SelectionState* state,
                    const std::filesystem::path& tasks_path,
                    const std::filesystem::path& provenance_path);

}  // namespace auxrl::gen
