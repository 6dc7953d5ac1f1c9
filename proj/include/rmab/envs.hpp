#pragma once

// Benchmark arm ensembles with the published transition matrices.

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "rmab/core.hpp"

namespace rmab {

/// Category label -> number of arms. std::map keeps the order A, B, C.
using CategoryMix = std::map<std::string, std::size_t>;

struct EnvSpec {
  std::string name;  // circulant | restart | process_update | mentoring | maternal_health | sensing
  std::size_t n_arms = 5;
  std::size_t budget_m = 1;
  CategoryMix category_mix;
  std::optional<std::size_t> dynamic_switch_step;
  double restart_alpha = 0.9;

  /// Fills in the default mix and checks the invariants.
  void normalize();
};

/// Splits n evenly over the labels; the remainder goes to the first label.
CategoryMix even_split(std::size_t n, const std::vector<std::string>& labels);

std::vector<ArmModel> build_circulant(std::size_t n);
std::vector<ArmModel> build_restart(std::size_t n, double alpha = 0.9);
std::vector<ArmModel> build_process_update(const CategoryMix& mix);
std::vector<ArmModel> build_mentoring(std::size_t n);
std::vector<ArmModel> build_maternal_health(const CategoryMix& mix);

/// Swaps category-A and category-B kernels in place of each other. Labels,
/// order and category-C arms are untouched; applying it twice is a no-op.
std::vector<ArmModel> apply_dynamic_switch(const std::vector<ArmModel>& arms);

/// Dispatches on spec.name for the matrix environments.
std::vector<ArmModel> build_arms(const EnvSpec& spec);

const std::vector<std::string>& known_env_names();
bool is_matrix_env(const std::string& name);

nlohmann::json env_spec_to_json(const EnvSpec& spec);
EnvSpec env_spec_from_json(const nlohmann::json& j);

}  // namespace rmab
