#pragma once

// Reproduction recipes: simulate the published tables and figures and write
// side-by-side comparison files (CSV per table, one JSON summary per recipe).

#include <string>
#include <vector>

#include "hpa/config.hpp"
#include "hpa/reference.hpp"

namespace hpa {

enum class Recipe { table1, table2, fig3a, fig3b, distances, rates };

std::vector<std::string> recipe_names();
/// Throws InvalidArgument listing the valid recipes.
Recipe parse_recipe(const std::string& name);
std::string recipe_name(Recipe r);

struct ReproduceOutput {
  std::vector<std::string> files;  // paths written
  std::string summary_json;
};

/// Runs one recipe from `config` (normally default_config()) and writes its
/// files into out_dir, creating it when needed.
ReproduceOutput reproduce(Recipe recipe, const std::string& out_dir, const ExperimentConfig& config,
                          const ReferenceData& reference);

}  // namespace hpa
