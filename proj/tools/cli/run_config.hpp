#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "exvocab/document.hpp"
#include "exvocab/excess.hpp"
#include "exvocab/ingest.hpp"
#include "exvocab/subgroup.hpp"

namespace exvocab::cli {

// Bad flags, bad config files, missing user-supplied inputs. Exit status 1.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Effective configuration of one run. Every path is absolute once loaded, so
// a dumped config reloads to the same behaviour from any directory.
struct RunConfig {
  std::vector<std::filesystem::path> inputs;
  std::filesystem::path out = "exvocab_out";
  std::filesystem::path matrix;  // default: <out>/matrix.csv.gz
  std::filesystem::path annotations;
  std::filesystem::path rules;
  std::filesystem::path rare_markers;
  std::filesystem::path common_markers;
  std::filesystem::path lemma_overrides;
  std::filesystem::path spelling_map;
  std::filesystem::path subgroups;
  std::filesystem::path points;
  std::filesystem::path synth_spec;
  std::filesystem::path field_rules;
  std::filesystem::path countries;

  int first_year = 2010;
  int last_year = 2024;
  int target_year = 2024;
  FilterCriteria filter;  // year_range mirrors first_year..last_year
  ExcessThresholds thresholds;
  double min_df = 1e-6;
  SubgroupEligibility eligibility;
  std::size_t k = 100;
  int reference_year = 2022;
  std::vector<double> sweep_thresholds;  // empty: the default grid
  bool lemma_lexicon = true;             // lemmatize against the matrix vocabulary
  unsigned workers = 1;
  ParseMode mode = ParseMode::kStrict;
  std::uint64_t seed = 1;

  std::vector<int> years() const;
  std::filesystem::path matrix_path() const;

  // Relative paths resolve against `base_dir`. Unknown keys are rejected.
  static RunConfig from_json(std::string_view json, const std::filesystem::path& base_dir);
  static RunConfig load(const std::filesystem::path& path);
  std::string to_json() const;

  void make_absolute(const std::filesystem::path& base_dir);
  // Referenced input files must exist; the output dir must be creatable.
  // Throws UsageError.
  void validate() const;
};

}  // namespace exvocab::cli
