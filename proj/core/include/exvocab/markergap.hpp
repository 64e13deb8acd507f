#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "exvocab/count.hpp"
#include "exvocab/excess.hpp"

namespace exvocab {

enum class MarkerKind { kRare, kCommon, kCustom };

struct MarkerSet {
  std::string name;
  std::set<std::string> words;
  MarkerKind kind = MarkerKind::kCustom;

  void validate() const;  // non-empty, lowercase
};

MarkerSet parse_marker_set(std::string_view contents, std::string name, MarkerKind kind);
MarkerSet load_marker_set(const std::filesystem::path& path, MarkerKind kind);
MarkerSet starter_common_set();  // the ten shipped common style words
MarkerSet starter_covid_set();

// Set-level gap. P and Q are smoothed containment fractions; Q uses the same
// projection as the per-word counterfactual applied to P at Y-3 and Y-2.
struct GapResult {
  int year = 0;
  double P = 0;
  double Q = 0;
  double Delta = 0;
  std::uint64_t n_docs = 0;  // documents in the target year
  double P_minus2 = 0;
  double P_minus3 = 0;
};

// Throws Error(kMissingYear) when Y, Y-2 or Y-3 is absent. Negative Delta is
// reported as is.
GapResult gap(const ContainmentCounts& counts, int target_year, bool smoothing = true);

struct SweepPoint {
  double threshold = 0;
  std::size_t n_words = 0;
  double P = 0;
  double Q = 0;
  double Delta = 0;
};

struct SweepResult {
  std::vector<SweepPoint> points;  // thresholds with an empty word subset are skipped
  std::optional<std::size_t> best;  // index of the maximal Delta (first on ties)

  // Candidate words with frequency below the best threshold.
  std::set<std::string> best_words(const std::map<std::string, double>& candidates) const;
};

// Rare-set sweep over the thresholds. `candidates` maps each candidate word
// to its target-year frequency; the profile must have been built from the
// same map. Throws Error(kInvalidArgument) when candidates is empty.
SweepResult rare_sweep(const MinFrequencyProfile& profile,
                       const std::map<std::string, double>& candidates,
                       const std::vector<double>& thresholds, int target_year);

// 1-2-3-5 grid from 1e-4 up to 1.
std::vector<double> default_sweep_thresholds();

// Excess words labeled style, with their target-year frequency.
std::map<std::string, double> rare_candidates(const ExcessCensus& census);

double combined_estimate(double delta_rare, double delta_common);
// Throws Error(kSetsOverlap) when the two sets share a word.
double combined_estimate(const MarkerSet& rare, const MarkerSet& common, double delta_rare,
                         double delta_common);

struct GreedyStep {
  std::string word;
  GapResult gap;  // of the set after adding `word`
};

// Greedy set builder: repeatedly adds the candidate that raises the set gap
// the most, stopping at max_words or when no candidate raises it. Uses
// per-year posting lists of the candidates, so memory grows with the number
// of candidate occurrences in years Y-3, Y-2 and Y.
std::vector<GreedyStep> greedy_marker_set(DocumentSource& corpus,
                                          const std::vector<std::string>& candidates,
                                          int target_year, std::size_t max_words);

std::string sweep_csv(const SweepResult& sweep);  // threshold,n_words,P,Q,delta
std::string gap_csv(const std::vector<std::pair<std::string, GapResult>>& rows);

}  // namespace exvocab
