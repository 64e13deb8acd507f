#include "exvocab/markergap.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "exvocab/embedded_data.hpp"
#include "exvocab/error.hpp"
#include "exvocab/io.hpp"
#include "exvocab/tokenize.hpp"

namespace exvocab {

void MarkerSet::validate() const {
  if (words.empty()) throw Error(ErrorCode::kInvalidArgument, "marker set '" + name + "' is empty");
  for (const auto& w : words) {
    if (w != to_lower_ascii(w)) {
      throw Error(ErrorCode::kInvalidArgument, "marker set '" + name + "': '" + w + "' is not lowercase");
    }
  }
}

MarkerSet parse_marker_set(std::string_view contents, std::string name, MarkerKind kind) {
  MarkerSet set;
  set.name = std::move(name);
  set.kind = kind;
  for (auto& w : parse_word_list(contents)) set.words.insert(std::move(w));
  set.validate();
  return set;
}

MarkerSet load_marker_set(const std::filesystem::path& path, MarkerKind kind) {
  return parse_marker_set(read_file(path), path.stem().string(), kind);
}

MarkerSet starter_common_set() {
  return parse_marker_set(embedded_file("common_markers.txt"), "common", MarkerKind::kCommon);
}

MarkerSet starter_covid_set() {
  return parse_marker_set(embedded_file("covid_markers.txt"), "covid", MarkerKind::kCustom);
}

namespace {

double fraction(std::uint64_t hits, std::uint64_t total, bool smoothing) {
  if (smoothing) return smoothed_frequency(hits, total);
  if (total == 0) throw Error(ErrorCode::kInvalidArgument, "unsmoothed fraction of an empty year");
  return static_cast<double>(hits) / static_cast<double>(total);
}

std::size_t need_year(const ContainmentCounts& c, int year, int target) {
  auto i = c.year_index(year);
  if (!i) {
    throw Error(ErrorCode::kMissingYear, "containment counts lack year " + std::to_string(year) +
                                             " (needed for target year " + std::to_string(target) +
                                             ")");
  }
  return *i;
}

}  // namespace

GapResult gap(const ContainmentCounts& counts, int target_year, bool smoothing) {
  const std::size_t y = need_year(counts, target_year, target_year);
  const std::size_t y2 = need_year(counts, target_year - 2, target_year);
  const std::size_t y3 = need_year(counts, target_year - 3, target_year);
  GapResult r;
  r.year = target_year;
  r.P = fraction(counts.hits[y], counts.totals[y], smoothing);
  r.P_minus2 = fraction(counts.hits[y2], counts.totals[y2], smoothing);
  r.P_minus3 = fraction(counts.hits[y3], counts.totals[y3], smoothing);
  r.Q = counterfactual(r.P_minus3, r.P_minus2);
  r.Delta = r.P - r.Q;
  r.n_docs = counts.totals[y];
  return r;
}

std::set<std::string> SweepResult::best_words(const std::map<std::string, double>& candidates) const {
  std::set<std::string> out;
  if (!best) return out;
  const double t = points[*best].threshold;
  for (const auto& [w, p] : candidates) {
    if (p < t) out.insert(w);
  }
  return out;
}

SweepResult rare_sweep(const MinFrequencyProfile& profile,
                       const std::map<std::string, double>& candidates,
                       const std::vector<double>& thresholds, int target_year) {
  if (candidates.empty()) throw Error(ErrorCode::kInvalidArgument, "rare sweep: no candidate words");
  std::vector<double> freqs;
  freqs.reserve(candidates.size());
  for (const auto& [w, p] : candidates) freqs.push_back(p);
  std::sort(freqs.begin(), freqs.end());

  SweepResult result;
  for (double t : thresholds) {
    const auto n_words =
        static_cast<std::size_t>(std::lower_bound(freqs.begin(), freqs.end(), t) - freqs.begin());
    if (n_words == 0) continue;
    const GapResult g = gap(profile.containment_below(t), target_year);
    result.points.push_back({t, n_words, g.P, g.Q, g.Delta});
    if (!result.best || g.Delta > result.points[*result.best].Delta) {
      result.best = result.points.size() - 1;
    }
  }
  return result;
}

std::vector<double> default_sweep_thresholds() {
  std::vector<double> out;
  for (int e = -4; e <= 0; ++e) {
    for (double m : {1.0, 2.0, 3.0, 5.0}) {
      const double t = m * std::pow(10.0, e);
      if (t <= 1.0) out.push_back(t);
    }
  }
  return out;
}

std::map<std::string, double> rare_candidates(const ExcessCensus& census) {
  std::map<std::string, double> out;
  for (const auto& r : census.rows) {
    if (r.stats.excess && r.annotation && r.annotation->label == WordLabel::kStyle) {
      out.emplace(r.stats.word, r.stats.p);
    }
  }
  return out;
}

double combined_estimate(double delta_rare, double delta_common) {
  return (delta_rare + delta_common) / 2.0;
}

double combined_estimate(const MarkerSet& rare, const MarkerSet& common, double delta_rare,
                         double delta_common) {
  std::vector<std::string> shared;
  std::set_intersection(rare.words.begin(), rare.words.end(), common.words.begin(),
                        common.words.end(), std::back_inserter(shared));
  if (!shared.empty()) {
    std::string list;
    for (std::size_t i = 0; i < shared.size() && i < 5; ++i) list += (i ? ", " : "") + shared[i];
    throw Error(ErrorCode::kSetsOverlap, "SETS_OVERLAP: marker sets '" + rare.name + "' and '" +
                                             common.name + "' share " +
                                             std::to_string(shared.size()) + " word(s): " + list);
  }
  return combined_estimate(delta_rare, delta_common);
}

// ---------------------------------------------------------------------------

std::vector<GreedyStep> greedy_marker_set(DocumentSource& corpus,
                                          const std::vector<std::string>& candidates,
                                          int target_year, std::size_t max_words) {
  if (candidates.empty()) throw Error(ErrorCode::kInvalidArgument, "greedy set: no candidates");
  const std::vector<int> years = {target_year - 3, target_year - 2, target_year};
  StringMap<std::size_t> lookup;
  for (std::size_t i = 0; i < candidates.size(); ++i) lookup.emplace(candidates[i], i);

  // postings[c][y] = ordinal (within year) of documents containing candidate c.
  std::vector<std::array<std::vector<std::uint32_t>, 3>> postings(candidates.size());
  std::array<std::uint32_t, 3> totals{0, 0, 0};
  std::vector<std::uint32_t> stamp(candidates.size(), UINT32_MAX);
  std::string scratch;
  Document doc;
  while (corpus.next(doc)) {
    std::size_t y = 0;
    while (y < 3 && years[y] != doc.year) ++y;
    if (y == 3) continue;
    const std::uint32_t ordinal = totals[y]++;
    for_each_token(doc.text, scratch, [&](std::string_view token) {
      auto it = lookup.find(token);
      if (it == lookup.end()) return;
      // Stamp combines year and ordinal so a candidate is posted once per doc.
      const std::uint32_t key = ordinal * 3 + static_cast<std::uint32_t>(y);
      if (stamp[it->second] == key) return;
      stamp[it->second] = key;
      postings[it->second][y].push_back(ordinal);
    });
  }

  std::array<std::vector<bool>, 3> covered;
  std::array<std::uint64_t, 3> hits{0, 0, 0};
  for (std::size_t y = 0; y < 3; ++y) covered[y].assign(totals[y], false);
  std::vector<bool> used(candidates.size(), false);

  auto gap_for = [&](const std::array<std::uint64_t, 3>& h) {
    ContainmentCounts c{years, {h[0], h[1], h[2]}, {totals[0], totals[1], totals[2]}};
    return gap(c, target_year);
  };

  std::vector<GreedyStep> steps;
  double current = -std::numeric_limits<double>::infinity();
  while (steps.size() < max_words) {
    std::optional<std::size_t> best;
    GapResult best_gap;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      if (used[c]) continue;
      std::array<std::uint64_t, 3> h = hits;
      for (std::size_t y = 0; y < 3; ++y) {
        for (std::uint32_t d : postings[c][y]) h[y] += covered[y][d] ? 0 : 1;
      }
      const GapResult g = gap_for(h);
      if (!best || g.Delta > best_gap.Delta ||
          (g.Delta == best_gap.Delta && candidates[c] < candidates[*best])) {
        best = c;
        best_gap = g;
      }
    }
    if (!best || best_gap.Delta <= current) break;
    used[*best] = true;
    for (std::size_t y = 0; y < 3; ++y) {
      for (std::uint32_t d : postings[*best][y]) {
        if (!covered[y][d]) {
          covered[y][d] = true;
          ++hits[y];
        }
      }
    }
    current = best_gap.Delta;
    steps.push_back({candidates[*best], best_gap});
  }
  return steps;
}

std::string sweep_csv(const SweepResult& sweep) {
  std::string out = "threshold,n_words,P,Q,delta\n";
  for (const auto& p : sweep.points) {
    out += format_double(p.threshold) + ',' + std::to_string(p.n_words) + ',' + format_double(p.P) +
           ',' + format_double(p.Q) + ',' + format_double(p.Delta) + '\n';
  }
  return out;
}

std::string gap_csv(const std::vector<std::pair<std::string, GapResult>>& rows) {
  std::string out = "set,year,P,Q,delta,n_docs\n";
  for (const auto& [name, g] : rows) {
    out += csv_escape(name) + ',' + std::to_string(g.year) + ',' + format_double(g.P) + ',' +
           format_double(g.Q) + ',' + format_double(g.Delta) + ',' + std::to_string(g.n_docs) + '\n';
  }
  return out;
}

}  // namespace exvocab
