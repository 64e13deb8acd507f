#include "run_config.hpp"

#include <set>

#include <nlohmann/json.hpp>

#include "exvocab/error.hpp"
#include "exvocab/io.hpp"

namespace exvocab::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::vector<int> RunConfig::years() const {
  std::vector<int> ys;
  for (int y = first_year; y <= last_year; ++y) ys.push_back(y);
  return ys;
}

fs::path RunConfig::matrix_path() const { return matrix.empty() ? out / "matrix.csv.gz" : matrix; }

namespace {

void reject_unknown(const ordered_json& j, const std::set<std::string>& known, const std::string& where) {
  for (const auto& [k, v] : j.items()) {
    if (!known.count(k)) throw UsageError("config: unknown key '" + where + k + "'");
  }
}

template <typename T>
void get_if(const ordered_json& j, const char* key, T& target) {
  if (j.contains(key)) target = j.at(key).get<T>();
}

void get_path(const ordered_json& j, const char* key, fs::path& target) {
  if (j.contains(key)) target = j.at(key).get<std::string>();
}

std::string path_string(const fs::path& p) { return p.empty() ? std::string() : p.string(); }

}  // namespace

RunConfig RunConfig::from_json(std::string_view text, const fs::path& base_dir) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const ordered_json::parse_error& e) {
    throw UsageError(std::string("config: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw UsageError("config: top level must be an object");
  RunConfig c;
  try {
    reject_unknown(j,
                   {"paths", "years", "target_year", "filter", "thresholds", "min_df",
                    "subgroup_eligibility", "local_delta", "sweep_thresholds", "lemma_lexicon",
                    "workers", "mode", "seed"},
                   "");
    if (j.contains("paths")) {
      const auto& p = j["paths"];
      reject_unknown(p,
                     {"inputs", "out", "matrix", "annotations", "rules", "rare_markers",
                      "common_markers", "lemma_overrides", "spelling_map", "subgroups", "points",
                      "synth_spec", "field_rules", "countries"},
                     "paths.");
      if (p.contains("inputs")) {
        for (const auto& s : p["inputs"]) c.inputs.emplace_back(s.get<std::string>());
      }
      get_path(p, "out", c.out);
      get_path(p, "matrix", c.matrix);
      get_path(p, "annotations", c.annotations);
      get_path(p, "rules", c.rules);
      get_path(p, "rare_markers", c.rare_markers);
      get_path(p, "common_markers", c.common_markers);
      get_path(p, "lemma_overrides", c.lemma_overrides);
      get_path(p, "spelling_map", c.spelling_map);
      get_path(p, "subgroups", c.subgroups);
      get_path(p, "points", c.points);
      get_path(p, "synth_spec", c.synth_spec);
      get_path(p, "field_rules", c.field_rules);
      get_path(p, "countries", c.countries);
    }
    if (j.contains("years")) {
      const auto& y = j["years"];
      reject_unknown(y, {"first", "last"}, "years.");
      get_if(y, "first", c.first_year);
      get_if(y, "last", c.last_year);
    }
    get_if(j, "target_year", c.target_year);
    if (j.contains("filter")) {
      const auto& f = j["filter"];
      reject_unknown(f, {"min_chars", "max_chars", "language"}, "filter.");
      get_if(f, "min_chars", c.filter.min_chars);
      get_if(f, "max_chars", c.filter.max_chars);
      get_if(f, "language", c.filter.language);
    }
    if (j.contains("thresholds")) {
      const auto& t = j["thresholds"];
      reject_unknown(t,
                     {"delta_min", "ratio_line_slope", "ratio_line_intercept", "eligibility_min_freq",
                      "letters_only", "smoothing"},
                     "thresholds.");
      get_if(t, "delta_min", c.thresholds.delta_min);
      get_if(t, "ratio_line_slope", c.thresholds.ratio_line_slope);
      get_if(t, "ratio_line_intercept", c.thresholds.ratio_line_intercept);
      get_if(t, "eligibility_min_freq", c.thresholds.eligibility_min_freq);
      get_if(t, "letters_only", c.thresholds.letters_only);
      get_if(t, "smoothing", c.thresholds.smoothing);
    }
    get_if(j, "min_df", c.min_df);
    if (j.contains("subgroup_eligibility")) {
      const auto& e = j["subgroup_eligibility"];
      reject_unknown(e, {"first_year", "last_year", "min_docs"}, "subgroup_eligibility.");
      get_if(e, "first_year", c.eligibility.first_year);
      get_if(e, "last_year", c.eligibility.last_year);
      get_if(e, "min_docs", c.eligibility.min_docs);
    }
    if (j.contains("local_delta")) {
      const auto& l = j["local_delta"];
      reject_unknown(l, {"k", "reference_year"}, "local_delta.");
      get_if(l, "k", c.k);
      get_if(l, "reference_year", c.reference_year);
    }
    get_if(j, "sweep_thresholds", c.sweep_thresholds);
    get_if(j, "lemma_lexicon", c.lemma_lexicon);
    get_if(j, "workers", c.workers);
    get_if(j, "seed", c.seed);
    if (j.contains("mode")) {
      const auto m = j["mode"].get<std::string>();
      if (m == "strict") c.mode = ParseMode::kStrict;
      else if (m == "lenient") c.mode = ParseMode::kLenient;
      else throw UsageError("config: mode must be 'strict' or 'lenient', got '" + m + "'");
    }
  } catch (const ordered_json::exception& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
  c.make_absolute(base_dir);
  return c;
}

RunConfig RunConfig::load(const fs::path& path) {
  if (!fs::is_regular_file(path)) throw UsageError("config file not found: " + path.string());
  return from_json(read_file(path), fs::absolute(path).parent_path());
}

void RunConfig::make_absolute(const fs::path& base_dir) {
  auto fix = [&](fs::path& p) {
    if (!p.empty() && p.is_relative()) p = (base_dir / p).lexically_normal();
  };
  for (auto& p : inputs) fix(p);
  for (fs::path* p : {&out, &matrix, &annotations, &rules, &rare_markers, &common_markers,
                      &lemma_overrides, &spelling_map, &subgroups, &points, &synth_spec,
                      &field_rules, &countries}) {
    fix(*p);
  }
  filter.year_range = YearRange{first_year, last_year};
}

std::string RunConfig::to_json() const {
  ordered_json j;
  ordered_json p;
  p["inputs"] = ordered_json::array();
  for (const auto& i : inputs) p["inputs"].push_back(i.string());
  p["out"] = path_string(out);
  p["matrix"] = path_string(matrix);
  p["annotations"] = path_string(annotations);
  p["rules"] = path_string(rules);
  p["rare_markers"] = path_string(rare_markers);
  p["common_markers"] = path_string(common_markers);
  p["lemma_overrides"] = path_string(lemma_overrides);
  p["spelling_map"] = path_string(spelling_map);
  p["subgroups"] = path_string(subgroups);
  p["points"] = path_string(points);
  p["synth_spec"] = path_string(synth_spec);
  p["field_rules"] = path_string(field_rules);
  p["countries"] = path_string(countries);
  j["paths"] = p;
  j["years"] = {{"first", first_year}, {"last", last_year}};
  j["target_year"] = target_year;
  j["filter"] = {{"min_chars", filter.min_chars},
                 {"max_chars", filter.max_chars},
                 {"language", filter.language}};
  j["thresholds"] = {{"delta_min", thresholds.delta_min},
                     {"ratio_line_slope", thresholds.ratio_line_slope},
                     {"ratio_line_intercept", thresholds.ratio_line_intercept},
                     {"eligibility_min_freq", thresholds.eligibility_min_freq},
                     {"letters_only", thresholds.letters_only},
                     {"smoothing", thresholds.smoothing}};
  j["min_df"] = min_df;
  j["subgroup_eligibility"] = {{"first_year", eligibility.first_year},
                               {"last_year", eligibility.last_year},
                               {"min_docs", eligibility.min_docs}};
  j["local_delta"] = {{"k", k}, {"reference_year", reference_year}};
  j["sweep_thresholds"] = sweep_thresholds;
  j["lemma_lexicon"] = lemma_lexicon;
  j["workers"] = workers;
  j["mode"] = mode == ParseMode::kStrict ? "strict" : "lenient";
  j["seed"] = seed;
  return j.dump(2) + "\n";
}

void RunConfig::validate() const {
  if (first_year > last_year) {
    throw UsageError("config: years.first " + std::to_string(first_year) + " > years.last " +
                     std::to_string(last_year));
  }
  if (workers == 0) throw UsageError("config: workers must be >= 1");
  if (k == 0) throw UsageError("config: local_delta.k must be >= 1");
  if (!(min_df >= 0 && min_df <= 1)) throw UsageError("config: min_df must lie in [0, 1]");
  try {
    filter.validate();
    thresholds.validate();
  } catch (const Error& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
  for (double t : sweep_thresholds) {
    if (!(t > 0 && t <= 1)) throw UsageError("config: sweep thresholds must lie in (0, 1]");
  }
  for (const auto& i : inputs) {
    if (!fs::exists(i)) throw UsageError("config: input not found: " + i.string());
  }
  const std::pair<const char*, const fs::path*> files[] = {
      {"annotations", &annotations},       {"rules", &rules},
      {"rare_markers", &rare_markers},     {"common_markers", &common_markers},
      {"lemma_overrides", &lemma_overrides}, {"spelling_map", &spelling_map},
      {"subgroups", &subgroups},           {"points", &points},
      {"synth_spec", &synth_spec},         {"field_rules", &field_rules},
      {"countries", &countries}};
  for (const auto& [name, p] : files) {
    if (!p->empty() && !fs::is_regular_file(*p)) {
      throw UsageError(std::string("config: ") + name + " file not found: " + p->string());
    }
  }
  if (fs::exists(out) && !fs::is_directory(out)) {
    throw UsageError("config: output path exists and is not a directory: " + out.string());
  }
}

}  // namespace exvocab::cli
