#include "commands.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "exvocab/clean.hpp"
#include "exvocab/count.hpp"
#include "exvocab/error.hpp"
#include "exvocab/excess.hpp"
#include "exvocab/ingest.hpp"
#include "exvocab/io.hpp"
#include "exvocab/lemma.hpp"
#include "exvocab/local_delta.hpp"
#include "exvocab/markergap.hpp"
#include "exvocab/matrix.hpp"
#include "exvocab/subgroup.hpp"
#include "exvocab/synth.hpp"
#include "exvocab/tokenize.hpp"
#include "exvocab/vocabulary.hpp"
#include "run_config.hpp"

namespace exvocab::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

// Options that only some subcommands read.
struct Extras {
  fs::path corpus;           // explicit corpus for downstream passes
  std::string words;         // report: comma-separated timeseries words
  std::size_t top_words = 5;
};

struct Context {
  RunConfig cfg;
  Extras extras;
  std::ostream& out;
  std::ostream& err;
};

// Artifact names, shared by producers and consumers.
constexpr const char* kDocuments = "documents.jsonl";
constexpr const char* kCleaned = "cleaned.jsonl";
constexpr const char* kMatrix = "matrix.csv.gz";
constexpr const char* kRareSet = "rare_set.txt";

// Messages raised inside a command often start with its name already.
std::string_view unprefixed(std::string_view message, std::string_view command) {
  if (!command.empty() && message.starts_with(command) && message.substr(command.size()).starts_with(": ")) {
    message.remove_prefix(command.size() + 2);
  }
  return message;
}

Error missing_artifact(const fs::path& path, std::string_view producer) {
  return Error(ErrorCode::kIo, "missing prerequisite artifact " + path.string() +
                                   " (produced by `exvocab " + std::string(producer) + "`)");
}

void require(const fs::path& path, std::string_view producer) {
  if (!fs::is_regular_file(path)) throw missing_artifact(path, producer);
}

void prepare_out(const RunConfig& cfg) {
  std::error_code ec;
  fs::create_directories(cfg.out, ec);
  if (ec || !fs::is_directory(cfg.out)) {
    throw UsageError("cannot create output directory " + cfg.out.string() + ": " + ec.message());
  }
}

// The document stream downstream stages read: an explicit --corpus, else the
// cleaned documents, else the ingested (or synthesized) ones.
fs::path corpus_path(const Context& ctx) {
  if (!ctx.extras.corpus.empty()) {
    require(ctx.extras.corpus, "ingest");
    return ctx.extras.corpus;
  }
  const fs::path cleaned = ctx.cfg.out / kCleaned;
  if (fs::is_regular_file(cleaned)) return cleaned;
  const fs::path docs = ctx.cfg.out / kDocuments;
  if (fs::is_regular_file(docs)) return docs;
  throw missing_artifact(docs, "ingest` or `exvocab synth");
}

CountOptions count_options(const RunConfig& cfg) {
  CountOptions o;
  o.years = cfg.years();
  o.strict = cfg.mode == ParseMode::kStrict;
  o.workers = cfg.workers;
  return o;
}

OccurrenceMatrix load_matrix_artifact(const RunConfig& cfg) {
  const fs::path p = cfg.matrix_path();
  require(p, "count");
  return load_matrix(p);
}

std::optional<AnnotationTable> load_annotations(const RunConfig& cfg) {
  if (cfg.annotations.empty()) return std::nullopt;
  return AnnotationTable::load(cfg.annotations);
}

StringMap<std::string> word_map_or(const fs::path& path, StringMap<std::string> (*fallback)()) {
  return path.empty() ? fallback() : parse_word_map(read_file(path));
}

MarkerSet common_set(const RunConfig& cfg) {
  return cfg.common_markers.empty() ? starter_common_set()
                                    : load_marker_set(cfg.common_markers, MarkerKind::kCommon);
}

// --markers / config, else the sweep's output.
std::optional<MarkerSet> rare_set(const RunConfig& cfg, bool required) {
  if (!cfg.rare_markers.empty()) return load_marker_set(cfg.rare_markers, MarkerKind::kRare);
  const fs::path p = cfg.out / kRareSet;
  if (fs::is_regular_file(p)) return load_marker_set(p, MarkerKind::kRare);
  if (required) throw missing_artifact(p, "sweep");
  return std::nullopt;
}

std::vector<fs::path> expand_inputs(const std::vector<fs::path>& inputs) {
  std::vector<fs::path> files;
  for (const auto& in : inputs) {
    if (!fs::is_directory(in)) {
      files.push_back(in);
      continue;
    }
    std::vector<fs::path> found;
    for (const auto& e : fs::directory_iterator(in)) {
      if (!e.is_regular_file()) continue;
      const std::string name = e.path().filename().string();
      auto ends = [&](std::string_view s) {
        return name.size() >= s.size() && name.compare(name.size() - s.size(), s.size(), s) == 0;
      };
      if (ends(".xml") || ends(".xml.gz") || ends(".jsonl") || ends(".jsonl.gz")) found.push_back(e.path());
    }
    std::sort(found.begin(), found.end());
    files.insert(files.end(), found.begin(), found.end());
  }
  return files;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  return f;
}

// ---------------------------------------------------------------------------

int cmd_ingest(Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  if (cfg.inputs.empty()) throw UsageError("ingest: no inputs (pass --input or set paths.inputs)");
  prepare_out(cfg);
  const CountryMatcher countries = cfg.countries.empty() ? CountryMatcher::starter()
                                                         : CountryMatcher::parse(read_file(cfg.countries));
  const std::vector<FieldRule> field_rules =
      cfg.field_rules.empty() ? starter_field_rules() : parse_field_rules(read_file(cfg.field_rules));
  XmlOptions xml{&countries, &field_rules};

  std::ofstream docs_out = open_output(cfg.out / kDocuments);
  std::unordered_set<std::string> seen_ids;
  std::map<std::string, std::uint64_t> rejected;
  std::uint64_t read = 0, accepted_n = 0, duplicates = 0;
  ordered_json files = ordered_json::array();
  for (const auto& path : expand_inputs(cfg.inputs)) {
    FileSource source(path, cfg.mode, xml);
    Document doc;
    while (source.next(doc)) {
      ++read;
      if (doc.fields.empty() && doc.journal) doc.fields = assign_fields(*doc.journal, field_rules);
      const FilterDecision d = filter_document(doc, cfg.filter);
      if (!accepted(d)) {
        ++rejected[std::string(reject_reason_name(std::get<RejectReason>(d)))];
        continue;
      }
      if (!seen_ids.insert(doc.id).second) {
        ++duplicates;
        continue;
      }
      ++accepted_n;
      docs_out << to_jsonl_line(doc) << '\n';
    }
    ordered_json f = ordered_json::parse(source.tally().to_json());
    f = ordered_json{{"path", path.string()}, {"tally", f}};
    files.push_back(std::move(f));
  }
  docs_out.close();
  ordered_json report;
  report["files"] = files;
  report["documents_read"] = read;
  report["accepted"] = accepted_n;
  report["duplicates"] = duplicates;
  report["rejected"] = ordered_json::object();
  for (const auto& [reason, n] : rejected) report["rejected"][reason] = n;
  write_file(cfg.out / "ingest_report.json", report.dump(2) + "\n");
  ctx.out << "ingest: " << accepted_n << " of " << read << " documents kept -> "
          << (cfg.out / kDocuments).string() << '\n';
  return kExitOk;
}

int cmd_clean(Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  const fs::path in = ctx.extras.corpus.empty() ? cfg.out / kDocuments : ctx.extras.corpus;
  require(in, "ingest");
  prepare_out(cfg);
  const RuleSet rules = cfg.rules.empty() ? starter_rules() : load_rules(read_file(cfg.rules));
  const fs::path out_path = cfg.out / kCleaned;
  if (fs::exists(out_path) && fs::equivalent(in, out_path)) {
    throw UsageError("clean: input and output are the same file");
  }
  FileSource source(in, cfg.mode);
  std::ofstream docs_out = open_output(out_path);
  CleaningReport report;
  std::uint64_t kept = 0;
  Document doc;
  while (source.next(doc)) {
    if (is_correction_notice(doc.title)) {
      ++report.correction_notices;
      continue;
    }
    CleanOutcome outcome = rules.clean(doc.text);
    const bool modified = !outcome.dropped && outcome.text != doc.text;
    report.record(outcome, modified);
    if (outcome.dropped) continue;
    if (utf8_length(outcome.text) < static_cast<std::size_t>(cfg.filter.min_chars)) {
      ++report.cleaned_too_short;
      continue;
    }
    doc.text = std::move(outcome.text);
    docs_out << to_jsonl_line(doc) << '\n';
    ++kept;
  }
  docs_out.close();
  write_file(cfg.out / "clean_report.json", report.to_json() + "\n");
  ctx.out << "clean: " << kept << " documents kept, " << report.documents_modified << " modified, "
          << report.correction_notices << " correction notices dropped\n";
  return kExitOk;
}

int cmd_count(Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  const fs::path in = corpus_path(ctx);
  prepare_out(cfg);
  VocabularyOptions vo;
  vo.min_df = cfg.min_df;
  vo.eligible_only = true;
  Vocabulary vocab;
  {
    FileSource source(in, cfg.mode);
    try {
      vocab = build_vocabulary(source, vo, cfg.workers);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kEmptyCorpus) throw Error(e.code(), "no documents in " + in.string());
      throw;
    }
  }
  CountTally tally;
  FileSource source(in, cfg.mode);
  const OccurrenceMatrix m = count_occurrences(source, vocab, count_options(cfg), &tally);
  const fs::path out_path = cfg.matrix.empty() ? cfg.out / kMatrix : cfg.matrix;
  save_matrix(m, out_path);
  ordered_json report;
  report["corpus"] = in.string();
  report["documents"] = tally.documents;
  report["out_of_range"] = tally.out_of_range;
  report["words"] = m.word_count();
  report["years"] = m.years();
  report["totals"] = m.totals();
  write_file(cfg.out / "count_report.json", report.dump(2) + "\n");
  ctx.out << "count: " << tally.documents << " documents, " << m.word_count() << " words -> "
          << out_path.string() << '\n';
  return kExitOk;
}

struct LemmaTools {
  std::unique_ptr<Vocabulary> lexicon;
  std::unique_ptr<Lemmatizer> lemmatizer;
};

LemmaTools make_lemmatizer(const RunConfig& cfg, const OccurrenceMatrix& m) {
  LemmaTools t;
  if (cfg.lemma_lexicon) t.lexicon = std::make_unique<Vocabulary>(m.words());
  t.lemmatizer = std::make_unique<Lemmatizer>(word_map_or(cfg.lemma_overrides, starter_lemma_overrides),
                                              word_map_or(cfg.spelling_map, starter_spelling_map),
                                              t.lexicon.get());
  return t;
}

ordered_json label_json(const LabelCounts& c) {
  return {{"total", c.total},
          {"content", c.content},
          {"style", c.style},
          {"ambiguous", c.ambiguous},
          {"unannotated", c.unannotated}};
}

int cmd_excess(Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  const OccurrenceMatrix m = load_matrix_artifact(cfg);
  prepare_out(cfg);
  const auto annotations = load_annotations(cfg);
  const LemmaTools lt = make_lemmatizer(cfg, m);
  const int y = cfg.target_year;
  const ExcessCensus census =
      excess_words(m, y, cfg.thresholds, annotations ? &*annotations : nullptr, lt.lemmatizer.get());
  const std::string stem = "excess_" + std::to_string(y);
  write_file(cfg.out / (stem + ".csv"), stats_csv(census, false));

  const auto excess = census.excess();
  const auto rep = representative_word(excess);
  ordered_json summary;
  summary["year"] = y;
  summary["eligible"] = census.eligible_count();
  summary["excess"] = label_json(census.excess_label_counts());
  summary["excess_lemmas"] = label_json(unique_lemma_counts(census, *lt.lemmatizer));
  summary["representative"] = rep ? ordered_json(*rep) : ordered_json(nullptr);
  write_file(cfg.out / (stem + ".json"), summary.dump(2) + "\n");
  ctx.out << "excess " << y << ": " << excess.size() << " excess of " << census.eligible_count()
          << " eligible words";
  if (rep) ctx.out << ", representative '" << *rep << "'";
  ctx.out << " -> " << (cfg.out / (stem + ".csv")).string() << '\n';
  return kExitOk;
}

int cmd_gap(Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  const fs::path in = corpus_path(ctx);
  prepare_out(cfg);
  const std::optional<MarkerSet> rare = rare_set(cfg, false);
  const MarkerSet common = common_set(cfg);
  const CountOptions options = count_options(cfg);

  std::vector<std::pair<std::string, GapResult>> rows;
  ordered_json summary;
  summary["year"] = cfg.target_year;
  std::optional<double> rare_delta;
  if (rare) {
    FileSource source(in, cfg.mode);
    const GapResult g = gap(containment_counts(source, rare->words, options), cfg.target_year);
    rows.emplace_back(rare->name, g);
    rare_delta = g.Delta;
    summary["rare"] = {{"set", rare->name}, {"words", rare->words.size()}, {"delta", g.Delta}};
  }
  FileSource source(in, cfg.mode);
  const GapResult gc = gap(containment_counts(source, common.words, options), cfg.target_year);
  rows.emplace_back(common.name, gc);
  summary["common"] = {{"set", common.name}, {"words", common.words.size()}, {"delta", gc.Delta}};
  if (rare_delta) {
    summary["combined"] = combined_estimate(*rare, common, *rare_delta, gc.Delta);
  } else {
    summary["combined"] = nullptr;
  }
  write_file(cfg.out / "gap.csv", gap_csv(rows));
  write_file(cfg.out / "gap.json", summary.dump(2) + "\n");
  for (const auto& [name, g] : rows) {
    ctx.out << "gap " << cfg.target_year << " " << name << ": P=" << format_double(g.P)
            << " Q=" << format_double(g.Q) << " delta=" << format_double(g.Delta) << '\n';
  }
  if (rare_delta) ctx.out << "gap combined: " << format_double(summary["combined"].get<double>()) << '\n';
  return kExitOk;
}

int cmd_sweep(Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  if (cfg.annotations.empty()) throw UsageError("sweep: needs word annotations (--annotations)");
  const OccurrenceMatrix m = load_matrix_artifact(cfg);
  const fs::path in = corpus_path(ctx);
  prepare_out(cfg);
  const AnnotationTable annotations = AnnotationTable::load(cfg.annotations);
  const ExcessCensus census = excess_words(m, cfg.target_year, cfg.thresholds, &annotations);
  const auto candidates = rare_candidates(census);
  if (candidates.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "sweep: no excess style words in " + std::to_string(cfg.target_year));
  }
  FileSource source(in, cfg.mode);
  const MinFrequencyProfile profile = min_marker_frequency_profile(source, candidates, count_options(cfg));
  const auto thresholds = cfg.sweep_thresholds.empty() ? default_sweep_thresholds() : cfg.sweep_thresholds;
  const SweepResult sweep = rare_sweep(profile, candidates, thresholds, cfg.target_year);
  write_file(cfg.out / "sweep.csv", sweep_csv(sweep));
  std::string words;
  for (const auto& w : sweep.best_words(candidates)) words += w + '\n';
  write_file(cfg.out / kRareSet, words);
  ordered_json summary;
  summary["year"] = cfg.target_year;
  summary["candidates"] = candidates.size();
  if (sweep.best) {
    const SweepPoint& b = sweep.points[*sweep.best];
    summary["best"] = {{"threshold", b.threshold}, {"n_words", b.n_words}, {"delta", b.Delta}};
    ctx.out << "sweep: best threshold " << format_double(b.threshold) << " with " << b.n_words
            << " words, delta=" << format_double(b.Delta) << '\n';
  } else {
    summary["best"] = nullptr;
  }
  write_file(cfg.out / "sweep.json", summary.dump(2) + "\n");
  return kExitOk;
}

int cmd_subgroups(Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  if (cfg.subgroups.empty()) throw UsageError("subgroups: needs a subgroup spec (--subgroups)");
  const auto specs = parse_subgroup_specs(read_file(cfg.subgroups));
  const MarkerSet rare = *rare_set(cfg, true);
  const MarkerSet common = common_set(cfg);
  const fs::path in = corpus_path(ctx);
  prepare_out(cfg);
  FileSource source(in, cfg.mode);
  const auto rows = subgroup_gaps(source, specs, rare, common, cfg.target_year, cfg.eligibility,
                                  count_options(cfg));
  write_file(cfg.out / "gaps.csv", subgroup_csv(rows, cfg.years()));
  const auto eligible = std::count_if(rows.begin(), rows.end(), [](const SubgroupRow& r) { return r.eligible; });
  ctx.out << "subgroups: " << eligible << " of " << rows.size() << " eligible -> "
          << (cfg.out / "gaps.csv").string() << '\n';
  return kExitOk;
}

// Points either carry year and membership flags already, or just id,x,y and
// get both from the corpus.
std::vector<EmbeddedPoint> load_points(Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  const std::string csv = read_file(cfg.points);
  const std::string header = csv.substr(0, csv.find('\n'));
  std::set<std::string> cols;
  for (const auto& c : split_csv_line(header)) cols.insert(to_lower_ascii(trim(c)));
  if (cols.count("year") && cols.count("rare") && cols.count("common")) return parse_points_csv(csv);
  for (const char* need : {"id", "x", "y"}) {
    if (!cols.count(need)) throw Error(ErrorCode::kParse, std::string("points header lacks column '") + need + "'");
  }
  // Reuse the full parser by adding neutral columns.
  std::string padded;
  std::size_t line_start = 0;
  bool first = true;
  while (line_start < csv.size()) {
    std::size_t nl = csv.find('\n', line_start);
    std::string line = csv.substr(line_start, nl == std::string::npos ? std::string::npos : nl - line_start);
    line_start = nl == std::string::npos ? csv.size() : nl + 1;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    padded += line + (first ? ",year,rare,common\n" : ",0,0,0\n");
    first = false;
  }
  std::vector<EmbeddedPoint> points = parse_points_csv(padded);

  const MarkerSet rare = *rare_set(cfg, true);
  const MarkerSet common = common_set(cfg);
  StringMap<std::uint8_t> markers;
  for (const auto& w : rare.words) markers[w] |= 1;
  for (const auto& w : common.words) markers[w] |= 2;
  std::unordered_map<std::string, std::size_t> by_id;
  for (std::size_t i = 0; i < points.size(); ++i) by_id.emplace(points[i].id, i);

  FileSource source(corpus_path(ctx), cfg.mode);
  Document doc;
  std::string scratch;
  std::size_t matched = 0;
  while (source.next(doc)) {
    auto it = by_id.find(doc.id);
    if (it == by_id.end()) continue;
    EmbeddedPoint& p = points[it->second];
    std::uint8_t bits = 0;
    for_each_token(doc.text, scratch, [&](std::string_view t) {
      auto m = markers.find(t);
      if (m != markers.end()) bits |= m->second;
    });
    p.year = doc.year;
    p.rare = bits & 1;
    p.common = bits & 2;
    ++matched;
  }
  if (matched < points.size()) {
    ctx.err << "local-delta: warning: " << (points.size() - matched)
            << " points have no document in the corpus; they only serve as query locations\n";
  }
  return points;
}

int cmd_local_delta(Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  if (cfg.points.empty()) throw UsageError("local-delta: needs embedded points (--points)");
  prepare_out(cfg);
  const auto points = load_points(ctx);
  LocalDeltaOptions o;
  o.k = cfg.k;
  o.reference_year = cfg.reference_year;
  o.target_year = cfg.target_year;
  o.workers = cfg.workers;
  const auto results = local_delta(points, o);
  write_file(cfg.out / "local_delta.csv", local_delta_csv(results));
  const auto ok = std::count_if(results.begin(), results.end(),
                                [](const LocalDeltaResult& r) { return r.delta.has_value(); });
  ctx.out << "local-delta: " << ok << " of " << results.size() << " points with an estimate -> "
          << (cfg.out / "local_delta.csv").string() << '\n';
  return kExitOk;
}

int cmd_synth(Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  if (cfg.synth_spec.empty()) throw UsageError("synth: needs a corpus spec (--spec)");
  ordered_json j;
  try {
    j = ordered_json::parse(read_file(cfg.synth_spec));
  } catch (const ordered_json::parse_error& e) {
    throw Error(ErrorCode::kParse, std::string("synth spec: invalid JSON: ") + e.what());
  }
  std::optional<InjectionSpec> injection;
  if (j.is_object() && j.contains("injection")) {
    injection = InjectionSpec::from_json(j["injection"].dump());
    j.erase("injection");
  }
  const SyntheticSpec spec = SyntheticSpec::from_json(j.dump());
  prepare_out(cfg);

  SyntheticCorpus corpus = generate_corpus(spec, cfg.seed);
  InjectionResult result;
  result.injected.assign(corpus.docs.size(), 0);
  if (injection) {
    std::uint64_t state = cfg.seed;
    splitmix64(state);
    const std::uint64_t injection_seed = splitmix64(state);
    result = inject_markers(corpus, *injection, injection_seed);
    std::string pool;
    for (const auto& w : injection->marker_pool) pool += w + '\n';
    write_file(cfg.out / "marker_pool.txt", pool);
  }
  {
    std::ofstream docs_out = open_output(cfg.out / kDocuments);
    SyntheticSource source(corpus);
    Document doc;
    while (source.next(doc)) docs_out << to_jsonl_line(doc) << '\n';
  }
  write_file(cfg.out / "truth.csv", truth_csv(corpus, result));
  ordered_json summary;
  summary["seed"] = cfg.seed;
  summary["documents"] = corpus.docs.size();
  summary["spec"] = ordered_json::parse(spec.to_json());
  if (injection) {
    summary["injection"] = {{"target_year", injection->target_year},
                            {"fraction", injection->fraction},
                            {"processed", result.processed},
                            {"censored", result.censored}};
  }
  write_file(cfg.out / "synth_summary.json", summary.dump(2) + "\n");
  ctx.out << "synth: " << corpus.docs.size() << " documents";
  if (injection) ctx.out << ", " << result.processed << " processed";
  ctx.out << " -> " << (cfg.out / kDocuments).string() << '\n';
  return kExitOk;
}

std::vector<std::string> split_words(std::string_view s) {
  std::vector<std::string> out;
  while (!s.empty()) {
    const std::size_t c = s.find(',');
    const std::string w = to_lower_ascii(trim(s.substr(0, c)));
    if (!w.empty()) out.push_back(w);
    s = c == std::string_view::npos ? std::string_view{} : s.substr(c + 1);
  }
  return out;
}

std::string first_line(const std::string& text) { return text.substr(0, text.find('\n')); }

int cmd_report(Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  const OccurrenceMatrix m = load_matrix_artifact(cfg);
  const fs::path dir = cfg.out / "report";
  prepare_out(cfg);
  fs::create_directories(dir);
  const auto annotations = load_annotations(cfg);
  const LemmaTools lt = make_lemmatizer(cfg, m);
  const AnnotationTable* ann = annotations ? &*annotations : nullptr;

  ordered_json manifest = ordered_json::array();
  auto emit = [&](const std::string& name, const std::string& contents) {
    write_file(dir / name, contents);
    manifest.push_back({{"file", name}, {"header", first_line(contents)}});
  };

  // Excess words per year, split by label, plus the representative word.
  std::string per_year =
      "year,eligible,excess,content,style,ambiguous,unannotated,lemmas,lemmas_content,lemmas_style,"
      "representative\n";
  std::set<std::string> highlight;
  std::optional<ExcessCensus> target;
  for (int y : m.years()) {
    bool covered = true;  // Y-3..Y present and non-empty
    for (int d = 0; d <= 3; ++d) {
      const auto yi = m.year_index(y - d);
      covered = covered && yi && m.total(*yi) > 0;
    }
    if (!covered) continue;
    ExcessCensus census = excess_words(m, y, cfg.thresholds, ann, lt.lemmatizer.get());
    const LabelCounts c = census.excess_label_counts();
    const LabelCounts l = unique_lemma_counts(census, *lt.lemmatizer);
    const auto rep = representative_word(census.excess());
    if (rep) highlight.insert(*rep);
    per_year += std::to_string(y) + ',' + std::to_string(census.eligible_count()) + ',' +
                std::to_string(c.total) + ',' + std::to_string(c.content) + ',' +
                std::to_string(c.style) + ',' + std::to_string(c.ambiguous) + ',' +
                std::to_string(c.unannotated) + ',' + std::to_string(l.total) + ',' +
                std::to_string(l.content) + ',' + std::to_string(l.style) + ',' +
                csv_escape(rep.value_or("")) + '\n';
    if (y == cfg.target_year) target = std::move(census);
  }
  emit("excess_per_year.csv", per_year);
  if (target) {
    emit("stats_" + std::to_string(cfg.target_year) + ".csv", stats_csv(*target, false));
    std::size_t taken = 0;
    for (const auto& row : target->rows) {  // ratio descending
      if (taken >= ctx.extras.top_words) break;
      if (row.stats.excess) {
        highlight.insert(row.stats.word);
        ++taken;
      }
    }
  } else {
    ctx.err << "report: warning: target year " << cfg.target_year
            << " lacks the three preceding years in the matrix; no stats table\n";
  }
  if (!ctx.extras.words.empty()) {
    highlight.clear();
    for (auto& w : split_words(ctx.extras.words)) highlight.insert(std::move(w));
  }

  // Frequency trajectories with the counterfactual where it is defined.
  std::string ts = "word,year,p,q\n";
  for (const auto& w : highlight) {
    const auto wi = m.word_index(w);
    if (!wi) {
      ctx.err << "report: warning: '" << w << "' is not in the matrix\n";
      continue;
    }
    for (int y : m.years()) {
      const std::size_t yi = *m.year_index(y);
      if (m.total(yi) == 0) continue;
      const double p = cfg.thresholds.smoothing
                           ? smoothed_frequency(m.count(*wi, yi), m.total(yi))
                           : static_cast<double>(m.count(*wi, yi)) / static_cast<double>(m.total(yi));
      std::string q;
      if (m.year_index(y - 3) && m.year_index(y - 2) && m.total(*m.year_index(y - 3)) > 0 &&
          m.total(*m.year_index(y - 2)) > 0) {
        q = format_double(word_year_stats(m, *wi, y, cfg.thresholds).q);
      }
      ts += csv_escape(w) + ',' + std::to_string(y) + ',' + format_double(p) + ',' + q + '\n';
    }
  }
  emit("timeseries.csv", ts);

  // Bundle whatever the other stages have produced.
  for (const char* name : {"gap.csv", "sweep.csv", "gaps.csv", "local_delta.csv"}) {
    const fs::path p = cfg.out / name;
    if (fs::is_regular_file(p)) emit(name, read_file(p));
  }
  write_file(dir / "manifest.json", manifest.dump(2) + "\n");
  ctx.out << "report: " << manifest.size() << " tables -> " << dir.string() << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Excess-vocabulary analysis of dated abstract corpora", "exvocab"};
  app.require_subcommand(0, 1);

  std::string config_path;
  std::optional<int> year;
  std::string matrix, markers, annotations, out_dir, subgroups, points, spec, corpus;
  std::vector<std::string> inputs;
  unsigned workers = 1;
  std::uint64_t seed = 1;
  std::size_t k = 0;
  bool dump_config = false, lenient = false;
  Extras extras;

  auto* o_config = app.add_option("--config", config_path, "Run config JSON (default: $EXVOCAB_CONFIG)");
  auto* o_year = app.add_option("--year", year, "Target year");
  auto* o_matrix = app.add_option("--matrix", matrix, "Occurrence matrix (csv or csv.gz)");
  auto* o_markers = app.add_option("--markers", markers, "Rare marker set, one word per line");
  auto* o_ann = app.add_option("--annotations", annotations, "Word annotations CSV (word,label,pos)");
  auto* o_out = app.add_option("--out", out_dir, "Output directory");
  auto* o_workers = app.add_option("--workers", workers, "Worker threads for corpus passes")
                        ->check(CLI::PositiveNumber);
  auto* o_seed = app.add_option("--seed", seed, "Seed for synthetic corpora");
  auto* o_input = app.add_option("--input", inputs, "Raw inputs for ingest (files or directories)");
  auto* o_sub = app.add_option("--subgroups", subgroups, "Subgroup spec JSON");
  auto* o_points = app.add_option("--points", points, "Embedded points CSV");
  auto* o_spec = app.add_option("--spec", spec, "Synthetic corpus spec JSON");
  auto* o_k = app.add_option("--k", k, "Neighbours for local-delta")->check(CLI::PositiveNumber);
  app.add_option("--corpus", corpus, "Documents JSONL read by downstream stages");
  auto* o_lenient = app.add_flag("--lenient", lenient, "Skip malformed records instead of failing");
  app.add_option("--words", extras.words, "report: comma-separated words for the time series");
  app.add_option("--top-words", extras.top_words, "report: top excess words added to the time series");
  app.add_flag("--dump-config", dump_config, "Print the effective config and exit");

  using Handler = int (*)(Context&);
  const std::vector<std::tuple<std::string, std::string, Handler>> commands = {
      {"ingest", "PubMed XML / JSONL -> documents.jsonl", cmd_ingest},
      {"clean", "Strip boilerplate and correction notices -> cleaned.jsonl", cmd_clean},
      {"count", "Word x year occurrence matrix -> matrix.csv.gz", cmd_count},
      {"excess", "Per-word excess statistics -> excess_<year>.csv", cmd_excess},
      {"gap", "Marker-set gaps -> gap.csv", cmd_gap},
      {"sweep", "Rare-set frequency sweep -> sweep.csv, rare_set.txt", cmd_sweep},
      {"subgroups", "Per-subgroup gaps -> gaps.csv", cmd_subgroups},
      {"local-delta", "kNN local gaps in an embedding -> local_delta.csv", cmd_local_delta},
      {"synth", "Synthetic corpus with optional marker injection", cmd_synth},
      {"report", "Bundle figure-data tables -> report/", cmd_report},
  };
  std::vector<CLI::App*> subs;
  for (const auto& [name, desc, handler] : commands) {
    auto* s = app.add_subcommand(name, desc);
    s->fallthrough();
    subs.push_back(s);
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "exvocab: " << e.what() << '\n';
    return kExitUsage;
  }

  Handler handler = nullptr;
  std::string command = "exvocab";
  for (std::size_t i = 0; i < subs.size(); ++i) {
    if (subs[i]->parsed()) {
      handler = std::get<2>(commands[i]);
      command = std::get<0>(commands[i]);
    }
  }
  if (!handler && !dump_config) {
    err << app.help();
    return kExitUsage;
  }

  try {
    Context ctx{RunConfig{}, extras, out, err};
    if (o_config->count() == 0) {
      if (const char* env = std::getenv(kConfigEnv); env && *env) config_path = env;
    }
    if (!config_path.empty()) {
      ctx.cfg = RunConfig::load(config_path);
    } else {
      ctx.cfg.make_absolute(fs::current_path());
    }
    RunConfig& cfg = ctx.cfg;
    const fs::path cwd = fs::current_path();
    auto abs = [&](const std::string& p) { return fs::path(p).is_relative() ? (cwd / p).lexically_normal() : fs::path(p); };
    if (o_year->count()) cfg.target_year = *year;
    if (o_matrix->count()) cfg.matrix = abs(matrix);
    if (o_markers->count()) cfg.rare_markers = abs(markers);
    if (o_ann->count()) cfg.annotations = abs(annotations);
    if (o_out->count()) cfg.out = abs(out_dir);
    if (o_workers->count()) cfg.workers = workers;
    if (o_seed->count()) cfg.seed = seed;
    if (o_sub->count()) cfg.subgroups = abs(subgroups);
    if (o_points->count()) cfg.points = abs(points);
    if (o_spec->count()) cfg.synth_spec = abs(spec);
    if (o_k->count()) cfg.k = k;
    if (o_lenient->count()) cfg.mode = ParseMode::kLenient;
    if (o_input->count()) {
      cfg.inputs.clear();
      for (const auto& i : inputs) cfg.inputs.push_back(abs(i));
    }
    if (!corpus.empty()) ctx.extras.corpus = abs(corpus);
    cfg.make_absolute(cwd);
    cfg.validate();

    if (dump_config) {
      out << cfg.to_json();
      return kExitOk;
    }
    return handler(ctx);
  } catch (const UsageError& e) {
    err << command << ": " << unprefixed(e.what(), command) << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << command << ": error [" << error_code_name(e.code()) << "]: " << unprefixed(e.what(), command)
        << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    err << command << ": error: " << unprefixed(e.what(), command) << '\n';
    return kExitData;
  }
}

}  // namespace exvocab::cli
