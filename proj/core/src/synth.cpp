#include "exvocab/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "exvocab/error.hpp"
#include "exvocab/io.hpp"

namespace exvocab {

using nlohmann::json;
using nlohmann::ordered_json;

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {

using Rng = std::mt19937_64;

// Uniform double in [0, 1).
double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Uniform integer in [0, n) by rejection; independent of the standard
// library's distribution implementations.
std::uint64_t uniform_below(Rng& rng, std::uint64_t n) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

Rng derived_rng(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t state = seed ^ (salt * 0xd1b54a32d192ed03ULL);
  return Rng(splitmix64(state));
}

bool is_plain_word(std::string_view w) {
  return !w.empty() && std::all_of(w.begin(), w.end(), [](char c) { return c >= 'a' && c <= 'z'; });
}

void check_probability(double p, const std::string& what) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, what + ": probability " + format_double(p) +
                                                 " outside [0, 1]");
  }
}

}  // namespace

double BaseWord::at(int year) const {
  if (trajectory.empty()) return p;
  auto it = trajectory.find(year);
  if (it == trajectory.end()) {
    throw Error(ErrorCode::kInvalidArgument,
                "base word '" + word + "': trajectory has no value for " + std::to_string(year));
  }
  return it->second;
}

std::vector<int> SyntheticSpec::years() const {
  std::vector<int> out;
  for (int y = first_year; y <= last_year; ++y) out.push_back(y);
  return out;
}

std::uint64_t SyntheticSpec::docs_in(const SyntheticGroup& g, int year) const {
  auto it = g.docs_by_year.find(year);
  if (it != g.docs_by_year.end()) return it->second;
  return g.docs_per_year.value_or(docs_per_year);
}

void SyntheticSpec::validate() const {
  if (first_year > last_year) throw Error(ErrorCode::kInvalidArgument, "synth: empty year range");
  if (docs_per_year < 1 && groups.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "synth: docs_per_year must be >= 1");
  }
  if (min_filler > max_filler) throw Error(ErrorCode::kInvalidArgument, "synth: doc_length min > max");
  if (max_filler > 0 && filler_lexicon == 0) {
    throw Error(ErrorCode::kInvalidArgument, "synth: filler tokens need a non-empty filler lexicon");
  }
  std::set<std::string> seen;
  for (const auto& w : base_vocab) {
    if (!is_plain_word(w.word)) {
      throw Error(ErrorCode::kInvalidArgument, "synth: base word '" + w.word + "' must be lowercase a-z");
    }
    if (!seen.insert(w.word).second) {
      throw Error(ErrorCode::kInvalidArgument, "synth: duplicate base word '" + w.word + "'");
    }
    if (w.trajectory.empty()) {
      check_probability(w.p, "base word '" + w.word + "'");
    } else {
      for (int y : years()) check_probability(w.at(y), "base word '" + w.word + "'");
    }
  }
  std::set<std::string> names;
  for (const auto& g : groups) {
    if (!names.insert(g.name).second) {
      throw Error(ErrorCode::kInvalidArgument, "synth: duplicate group '" + g.name + "'");
    }
  }
}

SyntheticSpec SyntheticSpec::from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParse, std::string("synth spec: invalid JSON: ") + e.what());
  }
  SyntheticSpec s;
  try {
    if (j.contains("years")) {
      const json& y = j["years"];
      if (y.is_array() && y.size() == 2) {
        s.first_year = y[0].get<int>();
        s.last_year = y[1].get<int>();
      } else if (y.is_object()) {
        s.first_year = y.at("from").get<int>();
        s.last_year = y.at("to").get<int>();
      } else {
        throw Error(ErrorCode::kParse, "synth spec: 'years' must be [first, last]");
      }
    }
    s.docs_per_year = j.value("docs_per_year", s.docs_per_year);
    for (const auto& b : j.value("base_vocab", json::array())) {
      BaseWord w;
      w.word = b.at("word").get<std::string>();
      if (b.contains("trajectory")) {
        for (const auto& [k, v] : b["trajectory"].items()) w.trajectory[std::stoi(k)] = v.get<double>();
      } else {
        w.p = b.at("p").get<double>();
      }
      s.base_vocab.push_back(std::move(w));
    }
    if (j.contains("doc_length")) {
      s.min_filler = j["doc_length"].value("min", 0U);
      s.max_filler = j["doc_length"].value("max", s.min_filler);
    }
    s.filler_lexicon = j.value("filler_lexicon", s.filler_lexicon);
    for (const auto& gj : j.value("groups", json::array())) {
      SyntheticGroup g;
      g.name = gj.at("name").get<std::string>();
      if (gj.contains("journal")) g.journal = gj["journal"].get<std::string>();
      if (gj.contains("country")) g.country = gj["country"].get<std::string>();
      for (const auto& f : gj.value("fields", json::array())) g.fields.insert(f.get<std::string>());
      if (gj.contains("docs_per_year")) g.docs_per_year = gj["docs_per_year"].get<std::uint64_t>();
      for (const auto& [k, v] : gj.value("docs_by_year", json::object()).items()) {
        g.docs_by_year[std::stoi(k)] = v.get<std::uint64_t>();
      }
      s.groups.push_back(std::move(g));
    }
    s.seed = j.value("seed", s.seed);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("synth spec: ") + e.what());
  } catch (const std::logic_error& e) {
    throw Error(ErrorCode::kParse, std::string("synth spec: bad year key: ") + e.what());
  }
  s.validate();
  return s;
}

std::string SyntheticSpec::to_json() const {
  ordered_json j;
  j["years"] = {first_year, last_year};
  j["docs_per_year"] = docs_per_year;
  j["base_vocab"] = ordered_json::array();
  for (const auto& w : base_vocab) {
    ordered_json b;
    b["word"] = w.word;
    if (w.trajectory.empty()) {
      b["p"] = w.p;
    } else {
      ordered_json t = ordered_json::object();
      for (const auto& [y, p] : w.trajectory) t[std::to_string(y)] = p;
      b["trajectory"] = t;
    }
    j["base_vocab"].push_back(b);
  }
  j["doc_length"] = {{"min", min_filler}, {"max", max_filler}};
  j["filler_lexicon"] = filler_lexicon;
  if (!groups.empty()) {
    j["groups"] = ordered_json::array();
    for (const auto& g : groups) {
      ordered_json gj;
      gj["name"] = g.name;
      if (g.journal) gj["journal"] = *g.journal;
      if (g.country) gj["country"] = *g.country;
      if (!g.fields.empty()) gj["fields"] = g.fields;
      if (g.docs_per_year) gj["docs_per_year"] = *g.docs_per_year;
      if (!g.docs_by_year.empty()) {
        ordered_json d = ordered_json::object();
        for (const auto& [y, n] : g.docs_by_year) d[std::to_string(y)] = n;
        gj["docs_by_year"] = d;
      }
      j["groups"].push_back(gj);
    }
  }
  j["seed"] = seed;
  return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------

std::uint32_t SyntheticCorpus::word_id(std::string_view word) {
  if (auto id = find_word(word)) return *id;
  dictionary.emplace_back(word);
  return static_cast<std::uint32_t>(dictionary.size() - 1);
}

std::optional<std::uint32_t> SyntheticCorpus::find_word(std::string_view word) const {
  auto it = std::find(dictionary.begin(), dictionary.end(), word);
  if (it == dictionary.end()) return std::nullopt;
  return static_cast<std::uint32_t>(it - dictionary.begin());
}

std::string SyntheticCorpus::doc_id(const SyntheticDoc& d) const {
  return "syn" + std::to_string(d.year) + "-" + std::to_string(d.ordinal);
}

namespace {

void capitalize(std::string& w) {
  if (!w.empty() && w[0] >= 'a' && w[0] <= 'z') w[0] = static_cast<char>(w[0] - 'a' + 'A');
}

}  // namespace

Document SyntheticCorpus::to_document(const SyntheticDoc& d) const {
  Document doc;
  doc.id = doc_id(d);
  doc.year = d.year;
  doc.title = "Synthetic abstract " + doc.id;
  if (d.group < spec.groups.size()) {
    const SyntheticGroup& g = spec.groups[d.group];
    doc.journal = g.journal;
    doc.country = g.country;
    doc.fields = g.fields;
  }

  Rng rng(d.filler_seed);
  std::vector<std::string> tokens;
  tokens.reserve(d.words.size() + d.filler_count);
  for (std::uint32_t id : d.words) tokens.push_back(dictionary[id]);
  for (std::uint32_t i = 0; i < d.filler_count; ++i) {
    // Skewed toward the front of the lexicon, roughly Zipf-like.
    const double u = uniform01(rng);
    const auto idx = static_cast<std::size_t>(u * u * static_cast<double>(filler.size()));
    tokens.push_back(filler[std::min(idx, filler.size() - 1)]);
  }
  for (std::size_t i = tokens.size(); i > 1; --i) {
    std::swap(tokens[i - 1], tokens[uniform_below(rng, i)]);
  }

  std::string text;
  std::size_t sentence_left = 0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    std::string& t = tokens[i];
    if (sentence_left == 0) {
      if (!text.empty()) text += ". ";
      capitalize(t);
      sentence_left = 8 + uniform_below(rng, 13);
    } else {
      text += uniform01(rng) < 0.08 ? ", " : " ";
    }
    const double r = uniform01(rng);
    if (r < 0.01) {
      for (char& c : t) c = static_cast<char>(c >= 'a' && c <= 'z' ? c - 'a' + 'A' : c);
    }
    text += t;
    if (r > 0.97) text += " (" + std::to_string(uniform_below(rng, 1000)) + "%)";
    --sentence_left;
  }
  if (!text.empty()) text += '.';
  doc.text = std::move(text);
  return doc;
}

std::vector<Document> SyntheticCorpus::to_documents() const {
  std::vector<Document> out;
  out.reserve(docs.size());
  for (const auto& d : docs) out.push_back(to_document(d));
  return out;
}

std::vector<std::uint64_t> SyntheticCorpus::containment(const std::set<std::string>& words,
                                                        const std::vector<int>& years,
                                                        std::vector<std::uint64_t>* totals) const {
  std::vector<std::uint32_t> ids;
  for (const auto& w : words) {
    if (auto id = find_word(w)) ids.push_back(*id);
  }
  std::vector<std::uint64_t> hits(years.size(), 0);
  if (totals != nullptr) totals->assign(years.size(), 0);
  for (const auto& d : docs) {
    auto it = std::find(years.begin(), years.end(), d.year);
    if (it == years.end()) continue;
    const auto y = static_cast<std::size_t>(it - years.begin());
    if (totals != nullptr) ++(*totals)[y];
    const bool hit = std::any_of(ids.begin(), ids.end(), [&](std::uint32_t id) {
      return std::binary_search(d.words.begin(), d.words.end(), id);
    });
    if (hit) ++hits[y];
  }
  return hits;
}

bool SyntheticSource::next(Document& doc) {
  if (pos_ >= corpus_->docs.size()) return false;
  doc = corpus_->to_document(corpus_->docs[pos_++]);
  return true;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> make_filler(std::uint64_t seed, std::uint32_t n,
                                     const std::vector<std::string>& avoid) {
  static constexpr std::string_view kOnsets[] = {"b", "d", "f", "g", "k", "l", "m", "n", "p",
                                                 "r", "s", "t", "v", "br", "tr", "pl", "st", "gr"};
  static constexpr std::string_view kVowels[] = {"a", "e", "i", "o", "u", "ai", "ou"};
  std::unordered_set<std::string> taken(avoid.begin(), avoid.end());
  std::vector<std::string> out;
  out.reserve(n);
  Rng rng = derived_rng(seed, 0xf111e7);
  while (out.size() < n) {
    std::string w;
    const std::uint64_t syllables = 2 + uniform_below(rng, 3);
    for (std::uint64_t s = 0; s < syllables; ++s) {
      w += kOnsets[uniform_below(rng, std::size(kOnsets))];
      w += kVowels[uniform_below(rng, std::size(kVowels))];
    }
    if (uniform01(rng) < 0.4) w += kOnsets[uniform_below(rng, 12)];
    if (w.size() < 4 || !taken.insert(w).second) continue;
    out.push_back(std::move(w));
  }
  return out;
}

}  // namespace

SyntheticCorpus generate_corpus(const SyntheticSpec& spec_in, std::uint64_t seed) {
  SyntheticCorpus c;
  c.spec = spec_in;
  c.spec.seed = seed;
  c.spec.validate();
  for (const auto& w : c.spec.base_vocab) c.dictionary.push_back(w.word);
  c.filler = make_filler(seed, c.spec.max_filler > 0 ? c.spec.filler_lexicon : 0, c.dictionary);

  std::vector<SyntheticGroup> groups = c.spec.groups;
  if (groups.empty()) groups.push_back(SyntheticGroup{});

  for (int year : c.spec.years()) {
    Rng rng = derived_rng(seed, static_cast<std::uint64_t>(year));
    const std::size_t start = c.docs.size();
    std::uint32_t ordinal = 0;
    for (std::uint32_t g = 0; g < groups.size(); ++g) {
      const std::uint64_t n = c.spec.groups.empty() ? c.spec.docs_per_year
                                                    : c.spec.docs_in(groups[g], year);
      for (std::uint64_t i = 0; i < n; ++i) {
        SyntheticDoc d;
        d.year = year;
        d.group = g;
        d.ordinal = ordinal++;
        d.filler_count =
            c.spec.min_filler +
            static_cast<std::uint32_t>(uniform_below(rng, c.spec.max_filler - c.spec.min_filler + 1));
        d.filler_seed = rng();
        c.docs.push_back(std::move(d));
      }
    }
    const std::size_t end = c.docs.size();
    // Bernoulli(p) per (doc, word), drawn as geometric gaps between hits.
    for (std::uint32_t w = 0; w < c.spec.base_vocab.size(); ++w) {
      const double p = c.spec.base_vocab[w].at(year);
      if (p <= 0.0) continue;
      if (p >= 1.0) {
        for (std::size_t i = start; i < end; ++i) c.docs[i].words.push_back(w);
        continue;
      }
      const double log_q = std::log1p(-p);
      std::size_t pos = start;
      while (true) {
        const double u = 1.0 - uniform01(rng);  // (0, 1]
        const double skip = std::floor(std::log(u) / log_q);
        if (skip >= static_cast<double>(end - pos)) break;
        pos += static_cast<std::size_t>(skip);
        c.docs[pos].words.push_back(w);
        if (++pos >= end) break;
      }
    }
  }
  return c;
}

SyntheticCorpus generate_corpus(const SyntheticSpec& spec) { return generate_corpus(spec, spec.seed); }

// ---------------------------------------------------------------------------

void InjectionSpec::validate() const {
  if (!(fraction >= 0.0 && fraction <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "injection: fraction must be in [0, 1]");
  }
  if (marker_pool.empty()) throw Error(ErrorCode::kInvalidArgument, "injection: empty marker pool");
  for (const auto& w : marker_pool) {
    if (!is_plain_word(w)) {
      throw Error(ErrorCode::kInvalidArgument, "injection: marker '" + w + "' must be lowercase a-z");
    }
  }
  if (words_per_doc < 1) throw Error(ErrorCode::kInvalidArgument, "injection: words_per_doc must be >= 1");
  if (words_per_doc > marker_pool.size()) {
    throw Error(ErrorCode::kInvalidArgument, "injection: words_per_doc exceeds the pool size");
  }
  check_probability(censor_probability, "injection censor_probability");
}

InjectionSpec InjectionSpec::from_json(std::string_view text) {
  InjectionSpec s;
  try {
    json j = json::parse(text);
    s.target_year = j.value("target_year", s.target_year);
    s.fraction = j.value("fraction", s.fraction);
    s.marker_pool = j.value("marker_pool", std::vector<std::string>{});
    s.words_per_doc = j.value("words_per_doc", s.words_per_doc);
    s.guarantee_novel = j.value("guarantee_novel", s.guarantee_novel);
    s.censor_probability = j.value("censor_probability", s.censor_probability);
    if (j.contains("group")) s.group = j["group"].get<std::string>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("injection spec: ") + e.what());
  }
  s.validate();
  return s;
}

InjectionResult inject_markers(SyntheticCorpus& corpus, const InjectionSpec& inj, std::uint64_t seed) {
  inj.validate();
  std::optional<std::uint32_t> group;
  if (inj.group) {
    for (std::uint32_t g = 0; g < corpus.spec.groups.size(); ++g) {
      if (corpus.spec.groups[g].name == *inj.group) group = g;
    }
    if (!group) throw Error(ErrorCode::kInvalidArgument, "injection: unknown group '" + *inj.group + "'");
  }
  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i < corpus.docs.size(); ++i) {
    const auto& d = corpus.docs[i];
    if (d.year == inj.target_year && (!group || d.group == *group)) eligible.push_back(i);
  }
  if (eligible.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "injection: no documents in target year " + std::to_string(inj.target_year));
  }
  std::vector<std::uint32_t> pool;
  for (const auto& w : inj.marker_pool) {
    if (std::find(corpus.filler.begin(), corpus.filler.end(), w) != corpus.filler.end()) {
      throw Error(ErrorCode::kInvalidArgument, "injection: marker '" + w + "' collides with filler");
    }
    const std::uint32_t id = corpus.word_id(w);
    if (std::find(pool.begin(), pool.end(), id) == pool.end()) pool.push_back(id);
  }

  Rng rng = derived_rng(seed, 0x1a7ec7);
  const auto n = static_cast<std::size_t>(
      std::llround(inj.fraction * static_cast<double>(eligible.size())));
  for (std::size_t i = 0; i < n; ++i) {
    std::swap(eligible[i], eligible[i + uniform_below(rng, eligible.size() - i)]);
  }

  InjectionResult result;
  result.injected.assign(corpus.docs.size(), 0);
  std::vector<std::uint32_t> order = pool;
  for (std::size_t i = 0; i < n; ++i) {
    SyntheticDoc& d = corpus.docs[eligible[i]];
    for (std::size_t k = order.size(); k > 1; --k) std::swap(order[k - 1], order[uniform_below(rng, k)]);
    auto present = [&](std::uint32_t id) {
      return std::binary_search(d.words.begin(), d.words.end(), id);
    };
    std::vector<std::uint32_t> picked(order.begin(), order.begin() + inj.words_per_doc);
    if (inj.guarantee_novel && std::all_of(picked.begin(), picked.end(), present)) {
      auto novel = std::find_if(order.begin() + inj.words_per_doc, order.end(),
                                [&](std::uint32_t id) { return !present(id); });
      if (novel == order.end()) {
        throw Error(ErrorCode::kPoolExhausted,
                    "injection: " + corpus.doc_id(d) + " already contains every pool word");
      }
      picked[0] = *novel;
    }
    for (std::uint32_t id : picked) {
      auto pos = std::lower_bound(d.words.begin(), d.words.end(), id);
      if (pos == d.words.end() || *pos != id) d.words.insert(pos, id);
    }
    if (inj.censor_probability > 0.0 && uniform01(rng) < inj.censor_probability) {
      std::erase_if(d.words, [&](std::uint32_t id) {
        return std::find(pool.begin(), pool.end(), id) != pool.end();
      });
      ++result.censored;
    }
    result.injected[eligible[i]] = 1;
    ++result.processed;
  }
  return result;
}

std::string truth_csv(const SyntheticCorpus& corpus, const InjectionResult& result) {
  std::string out = "id,injected\n";
  for (std::size_t i = 0; i < corpus.docs.size(); ++i) {
    out += corpus.doc_id(corpus.docs[i]);
    out += result.injected.size() > i && result.injected[i] ? ",1\n" : ",0\n";
  }
  return out;
}

// ---------------------------------------------------------------------------

OccurrenceMatrix oracle_counts(std::span<const Document> corpus, const std::vector<std::string>& words,
                               const std::vector<int>& years) {
  if (corpus.size() > kOracleMaxDocs) {
    throw Error(ErrorCode::kSizeCap, "oracle_counts: " + std::to_string(corpus.size()) +
                                         " documents exceeds the cap of " +
                                         std::to_string(kOracleMaxDocs));
  }
  std::vector<std::string> uniq = words;
  std::sort(uniq.begin(), uniq.end());
  uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
  std::vector<std::uint64_t> counts(uniq.size() * years.size(), 0);
  std::vector<std::uint64_t> totals(years.size(), 0);
  auto word_byte = [](unsigned char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' || c >= 0x80;
  };
  for (const Document& doc : corpus) {
    std::size_t y = 0;
    while (y < years.size() && years[y] != doc.year) ++y;
    if (y == years.size()) {
      throw Error(ErrorCode::kYearOutOfRange, "oracle_counts: year " + std::to_string(doc.year));
    }
    ++totals[y];
    std::string lower = doc.text;
    for (char& ch : lower) {
      if (ch >= 'A' && ch <= 'Z') ch = static_cast<char>(ch - 'A' + 'a');
    }
    for (std::size_t w = 0; w < uniq.size(); ++w) {
      const std::string& word = uniq[w];
      for (std::size_t pos = lower.find(word); pos != std::string::npos;
           pos = lower.find(word, pos + 1)) {
        const bool left = pos == 0 || !word_byte(static_cast<unsigned char>(lower[pos - 1]));
        const std::size_t after = pos + word.size();
        const bool right = after == lower.size() || !word_byte(static_cast<unsigned char>(lower[after]));
        if (left && right) {
          ++counts[w * years.size() + y];
          break;
        }
      }
    }
  }
  return OccurrenceMatrix(years, std::move(uniq), std::move(counts), std::move(totals));
}

}  // namespace exvocab
