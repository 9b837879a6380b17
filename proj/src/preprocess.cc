#include "ambig/preprocess.h"

#include <algorithm>
#include <string>

#include "ambig/error.h"
#include "ambig/text.h"

namespace ambig {

namespace {

using WordList = std::unordered_set<std::string_view>;

// Closed-class words (articles, pronouns, auxiliaries, prepositions,
// conjunctions, common particles). Tokens are letter runs, so elided forms
// appear as their bare stem ("l", "qu", "don").
const WordList& stopwords(Lang lang) {
  static const WordList en = {
      "the",  "a",     "an",   "and",   "or",    "but",   "of",    "to",    "in",    "on",
      "at",   "by",    "for",  "with",  "from",  "as",    "is",    "are",   "was",   "were",
      "be",   "been",  "being", "am",   "do",    "does",  "did",   "have",  "has",   "had",
      "will", "would", "can",  "could", "should", "shall", "may",  "might", "must",  "not",
      "no",   "it",    "its",  "this",  "that",  "these", "those", "there", "here",  "what",
      "which", "who",  "whom", "whose", "when",  "where", "why",   "how",   "all",   "any",
      "some", "i",     "you",  "he",    "she",   "we",    "they",  "me",    "him",   "her",
      "us",   "them",  "my",   "your",  "his",   "our",   "their", "if",    "then",  "than",
      "so",   "very",  "just", "about", "up",    "out",   "into",  "s",     "t",     "don",
      "ll",   "re",    "ve",   "m"};
  static const WordList fr = {
      "le",    "la",    "les",    "l",     "un",    "une",   "des",    "du",    "de",
      "d",     "et",    "ou",     "mais",  "donc",  "ni",    "car",    "à",     "au",
      "aux",   "en",    "dans",   "sur",   "sous",  "par",   "pour",   "avec",  "sans",
      "chez",  "vers",  "entre",  "est",   "sont",  "était", "étaient", "être", "été",
      "suis",  "sommes", "êtes",  "ai",    "as",    "a",     "avons",  "avez",  "ont",
      "avait", "je",    "j",      "tu",    "il",    "elle",  "nous",   "vous",  "ils",
      "elles", "on",    "me",     "m",     "te",    "se",    "s",      "lui",   "leur",
      "leurs", "moi",   "toi",    "eux",   "ce",    "c",     "cet",    "cette", "ces",
      "mon",   "ma",    "mes",    "ton",   "ta",    "tes",   "son",    "sa",    "ses",
      "notre", "nos",   "votre",  "vos",   "qui",   "que",   "qu",     "quoi",  "dont",
      "où",    "ne",    "n",      "pas",   "plus",  "très",  "bien",   "oui",   "non",
      "tout",  "tous",  "toute",  "toutes", "même", "aussi", "comme",  "quand"};
  static const WordList de = {
      "der",   "die",   "das",   "den",    "dem",   "des",   "ein",   "eine",  "einen",
      "einem", "einer", "eines", "und",    "oder",  "aber",  "doch",  "in",    "im",
      "an",    "am",    "auf",   "aus",    "bei",   "mit",   "nach",  "von",   "vom",
      "zu",    "zum",   "zur",   "für",    "über",  "unter", "vor",   "durch", "gegen",
      "ohne",  "um",    "ist",   "sind",   "war",   "waren", "sein",  "bin",   "bist",
      "seid",  "hat",   "habe",  "hast",   "haben", "hatte", "wird",  "werden", "wurde",
      "kann",  "muss",  "ich",   "du",     "er",    "sie",   "es",    "wir",   "ihr",
      "mich",  "dich",  "mir",   "dir",    "ihn",   "ihm",   "uns",   "euch",  "mein",
      "meine", "dein",  "deine", "seine",  "ihre",  "unser", "nicht", "kein",  "keine",
      "ja",    "nein",  "auch",  "noch",   "nur",   "schon", "so",    "was",   "wer",
      "wie",   "wo",    "wenn",  "dass",   "als",   "sich",  "man",   "hier",  "da"};
  static const WordList es = {
      "el",     "la",     "los",     "las",    "lo",    "un",    "una",    "unos",   "unas",
      "de",     "del",    "al",      "a",      "en",    "con",   "por",    "para",   "sin",
      "sobre",  "entre",  "y",       "e",      "o",     "u",     "pero",   "que",    "qué",
      "quien",  "quién",  "como",    "cómo",   "cuando", "donde", "dónde", "es",     "son",
      "era",    "eran",   "ser",     "fue",    "está",  "están", "estoy",  "estás",  "estaba",
      "soy",    "eres",   "somos",   "he",     "ha",    "han",   "hay",    "había",  "yo",
      "tú",     "tu",     "él",      "ella",   "nosotros", "vosotros", "ellos", "ellas", "usted",
      "ustedes", "me",    "te",      "se",     "le",    "les",   "nos",    "os",     "mi",
      "mis",    "su",     "sus",     "nuestro", "nuestra", "este", "esta", "esto",  "estos",
      "estas",  "ese",    "esa",     "eso",    "no",    "sí",    "si",     "muy",    "más",
      "ya",     "también", "porque", "todo",   "todos", "nada",  "algo"};
  switch (lang) {
    case Lang::kEn: return en;
    case Lang::kFr: return fr;
    case Lang::kDe: return de;
    case Lang::kEs: return es;
    case Lang::kUnknown: break;
  }
  throw Error("no stopword list for unknown language");
}

std::vector<std::string> letter_runs(std::string_view text) {
  std::vector<std::string> runs;
  std::string cur;
  std::size_t i = 0;
  while (i < text.size()) {
    const auto cp = decode_at(text, i);
    if (!cp) throw Error("invalid UTF-8 at byte " + std::to_string(i));
    if (is_latin_letter(cp->value)) {
      append_utf8(cur, latin_to_lower(cp->value));
    } else if (!cur.empty()) {
      runs.push_back(std::move(cur));
      cur.clear();
    }
    i += cp->length;
  }
  if (!cur.empty()) runs.push_back(std::move(cur));
  return runs;
}

std::size_t index_of(Lang lang) {
  const auto it = std::find(kKnownLangs.begin(), kKnownLangs.end(), lang);
  if (it == kKnownLangs.end()) throw Error("language has no coverage index");
  return static_cast<std::size_t>(it - kKnownLangs.begin());
}

}  // namespace

std::string_view lang_code(Lang lang) {
  switch (lang) {
    case Lang::kEn: return "en";
    case Lang::kFr: return "fr";
    case Lang::kDe: return "de";
    case Lang::kEs: return "es";
    case Lang::kUnknown: return "unknown";
  }
  return "unknown";
}

Lang parse_lang(std::string_view code) {
  for (const Lang lang : kKnownLangs) {
    if (lang_code(lang) == code) return lang;
  }
  throw ConfigError("unsupported language '" + std::string(code) + "' (expected en, fr, de or es)");
}

void PreprocessConfig::validate() const {
  if (!(max_length_ratio >= 1.0)) throw ConfigError("max length ratio must be >= 1");
  if (expected_src_lang == Lang::kUnknown || expected_tgt_lang == Lang::kUnknown) {
    throw ConfigError("expected languages must be one of en, fr, de, es");
  }
}

bool PairDeduper::insert(std::string_view src, std::string_view tgt) {
  return seen_.insert(pair_hash(rtrim_whitespace(src), rtrim_whitespace(tgt))).second;
}

std::vector<ParallelSegment> dedup_exact_pairs(std::vector<ParallelSegment> corpus) {
  PairDeduper seen;
  std::vector<ParallelSegment> out;
  out.reserve(corpus.size());
  for (auto& seg : corpus) {
    if (seen.insert(seg.src, seg.tgt)) out.push_back(std::move(seg));
  }
  return out;
}

bool length_ratio_ok(const ParallelSegment& seg, const PreprocessConfig& cfg) {
  const auto src = whitespace_token_count(seg.src);
  const auto tgt = whitespace_token_count(seg.tgt);
  if (src == 0 || tgt == 0) return false;
  const double ratio = static_cast<double>(std::max(src, tgt)) / static_cast<double>(std::min(src, tgt));
  return ratio <= cfg.max_length_ratio;
}

std::array<double, 4> stopword_coverage(std::string_view text) {
  std::array<double, 4> coverage{};
  const auto tokens = letter_runs(text);
  if (tokens.empty()) return coverage;
  for (std::size_t l = 0; l < kKnownLangs.size(); ++l) {
    const auto& words = stopwords(kKnownLangs[l]);
    const auto hits = std::count_if(tokens.begin(), tokens.end(),
                                    [&](const std::string& t) { return words.contains(t); });
    coverage[l] = static_cast<double>(hits) / static_cast<double>(tokens.size());
  }
  return coverage;
}

Lang langid_of(std::string_view text) {
  const auto coverage = stopword_coverage(text);
  const auto best = std::max_element(coverage.begin(), coverage.end());
  if (*best <= 0.0) return Lang::kUnknown;
  return kKnownLangs[static_cast<std::size_t>(best - coverage.begin())];
}

bool langid_ok(std::string_view text, Lang expected, const PreprocessConfig& cfg) {
  if (whitespace_token_count(text) < cfg.min_tokens_for_langid) return true;
  const auto coverage = stopword_coverage(text);
  const double best = *std::max_element(coverage.begin(), coverage.end());
  if (best <= 0.0) return true;
  return coverage[index_of(expected)] >= best;
}

StreamingPreprocessor::StreamingPreprocessor(PreprocessConfig cfg) : cfg_(cfg) { cfg_.validate(); }

std::optional<ParallelSegment> StreamingPreprocessor::accept(ParallelSegment seg) {
  ++stats_.input;
  if (!dedup_.insert(seg.src, seg.tgt)) {
    ++stats_.duplicates;
    return std::nullopt;
  }
  if (whitespace_token_count(seg.src) == 0 || whitespace_token_count(seg.tgt) == 0) {
    ++stats_.empty;
    return std::nullopt;
  }
  if (cfg_.use_ratio && !length_ratio_ok(seg, cfg_)) {
    ++stats_.ratio_dropped;
    return std::nullopt;
  }
  if (cfg_.use_langid && (!langid_ok(seg.src, cfg_.expected_src_lang, cfg_) ||
                          !langid_ok(seg.tgt, cfg_.expected_tgt_lang, cfg_))) {
    ++stats_.langid_dropped;
    return std::nullopt;
  }
  seg.index = stats_.kept++;
  return seg;
}

std::vector<ParallelSegment> preprocess(std::vector<ParallelSegment> corpus, const PreprocessConfig& cfg,
                                        PreprocessStats* stats) {
  StreamingPreprocessor pre(cfg);
  std::vector<ParallelSegment> out;
  for (auto& seg : corpus) {
    if (auto kept = pre.accept(std::move(seg))) out.push_back(std::move(*kept));
  }
  if (stats) *stats = pre.stats();
  return out;
}

}  // namespace ambig
