#include "ambig/eval_sampling.h"

#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>

#include "ambig/error.h"
#include "ambig/text.h"

namespace ambig {

namespace {

constexpr std::string_view kHeader = "idx\tsrc\ttgt\tsurface\tmark";

std::string escape_field(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (const char c : s) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\t': out += "\\t"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      default: out += c;
    }
  }
  return out;
}

std::string unescape_field(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '\\' || i + 1 == s.size()) {
      out += s[i];
      continue;
    }
    switch (s[++i]) {
      case 't': out += '\t'; break;
      case 'n': out += '\n'; break;
      case 'r': out += '\r'; break;
      case '\\': out += '\\'; break;
      default:
        out += '\\';
        out += s[i];
    }
  }
  return out;
}

std::optional<bool> parse_mark(std::string_view s, const std::string& source, std::size_t line_no) {
  s = trim_whitespace(s);
  if (s.empty()) return std::nullopt;
  std::string lower;
  for (const char c : s) lower += static_cast<char>(c >= 'A' && c <= 'Z' ? c + 0x20 : c);
  if (lower == "y" || lower == "yes" || lower == "1" || lower == "true") return true;
  if (lower == "n" || lower == "no" || lower == "0" || lower == "false") return false;
  throw ParseError(source, line_no, "unrecognised mark '" + std::string(s) + "' (use Y or N)");
}

template <typename T>
T parse_number(std::string_view s, const std::string& source, std::size_t line_no, const char* what) {
  T value{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw ParseError(source, line_no, std::string("bad ") + what + " '" + std::string(s) + "'");
  }
  return value;
}

}  // namespace

std::uint64_t uniform_below(SplitMix64& rng, std::uint64_t bound) {
  if (bound == 0) throw Error("uniform_below: bound must be positive");
  // Values below `threshold` would bias the modulo; 2^64 mod bound of them.
  const std::uint64_t threshold = (0 - bound) % bound;
  while (true) {
    const std::uint64_t r = rng();
    if (r >= threshold) return r % bound;
  }
}

std::string_view question_name(Question q) {
  return q == Question::kIsPersonName ? "is-person-name" : "is-coreferent";
}

Question parse_question(std::string_view name) {
  if (name == "is-person-name" || name == "name") return Question::kIsPersonName;
  if (name == "is-coreferent" || name == "coref") return Question::kIsCoreferent;
  throw Error("unknown question '" + std::string(name) + "'");
}

std::vector<std::size_t> sample_indices(std::span<const std::size_t> population, std::size_t n,
                                        std::uint64_t seed) {
  if (n > population.size()) {
    throw Error("sample size " + std::to_string(n) + " exceeds population of " + std::to_string(population.size()));
  }
  std::vector<std::size_t> pool(population.begin(), population.end());
  SplitMix64 rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    const auto j = i + static_cast<std::size_t>(uniform_below(rng, pool.size() - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(n);
  return pool;
}

AnnotationSheet sample(std::span<const std::size_t> population, std::size_t n, std::uint64_t seed,
                       Question question, std::string sample_id) {
  AnnotationSheet sheet;
  sheet.seed = seed;
  sheet.question = question;
  sheet.sample_id = std::move(sample_id);
  for (const auto idx : sample_indices(population, n, seed)) {
    SheetItem item;
    item.segment_index = idx;
    sheet.items.push_back(std::move(item));
  }
  return sheet;
}

void write_sheet_tsv(std::ostream& out, const AnnotationSheet& sheet) {
  out << "# sample_id: " << escape_field(sheet.sample_id) << '\n';
  out << "# seed: " << sheet.seed << '\n';
  out << "# question: " << question_name(sheet.question) << '\n';
  out << kHeader << '\n';
  for (const auto& item : sheet.items) {
    out << item.segment_index << '\t' << escape_field(item.src) << '\t' << escape_field(item.tgt) << '\t'
        << escape_field(item.surface) << '\t';
    if (item.mark) out << (*item.mark ? 'Y' : 'N');
    out << '\n';
  }
}

AnnotationSheet read_sheet_tsv(std::istream& in, const std::string& source_name) {
  AnnotationSheet sheet;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!header_seen) {
      if (line.starts_with("#")) {
        const std::string_view meta = trim_whitespace(std::string_view(line).substr(1));
        const auto colon = meta.find(':');
        if (colon == std::string_view::npos) continue;
        const auto key = trim_whitespace(meta.substr(0, colon));
        const auto value = trim_whitespace(meta.substr(colon + 1));
        if (key == "sample_id") sheet.sample_id = unescape_field(value);
        if (key == "seed") sheet.seed = parse_number<std::uint64_t>(value, source_name, line_no, "seed");
        if (key == "question") sheet.question = parse_question(value);
        continue;
      }
      if (line != kHeader) throw ParseError(source_name, line_no, "expected header '" + std::string(kHeader) + "'");
      header_seen = true;
      continue;
    }
    if (line.empty()) continue;
    const auto cols = split(line, '\t');
    if (cols.size() != 5) {
      throw ParseError(source_name, line_no, "expected 5 columns, got " + std::to_string(cols.size()));
    }
    SheetItem item;
    item.segment_index = parse_number<std::size_t>(cols[0], source_name, line_no, "idx");
    item.src = unescape_field(cols[1]);
    item.tgt = unescape_field(cols[2]);
    item.surface = unescape_field(cols[3]);
    item.mark = parse_mark(cols[4], source_name, line_no);
    sheet.items.push_back(std::move(item));
  }
  if (!header_seen) throw ParseError(source_name + ": missing header line");
  return sheet;
}

double estimate_rate(const AnnotationSheet& sheet) {
  if (sheet.items.empty()) throw Error("estimate_rate: sheet has no items");
  std::size_t positives = 0;
  for (const auto& item : sheet.items) {
    if (!item.mark) throw Error("estimate_rate: item " + std::to_string(item.segment_index) + " is unmarked");
    positives += *item.mark;
  }
  return static_cast<double>(positives) / static_cast<double>(sheet.items.size());
}

AgreementStats cohens_kappa(const std::vector<bool>& a, const std::vector<bool>& b) {
  if (a.size() != b.size()) {
    throw Error("cohens_kappa: length mismatch (" + std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
  }
  if (a.empty()) throw Error("cohens_kappa: empty mark sequences");
  const double n = static_cast<double>(a.size());
  std::size_t agree = 0;
  std::size_t a_true = 0;
  std::size_t b_true = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    agree += a[i] == b[i];
    a_true += a[i];
    b_true += b[i];
  }
  AgreementStats s;
  s.n = a.size();
  s.p_o = static_cast<double>(agree) / n;
  const double pa = static_cast<double>(a_true) / n;
  const double pb = static_cast<double>(b_true) / n;
  s.p_e = pa * pb + (1.0 - pa) * (1.0 - pb);
  if (s.p_e >= 1.0) throw Error("cohens_kappa: undefined, both annotators gave one identical constant mark");
  s.kappa = (s.p_o - s.p_e) / (1.0 - s.p_e);
  return s;
}

AgreementStats sheet_agreement(const AnnotationSheet& a, const AnnotationSheet& b) {
  if (a.items.size() != b.items.size()) throw Error("agree: sheets have different item counts");
  std::vector<bool> ma;
  std::vector<bool> mb;
  for (std::size_t i = 0; i < a.items.size(); ++i) {
    if (a.items[i].segment_index != b.items[i].segment_index) {
      throw Error("agree: sheets differ at row " + std::to_string(i + 1) + " (idx " +
                  std::to_string(a.items[i].segment_index) + " vs " + std::to_string(b.items[i].segment_index) + ")");
    }
    if (!a.items[i].mark || !b.items[i].mark) {
      throw Error("agree: row " + std::to_string(i + 1) + " is unmarked");
    }
    ma.push_back(*a.items[i].mark);
    mb.push_back(*b.items[i].mark);
  }
  return cohens_kappa(ma, mb);
}

nlohmann::ordered_json agreement_to_json(const AgreementStats& s) {
  nlohmann::ordered_json j;
  j["n"] = s.n;
  j["p_o"] = s.p_o;
  j["p_e"] = s.p_e;
  j["kappa"] = s.kappa;
  return j;
}

}  // namespace ambig
