#pragma once

// Tagged-corpus ingestion, stop-word policy and vocabulary counting.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <istream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lexchoice/error.hpp"

namespace lexchoice {

enum class TagFormat {
  /// One sentence per line, tokens "surface/TAG" separated by whitespace.
  kSlash,
  /// One token per line "surface<TAB>tag", blank line ends a sentence.
  kTsv,
};

inline TagFormat parse_tag_format(std::string_view name) {
  if (name == "slash") return TagFormat::kSlash;
  if (name == "tsv") return TagFormat::kTsv;
  throw InvalidInput("unknown tag format '" + std::string(name) + "' (expected slash or tsv)");
}

/// Penn Treebank tags for numbers, symbols/punctuation and proper nouns.
inline std::set<std::string> default_stop_pos_tags() {
  return {"CD",  "SYM", "NNP", "NNPS", "$",     "#",     ",",     ".",    ":",    "``",   "''",
          "(",   ")",   "-LRB-", "-RRB-", "-LCB-", "-RCB-", "-LSB-", "-RSB-", "-NONE-", "LS"};
}

struct CorpusConfig {
  TagFormat format = TagFormat::kSlash;
  /// Words with raw corpus frequency strictly greater than this are stop words.
  std::uint64_t stop_threshold = 800;
  std::set<std::string> stop_pos_tags = default_stop_pos_tags();

  void validate() const {
    if (stop_threshold == 0) throw InvalidInput("stop threshold F must be > 0");
  }
};

struct Token {
  std::string surface;
  std::string pos;
  bool is_stop = false;
  std::size_t sentence_id = 0;

  friend bool operator==(const Token&, const Token&) = default;
};

/// Tokens in corpus order. Sentence ids are consecutive from zero, so each
/// sentence occupies a contiguous run of the vector.
struct TokenStream {
  std::vector<Token> tokens;
  std::size_t sentence_count = 0;

  bool empty() const noexcept { return tokens.empty(); }
  std::size_t size() const noexcept { return tokens.size(); }

  /// Appends `other`, renumbering its sentences after ours.
  void append(const TokenStream& other) {
    tokens.reserve(tokens.size() + other.tokens.size());
    for (Token t : other.tokens) {
      t.sentence_id += sentence_count;
      tokens.push_back(std::move(t));
    }
    sentence_count += other.sentence_count;
  }

  friend bool operator==(const TokenStream&, const TokenStream&) = default;
};

inline std::string to_lower_ascii(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

inline bool is_pos_stop(std::string_view pos, const CorpusConfig& cfg) {
  return cfg.stop_pos_tags.count(std::string(pos)) > 0;
}

namespace detail {

inline bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v'; }

/// Splits "surface/TAG" at the last slash.
inline Token parse_slash_token(std::string_view raw, std::size_t line, std::size_t column,
                               const CorpusConfig& cfg) {
  const auto slash = raw.rfind('/');
  if (slash == std::string_view::npos) {
    throw FormatError(line, column, "token '" + std::string(raw) + "' has no '/' tag separator");
  }
  if (slash == 0) throw FormatError(line, column, "token '" + std::string(raw) + "' has an empty surface");
  if (slash + 1 == raw.size()) {
    throw FormatError(line, column, "token '" + std::string(raw) + "' has an empty tag");
  }
  Token tok;
  tok.surface = to_lower_ascii(raw.substr(0, slash));
  tok.pos = std::string(raw.substr(slash + 1));
  tok.is_stop = is_pos_stop(tok.pos, cfg);
  return tok;
}

inline void ingest_slash(std::string_view raw, const CorpusConfig& cfg, TokenStream& ts) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= raw.size()) {
    auto eol = raw.find('\n', pos);
    if (eol == std::string_view::npos) eol = raw.size();
    const std::string_view line = raw.substr(pos, eol - pos);
    ++line_no;
    bool any = false;
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && is_space(line[i])) ++i;
      if (i >= line.size()) break;
      std::size_t j = i;
      while (j < line.size() && !is_space(line[j])) ++j;
      Token tok = parse_slash_token(line.substr(i, j - i), line_no, i + 1, cfg);
      tok.sentence_id = ts.sentence_count;
      ts.tokens.push_back(std::move(tok));
      any = true;
      i = j;
    }
    if (any) ++ts.sentence_count;
    if (eol == raw.size()) break;
    pos = eol + 1;
  }
}

inline void ingest_tsv(std::string_view raw, const CorpusConfig& cfg, TokenStream& ts) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool open = false;
  while (pos <= raw.size()) {
    auto eol = raw.find('\n', pos);
    if (eol == std::string_view::npos) eol = raw.size();
    std::string_view line = raw.substr(pos, eol - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    ++line_no;
    if (line.find_first_not_of(" \t") == std::string_view::npos) {
      if (open) ++ts.sentence_count;
      open = false;
    } else {
      const auto tab = line.find('\t');
      if (tab == std::string_view::npos) {
        throw FormatError(line_no, 1, "line has no TAB between surface and tag");
      }
      if (tab == 0) throw FormatError(line_no, 1, "empty surface");
      const auto tag = line.substr(tab + 1);
      if (tag.empty() || tag.find('\t') != std::string_view::npos) {
        throw FormatError(line_no, tab + 2, "expected exactly one non-empty tag");
      }
      Token tok;
      tok.surface = to_lower_ascii(line.substr(0, tab));
      tok.pos = std::string(tag);
      tok.is_stop = is_pos_stop(tok.pos, cfg);
      tok.sentence_id = ts.sentence_count;
      ts.tokens.push_back(std::move(tok));
      open = true;
    }
    if (eol == raw.size()) break;
    pos = eol + 1;
  }
  if (open) ++ts.sentence_count;
}

}  // namespace detail

/// Parses tagged text into a token stream. Stop flags at this stage reflect
/// the POS policy only; `build_vocabulary` adds the frequency policy.
inline TokenStream ingest(std::string_view raw, const CorpusConfig& cfg) {
  cfg.validate();
  TokenStream ts;
  if (cfg.format == TagFormat::kSlash) {
    detail::ingest_slash(raw, cfg, ts);
  } else {
    detail::ingest_tsv(raw, cfg, ts);
  }
  return ts;
}

/// Writes a stream back out in the given tag format; ingesting the result
/// reproduces the stream.
inline std::string serialize(const TokenStream& ts, TagFormat format) {
  std::string out;
  for (std::size_t i = 0; i < ts.tokens.size(); ++i) {
    const Token& t = ts.tokens[i];
    const bool last_in_sentence = i + 1 == ts.tokens.size() || ts.tokens[i + 1].sentence_id != t.sentence_id;
    if (format == TagFormat::kSlash) {
      out += t.surface;
      out += '/';
      out += t.pos;
      out += last_in_sentence ? '\n' : ' ';
    } else {
      out += t.surface;
      out += '\t';
      out += t.pos;
      out += '\n';
      if (last_in_sentence) out += '\n';
    }
  }
  return out;
}

struct Vocabulary {
  std::unordered_map<std::string, std::uint64_t> freq;
  std::uint64_t total_tokens = 0;
  std::uint64_t stop_threshold = 800;

  std::uint64_t count(const std::string& word) const {
    const auto it = freq.find(word);
    return it == freq.end() ? 0 : it->second;
  }
  bool contains(const std::string& word) const { return freq.count(word) > 0; }
  bool is_frequency_stop(const std::string& word) const { return count(word) > stop_threshold; }

  /// Words in lexicographic order.
  std::vector<std::string> sorted_words() const {
    std::vector<std::string> words;
    words.reserve(freq.size());
    for (const auto& [w, n] : freq) words.push_back(w);
    std::sort(words.begin(), words.end());
    return words;
  }

  /// Adds another partial count; order of merging does not matter.
  void merge(const Vocabulary& other) {
    for (const auto& [w, n] : other.freq) freq[w] += n;
    total_tokens += other.total_tokens;
  }
};

/// Recomputes stop flags from both the POS policy and `vocab` frequencies.
inline void apply_stop_policy(TokenStream& ts, const Vocabulary& vocab, const CorpusConfig& cfg) {
  for (Token& t : ts.tokens) {
    t.is_stop = is_pos_stop(t.pos, cfg) || vocab.is_frequency_stop(t.surface);
  }
}

/// Counts every token occurrence (stop words included) and refreshes the
/// stream's stop flags against the resulting frequencies.
inline Vocabulary build_vocabulary(TokenStream& ts, const CorpusConfig& cfg) {
  cfg.validate();
  Vocabulary vocab;
  vocab.stop_threshold = cfg.stop_threshold;
  for (const Token& t : ts.tokens) ++vocab.freq[t.surface];
  vocab.total_tokens = ts.tokens.size();
  apply_stop_policy(ts, vocab, cfg);
  return vocab;
}

/// Text form: "N=<total>", "F=<threshold>", then "word<TAB>count" sorted by word.
inline std::string write_vocabulary(const Vocabulary& vocab) {
  std::ostringstream out;
  out << "N=" << vocab.total_tokens << '\n' << "F=" << vocab.stop_threshold << '\n';
  for (const auto& w : vocab.sorted_words()) out << w << '\t' << vocab.freq.at(w) << '\n';
  return out.str();
}

namespace detail {

inline std::uint64_t parse_count(std::string_view s, std::size_t line, std::size_t column) {
  if (s.empty()) throw FormatError(line, column, "expected a count");
  std::uint64_t v = 0;
  for (char c : s) {
    if (c < '0' || c > '9') throw FormatError(line, column, "invalid count '" + std::string(s) + "'");
    v = v * 10 + static_cast<std::uint64_t>(c - '0');
  }
  return v;
}

inline std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    auto line = text.substr(pos, eol - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    pos = eol + 1;
  }
  return lines;
}

/// Parses "KEY=value" header lines.
inline std::uint64_t parse_header_value(std::string_view line, std::string_view key, std::size_t line_no) {
  const std::string prefix = std::string(key) + "=";
  if (line.substr(0, prefix.size()) != prefix) {
    throw FormatError(line_no, 1, "expected header '" + prefix + "<value>'");
  }
  return parse_count(line.substr(prefix.size()), line_no, prefix.size() + 1);
}

}  // namespace detail

inline Vocabulary read_vocabulary(std::string_view text) {
  const auto lines = detail::split_lines(text);
  if (lines.size() < 2) throw FormatError(lines.size() + 1, 1, "vocabulary file lacks N= and F= headers");
  Vocabulary vocab;
  vocab.total_tokens = detail::parse_header_value(lines[0], "N", 1);
  vocab.stop_threshold = detail::parse_header_value(lines[1], "F", 2);
  std::uint64_t sum = 0;
  for (std::size_t i = 2; i < lines.size(); ++i) {
    const auto line = lines[i];
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos || tab == 0) throw FormatError(i + 1, 1, "expected word<TAB>count");
    const auto n = detail::parse_count(line.substr(tab + 1), i + 1, tab + 2);
    vocab.freq[std::string(line.substr(0, tab))] += n;
    sum += n;
  }
  if (sum != vocab.total_tokens) {
    throw FormatError(1, 1, "counts sum to " + std::to_string(sum) + " but header says N=" +
                                std::to_string(vocab.total_tokens));
  }
  return vocab;
}

}  // namespace lexchoice
