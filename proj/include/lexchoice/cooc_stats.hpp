#pragma once

// Windowed pair counting and the collocation statistics built on it.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "lexchoice/corpus.hpp"
#include "lexchoice/error.hpp"

namespace lexchoice {

struct WindowConfig {
  /// Positions on each side of a token that count as co-occurring.
  int half_width = 4;
  bool cross_sentences = false;

  void validate() const {
    if (half_width < 1) throw InvalidInput("window half-width k must be >= 1");
  }
};

struct PairStats {
  std::uint64_t f_xy = 0;
  std::uint64_t f_x = 0;
  std::uint64_t f_y = 0;
  std::uint64_t total_tokens = 0;
  int half_width = 1;

  /// Joint count expected by chance: f_x * f_y * 2k / N.
  double expected() const {
    if (total_tokens == 0) return 0.0;
    return static_cast<double>(f_x) * static_cast<double>(f_y) * (2.0 * half_width) /
           static_cast<double>(total_tokens);
  }
};

struct SignificanceThresholds {
  double t_min = 2.0;
  /// Bits.
  double mi_min = 2.0;

  void validate() const {
    if (!(t_min > 0.0)) throw InvalidInput("t_min must be > 0 so that edge weights stay positive");
  }
};

inline double t_score(const PairStats& p) {
  if (p.f_xy == 0) throw UndefinedStatistic("t-score is undefined for a pair that never co-occurs");
  const double f = static_cast<double>(p.f_xy);
  return (f - p.expected()) / std::sqrt(f);
}

inline double mutual_information(const PairStats& p) {
  if (p.f_xy == 0) throw UndefinedStatistic("mutual information is undefined for a pair that never co-occurs");
  const double e = p.expected();
  if (e <= 0.0) return std::numeric_limits<double>::infinity();
  return std::log2(static_cast<double>(p.f_xy) / e);
}

/// Edge-inclusion test: both measures must clear their threshold.
inline bool is_significant(const PairStats& p, const SignificanceThresholds& th) {
  if (p.f_xy == 0) return false;
  return t_score(p) >= th.t_min && mutual_information(p) >= th.mi_min;
}

/// Symmetric table of windowed co-occurrence counts over a fixed vocabulary.
///
/// Word ids follow lexicographic order of the words, so an id-ordered pair is
/// also a lexicographically ordered pair. Marginals are raw vocabulary
/// frequencies (stop occurrences included).
class PairCounts {
 public:
  using WordId = std::uint32_t;

  struct Neighbor {
    WordId id;
    std::uint64_t count;
  };

  struct Entry {
    WordId first;
    WordId second;
    std::uint64_t count;
  };

  PairCounts() = default;

  PairCounts(const Vocabulary& vocab, WindowConfig window)
      : total_tokens_(vocab.total_tokens), stop_threshold_(vocab.stop_threshold), window_(window) {
    window_.validate();
    words_ = vocab.sorted_words();
    freq_.reserve(words_.size());
    ids_.reserve(words_.size());
    for (std::size_t i = 0; i < words_.size(); ++i) {
      ids_.emplace(words_[i], static_cast<WordId>(i));
      freq_.push_back(vocab.freq.at(words_[i]));
    }
  }

  std::uint64_t total_tokens() const noexcept { return total_tokens_; }
  std::uint64_t stop_threshold() const noexcept { return stop_threshold_; }
  const WindowConfig& window() const noexcept { return window_; }
  std::size_t vocabulary_size() const noexcept { return words_.size(); }
  std::size_t pair_count() const noexcept { return counts_.size(); }

  std::optional<WordId> id(const std::string& word) const {
    const auto it = ids_.find(word);
    if (it == ids_.end()) return std::nullopt;
    return it->second;
  }
  const std::string& word(WordId id) const { return words_.at(id); }
  std::uint64_t frequency(WordId id) const { return freq_.at(id); }
  bool is_frequency_stop(WordId id) const { return freq_.at(id) > stop_threshold_; }

  void add(WordId a, WordId b, std::uint64_t n = 1) {
    if (a == b) return;
    counts_[key(a, b)] += n;
    indexed_ = false;
  }

  /// Commutative merge of a partial table over the same vocabulary.
  void merge(const PairCounts& other) {
    if (other.words_ != words_) throw InvalidInput("cannot merge pair tables over different vocabularies");
    for (const auto& [k, n] : other.counts_) counts_[k] += n;
    indexed_ = false;
  }

  std::uint64_t count(WordId a, WordId b) const {
    if (a == b) return 0;
    const auto it = counts_.find(key(a, b));
    return it == counts_.end() ? 0 : it->second;
  }

  std::uint64_t count(const std::string& a, const std::string& b) const {
    const auto ia = id(a);
    const auto ib = id(b);
    if (!ia || !ib) return 0;
    return count(*ia, *ib);
  }

  PairStats stats(WordId a, WordId b) const {
    return PairStats{count(a, b), freq_.at(a), freq_.at(b), total_tokens_, window_.half_width};
  }

  PairStats stats(const std::string& a, const std::string& b) const {
    const auto ia = id(a);
    const auto ib = id(b);
    if (!ia || !ib) {
      return PairStats{0, ia ? freq_[*ia] : 0, ib ? freq_[*ib] : 0, total_tokens_, window_.half_width};
    }
    return stats(*ia, *ib);
  }

  /// Builds the adjacency index used by `neighbors`. Must be called again
  /// after any `add` or `merge`.
  void build_index() {
    adjacency_.assign(words_.size(), {});
    for (const auto& [k, n] : counts_) {
      const auto a = static_cast<WordId>(k >> 32);
      const auto b = static_cast<WordId>(k & 0xffffffffu);
      adjacency_[a].push_back({b, n});
      adjacency_[b].push_back({a, n});
    }
    for (auto& list : adjacency_) {
      std::sort(list.begin(), list.end(), [](const Neighbor& x, const Neighbor& y) { return x.id < y.id; });
    }
    indexed_ = true;
  }

  /// Words co-occurring with `id` at least once, in id order.
  const std::vector<Neighbor>& neighbors(WordId id) const {
    if (!indexed_) throw std::logic_error("PairCounts::neighbors called before build_index");
    return adjacency_.at(id);
  }

  /// All pairs with first < second, in lexicographic order.
  std::vector<Entry> sorted_entries() const {
    std::vector<Entry> out;
    out.reserve(counts_.size());
    for (const auto& [k, n] : counts_) {
      out.push_back({static_cast<WordId>(k >> 32), static_cast<WordId>(k & 0xffffffffu), n});
    }
    std::sort(out.begin(), out.end(), [](const Entry& x, const Entry& y) {
      return std::tie(x.first, x.second) < std::tie(y.first, y.second);
    });
    return out;
  }

 private:
  static std::uint64_t key(WordId a, WordId b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | b;
  }

  std::uint64_t total_tokens_ = 0;
  std::uint64_t stop_threshold_ = 0;
  WindowConfig window_;
  std::vector<std::string> words_;
  std::vector<std::uint64_t> freq_;
  std::unordered_map<std::string, WordId> ids_;
  std::unordered_map<std::uint64_t, std::uint64_t> counts_;
  std::vector<std::vector<Neighbor>> adjacency_;
  bool indexed_ = false;
};

namespace detail {

inline constexpr PairCounts::WordId kNoWord = std::numeric_limits<PairCounts::WordId>::max();

/// Counts pairs whose left position lies in [begin, end). Right positions
/// may run past `end`, so shards never miss a window that straddles them.
inline void count_range(const std::vector<PairCounts::WordId>& ids, const TokenStream& ts, std::size_t begin,
                        std::size_t end, const WindowConfig& w, PairCounts& out) {
  const std::size_t n = ids.size();
  const auto k = static_cast<std::size_t>(w.half_width);
  for (std::size_t i = begin; i < end; ++i) {
    const auto a = ids[i];
    if (a == kNoWord) continue;
    const auto limit = std::min(n, i + k + 1);
    for (std::size_t j = i + 1; j < limit; ++j) {
      if (!w.cross_sentences && ts.tokens[j].sentence_id != ts.tokens[i].sentence_id) break;
      const auto b = ids[j];
      if (b == kNoWord || b == a) continue;
      out.add(a, b);
    }
  }
}

}  // namespace detail

/// Counts every unordered pair of non-stop tokens at most k positions apart.
/// Stop tokens keep their positions but never form pairs. `threads` > 1
/// shards the stream and merges the partial tables.
inline PairCounts count_pairs(const TokenStream& ts, const Vocabulary& vocab, const WindowConfig& w,
                              unsigned threads = 1) {
  PairCounts counts(vocab, w);
  std::vector<PairCounts::WordId> ids(ts.tokens.size(), detail::kNoWord);
  for (std::size_t i = 0; i < ts.tokens.size(); ++i) {
    const Token& t = ts.tokens[i];
    if (t.is_stop) continue;
    const auto id = counts.id(t.surface);
    if (!id) throw InvalidInput("token '" + t.surface + "' is missing from the vocabulary");
    if (counts.is_frequency_stop(*id)) continue;
    ids[i] = *id;
  }

  const std::size_t n = ids.size();
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n / 4096 + 1)));
  if (threads == 1) {
    detail::count_range(ids, ts, 0, n, w, counts);
  } else {
    std::vector<PairCounts> partial(threads, PairCounts(vocab, w));
    std::vector<std::thread> workers;
    const std::size_t chunk = (n + threads - 1) / threads;
    for (unsigned s = 0; s < threads; ++s) {
      const std::size_t b = std::min(n, s * chunk);
      const std::size_t e = std::min(n, b + chunk);
      workers.emplace_back([&, s, b, e] { detail::count_range(ids, ts, b, e, w, partial[s]); });
    }
    for (auto& t : workers) t.join();
    for (const auto& p : partial) counts.merge(p);
  }
  counts.build_index();
  return counts;
}

/// Text form: headers "N=", "K=", "CROSS=", then "w1<TAB>w2<TAB>f_xy" with w1 < w2.
inline std::string write_pair_counts(const PairCounts& counts) {
  std::ostringstream out;
  out << "N=" << counts.total_tokens() << '\n'
      << "K=" << counts.window().half_width << '\n'
      << "CROSS=" << (counts.window().cross_sentences ? 1 : 0) << '\n';
  for (const auto& e : counts.sorted_entries()) {
    out << counts.word(e.first) << '\t' << counts.word(e.second) << '\t' << e.count << '\n';
  }
  return out.str();
}

/// Reads a pair table; marginals come from `vocab`, which must be the
/// vocabulary the table was counted against.
inline PairCounts read_pair_counts(std::string_view text, const Vocabulary& vocab) {
  const auto lines = detail::split_lines(text);
  if (lines.size() < 3) throw FormatError(lines.size() + 1, 1, "pair-count file lacks N=, K=, CROSS= headers");
  const auto n = detail::parse_header_value(lines[0], "N", 1);
  if (n != vocab.total_tokens) {
    throw FormatError(1, 1, "pair counts were made from N=" + std::to_string(n) + " tokens but vocabulary has N=" +
                                std::to_string(vocab.total_tokens));
  }
  WindowConfig w;
  w.half_width = static_cast<int>(detail::parse_header_value(lines[1], "K", 2));
  w.cross_sentences = detail::parse_header_value(lines[2], "CROSS", 3) != 0;
  if (w.half_width < 1) throw FormatError(2, 3, "K must be >= 1");
  PairCounts counts(vocab, w);
  for (std::size_t i = 3; i < lines.size(); ++i) {
    const auto line = lines[i];
    if (line.empty()) continue;
    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string_view::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string_view::npos) throw FormatError(i + 1, 1, "expected w1<TAB>w2<TAB>count");
    const std::string a(line.substr(0, t1));
    const std::string b(line.substr(t1 + 1, t2 - t1 - 1));
    const auto ia = counts.id(a);
    const auto ib = counts.id(b);
    if (!ia) throw FormatError(i + 1, 1, "word '" + a + "' not in vocabulary");
    if (!ib) throw FormatError(i + 1, t1 + 2, "word '" + b + "' not in vocabulary");
    if (a >= b) throw FormatError(i + 1, 1, "pair must be ordered w1 < w2");
    counts.add(*ia, *ib, detail::parse_count(line.substr(t2 + 1), i + 1, t2 + 2));
  }
  counts.build_index();
  return counts;
}

}  // namespace lexchoice
