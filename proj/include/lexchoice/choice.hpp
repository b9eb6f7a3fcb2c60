#pragma once

// Scoring near-synonym candidates for a gap: M(c, S) is the sum over the
// sentence's evidence words of sig(c, w) in c's own network.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lexchoice/corpus.hpp"
#include "lexchoice/error.hpp"
#include "lexchoice/network.hpp"

namespace lexchoice {

/// Placeholder accepted for the gap when parsing a sentence.
inline constexpr std::string_view kGapMarker = "___";

struct GapSentence {
  std::vector<Token> tokens;
  std::size_t gap_index = 0;

  void validate() const {
    if (gap_index >= tokens.size()) throw InvalidInput("gap index out of range");
  }
};

/// Parses a tagged sentence in slash format where exactly one token is the
/// bare gap marker "___".
inline GapSentence parse_gap_sentence(std::string_view text, const CorpusConfig& cfg = {}) {
  GapSentence s;
  std::optional<std::size_t> gap;
  const auto fields = detail::split_ws(text);
  std::size_t column = 1;
  for (const auto f : fields) {
    column = static_cast<std::size_t>(f.data() - text.data()) + 1;
    if (f == kGapMarker) {
      if (gap) throw FormatError(1, column, "sentence has more than one gap");
      gap = s.tokens.size();
      s.tokens.push_back({std::string(kGapMarker), "GAP", true, 0});
    } else {
      s.tokens.push_back(detail::parse_slash_token(f, 1, column, cfg));
    }
  }
  if (!gap) throw FormatError(1, 1, "sentence has no gap marker '" + std::string(kGapMarker) + "'");
  s.gap_index = *gap;
  return s;
}

struct Candidate {
  std::string word;
  const CoocNetwork* network = nullptr;
  /// Training-corpus frequency, used for tie-breaking and the baseline.
  std::uint64_t frequency = 0;
};

struct CandidateSet {
  std::string id;
  /// Coarse POS category shared by the members (e.g. "NN"); empty = any.
  std::string pos;
  std::vector<Candidate> members;

  void validate() const {
    if (members.empty()) throw InvalidInput("candidate set '" + id + "' is empty");
    for (const auto& m : members) {
      if (m.network != nullptr && m.network->root() != m.word) {
        throw InvalidInput("candidate '" + m.word + "' is paired with the network of '" + m.network->root() + "'");
      }
    }
  }
};

struct Evidence {
  std::string word;
  /// sig(c, word) for a single occurrence.
  double sig = 0.0;
  int order = 0;
  std::size_t occurrences = 0;

  double contribution() const { return sig * static_cast<double>(occurrences); }
};

struct ChoiceScore {
  std::string candidate;
  /// M(c, S).
  double total = 0.0;
  std::uint64_t frequency = 0;
  /// Evidence words with non-zero sig, strongest contribution first.
  std::vector<Evidence> per_word;
};

struct ScoreOptions {
  /// When set, only tokens within this many positions of the gap count.
  std::optional<std::size_t> evidence_window;
};

/// Sums sig over every non-stop token occurrence except the gap; a repeated
/// word contributes once per occurrence.
inline ChoiceScore score_candidate(const CoocNetwork& net, const GapSentence& s, const ScoreOptions& opts = {}) {
  s.validate();
  ChoiceScore score;
  score.candidate = net.root();
  score.frequency = net.metadata().root_frequency;
  std::map<std::string, Evidence> by_word;
  for (std::size_t i = 0; i < s.tokens.size(); ++i) {
    if (i == s.gap_index) continue;
    if (opts.evidence_window) {
      const std::size_t dist = i > s.gap_index ? i - s.gap_index : s.gap_index - i;
      if (dist > *opts.evidence_window) continue;
    }
    const Token& t = s.tokens[i];
    if (t.is_stop) continue;
    const SigScore sig = net.significance(t.surface);
    score.total += sig.value;
    if (sig.value > 0.0) {
      auto& ev = by_word[t.surface];
      ev.word = t.surface;
      ev.sig = sig.value;
      ev.order = sig.order;
      ++ev.occurrences;
    }
  }
  for (auto& [w, ev] : by_word) score.per_word.push_back(std::move(ev));
  std::stable_sort(score.per_word.begin(), score.per_word.end(),
                   [](const Evidence& a, const Evidence& b) { return a.contribution() > b.contribution(); });
  return score;
}

/// Ranks candidates by M descending; ties go to the more frequent candidate,
/// then to the lexicographically smaller word.
inline std::vector<ChoiceScore> choose(const CandidateSet& cands, const GapSentence& s, const ScoreOptions& opts = {}) {
  cands.validate();
  std::vector<ChoiceScore> ranked;
  ranked.reserve(cands.members.size());
  for (const auto& c : cands.members) {
    ChoiceScore score;
    if (c.network != nullptr) {
      score = score_candidate(*c.network, s, opts);
    } else {
      score.candidate = c.word;
    }
    score.frequency = c.frequency;
    ranked.push_back(std::move(score));
  }
  std::sort(ranked.begin(), ranked.end(), [](const ChoiceScore& a, const ChoiceScore& b) {
    if (a.total != b.total) return a.total > b.total;
    if (a.frequency != b.frequency) return a.frequency > b.frequency;
    return a.candidate < b.candidate;
  });
  return ranked;
}

/// True when no candidate found any evidence, so the winner was decided by
/// training frequency alone.
inline bool is_baseline_fallback(const std::vector<ChoiceScore>& ranked) {
  return std::all_of(ranked.begin(), ranked.end(), [](const ChoiceScore& s) { return s.total == 0.0; });
}

}  // namespace lexchoice
