#pragma once

// Gap-fill evaluation: instance extraction, most-frequent baseline, Pearson's
// chi-square against the baseline, and the window x order sweep.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "lexchoice/choice.hpp"
#include "lexchoice/cooc_stats.hpp"
#include "lexchoice/corpus.hpp"
#include "lexchoice/error.hpp"
#include "lexchoice/network.hpp"

namespace lexchoice {

/// Coarse POS category: proper nouns stay "NNP", everything else keeps its
/// first two characters, so VBD/VBZ/VBG all map to "VB" and NNS to "NN".
inline std::string coarse_pos(std::string_view tag) {
  if (tag.substr(0, 3) == "NNP") return "NNP";
  return std::string(tag.substr(0, 2));
}

struct GapInstance {
  std::size_t id = 0;
  GapSentence sentence;
  std::string gold;
  std::string set_id;
};

/// One instance per occurrence of a member word with a matching coarse POS.
/// Other member occurrences in the same sentence stay visible as evidence.
inline std::vector<GapInstance> make_gap_instances(const TokenStream& held_out, const CandidateSet& cands) {
  std::vector<std::string> words;
  for (const auto& m : cands.members) words.push_back(m.word);
  std::sort(words.begin(), words.end());

  std::vector<GapInstance> out;
  std::size_t begin = 0;
  const auto& toks = held_out.tokens;
  while (begin < toks.size()) {
    std::size_t end = begin;
    while (end < toks.size() && toks[end].sentence_id == toks[begin].sentence_id) ++end;
    for (std::size_t i = begin; i < end; ++i) {
      const Token& t = toks[i];
      if (!std::binary_search(words.begin(), words.end(), t.surface)) continue;
      if (!cands.pos.empty() && coarse_pos(t.pos) != cands.pos) continue;
      GapInstance inst;
      inst.id = out.size();
      inst.gold = t.surface;
      inst.set_id = cands.id;
      inst.sentence.tokens.assign(toks.begin() + static_cast<std::ptrdiff_t>(begin),
                                  toks.begin() + static_cast<std::ptrdiff_t>(end));
      inst.sentence.gap_index = i - begin;
      auto& gap = inst.sentence.tokens[inst.sentence.gap_index];
      gap.surface = std::string(kGapMarker);
      gap.is_stop = true;
      out.push_back(std::move(inst));
    }
    begin = end;
  }
  return out;
}

/// Most frequent member in the training corpus; lexicographic tie-break.
inline std::string baseline_choose(const CandidateSet& cands) {
  if (cands.members.empty()) throw InvalidInput("candidate set '" + cands.id + "' is empty");
  const Candidate* best = &cands.members.front();
  for (const auto& c : cands.members) {
    if (c.frequency > best->frequency || (c.frequency == best->frequency && c.word < best->word)) best = &c;
  }
  return best->word;
}

struct ChiSquare {
  double value = 0.0;
  bool significant_at_5pct = false;
};

/// Critical value of chi-square with one degree of freedom at p = 0.05.
inline constexpr double kChiSquareCritical5pct = 3.841;

/// Pearson's chi-square on the 2x2 table (correct, incorrect) x (A, B),
/// without continuity correction.
inline ChiSquare chi_square(std::uint64_t correct_a, std::uint64_t n_a, std::uint64_t correct_b, std::uint64_t n_b) {
  if (n_a == 0 || n_b == 0) throw InvalidInput("chi-square needs at least one observation per system");
  if (correct_a > n_a || correct_b > n_b) throw InvalidInput("correct count exceeds sample size");
  const double a = static_cast<double>(correct_a);
  const double b = static_cast<double>(n_a - correct_a);
  const double c = static_cast<double>(correct_b);
  const double d = static_cast<double>(n_b - correct_b);
  const double n = a + b + c + d;
  const double col_correct = a + c;
  const double col_wrong = b + d;
  if (col_correct == 0.0 || col_wrong == 0.0) return {};
  const double diff = a * d - b * c;
  const double chi2 = n * diff * diff / (static_cast<double>(n_a) * static_cast<double>(n_b) * col_correct * col_wrong);
  return {chi2, chi2 > kChiSquareCritical5pct};
}

struct EvalConfig {
  int half_width = 0;
  int max_order = 0;
  SignificanceThresholds thresholds;
};

struct InstanceOutcome {
  std::size_t id = 0;
  std::string gold;
  std::string chosen;
  bool fallback = false;
  /// (candidate, M) in ranked order.
  std::vector<std::pair<std::string, double>> scores;
};

struct EvalReport {
  std::string set_id;
  std::size_t sample_size = 0;
  std::size_t correct = 0;
  std::size_t baseline_correct = 0;
  double accuracy = 0.0;
  double baseline_accuracy = 0.0;
  ChiSquare chi2;
  EvalConfig config;
  std::vector<InstanceOutcome> outcomes;
};

inline EvalReport evaluate(const CandidateSet& cands, const std::vector<GapInstance>& instances,
                           const EvalConfig& config = {}, const ScoreOptions& opts = {}) {
  if (instances.empty()) throw InvalidInput("no gap instances for set '" + cands.id + "'");
  cands.validate();
  const std::string baseline = baseline_choose(cands);
  EvalReport r;
  r.set_id = cands.id;
  r.config = config;
  r.sample_size = instances.size();
  r.outcomes.reserve(instances.size());
  for (const auto& inst : instances) {
    const auto ranked = choose(cands, inst.sentence, opts);
    InstanceOutcome o;
    o.id = inst.id;
    o.gold = inst.gold;
    o.chosen = ranked.front().candidate;
    o.fallback = is_baseline_fallback(ranked);
    for (const auto& s : ranked) o.scores.emplace_back(s.candidate, s.total);
    if (o.chosen == inst.gold) ++r.correct;
    if (baseline == inst.gold) ++r.baseline_correct;
    r.outcomes.push_back(std::move(o));
  }
  const double n = static_cast<double>(r.sample_size);
  r.accuracy = static_cast<double>(r.correct) / n;
  r.baseline_accuracy = static_cast<double>(r.baseline_correct) / n;
  r.chi2 = chi_square(r.correct, r.sample_size, r.baseline_correct, r.sample_size);
  return r;
}

/// A synonym set as declared in a set file: "<id> <POS> <word> <word> ...".
struct SynonymSet {
  std::string id;
  std::string pos;
  std::vector<std::string> words;
};

inline std::vector<SynonymSet> parse_synonym_sets(std::string_view text) {
  std::vector<SynonymSet> sets;
  const auto lines = detail::split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto line = lines[i];
    const auto fields = detail::split_ws(line);
    if (fields.empty() || fields[0].front() == '#') continue;
    if (fields.size() < 4) throw FormatError(i + 1, 1, "expected '<id> <POS> <word> <word> ...'");
    SynonymSet s;
    s.id = std::string(fields[0]);
    s.pos = std::string(fields[1]);
    for (std::size_t j = 2; j < fields.size(); ++j) s.words.push_back(to_lower_ascii(fields[j]));
    for (const auto& prev : sets) {
      if (prev.id == s.id) throw FormatError(i + 1, 1, "duplicate set id '" + s.id + "'");
    }
    sets.push_back(std::move(s));
  }
  return sets;
}

/// The seven synonym sets of the reference experiment.
inline std::vector<SynonymSet> reference_synonym_sets() {
  return {
      {"1", "JJ", {"difficult", "hard", "tough"}},
      {"2", "NN", {"error", "mistake", "oversight"}},
      {"3", "NN", {"job", "task", "duty"}},
      {"4", "NN", {"responsibility", "commitment", "obligation", "burden"}},
      {"5", "NN", {"material", "stuff", "substance"}},
      {"6", "VB", {"give", "provide", "offer"}},
      {"7", "VB", {"settle", "resolve"}},
  };
}

struct SweepCell {
  std::string window_label;
  int half_width = 4;
  int max_order = 1;
};

/// Narrow/medium/wide windows crossed with orders 1-3; the wide window stops
/// at order 2.
inline std::vector<SweepCell> default_sweep_grid() {
  return {{"Narrow", 4, 1},  {"Narrow", 4, 2},  {"Narrow", 4, 3}, {"Medium", 10, 1},
          {"Medium", 10, 2}, {"Medium", 10, 3}, {"Wide", 50, 1},  {"Wide", 50, 2}};
}

struct SweepConfig {
  std::vector<SweepCell> grid = default_sweep_grid();
  SignificanceThresholds thresholds;
  NetworkCaps caps;
  ScoreOptions score;
  bool cross_sentences = false;
  unsigned threads = 1;
};

struct SweepSetInfo {
  std::string id;
  std::size_t size = 0;
  std::optional<double> baseline_accuracy;
};

struct SweepRow {
  SweepCell cell;
  /// One entry per set, aligned with SweepResult::sets; empty when the set
  /// had no instances or a member could not be built.
  std::vector<std::optional<EvalReport>> reports;
};

struct SweepResult {
  std::vector<SweepSetInfo> sets;
  std::vector<SweepRow> rows;
  /// Non-fatal problems, e.g. a member that is a stop word.
  std::vector<std::string> warnings;
};

/// Runs the full window x order sweep. `train` must already carry stop flags
/// from `vocab`; `held_out` is re-flagged against the training vocabulary.
inline SweepResult run_sweep(const TokenStream& train, const Vocabulary& vocab, TokenStream held_out,
                             const std::vector<SynonymSet>& sets, const CorpusConfig& corpus_cfg,
                             const SweepConfig& cfg) {
  cfg.thresholds.validate();
  apply_stop_policy(held_out, vocab, corpus_cfg);

  SweepResult result;
  std::vector<std::vector<GapInstance>> instances;
  std::vector<CandidateSet> shells;
  for (const auto& s : sets) {
    CandidateSet shell;
    shell.id = s.id;
    shell.pos = s.pos;
    for (const auto& w : s.words) shell.members.push_back({w, nullptr, vocab.count(w)});
    instances.push_back(make_gap_instances(held_out, shell));
    SweepSetInfo info;
    info.id = s.id;
    info.size = instances.back().size();
    if (info.size > 0) {
      const auto base = baseline_choose(shell);
      std::size_t hits = 0;
      for (const auto& inst : instances.back()) hits += inst.gold == base ? 1 : 0;
      info.baseline_accuracy = static_cast<double>(hits) / static_cast<double>(info.size);
    }
    result.sets.push_back(info);
    shells.push_back(std::move(shell));
  }

  std::map<int, PairCounts> counts_by_k;
  for (const auto& cell : cfg.grid) {
    auto it = counts_by_k.find(cell.half_width);
    if (it == counts_by_k.end()) {
      WindowConfig w{cell.half_width, cfg.cross_sentences};
      it = counts_by_k.emplace(cell.half_width, count_pairs(train, vocab, w, cfg.threads)).first;
    }
    const PairCounts& counts = it->second;

    SweepRow row;
    row.cell = cell;
    for (std::size_t si = 0; si < sets.size(); ++si) {
      if (instances[si].empty()) {
        row.reports.emplace_back();
        continue;
      }
      std::vector<std::unique_ptr<CoocNetwork>> nets;
      CandidateSet cands = shells[si];
      bool ok = true;
      for (auto& m : cands.members) {
        try {
          nets.push_back(std::make_unique<CoocNetwork>(
              build_network(m.word, counts, cfg.thresholds, cell.max_order, cfg.caps)));
          m.network = nets.back().get();
        } catch (const InvalidRoot& e) {
          result.warnings.push_back("set " + sets[si].id + ": " + e.what());
          ok = false;
          break;
        }
      }
      if (!ok) {
        row.reports.emplace_back();
        continue;
      }
      EvalConfig ec{cell.half_width, cell.max_order, cfg.thresholds};
      row.reports.emplace_back(evaluate(cands, instances[si], ec, cfg.score));
    }
    result.rows.push_back(std::move(row));
  }
  std::sort(result.warnings.begin(), result.warnings.end());
  result.warnings.erase(std::unique(result.warnings.begin(), result.warnings.end()), result.warnings.end());
  return result;
}

namespace detail {

inline std::string percent(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f%%", fraction * 100.0);
  return buf;
}

}  // namespace detail

/// Tab-delimited accuracy grid: a Size row and a Baseline row, then one row
/// per window/order cell. "^a" marks cells not significantly different from
/// the baseline.
inline std::string format_sweep_table(const SweepResult& r, const SweepConfig& cfg) {
  std::ostringstream out;
  out << "# window/order sweep; t_min=" << detail::format_real(cfg.thresholds.t_min)
      << " mi_min=" << detail::format_real(cfg.thresholds.mi_min) << " max_nodes=" << cfg.caps.max_nodes
      << " max_edges=" << cfg.caps.max_edges << " cross_sentences=" << (cfg.cross_sentences ? 1 : 0) << '\n';
  out << "Set";
  for (const auto& s : r.sets) out << '\t' << s.id;
  out << "\nSize";
  for (const auto& s : r.sets) out << '\t' << s.size;
  out << "\nBaseline";
  for (const auto& s : r.sets) out << '\t' << (s.baseline_accuracy ? detail::percent(*s.baseline_accuracy) : "---");
  out << '\n';
  for (const auto& row : r.rows) {
    out << row.cell.window_label << ' ' << row.cell.max_order;
    for (const auto& rep : row.reports) {
      out << '\t';
      if (!rep) {
        out << "---";
        continue;
      }
      out << detail::percent(rep->accuracy);
      if (!rep->chi2.significant_at_5pct) out << "^a";
    }
    out << '\n';
  }
  out << "# ^a difference from baseline not significant (Pearson chi-square, 1 df, p=0.05)\n";
  for (const auto& w : r.warnings) out << "# warning: " << w << '\n';
  return out.str();
}

/// Per-instance log: cell, set, instance id, gold, chosen, fallback flag and
/// the ranked "candidate=M" list.
inline std::string format_instance_log(const SweepResult& r) {
  std::ostringstream out;
  out << "cell\tset\tinstance\tgold\tchosen\tfallback\tscores\n";
  for (const auto& row : r.rows) {
    const std::string cell = row.cell.window_label + "-" + std::to_string(row.cell.max_order);
    for (std::size_t si = 0; si < row.reports.size(); ++si) {
      if (!row.reports[si]) continue;
      for (const auto& o : row.reports[si]->outcomes) {
        out << cell << '\t' << r.sets[si].id << '\t' << o.id << '\t' << o.gold << '\t' << o.chosen << '\t'
            << (o.fallback ? 1 : 0) << '\t';
        for (std::size_t i = 0; i < o.scores.size(); ++i) {
          if (i) out << ';';
          out << o.scores[i].first << '=' << detail::format_weight(o.scores[i].second);
        }
        out << '\n';
      }
    }
  }
  return out.str();
}

}  // namespace lexchoice
