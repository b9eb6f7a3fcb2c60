#pragma once

// Pipeline steps behind the command-line tool. Each step reads and writes
// the text artifacts defined by the owning modules.

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lexchoice/choice.hpp"
#include "lexchoice/cooc_stats.hpp"
#include "lexchoice/corpus.hpp"
#include "lexchoice/error.hpp"
#include "lexchoice/eval.hpp"
#include "lexchoice/io.hpp"
#include "lexchoice/network.hpp"

namespace lexchoice::commands {

namespace fs = std::filesystem;

inline constexpr const char* kVocabularyFile = "vocab.tsv";
inline constexpr const char* kPairCountsFile = "pairs.tsv";

/// Reads and concatenates corpus files in the order given.
inline TokenStream load_corpus(const std::vector<fs::path>& paths, const CorpusConfig& cfg) {
  TokenStream ts;
  for (const auto& p : paths) {
    try {
      ts.append(ingest(io::read_file(p), cfg));
    } catch (const FormatError& e) {
      throw FormatError(e.line(), e.column(), p.string() + ": " + e.what());
    }
  }
  return ts;
}

/// Network file name for a root; bytes outside [a-z0-9_.-] are %-escaped.
inline std::string network_file_name(const std::string& root) {
  static const char* hex = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : root) {
    const bool plain = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' || c == '-' ||
                       (c == '.' && !out.empty());
    if (plain) {
      out += static_cast<char>(c);
    } else {
      out += '%';
      out += hex[c >> 4];
      out += hex[c & 15];
    }
  }
  return out + ".net";
}

inline void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create directory " + dir.string());
}

// ---------------------------------------------------------------- stats

struct StatsOptions {
  std::vector<fs::path> corpus;
  CorpusConfig corpus_cfg;
  WindowConfig window;
  fs::path out_dir;
  unsigned threads = 1;
};

struct StatsSummary {
  std::uint64_t total_tokens = 0;
  std::size_t vocabulary_size = 0;
  std::size_t pair_count = 0;
};

inline StatsSummary run_stats(const StatsOptions& opt) {
  TokenStream ts = load_corpus(opt.corpus, opt.corpus_cfg);
  const Vocabulary vocab = build_vocabulary(ts, opt.corpus_cfg);
  const PairCounts counts = count_pairs(ts, vocab, opt.window, opt.threads);
  ensure_directory(opt.out_dir);
  io::write_file_atomic(opt.out_dir / kVocabularyFile, write_vocabulary(vocab));
  io::write_file_atomic(opt.out_dir / kPairCountsFile, write_pair_counts(counts));
  return {vocab.total_tokens, vocab.freq.size(), counts.pair_count()};
}

inline PairCounts load_counts(const fs::path& dir) {
  const auto vocab_path = dir / kVocabularyFile;
  const auto pairs_path = dir / kPairCountsFile;
  Vocabulary vocab;
  try {
    vocab = read_vocabulary(io::read_file(vocab_path));
  } catch (const FormatError& e) {
    throw FormatError(e.line(), e.column(), vocab_path.string() + ": " + e.what());
  }
  try {
    return read_pair_counts(io::read_file(pairs_path), vocab);
  } catch (const FormatError& e) {
    throw FormatError(e.line(), e.column(), pairs_path.string() + ": " + e.what());
  }
}

// ---------------------------------------------------------------- build

struct BuildOptions {
  fs::path counts_dir;
  std::vector<std::string> roots;
  int max_order = 2;
  SignificanceThresholds thresholds;
  NetworkCaps caps;
  fs::path out_dir;
};

struct BuildResult {
  std::string root;
  bool ok = false;
  std::size_t nodes = 0;
  std::size_t edges = 0;
  bool truncated = false;
  std::string error;
};

/// Builds one network per root. A bad root is reported and skipped; the
/// others still get built.
inline std::vector<BuildResult> run_build(const BuildOptions& opt) {
  const PairCounts counts = load_counts(opt.counts_dir);
  ensure_directory(opt.out_dir);
  std::vector<BuildResult> results;
  for (const auto& raw : opt.roots) {
    BuildResult r;
    r.root = to_lower_ascii(raw);
    try {
      const CoocNetwork net = build_network(r.root, counts, opt.thresholds, opt.max_order, opt.caps);
      io::write_file_atomic(opt.out_dir / network_file_name(r.root), write_network(net));
      r.ok = true;
      r.nodes = net.node_count();
      r.edges = net.edge_count();
      r.truncated = net.truncated();
    } catch (const InvalidRoot& e) {
      r.error = e.what();
    }
    results.push_back(std::move(r));
  }
  return results;
}

inline CoocNetwork load_network(const fs::path& dir, const std::string& root) {
  const auto path = dir / network_file_name(root);
  if (!fs::exists(path)) throw NotFound("no network for candidate '" + root + "' (expected " + path.string() + ")");
  try {
    CoocNetwork net = read_network(io::read_file(path));
    if (net.root() != root) throw FormatError(1, 1, "file holds the network of '" + net.root() + "'");
    return net;
  } catch (const FormatError& e) {
    throw FormatError(e.line(), e.column(), path.string() + ": " + e.what());
  }
}

// ---------------------------------------------------------------- choose

struct ChooseOptions {
  fs::path network_dir;
  std::vector<std::string> candidates;
  std::string sentence;
  CorpusConfig corpus_cfg;
  ScoreOptions score;
  std::size_t top_n = 5;
  bool json = false;
};

struct ChooseOutcome {
  std::vector<ChoiceScore> ranked;
  bool fallback = false;
};

inline ChooseOutcome run_choose(const ChooseOptions& opt, std::vector<std::unique_ptr<CoocNetwork>>* keep = nullptr) {
  if (opt.candidates.empty()) throw InvalidInput("no candidates given");
  const GapSentence sentence = parse_gap_sentence(opt.sentence, opt.corpus_cfg);
  std::vector<std::unique_ptr<CoocNetwork>> nets;
  CandidateSet cands;
  cands.id = "cli";
  for (const auto& raw : opt.candidates) {
    const std::string w = to_lower_ascii(raw);
    nets.push_back(std::make_unique<CoocNetwork>(load_network(opt.network_dir, w)));
    cands.members.push_back({w, nets.back().get(), nets.back()->metadata().root_frequency});
  }
  ChooseOutcome out;
  out.ranked = choose(cands, sentence, opt.score);
  out.fallback = is_baseline_fallback(out.ranked);
  if (keep) *keep = std::move(nets);
  return out;
}

/// Human-readable ranking with the strongest evidence words per candidate.
inline std::string format_choice_report(const ChooseOutcome& out, std::size_t top_n) {
  std::ostringstream s;
  for (std::size_t i = 0; i < out.ranked.size(); ++i) {
    const auto& c = out.ranked[i];
    s << (i + 1) << '\t' << c.candidate << "\tM=" << detail::format_weight(c.total) << "\tfreq=" << c.frequency;
    if (i == 0 && out.fallback) s << "\tbaseline fallback";
    s << '\n';
    for (std::size_t j = 0; j < c.per_word.size() && j < top_n; ++j) {
      const auto& ev = c.per_word[j];
      s << "\t\t" << ev.word << "\tsig=" << detail::format_weight(ev.sig) << "\torder=" << ev.order;
      if (ev.occurrences > 1) s << "\tx" << ev.occurrences;
      s << '\n';
    }
  }
  return s.str();
}

inline std::string format_choice_json(const ChooseOutcome& out, std::size_t top_n) {
  nlohmann::ordered_json j;
  j["baseline_fallback"] = out.fallback;
  j["winner"] = out.ranked.empty() ? "" : out.ranked.front().candidate;
  auto& arr = j["candidates"] = nlohmann::ordered_json::array();
  for (const auto& c : out.ranked) {
    nlohmann::ordered_json cj;
    cj["word"] = c.candidate;
    cj["M"] = c.total;
    cj["frequency"] = c.frequency;
    auto& ev = cj["evidence"] = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < c.per_word.size() && i < top_n; ++i) {
      const auto& e = c.per_word[i];
      ev.push_back({{"word", e.word}, {"sig", e.sig}, {"order", e.order}, {"occurrences", e.occurrences}});
    }
    arr.push_back(std::move(cj));
  }
  return j.dump(2) + "\n";
}

// ---------------------------------------------------------------- evaluate

struct EvaluateOptions {
  std::vector<fs::path> train;
  std::vector<fs::path> held_out;
  /// Empty means the reference seven sets.
  fs::path sets_file;
  CorpusConfig corpus_cfg;
  SweepConfig sweep;
  fs::path report_path;
  fs::path log_path;
};

struct EvaluateOutput {
  SweepResult result;
  std::string table;
  std::string log;
};

/// Refuses to run when a held-out file is also a training file, by path or
/// by content.
inline void check_disjoint(const std::vector<fs::path>& train, const std::vector<fs::path>& held_out) {
  for (const auto& h : held_out) {
    for (const auto& t : train) {
      std::error_code ec;
      if (fs::equivalent(h, t, ec)) {
        throw InvalidInput("held-out file " + h.string() + " is also a training file (" + t.string() +
                           "); evaluation must use unseen text");
      }
      if (io::read_file(h) == io::read_file(t)) {
        throw InvalidInput("held-out file " + h.string() + " has the same content as training file " + t.string() +
                           "; evaluation must use unseen text");
      }
    }
  }
}

inline EvaluateOutput run_evaluate(const EvaluateOptions& opt) {
  if (opt.train.empty()) throw InvalidInput("no training corpus given");
  if (opt.held_out.empty()) throw InvalidInput("no held-out corpus given");
  check_disjoint(opt.train, opt.held_out);

  TokenStream train = load_corpus(opt.train, opt.corpus_cfg);
  const Vocabulary vocab = build_vocabulary(train, opt.corpus_cfg);
  TokenStream held = load_corpus(opt.held_out, opt.corpus_cfg);
  std::vector<SynonymSet> sets;
  if (opt.sets_file.empty()) {
    sets = reference_synonym_sets();
  } else {
    try {
      sets = parse_synonym_sets(io::read_file(opt.sets_file));
    } catch (const FormatError& e) {
      throw FormatError(e.line(), e.column(), opt.sets_file.string() + ": " + e.what());
    }
  }

  EvaluateOutput out;
  out.result = run_sweep(train, vocab, std::move(held), sets, opt.corpus_cfg, opt.sweep);
  std::ostringstream header;
  header << "# train N=" << vocab.total_tokens << " F=" << vocab.stop_threshold << '\n';
  out.table = header.str() + format_sweep_table(out.result, opt.sweep);
  out.log = format_instance_log(out.result);
  if (!opt.report_path.empty()) io::write_file_atomic(opt.report_path, out.table);
  if (!opt.log_path.empty()) io::write_file_atomic(opt.log_path, out.log);
  return out;
}

}  // namespace lexchoice::commands
