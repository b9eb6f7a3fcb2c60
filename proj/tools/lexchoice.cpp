// lexchoice: build co-occurrence statistics and networks from a tagged
// corpus, fill synonym gaps, and run the window/order evaluation sweep.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lexchoice/commands.hpp"

namespace {

using namespace lexchoice;
namespace cmd = lexchoice::commands;

struct SharedFlags {
  std::string format = "slash";
  std::uint64_t max_freq = 800;
  double t_min = 2.0;
  double mi_min = 2.0;
  std::size_t max_nodes = 50'000;
  std::size_t max_edges = 500'000;
  std::vector<std::size_t> depth_caps;
  unsigned threads = 1;

  CorpusConfig corpus() const {
    CorpusConfig c;
    c.format = parse_tag_format(format);
    c.stop_threshold = max_freq;
    return c;
  }
  SignificanceThresholds thresholds() const { return {t_min, mi_min}; }
  NetworkCaps caps() const {
    if (depth_caps.size() == 2) return {depth_caps[0], depth_caps[1]};
    return {max_nodes, max_edges};
  }
};

void add_corpus_flags(CLI::App* app, SharedFlags& f) {
  app->add_option("--format", f.format, "Tag format: slash (surface/TAG per token) or tsv")
      ->check(CLI::IsMember({"slash", "tsv"}))
      ->capture_default_str();
  app->add_option("--max-freq", f.max_freq, "Stop-word frequency threshold F")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

void add_network_flags(CLI::App* app, SharedFlags& f) {
  app->add_option("--t-min", f.t_min, "Minimum t-score for an edge")->check(CLI::PositiveNumber)->capture_default_str();
  app->add_option("--mi-min", f.mi_min, "Minimum mutual information (bits) for an edge")->capture_default_str();
  app->add_option("--max-nodes", f.max_nodes, "Node cap per network")->check(CLI::PositiveNumber)->capture_default_str();
  app->add_option("--max-edges", f.max_edges, "Edge cap per network")->capture_default_str();
  app->add_option("--depth-caps", f.depth_caps, "Node and edge caps as NODES,EDGES")
      ->delimiter(',')
      ->expected(2);
}

std::vector<SweepCell> parse_grid(const std::vector<std::string>& cells_text) {
  std::vector<SweepCell> grid;
  for (const auto& s : cells_text) {
    const auto colon = s.find(':');
    if (colon == std::string::npos) throw InvalidInput("grid cell '" + s + "' must look like K:ORDER");
    const int k = std::stoi(s.substr(0, colon));
    const int d = std::stoi(s.substr(colon + 1));
    std::string label = k == 4 ? "Narrow" : k == 10 ? "Medium" : k == 50 ? "Wide" : "K" + std::to_string(k);
    grid.push_back({label, k, d});
  }
  return grid;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Near-synonym choice with lexical co-occurrence networks"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML/INI config file; flags override it")->envname("LEXCHOICE_CONFIG");

  SharedFlags flags;

  // stats
  std::vector<std::string> stats_corpus;
  int stats_window = 4;
  bool stats_cross = false;
  std::string stats_out;
  auto* stats = app.add_subcommand("stats", "Count vocabulary and windowed pairs");
  stats->add_option("--corpus", stats_corpus, "Tagged corpus file(s), concatenated in order")
      ->required()
      ->check(CLI::ExistingFile);
  stats->add_option("--window", stats_window, "Window half-width k")->check(CLI::PositiveNumber)->capture_default_str();
  stats->add_flag("--cross-sentences", stats_cross, "Let windows span sentence boundaries");
  stats->add_option("--threads", flags.threads, "Counting threads")->capture_default_str();
  stats->add_option("--out", stats_out, "Output directory")->required();
  add_corpus_flags(stats, flags);

  // build
  std::string build_counts;
  std::vector<std::string> build_roots;
  int build_order = 2;
  std::string build_out;
  auto* build = app.add_subcommand("build", "Build co-occurrence networks for root words");
  build->add_option("--counts", build_counts, "Directory written by 'stats'")->required()->check(CLI::ExistingDirectory);
  build->add_option("--root", build_roots, "Root word(s)")->required()->delimiter(',');
  build->add_option("--order", build_order, "Maximum relation order D")->check(CLI::NonNegativeNumber)->capture_default_str();
  build->add_option("--out", build_out, "Output directory for .net files")->required();
  add_network_flags(build, flags);

  // choose
  std::string choose_nets;
  std::vector<std::string> choose_cands;
  std::string choose_sentence;
  std::size_t choose_top = 5;
  std::size_t choose_window = 0;
  bool choose_json = false;
  auto* choose = app.add_subcommand("choose", "Rank candidates for the gap (___) in a tagged sentence");
  choose->add_option("--networks", choose_nets, "Directory of .net files")->required()->check(CLI::ExistingDirectory);
  choose->add_option("--candidates", choose_cands, "Candidate words")->required()->delimiter(',');
  choose->add_option("--sentence", choose_sentence, "Tagged sentence with ___ at the gap")->required();
  choose->add_option("--top", choose_top, "Evidence words shown per candidate")->capture_default_str();
  choose->add_option("--evidence-window", choose_window, "Only use words within this distance of the gap (0 = all)");
  choose->add_flag("--json", choose_json, "Emit JSON");

  // evaluate
  std::vector<std::string> eval_train;
  std::vector<std::string> eval_held;
  std::string eval_sets;
  std::vector<std::string> eval_grid;
  std::string eval_report;
  std::string eval_log;
  bool eval_cross = false;
  auto* evaluate = app.add_subcommand("evaluate", "Run the window x order gap-fill sweep against the baseline");
  evaluate->add_option("--train", eval_train, "Training corpus file(s)")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--held-out", eval_held, "Held-out corpus file(s)")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--sets", eval_sets, "Synonym set file (default: the seven reference sets)")
      ->check(CLI::ExistingFile);
  evaluate->add_option("--grid", eval_grid, "Cells as K:ORDER (default 4:1..3, 10:1..3, 50:1..2)")->delimiter(',');
  evaluate->add_option("--report", eval_report, "Write the accuracy table here (default stdout)");
  evaluate->add_option("--log", eval_log, "Write the per-instance log here");
  evaluate->add_flag("--cross-sentences", eval_cross, "Let windows span sentence boundaries");
  evaluate->add_option("--threads", flags.threads, "Counting threads")->capture_default_str();
  add_corpus_flags(evaluate, flags);
  add_network_flags(evaluate, flags);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*stats) {
      cmd::StatsOptions opt;
      for (const auto& p : stats_corpus) opt.corpus.emplace_back(p);
      opt.corpus_cfg = flags.corpus();
      opt.window = {stats_window, stats_cross};
      opt.out_dir = stats_out;
      opt.threads = flags.threads;
      const auto s = cmd::run_stats(opt);
      std::cout << "N=" << s.total_tokens << "\tvocabulary=" << s.vocabulary_size << "\tpairs=" << s.pair_count
                << '\n';
      return 0;
    }
    if (*build) {
      cmd::BuildOptions opt;
      opt.counts_dir = build_counts;
      opt.roots = build_roots;
      opt.max_order = build_order;
      opt.thresholds = flags.thresholds();
      opt.caps = flags.caps();
      opt.out_dir = build_out;
      int status = 0;
      for (const auto& r : cmd::run_build(opt)) {
        if (r.ok) {
          std::cout << r.root << "\tnodes=" << r.nodes << "\tedges=" << r.edges << (r.truncated ? "\ttruncated" : "")
                    << '\n';
        } else {
          std::cerr << "error: " << r.error << '\n';
          status = 1;
        }
      }
      return status;
    }
    if (*choose) {
      cmd::ChooseOptions opt;
      opt.network_dir = choose_nets;
      opt.candidates = choose_cands;
      opt.sentence = choose_sentence;
      opt.top_n = choose_top;
      if (choose_window > 0) opt.score.evidence_window = choose_window;
      const auto out = cmd::run_choose(opt);
      std::cout << (choose_json ? cmd::format_choice_json(out, choose_top) : cmd::format_choice_report(out, choose_top));
      return 0;
    }
    if (*evaluate) {
      cmd::EvaluateOptions opt;
      for (const auto& p : eval_train) opt.train.emplace_back(p);
      for (const auto& p : eval_held) opt.held_out.emplace_back(p);
      opt.sets_file = eval_sets;
      opt.corpus_cfg = flags.corpus();
      if (!eval_grid.empty()) opt.sweep.grid = parse_grid(eval_grid);
      opt.sweep.thresholds = flags.thresholds();
      opt.sweep.caps = flags.caps();
      opt.sweep.cross_sentences = eval_cross;
      opt.sweep.threads = flags.threads;
      opt.report_path = eval_report;
      opt.log_path = eval_log;
      const auto out = cmd::run_evaluate(opt);
      if (eval_report.empty()) std::cout << out.table;
      return 0;
    }
  } catch (const lexchoice::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
