#pragma once

// Test-only oracles and fixture generators. Nothing here calls into the
// code paths it is used to check.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "lexchoice/corpus.hpp"

namespace lexchoice::testing {

using PairMap = std::map<std::pair<std::string, std::string>, std::uint64_t>;

/// Windowed pair counts by direct enumeration of ordered position pairs
/// (i, j), |i - j| <= k, each unordered token pair seen twice and halved.
inline PairMap brute_force_pairs(const TokenStream& ts, const Vocabulary& vocab, int k, bool cross_sentences) {
  PairMap twice;
  const long n = static_cast<long>(ts.tokens.size());
  auto usable = [&](long i) {
    const auto& t = ts.tokens[static_cast<std::size_t>(i)];
    return !t.is_stop && vocab.count(t.surface) <= vocab.stop_threshold;
  };
  for (long i = 0; i < n; ++i) {
    for (long j = std::max(0L, i - k); j <= std::min(n - 1, i + k); ++j) {
      if (i == j) continue;
      const auto& a = ts.tokens[static_cast<std::size_t>(i)];
      const auto& b = ts.tokens[static_cast<std::size_t>(j)];
      if (!cross_sentences && a.sentence_id != b.sentence_id) continue;
      if (!usable(i) || !usable(j) || a.surface == b.surface) continue;
      twice[std::minmax(a.surface, b.surface)] += 1;
    }
  }
  PairMap out;
  for (auto& [k2, v] : twice) out[k2] = v / 2;
  return out;
}

/// Random tagged stream over a small vocabulary. Roughly one token in eight
/// carries a stop tag; sentence lengths vary from 1 to 40.
inline TokenStream random_stream(std::mt19937_64& rng, std::size_t length, std::size_t vocab_size) {
  static const char* const tags[] = {"NN", "VB", "JJ", "NNS", "RB", "NN", "VBD", "CD"};
  TokenStream ts;
  std::size_t sentence_left = 0;
  for (std::size_t i = 0; i < length; ++i) {
    if (sentence_left == 0) {
      if (i > 0) ++ts.sentence_count;
      sentence_left = 1 + rng() % 40;
    }
    Token t;
    t.surface = "w" + std::to_string(rng() % vocab_size);
    t.pos = tags[rng() % 8];
    t.is_stop = t.pos == "CD";
    t.sentence_id = ts.sentence_count;
    ts.tokens.push_back(std::move(t));
    --sentence_left;
  }
  if (length > 0) ++ts.sentence_count;
  return ts;
}

struct TestEdge {
  int a;
  int b;
  double weight;
};

struct TestGraph {
  int node_count = 0;
  std::vector<TestEdge> edges;
};

inline std::string node_name(int i) { return "n" + std::to_string(i); }

/// Random undirected graph on up to `max_nodes` nodes with weights drawn
/// from a small set, so many shortest paths tie or nearly tie.
inline TestGraph random_graph(std::mt19937_64& rng, int max_nodes) {
  TestGraph g;
  g.node_count = 2 + static_cast<int>(rng() % static_cast<unsigned>(max_nodes - 1));
  static const double weights[] = {0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 4.25};
  for (int a = 0; a < g.node_count; ++a) {
    for (int b = a + 1; b < g.node_count; ++b) {
      if (rng() % 100 < 45) g.edges.push_back({a, b, weights[rng() % 7]});
    }
  }
  return g;
}

struct PathOracle {
  int distance = -1;
  double best_sum = 0.0;
  std::vector<std::vector<int>> best_paths;
};

/// Enumerates every walk of length dist(root, target) from root to target
/// (each one is necessarily a shortest path) and keeps the largest
/// sum_{i=1..d} t_i / i, summed left to right.
inline PathOracle enumerate_shortest_paths(const TestGraph& g, int root, int target) {
  std::vector<std::vector<std::pair<int, double>>> adj(static_cast<std::size_t>(g.node_count));
  for (const auto& e : g.edges) {
    adj[static_cast<std::size_t>(e.a)].emplace_back(e.b, e.weight);
    adj[static_cast<std::size_t>(e.b)].emplace_back(e.a, e.weight);
  }
  std::vector<int> dist(static_cast<std::size_t>(g.node_count), -1);
  dist[static_cast<std::size_t>(root)] = 0;
  std::vector<int> queue{root};
  for (std::size_t q = 0; q < queue.size(); ++q) {
    const int u = queue[q];
    for (const auto& [v, w] : adj[static_cast<std::size_t>(u)]) {
      if (dist[static_cast<std::size_t>(v)] < 0) {
        dist[static_cast<std::size_t>(v)] = dist[static_cast<std::size_t>(u)] + 1;
        queue.push_back(v);
      }
    }
  }
  PathOracle out;
  out.distance = dist[static_cast<std::size_t>(target)];
  if (out.distance <= 0) return out;
  bool any = false;
  std::vector<int> path{root};
  std::vector<double> weights;
  std::function<void()> walk = [&] {
    if (static_cast<int>(path.size()) - 1 == out.distance) {
      if (path.back() != target) return;
      double sum = 0.0;
      for (std::size_t i = 0; i < weights.size(); ++i) sum += weights[i] / static_cast<double>(i + 1);
      if (!any || sum > out.best_sum) {
        out.best_sum = sum;
        out.best_paths.clear();
        any = true;
      }
      if (sum == out.best_sum) out.best_paths.push_back(path);
      return;
    }
    for (const auto& [v, w] : adj[static_cast<std::size_t>(path.back())]) {
      path.push_back(v);
      weights.push_back(w);
      walk();
      path.pop_back();
      weights.pop_back();
    }
  };
  walk();
  return out;
}

/// Pearson chi-square straight from sum (O - E)^2 / E over the 2x2 table.
inline double chi_square_definition(std::uint64_t ca, std::uint64_t na, std::uint64_t cb, std::uint64_t nb) {
  const double obs[2][2] = {{double(ca), double(na - ca)}, {double(cb), double(nb - cb)}};
  const double rows[2] = {double(na), double(nb)};
  const double cols[2] = {double(ca + cb), double(na + nb - ca - cb)};
  const double n = rows[0] + rows[1];
  double chi2 = 0.0;
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) {
      const double e = rows[r] * cols[c] / n;
      if (e == 0.0) return 0.0;
      chi2 += (obs[r][c] - e) * (obs[r][c] - e) / e;
    }
  }
  return chi2;
}

/// Training and held-out text for the planted second-order experiment.
///
/// "duty" is planted next to "civic", and "civic" next to "vote", but "duty"
/// and "vote" never share a training sentence. "job" (the more frequent
/// candidate, hence the baseline) is planted next to "steady", which in turn
/// sits next to "income". Held-out sentences pair "vote" with a duty gap and
/// "income" with a job gap, so only second-order evidence can resolve them.
struct PlantedCorpus {
  std::string train;
  std::string held_out;
  std::string sets;
  std::size_t duty_instances = 0;
  std::size_t job_instances = 0;
};

inline PlantedCorpus planted_corpus(std::uint64_t seed = 7, std::size_t fillers = 3000) {
  std::mt19937_64 rng(seed);
  auto filler = [&] { return "f" + std::to_string(rng() % fillers) + "/NN"; };

  // Places `first` and then `second` 1-3 positions apart inside a sentence
  // of filler tokens.
  auto sentence_with = [&](const std::string& first, const std::string& second) {
    const std::size_t len = 8 + rng() % 8;
    std::vector<std::string> toks;
    for (std::size_t i = 0; i < len; ++i) toks.push_back(filler());
    const std::size_t gap = 1 + rng() % 3;
    const std::size_t at = rng() % (len - gap);
    toks[at] = first;
    if (!second.empty()) toks[at + gap] = second;
    if (rng() % 2 && !second.empty()) std::swap(toks[at], toks[at + gap]);
    std::string line;
    for (std::size_t i = 0; i < toks.size(); ++i) line += (i ? " " : "") + toks[i];
    return line + " ./.\n";
  };

  PlantedCorpus c;
  std::vector<std::string> train_lines;
  for (int i = 0; i < 100; ++i) train_lines.push_back(sentence_with("civic/JJ", "duty/NN"));
  for (int i = 0; i < 100; ++i) train_lines.push_back(sentence_with("civic/JJ", "vote/NN"));
  for (int i = 0; i < 200; ++i) train_lines.push_back(sentence_with("steady/JJ", "job/NN"));
  for (int i = 0; i < 100; ++i) train_lines.push_back(sentence_with("steady/JJ", "income/NN"));
  for (int i = 0; i < 500; ++i) train_lines.push_back(sentence_with(filler(), ""));
  std::shuffle(train_lines.begin(), train_lines.end(), rng);
  for (const auto& l : train_lines) c.train += l;

  std::vector<std::string> held_lines;
  for (int i = 0; i < 40; ++i) held_lines.push_back(sentence_with("vote/NN", "duty/NN"));
  for (int i = 0; i < 60; ++i) held_lines.push_back(sentence_with("income/NN", "job/NN"));
  std::shuffle(held_lines.begin(), held_lines.end(), rng);
  for (const auto& l : held_lines) c.held_out += l;
  c.duty_instances = 40;
  c.job_instances = 60;

  c.sets = "# planted near-synonym pair\nP NN duty job\n";
  return c;
}

}  // namespace lexchoice::testing
