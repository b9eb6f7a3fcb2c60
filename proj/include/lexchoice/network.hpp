#pragma once

// Per-root lexical co-occurrence networks and the path-based significance
// score of higher-order relations.
//
// A network holds only first-order edges. A word at BFS depth d relates to
// the root at order d; its score is
//
//   sig(root, w) = (1 / d^3) * sum_{i=1..d} t(w_{i-1}, w_i) / i
//
// along the shortest path (w_0 = root, ..., w_d = w) that maximizes the sum.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "lexchoice/cooc_stats.hpp"
#include "lexchoice/error.hpp"

namespace lexchoice {

struct NetworkCaps {
  std::size_t max_nodes = 50'000;
  std::size_t max_edges = 500'000;
};

/// Relation evidence for one word.
struct SigScore {
  double value = 0.0;
  /// Relation order; 0 when the word is the root or unreachable.
  int order = 0;
};

struct SigPath {
  /// words.front() is the root, words.back() the target.
  std::vector<std::string> words;
  int order = 0;
};

/// Weight stored on network edges: t-score rounded to six decimals, the
/// precision of the network file format, so that a network scores the same
/// before and after a save/load cycle.
inline double quantize_weight(double t) {
  const double q = std::round(t * 1e6) / 1e6;
  return q > 0.0 ? q : 1e-6;
}

class CoocNetwork {
 public:
  struct Node {
    std::string word;
    int depth = 0;
    friend bool operator==(const Node&, const Node&) = default;
  };

  /// Undirected edge with first < second.
  struct Edge {
    std::string first;
    std::string second;
    double weight = 0.0;
    friend bool operator==(const Edge&, const Edge&) = default;
  };

  /// Provenance carried into the network file header.
  struct Metadata {
    std::uint64_t total_tokens = 0;
    int half_width = 0;
    std::uint64_t root_frequency = 0;
    SignificanceThresholds thresholds;
    bool truncated = false;
  };

  CoocNetwork() = default;

  /// Builds a network from explicit first-order edges. Depths are the BFS
  /// distances from `root`; nodes farther than `max_order` and the edges
  /// touching them are dropped.
  static CoocNetwork from_edges(std::string root, int max_order, std::vector<Edge> edges) {
    return from_edges(std::move(root), max_order, std::move(edges), Metadata{});
  }

  static CoocNetwork from_edges(std::string root, int max_order, std::vector<Edge> edges, Metadata meta) {
    if (root.empty()) throw InvalidRoot("empty root word");
    if (max_order < 0) throw InvalidInput("maximum order must be >= 0");

    std::unordered_map<std::string, std::vector<std::string>> adj;
    for (auto& e : edges) {
      if (e.first == e.second) throw InvalidInput("self edge on '" + e.first + "'");
      if (!(e.weight > 0.0) || !std::isfinite(e.weight)) {
        throw InvalidInput("edge " + e.first + "-" + e.second + " has non-positive weight");
      }
      if (e.second < e.first) std::swap(e.first, e.second);
      adj[e.first].push_back(e.second);
      adj[e.second].push_back(e.first);
    }

    std::unordered_map<std::string, int> depth{{root, 0}};
    std::vector<std::string> frontier{root};
    for (int d = 1; d <= max_order && !frontier.empty(); ++d) {
      std::vector<std::string> next;
      for (const auto& u : frontier) {
        const auto it = adj.find(u);
        if (it == adj.end()) continue;
        for (const auto& v : it->second) {
          if (depth.emplace(v, d).second) next.push_back(v);
        }
      }
      frontier = std::move(next);
    }

    CoocNetwork net;
    net.root_ = std::move(root);
    net.max_order_ = max_order;
    net.meta_ = meta;
    for (const auto& [w, d] : depth) net.nodes_.push_back({w, d});
    std::sort(net.nodes_.begin(), net.nodes_.end(),
              [](const Node& a, const Node& b) { return std::tie(a.depth, a.word) < std::tie(b.depth, b.word); });
    for (std::size_t i = 0; i < net.nodes_.size(); ++i) net.index_.emplace(net.nodes_[i].word, i);

    std::map<std::pair<std::string, std::string>, double> unique;
    for (auto& e : edges) {
      if (!depth.count(e.first) || !depth.count(e.second)) continue;
      const auto [it, inserted] = unique.emplace(std::make_pair(e.first, e.second), e.weight);
      if (!inserted && it->second != e.weight) {
        throw InvalidInput("edge " + e.first + "-" + e.second + " given twice with different weights");
      }
    }
    net.edges_.reserve(unique.size());
    for (auto& [k, w] : unique) net.edges_.push_back({k.first, k.second, w});
    net.finalize();
    return net;
  }

  const std::string& root() const noexcept { return root_; }
  int max_order() const noexcept { return max_order_; }
  const Metadata& metadata() const noexcept { return meta_; }
  bool truncated() const noexcept { return meta_.truncated; }

  /// Nodes ordered by (depth, word).
  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  /// Edges ordered by (first, second).
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  std::size_t node_count() const noexcept { return nodes_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }

  bool contains(const std::string& word) const { return index_.count(word) > 0; }

  std::optional<int> depth(const std::string& word) const {
    const auto it = index_.find(word);
    if (it == index_.end()) return std::nullopt;
    return nodes_[it->second].depth;
  }

  std::optional<double> edge_weight(const std::string& a, const std::string& b) const {
    const auto ia = index_.find(a);
    const auto ib = index_.find(b);
    if (ia == index_.end() || ib == index_.end()) return std::nullopt;
    for (const auto& [v, w] : adjacency_[ia->second]) {
      if (v == ib->second) return w;
    }
    return std::nullopt;
  }

  /// Shortest path from the root to `word` with the largest position-weighted
  /// t-score sum; among equal sums, the lexicographically smallest
  /// predecessor wins at every step.
  SigPath max_sig_shortest_path(const std::string& word) const {
    const auto it = index_.find(word);
    if (it == index_.end()) throw NotFound("'" + word + "' is not in the network of '" + root_ + "'");
    SigPath path;
    path.order = nodes_[it->second].depth;
    path.words.resize(static_cast<std::size_t>(path.order) + 1);
    std::size_t cur = it->second;
    for (int d = path.order; d >= 0; --d) {
      path.words[static_cast<std::size_t>(d)] = nodes_[cur].word;
      cur = predecessor_[cur];
    }
    return path;
  }

  /// Zero for the root itself and for words outside the network.
  SigScore significance(const std::string& word) const {
    const auto it = index_.find(word);
    if (it == index_.end()) return {};
    const int d = nodes_[it->second].depth;
    if (d == 0) return {};
    return {path_sum_[it->second] / (static_cast<double>(d) * d * d), d};
  }

  /// Sum of t(w_{i-1}, w_i) / i along the best shortest path.
  double path_sum(const std::string& word) const {
    const auto it = index_.find(word);
    if (it == index_.end()) throw NotFound("'" + word + "' is not in the network of '" + root_ + "'");
    return path_sum_[it->second];
  }

 private:
  void finalize() {
    const std::size_t n = nodes_.size();
    adjacency_.assign(n, {});
    for (const auto& e : edges_) {
      const auto a = index_.at(e.first);
      const auto b = index_.at(e.second);
      adjacency_[a].emplace_back(b, e.weight);
      adjacency_[b].emplace_back(a, e.weight);
    }
    for (auto& list : adjacency_) std::sort(list.begin(), list.end());

    // Layered DP. Nodes are sorted by depth, so every predecessor is final
    // before its successors are visited; same-layer edges are never used.
    path_sum_.assign(n, 0.0);
    predecessor_.assign(n, 0);
    for (std::size_t v = 1; v < n; ++v) {
      const int d = nodes_[v].depth;
      double best = -std::numeric_limits<double>::infinity();
      std::size_t best_pred = v;
      for (const auto& [u, w] : adjacency_[v]) {
        if (nodes_[u].depth != d - 1) continue;
        const double cand = path_sum_[u] + w / d;
        if (cand > best) {
          best = cand;
          best_pred = u;
        }
      }
      path_sum_[v] = best;
      predecessor_[v] = best_pred;
    }
  }

  std::string root_;
  int max_order_ = 0;
  Metadata meta_;
  std::vector<Node> nodes_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::pair<std::size_t, double>>> adjacency_;
  std::vector<double> path_sum_;
  std::vector<std::size_t> predecessor_;
};

inline SigPath max_sig_shortest_path(const CoocNetwork& net, const std::string& word) {
  return net.max_sig_shortest_path(word);
}

inline SigScore significance(const CoocNetwork& net, const std::string& word) { return net.significance(word); }

/// Breadth-first network construction from significant co-occurrences.
///
/// A word enters at the depth it is first reached, and every significant edge
/// among the included words is kept, lateral ones included. When `caps` bind,
/// the network is truncated rather than rejected: the weakest candidates of the
/// last layer are dropped, then the weakest non-tree edges.
inline CoocNetwork build_network(const std::string& root, const PairCounts& counts,
                                 const SignificanceThresholds& th, int max_order, const NetworkCaps& caps = {}) {
  using WordId = PairCounts::WordId;
  th.validate();
  if (max_order < 0) throw InvalidInput("maximum order must be >= 0");
  if (caps.max_nodes == 0) throw InvalidInput("node cap must be >= 1");

  const auto root_id = counts.id(root);
  if (!root_id) throw InvalidRoot("root '" + root + "' does not occur in the training corpus");
  if (counts.is_frequency_stop(*root_id)) {
    throw InvalidRoot("root '" + root + "' is a stop word (frequency " + std::to_string(counts.frequency(*root_id)) +
                      " > F=" + std::to_string(counts.stop_threshold()) + ")");
  }

  auto weight_of = [&](WordId a, WordId b) -> std::optional<double> {
    const PairStats p = counts.stats(a, b);
    if (!is_significant(p, th)) return std::nullopt;
    return t_score(p);
  };

  CoocNetwork::Metadata meta;
  meta.total_tokens = counts.total_tokens();
  meta.half_width = counts.window().half_width;
  meta.root_frequency = counts.frequency(*root_id);
  meta.thresholds = th;

  const std::size_t node_cap = std::min(caps.max_nodes, caps.max_edges + 1);
  std::unordered_map<WordId, int> depth{{*root_id, 0}};
  std::vector<WordId> layer{*root_id};
  for (int d = 1; d <= max_order && !layer.empty() && !meta.truncated; ++d) {
    std::unordered_map<WordId, double> best_t;
    for (const WordId u : layer) {
      for (const auto& nb : counts.neighbors(u)) {
        if (depth.count(nb.id)) continue;
        const auto w = weight_of(u, nb.id);
        if (!w) continue;
        auto [it, inserted] = best_t.emplace(nb.id, *w);
        if (!inserted) it->second = std::max(it->second, *w);
      }
    }
    std::vector<std::pair<WordId, double>> next(best_t.begin(), best_t.end());
    const std::size_t room = node_cap - depth.size();
    if (next.size() > room) {
      std::sort(next.begin(), next.end(), [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second > b.second : a.first < b.first;
      });
      next.resize(room);
      meta.truncated = true;
    }
    layer.clear();
    for (const auto& [id, t] : next) {
      depth.emplace(id, d);
      layer.push_back(id);
    }
    std::sort(layer.begin(), layer.end());
  }

  struct Candidate {
    WordId a, b;
    double weight;
  };
  std::vector<Candidate> found;
  for (const auto& [u, du] : depth) {
    for (const auto& nb : counts.neighbors(u)) {
      if (nb.id <= u || !depth.count(nb.id)) continue;
      if (const auto w = weight_of(u, nb.id)) found.push_back({u, nb.id, quantize_weight(*w)});
    }
  }

  if (found.size() > caps.max_edges) {
    // Keep one strongest edge into the previous layer for every node so
    // depths survive, then fill the budget with the strongest of the rest.
    std::unordered_map<WordId, std::size_t> tree_edge;
    for (std::size_t i = 0; i < found.size(); ++i) {
      const auto& c = found[i];
      const int da = depth.at(c.a);
      const int db = depth.at(c.b);
      if (da == db) continue;
      const WordId child = da > db ? c.a : c.b;
      const WordId parent = da > db ? c.b : c.a;
      const auto [it, inserted] = tree_edge.emplace(child, i);
      if (!inserted) {
        const auto& cur = found[it->second];
        const WordId cur_parent = cur.a == child ? cur.b : cur.a;
        if (c.weight > cur.weight || (c.weight == cur.weight && counts.word(parent) < counts.word(cur_parent))) {
          it->second = i;
        }
      }
    }
    std::vector<bool> keep(found.size(), false);
    for (const auto& [child, i] : tree_edge) keep[i] = true;
    std::vector<std::size_t> rest;
    for (std::size_t i = 0; i < found.size(); ++i) {
      if (!keep[i]) rest.push_back(i);
    }
    std::sort(rest.begin(), rest.end(), [&](std::size_t x, std::size_t y) {
      const auto& a = found[x];
      const auto& b = found[y];
      if (a.weight != b.weight) return a.weight > b.weight;
      return std::tie(a.a, a.b) < std::tie(b.a, b.b);
    });
    const std::size_t budget = caps.max_edges - tree_edge.size();
    for (std::size_t i = 0; i < rest.size() && i < budget; ++i) keep[rest[i]] = true;
    std::vector<Candidate> kept;
    for (std::size_t i = 0; i < found.size(); ++i) {
      if (keep[i]) kept.push_back(found[i]);
    }
    found = std::move(kept);
    meta.truncated = true;
  }

  std::vector<CoocNetwork::Edge> edges;
  edges.reserve(found.size());
  for (const auto& c : found) edges.push_back({counts.word(c.a), counts.word(c.b), c.weight});
  return CoocNetwork::from_edges(root, max_order, std::move(edges), meta);
}

namespace detail {

inline std::string format_weight(double w) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", w);
  return buf;
}

inline std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_space(line[i])) ++i;
    if (i >= line.size()) break;
    std::size_t j = i;
    while (j < line.size() && !is_space(line[j])) ++j;
    out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

inline double parse_real(std::string_view s, std::size_t line) {
  const std::string str(s);
  char* end = nullptr;
  const double v = std::strtod(str.c_str(), &end);
  if (str.empty() || end != str.c_str() + str.size()) throw FormatError(line, 1, "invalid number '" + str + "'");
  return v;
}

}  // namespace detail

/// Deterministic text form. Nodes are listed by (depth, word); edges by the
/// depth of their shallower endpoint, then lexicographically.
inline std::string write_network(const CoocNetwork& net) {
  const auto& m = net.metadata();
  std::ostringstream out;
  out << "ROOT " << net.root() << '\n'
      << "ORDER " << net.max_order() << '\n'
      << "N " << m.total_tokens << '\n'
      << "K " << m.half_width << '\n'
      << "FREQ " << m.root_frequency << '\n'
      << "T_MIN " << detail::format_real(m.thresholds.t_min) << '\n'
      << "MI_MIN " << detail::format_real(m.thresholds.mi_min) << '\n'
      << "TRUNCATED " << (m.truncated ? 1 : 0) << '\n';
  for (const auto& node : net.nodes()) out << "NODE " << node.word << ' ' << node.depth << '\n';
  std::vector<const CoocNetwork::Edge*> edges;
  edges.reserve(net.edge_count());
  for (const auto& e : net.edges()) edges.push_back(&e);
  auto shallow = [&](const CoocNetwork::Edge* e) { return std::min(*net.depth(e->first), *net.depth(e->second)); };
  std::stable_sort(edges.begin(), edges.end(),
                   [&](const auto* a, const auto* b) { return shallow(a) < shallow(b); });
  for (const auto* e : edges) {
    out << "EDGE " << e->first << ' ' << e->second << ' ' << detail::format_weight(e->weight) << '\n';
  }
  return out.str();
}

inline CoocNetwork read_network(std::string_view text) {
  const auto lines = detail::split_lines(text);
  const char* const header_keys[] = {"ROOT", "ORDER", "N", "K", "FREQ", "T_MIN", "MI_MIN", "TRUNCATED"};
  constexpr std::size_t header_size = std::size(header_keys);
  if (lines.size() < header_size) throw FormatError(lines.size() + 1, 1, "truncated network header");
  std::vector<std::string_view> values;
  for (std::size_t i = 0; i < header_size; ++i) {
    const auto fields = detail::split_ws(lines[i]);
    if (fields.size() != 2 || fields[0] != header_keys[i]) {
      throw FormatError(i + 1, 1, std::string("expected header '") + header_keys[i] + " <value>'");
    }
    values.push_back(fields[1]);
  }
  const std::string root(values[0]);
  const auto order = detail::parse_count(values[1], 2, 7);
  CoocNetwork::Metadata meta;
  meta.total_tokens = detail::parse_count(values[2], 3, 3);
  meta.half_width = static_cast<int>(detail::parse_count(values[3], 4, 3));
  meta.root_frequency = detail::parse_count(values[4], 5, 6);
  meta.thresholds.t_min = detail::parse_real(values[5], 6);
  meta.thresholds.mi_min = detail::parse_real(values[6], 7);
  meta.truncated = detail::parse_count(values[7], 8, 11) != 0;

  std::map<std::string, int> claimed;
  std::vector<CoocNetwork::Edge> edges;
  for (std::size_t i = header_size; i < lines.size(); ++i) {
    const auto fields = detail::split_ws(lines[i]);
    if (fields.empty()) continue;
    if (fields[0] == "NODE" && fields.size() == 3) {
      claimed[std::string(fields[1])] = static_cast<int>(detail::parse_count(fields[2], i + 1, 1));
    } else if (fields[0] == "EDGE" && fields.size() == 4) {
      edges.push_back({std::string(fields[1]), std::string(fields[2]), detail::parse_real(fields[3], i + 1)});
    } else {
      throw FormatError(i + 1, 1, "expected 'NODE <word> <depth>' or 'EDGE <w1> <w2> <t>'");
    }
  }

  CoocNetwork net;
  try {
    net = CoocNetwork::from_edges(root, static_cast<int>(order), std::move(edges), meta);
  } catch (const InvalidInput& e) {
    throw FormatError(1, 1, std::string("inconsistent network: ") + e.what());
  }
  if (net.node_count() != claimed.size()) {
    throw FormatError(1, 1, "network lists " + std::to_string(claimed.size()) + " nodes but its edges reach " +
                                std::to_string(net.node_count()));
  }
  for (const auto& node : net.nodes()) {
    const auto it = claimed.find(node.word);
    if (it == claimed.end() || it->second != node.depth) {
      throw FormatError(1, 1, "stated depth of '" + node.word + "' disagrees with its BFS distance");
    }
  }
  return net;
}

}  // namespace lexchoice
