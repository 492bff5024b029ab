#include "semsearch/wsd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

#include "semsearch/error.hpp"

namespace semsearch {

void PprConfig::validate() const {
  if (!(damping > 0.0 && damping < 1.0)) throw std::invalid_argument("damping must lie in (0,1)");
  if (max_iterations < 1) throw std::invalid_argument("max_iterations must be positive");
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  if (!(tie_ratio >= 1.0)) throw std::invalid_argument("tie_ratio must be >= 1");
  if (context_window < 0) throw std::invalid_argument("context_window must be >= 0");
}

SenseGraph SenseGraph::build(const OntologyStore& store) {
  SenseGraph g;
  for (const auto& s : store.synsets()) g.ids_.push_back(s.id);
  std::sort(g.ids_.begin(), g.ids_.end());
  for (std::size_t i = 0; i < g.ids_.size(); ++i) g.index_.emplace(g.ids_[i], i);

  std::set<std::pair<std::uint32_t, std::uint32_t>> edges;
  auto link = [&](const std::string& a, const std::string& b) {
    auto ia = static_cast<std::uint32_t>(g.index_.at(a));
    auto ib = static_cast<std::uint32_t>(g.index_.at(b));
    if (ia == ib) return;
    edges.emplace(std::min(ia, ib), std::max(ia, ib));
  };
  for (const auto& s : store.synsets()) {
    for (const auto& h : s.hypernym_ids) link(s.id, h);
    for (const auto& [type, target] : s.other_edges) link(s.id, target);
  }
  g.edge_count_ = edges.size();

  std::vector<std::vector<std::uint32_t>> adj(g.ids_.size());
  for (const auto& [a, b] : edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  g.offsets_.assign(1, 0);
  for (auto& list : adj) {
    std::sort(list.begin(), list.end());
    g.adjacency_.insert(g.adjacency_.end(), list.begin(), list.end());
    g.offsets_.push_back(g.adjacency_.size());
  }
  return g;
}

std::optional<std::size_t> SenseGraph::index_of(std::string_view synset_id) const {
  auto it = index_.find(std::string(synset_id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<double> personalized_pagerank(const SenseGraph& graph, std::span<const double> teleport,
                                          const PprConfig& config) {
  config.validate();
  const std::size_t n = graph.node_count();
  if (n == 0) throw std::invalid_argument("personalized_pagerank on an empty graph");
  if (teleport.size() != n) throw std::invalid_argument("teleport size does not match the graph");
  double total = 0.0;
  for (double t : teleport) {
    if (!(t >= 0.0)) throw std::invalid_argument("teleport has a negative entry");
    total += t;
  }
  if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("teleport does not sum to 1");

  std::vector<double> rank(teleport.begin(), teleport.end());
  std::vector<double> next(n);
  const double d = config.damping;
  for (int iter = 0; iter < config.max_iterations; ++iter) {
    double dangling = 0.0;
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      auto nbrs = graph.neighbors(j);
      if (nbrs.empty()) {
        dangling += rank[j];
        continue;
      }
      const double share = rank[j] / static_cast<double>(nbrs.size());
      for (auto i : nbrs) next[i] += share;
    }
    double delta = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double v = (1.0 - d) * teleport[i] + d * (next[i] + dangling * teleport[i]);
      delta += std::abs(v - rank[i]);
      next[i] = v;
    }
    rank.swap(next);
    if (delta < config.epsilon) break;
  }
  // Renormalize away the rounding drift accumulated across iterations.
  const double sum = std::accumulate(rank.begin(), rank.end(), 0.0);
  for (auto& v : rank) v /= sum;
  return rank;
}

DisambiguationResult disambiguate(std::span<const std::string> context_forms,
                                  std::string_view target_form, const SenseGraph& graph,
                                  const OntologyStore& store, const PprConfig& config) {
  const auto candidates = store.synsets_for_form(target_form);
  if (candidates.empty())
    throw UnknownIdError("no synsets for form '" + std::string(target_form) + "'");

  DisambiguationResult result;
  result.form = normalize_name(target_form);
  if (candidates.size() == 1) {
    result.ranked.emplace_back(candidates.front()->id, 1.0);
    result.outcome = Resolved{candidates.front()->id};
    return result;
  }

  std::set<std::size_t> own;
  for (const auto* s : candidates) own.insert(*graph.index_of(s->id));
  std::set<std::size_t> seeds;
  for (const auto& form : context_forms)
    for (const auto* s : store.synsets_for_form(form))
      if (auto i = graph.index_of(s->id); i && !own.contains(*i)) seeds.insert(*i);

  std::vector<double> teleport(graph.node_count(), 0.0);
  if (seeds.empty()) {
    std::fill(teleport.begin(), teleport.end(), 1.0 / static_cast<double>(graph.node_count()));
  } else {
    for (auto i : seeds) teleport[i] = 1.0 / static_cast<double>(seeds.size());
  }
  const auto scores = personalized_pagerank(graph, teleport, config);

  for (const auto* s : candidates) result.ranked.emplace_back(s->id, scores[*graph.index_of(s->id)]);
  std::sort(result.ranked.begin(), result.ranked.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });

  const double top = result.ranked[0].second;
  if (top > config.tie_ratio * result.ranked[1].second) {
    result.outcome = Resolved{result.ranked[0].first};
    return result;
  }
  Tied tied;
  for (const auto& [id, score] : result.ranked)
    if (score * config.tie_ratio >= top) tied.senses.push_back(id);
  std::sort(tied.senses.begin(), tied.senses.end());
  try {
    tied.msc = store.msc_hypernym(tied.senses);
  } catch (const NoCommonHypernymError&) {
    tied.msc.reset();
  }
  result.outcome = std::move(tied);
  return result;
}

}  // namespace semsearch
