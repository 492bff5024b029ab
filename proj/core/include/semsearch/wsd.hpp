#pragma once

// Knowledge-based word sense disambiguation: personalized PageRank over the
// synset relation graph, with equal-rank senses collapsed onto their most
// specific common hypernym.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "semsearch/ontology_store.hpp"

namespace semsearch {

struct PprConfig {
  double damping = 0.85;
  int max_iterations = 100;
  double epsilon = 1e-9;            // L1 convergence tolerance
  double tie_ratio = 1.0 + 1e-6;    // top/second ratio at or below which senses tie
  int context_window = 0;           // token radius; 0 means the whole sentence

  void validate() const;  // throws std::invalid_argument
};

/// Undirected, unweighted graph over every synset. One edge per unordered
/// pair linked by a hypernym/hyponym, holonym, meronym or similarity edge.
class SenseGraph {
 public:
  static SenseGraph build(const OntologyStore& store);

  std::size_t node_count() const { return ids_.size(); }
  std::size_t edge_count() const { return edge_count_; }
  const std::string& id(std::size_t node) const { return ids_[node]; }
  std::optional<std::size_t> index_of(std::string_view synset_id) const;
  std::span<const std::uint32_t> neighbors(std::size_t node) const {
    return {adjacency_.data() + offsets_[node], adjacency_.data() + offsets_[node + 1]};
  }

 private:
  std::vector<std::string> ids_;  // sorted
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::size_t> offsets_;
  std::vector<std::uint32_t> adjacency_;
  std::size_t edge_count_ = 0;
};

/// Power iteration of v <- (1-d) t + d W v with W column-stochastic; the
/// mass sitting on isolated nodes is returned through the teleport vector.
/// Throws std::invalid_argument for a negative teleport entry or one that
/// does not sum to 1 within 1e-12.
std::vector<double> personalized_pagerank(const SenseGraph& graph, std::span<const double> teleport,
                                          const PprConfig& config);

struct Resolved {
  std::string synset_id;
};

/// Senses within tie_ratio of the top score. `msc` is empty when the tied
/// senses share no hypernym.
struct Tied {
  std::vector<std::string> senses;
  std::optional<std::string> msc;
};

struct Unresolved {};

struct DisambiguationResult {
  std::string form;
  std::vector<std::pair<std::string, double>> ranked;  // score descending, id ascending
  std::variant<Resolved, Tied, Unresolved> outcome;
};

/// Ranks the senses of `target_form` by PPR with teleport mass spread
/// uniformly over the synsets of the context forms (the target's own senses
/// excluded). With no usable context the teleport is uniform over all nodes.
/// Throws UnknownIdError when the form has no synsets.
DisambiguationResult disambiguate(std::span<const std::string> context_forms,
                                  std::string_view target_form, const SenseGraph& graph,
                                  const OntologyStore& store, const PprConfig& config);

}  // namespace semsearch
