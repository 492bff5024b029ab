#pragma once

// Units of the generalized vector space: named-entity triple patterns,
// lexicon-word features and plain keywords.

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <type_traits>
#include <variant>

namespace semsearch {

/// (name/class/id) pattern. Absent fields are wildcards; at least one field
/// is bound. Names are stored normalized (lowercase, single spaces).
struct NETriple {
  std::optional<std::string> name;
  std::optional<std::string> class_id;
  std::optional<std::string> entity_id;
  auto operator<=>(const NETriple&) const = default;
};

struct WWSense {
  std::string synset_id;
  auto operator<=>(const WWSense&) const = default;
};

struct WWForm {
  std::string form;
  auto operator<=>(const WWForm&) const = default;
};

struct WWPair {
  std::string form;
  std::string synset_id;
  auto operator<=>(const WWPair&) const = default;
};

struct Keyword {
  std::string stem;
  auto operator<=>(const Keyword&) const = default;
};

struct GeneralizedTerm {
  std::variant<NETriple, WWSense, WWForm, WWPair, Keyword> value;

  GeneralizedTerm() = default;
  template <typename T>
    requires std::is_constructible_v<decltype(value), T>
  GeneralizedTerm(T v) : value(std::move(v)) {}  // NOLINT(google-explicit-constructor)

  /// Canonical key: "ne:{name|*}/{class|*}/{id|*}", "ws:{id}", "wf:{form}",
  /// "wp:{form}/{id}", "kw:{stem}". '%', '/' and '*' inside a field are
  /// percent-escaped so the mapping stays injective.
  std::string serialize() const;

  auto operator<=>(const GeneralizedTerm&) const = default;
};

/// Multiset of terms with (possibly weighted) multiplicities.
using TermBag = std::map<GeneralizedTerm, double>;

NETriple ne_triple(std::optional<std::string> name, std::optional<std::string> class_id,
                   std::optional<std::string> entity_id);

}  // namespace semsearch
