#include "semsearch/generalized_term.hpp"

#include <stdexcept>

#include "semsearch/ontology_store.hpp"

namespace semsearch {

namespace {

std::string escape(const std::string& field) {
  std::string out;
  out.reserve(field.size());
  for (char c : field) {
    switch (c) {
      case '%': out += "%25"; break;
      case '/': out += "%2F"; break;
      case '*': out += "%2A"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string slot(const std::optional<std::string>& field) { return field ? escape(*field) : "*"; }

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

}  // namespace

NETriple ne_triple(std::optional<std::string> name, std::optional<std::string> class_id,
                   std::optional<std::string> entity_id) {
  if (!name && !class_id && !entity_id) throw std::invalid_argument("NE triple with no bound field");
  if (name) name = normalize_name(*name);
  return NETriple{std::move(name), std::move(class_id), std::move(entity_id)};
}

std::string GeneralizedTerm::serialize() const {
  return std::visit(overloaded{
                        [](const NETriple& t) {
                          return "ne:" + slot(t.name) + "/" + slot(t.class_id) + "/" + slot(t.entity_id);
                        },
                        [](const WWSense& t) { return "ws:" + escape(t.synset_id); },
                        [](const WWForm& t) { return "wf:" + escape(t.form); },
                        [](const WWPair& t) { return "wp:" + escape(t.form) + "/" + escape(t.synset_id); },
                        [](const Keyword& t) { return "kw:" + escape(t.stem); },
                    },
                    value);
}

}  // namespace semsearch
