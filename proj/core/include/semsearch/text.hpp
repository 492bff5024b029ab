#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace semsearch {

struct Token {
  std::string surface;  // lowercased
  std::string lemma;
  bool is_stop = false;
  std::size_t sentence = 0;
};

/// Stop-word list plus surface->lemma dictionary. Tokens split on
/// non-alphanumeric ASCII; bytes >= 0x80 are kept inside tokens so UTF-8
/// words survive intact. '.', '!' and '?' end a sentence.
class Lexicon {
 public:
  Lexicon() = default;
  Lexicon(std::unordered_set<std::string> stop_words,
          std::unordered_map<std::string, std::string> lemmas);

  /// Stop-word file: one token per line. Lemma file: surface<TAB>lemma.
  static Lexicon load(const std::filesystem::path& stop_words, const std::filesystem::path& lemmas);

  std::vector<Token> tokenize(std::string_view text) const;
  /// Lemmas of the non-stop tokens, in order.
  std::vector<std::string> tokenize_and_filter(std::string_view text) const;

  std::string lemma(std::string_view lowercase_token) const;
  bool is_stop_word(std::string_view lowercase_token) const;

 private:
  std::unordered_set<std::string> stop_words_;
  std::unordered_map<std::string, std::string> lemmas_;
};

}  // namespace semsearch
