#include "semsearch/text.hpp"

#include <cctype>
#include <fstream>

#include "semsearch/error.hpp"
#include "semsearch/ontology_store.hpp"

namespace semsearch {

namespace {

bool is_token_char(unsigned char c) { return std::isalnum(c) || c >= 0x80; }

std::string trim(std::string s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  std::size_t i = 0;
  while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  return s.substr(i);
}

}  // namespace

Lexicon::Lexicon(std::unordered_set<std::string> stop_words,
                 std::unordered_map<std::string, std::string> lemmas)
    : stop_words_(std::move(stop_words)), lemmas_(std::move(lemmas)) {}

Lexicon Lexicon::load(const std::filesystem::path& stop_words, const std::filesystem::path& lemmas) {
  std::unordered_set<std::string> stops;
  {
    std::ifstream in(stop_words);
    if (!in) throw DataError("cannot open " + stop_words.string());
    std::string line;
    while (std::getline(in, line)) {
      line = normalize_name(trim(line));
      if (!line.empty() && line.front() != '#') stops.insert(line);
    }
  }
  std::unordered_map<std::string, std::string> lemma_map;
  {
    std::ifstream in(lemmas);
    if (!in) throw DataError("cannot open " + lemmas.string());
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      line = trim(line);
      if (line.empty() || line.front() == '#') continue;
      auto tab = line.find('\t');
      if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos)
        throw ParseError(lemmas.string(), line_no, "expected surface<TAB>lemma");
      auto surface = normalize_name(line.substr(0, tab));
      auto lemma = normalize_name(line.substr(tab + 1));
      if (surface.empty() || lemma.empty()) throw ParseError(lemmas.string(), line_no, "empty field");
      lemma_map[surface] = lemma;
    }
  }
  return Lexicon(std::move(stops), std::move(lemma_map));
}

std::vector<Token> Lexicon::tokenize(std::string_view text) const {
  std::vector<Token> tokens;
  std::size_t sentence = 0;
  std::string current;
  auto flush = [&] {
    if (current.empty()) return;
    Token t;
    t.lemma = lemma(current);
    t.is_stop = is_stop_word(current) || is_stop_word(t.lemma);
    t.surface = std::move(current);
    t.sentence = sentence;
    tokens.push_back(std::move(t));
    current.clear();
  };
  for (unsigned char c : text) {
    if (is_token_char(c)) {
      current.push_back(static_cast<char>(std::tolower(c)));
      continue;
    }
    flush();
    if ((c == '.' || c == '!' || c == '?') && !tokens.empty() && tokens.back().sentence == sentence)
      ++sentence;
  }
  flush();
  return tokens;
}

std::vector<std::string> Lexicon::tokenize_and_filter(std::string_view text) const {
  std::vector<std::string> out;
  for (auto& t : tokenize(text))
    if (!t.is_stop) out.push_back(std::move(t.lemma));
  return out;
}

std::string Lexicon::lemma(std::string_view lowercase_token) const {
  auto it = lemmas_.find(std::string(lowercase_token));
  return it == lemmas_.end() ? std::string(lowercase_token) : it->second;
}

bool Lexicon::is_stop_word(std::string_view lowercase_token) const {
  return stop_words_.contains(std::string(lowercase_token));
}

}  // namespace semsearch
