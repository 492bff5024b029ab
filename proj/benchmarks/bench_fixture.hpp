#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <string>

#include "engine.hpp"

inline const semsearch::app::Engine& bench_engine(const std::string& preset) {
  static const auto settings =
      semsearch::app::Settings::load(std::filesystem::path(SEMSEARCH_FIXTURE_DIR) / "config.json");
  static std::map<std::string, std::unique_ptr<semsearch::app::Engine>> engines;
  auto& e = engines[preset];
  if (!e) e = std::make_unique<semsearch::app::Engine>(settings, settings.apply(semsearch::app::preset(preset)));
  return *e;
}

inline const std::vector<semsearch::app::CorpusDoc>& bench_corpus() {
  static const auto docs = semsearch::app::load_corpus(std::filesystem::path(SEMSEARCH_FIXTURE_DIR) / "corpus.jsonl");
  return docs;
}

inline const std::vector<semsearch::app::Topic>& bench_topics() {
  static const auto topics = semsearch::app::load_topics(std::filesystem::path(SEMSEARCH_FIXTURE_DIR) / "topics.jsonl");
  return topics;
}
