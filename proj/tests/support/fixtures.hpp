#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "citeweave/corpus.hpp"

namespace fixture {

inline std::filesystem::path data(const std::string& rel) { return std::filesystem::path(CITEWEAVE_TEST_DATA) / rel; }

inline std::string read(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

inline void write(const std::filesystem::path& p, const std::string& content) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream(p, std::ios::binary) << content;
}

// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& tag) {
  static std::mt19937_64 rng{std::random_device{}()};
  auto dir = std::filesystem::temp_directory_path() / ("citeweave-" + tag + "-" + std::to_string(rng()));
  std::filesystem::create_directories(dir);
  return dir;
}

inline citeweave::corpus::PaperBundle bundle(int n_citations, const std::string& id = "P1") {
  citeweave::corpus::PaperBundle b;
  b.paper_id = id;
  b.title = "Graph Views of Related Work";
  b.abstract = "We study how CITATION sections are organized.";
  b.introduction = "Writing related work is hard CITATION.";
  b.related_work = "Early systems [1] summarized papers.";
  b.conclusion = "Citation graphs separate human and generated text.";
  for (int i = 1; i <= n_citations; ++i) {
    citeweave::corpus::CitationEntry e;
    e.id = i;
    e.title = "Cited Work " + std::to_string(i);
    e.abstract = "Abstract of cited work " + std::to_string(i) + ".";
    e.authors = {"Author " + std::to_string(i), "Coauthor"};
    e.year = 2000 + i % 24;
    e.url = "https://example.org/paper/" + std::to_string(i);
    b.citations.push_back(e);
  }
  return b;
}

}  // namespace fixture
