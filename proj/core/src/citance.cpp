#include "citeweave/citance.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "citeweave/error.hpp"

namespace citeweave::citance {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

// Byte length of a closing quote/bracket at `i`, or 0.
std::size_t closer_len(std::string_view s, std::size_t i) {
  if (i >= s.size()) return 0;
  const char c = s[i];
  if (c == ')' || c == ']' || c == '"' || c == '\'') return 1;
  // U+201D and U+2019
  if (s.substr(i, 3) == "\xE2\x80\x9D" || s.substr(i, 3) == "\xE2\x80\x99") return 3;
  return 0;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

// A run of whitespace containing two or more newlines.
bool is_blank_line_run(std::string_view s, std::size_t begin, std::size_t end) {
  return std::count(s.begin() + static_cast<std::ptrdiff_t>(begin), s.begin() + static_cast<std::ptrdiff_t>(end),
                    '\n') >= 2;
}

}  // namespace

const std::set<std::string>& default_abbreviations() {
  static const std::set<std::string> kList = {
      "al.",  "e.g.", "i.e.", "cf.",  "vs.",     "viz.",  "fig.",  "figs.", "eq.",   "eqs.",
      "eqn.", "sec.", "secs.", "tab.", "app.",   "ch.",   "no.",   "nos.",  "vol.",  "pp.",
      "p.",   "ref.", "refs.", "approx.", "resp.", "ca.", "dr.",   "prof.", "mr.",   "ms.",
      "mrs.", "st.",  "jr.",  "inc.", "ltd.",    "co.",   "corp.", "dept.", "univ."};
  return kList;
}

Segmenter::Segmenter(std::set<std::string> abbreviations) : abbreviations_(std::move(abbreviations)) {}

const Segmenter& Segmenter::standard() {
  static const Segmenter kStandard(default_abbreviations());
  return kStandard;
}

Segmenter Segmenter::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open abbreviation list " + path.string());
  std::set<std::string> list;
  std::string line;
  while (std::getline(in, line)) {
    std::string_view token = trim(line);
    if (token.empty() || token.front() == '#') continue;
    std::string lowered(token);
    std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    list.insert(std::move(lowered));
  }
  return Segmenter(std::move(list));
}

bool Segmenter::is_abbreviation(std::string_view text, std::size_t dot) const {
  std::size_t start = dot;
  while (start > 0 && !is_space(text[start - 1])) --start;
  std::string token(text.substr(start, dot - start + 1));
  // Leading punctuation such as "(e.g." or "[cf.".
  const auto first = token.find_first_not_of("([{\"'");
  token.erase(0, first == std::string::npos ? token.size() : first);
  std::transform(token.begin(), token.end(), token.begin(), [](unsigned char c) { return std::tolower(c); });
  return abbreviations_.count(token) > 0;
}

std::vector<std::string> Segmenter::split(std::string_view text) const {
  std::vector<std::string> sentences;
  std::size_t start = 0;
  auto emit = [&](std::size_t end) {
    std::string_view s = trim(text.substr(start, end - start));
    if (!s.empty()) sentences.emplace_back(s);
    start = end;
  };

  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (c == '\n') {
      std::size_t j = i;
      while (j < text.size() && is_space(text[j])) ++j;
      if (is_blank_line_run(text, i, j)) {
        emit(i);
        i = j;
        continue;
      }
      ++i;
      continue;
    }
    if (c != '.' && c != '!' && c != '?') {
      ++i;
      continue;
    }
    std::size_t end = i + 1;
    // Collapse "?!" and "..." into one terminator.
    while (end < text.size() && (text[end] == '.' || text[end] == '!' || text[end] == '?')) ++end;
    while (std::size_t n = closer_len(text, end)) end += n;
    if (end < text.size() && !is_space(text[end])) {
      i = end;
      continue;
    }
    std::size_t next = end;
    while (next < text.size() && is_space(text[next])) ++next;
    const bool at_end = next >= text.size();
    const bool lowercase_follows = !at_end && std::islower(static_cast<unsigned char>(text[next]));
    const bool abbreviation = c == '.' && end == i + 1 && is_abbreviation(text, i);
    if (at_end || (!lowercase_follows && !abbreviation) || is_blank_line_run(text, end, next)) {
      emit(end);
    }
    i = end;
  }
  emit(text.size());
  return sentences;
}

std::vector<std::string> segment_sentences(std::string_view text) { return Segmenter::standard().split(text); }

std::set<int> extract_citations(std::string_view s) {
  std::set<int> ids;
  std::size_t i = 0;
  while ((i = s.find('[', i)) != std::string_view::npos) {
    const std::size_t close = s.find(']', i + 1);
    if (close == std::string_view::npos) break;
    if (const std::size_t inner_open = s.rfind('[', close); inner_open > i) {
      i = inner_open;
      continue;
    }
    std::string_view inner = s.substr(i + 1, close - i - 1);
    std::vector<int> found;
    bool ok = true;
    std::size_t p = 0;
    bool expect_number = true;
    while (p < inner.size() && ok) {
      const char c = inner[p];
      if (c == ' ') {
        ++p;
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        if (!expect_number) ok = false;
        std::size_t q = p;
        while (q < inner.size() && std::isdigit(static_cast<unsigned char>(inner[q]))) ++q;
        if (q - p > 9) ok = false;
        else found.push_back(std::stoi(std::string(inner.substr(p, q - p))));
        p = q;
        expect_number = false;
      } else if (!expect_number && (c == ',' || c == ';' || c == '-')) {
        ++p;
        expect_number = true;
      } else if (!expect_number && (inner.substr(p, 3) == "\xE2\x80\x93" || inner.substr(p, 3) == "\xE2\x80\x94")) {
        p += 3;
        expect_number = true;
      } else {
        ok = false;
      }
    }
    if (ok && !expect_number) {
      for (int id : found) {
        if (id > 0) ids.insert(id);
      }
    }
    i = close + 1;
  }
  return ids;
}

ParsedSection parse_section(std::string_view text, const std::optional<std::set<int>>& known_ids,
                            const Segmenter& segmenter) {
  ParsedSection out;
  const auto sentences = segmenter.split(text);
  for (std::size_t k = 0; k < sentences.size(); ++k) {
    Citance c{k, sentences[k], {}};
    for (int id : extract_citations(sentences[k])) {
      if (known_ids && known_ids->count(id) == 0) {
        out.unknown_ids.insert(id);
      } else {
        c.citation_ids.insert(id);
      }
    }
    out.citances.push_back(std::move(c));
  }
  return out;
}

nlohmann::json to_json(const std::vector<Citance>& citances) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : citances) {
    nlohmann::json item;
    item["index"] = c.index;
    item["text"] = c.text;
    item["citation_ids"] = c.citation_ids;
    arr.push_back(item);
  }
  return arr;
}

std::vector<Citance> citances_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw Error("citances: expected a JSON array");
  std::vector<Citance> out;
  for (std::size_t k = 0; k < j.size(); ++k) {
    const auto& item = j[k];
    const std::string where = "citances[" + std::to_string(k) + "]";
    if (!item.is_object() || !item.contains("citation_ids") || !item["citation_ids"].is_array()) {
      throw Error(where + ": expected {\"index\", \"text\", \"citation_ids\"}");
    }
    Citance c;
    c.index = item.value("index", k);
    c.text = item.value("text", std::string());
    for (const auto& id : item["citation_ids"]) {
      if (!id.is_number_integer() || id.get<int>() < 1) throw Error(where + ": citation ids must be positive integers");
      c.citation_ids.insert(id.get<int>());
    }
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace citeweave::citance
