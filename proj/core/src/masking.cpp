#include "citeweave/masking.hpp"

#include <algorithm>
#include <array>
#include <optional>

namespace citeweave::corpus {

namespace {

struct Region {
  std::size_t begin = 0;
  std::size_t end = 0;  // exclusive
  int markers = 0;
};

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }
bool is_lower(char c) { return c >= 'a' && c <= 'z'; }
bool is_utf8_lead(char c) { return static_cast<unsigned char>(c) >= 0xC0; }
bool is_utf8_byte(char c) { return static_cast<unsigned char>(c) >= 0x80; }

// Length of a range separator ("-", ",", ";", en/em dash) at `i`, or 0.
std::size_t separator_len(std::string_view s, std::size_t i) {
  if (i >= s.size()) return 0;
  if (s[i] == ',' || s[i] == ';' || s[i] == '-') return 1;
  if (s.substr(i, 3) == "\xE2\x80\x93" || s.substr(i, 3) == "\xE2\x80\x94") return 3;
  return 0;
}

std::size_t skip_spaces(std::string_view s, std::size_t i) {
  while (i < s.size() && s[i] == ' ') ++i;
  return i;
}

// "[12]", "[3, 4]", "[1-3]". Returns the end position and number count.
std::optional<std::pair<std::size_t, int>> bracket_atom(std::string_view s, std::size_t i) {
  if (i >= s.size() || s[i] != '[') return std::nullopt;
  std::size_t p = skip_spaces(s, i + 1);
  int count = 0;
  while (true) {
    std::size_t digits = 0;
    while (p < s.size() && is_digit(s[p])) ++p, ++digits;
    if (digits == 0 || digits > 9) return std::nullopt;
    ++count;
    p = skip_spaces(s, p);
    if (p < s.size() && s[p] == ']') return std::make_pair(p + 1, count);
    const std::size_t sep = separator_len(s, p);
    if (sep == 0) return std::nullopt;
    p = skip_spaces(s, p + sep);
  }
}

// Adjacent bracket atoms joined by spaces or one separator form one run.
std::optional<Region> bracket_run(std::string_view s, std::size_t i) {
  auto first = bracket_atom(s, i);
  if (!first) return std::nullopt;
  Region r{i, first->first, first->second};
  while (true) {
    std::size_t p = skip_spaces(s, r.end);
    p = skip_spaces(s, p + separator_len(s, p));
    auto next = bracket_atom(s, p);
    if (!next) break;
    r.end = next->first;
    r.markers += next->second;
  }
  return r;
}

constexpr std::array<std::string_view, 12> kNameParticles = {
    "van", "von", "de", "der", "den", "da", "di", "du", "le", "la", "del", "dos"};

std::size_t name_token(std::string_view s, std::size_t i) {
  if (i >= s.size() || !(is_upper(s[i]) || is_utf8_lead(s[i]))) return 0;
  std::size_t p = i + 1;
  while (p < s.size() && (is_upper(s[p]) || is_lower(s[p]) || is_utf8_byte(s[p]) || s[p] == '-' ||
                          s[p] == '\'')) {
    ++p;
  }
  return p - i;
}

std::size_t particle(std::string_view s, std::size_t i) {
  for (auto word : kNameParticles) {
    if (s.substr(i, word.size()) == word && i + word.size() < s.size() && s[i + word.size()] == ' ') {
      return word.size() + 1;
    }
  }
  return 0;
}

// One surname, possibly preceded by particles ("van der Maaten").
std::size_t surname(std::string_view s, std::size_t i) {
  std::size_t p = i;
  while (std::size_t part = particle(s, p)) p += part;
  const std::size_t n = name_token(s, p);
  if (n == 0 || s.substr(p, n).starts_with(kCitationToken)) return 0;
  p += n;
  // Multi-word surnames: "Abu Raed".
  while (p < s.size() && s[p] == ' ') {
    const std::size_t more = name_token(s, p + 1);
    if (more == 0 || s.substr(p + 1, more).starts_with(kCitationToken)) break;
    p += 1 + more;
  }
  return p - i;
}

// "Name, 2021", "Name et al., 2021", "Name and Other 2020a".
bool is_author_year(std::string_view s) {
  std::size_t p = surname(s, 0);
  if (p == 0) return false;
  for (std::string_view joiner : {std::string_view(" and "), std::string_view(" & ")}) {
    if (s.substr(p, joiner.size()) == joiner) {
      const std::size_t n = surname(s, p + joiner.size());
      if (n == 0) return false;
      p += joiner.size() + n;
      break;
    }
  }
  if (s.substr(p, 7) == " et al.") p += 7;
  if (p < s.size() && s[p] == ',') ++p;
  const std::size_t year_start = skip_spaces(s, p);
  if (year_start == p) return false;
  p = year_start;
  for (int k = 0; k < 4; ++k, ++p) {
    if (p >= s.size() || !is_digit(s[p])) return false;
  }
  if (s[year_start] != '1' && s[year_start] != '2') return false;
  if (p < s.size() && is_lower(s[p])) ++p;
  return p == s.size();
}

std::pair<std::size_t, std::size_t> trimmed(std::string_view s, std::size_t b, std::size_t e) {
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return {b, e};
}

// Counts markers if the whole part is a bracket run or an author-year item.
std::optional<int> citation_part(std::string_view part) {
  if (part.empty()) return std::nullopt;
  if (part.front() == '[') {
    auto run = bracket_run(part, 0);
    if (run && run->end == part.size()) return run->markers;
    return std::nullopt;
  }
  if (is_author_year(part)) return 1;
  return std::nullopt;
}

constexpr std::array<std::string_view, 6> kLeadIns = {"e.g., ", "e.g. ", "i.e., ",
                                                      "cf. ",   "see ",  "see also "};

void scan_parentheticals(std::string_view s, std::vector<Region>& out) {
  std::size_t i = 0;
  while ((i = s.find('(', i)) != std::string_view::npos) {
    const std::size_t close = s.find(')', i + 1);
    if (close == std::string_view::npos) break;
    const std::size_t nested = s.find('(', i + 1);
    if (nested < close) {
      i = nested;
      continue;
    }
    // Split the inner text on ';' and classify each part.
    std::vector<std::pair<std::size_t, std::size_t>> parts;
    std::size_t b = i + 1;
    for (std::size_t k = i + 1; k <= close; ++k) {
      if (k == close || s[k] == ';') {
        parts.push_back(trimmed(s, b, k));
        b = k + 1;
      }
    }
    int total = 0;
    bool all = true;
    for (auto [pb, pe] : parts) {
      auto m = citation_part(s.substr(pb, pe - pb));
      if (!m) {
        all = false;
        break;
      }
      total += *m;
    }
    if (all) {
      out.push_back(Region{i, close + 1, total});
    } else {
      for (auto [pb, pe] : parts) {
        std::size_t start = pb;
        for (auto lead : kLeadIns) {
          if (s.substr(start, lead.size()) == lead) {
            start += lead.size();
            break;
          }
        }
        if (start < pe && is_author_year(s.substr(start, pe - start))) {
          out.push_back(Region{start, pe, 1});
        }
      }
    }
    i = close + 1;
  }
}

}  // namespace

MaskResult mask_citations(std::string_view text) {
  std::vector<Region> regions;
  scan_parentheticals(text, regions);
  std::sort(regions.begin(), regions.end(),
            [](const Region& a, const Region& b) { return a.begin < b.begin; });

  // Bracket runs outside the regions already claimed by parentheticals.
  std::vector<Region> brackets;
  std::size_t claimed = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    while (claimed < regions.size() && regions[claimed].end <= i) ++claimed;
    if (claimed < regions.size() && regions[claimed].begin <= i) {
      i = regions[claimed].end - 1;
      continue;
    }
    if (text[i] != '[') continue;
    if (auto run = bracket_run(text, i)) {
      brackets.push_back(*run);
      i = run->end - 1;
    }
  }
  regions.insert(regions.end(), brackets.begin(), brackets.end());
  std::sort(regions.begin(), regions.end(),
            [](const Region& a, const Region& b) { return a.begin < b.begin; });

  MaskResult result;
  std::size_t cursor = 0;
  for (const Region& r : regions) {
    result.text.append(text.substr(cursor, r.begin - cursor));
    result.text.append(kCitationToken);
    result.spans.push_back(
        MaskedSpan{r.begin, r.end - r.begin, std::string(text.substr(r.begin, r.end - r.begin)), r.markers});
    cursor = r.end;
  }
  result.text.append(text.substr(cursor));
  return result;
}

std::string restore_citations(std::string_view masked, const std::vector<MaskedSpan>& spans) {
  std::string out;
  std::size_t cursor = 0;  // position in `masked`
  std::size_t shift = 0;   // original offset minus masked offset, so far
  for (const auto& span : spans) {
    const std::size_t at = span.offset - shift;
    out.append(masked.substr(cursor, at - cursor));
    out.append(span.original);
    cursor = at + kCitationToken.size();
    shift += span.length;
    shift -= kCitationToken.size();
  }
  out.append(masked.substr(cursor));
  return out;
}

}  // namespace citeweave::corpus
