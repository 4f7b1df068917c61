#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "citeweave/citance.hpp"
#include "fixtures.hpp"

using namespace citeweave::citance;
using nlohmann::json;

namespace {
const std::string kProgress =
    "Progress has been reported in using PLMs to perform reasoning tasks, including arithmetic ([11]; [12]), "
    "commonsense ([13], [14]; [12]), logical ([15]) and symbolic reasoning ([12]).";
}

TEST(Segment, TwoFullSentences) {
  EXPECT_EQ(segment_sentences("Graphs help. Models differ."),
            (std::vector<std::string>{"Graphs help.", "Models differ."}));
}

TEST(Segment, EtAlDoesNotEndSentence) {
  EXPECT_EQ(segment_sentences("Smith et al. [3] show X. We differ."),
            (std::vector<std::string>{"Smith et al. [3] show X.", "We differ."}));
}

TEST(Segment, EmptyAndWhitespace) {
  EXPECT_TRUE(segment_sentences("").empty());
  EXPECT_TRUE(segment_sentences("  \n\n ").empty());
}

TEST(Segment, TerminalFragment) {
  EXPECT_EQ(segment_sentences("One. two"), (std::vector<std::string>{"One. two"}));
  EXPECT_EQ(segment_sentences("One. Two"), (std::vector<std::string>{"One.", "Two"}));
}

TEST(Segment, BlankLineIsAHardBreak) {
  EXPECT_EQ(segment_sentences("Heading\n\nBody text here."),
            (std::vector<std::string>{"Heading", "Body text here."}));
}

TEST(Segment, GoldenFixture) {
  const auto text = fixture::read(fixture::data("fixtures/segmentation_input.txt"));
  const auto expected =
      json::parse(fixture::read(fixture::data("golden/segmentation_expected.json"))).get<std::vector<std::string>>();
  ASSERT_EQ(expected.size(), 30u);
  EXPECT_EQ(segment_sentences(text), expected);
}

TEST(Segment, ShippedAbbreviationFileMatchesBuiltIn) {
  const auto from_file = Segmenter::from_file(CITEWEAVE_ABBREVIATIONS);
  EXPECT_EQ(from_file.abbreviations(), default_abbreviations());
}

TEST(Segment, CustomAbbreviations) {
  const Segmenter seg({"approx."});
  EXPECT_EQ(seg.split("See Fig. 2 now.").size(), 2u);
  EXPECT_EQ(Segmenter::standard().split("See Fig. 2 now.").size(), 1u);
}

TEST(Segment, AppendingNeverChangesThePrefix) {
  const auto sentences =
      json::parse(fixture::read(fixture::data("golden/segmentation_expected.json"))).get<std::vector<std::string>>();
  std::string text;
  for (std::size_t k = 0; k + 1 < sentences.size(); ++k) {
    text += (k ? " " : "") + sentences[k];
    const auto before = segment_sentences(text);
    const auto after = segment_sentences(text + " " + sentences[k + 1]);
    ASSERT_GE(after.size(), before.size());
    EXPECT_TRUE(std::equal(before.begin(), before.end(), after.begin())) << k;
  }
}

TEST(Extract, TableThreeSentence) {
  EXPECT_EQ(extract_citations(kProgress), (std::set<int>{11, 12, 13, 14, 15}));
}

TEST(Extract, EmptyAndDuplicates) {
  EXPECT_TRUE(extract_citations("No citations.").empty());
  EXPECT_EQ(extract_citations("[2] extends [2]."), std::set<int>{2});
}

TEST(Extract, ListsAndRangesAreNotExpanded) {
  EXPECT_EQ(extract_citations("see [3, 4] and [7; 9]"), (std::set<int>{3, 4, 7, 9}));
  EXPECT_EQ(extract_citations("[1]-[3]"), (std::set<int>{1, 3}));
  EXPECT_EQ(extract_citations("[1-3]"), (std::set<int>{1, 3}));
  EXPECT_EQ(extract_citations("[1–3]"), (std::set<int>{1, 3}));
}

TEST(Extract, MalformedBracketsIgnored) {
  EXPECT_TRUE(extract_citations("x[i] [a1] [1,] [,2] [0] [ ] [1 2] [").empty());
  EXPECT_EQ(extract_citations("[[5]]"), std::set<int>{5});
}

TEST(Extract, OrderInsensitive) {
  std::vector<std::string> markers = {"[4]", "[9]", "[1]", "[12]", "[7]"};
  std::mt19937 rng(3);
  for (int round = 0; round < 50; ++round) {
    std::shuffle(markers.begin(), markers.end(), rng);
    std::string s = "Text";
    for (const auto& m : markers) s += " " + m;
    EXPECT_EQ(extract_citations(s), (std::set<int>{1, 4, 7, 9, 12}));
  }
}

TEST(Parse, TableThreeParagraph) {
  const auto text = fixture::read(fixture::data("fixtures/knowledge_reasoning.txt"));
  std::set<int> known;
  for (int i = 1; i <= 25; ++i) known.insert(i);
  const auto parsed = parse_section(text, known);
  ASSERT_EQ(parsed.citances.size(), 5u);
  std::set<int> all;
  for (const auto& c : parsed.citances) all.insert(c.citation_ids.begin(), c.citation_ids.end());
  EXPECT_EQ(all, (std::set<int>{11, 12, 13, 14, 15, 16, 17, 18, 19, 20}));
  EXPECT_EQ(parsed.citances[1].citation_ids, (std::set<int>{11, 12, 13, 14, 15}));
  EXPECT_EQ(parsed.citances[2].citation_ids, (std::set<int>{12, 14, 16}));
  EXPECT_TRUE(parsed.unknown_ids.empty());
}

TEST(Parse, UnknownIdsAreRoutedAside) {
  const auto parsed = parse_section("Both [1] and [99] agree. Only [2] here.", std::set<int>{1, 2});
  EXPECT_EQ(parsed.unknown_ids, std::set<int>{99});
  EXPECT_EQ(parsed.citances[0].citation_ids, std::set<int>{1});
  EXPECT_EQ(parsed.citances[1].citation_ids, std::set<int>{2});
}

TEST(Parse, Empty) {
  const auto parsed = parse_section("", std::set<int>{1});
  EXPECT_TRUE(parsed.citances.empty());
  EXPECT_TRUE(parsed.unknown_ids.empty());
}

TEST(Parse, WithoutKnownIdsEverythingCounts) {
  EXPECT_TRUE(parse_section("A [99] b.").unknown_ids.empty());
}

TEST(Parse, ReconstructsInputModuloWhitespace) {
  const auto text = fixture::read(fixture::data("fixtures/segmentation_input.txt"));
  auto squash = [](const std::string& s) {
    std::string out;
    for (char c : s)
      if (!std::isspace(static_cast<unsigned char>(c))) out += c;
    return out;
  };
  std::string joined;
  for (const auto& c : parse_section(text).citances) joined += c.text;
  EXPECT_EQ(squash(joined), squash(text));
}

TEST(Parse, JsonRoundTrip) {
  const auto parsed = parse_section("A [1] b [2]. C [3].");
  const auto j = to_json(parsed.citances);
  EXPECT_EQ(j[0]["citation_ids"], json::array({1, 2}));
  EXPECT_EQ(citances_from_json(j), parsed.citances);
}
