#include <gtest/gtest.h>

#include <random>

#include "citeweave/masking.hpp"
#include <nlohmann/json.hpp>

#include "fixtures.hpp"

using namespace citeweave::corpus;
using nlohmann::json;

TEST(Mask, AuthorYear) {
  const auto r = mask_citations("growth rate (Bornmann, 2021) shows");
  EXPECT_EQ(r.text, "growth rate CITATION shows");
  ASSERT_EQ(r.spans.size(), 1u);
  EXPECT_EQ(r.spans[0].offset, 12u);
  EXPECT_EQ(r.spans[0].original, "(Bornmann, 2021)");
}

TEST(Mask, GroupedBracketsBecomeOneSpan) {
  const auto r = mask_citations("reasoning ([11]; [12]) tasks");
  EXPECT_EQ(r.text, "reasoning CITATION tasks");
  ASSERT_EQ(r.spans.size(), 1u);
  EXPECT_EQ(r.spans[0].markers, 2);
  EXPECT_EQ(r.spans[0].original, "([11]; [12])");
}

TEST(Mask, NoCitations) {
  const auto r = mask_citations("no citations here.");
  EXPECT_EQ(r.text, "no citations here.");
  EXPECT_TRUE(r.spans.empty());
}

TEST(Mask, MaskTokenGluedToWordIsNotASurname) {
  const std::string once = mask_citations("( (Ng and Li 2001b)study  2021)").text;
  EXPECT_EQ(once, "( CITATIONstudy  2021)");
  EXPECT_EQ(mask_citations(once).text, once);
}

TEST(Mask, EmptyInput) { EXPECT_EQ(mask_citations("").text, ""); }

TEST(Mask, RegressionSet) {
  const json cases = json::parse(fixture::read(fixture::data("fixtures/masking_cases.json")));
  ASSERT_EQ(cases.size(), 30u);
  for (const auto& c : cases) {
    const std::string input = c["input"];
    const auto r = mask_citations(input);
    EXPECT_EQ(r.text, c["expected"].get<std::string>()) << input;
    std::vector<int> markers;
    for (const auto& s : r.spans) markers.push_back(s.markers);
    EXPECT_EQ(markers, c["markers"].get<std::vector<int>>()) << input;
    EXPECT_EQ(restore_citations(r.text, r.spans), input) << input;
    EXPECT_EQ(mask_citations(r.text).text, r.text) << input;
  }
}

namespace {

std::string random_prose(std::mt19937& rng) {
  static const std::vector<std::string> pieces = {
      "We ", "study ", "graphs", " (Smith, 2020)", " [3]", " [1, 2]", " ([4]; [5])", " (e.g., Lee et al., 2019)",
      ". ", "(", ")", "[", "]", " and ", ";", ",", " 2021", " CITATION", " (see [7])", "é", " [1]-[2]",
      " (van Dijk & Ruiz 2001b)", " (Ng and Li 2001b)", "\n\n", " x[0]", " (a note)"};
  std::string s;
  const int n = 1 + static_cast<int>(rng() % 25);
  for (int i = 0; i < n; ++i) s += pieces[rng() % pieces.size()];
  return s;
}

}  // namespace

TEST(MaskProperty, Idempotent) {
  std::mt19937 rng(11);
  for (int i = 0; i < 3000; ++i) {
    const std::string t = random_prose(rng);
    const std::string once = mask_citations(t).text;
    ASSERT_EQ(mask_citations(once).text, once) << t;
  }
}

TEST(MaskProperty, RestoreReconstructsInput) {
  std::mt19937 rng(12);
  for (int i = 0; i < 3000; ++i) {
    const std::string t = random_prose(rng);
    const auto r = mask_citations(t);
    ASSERT_EQ(restore_citations(r.text, r.spans), t) << t;
    for (const auto& s : r.spans) ASSERT_EQ(t.substr(s.offset, s.length), s.original);
  }
}
