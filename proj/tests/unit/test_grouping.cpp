#include <gtest/gtest.h>

#include <random>

#include "citeweave/grouping.hpp"
#include "fixtures.hpp"

using namespace citeweave::grouping;
using nlohmann::json;

namespace {

const std::string kTwoGroups = R"({
  "1": {"group_name": "A", "group_rationale": "ra",
        "cited_papers": [{"id": "1", "title": "T1"}]},
  "2": {"group_name": "B", "group_rationale": "rb",
        "cited_papers": [{"id": "2", "title": "T2"}, {"id": "1", "title": "T1"}]}
})";

}  // namespace

TEST(ParseGrouping, WrappedExemplar) {
  const auto raw = fixture::read(fixture::data("fixtures/exemplar_1a_wrapped.json"));
  const auto set = parse_grouping(raw, {1, 2, 3}, Stage::k1a);
  ASSERT_EQ(set.groups.size(), 2u);
  EXPECT_EQ(set.covered_ids(), (std::set<int>{1, 2, 3}));
  EXPECT_TRUE(set.covers_corpus());
  const auto& g1 = set.groups.at(1);
  EXPECT_EQ(g1.group_name, "Name of first group");
  EXPECT_EQ(g1.group_rationale,
            "This rationale explains why this group should exist and how it helps frame the work-in-progress.");
  EXPECT_EQ(g1.cited_papers[1].title, "Title of the second paper included in group 1");
  EXPECT_EQ(set.groups.at(2).ids(), (std::set<int>{2, 3}));
}

TEST(ParseGrouping, MissingRationale) {
  auto j = json::parse(kTwoGroups);
  j["1"].erase("group_rationale");
  try {
    parse_grouping(j.dump(), {1, 2}, Stage::k1a);
    FAIL();
  } catch (const SchemaError& e) {
    EXPECT_EQ(e.path(), "$.1.group_rationale");
  }
}

TEST(ParseGrouping, CoverageGap) {
  try {
    parse_grouping(R"({"1": {"group_name": "A", "group_rationale": "r", "cited_papers": [{"id": "1", "title": "T"}]}})",
                   {1, 2}, Stage::k1a);
    FAIL();
  } catch (const CoverageGap& e) {
    EXPECT_EQ(e.ids(), std::set<int>{2});
  }
}

TEST(ParseGrouping, UnknownCitation) {
  try {
    parse_grouping(kTwoGroups, {1}, Stage::k1a);
    FAIL();
  } catch (const UnknownCitation& e) {
    EXPECT_EQ(e.ids(), std::set<int>{2});
  }
}

TEST(ParseGrouping, StripsFencesAndProse) {
  const auto set = parse_grouping("Sure! Here you go:\n```json\n" + kTwoGroups + "\n```\nHope this helps.", {1, 2},
                                  Stage::k1a);
  EXPECT_EQ(set.groups.size(), 2u);
}

TEST(ParseGrouping, RefinementNeedsRationaleAndSpan) {
  try {
    parse_grouping(kTwoGroups, {1, 2}, Stage::k1b);
    FAIL();
  } catch (const SchemaError& e) {
    EXPECT_EQ(e.path(), "$.1.cited_papers[0].citation_rationale");
  }
  const auto raw = fixture::read(fixture::data("fixtures/groups_fixture.json"));
  const auto set = parse_grouping(raw, {1, 2}, Stage::k1b);
  EXPECT_EQ(set.groups.at(1).cited_papers[0].span, "We summarize articles using the sentences that cite them.");
}

TEST(ParseGrouping, StructuralErrors) {
  EXPECT_THROW(parse_grouping("no json at all", {1}, Stage::k1a), SchemaError);
  EXPECT_THROW(parse_grouping("{\"1\": [}", {1}, Stage::k1a), SchemaError);
  EXPECT_THROW(parse_grouping("{}", {1}, Stage::k1a), SchemaError);
  EXPECT_THROW(parse_grouping(R"({"x": {"group_name": "A", "group_rationale": "r", "cited_papers": [{"id": "1", "title": "T"}]}})",
                              {1}, Stage::k1a),
               SchemaError);
  EXPECT_THROW(parse_grouping(R"({"1": {"group_name": "", "group_rationale": "r", "cited_papers": [{"id": "1", "title": "T"}]}})",
                              {1}, Stage::k1a),
               SchemaError);
  EXPECT_THROW(parse_grouping(R"({"1": {"group_name": "A", "group_rationale": "r", "cited_papers": []}})", {1}, Stage::k1a),
               SchemaError);
  try {
    parse_grouping(R"({"1": {"group_name": "A", "group_rationale": "r", "cited_papers": [{"id": "-4", "title": "T"}]}})",
                   {1}, Stage::k1a);
    FAIL();
  } catch (const SchemaError& e) {
    EXPECT_EQ(e.path(), "$.1.cited_papers[0].id");
  }
}

TEST(ParseGrouping, IntegerIdsAccepted) {
  const auto set = parse_grouping(
      R"({"1": {"group_name": "A", "group_rationale": "r", "cited_papers": [{"id": 1, "title": "T"}]}})", {1},
      Stage::k1a);
  EXPECT_EQ(set.groups.at(1).cited_papers[0].id, 1);
}

TEST(FoldLineBreaks, OnlyInsideStrings) {
  EXPECT_EQ(fold_string_line_breaks("{\n  \"a\": \"x \n   y\"\n}"), "{\n  \"a\": \"x y\"\n}");
  EXPECT_EQ(fold_string_line_breaks(R"({"a": "q\"\n"})"), R"({"a": "q\"\n"})");
}

TEST(Serialize, IdsWrittenAsStrings) {
  const auto set = parse_grouping(kTwoGroups, {1, 2}, Stage::k1a);
  const auto j = to_json(set);
  EXPECT_EQ(j["2"]["cited_papers"][0]["id"], "2");
  EXPECT_FALSE(j["1"]["cited_papers"][0].contains("span"));
}

TEST(Serialize, ParseOfDumpIsIdentity) {
  std::mt19937 rng(31);
  for (int round = 0; round < 200; ++round) {
    GroupingSet set;
    const int n_ids = 1 + static_cast<int>(rng() % 12);
    for (int i = 1; i <= n_ids; ++i) set.corpus_ids.insert(i);
    const int n_groups = 1 + static_cast<int>(rng() % 4);
    const bool refined = rng() % 2;
    for (int g = 1; g <= n_groups; ++g) {
      CitationGroup group{"Group \"" + std::to_string(g) + "\"", "why\n" + std::to_string(g), {}};
      set.groups[g] = group;
    }
    for (int id = 1; id <= n_ids; ++id) {
      const int copies = 1 + static_cast<int>(rng() % 2);
      for (int c = 0; c < copies; ++c) {
        CitedPaperRef ref{id, "Title " + std::to_string(id), std::nullopt, std::nullopt};
        if (refined) {
          ref.citation_rationale = "because " + std::to_string(id);
          ref.span = "span é " + std::to_string(id);
        }
        auto& papers = set.groups[1 + static_cast<int>(rng() % n_groups)].cited_papers;
        bool dup = false;
        for (const auto& p : papers) dup = dup || p.id == id;
        if (!dup) papers.push_back(ref);
      }
    }
    // Drop empty groups.
    for (auto it = set.groups.begin(); it != set.groups.end();) {
      it = it->second.cited_papers.empty() ? set.groups.erase(it) : std::next(it);
    }
    const auto back = parse_grouping(dump(set), set.corpus_ids, refined ? Stage::k1b : Stage::k1a);
    ASSERT_EQ(back, set) << dump(set);
  }
}

TEST(Invariants, EnforcedDirectly) {
  GroupingSet set;
  set.corpus_ids = {1, 2, 3};
  set.groups[1] = CitationGroup{"A", "r", {{1, "T", {}, {}}, {3, "T", {}, {}}}};
  EXPECT_EQ(set.uncovered_ids(), std::set<int>{2});
  EXPECT_THROW(enforce_invariants(set), CoverageGap);
  set.groups[2] = CitationGroup{"B", "r", {{2, "T", {}, {}}}};
  EXPECT_NO_THROW(enforce_invariants(set));
}

TEST(Spans, WhitespaceNormalizedSubstring) {
  GroupingSet set;
  set.corpus_ids = {1, 2, 3};
  set.groups[1] = CitationGroup{"A", "r",
                                {{1, "T", "r", "the  sentences\nthat cite"},
                                 {2, "T", "r", "a paraphrase"},
                                 {3, "T", "r", "anything"}}};
  const std::map<int, std::string> abstracts = {{1, "We use the sentences that cite them."},
                                                {2, "Something else entirely."}};
  const auto warnings = check_spans(set, abstracts);
  ASSERT_EQ(warnings.size(), 2u);
  EXPECT_EQ(warnings[0].citation_id, 2);
  EXPECT_EQ(warnings[1].citation_id, 3);
}
