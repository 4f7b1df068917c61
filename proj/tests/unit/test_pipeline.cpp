#include <gtest/gtest.h>

#include "citeweave/llm.hpp"
#include "citeweave/pipeline.hpp"
#include "citeweave/prompts.hpp"
#include "fixtures.hpp"
#include "scripted_backend.hpp"

using namespace citeweave;
using grouping::PipelineFailed;

namespace {

corpus::WorkInProgress wip_with(int n, std::size_t abstract_chars = 120) {
  auto b = fixture::bundle(n);
  for (auto& c : b.citations) {
    std::string a = "Study " + std::to_string(c.id) + " examines";
    while (a.size() < abstract_chars) a += " citation networks";
    c.abstract = a + ".";
  }
  return corpus::redact(b);
}

}  // namespace

TEST(Pipeline, GroupsCoverCorpusAndCarryRationales) {
  const auto wip = wip_with(10);
  fixture::ScriptedBackend model(4);
  const auto run = grouping::run_grouping(wip, model);
  EXPECT_TRUE(run.groups.covers_corpus());
  EXPECT_EQ(run.groups.groups.size(), 3u);
  for (const auto& [i, g] : run.groups.groups) {
    for (const auto& p : g.cited_papers) {
      EXPECT_TRUE(p.citation_rationale.has_value());
      EXPECT_TRUE(p.span.has_value());
    }
  }
  EXPECT_TRUE(run.span_warnings.empty());
  EXPECT_EQ(run.transcript.attempts("1a"), 1u);
  for (int i = 1; i <= 3; ++i) EXPECT_EQ(run.transcript.attempts("1b", i), 1u);
}

TEST(Pipeline, ReplayIsDeterministic) {
  const auto wip = wip_with(9);
  fixture::ScriptedBackend model(3);
  llm::RecordingBackend recorder(model);
  const auto live = grouping::run_grouping(wip, recorder);

  const auto dir = fixture::temp_dir("replay");
  recorder.recorded().save(dir / "replay.json");
  for (int round = 0; round < 3; ++round) {
    auto replay = llm::ReplayBackend::from_file(dir / "replay.json");
    const auto again = grouping::run_grouping(wip, replay);
    EXPECT_EQ(grouping::dump(again.groups), grouping::dump(live.groups));
    EXPECT_EQ(grouping::to_json(again.transcript).dump(), grouping::to_json(live.transcript).dump());
  }
  std::filesystem::remove_all(dir);
}

TEST(Pipeline, ReplayMissThrowsBackendError) {
  llm::ReplayBackend empty;
  EXPECT_THROW(empty.send("unknown prompt", {}), llm::BackendError);
  EXPECT_THROW(grouping::run_grouping(wip_with(2), empty, {0}), PipelineFailed);
}

TEST(Pipeline, MalformedRefinementIsRetried) {
  const auto wip = wip_with(4);
  fixture::ScriptedBackend model(4);
  int broken = 0;
  model.tamper = [&](const std::string& stage, const std::string& reply, int) {
    if (stage == "1b" && broken++ == 0) return std::string("{\"1\": {\"group_name\": ");
    return reply;
  };
  const auto run = grouping::run_grouping(wip, model);
  EXPECT_EQ(run.transcript.attempts("1b", 1), 2u);
  EXPECT_NE(run.transcript.entries[1].outcome, "ok");
  EXPECT_EQ(run.transcript.entries[2].outcome, "ok");
  EXPECT_NE(run.transcript.entries[2].prompt.find("could not be used"), std::string::npos);
  EXPECT_TRUE(run.groups.covers_corpus());
}

TEST(Pipeline, UnknownIdInReplyIsRetried) {
  const auto wip = wip_with(3);
  fixture::ScriptedBackend model(4);
  model.tamper = [&](const std::string& stage, const std::string& reply, int call) {
    if (stage == "1a" && call == 1) {
      auto j = nlohmann::json::parse(reply);
      j["1"]["cited_papers"].push_back({{"id", "77"}, {"title", "Invented"}});
      return j.dump();
    }
    return reply;
  };
  const auto run = grouping::run_grouping(wip, model);
  EXPECT_EQ(run.transcript.attempts("1a"), 2u);
  EXPECT_NE(run.transcript.entries[0].outcome.find("77"), std::string::npos);
}

TEST(Pipeline, ExhaustedRetriesFail) {
  const auto wip = wip_with(3);
  fixture::ScriptedBackend model(4);
  model.tamper = [](const std::string& stage, const std::string& reply, int) {
    return stage == "1b" ? std::string("no json here") : reply;
  };
  grouping::PipelinePolicy policy;
  policy.max_retries = 2;
  try {
    grouping::run_grouping(wip, model, policy);
    FAIL() << "expected PipelineFailed";
  } catch (const PipelineFailed& e) {
    EXPECT_EQ(e.transcript().attempts("1b", 1), 3u);
    EXPECT_EQ(e.transcript().attempts("1a"), 1u);
  }
}

TEST(Pipeline, LargeCorpusOneCallPerGroupWithinBudget) {
  const auto wip = wip_with(52, 200);
  fixture::ScriptedBackend model(4);
  const grouping::PipelinePolicy policy;
  const auto run = grouping::run_grouping(wip, model, policy);
  EXPECT_TRUE(run.groups.covers_corpus());
  EXPECT_EQ(run.groups.groups.size(), 13u);
  EXPECT_EQ(model.prompts.size(), 14u);
  for (const auto& e : run.transcript.entries) EXPECT_LE(e.prompt_tokens, 8192u - 1024u);
  EXPECT_TRUE(run.transcript.notes.empty());
}

TEST(Pipeline, OversizedGroupIsSplitAndMerged) {
  const auto wip = wip_with(52, 600);
  fixture::ScriptedBackend model(52);
  const auto run = grouping::run_grouping(wip, model);
  ASSERT_EQ(run.groups.groups.size(), 1u);
  const auto& g = run.groups.groups.at(1);
  ASSERT_EQ(g.cited_papers.size(), 52u);
  for (int i = 0; i < 52; ++i) EXPECT_EQ(g.cited_papers[static_cast<std::size_t>(i)].id, i + 1);
  EXPECT_GT(run.transcript.attempts("1b", 1), 1u);
  bool split_noted = false;
  for (const auto& n : run.transcript.notes) split_noted |= n.find("split") != std::string::npos;
  EXPECT_TRUE(split_noted);
  for (const auto& e : run.transcript.entries) {
    if (e.stage == "1b") EXPECT_LE(e.prompt_tokens, 8192u - 1024u);
  }
}

TEST(Pipeline, SpanOutsideAbstractWarns) {
  const auto wip = wip_with(2);
  fixture::ScriptedBackend model(4);
  model.tamper = [](const std::string& stage, const std::string& reply, int) {
    if (stage != "1b") return reply;
    auto j = nlohmann::ordered_json::parse(reply);
    j["1"]["cited_papers"][1]["span"] = "text that is nowhere";
    return j.dump();
  };
  const auto run = grouping::run_grouping(wip, model);
  ASSERT_EQ(run.span_warnings.size(), 1u);
  EXPECT_EQ(run.span_warnings[0].citation_id, 2);
}

TEST(Drafting, OneParagraphPerGroupHasNoWarnings) {
  const auto wip = wip_with(9);
  fixture::ScriptedBackend model(3);
  const auto groups = grouping::run_grouping(wip, model).groups;
  const auto draft = grouping::run_drafting(wip, groups, model);
  EXPECT_EQ(draft.annex.paragraph_count, 3u);
  EXPECT_EQ(draft.annex.group_count, 3u);
  EXPECT_TRUE(draft.annex.warnings.empty());
  EXPECT_TRUE(draft.annex.hallucinated_ids.empty());
  EXPECT_EQ(draft.annex.cited_ids, corpus::citation_ids(wip.citations));
  EXPECT_EQ(draft.transcript.entries.size(), 1u);
  EXPECT_EQ(draft.transcript.entries[0].stage, "2");
}

TEST(Drafting, FlagsHallucinatedCitation) {
  const auto wip = wip_with(9);
  fixture::ScriptedBackend model(3);
  const auto groups = grouping::run_grouping(wip, model).groups;
  model.tamper = [](const std::string& stage, const std::string& reply, int) {
    return stage == "2" ? reply + " See also [99]." : reply;
  };
  const auto draft = grouping::run_drafting(wip, groups, model);
  EXPECT_EQ(draft.annex.hallucinated_ids, std::set<int>{99});
  ASSERT_EQ(draft.annex.warnings.size(), 1u);
  EXPECT_NE(draft.annex.warnings[0].find("HallucinatedCitation"), std::string::npos);
}

TEST(Drafting, ParagraphMismatchIsAWarning) {
  const auto wip = wip_with(9);
  fixture::ScriptedBackend model(3);
  const auto groups = grouping::run_grouping(wip, model).groups;
  const auto annex = grouping::validate_draft("First [1], [2].\n\nSecond [3] and [9].", groups);
  EXPECT_EQ(annex.paragraph_count, 2u);
  ASSERT_EQ(annex.warnings.size(), 1u);
  EXPECT_NE(annex.warnings[0].find("ParagraphMismatch"), std::string::npos);
  const auto j = grouping::to_json(annex);
  EXPECT_EQ(j["paragraph_count"], 2);
  EXPECT_EQ(j["group_count"], 3);
}

TEST(Drafting, BackendFailureKeepsTranscript) {
  const auto wip = wip_with(2);
  fixture::ScriptedBackend model(4);
  const auto groups = grouping::run_grouping(wip, model).groups;
  llm::ReplayBackend empty;
  try {
    grouping::run_drafting(wip, groups, empty);
    FAIL();
  } catch (const PipelineFailed& e) {
    ASSERT_EQ(e.transcript().entries.size(), 1u);
    EXPECT_EQ(e.transcript().entries[0].stage, "2");
  }
}

TEST(Llm, TokenEstimateRoundsUp) {
  EXPECT_EQ(llm::estimate_tokens(""), 0u);
  EXPECT_EQ(llm::estimate_tokens("abcd"), 1u);
  EXPECT_EQ(llm::estimate_tokens("abcde"), 2u);
  EXPECT_EQ(llm::estimate_tokens("abcdef", 3), 2u);
}

TEST(Llm, PromptKeyIsSha256) {
  EXPECT_EQ(llm::prompt_key(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(llm::prompt_key("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Llm, ReplayFileRoundTrip) {
  llm::ReplayBackend b({"m", 4096});
  b.add("p1", "r1");
  b.add("p2", "r2");
  const auto dir = fixture::temp_dir("replayrt");
  b.save(dir / "r.json");
  auto back = llm::ReplayBackend::from_file(dir / "r.json");
  EXPECT_EQ(back.size(), 2u);
  EXPECT_EQ(back.send("p2", {}), "r2");
  EXPECT_EQ(back.identity().context_budget_tokens, 4096u);
  EXPECT_EQ(back.identity().model, "m");
  std::filesystem::remove_all(dir);
}
