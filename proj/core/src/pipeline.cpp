#include "citeweave/pipeline.hpp"

#include "citeweave/citance.hpp"
#include "citeweave/prompts.hpp"

namespace citeweave::grouping {

namespace {

std::string corrective_suffix(const std::string& error) {
  return "\n\nYour previous response could not be used: " + error +
         "\nRespond again with only the corrected JSON object, with no text outside of it.\n";
}

std::map<int, std::string> abstracts_of(const corpus::WorkInProgress& wip) {
  std::map<int, std::string> out;
  for (const auto& c : wip.citations) out[c.id] = c.abstract;
  return out;
}

class GroupingDriver {
 public:
  GroupingDriver(const corpus::WorkInProgress& wip, llm::LlmBackend& backend, const PipelinePolicy& policy)
      : wip_(wip), backend_(backend), policy_(policy), abstracts_(abstracts_of(wip)) {
    const auto budget = backend.identity().context_budget_tokens;
    prompt_limit_ = budget > policy.reply_reserve_tokens ? budget - policy.reply_reserve_tokens : budget;
  }

  GroupingRun run() {
    const std::set<int> corpus_ids = corpus::citation_ids(wip_.citations);
    const std::string prompt_1a = render_prompt_1a(wip_);
    if (tokens(prompt_1a) > prompt_limit_) {
      transcript_.notes.push_back("step 1a prompt (" + std::to_string(tokens(prompt_1a)) +
                                  " tokens) exceeds the prompt budget of " + std::to_string(prompt_limit_));
    }
    GroupingSet coarse = call_with_retries("1a", 0, prompt_1a, [&](const std::string& reply) {
      return parse_grouping(reply, corpus_ids, Stage::k1a);
    });

    GroupingSet refined;
    refined.corpus_ids = corpus_ids;
    for (const auto& [index, group] : coarse.groups) refined.groups[index] = refine(index, group);

    const auto missing = refined.uncovered_ids();
    if (!missing.empty()) {
      throw PipelineFailed(CoverageGap(missing).what(), transcript_);
    }
    GroupingRun run;
    run.span_warnings = check_spans(refined, abstracts_);
    for (const auto& w : run.span_warnings) {
      transcript_.notes.push_back("span for citation " + std::to_string(w.citation_id) + " in group " +
                                  std::to_string(w.group_index) + " not found in its abstract");
    }
    run.groups = std::move(refined);
    run.transcript = std::move(transcript_);
    return run;
  }

 private:
  std::size_t tokens(const std::string& s) const { return llm::estimate_tokens(s, policy_.chars_per_token); }

  CitationGroup refine(int index, const CitationGroup& group) {
    const std::string prompt = render_prompt_1b(wip_, index, group, abstracts_);
    if (tokens(prompt) > prompt_limit_ && group.cited_papers.size() > 1) {
      const auto half = static_cast<std::ptrdiff_t>(group.cited_papers.size() / 2);
      CitationGroup lo = group, hi = group;
      lo.cited_papers.assign(group.cited_papers.begin(), group.cited_papers.begin() + half);
      hi.cited_papers.assign(group.cited_papers.begin() + half, group.cited_papers.end());
      transcript_.notes.push_back("group " + std::to_string(index) + " split (" +
                                  std::to_string(group.cited_papers.size()) + " papers) to fit the context budget");
      CitationGroup merged = refine(index, lo);
      CitationGroup upper = refine(index, hi);
      merged.cited_papers.insert(merged.cited_papers.end(), upper.cited_papers.begin(), upper.cited_papers.end());
      return merged;
    }
    if (tokens(prompt) > prompt_limit_) {
      transcript_.notes.push_back("group " + std::to_string(index) +
                                  " prompt exceeds the budget even with a single paper");
    }
    const std::set<int> member_ids = group.ids();
    GroupingSet reply = call_with_retries("1b", index, prompt, [&](const std::string& raw) {
      GroupingSet parsed = parse_grouping(raw, member_ids, Stage::k1b);
      if (parsed.groups.size() != 1) {
        throw SchemaError("$", "expected exactly one group, got " + std::to_string(parsed.groups.size()));
      }
      return parsed;
    });
    if (reply.groups.begin()->first != index) {
      transcript_.notes.push_back("refinement of group " + std::to_string(index) + " came back keyed as " +
                                  std::to_string(reply.groups.begin()->first));
    }
    return reply.groups.begin()->second;
  }

  template <typename Parse>
  GroupingSet call_with_retries(const std::string& stage, int index, const std::string& prompt, Parse parse) {
    std::string current = prompt;
    for (int attempt = 1; attempt <= policy_.max_retries + 1; ++attempt) {
      TranscriptEntry entry{stage, index, attempt, tokens(current), current, {}, {}};
      try {
        entry.reply = backend_.send(current, policy_.structured);
        GroupingSet parsed = parse(entry.reply);
        entry.outcome = "ok";
        transcript_.entries.push_back(std::move(entry));
        return parsed;
      } catch (const Error& e) {
        entry.outcome = e.what();
        transcript_.entries.push_back(entry);
        current = prompt + corrective_suffix(e.what());
      }
    }
    throw PipelineFailed("step " + stage + (index ? " (group " + std::to_string(index) + ")" : std::string()) +
                             " failed after " + std::to_string(policy_.max_retries + 1) + " attempts",
                         transcript_);
  }

  const corpus::WorkInProgress& wip_;
  llm::LlmBackend& backend_;
  const PipelinePolicy& policy_;
  std::map<int, std::string> abstracts_;
  std::size_t prompt_limit_ = 0;
  Transcript transcript_;
};

std::size_t count_paragraphs(std::string_view text) {
  std::size_t count = 0;
  bool in_paragraph = false;
  std::size_t newlines = 0;
  for (char c : text) {
    if (c == '\n') {
      ++newlines;
      if (newlines >= 2) in_paragraph = false;
    } else if (c == ' ' || c == '\t' || c == '\r') {
      continue;
    } else {
      newlines = 0;
      if (!in_paragraph) {
        ++count;
        in_paragraph = true;
      }
    }
  }
  return count;
}

}  // namespace

std::size_t Transcript::attempts(const std::string& stage, int group_index) const {
  std::size_t n = 0;
  for (const auto& e : entries) {
    if (e.stage == stage && e.group_index == group_index) ++n;
  }
  return n;
}

nlohmann::ordered_json to_json(const Transcript& t) {
  nlohmann::ordered_json j;
  j["entries"] = nlohmann::ordered_json::array();
  for (const auto& e : t.entries) {
    nlohmann::ordered_json item;
    item["stage"] = e.stage;
    item["group_index"] = e.group_index;
    item["attempt"] = e.attempt;
    item["prompt_tokens"] = e.prompt_tokens;
    item["prompt_sha256"] = llm::prompt_key(e.prompt);
    item["prompt"] = e.prompt;
    item["reply"] = e.reply;
    item["outcome"] = e.outcome;
    j["entries"].push_back(std::move(item));
  }
  j["notes"] = t.notes;
  return j;
}

PipelineFailed::PipelineFailed(const std::string& message, Transcript transcript)
    : Error(message), transcript_(std::move(transcript)) {}

GroupingRun run_grouping(const corpus::WorkInProgress& wip, llm::LlmBackend& backend, const PipelinePolicy& policy) {
  return GroupingDriver(wip, backend, policy).run();
}

nlohmann::ordered_json to_json(const DraftAnnex& a) {
  nlohmann::ordered_json j;
  j["paragraph_count"] = a.paragraph_count;
  j["group_count"] = a.group_count;
  j["warnings"] = a.warnings;
  j["cited_ids"] = a.cited_ids;
  j["hallucinated_ids"] = a.hallucinated_ids;
  return j;
}

DraftAnnex validate_draft(std::string_view text, const GroupingSet& groups) {
  DraftAnnex annex;
  annex.paragraph_count = count_paragraphs(text);
  annex.group_count = groups.groups.size();
  annex.cited_ids = citance::extract_citations(text);
  const auto grouped = groups.covered_ids();
  for (int id : annex.cited_ids) {
    if (!grouped.count(id)) annex.hallucinated_ids.insert(id);
  }
  if (annex.paragraph_count != annex.group_count) {
    annex.warnings.push_back("ParagraphMismatch: " + std::to_string(annex.paragraph_count) + " paragraphs for " +
                             std::to_string(annex.group_count) + " groups");
  }
  if (!annex.hallucinated_ids.empty()) {
    std::string ids;
    for (int id : annex.hallucinated_ids) ids += (ids.empty() ? "" : ", ") + std::to_string(id);
    annex.warnings.push_back("HallucinatedCitation: " + ids);
  }
  return annex;
}

DraftText run_drafting(const corpus::WorkInProgress& wip, const GroupingSet& groups, llm::LlmBackend& backend,
                       const PipelinePolicy& policy) {
  const std::string prompt = render_prompt_2(wip, groups);
  DraftText draft;
  TranscriptEntry entry{"2", 0, 1, llm::estimate_tokens(prompt, policy.chars_per_token), prompt, {}, {}};
  try {
    entry.reply = backend.send(prompt, policy.prose);
  } catch (const Error& e) {
    entry.outcome = e.what();
    draft.transcript.entries.push_back(std::move(entry));
    throw PipelineFailed(std::string("drafting failed: ") + e.what(), draft.transcript);
  }
  entry.outcome = "ok";
  draft.text = entry.reply;
  draft.annex = validate_draft(draft.text, groups);
  draft.transcript.entries.push_back(std::move(entry));
  return draft;
}

}  // namespace citeweave::grouping
