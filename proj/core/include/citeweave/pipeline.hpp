#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "citeweave/corpus.hpp"
#include "citeweave/error.hpp"
#include "citeweave/grouping.hpp"
#include "citeweave/llm.hpp"

namespace citeweave::grouping {

struct PipelinePolicy {
  int max_retries = 2;
  std::size_t chars_per_token = 4;
  // Tokens kept free for the reply inside the backend's context budget.
  std::size_t reply_reserve_tokens = 1024;
  llm::DecodingConfig structured{0.0, std::nullopt};
  llm::DecodingConfig prose{0.7, std::nullopt};
};

struct TranscriptEntry {
  std::string stage;  // "1a", "1b", "2"
  int group_index = 0;
  int attempt = 0;
  std::size_t prompt_tokens = 0;
  std::string prompt;
  std::string reply;
  std::string outcome;  // "ok" or the error text

  bool operator==(const TranscriptEntry&) const = default;
};

struct Transcript {
  std::vector<TranscriptEntry> entries;
  std::vector<std::string> notes;

  bool operator==(const Transcript&) const = default;
  std::size_t attempts(const std::string& stage, int group_index = 0) const;
};

nlohmann::ordered_json to_json(const Transcript& t);

class PipelineFailed : public Error {
 public:
  PipelineFailed(const std::string& message, Transcript transcript);
  const Transcript& transcript() const noexcept { return transcript_; }

 private:
  Transcript transcript_;
};

struct GroupingRun {
  GroupingSet groups;
  Transcript transcript;
  std::vector<SpanWarning> span_warnings;
};

// Titles-only grouping once, then one refinement call per group, in index
// order. Malformed replies are retried with the error appended to the
// prompt. A refinement prompt over the context budget is split into halves
// that are refined separately and merged back.
GroupingRun run_grouping(const corpus::WorkInProgress& wip, llm::LlmBackend& backend,
                         const PipelinePolicy& policy = {});

struct DraftAnnex {
  std::size_t paragraph_count = 0;
  std::size_t group_count = 0;
  std::vector<std::string> warnings;
  std::set<int> cited_ids;
  // Cited in the draft but not present in any group.
  std::set<int> hallucinated_ids;
};

nlohmann::ordered_json to_json(const DraftAnnex& annex);

struct DraftText {
  std::string text;
  DraftAnnex annex;
  Transcript transcript;
};

DraftAnnex validate_draft(std::string_view text, const GroupingSet& groups);

DraftText run_drafting(const corpus::WorkInProgress& wip, const GroupingSet& groups, llm::LlmBackend& backend,
                       const PipelinePolicy& policy = {});

}  // namespace citeweave::grouping
