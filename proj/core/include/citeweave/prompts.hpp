#pragma once

#include <map>
#include <string>

#include "citeweave/corpus.hpp"
#include "citeweave/grouping.hpp"

namespace citeweave::grouping {

// Titles-only grouping prompt over every citation of the WIP.
// Requires at least one citation.
std::string render_prompt_1a(const corpus::WorkInProgress& wip);

// Refinement prompt for one group: its JSON plus the id/title/abstract of
// each member, in member order. Missing abstracts render empty.
std::string render_prompt_1b(const corpus::WorkInProgress& wip, int group_index, const CitationGroup& group,
                             const std::map<int, std::string>& abstracts);

// Drafting prompt over the full grouping. Requires coverage of the WIP's
// citations.
std::string render_prompt_2(const corpus::WorkInProgress& wip, const GroupingSet& groups);

}  // namespace citeweave::grouping
