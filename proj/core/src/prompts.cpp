#include "citeweave/prompts.hpp"

#include <string_view>

#include "citeweave/error.hpp"

namespace citeweave::grouping {

namespace {

constexpr std::string_view kStep1aInstructions =
    "I will provide you with the abstract, introduction, and conclusion sections of an in-progress academic "
    "paper, along with a list of relevant scholarly articles. Each article is identified by a unique ID. Your "
    "task is to organize these articles into thematic citation groups that align with and support the framing "
    "of the in-progress paper. For each citation group, you should:\n"
    "1. Name the Group: Assign a descriptive name that captures the thematic focus of the group;\n"
    "2. Explain the Rationale: Detail how the articles within this group contribute to or support the thematic "
    "framework of the in-progress paper; and\n"
    "3. List the Cited Papers: Include the articles that fall under this thematic group, providing for each "
    "article the citation ID and the title.\n"
    "\n"
    "It's important that each article is placed in at least one group, although articles may fit into multiple "
    "groups if applicable.\n"
    "\n"
    "Your response should be formatted as a JSON object, where each key represents a unique group index. The "
    "value for each key should be a dictionary with three main keys: 'group_name', 'group_rationale', and "
    "'cited_papers'. The 'cited_papers' should be a list of dictionaries, each containing 'id' and 'title' keys "
    "for the articles. Here is the structure for your output:\n";

constexpr std::string_view kStep1aExample = R"({
  "1": {
    "group_name": "Name of first group",
    "group_rationale": "This rationale explains why this group should exist and how it helps frame the work-in-progress.",
    "cited_papers": [
      {
        "id": "1",
        "title": "Title of the first paper included in the group"
      },
      {
        "id": "3",
        "title": "Title of the second paper included in group 1"
      }
    ]
  },
  "2": {
    "group_name": "Name of second group",
    "group_rationale": "This rationale explains why this group should exist and how it helps frame the work-in-progress.",
    "cited_papers": [
      {
        "id": "2",
        "title": "Title of the first paper included in the group"
      },
      {
        "id": "3",
        "title": "Title of the second paper included in group 2"
      }
    ]
  }
}
)";

constexpr std::string_view kStep1bInstructions =
    "I will provide you with the abstract, introduction, and conclusion sections of an in-progress academic "
    "paper, a data structure showing a citation group and the titles of the papers assigned to the group, and "
    "the abstracts of each of the cited works and their IDs. I need you to update the information in the data "
    "structure by doing the following:\n"
    "1. provide rationales for the inclusion of each work in its group based on the provided abstract;\n"
    "2. provide the span of text from the abstract that supports your rationale; and\n"
    "3. output the revised data structure following a pattern I will give you.\n"
    "\n"
    "The input data is a dictionary where each key is a group index. Each value is a dictionary with three "
    "top-level keys: 'group_name', 'group_rationale', and 'cited_papers'. The value for papers is a list of "
    "dictionaries. Each dictionary has two keys: 'id', and 'title'. Here is the structure for the input:\n";

constexpr std::string_view kStep1bInputExample = R"({
  "1": {
    "group_name": "Name of first group",
    "group_rationale": "This rationale explains why this group should exist and how it helps frame the work-in-progress.",
    "cited_papers": [
      {
        "id": "1",
        "title": "Title of the first paper included in the group"
      },
      {
        "id": "3",
        "title": "Title of the second paper included in the group"
      }
    ]
  }
}
)";

constexpr std::string_view kStep1bOutputLead =
    "The output data will have the same structure, except that the data will be updated for each cited work to "
    "include the following keys: 'id', 'title', 'citation_rationale', and 'span'. Here is the structure for your "
    "output:\n";

constexpr std::string_view kStep1bOutputExample = R"({
  "1": {
    "group_name": "Name of first group",
    "group_rationale": "This rationale explains why this group should exist and how it helps frame the work-in-progress.",
    "cited_papers": [
      {
        "id": "1",
        "title": "Title of the first paper included in the group",
        "citation_rationale": "the rationale for this paper's inclusion in the group",
        "span": "The span of text from the abstract that supports the rationale"
      },
      {
        "id": "3",
        "title": "Title of the second paper included in the group",
        "citation_rationale": "the rationale for this paper's inclusion in the group",
        "span": "The span of text from the abstract that supports the rationale"
      }
    ]
  }
}
)";

constexpr std::string_view kStep1bClosing =
    "Please ensure your response consists solely of the fully formed JSON data structure, with no additional "
    "text outside of the JSON formatting. Ensure no entry from the JSON data structure is omitted.\n";

constexpr std::string_view kStep2Instructions =
    "Given the context of an in-progress scholarly paper and a set of groupings of related works, your task is "
    "to generate the related work section of the work-in-progress. The groupings will be provided to you in json "
    "format. The top-level keys are numbers, which are the group indices. Each value is another dictionary, which "
    "has the following keys:\n"
    "1. 'group_name' (the name of the group);\n"
    "2. 'group_rationale' (an explanation of how the group supports and frames the scholarly work-in-progress); "
    "and\n"
    "3. 'cited_papers' (the list of papers that belong to the group).\n"
    "\n"
    "Each entry in the cited_papers list is another dictionary, which has the following keys:\n"
    "1. 'id' (the citation ID);\n"
    "2. 'title': (the title of the citation);\n"
    "3. 'citation_rationale' (an explanation of why this cited work should be in this citation group); and\n"
    "4. 'span' (the span of text from the work's abstract that supports the citation_rationale).\n"
    "\n"
    "Cite the papers using the citation ID. Structure the text so that each grouping is a distinct paragraph. Do "
    "not reference the fact that the text was formed from groups (e.g. do not say \"The group 'Data Mining "
    "Approaches' includes citations [1] through [2]\").\n";

// "Label: value", without a trailing space when the value is empty.
std::string labelled(std::string_view label, const std::string& value) {
  std::string out(label);
  out += ':';
  if (!value.empty()) out += ' ' + value;
  return out;
}

std::string wip_sections(const corpus::WorkInProgress& wip) {
  std::string out;
  out += labelled("Title", wip.title) + "\n\n";
  out += labelled("Abstract", wip.abstract) + "\n\n";
  out += "Introduction\n\n" + wip.introduction + "\n\n";
  out += "Conclusion\n\n" + wip.conclusion + "\n";
  return out;
}

}  // namespace

std::string render_prompt_1a(const corpus::WorkInProgress& wip) {
  if (wip.citations.empty()) throw PreconditionError("the work-in-progress has no citations to group");
  std::string out(kStep1aInstructions);
  out += kStep1aExample;
  out += "\n";
  out += wip_sections(wip);
  out += "\nRelated Works:\n";
  for (const auto& c : wip.citations) out += "\n" + std::to_string(c.id) + ". " + c.title + "\n";
  return out;
}

std::string render_prompt_1b(const corpus::WorkInProgress& wip, int group_index, const CitationGroup& group,
                             const std::map<int, std::string>& abstracts) {
  if (group.cited_papers.empty()) throw PreconditionError("cannot refine an empty group");
  // The refinement input carries ids and titles only.
  CitationGroup input = group;
  for (auto& p : input.cited_papers) {
    p.citation_rationale.reset();
    p.span.reset();
  }
  std::string out(kStep1bInstructions);
  out += kStep1bInputExample;
  out += "\n";
  out += kStep1bOutputLead;
  out += kStep1bOutputExample;
  out += "\n";
  out += kStep1bClosing;
  out += "\nWork-in-progress data:\n\n";
  out += wip_sections(wip);
  out += "\nCitation group:\n\n";
  out += to_json(group_index, input).dump(2) + "\n";
  out += "\nRelated Works:\n";
  for (const auto& p : group.cited_papers) {
    const auto* entry = wip.find_citation(p.id);
    const std::string& title = entry ? entry->title : p.title;
    auto it = abstracts.find(p.id);
    const std::string abstract = it == abstracts.end() ? std::string() : it->second;
    out += "\nID: " + std::to_string(p.id) + "\n\n";
    out += labelled("title", title) + "\n\n";
    out += labelled("abstract", abstract) + "\n";
  }
  return out;
}

std::string render_prompt_2(const corpus::WorkInProgress& wip, const GroupingSet& groups) {
  GroupingSet checked = groups;
  checked.corpus_ids = corpus::citation_ids(wip.citations);
  enforce_invariants(checked);
  std::string out(kStep2Instructions);
  out += "\nGroupings:\n\n";
  out += dump(groups) + "\n";
  out += "\nWork-in-progress data:\n\n";
  out += wip_sections(wip);
  return out;
}

}  // namespace citeweave::grouping
