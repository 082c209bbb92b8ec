#include <sstream>
#include <string_view>

#include "synthqa/question_gen.hpp"

namespace synthqa {

namespace {

// Placeholder priors shipped for out-of-the-box runs; regenerate from a
// labelled QA set with `synthqa derive-priors`. Mirrors data/wh_priors.json.
constexpr std::string_view kDefaultPriors = R"({
  "*":           [["what is", 0.30], ["what was", 0.25], ["what does", 0.10], ["what did", 0.10],
                  ["which of", 0.10], ["what are", 0.15]],
  "CARDINAL":    [["how many", 0.72], ["what is", 0.10], ["how much", 0.08], ["what was", 0.10]],
  "DATE":        [["when was", 0.28], ["when did", 0.30], ["what year", 0.26], ["in what", 0.10],
                  ["when is", 0.06]],
  "EVENT":       [["what event", 0.35], ["what was", 0.35], ["what is", 0.30]],
  "FAC":         [["where is", 0.35], ["what is", 0.30], ["where was", 0.20], ["what building", 0.15]],
  "GPE":         [["where was", 0.22], ["where is", 0.18], ["what country", 0.20], ["what city", 0.18],
                  ["in what", 0.12], ["where did", 0.10]],
  "LANGUAGE":    [["what language", 0.80], ["which language", 0.20]],
  "LAW":         [["what law", 0.40], ["what act", 0.30], ["which law", 0.30]],
  "LOC":         [["where is", 0.35], ["where was", 0.20], ["what region", 0.20], ["what body", 0.10],
                  ["in what", 0.15]],
  "MONEY":       [["how much", 0.80], ["what was", 0.10], ["what is", 0.10]],
  "NORP":        [["what nationality", 0.25], ["who were", 0.25], ["what group", 0.20], ["what religion", 0.15],
                  ["which people", 0.15]],
  "ORDINAL":     [["what rank", 0.35], ["what place", 0.35], ["which position", 0.30]],
  "ORG":         [["what organization", 0.20], ["who was", 0.15], ["what company", 0.20], ["which team", 0.15],
                  ["what is", 0.15], ["what university", 0.15]],
  "PERCENT":     [["what percentage", 0.70], ["how much", 0.20], ["what percent", 0.10]],
  "PERSON":      [["who was", 0.34], ["who is", 0.14], ["who did", 0.10], ["what is", 0.10],
                  ["what was", 0.12], ["which person", 0.06], ["who has", 0.08], ["who were", 0.06]],
  "PRODUCT":     [["what product", 0.40], ["what is", 0.30], ["what was", 0.30]],
  "QUANTITY":    [["how many", 0.45], ["how much", 0.25], ["how far", 0.15], ["how long", 0.15]],
  "TIME":        [["what time", 0.50], ["when did", 0.30], ["how long", 0.20]],
  "WORK_OF_ART": [["what is", 0.25], ["what was", 0.25], ["what book", 0.25], ["what song", 0.25]]
})";

}  // namespace

WhPriorTable default_wh_priors() {
  std::istringstream in{std::string(kDefaultPriors)};
  return WhPriorTable::load(in);
}

}  // namespace synthqa
