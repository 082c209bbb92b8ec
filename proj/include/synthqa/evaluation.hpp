#pragma once

// Scoring predictions against SQuAD gold files and extracting the subset of
// questions whose answers are named entities.

#include <cstddef>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "synthqa/annotate.hpp"
#include "synthqa/corpus.hpp"
#include "synthqa/question_gen.hpp"
#include "synthqa/squad.hpp"

namespace synthqa {

/// qid -> predicted answer text.
using PredictionSet = std::map<std::string, std::string>;

PredictionSet read_predictions(std::istream& in);

struct EvalReport {
  double exact_match = 0.0;  // percent
  double f1 = 0.0;           // percent
  std::size_t n = 0;
  std::vector<std::string> missing;  // gold qids absent from the predictions
};

/// Official v1.1 semantics: per question, max over gold answers; averaged
/// over all gold questions and scaled to percent. Missing predictions count
/// as zero and are listed in `missing`.
EvalReport evaluate(const SquadFile& gold, const PredictionSet& predictions);

void write_report(std::ostream& out, const EvalReport& report);

/// Entities found in each gold context, keyed by (article, paragraph) index.
using ContextEntities = std::map<std::pair<std::size_t, std::size_t>, std::vector<Entity>>;

/// Gold contexts as corpus documents: article i becomes doc "a<i>" and its
/// contexts become that document's paragraphs, so the usual ingest and
/// annotation tools can run over them.
std::vector<Document> squad_contexts_as_documents(const SquadFile& gold);

/// Groups interchange records by the context their sent_id ("a<i>:<p>:<s>")
/// points at.
ContextEntities context_entities_from_annotations(const std::vector<AnnotationRecord>& records);

/// Annotates every gold context with the heuristic tagger.
ContextEntities context_entities_heuristic(const SquadFile& gold, const Gazetteer& gazetteer);

/// Keeps questions with at least one gold answer equal (case-insensitively)
/// to an entity surface in its context. Articles and paragraphs are kept
/// even when emptied, so indices stay stable across repeated runs. Throws
/// DataError listing contexts without annotations.
SquadFile ner_subset(const SquadFile& gold, const ContextEntities& entities);

/// Counts question-initial bi-grams per answer entity label over a gold file
/// and normalizes them into a prior table, keeping the `max_per_label` most
/// frequent bi-grams per label. The "*" row pools every label.
WhPriorTable derive_wh_priors(const SquadFile& gold, const ContextEntities& entities,
                              std::size_t max_per_label = 20);

}  // namespace synthqa
