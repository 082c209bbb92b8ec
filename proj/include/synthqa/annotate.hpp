#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "synthqa/corpus.hpp"

namespace synthqa {

/// One line of the annotation interchange file.
struct AnnotationRecord {
  std::string sent_id;
  std::vector<Entity> entities;
};

/// Parses interchange JSON Lines:
///   {"sent_id": str, "entities": [{"surface", "start", "end", "label"}, ...]}
std::vector<AnnotationRecord> read_annotation_records(std::istream& in);
void write_annotation_records(std::ostream& out, const std::vector<AnnotationRecord>& records);

/// Replaces every sentence's entity list with the records in `in`; sentences
/// without a record end up with an empty list. Unknown ids, duplicate records
/// and span/surface mismatches throw DataError naming the sentence.
void load_annotations(Corpus& corpus, std::istream& in);

/// Exports the corpus's current entities in interchange form, one record per
/// sentence in corpus order.
void write_annotations(std::ostream& out, const Corpus& corpus);

const std::vector<Entity>& entities_of(const Corpus& corpus, std::string_view sent_id);

/// Entity identity used across retrieval: same label and case-insensitively
/// equal surface.
bool entities_match(const Entity& a, const Entity& b);

/// Phrase lists per label, e.g. {"PERSON": ["Alan Turing"], "GPE": ["London"]}.
class Gazetteer {
 public:
  Gazetteer() = default;
  static Gazetteer load(std::istream& in);
  void add(std::string label, std::string phrase);
  const std::map<std::string, std::vector<std::string>>& entries() const { return entries_; }

 private:
  std::map<std::string, std::vector<std::string>> entries_;
};

/// Rule-based tagger for fixtures and tests. Gazetteer phrases match exactly
/// on word boundaries; regexes add DATE (years 1000-2999 and "Month DD, YYYY"),
/// CARDINAL (standalone integers), PERCENT ("5%") and MONEY ("$5").
/// Overlaps resolve left to right, longest first; on equal spans the
/// gazetteer beats DATE, which beats MONEY, PERCENT and CARDINAL.
std::vector<Entity> heuristic_annotate(std::string_view text, const Gazetteer& gazetteer);

/// Runs heuristic_annotate over every sentence (parallel across sentences).
void heuristic_annotate_corpus(Corpus& corpus, const Gazetteer& gazetteer, int jobs = 0);

}  // namespace synthqa
