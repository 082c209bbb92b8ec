#pragma once

// End-to-end synthesis of (context, question, answer) examples.

#include <cstdint>
#include <string>
#include <vector>

#include "synthqa/corpus.hpp"
#include "synthqa/question_gen.hpp"
#include "synthqa/retrieval.hpp"
#include "synthqa/squad.hpp"

namespace synthqa {

struct GenerationConfig {
  TemplateVariant variant = TemplateVariant::kWhBA;
  MatchingMode mode = MatchingMode::kQueryAndContext;
  bool use_retrieved = true;
  std::size_t target_size = 50000;
  std::size_t validation_size = 1000;
  std::uint64_t seed = 0;
  double f1_cap = 0.95;
  std::size_t top_k = 100;
  bool exclude_document = false;

  /// Throws UsageError for out-of-range values.
  void validate() const;
};

/// A (sentence, entity) pair that produced no example.
struct SkippedPair {
  std::string sent_id;
  Entity answer;
};

struct GenerationReport {
  std::size_t pairs_considered = 0;
  std::size_t duplicates = 0;
  std::vector<SkippedPair> skipped;
};

/// Walks every (sentence, entity) pair in corpus order and emits at most
/// `config.target_size` examples. With `use_retrieved` the question is built
/// from the best accepted retrieval; pairs without one are skipped and do not
/// count against the budget. Work is spread over `jobs` threads in blocks;
/// output does not depend on the thread count.
std::vector<QAExample> generate_dataset(const Corpus& corpus, const Bm25Index& index, const GenerationConfig& config,
                                        const WhPriorTable& prior, int jobs = 0,
                                        GenerationReport* report = nullptr);

/// Stable id for one generated example: "<VARIANT>:<LABEL>:<hash>".
std::string make_qid(const AnnotatedSentence& sentence, const Entity& answer, TemplateVariant variant);

/// Seeded uniform split; both halves keep input order. Throws UsageError if
/// `validation_size` exceeds the number of examples.
std::pair<std::vector<QAExample>, std::vector<QAExample>> split_validation(const std::vector<QAExample>& examples,
                                                                           std::size_t validation_size,
                                                                           std::uint64_t seed);

/// Keeps one random example per distinct context, then at most `n` of those
/// contexts chosen uniformly. Output keeps input order.
std::vector<QAExample> subsample_per_context(const std::vector<QAExample>& examples, std::size_t n,
                                             std::uint64_t seed);

/// Seeded Fisher-Yates permutation of [0, n).
std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed);

}  // namespace synthqa
