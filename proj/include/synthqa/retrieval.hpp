#pragma once

// In-process BM25 sentence index and constrained retrieval.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "synthqa/corpus.hpp"

namespace synthqa {

struct Bm25Params {
  double k1 = 1.2;
  double b = 0.75;
};

struct ScoredSentence {
  std::uint32_t sentence;  // corpus ordinal
  double score;
};

/// Inverted index over corpus sentences. Sentence ordinals match the corpus
/// it was built from; tokenization is normalized_tokens().
class Bm25Index {
 public:
  struct Posting {
    std::uint32_t sentence;
    std::uint32_t tf;
    friend bool operator==(const Posting&, const Posting&) = default;
  };

  Bm25Index() = default;

  /// Tokenizes sentences in parallel (`jobs` threads, 0 = all) and merges
  /// postings in corpus order.
  static Bm25Index build(const Corpus& corpus, int jobs = 0, Bm25Params params = {});
  /// Single-threaded reference build; produces an identical index.
  static Bm25Index build_serial(const Corpus& corpus, Bm25Params params = {});

  /// Line-record snapshot: a JSON header, then one record per sentence.
  void save(std::ostream& out) const;
  static Bm25Index load(std::istream& in);

  std::size_t size() const { return sent_ids_.size(); }
  double avgdl() const { return avgdl_; }
  const Bm25Params& params() const { return params_; }
  std::uint64_t corpus_fingerprint() const { return fingerprint_; }

  std::size_t df(std::string_view token) const;
  double idf(std::string_view token) const;
  std::uint32_t doc_length(std::size_t sentence) const { return doc_len_[sentence]; }
  const std::string& sent_id(std::size_t sentence) const { return sent_ids_[sentence]; }
  std::optional<std::size_t> find(std::string_view sent_id) const;
  std::span<const Posting> postings(std::string_view token) const;
  std::size_t vocabulary_size() const { return terms_.size(); }
  const std::vector<std::string>& terms() const { return terms_; }

  /// BM25 of one sentence for a tokenized query. Repeated query tokens
  /// contribute once per occurrence.
  double score(std::span<const std::string> query, std::size_t sentence) const;
  double score(std::span<const std::string> query, std::string_view sent_id) const;

  /// Top `top_k` sentences by (score desc, sent_id asc). Sentences sharing
  /// no token with the query score 0 and still fill the list if needed.
  std::vector<ScoredSentence> rank(std::span<const std::string> query, std::size_t top_k) const;

  /// Dense scores for every sentence. The serial form accumulates term at a
  /// time over whole postings lists; the parallel form does the same inside
  /// disjoint sentence ranges. Both add contributions in query order, so
  /// results are bit-identical.
  std::vector<double> score_all_serial(std::span<const std::string> query) const;
  std::vector<double> score_all_parallel(std::span<const std::string> query, int jobs = 0) const;

  /// token_f1 of two indexed sentences, from the stored term counts.
  double token_f1(std::size_t a, std::size_t b) const;

  /// True when `a` should rank before `b`.
  bool ranks_before(const ScoredSentence& a, const ScoredSentence& b) const {
    if (a.score != b.score) return a.score > b.score;
    return id_rank_[a.sentence] < id_rank_[b.sentence];
  }

  friend bool operator==(const Bm25Index& a, const Bm25Index& b);

 private:
  struct TermFreq {
    std::uint32_t term;
    std::uint32_t tf;
  };
  using SentenceTerms = std::vector<std::pair<std::string, std::uint32_t>>;

  static SentenceTerms count_terms(std::string_view text);
  static Bm25Index assemble(std::vector<std::string> ids, std::vector<SentenceTerms> per_sentence,
                            Bm25Params params, std::uint64_t fingerprint);

  std::vector<std::int64_t> resolve(std::span<const std::string> query) const;
  double contribution(double idf, std::uint32_t tf, std::size_t sentence) const;
  std::uint32_t tf_of(std::size_t sentence, std::uint32_t term) const;

  Bm25Params params_;
  std::uint64_t fingerprint_ = 0;
  std::vector<std::string> sent_ids_;
  std::vector<std::uint32_t> doc_len_;
  std::vector<double> length_norm_;  // k1 * (1 - b + b * dl / avgdl)
  std::vector<std::uint32_t> id_rank_;
  std::vector<std::uint32_t> by_id_;  // ordinals sorted by sent_id
  std::unordered_map<std::string, std::uint32_t> term_ids_;
  std::vector<std::string> terms_;
  std::vector<std::vector<Posting>> postings_;
  std::vector<double> idf_;
  std::vector<std::vector<TermFreq>> forward_;  // per sentence, sorted by term id
  double avgdl_ = 0.0;
};

enum class MatchingMode { kNone, kQuery, kContext, kQueryAndContext };

std::string_view mode_name(MatchingMode mode);
std::optional<MatchingMode> parse_mode(std::string_view name);

struct RetrievalOptions {
  MatchingMode mode = MatchingMode::kQueryAndContext;
  std::size_t top_k = 100;
  double f1_cap = 0.95;
  /// Treat every paragraph of the query's document as context for the
  /// "does not come from the context" check.
  bool exclude_document = false;
};

struct RetrievalCandidate {
  std::size_t sentence = 0;
  std::string sent_id;
  double score = 0.0;
  bool contains_answer = false;
  bool outside_context = false;
  bool below_f1_cap = false;
  bool aux_match_ok = false;

  bool accepted() const { return contains_answer && outside_context && below_f1_cap && aux_match_ok; }
};

/// Ranks with the full query sentence, keeps the top_k and evaluates every
/// constraint flag on each. `answer` must be one of the query's entities.
std::vector<RetrievalCandidate> evaluate_candidates(const Bm25Index& index, const Corpus& corpus,
                                                    std::size_t query_sentence, const Entity& answer,
                                                    const RetrievalOptions& options);

/// Highest-ranked candidate passing all constraints, if any.
std::optional<RetrievalCandidate> retrieve(const Bm25Index& index, const Corpus& corpus,
                                           std::string_view query_sent_id, const Entity& answer,
                                           const RetrievalOptions& options);
std::optional<RetrievalCandidate> retrieve(const Bm25Index& index, const Corpus& corpus,
                                           std::size_t query_sentence, const Entity& answer,
                                           const RetrievalOptions& options);

/// Throws DataError unless `index` was built from exactly this corpus.
void check_index_matches(const Bm25Index& index, const Corpus& corpus);

}  // namespace synthqa
