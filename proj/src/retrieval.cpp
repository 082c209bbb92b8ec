#include "synthqa/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "synthqa/annotate.hpp"
#include "synthqa/error.hpp"
#include "synthqa/hash.hpp"
#include "synthqa/parallel.hpp"
#include "synthqa/text_metrics.hpp"
#include "synthqa/utf8.hpp"

namespace synthqa {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr std::string_view kIndexFormat = "synthqa-bm25-index";
constexpr int kIndexVersion = 1;

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << v;
  return os.str();
}

// Per-thread accumulator reused across rank() calls.
struct Scratch {
  std::vector<double> acc;
  std::vector<std::uint8_t> hit;
  std::vector<std::uint32_t> touched;

  void ensure(std::size_t n) {
    if (acc.size() < n) {
      acc.assign(n, 0.0);
      hit.assign(n, 0);
    }
  }
  void clear() {
    for (auto d : touched) {
      acc[d] = 0.0;
      hit[d] = 0;
    }
    touched.clear();
  }
};

Scratch& scratch() {
  thread_local Scratch s;
  return s;
}

}  // namespace

Bm25Index::SentenceTerms Bm25Index::count_terms(std::string_view text) {
  auto tokens = normalized_tokens(text);
  std::sort(tokens.begin(), tokens.end());
  SentenceTerms out;
  for (auto& t : tokens) {
    if (!out.empty() && out.back().first == t) {
      ++out.back().second;
    } else {
      out.emplace_back(std::move(t), 1);
    }
  }
  return out;
}

Bm25Index Bm25Index::assemble(std::vector<std::string> ids, std::vector<SentenceTerms> per_sentence,
                              Bm25Params params, std::uint64_t fingerprint) {
  Bm25Index idx;
  idx.params_ = params;
  idx.fingerprint_ = fingerprint;
  idx.sent_ids_ = std::move(ids);
  const std::size_t n = idx.sent_ids_.size();
  idx.doc_len_.resize(n);
  idx.forward_.resize(n);

  std::uint64_t total = 0;
  for (std::size_t d = 0; d < n; ++d) {
    std::uint32_t len = 0;
    auto& fwd = idx.forward_[d];
    for (auto& [term, tf] : per_sentence[d]) {
      auto [it, inserted] = idx.term_ids_.try_emplace(term, static_cast<std::uint32_t>(idx.terms_.size()));
      if (inserted) {
        idx.terms_.push_back(term);
        idx.postings_.emplace_back();
      }
      idx.postings_[it->second].push_back({static_cast<std::uint32_t>(d), tf});
      fwd.push_back({it->second, tf});
      len += tf;
    }
    std::sort(fwd.begin(), fwd.end(), [](const TermFreq& a, const TermFreq& b) { return a.term < b.term; });
    idx.doc_len_[d] = len;
    total += len;
  }
  idx.avgdl_ = n == 0 ? 0.0 : static_cast<double>(total) / static_cast<double>(n);

  const double k1 = params.k1;
  const double b = params.b;
  idx.length_norm_.resize(n);
  for (std::size_t d = 0; d < n; ++d) {
    const double dl = idx.doc_len_[d];
    idx.length_norm_[d] = idx.avgdl_ > 0.0 ? k1 * (1.0 - b + b * dl / idx.avgdl_) : k1 * (1.0 - b);
  }

  const double big_n = static_cast<double>(n);
  idx.idf_.resize(idx.terms_.size());
  for (std::size_t t = 0; t < idx.terms_.size(); ++t) {
    const double df = static_cast<double>(idx.postings_[t].size());
    idx.idf_[t] = std::log(1.0 + (big_n - df + 0.5) / (df + 0.5));
  }

  idx.by_id_.resize(n);
  for (std::size_t d = 0; d < n; ++d) idx.by_id_[d] = static_cast<std::uint32_t>(d);
  std::sort(idx.by_id_.begin(), idx.by_id_.end(),
            [&](std::uint32_t a, std::uint32_t b2) { return idx.sent_ids_[a] < idx.sent_ids_[b2]; });
  idx.id_rank_.resize(n);
  for (std::size_t r = 0; r < n; ++r) idx.id_rank_[idx.by_id_[r]] = static_cast<std::uint32_t>(r);
  return idx;
}

Bm25Index Bm25Index::build_serial(const Corpus& corpus, Bm25Params params) {
  const auto& sentences = corpus.sentences();
  std::vector<std::string> ids;
  std::vector<SentenceTerms> terms;
  ids.reserve(sentences.size());
  terms.reserve(sentences.size());
  for (const auto& s : sentences) {
    ids.push_back(s.sent_id);
    terms.push_back(count_terms(s.text));
  }
  return assemble(std::move(ids), std::move(terms), params, corpus.fingerprint());
}

Bm25Index Bm25Index::build(const Corpus& corpus, int jobs, Bm25Params params) {
  const auto& sentences = corpus.sentences();
  const auto n = static_cast<std::ptrdiff_t>(sentences.size());
  std::vector<std::string> ids(sentences.size());
  std::vector<SentenceTerms> terms(sentences.size());
  ExceptionSlot slot;
#pragma omp parallel for schedule(static) num_threads(resolve_jobs(jobs))
  for (std::ptrdiff_t d = 0; d < n; ++d) {
    slot.run([&] {
      ids[d] = sentences[d].sent_id;
      terms[d] = count_terms(sentences[d].text);
    });
  }
  slot.rethrow();
  return assemble(std::move(ids), std::move(terms), params, corpus.fingerprint());
}

void Bm25Index::save(std::ostream& out) const {
  ordered_json header;
  header["format"] = kIndexFormat;
  header["version"] = kIndexVersion;
  header["k1"] = params_.k1;
  header["b"] = params_.b;
  header["sentences"] = sent_ids_.size();
  header["fingerprint"] = hex64(fingerprint_);
  out << header.dump() << '\n';
  for (std::size_t d = 0; d < sent_ids_.size(); ++d) {
    std::vector<std::pair<std::string_view, std::uint32_t>> row;
    row.reserve(forward_[d].size());
    for (const auto& tf : forward_[d]) row.emplace_back(terms_[tf.term], tf.tf);
    std::sort(row.begin(), row.end());
    ordered_json rec;
    rec["sent_id"] = sent_ids_[d];
    ordered_json arr = ordered_json::array();
    for (const auto& [term, tf] : row) arr.push_back(ordered_json::array({std::string(term), tf}));
    rec["terms"] = std::move(arr);
    out << rec.dump() << '\n';
  }
}

Bm25Index Bm25Index::load(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("index: empty file");
  json header;
  try {
    header = json::parse(line);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("index: malformed header (") + e.what() + ")");
  }
  if (!header.is_object() || header.value("format", std::string()) != kIndexFormat) {
    throw DataError("index: not a BM25 index snapshot");
  }
  if (header.value("version", 0) != kIndexVersion) throw DataError("index: unsupported snapshot version");
  Bm25Params params{header.value("k1", 1.2), header.value("b", 0.75)};
  const auto expected = header.value("sentences", std::size_t{0});
  const std::uint64_t fingerprint = std::stoull(header.value("fingerprint", std::string("0")), nullptr, 16);

  std::vector<std::string> ids;
  std::vector<SentenceTerms> terms;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::string where = "index line " + std::to_string(lineno);
    try {
      const json rec = json::parse(line);
      ids.push_back(rec.at("sent_id").get<std::string>());
      SentenceTerms row;
      for (const auto& pair : rec.at("terms")) {
        row.emplace_back(pair.at(0).get<std::string>(), pair.at(1).get<std::uint32_t>());
      }
      terms.push_back(std::move(row));
    } catch (const json::exception& e) {
      throw DataError(where + ": " + e.what());
    }
  }
  if (ids.size() != expected) {
    throw DataError("index: header declares " + std::to_string(expected) + " sentences, found " +
                    std::to_string(ids.size()));
  }
  return assemble(std::move(ids), std::move(terms), params, fingerprint);
}

bool operator==(const Bm25Index& a, const Bm25Index& b) {
  if (a.params_.k1 != b.params_.k1 || a.params_.b != b.params_.b) return false;
  if (a.fingerprint_ != b.fingerprint_ || a.sent_ids_ != b.sent_ids_ || a.doc_len_ != b.doc_len_) return false;
  if (a.terms_ != b.terms_ || a.postings_ != b.postings_ || a.idf_ != b.idf_) return false;
  return a.avgdl_ == b.avgdl_ && a.length_norm_ == b.length_norm_;
}

std::size_t Bm25Index::df(std::string_view token) const { return postings(token).size(); }

double Bm25Index::idf(std::string_view token) const {
  auto it = term_ids_.find(std::string(token));
  if (it != term_ids_.end()) return idf_[it->second];
  const double n = static_cast<double>(size());
  return std::log(1.0 + (n + 0.5) / 0.5);
}

std::optional<std::size_t> Bm25Index::find(std::string_view sent_id) const {
  auto it = std::lower_bound(by_id_.begin(), by_id_.end(), sent_id,
                             [&](std::uint32_t d, std::string_view id) { return sent_ids_[d] < id; });
  if (it == by_id_.end() || sent_ids_[*it] != sent_id) return std::nullopt;
  return *it;
}

std::span<const Bm25Index::Posting> Bm25Index::postings(std::string_view token) const {
  auto it = term_ids_.find(std::string(token));
  if (it == term_ids_.end()) return {};
  return postings_[it->second];
}

std::vector<std::int64_t> Bm25Index::resolve(std::span<const std::string> query) const {
  std::vector<std::int64_t> ids;
  ids.reserve(query.size());
  for (const auto& t : query) {
    auto it = term_ids_.find(t);
    ids.push_back(it == term_ids_.end() ? -1 : static_cast<std::int64_t>(it->second));
  }
  return ids;
}

double Bm25Index::contribution(double idf, std::uint32_t tf, std::size_t sentence) const {
  const double f = tf;
  return idf * (f * (params_.k1 + 1.0)) / (f + length_norm_[sentence]);
}

std::uint32_t Bm25Index::tf_of(std::size_t sentence, std::uint32_t term) const {
  const auto& fwd = forward_[sentence];
  auto it = std::lower_bound(fwd.begin(), fwd.end(), term, [](const TermFreq& a, std::uint32_t t) { return a.term < t; });
  return (it != fwd.end() && it->term == term) ? it->tf : 0;
}

double Bm25Index::score(std::span<const std::string> query, std::size_t sentence) const {
  if (sentence >= size()) throw DataError("bm25: sentence ordinal out of range");
  double s = 0.0;
  for (auto term : resolve(query)) {
    if (term < 0) continue;
    const auto t = static_cast<std::uint32_t>(term);
    if (const std::uint32_t tf = tf_of(sentence, t)) s += contribution(idf_[t], tf, sentence);
  }
  return s;
}

double Bm25Index::score(std::span<const std::string> query, std::string_view id) const {
  const auto d = find(id);
  if (!d) throw DataError("bm25: unknown sent_id \"" + std::string(id) + "\"");
  return score(query, *d);
}

std::vector<double> Bm25Index::score_all_serial(std::span<const std::string> query) const {
  std::vector<double> acc(size(), 0.0);
  for (auto term : resolve(query)) {
    if (term < 0) continue;
    const double w = idf_[static_cast<std::size_t>(term)];
    for (const auto& p : postings_[static_cast<std::size_t>(term)]) acc[p.sentence] += contribution(w, p.tf, p.sentence);
  }
  return acc;
}

std::vector<double> Bm25Index::score_all_parallel(std::span<const std::string> query, int jobs) const {
  const auto terms = resolve(query);
  const std::size_t n = size();
  std::vector<double> acc(n, 0.0);
  const int threads = resolve_jobs(jobs);
  // Term-at-a-time inside disjoint sentence ranges; each sentence still sees
  // its contributions in query order.
  const auto chunks = static_cast<std::ptrdiff_t>(std::min<std::size_t>(n, static_cast<std::size_t>(threads) * 4));
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (std::ptrdiff_t c = 0; c < chunks; ++c) {
    const auto lo = static_cast<std::uint32_t>(n * static_cast<std::size_t>(c) / static_cast<std::size_t>(chunks));
    const auto hi = static_cast<std::uint32_t>(n * static_cast<std::size_t>(c + 1) / static_cast<std::size_t>(chunks));
    for (auto term : terms) {
      if (term < 0) continue;
      const double w = idf_[static_cast<std::size_t>(term)];
      const auto& plist = postings_[static_cast<std::size_t>(term)];
      auto it = std::lower_bound(plist.begin(), plist.end(), lo,
                                 [](const Posting& p, std::uint32_t d) { return p.sentence < d; });
      for (; it != plist.end() && it->sentence < hi; ++it) acc[it->sentence] += contribution(w, it->tf, it->sentence);
    }
  }
  return acc;
}

double Bm25Index::token_f1(std::size_t a, std::size_t b) const {
  const std::size_t la = doc_len_.at(a), lb = doc_len_.at(b);
  if (la == 0 && lb == 0) return 1.0;
  if (la == 0 || lb == 0) return 0.0;
  const auto& fa = forward_[a];
  const auto& fb = forward_[b];
  std::size_t common = 0;
  for (std::size_t i = 0, j = 0; i < fa.size() && j < fb.size();) {
    if (fa[i].term < fb[j].term) {
      ++i;
    } else if (fb[j].term < fa[i].term) {
      ++j;
    } else {
      common += std::min(fa[i].tf, fb[j].tf);
      ++i;
      ++j;
    }
  }
  return static_cast<double>(2 * common) / static_cast<double>(la + lb);
}

std::vector<ScoredSentence> Bm25Index::rank(std::span<const std::string> query, std::size_t top_k) const {
  std::vector<ScoredSentence> out;
  if (top_k == 0 || size() == 0) return out;
  Scratch& sc = scratch();
  sc.ensure(size());
  for (auto term : resolve(query)) {
    if (term < 0) continue;
    const double w = idf_[static_cast<std::size_t>(term)];
    for (const auto& p : postings_[static_cast<std::size_t>(term)]) {
      if (!sc.hit[p.sentence]) {
        sc.hit[p.sentence] = 1;
        sc.touched.push_back(p.sentence);
      }
      sc.acc[p.sentence] += contribution(w, p.tf, p.sentence);
    }
  }
  out.reserve(std::min(top_k, size()));
  std::vector<ScoredSentence> hits;
  hits.reserve(sc.touched.size());
  for (auto d : sc.touched) hits.push_back({d, sc.acc[d]});
  auto before = [this](const ScoredSentence& a, const ScoredSentence& b) { return ranks_before(a, b); };
  if (hits.size() > top_k) {
    std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(top_k), hits.end(), before);
    hits.resize(top_k);
  } else {
    std::sort(hits.begin(), hits.end(), before);
  }
  out = std::move(hits);
  // Zero-score sentences fill the remainder in sent_id order.
  for (std::size_t r = 0; r < by_id_.size() && out.size() < top_k; ++r) {
    if (!sc.hit[by_id_[r]]) out.push_back({by_id_[r], 0.0});
  }
  sc.clear();
  return out;
}

std::string_view mode_name(MatchingMode mode) {
  switch (mode) {
    case MatchingMode::kNone: return "none";
    case MatchingMode::kQuery: return "query";
    case MatchingMode::kContext: return "context";
    case MatchingMode::kQueryAndContext: return "both";
  }
  return "none";
}

std::optional<MatchingMode> parse_mode(std::string_view name) {
  const std::string n = utf8::to_lower(name);
  if (n == "none") return MatchingMode::kNone;
  if (n == "query") return MatchingMode::kQuery;
  if (n == "context") return MatchingMode::kContext;
  if (n == "both" || n == "query_and_context" || n == "query-and-context") return MatchingMode::kQueryAndContext;
  return std::nullopt;
}

void check_index_matches(const Bm25Index& index, const Corpus& corpus) {
  if (index.size() != corpus.sentences().size()) {
    throw DataError("index covers " + std::to_string(index.size()) + " sentences but the corpus has " +
                    std::to_string(corpus.sentences().size()));
  }
  if (index.corpus_fingerprint() != corpus.fingerprint()) {
    throw DataError("index was built from a different corpus (fingerprint mismatch)");
  }
}

namespace {

bool shares_additional(const std::vector<Entity>& retrieved, const Entity& answer,
                       std::span<const Entity* const> pool) {
  for (const auto& e : retrieved) {
    if (utf8::iequals(e.surface, answer.surface)) continue;
    for (const Entity* f : pool) {
      if (entities_match(e, *f)) return true;
    }
  }
  return false;
}

}  // namespace

namespace {

// Flag evaluation for one query; pools are built once and reused per hit.
class CandidateJudge {
 public:
  CandidateJudge(const Bm25Index& index, const Corpus& corpus, std::size_t query_sentence, const Entity& answer,
                 const RetrievalOptions& options)
      : index_(index), corpus_(corpus), q_(query_sentence), answer_(answer), options_(options) {
    const auto& sentences = corpus.sentences();
    if (index.size() != sentences.size()) throw DataError("retrieve: index and corpus sizes differ");
    if (query_sentence >= sentences.size()) throw DataError("retrieve: query sentence out of range");
    const auto& query = sentences[query_sentence];
    if (index.sent_id(query_sentence) != query.sent_id) throw DataError("retrieve: index and corpus disagree on ids");
    if (std::find(query.entities.begin(), query.entities.end(), answer) == query.entities.end()) {
      throw DataError("retrieve: answer \"" + answer.surface + "\" is not an entity of sentence " + query.sent_id);
    }
    for (const auto& e : query.entities) query_pool_.push_back(&e);
    for (const auto& s : corpus.paragraph_sentences(corpus.paragraph_of(query_sentence))) {
      for (const auto& e : s.entities) context_pool_.push_back(&e);
    }
  }

  RetrievalCandidate operator()(const ScoredSentence& hit) const {
    const auto& query = corpus_.sentences()[q_];
    const auto& r = corpus_.sentences()[hit.sentence];
    if (index_.sent_id(hit.sentence) != r.sent_id) throw DataError("retrieve: index and corpus disagree on ids");
    RetrievalCandidate c;
    c.sentence = hit.sentence;
    c.sent_id = r.sent_id;
    c.score = hit.score;
    c.contains_answer = std::any_of(r.entities.begin(), r.entities.end(),
                                    [&](const Entity& e) { return entities_match(e, answer_); });
    c.outside_context = options_.exclude_document ? r.doc_id != query.doc_id
                                                  : (r.doc_id != query.doc_id || r.para_index != query.para_index);
    c.below_f1_cap = index_.token_f1(hit.sentence, q_) < options_.f1_cap;
    switch (options_.mode) {
      case MatchingMode::kNone:
        c.aux_match_ok = true;
        break;
      case MatchingMode::kQuery:
        c.aux_match_ok = shares_additional(r.entities, answer_, query_pool_);
        break;
      case MatchingMode::kContext:
        c.aux_match_ok = shares_additional(r.entities, answer_, context_pool_);
        break;
      case MatchingMode::kQueryAndContext:
        c.aux_match_ok =
            shares_additional(r.entities, answer_, query_pool_) && shares_additional(r.entities, answer_, context_pool_);
        break;
    }
    return c;
  }

 private:
  const Bm25Index& index_;
  const Corpus& corpus_;
  std::size_t q_;
  const Entity& answer_;
  const RetrievalOptions& options_;
  std::vector<const Entity*> query_pool_;
  std::vector<const Entity*> context_pool_;
};

std::vector<ScoredSentence> ranked_hits(const Bm25Index& index, const Corpus& corpus, std::size_t query_sentence,
                                        std::size_t top_k) {
  return index.rank(normalized_tokens(corpus.sentences()[query_sentence].text), top_k);
}

}  // namespace

std::vector<RetrievalCandidate> evaluate_candidates(const Bm25Index& index, const Corpus& corpus,
                                                    std::size_t query_sentence, const Entity& answer,
                                                    const RetrievalOptions& options) {
  const CandidateJudge judge(index, corpus, query_sentence, answer, options);
  std::vector<RetrievalCandidate> out;
  for (const auto& hit : ranked_hits(index, corpus, query_sentence, options.top_k)) out.push_back(judge(hit));
  return out;
}

std::optional<RetrievalCandidate> retrieve(const Bm25Index& index, const Corpus& corpus,
                                           std::size_t query_sentence, const Entity& answer,
                                           const RetrievalOptions& options) {
  const CandidateJudge judge(index, corpus, query_sentence, answer, options);
  for (const auto& hit : ranked_hits(index, corpus, query_sentence, options.top_k)) {
    RetrievalCandidate c = judge(hit);
    if (c.accepted()) return c;
  }
  return std::nullopt;
}

std::optional<RetrievalCandidate> retrieve(const Bm25Index& index, const Corpus& corpus,
                                           std::string_view query_sent_id, const Entity& answer,
                                           const RetrievalOptions& options) {
  return retrieve(index, corpus, corpus.index_of(query_sent_id), answer, options);
}

}  // namespace synthqa
