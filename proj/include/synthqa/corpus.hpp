#pragma once

// Document ingest, sentence splitting and the persisted sentence store.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace synthqa {

/// A named-entity mention. Offsets are sentence-relative and count Unicode
/// scalar values; `char_end` is exclusive.
struct Entity {
  std::string surface;
  std::size_t char_start = 0;
  std::size_t char_end = 0;
  std::string label;

  friend bool operator==(const Entity&, const Entity&) = default;
};

struct Document {
  std::string doc_id;
  std::string title;
  std::vector<std::string> paragraphs;
};

struct AnnotatedSentence {
  std::string sent_id;
  std::string doc_id;
  std::size_t para_index = 0;
  std::string text;
  std::size_t para_char_start = 0;  // scalar values into the paragraph
  std::vector<Entity> entities;     // sorted by char_start

  friend bool operator==(const AnnotatedSentence&, const AnnotatedSentence&) = default;
};

/// One output of split_sentences.
struct SentenceSpan {
  std::string text;
  std::size_t para_char_start = 0;

  friend bool operator==(const SentenceSpan&, const SentenceSpan&) = default;
};

/// Rule-based splitter: breaks after . ? or ! (plus closing quotes or
/// brackets) when whitespace and then an uppercase letter or digit follow,
/// possibly behind an opening quote or bracket.
/// Known abbreviations and single-initial tokens ("J.") never end a sentence.
std::vector<SentenceSpan> split_sentences(std::string_view paragraph);

enum class CorpusFormat { kJsonLines };

struct ContextRef {
  const std::string& paragraph;
  const std::string& doc_id;
  std::size_t para_index;
};

/// All sentences of a corpus, grouped contiguously by paragraph in ingest
/// order. Immutable once built apart from entity attachment.
class Corpus {
 public:
  struct Paragraph {
    std::string doc_id;
    std::size_t para_index = 0;
    std::string text;
    std::size_t first_sentence = 0;
    std::size_t sentence_count = 0;
  };

  Corpus() = default;

  /// Reads documents (one JSON object per line). Blank lines are skipped.
  static Corpus ingest(std::istream& in, CorpusFormat format = CorpusFormat::kJsonLines);
  static Corpus from_documents(const std::vector<Document>& docs);

  /// Sentence store round trip. The store is line-delimited JSON: a header
  /// line, then one record per sentence.
  static Corpus load_store(std::istream& in);
  void save_store(std::ostream& out) const;

  const std::vector<AnnotatedSentence>& sentences() const { return sentences_; }
  const std::vector<Paragraph>& paragraphs() const { return paragraphs_; }

  std::optional<std::size_t> find(std::string_view sent_id) const;
  /// Throws DataError for unknown ids.
  std::size_t index_of(std::string_view sent_id) const;
  const AnnotatedSentence& sentence(std::string_view sent_id) const;

  ContextRef get_context(std::string_view sent_id) const;

  std::size_t paragraph_of(std::size_t sentence) const { return sentence_paragraph_[sentence]; }
  std::span<const AnnotatedSentence> paragraph_sentences(std::size_t paragraph) const;

  void set_entities(std::size_t sentence, std::vector<Entity> entities);
  bool annotated() const { return annotated_; }
  void mark_annotated() { annotated_ = true; }

  /// FNV-1a over sentence ids and texts, used to pair an index with the
  /// corpus it was built from.
  std::uint64_t fingerprint() const;

 private:
  void add_paragraph(const std::string& doc_id, std::size_t para_index, std::string text,
                     std::vector<SentenceSpan> spans);
  void rebuild_lookup();

  std::vector<Paragraph> paragraphs_;
  std::vector<AnnotatedSentence> sentences_;
  std::vector<std::size_t> sentence_paragraph_;
  std::unordered_map<std::string, std::size_t> by_id_;
  bool annotated_ = false;
};

std::string make_sent_id(std::string_view doc_id, std::size_t para_index, std::size_t sentence_index);

}  // namespace synthqa
