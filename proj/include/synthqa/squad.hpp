#pragma once

// SQuAD v1.1 file model and JSON I/O. Character offsets are Unicode scalar
// values, matching Python string indexing in the reference tooling.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace synthqa {

struct QAExample {
  std::string qid;
  std::string context;
  std::string question;
  std::string answer_text;
  std::size_t answer_start = 0;

  friend bool operator==(const QAExample&, const QAExample&) = default;
};

struct SquadAnswer {
  std::string text;
  std::size_t answer_start = 0;
};

struct SquadQuestion {
  std::string id;
  std::string question;
  std::vector<SquadAnswer> answers;
};

struct SquadParagraph {
  std::string context;
  std::vector<SquadQuestion> qas;
};

struct SquadArticle {
  std::string title;
  std::vector<SquadParagraph> paragraphs;
};

struct SquadFile {
  std::string version = "1.1";
  std::vector<SquadArticle> data;

  std::size_t question_count() const;
};

SquadFile read_squad(std::istream& in);
SquadFile read_squad_file(const std::filesystem::path& path);
void write_squad(std::ostream& out, const SquadFile& file);

/// Throws DataError naming the first example whose answer is not the
/// context substring at answer_start, whose question is empty, or whose
/// qid repeats.
void check_examples(const std::vector<QAExample>& examples);

/// One article titled `title`; consecutive examples with the same context
/// share a paragraph object.
SquadFile to_squad(const std::vector<QAExample>& examples, std::string_view title);

/// Flattens a file into examples, one per question, using its first answer.
std::vector<QAExample> from_squad(const SquadFile& file);

/// Validates, then writes through a temporary file renamed into place, so a
/// refused write leaves nothing behind.
void write_squad_json(const std::filesystem::path& path, const std::vector<QAExample>& examples,
                      std::string_view title);
std::vector<QAExample> read_squad_examples(const std::filesystem::path& path);

/// Atomically replaces `path` with `contents`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace synthqa
