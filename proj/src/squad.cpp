#include "synthqa/squad.hpp"

#include <fstream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "synthqa/error.hpp"
#include "synthqa/utf8.hpp"

namespace synthqa {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::size_t SquadFile::question_count() const {
  std::size_t n = 0;
  for (const auto& a : data) {
    for (const auto& p : a.paragraphs) n += p.qas.size();
  }
  return n;
}

SquadFile read_squad(std::istream& in) {
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("SQuAD file: malformed JSON (") + e.what() + ")");
  }
  SquadFile f;
  try {
    if (j.contains("version") && j["version"].is_string()) f.version = j["version"].get<std::string>();
    for (const auto& ja : j.at("data")) {
      SquadArticle a;
      a.title = ja.value("title", std::string());
      for (const auto& jp : ja.at("paragraphs")) {
        SquadParagraph p;
        p.context = jp.at("context").get<std::string>();
        for (const auto& jq : jp.at("qas")) {
          SquadQuestion q;
          q.id = jq.at("id").is_string() ? jq.at("id").get<std::string>() : jq.at("id").dump();
          q.question = jq.at("question").get<std::string>();
          for (const auto& jans : jq.at("answers")) {
            q.answers.push_back({jans.at("text").get<std::string>(), jans.at("answer_start").get<std::size_t>()});
          }
          p.qas.push_back(std::move(q));
        }
        a.paragraphs.push_back(std::move(p));
      }
      f.data.push_back(std::move(a));
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("SQuAD file: unexpected shape (") + e.what() + ")");
  }
  return f;
}

SquadFile read_squad_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return read_squad(in);
}

void write_squad(std::ostream& out, const SquadFile& file) {
  ordered_json root;
  root["version"] = file.version;
  root["data"] = ordered_json::array();
  for (const auto& a : file.data) {
    ordered_json ja;
    ja["title"] = a.title;
    ja["paragraphs"] = ordered_json::array();
    for (const auto& p : a.paragraphs) {
      ordered_json jp;
      jp["context"] = p.context;
      jp["qas"] = ordered_json::array();
      for (const auto& q : p.qas) {
        ordered_json jq;
        jq["id"] = q.id;
        jq["question"] = q.question;
        jq["answers"] = ordered_json::array();
        for (const auto& ans : q.answers) {
          ordered_json jans;
          jans["text"] = ans.text;
          jans["answer_start"] = ans.answer_start;
          jq["answers"].push_back(std::move(jans));
        }
        jp["qas"].push_back(std::move(jq));
      }
      ja["paragraphs"].push_back(std::move(jp));
    }
    root["data"].push_back(std::move(ja));
  }
  out << root.dump() << '\n';
}

void check_examples(const std::vector<QAExample>& examples) {
  std::unordered_set<std::string> ids;
  for (const auto& ex : examples) {
    if (ex.question.empty()) throw DataError("example " + ex.qid + ": empty question");
    if (!ids.insert(ex.qid).second) throw DataError("example " + ex.qid + ": duplicate qid");
    const std::size_t len = utf8::length(ex.answer_text);
    const std::size_t ctx_len = utf8::length(ex.context);
    if (ex.answer_text.empty() || ex.answer_start + len > ctx_len ||
        utf8::slice(ex.context, ex.answer_start, ex.answer_start + len) != ex.answer_text) {
      throw DataError("example " + ex.qid + ": answer \"" + ex.answer_text + "\" is not found at offset " +
                      std::to_string(ex.answer_start) + " of its context");
    }
  }
}

SquadFile to_squad(const std::vector<QAExample>& examples, std::string_view title) {
  SquadFile f;
  SquadArticle a;
  a.title = std::string(title);
  for (const auto& ex : examples) {
    if (a.paragraphs.empty() || a.paragraphs.back().context != ex.context) {
      a.paragraphs.push_back({ex.context, {}});
    }
    a.paragraphs.back().qas.push_back({ex.qid, ex.question, {{ex.answer_text, ex.answer_start}}});
  }
  f.data.push_back(std::move(a));
  return f;
}

std::vector<QAExample> from_squad(const SquadFile& file) {
  std::vector<QAExample> out;
  for (const auto& a : file.data) {
    for (const auto& p : a.paragraphs) {
      for (const auto& q : p.qas) {
        if (q.answers.empty()) throw DataError("question " + q.id + " has no answers");
        out.push_back({q.id, p.context, q.question, q.answers.front().text, q.answers.front().answer_start});
      }
    }
  }
  return out;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw DataError("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw DataError("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
  }
}

void write_squad_json(const std::filesystem::path& path, const std::vector<QAExample>& examples,
                      std::string_view title) {
  check_examples(examples);
  std::ostringstream os;
  write_squad(os, to_squad(examples, title));
  write_file_atomic(path, os.str());
}

std::vector<QAExample> read_squad_examples(const std::filesystem::path& path) {
  return from_squad(read_squad_file(path));
}

}  // namespace synthqa
