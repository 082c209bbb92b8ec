#include "synthqa/corpus.hpp"

#include <algorithm>
#include <array>
#include <istream>
#include <ostream>
#include <set>

#include <json.hpp>

#include "synthqa/error.hpp"
#include "synthqa/hash.hpp"
#include "synthqa/utf8.hpp"

namespace synthqa {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr std::string_view kStoreFormat = "synthqa-sentence-store";
constexpr int kStoreVersion = 1;

const std::set<std::u32string>& abbreviations() {
  static const std::set<std::u32string> kList = {
      U"Mr.",   U"Mrs.",  U"Ms.",   U"Dr.",  U"Prof.", U"Sr.",   U"Jr.",   U"St.",  U"Mt.",
      U"Ft.",   U"Gen.",  U"Col.",  U"Lt.",  U"Sgt.",  U"Capt.", U"Gov.",  U"Sen.", U"Rep.",
      U"Rev.",  U"Hon.",  U"vs.",   U"etc.", U"approx.", U"Inc.", U"Ltd.", U"Co.",  U"Corp.",
      U"No.",   U"Vol.",  U"Fig.",  U"Ph.D.", U"e.g.", U"i.e.",  U"cf.",   U"Jan.", U"Feb.",
      U"Aug.",  U"Sept.", U"Oct.",  U"Nov.", U"Dec.",  U"Ave.",  U"Blvd.", U"Dept.", U"Univ."};
  return kList;
}

bool is_closer(char32_t c) {
  return c == U'"' || c == U'\'' || c == U')' || c == U']' || c == 0x201D || c == 0x2019 || c == 0xBB;
}

bool is_opener(char32_t c) {
  return c == U'"' || c == U'\'' || c == U'(' || c == U'[' || c == 0x201C || c == 0x2018 || c == 0xAB;
}

bool is_digit(char32_t c) { return c >= U'0' && c <= U'9'; }
bool is_alpha(char32_t c) { return utf8::is_word(c) && !is_digit(c) && c != U'_'; }

// Single letters separated by periods: "J.", "U.S.", "a.m."
bool is_initialism(std::u32string_view tok) {
  if (tok.size() < 2 || tok.size() % 2 != 0) return false;
  for (std::size_t i = 0; i < tok.size(); i += 2) {
    if (!is_alpha(tok[i]) || tok[i + 1] != U'.') return false;
  }
  return tok.size() > 2 || utf8::is_upper(tok[0]);
}

// `dot` is the index of a '.' in `cps`; `floor` the start of the current sentence.
bool is_abbreviation(const std::u32string& cps, std::size_t floor, std::size_t dot) {
  std::size_t b = dot;
  while (b > floor && !utf8::is_space(cps[b - 1])) --b;
  while (b < dot && is_opener(cps[b])) ++b;
  const std::u32string_view tok(cps.data() + b, dot + 1 - b);
  return abbreviations().contains(std::u32string(tok)) || is_initialism(tok);
}

std::string field_string(const json& rec, const char* key, const std::string& where) {
  auto it = rec.find(key);
  if (it == rec.end() || !it->is_string()) {
    throw DataError(where + ": missing or non-string field \"" + key + "\"");
  }
  return it->get<std::string>();
}

std::size_t field_index(const json& rec, const char* key, const std::string& where) {
  auto it = rec.find(key);
  if (it == rec.end() || !it->is_number_integer() || it->get<long long>() < 0) {
    throw DataError(where + ": missing or invalid integer field \"" + key + "\"");
  }
  return it->get<std::size_t>();
}

json parse_line(const std::string& line, const std::string& where) {
  try {
    return json::parse(line);
  } catch (const json::parse_error& e) {
    throw DataError(where + ": malformed JSON (" + e.what() + ")");
  }
}

bool blank(const std::string& line) {
  return std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); });
}

std::vector<Entity> entities_from_json(const json& arr, const std::string& where) {
  std::vector<Entity> out;
  if (!arr.is_array()) throw DataError(where + ": \"entities\" must be an array");
  for (const auto& e : arr) {
    Entity ent;
    ent.surface = field_string(e, "surface", where);
    ent.char_start = field_index(e, "start", where);
    ent.char_end = field_index(e, "end", where);
    ent.label = field_string(e, "label", where);
    out.push_back(std::move(ent));
  }
  return out;
}

}  // namespace

std::string make_sent_id(std::string_view doc_id, std::size_t para_index, std::size_t sentence_index) {
  std::string id(doc_id);
  id += ':';
  id += std::to_string(para_index);
  id += ':';
  id += std::to_string(sentence_index);
  return id;
}

std::vector<SentenceSpan> split_sentences(std::string_view paragraph) {
  const std::u32string cps = utf8::decode(paragraph);
  const std::size_t n = cps.size();
  std::vector<SentenceSpan> out;

  auto emit = [&](std::size_t b, std::size_t e) {
    while (e > b && utf8::is_space(cps[e - 1])) --e;
    if (e > b) out.push_back({utf8::encode(std::u32string_view(cps.data() + b, e - b)), b});
  };

  std::size_t start = 0;
  while (start < n && utf8::is_space(cps[start])) ++start;

  for (std::size_t pos = start; pos < n; ++pos) {
    const char32_t c = cps[pos];
    if (c != U'.' && c != U'?' && c != U'!') continue;
    std::size_t end = pos + 1;
    while (end < n && is_closer(cps[end])) ++end;
    std::size_t next = end;
    while (next < n && utf8::is_space(cps[next])) ++next;
    if (next == end || next == n) continue;
    std::size_t first = next;
    while (first < n && is_opener(cps[first])) ++first;
    if (first == n || (!utf8::is_upper(cps[first]) && !is_digit(cps[first]))) continue;
    if (c == U'.' && is_abbreviation(cps, start, pos)) continue;
    emit(start, end);
    start = next;
    pos = next - 1;
  }
  if (start < n) emit(start, n);
  return out;
}

void Corpus::add_paragraph(const std::string& doc_id, std::size_t para_index, std::string text,
                           std::vector<SentenceSpan> spans) {
  Paragraph p;
  p.doc_id = doc_id;
  p.para_index = para_index;
  p.text = std::move(text);
  p.first_sentence = sentences_.size();
  p.sentence_count = spans.size();
  const std::size_t para_ordinal = paragraphs_.size();
  for (std::size_t i = 0; i < spans.size(); ++i) {
    AnnotatedSentence s;
    s.sent_id = make_sent_id(doc_id, para_index, i);
    s.doc_id = doc_id;
    s.para_index = para_index;
    s.text = std::move(spans[i].text);
    s.para_char_start = spans[i].para_char_start;
    sentences_.push_back(std::move(s));
    sentence_paragraph_.push_back(para_ordinal);
  }
  paragraphs_.push_back(std::move(p));
}

void Corpus::rebuild_lookup() {
  by_id_.clear();
  by_id_.reserve(sentences_.size());
  for (std::size_t i = 0; i < sentences_.size(); ++i) {
    if (!by_id_.emplace(sentences_[i].sent_id, i).second) {
      throw DataError("duplicate sent_id \"" + sentences_[i].sent_id + "\"");
    }
  }
}

Corpus Corpus::from_documents(const std::vector<Document>& docs) {
  Corpus c;
  std::set<std::string> seen;
  for (const auto& doc : docs) {
    if (doc.doc_id.empty()) throw DataError("document with empty doc_id");
    if (!seen.insert(doc.doc_id).second) throw DataError("duplicate doc_id \"" + doc.doc_id + "\"");
    for (std::size_t p = 0; p < doc.paragraphs.size(); ++p) {
      auto spans = split_sentences(doc.paragraphs[p]);
      if (spans.empty()) {
        throw DataError("document \"" + doc.doc_id + "\" paragraph " + std::to_string(p) + " is empty");
      }
      c.add_paragraph(doc.doc_id, p, doc.paragraphs[p], std::move(spans));
    }
  }
  c.rebuild_lookup();
  return c;
}

Corpus Corpus::ingest(std::istream& in, CorpusFormat format) {
  if (format != CorpusFormat::kJsonLines) throw UsageError("unsupported corpus format");
  std::vector<Document> docs;
  std::set<std::string> ids;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (blank(line)) continue;
    const std::string where = "corpus line " + std::to_string(lineno);
    const json rec = parse_line(line, where);
    if (!rec.is_object()) throw DataError(where + ": expected a JSON object");
    Document doc;
    doc.doc_id = field_string(rec, "doc_id", where);
    if (!ids.insert(doc.doc_id).second) throw DataError(where + ": duplicate doc_id \"" + doc.doc_id + "\"");
    doc.title = rec.contains("title") && rec["title"].is_string() ? rec["title"].get<std::string>() : "";
    auto it = rec.find("paragraphs");
    if (it == rec.end() || !it->is_array()) throw DataError(where + ": missing \"paragraphs\" array");
    for (const auto& p : *it) {
      if (!p.is_string()) throw DataError(where + ": paragraph is not a string");
      doc.paragraphs.push_back(p.get<std::string>());
      if (!utf8::is_valid(doc.paragraphs.back())) throw DataError(where + ": paragraph is not valid UTF-8");
      if (blank(doc.paragraphs.back())) {
        throw DataError(where + ": paragraph " + std::to_string(doc.paragraphs.size() - 1) + " is empty");
      }
    }
    docs.push_back(std::move(doc));
  }
  try {
    return from_documents(docs);
  } catch (const DataError& e) {
    throw DataError(std::string("corpus: ") + e.what());
  }
}

void Corpus::save_store(std::ostream& out) const {
  ordered_json header;
  header["format"] = kStoreFormat;
  header["version"] = kStoreVersion;
  header["offset_unit"] = "unicode_scalar";
  header["annotated"] = annotated_;
  out << header.dump() << '\n';
  for (const auto& para : paragraphs_) {
    std::size_t cursor_byte = 0;
    for (std::size_t k = 0; k < para.sentence_count; ++k) {
      const auto& s = sentences_[para.first_sentence + k];
      const std::size_t b = utf8::byte_offset(para.text, s.para_char_start);
      ordered_json rec;
      rec["sent_id"] = s.sent_id;
      rec["doc_id"] = s.doc_id;
      rec["para_index"] = s.para_index;
      rec["para_char_start"] = s.para_char_start;
      rec["text"] = s.text;
      if (b > cursor_byte) rec["gap"] = para.text.substr(cursor_byte, b - cursor_byte);
      cursor_byte = b + s.text.size();
      if (k + 1 == para.sentence_count && cursor_byte < para.text.size()) {
        rec["tail"] = para.text.substr(cursor_byte);
      }
      if (annotated_) {
        ordered_json ents = ordered_json::array();
        for (const auto& e : s.entities) {
          ordered_json je;
          je["surface"] = e.surface;
          je["start"] = e.char_start;
          je["end"] = e.char_end;
          je["label"] = e.label;
          ents.push_back(std::move(je));
        }
        rec["entities"] = std::move(ents);
      }
      out << rec.dump() << '\n';
    }
  }
}

Corpus Corpus::load_store(std::istream& in) {
  Corpus c;
  std::string line;
  std::size_t lineno = 0;

  struct Pending {
    std::string doc_id;
    std::size_t para_index = 0;
    std::string text;
    std::size_t cp_len = 0;
    std::vector<SentenceSpan> spans;
    std::vector<std::string> ids;
    std::vector<std::vector<Entity>> entities;
    bool open = false;
  } cur;
  std::set<std::pair<std::string, std::size_t>> closed;

  auto flush = [&]() {
    if (!cur.open) return;
    const std::size_t first = c.sentences_.size();
    c.add_paragraph(cur.doc_id, cur.para_index, std::move(cur.text), std::move(cur.spans));
    for (std::size_t k = 0; k < cur.ids.size(); ++k) {
      c.sentences_[first + k].sent_id = std::move(cur.ids[k]);
      c.sentences_[first + k].entities = std::move(cur.entities[k]);
    }
    closed.emplace(cur.doc_id, cur.para_index);
    cur = Pending{};
  };

  bool saw_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (blank(line)) continue;
    const std::string where = "sentence store line " + std::to_string(lineno);
    const json rec = parse_line(line, where);
    if (!rec.is_object()) throw DataError(where + ": expected a JSON object");
    if (rec.contains("format")) {
      if (saw_header || lineno != 1) throw DataError(where + ": unexpected header record");
      saw_header = true;
      if (rec["format"] != kStoreFormat) throw DataError(where + ": not a sentence store");
      if (rec.value("offset_unit", std::string("unicode_scalar")) != "unicode_scalar") {
        throw DataError(where + ": unsupported offset_unit");
      }
      c.annotated_ = rec.value("annotated", false);
      continue;
    }
    const std::string sent_id = field_string(rec, "sent_id", where);
    const std::string doc_id = field_string(rec, "doc_id", where);
    const std::size_t para_index = field_index(rec, "para_index", where);
    const std::size_t start = field_index(rec, "para_char_start", where);
    const std::string text = field_string(rec, "text", where);
    if (text.empty() || !utf8::is_valid(text)) throw DataError(where + ": empty or invalid sentence text");

    if (!cur.open || cur.doc_id != doc_id || cur.para_index != para_index) {
      flush();
      if (closed.contains({doc_id, para_index})) {
        throw DataError(where + ": paragraph " + doc_id + "/" + std::to_string(para_index) +
                        " is not contiguous in the store");
      }
      cur.open = true;
      cur.doc_id = doc_id;
      cur.para_index = para_index;
    }
    std::string gap = rec.contains("gap") ? field_string(rec, "gap", where) : std::string();
    const std::size_t gap_len = utf8::length(gap);
    if (!rec.contains("gap") && start > cur.cp_len) {
      gap.assign(start - cur.cp_len, ' ');
    } else if (cur.cp_len + gap_len != start) {
      throw DataError(where + ": para_char_start " + std::to_string(start) +
                      " does not match the reconstructed paragraph offset " + std::to_string(cur.cp_len + gap_len));
    }
    cur.text += gap;
    cur.cp_len = start;
    cur.spans.push_back({text, start});
    cur.text += text;
    cur.cp_len += utf8::length(text);
    if (rec.contains("tail")) {
      const std::string tail = field_string(rec, "tail", where);
      cur.text += tail;
      cur.cp_len += utf8::length(tail);
    }
    cur.ids.push_back(sent_id);
    std::vector<Entity> ents;
    if (rec.contains("entities")) {
      ents = entities_from_json(rec["entities"], where);
      c.annotated_ = true;
    }
    cur.entities.push_back(std::move(ents));
  }
  flush();
  c.rebuild_lookup();
  for (std::size_t i = 0; i < c.sentences_.size(); ++i) {
    auto ents = std::move(c.sentences_[i].entities);
    c.set_entities(i, std::move(ents));
  }
  return c;
}

std::optional<std::size_t> Corpus::find(std::string_view sent_id) const {
  auto it = by_id_.find(std::string(sent_id));
  if (it == by_id_.end()) return std::nullopt;
  return it->second;
}

std::size_t Corpus::index_of(std::string_view sent_id) const {
  if (auto i = find(sent_id)) return *i;
  throw DataError("unknown sent_id \"" + std::string(sent_id) + "\"");
}

const AnnotatedSentence& Corpus::sentence(std::string_view sent_id) const {
  return sentences_[index_of(sent_id)];
}

ContextRef Corpus::get_context(std::string_view sent_id) const {
  const auto& p = paragraphs_[sentence_paragraph_[index_of(sent_id)]];
  return {p.text, p.doc_id, p.para_index};
}

std::span<const AnnotatedSentence> Corpus::paragraph_sentences(std::size_t paragraph) const {
  const auto& p = paragraphs_[paragraph];
  return std::span<const AnnotatedSentence>(sentences_).subspan(p.first_sentence, p.sentence_count);
}

void Corpus::set_entities(std::size_t sentence, std::vector<Entity> entities) {
  auto& s = sentences_.at(sentence);
  const std::size_t len = utf8::length(s.text);
  for (const auto& e : entities) {
    const std::string span = "[" + std::to_string(e.char_start) + "," + std::to_string(e.char_end) + ")";
    if (e.char_start >= e.char_end || e.char_end > len) {
      throw DataError("sentence " + s.sent_id + ": entity span " + span + " out of bounds");
    }
    if (utf8::slice(s.text, e.char_start, e.char_end) != e.surface) {
      throw DataError("sentence " + s.sent_id + ": entity span " + span + " does not match surface \"" +
                      e.surface + "\"");
    }
  }
  std::stable_sort(entities.begin(), entities.end(),
                   [](const Entity& a, const Entity& b) { return a.char_start < b.char_start; });
  s.entities = std::move(entities);
}

std::uint64_t Corpus::fingerprint() const {
  Fnv1a h;
  for (const auto& s : sentences_) h.add(s.sent_id).add(s.text);
  return h.value();
}

}  // namespace synthqa
