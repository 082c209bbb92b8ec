#include "synthqa/annotate.hpp"

#include <algorithm>
#include <array>
#include <cstring>
#include <istream>
#include <ostream>
#include <regex>
#include <unordered_set>

#include <json.hpp>

#include "synthqa/error.hpp"
#include "synthqa/parallel.hpp"
#include "synthqa/utf8.hpp"

namespace synthqa {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

std::string require_string(const json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string()) throw DataError(where + ": missing string field \"" + key + "\"");
  return it->get<std::string>();
}

std::size_t require_offset(const json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_number_integer() || it->get<long long>() < 0) {
    throw DataError(where + ": missing or negative offset \"" + key + "\"");
  }
  return it->get<std::size_t>();
}

// Candidate match in byte offsets; `rank` breaks ties on identical spans.
struct Hit {
  std::size_t begin;
  std::size_t end;
  int rank;
  const char* label;
  std::string owned_label;
};

enum Rank { kGazetteer = 0, kDate = 1, kMoney = 2, kPercent = 3, kCardinal = 4 };

bool ascii_alnum(unsigned char c) { return std::isalnum(c) != 0; }
bool ascii_digit(unsigned char c) { return c >= '0' && c <= '9'; }

// A byte that may belong to a word: ASCII alphanumerics and any non-ASCII byte.
bool wordish(unsigned char c) { return ascii_alnum(c) || c >= 0x80; }

bool left_boundary(std::string_view t, std::size_t b) { return b == 0 || !wordish(t[b - 1]); }
bool right_boundary(std::string_view t, std::size_t e) { return e >= t.size() || !wordish(t[e]); }

void gazetteer_hits(std::string_view text, const Gazetteer& g, std::vector<Hit>& hits) {
  for (const auto& [label, phrases] : g.entries()) {
    for (const auto& phrase : phrases) {
      if (phrase.empty()) continue;
      for (std::size_t at = text.find(phrase); at != std::string_view::npos; at = text.find(phrase, at + 1)) {
        const std::size_t end = at + phrase.size();
        const bool left_ok = !wordish(phrase.front()) || left_boundary(text, at);
        const bool right_ok = !wordish(phrase.back()) || right_boundary(text, end);
        if (left_ok && right_ok) hits.push_back({at, end, kGazetteer, nullptr, label});
      }
    }
  }
}

// Currency prefixes that may sit directly before a number.
constexpr std::array<std::string_view, 4> kCurrency = {"$", "\xC2\xA3", "\xE2\x82\xAC", "\xC2\xA5"};

void number_hits(std::string_view t, std::vector<Hit>& hits) {
  const std::size_t n = t.size();
  std::size_t i = 0;
  while (i < n) {
    if (!ascii_digit(t[i])) {
      ++i;
      continue;
    }
    const std::size_t s = i;
    // Digits glued to a word ("A380") or continuing a number never start a match.
    const bool glued_left = s > 0 && (std::isalpha(static_cast<unsigned char>(t[s - 1])) ||
                                      static_cast<unsigned char>(t[s - 1]) >= 0x80 ||
                                      ((t[s - 1] == '.' || t[s - 1] == ',') && s > 1 && ascii_digit(t[s - 2])));
    std::size_t e = s;
    while (e < n && ascii_digit(t[e])) ++e;
    const std::size_t lead_digits = e - s;
    while (e + 3 < n && t[e] == ',' && ascii_digit(t[e + 1]) && ascii_digit(t[e + 2]) && ascii_digit(t[e + 3]) &&
           (e + 4 >= n || !ascii_digit(t[e + 4]))) {
      e += 4;
    }
    const std::size_t int_end = e;
    if (e + 1 < n && t[e] == '.' && ascii_digit(t[e + 1])) {
      ++e;
      while (e < n && ascii_digit(t[e])) ++e;
    }
    const std::size_t num_end = e;
    i = num_end;
    if (glued_left) continue;
    const bool right_free = num_end >= n || !wordish(t[num_end]);

    if (num_end < n && t[num_end] == '%') {
      hits.push_back({s, num_end + 1, kPercent, "PERCENT", {}});
    }
    for (auto sym : kCurrency) {
      if (s >= sym.size() && t.substr(s - sym.size(), sym.size()) == sym && right_free) {
        hits.push_back({s - sym.size(), num_end, kMoney, "MONEY", {}});
      }
    }
    if (!right_free || num_end != int_end) continue;
    if (lead_digits == 4 && int_end == s + 4 && (t[s] == '1' || t[s] == '2')) {
      hits.push_back({s, int_end, kDate, "DATE", {}});
    }
    hits.push_back({s, int_end, kCardinal, "CARDINAL", {}});
  }
}

void month_date_hits(std::string_view t, std::vector<Hit>& hits) {
  static const std::regex kMonthDate(
      "(January|February|March|April|May|June|July|August|September|October|November|December) "
      "([0-9]{1,2}), ([12][0-9]{3})");
  const std::string text(t);
  for (auto it = std::sregex_iterator(text.begin(), text.end(), kMonthDate); it != std::sregex_iterator(); ++it) {
    const std::size_t b = static_cast<std::size_t>(it->position(0));
    const std::size_t e = b + static_cast<std::size_t>(it->length(0));
    if (left_boundary(t, b) && right_boundary(t, e)) hits.push_back({b, e, kDate, "DATE", {}});
  }
}

}  // namespace

std::vector<AnnotationRecord> read_annotation_records(std::istream& in) {
  std::vector<AnnotationRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); })) continue;
    const std::string where = "annotations line " + std::to_string(lineno);
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      throw DataError(where + ": malformed JSON (" + e.what() + ")");
    }
    if (!rec.is_object()) throw DataError(where + ": expected a JSON object");
    // Header lines (e.g. the exporter's model record) carry no sent_id.
    if (!rec.contains("sent_id")) continue;
    AnnotationRecord r;
    r.sent_id = require_string(rec, "sent_id", where);
    auto ents = rec.find("entities");
    if (ents == rec.end() || !ents->is_array()) throw DataError(where + ": missing \"entities\" array");
    for (const auto& e : *ents) {
      Entity ent;
      ent.surface = require_string(e, "surface", where);
      ent.char_start = require_offset(e, "start", where);
      ent.char_end = require_offset(e, "end", where);
      ent.label = require_string(e, "label", where);
      r.entities.push_back(std::move(ent));
    }
    out.push_back(std::move(r));
  }
  return out;
}

void write_annotation_records(std::ostream& out, const std::vector<AnnotationRecord>& records) {
  for (const auto& r : records) {
    ordered_json rec;
    rec["sent_id"] = r.sent_id;
    rec["entities"] = ordered_json::array();
    for (const auto& e : r.entities) {
      ordered_json je;
      je["surface"] = e.surface;
      je["start"] = e.char_start;
      je["end"] = e.char_end;
      je["label"] = e.label;
      rec["entities"].push_back(std::move(je));
    }
    out << rec.dump() << '\n';
  }
}

void load_annotations(Corpus& corpus, std::istream& in) {
  const auto records = read_annotation_records(in);
  std::vector<std::vector<Entity>> staged(corpus.sentences().size());
  std::vector<bool> seen(corpus.sentences().size(), false);
  for (const auto& r : records) {
    const auto idx = corpus.find(r.sent_id);
    if (!idx) throw DataError("annotations: unknown sent_id \"" + r.sent_id + "\"");
    if (seen[*idx]) throw DataError("annotations: duplicate record for sent_id \"" + r.sent_id + "\"");
    seen[*idx] = true;
    staged[*idx] = r.entities;
  }
  // Validate everything before touching the corpus.
  Corpus scratch = corpus;
  for (std::size_t i = 0; i < staged.size(); ++i) scratch.set_entities(i, std::move(staged[i]));
  scratch.mark_annotated();
  corpus = std::move(scratch);
}

void write_annotations(std::ostream& out, const Corpus& corpus) {
  std::vector<AnnotationRecord> records;
  records.reserve(corpus.sentences().size());
  for (const auto& s : corpus.sentences()) records.push_back({s.sent_id, s.entities});
  write_annotation_records(out, records);
}

const std::vector<Entity>& entities_of(const Corpus& corpus, std::string_view sent_id) {
  return corpus.sentence(sent_id).entities;
}

bool entities_match(const Entity& a, const Entity& b) {
  return a.label == b.label && utf8::iequals(a.surface, b.surface);
}

Gazetteer Gazetteer::load(std::istream& in) {
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("gazetteer: malformed JSON (") + e.what() + ")");
  }
  if (!j.is_object()) throw DataError("gazetteer: expected an object of label -> [phrases]");
  Gazetteer g;
  for (const auto& [label, phrases] : j.items()) {
    if (!phrases.is_array()) throw DataError("gazetteer: label " + label + " must map to an array");
    for (const auto& p : phrases) {
      if (!p.is_string()) throw DataError("gazetteer: non-string phrase under " + label);
      g.add(label, p.get<std::string>());
    }
  }
  return g;
}

void Gazetteer::add(std::string label, std::string phrase) {
  if (!utf8::is_valid(phrase)) throw DataError("gazetteer: phrase is not valid UTF-8");
  entries_[std::move(label)].push_back(std::move(phrase));
}

std::vector<Entity> heuristic_annotate(std::string_view text, const Gazetteer& gazetteer) {
  std::vector<Hit> hits;
  gazetteer_hits(text, gazetteer, hits);
  number_hits(text, hits);
  month_date_hits(text, hits);

  std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) {
    if (a.begin != b.begin) return a.begin < b.begin;
    if (a.end != b.end) return a.end > b.end;
    return a.rank < b.rank;
  });

  std::vector<Entity> out;
  std::size_t taken_until = 0;
  std::size_t cp_cursor_byte = 0;
  std::size_t cp_cursor = 0;
  auto to_cp = [&](std::size_t byte) {
    cp_cursor += utf8::length(text.substr(cp_cursor_byte, byte - cp_cursor_byte));
    cp_cursor_byte = byte;
    return cp_cursor;
  };
  for (const auto& h : hits) {
    if (h.begin < taken_until) continue;
    Entity e;
    e.surface = std::string(text.substr(h.begin, h.end - h.begin));
    e.char_start = to_cp(h.begin);
    e.char_end = to_cp(h.end);
    e.label = h.label != nullptr ? std::string(h.label) : h.owned_label;
    out.push_back(std::move(e));
    taken_until = h.end;
  }
  return out;
}

void heuristic_annotate_corpus(Corpus& corpus, const Gazetteer& gazetteer, int jobs) {
  const auto& sentences = corpus.sentences();
  const auto n = static_cast<std::ptrdiff_t>(sentences.size());
  std::vector<std::vector<Entity>> found(sentences.size());
  ExceptionSlot slot;
#pragma omp parallel for schedule(dynamic, 64) num_threads(resolve_jobs(jobs))
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    slot.run([&] { found[i] = heuristic_annotate(sentences[i].text, gazetteer); });
  }
  slot.rethrow();
  for (std::size_t i = 0; i < found.size(); ++i) corpus.set_entities(i, std::move(found[i]));
  corpus.mark_annotated();
}

}  // namespace synthqa
