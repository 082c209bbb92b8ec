#include "synthqa/question_gen.hpp"

#include <cmath>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "synthqa/error.hpp"
#include "synthqa/utf8.hpp"

namespace synthqa {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

std::string_view trim(std::string_view s) {
  const std::u32string cps = utf8::decode(s);
  std::size_t b = 0;
  std::size_t e = cps.size();
  while (b < e && utf8::is_space(cps[b])) ++b;
  while (e > b && utf8::is_space(cps[e - 1])) --e;
  return utf8::slice(s, b, e);
}

std::string join(std::initializer_list<std::string_view> pieces) {
  std::string out;
  for (auto p : pieces) {
    if (p.empty()) continue;
    if (!out.empty()) out.push_back(' ');
    out.append(p);
  }
  return out;
}

void capitalize(std::string& s) {
  if (s.empty()) return;
  const auto b0 = static_cast<unsigned char>(s[0]);
  const std::size_t len = b0 < 0x80 ? 1 : (b0 & 0xE0) == 0xC0 ? 2 : (b0 & 0xF0) == 0xE0 ? 3 : 4;
  const std::u32string first = utf8::decode(std::string_view(s).substr(0, len));
  std::string up;
  utf8::append(up, utf8::to_upper(first[0]));
  s.replace(0, len, up);
}

bool two_words(const std::string& s) {
  const auto sp = s.find(' ');
  if (sp == std::string::npos || sp == 0 || sp + 1 >= s.size()) return false;
  if (s.find(' ', sp + 1) != std::string::npos) return false;
  for (unsigned char c : s) {
    if (c != ' ' && std::isspace(c)) return false;
  }
  return true;
}

}  // namespace

std::string_view variant_name(TemplateVariant v) {
  switch (v) {
    case TemplateVariant::kCloze: return "CLOZE";
    case TemplateVariant::kAWhB: return "A_WH_B";
    case TemplateVariant::kWhAB: return "WH_A_B";
    case TemplateVariant::kWhBA: return "WH_B_A";
    case TemplateVariant::kBANoWh: return "B_A_NO_WH";
    case TemplateVariant::kWhBANoQmark: return "WH_B_A_NO_QMARK";
    case TemplateVariant::kWhSimpleBA: return "WH_SIMPLE_B_A";
    case TemplateVariant::kWhatBA: return "WHAT_B_A";
  }
  return "CLOZE";
}

std::optional<TemplateVariant> parse_variant(std::string_view name) {
  std::string canon;
  for (char c : name) canon.push_back(c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  for (auto v : kAllVariants) {
    if (variant_name(v) == canon) return v;
  }
  return std::nullopt;
}

std::string allowed_variant_names() {
  std::string out;
  for (auto v : kAllVariants) {
    if (!out.empty()) out += ", ";
    out += variant_name(v);
  }
  return out;
}

bool uses_wh_prior(TemplateVariant v) {
  return v == TemplateVariant::kAWhB || v == TemplateVariant::kWhAB || v == TemplateVariant::kWhBA ||
         v == TemplateVariant::kWhBANoQmark;
}

TemplateParts split_fragments(std::string_view sentence, const Entity& answer) {
  const std::size_t len = utf8::length(sentence);
  if (answer.char_start >= answer.char_end || answer.char_end > len) {
    throw DataError("split_fragments: answer span [" + std::to_string(answer.char_start) + "," +
                    std::to_string(answer.char_end) + ") invalid for a sentence of length " + std::to_string(len));
  }
  const std::size_t b = utf8::byte_offset(sentence, answer.char_start);
  const std::size_t e = utf8::byte_offset(sentence, answer.char_end);
  TemplateParts parts;
  parts.answer_surface = std::string(sentence.substr(b, e - b));
  if (parts.answer_surface != answer.surface) {
    throw DataError("split_fragments: span text \"" + parts.answer_surface + "\" does not match answer \"" +
                    answer.surface + "\"");
  }
  parts.fragment_a = std::string(trim(sentence.substr(0, b)));
  std::string_view tail = trim(sentence.substr(e));
  if (!tail.empty() && (tail.back() == '.' || tail.back() == '!' || tail.back() == '?')) {
    tail = trim(tail.substr(0, tail.size() - 1));
  }
  parts.fragment_b = std::string(tail);
  return parts;
}

std::string make_cloze(const TemplateParts& parts) {
  return join({parts.fragment_a, "[MASK]", parts.fragment_b}) + ".";
}

WhPriorTable WhPriorTable::from_rows(std::map<std::string, Row> rows) {
  WhPriorTable t;
  t.rows_ = std::move(rows);
  t.validate();
  return t;
}

WhPriorTable WhPriorTable::load(std::istream& in) {
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("wh priors: malformed JSON (") + e.what() + ")");
  }
  if (!j.is_object()) throw DataError("wh priors: expected an object of label -> [[bigram, p], ...]");
  std::map<std::string, Row> rows;
  for (const auto& [label, entries] : j.items()) {
    if (!entries.is_array()) throw DataError("wh priors: row " + label + " is not an array");
    Row row;
    for (const auto& pair : entries) {
      if (!pair.is_array() || pair.size() != 2 || !pair[0].is_string() || !pair[1].is_number()) {
        throw DataError("wh priors: row " + label + " entries must be [bigram, probability]");
      }
      row.emplace_back(pair[0].get<std::string>(), pair[1].get<double>());
    }
    rows.emplace(label, std::move(row));
  }
  return from_rows(std::move(rows));
}

void WhPriorTable::validate() const {
  for (const auto& [label, row] : rows_) {
    if (row.empty()) throw DataError("wh priors: row " + label + " is empty");
    double sum = 0.0;
    for (const auto& [bigram, p] : row) {
      if (!two_words(bigram)) throw DataError("wh priors: \"" + bigram + "\" under " + label + " is not a bi-gram");
      if (!(p >= 0.0)) throw DataError("wh priors: negative probability under " + label);
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
      throw DataError("wh priors: row " + label + " sums to " + std::to_string(sum) + ", expected 1");
    }
  }
}

const WhPriorTable::Row* WhPriorTable::lookup(std::string_view label) const {
  if (auto it = rows_.find(std::string(label)); it != rows_.end()) return &it->second;
  if (auto it = rows_.find("*"); it != rows_.end()) return &it->second;
  return nullptr;
}

void WhPriorTable::save(std::ostream& out) const {
  ordered_json j = ordered_json::object();
  for (const auto& [label, row] : rows_) {
    ordered_json arr = ordered_json::array();
    for (const auto& [bigram, p] : row) arr.push_back(ordered_json::array({bigram, p}));
    j[label] = std::move(arr);
  }
  out << j.dump(2) << '\n';
}

const std::string& sample_bigram(const WhPriorTable::Row& row, Rng& rng) {
  const double u = rng.uniform();
  double cum = 0.0;
  const std::string* last = &row.front().first;
  for (const auto& [bigram, p] : row) {
    if (p <= 0.0) continue;
    cum += p;
    last = &bigram;
    if (u < cum) return bigram;
  }
  return *last;
}

std::string_view simple_wh(std::string_view label) {
  if (label == "PERSON" || label == "NORP" || label == "ORG") return "who";
  if (label == "GPE" || label == "LOC" || label == "FAC") return "where";
  if (label == "DATE" || label == "TIME") return "when";
  if (label == "CARDINAL" || label == "ORDINAL" || label == "QUANTITY" || label == "MONEY" || label == "PERCENT") {
    return "how many";
  }
  return "what";
}

std::string choose_wh(std::string_view label, TemplateVariant variant, const WhPriorTable& prior, Rng& rng) {
  switch (variant) {
    case TemplateVariant::kCloze:
    case TemplateVariant::kBANoWh:
      return {};
    case TemplateVariant::kWhSimpleBA:
      return std::string(simple_wh(label));
    case TemplateVariant::kWhatBA:
      return "what";
    default:
      break;
  }
  const auto* row = prior.lookup(label);
  if (row == nullptr || row->empty()) {
    throw DataError("wh priors: no row for label " + std::string(label) + " and no \"*\" fallback");
  }
  return sample_bigram(*row, rng);
}

std::string make_wh_question(const TemplateParts& parts, TemplateVariant variant, std::string_view wh) {
  const std::string_view a = parts.fragment_a;
  const std::string_view b = parts.fragment_b;
  std::string q;
  bool qmark = true;
  switch (variant) {
    case TemplateVariant::kCloze:
      throw UsageError("make_wh_question: CLOZE is not a wh template");
    case TemplateVariant::kAWhB:
      q = join({a, wh, b});
      break;
    case TemplateVariant::kWhAB:
      q = join({wh, a, b});
      break;
    case TemplateVariant::kBANoWh:
      q = join({b, a});
      break;
    case TemplateVariant::kWhBANoQmark:
      q = join({wh, b, a});
      qmark = false;
      break;
    case TemplateVariant::kWhBA:
    case TemplateVariant::kWhSimpleBA:
    case TemplateVariant::kWhatBA:
      q = join({wh, b, a});
      break;
  }
  if (qmark) q.push_back('?');
  capitalize(q);
  return q;
}

std::string make_question(const TemplateParts& parts, TemplateVariant variant, std::string_view wh) {
  if (variant == TemplateVariant::kCloze) return make_cloze(parts);
  return make_wh_question(parts, variant, wh);
}

}  // namespace synthqa
