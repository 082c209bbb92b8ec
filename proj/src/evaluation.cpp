#include "synthqa/evaluation.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "synthqa/error.hpp"
#include "synthqa/text_metrics.hpp"
#include "synthqa/utf8.hpp"

namespace synthqa {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

PredictionSet read_predictions(std::istream& in) {
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("predictions: malformed JSON (") + e.what() + ")");
  }
  if (!j.is_object()) throw DataError("predictions: expected an object {qid: answer}");
  PredictionSet p;
  for (const auto& [qid, answer] : j.items()) {
    if (!answer.is_string()) throw DataError("predictions: answer for " + qid + " is not a string");
    p.emplace(qid, answer.get<std::string>());
  }
  return p;
}

EvalReport evaluate(const SquadFile& gold, const PredictionSet& predictions) {
  EvalReport r;
  double em_sum = 0.0;
  double f1_sum = 0.0;
  for (const auto& a : gold.data) {
    for (const auto& p : a.paragraphs) {
      for (const auto& q : p.qas) {
        ++r.n;
        auto it = predictions.find(q.id);
        if (it == predictions.end()) {
          r.missing.push_back(q.id);
          continue;
        }
        int em = 0;
        double f1 = 0.0;
        for (std::size_t g = 0; g < q.answers.size(); ++g) {
          const int e = exact_match(it->second, q.answers[g].text);
          const double f = squad_f1(it->second, q.answers[g].text);
          em = g == 0 ? e : std::max(em, e);
          f1 = g == 0 ? f : std::max(f1, f);
        }
        em_sum += em;
        f1_sum += f1;
      }
    }
  }
  if (r.n > 0) {
    r.exact_match = 100.0 * em_sum / static_cast<double>(r.n);
    r.f1 = 100.0 * f1_sum / static_cast<double>(r.n);
  }
  return r;
}

void write_report(std::ostream& out, const EvalReport& report) {
  ordered_json j;
  j["exact_match"] = report.exact_match;
  j["f1"] = report.f1;
  j["n"] = report.n;
  out << j.dump() << '\n';
}

std::vector<Document> squad_contexts_as_documents(const SquadFile& gold) {
  std::vector<Document> docs;
  for (std::size_t i = 0; i < gold.data.size(); ++i) {
    Document d;
    d.doc_id = "a" + std::to_string(i);
    d.title = gold.data[i].title;
    for (const auto& p : gold.data[i].paragraphs) d.paragraphs.push_back(p.context);
    docs.push_back(std::move(d));
  }
  return docs;
}

namespace {

std::optional<std::size_t> parse_index(std::string_view s) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

}  // namespace

ContextEntities context_entities_from_annotations(const std::vector<AnnotationRecord>& records) {
  ContextEntities out;
  for (const auto& r : records) {
    const std::string_view id = r.sent_id;
    const auto c2 = id.rfind(':');
    const auto c1 = c2 == std::string_view::npos || c2 == 0 ? std::string_view::npos : id.rfind(':', c2 - 1);
    std::optional<std::size_t> article;
    std::optional<std::size_t> para;
    if (c1 != std::string_view::npos && id.size() > 1 && id[0] == 'a') {
      article = parse_index(id.substr(1, c1 - 1));
      para = parse_index(id.substr(c1 + 1, c2 - c1 - 1));
    }
    if (!article || !para || !parse_index(id.substr(c2 + 1))) {
      throw DataError("annotations: sent_id \"" + r.sent_id + "\" does not address a gold context (a<i>:<p>:<s>)");
    }
    auto& bucket = out[{*article, *para}];
    bucket.insert(bucket.end(), r.entities.begin(), r.entities.end());
  }
  return out;
}

ContextEntities context_entities_heuristic(const SquadFile& gold, const Gazetteer& gazetteer) {
  ContextEntities out;
  for (std::size_t a = 0; a < gold.data.size(); ++a) {
    for (std::size_t p = 0; p < gold.data[a].paragraphs.size(); ++p) {
      auto& bucket = out[{a, p}];
      for (const auto& s : split_sentences(gold.data[a].paragraphs[p].context)) {
        auto found = heuristic_annotate(s.text, gazetteer);
        bucket.insert(bucket.end(), found.begin(), found.end());
      }
    }
  }
  return out;
}

namespace {

void require_coverage(const SquadFile& gold, const ContextEntities& entities) {
  std::string missing;
  std::size_t count = 0;
  for (std::size_t a = 0; a < gold.data.size(); ++a) {
    for (std::size_t p = 0; p < gold.data[a].paragraphs.size(); ++p) {
      if (entities.contains({a, p})) continue;
      if (count++ < 20) missing += " a" + std::to_string(a) + ":" + std::to_string(p);
    }
  }
  if (count > 0) {
    throw DataError("no annotations for " + std::to_string(count) + " context(s):" + missing +
                    (count > 20 ? " ..." : ""));
  }
}

const Entity* answer_entity(const SquadQuestion& q, const std::vector<Entity>& ents) {
  for (const auto& ans : q.answers) {
    for (const auto& e : ents) {
      if (utf8::iequals(ans.text, e.surface)) return &e;
    }
  }
  return nullptr;
}

std::string strip_edge_punct(std::string w) {
  auto punct = [](unsigned char c) { return std::ispunct(c) != 0; };
  while (!w.empty() && punct(static_cast<unsigned char>(w.back()))) w.pop_back();
  std::size_t b = 0;
  while (b < w.size() && punct(static_cast<unsigned char>(w[b]))) ++b;
  return w.substr(b);
}

}  // namespace

SquadFile ner_subset(const SquadFile& gold, const ContextEntities& entities) {
  require_coverage(gold, entities);
  SquadFile out;
  out.version = gold.version;
  for (std::size_t a = 0; a < gold.data.size(); ++a) {
    SquadArticle art;
    art.title = gold.data[a].title;
    for (std::size_t p = 0; p < gold.data[a].paragraphs.size(); ++p) {
      const auto& para = gold.data[a].paragraphs[p];
      const auto& ents = entities.at({a, p});
      SquadParagraph kept{para.context, {}};
      for (const auto& q : para.qas) {
        if (answer_entity(q, ents) != nullptr) kept.qas.push_back(q);
      }
      art.paragraphs.push_back(std::move(kept));
    }
    out.data.push_back(std::move(art));
  }
  return out;
}

WhPriorTable derive_wh_priors(const SquadFile& gold, const ContextEntities& entities, std::size_t max_per_label) {
  require_coverage(gold, entities);
  std::map<std::string, std::map<std::string, std::size_t>> counts;
  for (std::size_t a = 0; a < gold.data.size(); ++a) {
    for (std::size_t p = 0; p < gold.data[a].paragraphs.size(); ++p) {
      const auto& ents = entities.at({a, p});
      for (const auto& q : gold.data[a].paragraphs[p].qas) {
        const Entity* e = answer_entity(q, ents);
        if (e == nullptr) continue;
        std::vector<std::string> words;
        std::size_t i = 0;
        const std::string lower = utf8::to_lower(q.question);
        while (words.size() < 2 && i < lower.size()) {
          while (i < lower.size() && std::isspace(static_cast<unsigned char>(lower[i]))) ++i;
          std::size_t j = i;
          while (j < lower.size() && !std::isspace(static_cast<unsigned char>(lower[j]))) ++j;
          if (j > i) {
            std::string w = strip_edge_punct(lower.substr(i, j - i));
            if (!w.empty()) words.push_back(std::move(w));
          }
          i = j;
        }
        if (words.size() < 2) continue;
        const std::string bigram = words[0] + " " + words[1];
        ++counts[e->label][bigram];
        ++counts["*"][bigram];
      }
    }
  }
  std::map<std::string, WhPriorTable::Row> rows;
  for (const auto& [label, by_bigram] : counts) {
    std::vector<std::pair<std::string, std::size_t>> sorted(by_bigram.begin(), by_bigram.end());
    std::stable_sort(sorted.begin(), sorted.end(), [](const auto& x, const auto& y) { return x.second > y.second; });
    if (sorted.size() > max_per_label) sorted.resize(max_per_label);
    std::size_t total = 0;
    for (const auto& kv : sorted) total += kv.second;
    WhPriorTable::Row row;
    for (const auto& [bigram, c] : sorted) {
      row.emplace_back(bigram, static_cast<double>(c) / static_cast<double>(total));
    }
    rows.emplace(label, std::move(row));
  }
  return WhPriorTable::from_rows(std::move(rows));
}

}  // namespace synthqa
