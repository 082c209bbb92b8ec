#include <doctest.h>

#include <algorithm>
#include <set>

#include "synthqa/annotate.hpp"
#include "synthqa/dataset.hpp"
#include "synthqa/error.hpp"
#include "synthqa/text_metrics.hpp"
#include "synthqa/utf8.hpp"

using namespace synthqa;

namespace {

// About fifty sentences about a handful of people and places.
Corpus fixture_corpus() {
  const std::vector<std::string> people = {"Ada Byron", "Carl Gauss", "Emmy Noether", "Alan Turing", "Kurt Gödel"};
  const std::vector<std::string> places = {"London", "Göttingen", "Vienna", "Princeton"};
  std::vector<Document> docs;
  for (std::size_t i = 0; i < 10; ++i) {
    const std::string& p = people[i % people.size()];
    const std::string& q = people[(i + 2) % people.size()];
    const std::string& c = places[i % places.size()];
    const std::string& d = places[(i + 1) % places.size()];
    docs.push_back({"doc" + std::to_string(i), "",
                    {p + " lived in " + c + " in " + std::to_string(1800 + 10 * i) + ". " + p + " wrote to " + q +
                         " from " + d + ".",
                     q + " visited " + c + " with " + p + ". The trip to " + d + " cost $" + std::to_string(100 + i) +
                         ". " + p + " met " + q + " again in " + std::to_string(1850 + i) + "."}});
  }
  Corpus corpus = Corpus::from_documents(docs);
  Gazetteer g;
  for (const auto& p : people) g.add("PERSON", p);
  for (const auto& c : places) g.add("GPE", c);
  heuristic_annotate_corpus(corpus, g, 1);
  corpus.mark_annotated();
  return corpus;
}

WhPriorTable fixed_priors() {
  return WhPriorTable::from_rows({{"PERSON", {{"who was", 1.0}}},
                                  {"GPE", {{"where is", 1.0}}},
                                  {"*", {{"what is", 1.0}}}});
}

bool extractive(const QAExample& ex) {
  const auto ctx = utf8::decode(ex.context), ans = utf8::decode(ex.answer_text);
  return ex.answer_start + ans.size() <= ctx.size() && ctx.compare(ex.answer_start, ans.size(), ans) == 0;
}

std::string capitalize(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s;
}

}  // namespace

TEST_CASE("cloze on original sentences is extractive") {
  const Corpus c = fixture_corpus();
  CHECK(c.sentences().size() == 50);
  GenerationConfig cfg;
  cfg.variant = TemplateVariant::kCloze;
  cfg.use_retrieved = false;
  const auto ex = generate_dataset(c, Bm25Index{}, cfg, fixed_priors(), 2);
  REQUIRE_FALSE(ex.empty());
  for (const auto& e : ex) {
    CHECK(extractive(e));
    CHECK(e.question.find("[MASK]") != std::string::npos);
  }
  cfg.target_size = 0;
  cfg.validation_size = 0;
  CHECK(generate_dataset(c, Bm25Index{}, cfg, fixed_priors()).empty());
}

TEST_CASE("WH_B_A with full matching equals a brute-force pipeline") {
  const Corpus c = fixture_corpus();
  const Bm25Index idx = Bm25Index::build(c, 1);
  GenerationConfig cfg;
  cfg.seed = 3;
  const auto got = generate_dataset(c, idx, cfg, fixed_priors(), 3);

  std::set<std::tuple<std::string, std::string, std::size_t>> expected;
  for (std::size_t q = 0; q < c.sentences().size(); ++q) {
    const auto& qs = c.sentences()[q];
    std::vector<Entity> pool;
    for (const auto& s : c.paragraph_sentences(c.paragraph_of(q))) pool.insert(pool.end(), s.entities.begin(), s.entities.end());
    const auto qtok = normalized_tokens(qs.text);
    for (const auto& answer : qs.entities) {
      // Score everything, order by (score desc, id asc), keep 100, filter, take the first.
      std::vector<std::pair<double, std::size_t>> all;
      for (std::size_t d = 0; d < c.sentences().size(); ++d) all.emplace_back(idx.score(qtok, d), d);
      std::sort(all.begin(), all.end(), [&](const auto& x, const auto& y) {
        return x.first != y.first ? x.first > y.first : c.sentences()[x.second].sent_id < c.sentences()[y.second].sent_id;
      });
      all.resize(std::min<std::size_t>(all.size(), 100));
      auto other_shared = [&](const AnnotatedSentence& r, const std::vector<Entity>& in) {
        for (const auto& e : r.entities) {
          if (utf8::iequals(e.surface, answer.surface)) continue;
          for (const auto& f : in)
            if (entities_match(e, f)) return true;
        }
        return false;
      };
      for (const auto& [score, d] : all) {
        const auto& r = c.sentences()[d];
        const auto hit = std::find_if(r.entities.begin(), r.entities.end(),
                                      [&](const Entity& e) { return entities_match(e, answer); });
        if (hit == r.entities.end()) continue;
        if (r.doc_id == qs.doc_id && r.para_index == qs.para_index) continue;
        if (token_f1(r.text, qs.text) >= 0.95) continue;
        if (!other_shared(r, qs.entities) || !other_shared(r, pool)) continue;
        // Hand template: wh + B + A + "?", capitalized.
        std::string a = std::string(utf8::slice(r.text, 0, hit->char_start));
        std::string b = std::string(utf8::slice(r.text, hit->char_end, utf8::length(r.text)));
        while (!a.empty() && a.back() == ' ') a.pop_back();
        while (!b.empty() && b.front() == ' ') b.erase(b.begin());
        if (!b.empty() && b.back() == '.') b.pop_back();
        const std::string wh = answer.label == "PERSON" ? "who was" : answer.label == "GPE" ? "where is" : "what is";
        std::string question = wh;
        if (!b.empty()) question += " " + b;
        if (!a.empty()) question += " " + a;
        expected.insert({c.get_context(qs.sent_id).paragraph, capitalize(question) + "?", qs.para_char_start + answer.char_start});
        break;
      }
    }
  }
  std::set<std::tuple<std::string, std::string, std::size_t>> actual;
  for (const auto& e : got) actual.insert({e.context, e.question, e.answer_start});
  CHECK(actual.size() == got.size());
  CHECK_FALSE(expected.empty());
  CHECK(actual == expected);
}

TEST_CASE("generation is independent of thread count and respects the budget") {
  const Corpus c = fixture_corpus();
  const Bm25Index idx = Bm25Index::build(c, 1);
  GenerationConfig cfg;
  cfg.mode = MatchingMode::kNone;
  cfg.seed = 42;
  const WhPriorTable prior = default_wh_priors();
  GenerationReport r1, r4;
  const auto one = generate_dataset(c, idx, cfg, prior, 1, &r1);
  const auto four = generate_dataset(c, idx, cfg, prior, 4, &r4);
  CHECK(one == four);
  CHECK(r1.skipped.size() == r4.skipped.size());
  CHECK(r1.pairs_considered == one.size() + r1.skipped.size() + r1.duplicates);

  cfg.target_size = 7;
  cfg.validation_size = 2;
  const auto capped = generate_dataset(c, idx, cfg, prior, 2);
  REQUIRE(capped.size() == 7);
  CHECK(std::equal(capped.begin(), capped.end(), one.begin()));

  std::set<std::string> qids;
  for (const auto& e : one) qids.insert(e.qid);
  CHECK(qids.size() == one.size());
  CHECK(one[0].qid.rfind("WH_B_A:", 0) == 0);
}

TEST_CASE("config validation and index mismatch") {
  const Corpus c = fixture_corpus();
  GenerationConfig cfg;
  cfg.f1_cap = 0.0;
  CHECK_THROWS_AS(cfg.validate(), UsageError);
  cfg = {};
  cfg.validation_size = cfg.target_size + 1;
  CHECK_THROWS_AS(cfg.validate(), UsageError);
  cfg = {};
  const Corpus other = Corpus::from_documents({{"x", "", {"Nothing here."}}});
  CHECK_THROWS_AS(generate_dataset(c, Bm25Index::build(other, 1), cfg, fixed_priors()), DataError);
}

TEST_CASE("split_validation") {
  std::vector<QAExample> ex;
  for (int i = 0; i < 10; ++i) ex.push_back({"q" + std::to_string(i), "ctx", "q?", "c", 0});
  const auto [train, val] = split_validation(ex, 3, 7);
  CHECK(train.size() == 7);
  CHECK(val.size() == 3);
  std::set<std::string> all;
  for (const auto& e : train) all.insert(e.qid);
  for (const auto& e : val) all.insert(e.qid);
  CHECK(all.size() == 10);
  CHECK(std::is_sorted(train.begin(), train.end(), [](const auto& a, const auto& b) {
    return std::stoi(a.qid.substr(1)) < std::stoi(b.qid.substr(1));
  }));
  CHECK(split_validation(ex, 3, 7) == std::make_pair(train, val));
  CHECK(split_validation(ex, 0, 7).first == ex);
  CHECK_THROWS_AS(split_validation(ex, 11, 7), UsageError);
}

TEST_CASE("subsample_per_context") {
  std::vector<QAExample> ex;
  for (int c = 0; c < 2; ++c)
    for (int q = 0; q < 3; ++q) ex.push_back({"q" + std::to_string(c) + std::to_string(q), "ctx" + std::to_string(c), "?", "c", 0});
  const auto two = subsample_per_context(ex, 2, 1);
  REQUIRE(two.size() == 2);
  CHECK(two[0].context != two[1].context);
  CHECK(subsample_per_context(ex, 10, 1).size() == 2);
  CHECK(subsample_per_context(ex, 1, 5) == subsample_per_context(ex, 1, 5));
  std::set<std::string> picked;
  for (std::uint64_t seed = 0; seed < 40; ++seed) picked.insert(subsample_per_context(ex, 2, seed)[0].qid);
  CHECK(picked.size() == 3);  // every question of the first context gets chosen for some seed

  const auto perm = seeded_permutation(50, 9);
  std::vector<std::size_t> sorted = perm;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) CHECK(sorted[i] == i);
}
