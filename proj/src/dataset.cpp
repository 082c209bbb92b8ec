#include "synthqa/dataset.hpp"

#include <algorithm>
#include <numeric>
#include <optional>
#include <set>
#include <tuple>
#include <unordered_map>

#include "synthqa/annotate.hpp"
#include "synthqa/error.hpp"
#include "synthqa/hash.hpp"
#include "synthqa/parallel.hpp"
#include "synthqa/rng.hpp"

namespace synthqa {

namespace {

struct Pair {
  std::uint32_t sentence;
  std::uint32_t entity;
};

struct Outcome {
  std::optional<QAExample> example;
};

// Pairs per scheduling block; only affects how much work past the budget
// may be done, never the result.
constexpr std::size_t kBlock = 2048;

}  // namespace

void GenerationConfig::validate() const {
  if (!(f1_cap > 0.0 && f1_cap <= 1.0)) throw UsageError("f1_cap must be in (0, 1]");
  if (validation_size > target_size) throw UsageError("validation_size must not exceed target_size");
  if (use_retrieved && top_k == 0) throw UsageError("top_k must be positive");
}

std::string make_qid(const AnnotatedSentence& s, const Entity& answer, TemplateVariant variant) {
  Fnv1a h;
  h.add(s.doc_id)
      .add(std::to_string(s.para_index))
      .add(s.sent_id)
      .add(std::to_string(answer.char_start))
      .add(std::to_string(answer.char_end))
      .add(answer.label)
      .add(variant_name(variant));
  std::string id(variant_name(variant));
  id += ':';
  id += answer.label;
  id += ':';
  id += h.hex();
  return id;
}

std::vector<QAExample> generate_dataset(const Corpus& corpus, const Bm25Index& index, const GenerationConfig& config,
                                        const WhPriorTable& prior, int jobs, GenerationReport* report) {
  config.validate();
  if (config.use_retrieved) check_index_matches(index, corpus);

  const auto& sentences = corpus.sentences();
  std::vector<Pair> pairs;
  for (std::size_t s = 0; s < sentences.size(); ++s) {
    const auto& ents = sentences[s].entities;
    for (std::size_t e = 0; e < ents.size(); ++e) {
      if (std::find(ents.begin(), ents.begin() + static_cast<std::ptrdiff_t>(e), ents[e]) !=
          ents.begin() + static_cast<std::ptrdiff_t>(e)) {
        continue;  // repeated annotation of the same span
      }
      pairs.push_back({static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(e)});
    }
  }

  RetrievalOptions ropts;
  ropts.mode = config.mode;
  ropts.top_k = config.top_k;
  ropts.f1_cap = config.f1_cap;
  ropts.exclude_document = config.exclude_document;

  auto make_one = [&](std::size_t ordinal) -> Outcome {
    const auto& p = pairs[ordinal];
    const auto& query = sentences[p.sentence];
    const Entity& answer = query.entities[p.entity];

    const AnnotatedSentence* source = &query;
    const Entity* split_at = &answer;
    if (config.use_retrieved) {
      auto hit = retrieve(index, corpus, p.sentence, answer, ropts);
      if (!hit) return {};
      source = &sentences[hit->sentence];
      split_at = nullptr;
      for (const auto& e : source->entities) {
        if (entities_match(e, answer)) {
          split_at = &e;
          break;
        }
      }
    }
    const TemplateParts parts = split_fragments(source->text, *split_at);
    Rng rng(derive_seed(config.seed, ordinal));
    const std::string wh = choose_wh(answer.label, config.variant, prior, rng);

    QAExample ex;
    ex.qid = make_qid(query, answer, config.variant);
    ex.context = corpus.paragraphs()[corpus.paragraph_of(p.sentence)].text;
    ex.question = make_question(parts, config.variant, wh);
    ex.answer_text = answer.surface;
    ex.answer_start = query.para_char_start + answer.char_start;
    return {std::move(ex)};
  };

  std::vector<QAExample> out;
  std::set<std::tuple<std::string_view, std::string, std::size_t>> seen;  // (context, question, answer_start)
  GenerationReport local;
  const int threads = resolve_jobs(jobs);

  for (std::size_t block = 0; block < pairs.size() && out.size() < config.target_size; block += kBlock) {
    const std::size_t end = std::min(pairs.size(), block + kBlock);
    std::vector<Outcome> results(end - block);
    ExceptionSlot slot;
    const auto count = static_cast<std::ptrdiff_t>(end - block);
#pragma omp parallel for schedule(dynamic, 8) num_threads(threads)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
      slot.run([&] { results[i] = make_one(block + static_cast<std::size_t>(i)); });
    }
    slot.rethrow();

    for (std::size_t i = 0; i < results.size() && out.size() < config.target_size; ++i) {
      const auto& p = pairs[block + i];
      ++local.pairs_considered;
      if (!results[i].example) {
        local.skipped.push_back({sentences[p.sentence].sent_id, sentences[p.sentence].entities[p.entity]});
        continue;
      }
      auto& ex = *results[i].example;
      const std::string_view context = corpus.paragraphs()[corpus.paragraph_of(p.sentence)].text;
      if (!seen.emplace(context, ex.question, ex.answer_start).second) {
        ++local.duplicates;
        continue;
      }
      out.push_back(std::move(ex));
    }
  }

  check_examples(out);
  if (report != nullptr) *report = std::move(local);
  return out;
}

std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Rng rng(mix_seed(seed));
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.below(i));
    std::swap(idx[i - 1], idx[j]);
  }
  return idx;
}

std::pair<std::vector<QAExample>, std::vector<QAExample>> split_validation(const std::vector<QAExample>& examples,
                                                                           std::size_t validation_size,
                                                                           std::uint64_t seed) {
  if (validation_size > examples.size()) {
    throw UsageError("validation size " + std::to_string(validation_size) + " exceeds the " +
                     std::to_string(examples.size()) + " available examples");
  }
  const auto perm = seeded_permutation(examples.size(), seed);
  std::vector<bool> in_val(examples.size(), false);
  for (std::size_t i = 0; i < validation_size; ++i) in_val[perm[i]] = true;
  std::pair<std::vector<QAExample>, std::vector<QAExample>> out;
  for (std::size_t i = 0; i < examples.size(); ++i) (in_val[i] ? out.second : out.first).push_back(examples[i]);
  return out;
}

std::vector<QAExample> subsample_per_context(const std::vector<QAExample>& examples, std::size_t n,
                                             std::uint64_t seed) {
  std::vector<std::vector<std::size_t>> groups;
  std::unordered_map<std::string_view, std::size_t> group_of;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    auto [it, inserted] = group_of.try_emplace(examples[i].context, groups.size());
    if (inserted) groups.emplace_back();
    groups[it->second].push_back(i);
  }
  Rng rng(mix_seed(seed ^ 0x5DEECE66Dull));
  std::vector<std::size_t> pick(groups.size());
  for (std::size_t g = 0; g < groups.size(); ++g) pick[g] = groups[g][rng.below(groups[g].size())];

  const auto perm = seeded_permutation(groups.size(), seed);
  const std::size_t keep = std::min(n, groups.size());
  std::vector<std::size_t> chosen;
  chosen.reserve(keep);
  for (std::size_t k = 0; k < keep; ++k) chosen.push_back(pick[perm[k]]);
  std::sort(chosen.begin(), chosen.end());

  std::vector<QAExample> out;
  out.reserve(chosen.size());
  for (auto i : chosen) out.push_back(examples[i]);
  return out;
}

}  // namespace synthqa
