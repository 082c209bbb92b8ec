// Serial reference kernels against their parallel counterparts.
//
//   ./build/bench/synthqa_bench --benchmark_counters_tabular=true
//
// The corpus is the bundled mini-corpus repeated SYNTHQA_BENCH_COPIES times
// (default 20, about 11k sentences) under fresh document ids.

#include <benchmark/benchmark.h>

#include <cstdlib>
#include <fstream>
#include <string>
#include <vector>

#include "synthqa/annotate.hpp"
#include "synthqa/corpus.hpp"
#include "synthqa/dataset.hpp"
#include "synthqa/parallel.hpp"
#include "synthqa/retrieval.hpp"
#include "synthqa/text_metrics.hpp"

using namespace synthqa;

namespace {

const std::string kData = std::string(SYNTHQA_SOURCE_DIR) + "/data/";

struct Fixture {
  Corpus corpus;
  Bm25Index index;
  std::vector<std::vector<std::string>> queries;
};

const Fixture& fixture() {
  static const Fixture fx = [] {
    std::ifstream in(kData + "mini_corpus.jsonl");
    const Corpus base = Corpus::ingest(in);
    std::vector<Document> docs;
    int copies = 20;
    if (const char* env = std::getenv("SYNTHQA_BENCH_COPIES")) copies = std::max(1, std::atoi(env));
    for (int c = 0; c < copies; ++c) {
      for (const auto& p : base.paragraphs()) {
        const std::string id = p.doc_id + "_" + std::to_string(c);
        if (docs.empty() || docs.back().doc_id != id) docs.push_back({id, "", {}});
        docs.back().paragraphs.push_back(p.text);
      }
    }
    Fixture f;
    f.corpus = Corpus::from_documents(docs);
    std::ifstream gin(kData + "mini_gazetteer.json");
    heuristic_annotate_corpus(f.corpus, Gazetteer::load(gin), 0);
    f.corpus.mark_annotated();
    f.index = Bm25Index::build(f.corpus, 0);
    for (std::size_t i = 0; i < f.corpus.sentences().size(); i += 97)
      f.queries.push_back(normalized_tokens(f.corpus.sentences()[i].text));
    return f;
  }();
  return fx;
}

void set_sentence_rate(benchmark::State& state, std::size_t per_iteration) {
  state.counters["sentences/s"] =
      benchmark::Counter(static_cast<double>(per_iteration), benchmark::Counter::kIsIterationInvariantRate);
}

void BM_IndexBuildSerial(benchmark::State& state) {
  const Corpus& c = fixture().corpus;
  for (auto _ : state) benchmark::DoNotOptimize(Bm25Index::build_serial(c));
  set_sentence_rate(state, c.sentences().size());
}

void BM_IndexBuildParallel(benchmark::State& state) {
  const Corpus& c = fixture().corpus;
  const int jobs = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(Bm25Index::build(c, jobs));
  set_sentence_rate(state, c.sentences().size());
}

void BM_ScoreAllSerial(benchmark::State& state) {
  const Fixture& f = fixture();
  std::size_t q = 0;
  for (auto _ : state) benchmark::DoNotOptimize(f.index.score_all_serial(f.queries[q++ % f.queries.size()]));
  set_sentence_rate(state, f.index.size());
}

void BM_ScoreAllParallel(benchmark::State& state) {
  const Fixture& f = fixture();
  const int jobs = static_cast<int>(state.range(0));
  std::size_t q = 0;
  for (auto _ : state) benchmark::DoNotOptimize(f.index.score_all_parallel(f.queries[q++ % f.queries.size()], jobs));
  set_sentence_rate(state, f.index.size());
}

void BM_Annotate(benchmark::State& state) {
  const Fixture& f = fixture();
  std::ifstream gin(kData + "mini_gazetteer.json");
  const Gazetteer g = Gazetteer::load(gin);
  const int jobs = static_cast<int>(state.range(0));
  for (auto _ : state) {
    state.PauseTiming();
    Corpus c = f.corpus;
    state.ResumeTiming();
    heuristic_annotate_corpus(c, g, jobs);
    benchmark::DoNotOptimize(c);
  }
  set_sentence_rate(state, f.corpus.sentences().size());
}

void BM_Generate(benchmark::State& state) {
  const Fixture& f = fixture();
  const WhPriorTable prior = default_wh_priors();
  GenerationConfig cfg;
  cfg.target_size = 2000;
  cfg.validation_size = 0;
  const int jobs = static_cast<int>(state.range(0));
  std::size_t produced = 0;
  for (auto _ : state) {
    const auto ex = generate_dataset(f.corpus, f.index, cfg, prior, jobs);
    produced = ex.size();
    benchmark::DoNotOptimize(ex);
  }
  state.counters["examples"] = static_cast<double>(produced);
}

// Thread counts: 1 (parallel code path, one worker) up to everything available.
void thread_args(benchmark::internal::Benchmark* b) {
  const int max = resolve_jobs(0);
  for (int t = 1; t < max; t *= 2) b->Arg(t);
  b->Arg(max);
}

}  // namespace

BENCHMARK(BM_IndexBuildSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_IndexBuildParallel)->Apply(thread_args)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_ScoreAllSerial)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_ScoreAllParallel)->Apply(thread_args)->Unit(benchmark::kMicrosecond)->UseRealTime();
BENCHMARK(BM_Annotate)->Apply(thread_args)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Generate)->Apply(thread_args)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
