#include "synthqa/cli.hpp"

#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "synthqa/annotate.hpp"
#include "synthqa/corpus.hpp"
#include "synthqa/dataset.hpp"
#include "synthqa/error.hpp"
#include "synthqa/evaluation.hpp"
#include "synthqa/question_gen.hpp"
#include "synthqa/retrieval.hpp"
#include "synthqa/squad.hpp"
#include "synthqa/text_metrics.hpp"

namespace synthqa {

namespace {

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  return in;
}

template <typename F>
void write_via(const std::string& path, F&& body) {
  std::ostringstream os;
  body(os);
  write_file_atomic(path, os.str());
}

Corpus load_store(const std::string& path) {
  auto in = open_in(path);
  return Corpus::load_store(in);
}

Gazetteer load_gazetteer(const std::string& path) {
  auto in = open_in(path);
  return Gazetteer::load(in);
}

struct GenerateArgs {
  std::string store, index, variant = "WH_B_A", mode = "both", wh_priors, out_train, out_val, skip_log;
  std::string title = "synthqa";
  GenerationConfig config;
  int jobs = 0;
};

int do_generate(const GenerateArgs& a, std::ostream& out, std::ostream& err) {
  GenerationConfig cfg = a.config;
  const auto variant = parse_variant(a.variant);
  if (!variant) throw UsageError("unknown variant \"" + a.variant + "\"; allowed: " + allowed_variant_names());
  const auto mode = parse_mode(a.mode);
  if (!mode) throw UsageError("unknown mode \"" + a.mode + "\"; allowed: none, query, context, both");
  cfg.variant = *variant;
  cfg.mode = *mode;
  cfg.validate();
  if (cfg.use_retrieved && a.index.empty()) throw UsageError("--index is required with --use-retrieved true");
  if (cfg.validation_size > 0 && a.out_val.empty()) throw UsageError("--out-val is required when --val-size > 0");

  const Corpus corpus = load_store(a.store);
  if (!corpus.annotated()) err << "warning: sentence store carries no entity annotations\n";
  Bm25Index index;
  if (cfg.use_retrieved) {
    auto in = open_in(a.index);
    index = Bm25Index::load(in);
  }
  WhPriorTable prior = default_wh_priors();
  if (!a.wh_priors.empty()) {
    auto in = open_in(a.wh_priors);
    prior = WhPriorTable::load(in);
  }

  GenerationReport report;
  const auto examples = generate_dataset(corpus, index, cfg, prior, a.jobs, &report);
  std::pair<std::vector<QAExample>, std::vector<QAExample>> split;
  try {
    split = split_validation(examples, cfg.validation_size, cfg.seed);
  } catch (const UsageError& e) {
    throw DataError(e.what());
  }
  write_squad_json(a.out_train, split.first, a.title);
  if (!a.out_val.empty()) write_squad_json(a.out_val, split.second, a.title);

  if (!a.skip_log.empty()) {
    write_via(a.skip_log, [&](std::ostream& os) {
      for (const auto& s : report.skipped) {
        nlohmann::ordered_json j;
        j["sent_id"] = s.sent_id;
        j["answer"] = s.answer.surface;
        j["label"] = s.answer.label;
        j["start"] = s.answer.char_start;
        j["reason"] = "no accepted retrieval";
        os << j.dump() << '\n';
      }
    });
  }
  err << "pairs considered: " << report.pairs_considered << ", skipped (no accepted retrieval): "
      << report.skipped.size() << ", duplicates: " << report.duplicates << '\n';
  out << "train " << split.first.size() << " -> " << a.out_train << '\n';
  if (!a.out_val.empty()) out << "validation " << split.second.size() << " -> " << a.out_val << '\n';
  return kExitOk;
}

ContextEntities context_entities(const SquadFile& gold, const std::string& annotations, bool heuristic,
                                 const std::string& gazetteer) {
  if (heuristic) {
    const Gazetteer g = gazetteer.empty() ? Gazetteer{} : load_gazetteer(gazetteer);
    return context_entities_heuristic(gold, g);
  }
  if (annotations.empty()) throw UsageError("pass --annotations <file> or --heuristic");
  auto in = open_in(annotations);
  return context_entities_from_annotations(read_annotation_records(in));
}

void print_counts(std::ostream& out, const char* what, const std::map<std::string, std::size_t>& counts) {
  for (const auto& [k, v] : counts) out << what << '\t' << k << '\t' << v << '\n';
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Synthesize extractive QA training data from a document collection"};
  app.name("synthqa");
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML/INI config file; explicit flags override it")->envname("SYNTHQA_CONFIG");

  // ingest
  std::string corpus_path, out_path;
  auto* ingest = app.add_subcommand("ingest", "Split documents into a sentence store");
  ingest->add_option("--corpus", corpus_path, "Documents, one JSON object per line")->required();
  ingest->add_option("--out", out_path, "Sentence store to write")->required();

  // annotate
  std::string store_path, annotations_path, gazetteer_path, export_path;
  bool heuristic = false;
  int jobs = 0;
  auto* annotate = app.add_subcommand("annotate", "Attach entity annotations to a sentence store");
  annotate->add_option("--store", store_path, "Sentence store")->required();
  auto* ann_opt = annotate->add_option("--annotations", annotations_path, "Annotation interchange file");
  auto* heur_opt = annotate->add_flag("--heuristic", heuristic, "Use the built-in rule tagger");
  ann_opt->excludes(heur_opt);
  annotate->add_option("--gazetteer", gazetteer_path, "Gazetteer JSON for --heuristic")->needs(heur_opt);
  annotate->add_option("--out", out_path, "Annotated store (default: overwrite --store)");
  annotate->add_option("--export", export_path, "Also write the annotations in interchange form");
  annotate->add_option("--jobs", jobs, "Worker threads (0 = all)");

  // index
  auto* index_cmd = app.add_subcommand("index", "Build and save the BM25 sentence index");
  index_cmd->add_option("--store", store_path, "Sentence store")->required();
  index_cmd->add_option("--out", out_path, "Index snapshot to write")->required();
  index_cmd->add_option("--jobs", jobs, "Worker threads (0 = all)");

  // generate
  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Generate SQuAD-format training and validation files");
  generate->add_option("--store", gen.store, "Annotated sentence store")->required();
  generate->add_option("--index", gen.index, "Index snapshot (needed with --use-retrieved true)");
  generate->add_option("--variant", gen.variant, "Template: " + allowed_variant_names())->capture_default_str();
  generate->add_option("--mode", gen.mode, "Auxiliary entity matching: none|query|context|both")->capture_default_str();
  generate->add_option("--use-retrieved", gen.config.use_retrieved, "Build questions from retrieved sentences")
      ->capture_default_str();
  generate->add_option("--size", gen.config.target_size, "Total examples (train + validation)")->capture_default_str();
  generate->add_option("--val-size", gen.config.validation_size, "Validation examples carved out of --size")
      ->capture_default_str();
  generate->add_option("--seed", gen.config.seed, "Random seed")->capture_default_str();
  generate->add_option("--f1-cap", gen.config.f1_cap, "Reject retrievals with token F1 >= this")->capture_default_str();
  generate->add_option("--top-k", gen.config.top_k, "Candidates considered per query")->capture_default_str();
  generate->add_flag("--exclude-document", gen.config.exclude_document,
                     "Reject retrievals from anywhere in the query's document");
  generate->add_option("--wh-priors", gen.wh_priors, "Wh bi-gram prior table (default: built-in)");
  generate->add_option("--out-train", gen.out_train, "Training file")->required();
  generate->add_option("--out-val", gen.out_val, "Validation file");
  generate->add_option("--title", gen.title, "Article title in the output files")->capture_default_str();
  generate->add_option("--skip-log", gen.skip_log, "JSON Lines log of skipped (sentence, answer) pairs");
  generate->add_option("--jobs", gen.jobs, "Worker threads (0 = all); output does not depend on it");

  // evaluate
  std::string gold_path, pred_path, report_path;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Score predictions with SQuAD v1.1 EM/F1");
  evaluate_cmd->add_option("--gold", gold_path, "Gold SQuAD file")->required();
  evaluate_cmd->add_option("--pred", pred_path, "Predictions {qid: answer}")->required();
  evaluate_cmd->add_option("--report", report_path, "Write the JSON report here as well");

  // ner-subset
  auto* subset = app.add_subcommand("ner-subset", "Keep gold questions whose answer is a named entity");
  subset->add_option("--gold", gold_path, "Gold SQuAD file")->required();
  auto* sub_ann = subset->add_option("--annotations", annotations_path,
                                     "Annotations keyed by the sent_ids of `squad-corpus` output");
  auto* sub_heur = subset->add_flag("--heuristic", heuristic, "Tag contexts with the built-in rule tagger");
  sub_ann->excludes(sub_heur);
  subset->add_option("--gazetteer", gazetteer_path, "Gazetteer JSON for --heuristic")->needs(sub_heur);
  subset->add_option("--out", out_path, "Output SQuAD file")->required();

  // stats
  std::string train_path;
  auto* stats = app.add_subcommand("stats", "Count generated examples per variant and label");
  stats->add_option("--train", train_path, "Generated SQuAD file")->required();

  // squad-corpus
  auto* squad_corpus = app.add_subcommand("squad-corpus", "Turn gold contexts into a corpus file for annotation");
  squad_corpus->add_option("--gold", gold_path, "Gold SQuAD file")->required();
  squad_corpus->add_option("--out", out_path, "Corpus JSON Lines to write")->required();

  // derive-priors
  std::size_t max_per_label = 20;
  auto* derive = app.add_subcommand("derive-priors", "Estimate wh bi-gram priors from a labelled QA file");
  derive->add_option("--gold", gold_path, "SQuAD-format file with questions")->required();
  auto* der_ann = derive->add_option("--annotations", annotations_path, "Context annotations");
  auto* der_heur = derive->add_flag("--heuristic", heuristic, "Tag contexts with the built-in rule tagger");
  der_ann->excludes(der_heur);
  derive->add_option("--gazetteer", gazetteer_path, "Gazetteer JSON for --heuristic")->needs(der_heur);
  derive->add_option("--max-per-label", max_per_label, "Bi-grams kept per label")->capture_default_str();
  derive->add_option("--out", out_path, "Prior table to write")->required();

  // subsample
  std::string in_path;
  std::size_t n_keep = 0;
  std::uint64_t seed = 0;
  auto* subsample = app.add_subcommand("subsample", "Keep one random question per context, then N contexts");
  subsample->add_option("--in", in_path, "SQuAD file")->required();
  subsample->add_option("--n", n_keep, "Contexts to keep")->required();
  subsample->add_option("--seed", seed, "Random seed");
  subsample->add_option("--out", out_path, "Output SQuAD file")->required();

  // search
  std::string index_path, query_text;
  std::size_t top_k = 10;
  auto* search = app.add_subcommand("search", "Rank stored sentences against a free-text query");
  search->add_option("--store", store_path, "Sentence store")->required();
  search->add_option("--index", index_path, "Index snapshot")->required();
  search->add_option("--query", query_text, "Query text")->required();
  search->add_option("--top-k", top_k, "Results to print")->capture_default_str();
  search->add_option("--jobs", jobs, "Worker threads (0 = all)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (*ingest) {
      auto in = open_in(corpus_path);
      const Corpus c = Corpus::ingest(in);
      write_via(out_path, [&](std::ostream& os) { c.save_store(os); });
      out << "ingested " << c.paragraphs().size() << " paragraphs, " << c.sentences().size() << " sentences\n";
    } else if (*annotate) {
      if (annotations_path.empty() && !heuristic) throw UsageError("pass --annotations <file> or --heuristic");
      Corpus c = load_store(store_path);
      if (heuristic) {
        const Gazetteer g = gazetteer_path.empty() ? Gazetteer{} : load_gazetteer(gazetteer_path);
        heuristic_annotate_corpus(c, g, jobs);
      } else {
        auto in = open_in(annotations_path);
        load_annotations(c, in);
      }
      const std::string target = out_path.empty() ? store_path : out_path;
      write_via(target, [&](std::ostream& os) { c.save_store(os); });
      if (!export_path.empty()) write_via(export_path, [&](std::ostream& os) { write_annotations(os, c); });
      std::size_t n = 0;
      for (const auto& s : c.sentences()) n += s.entities.size();
      out << "annotated " << c.sentences().size() << " sentences with " << n << " entities\n";
    } else if (*index_cmd) {
      const Corpus c = load_store(store_path);
      const Bm25Index idx = Bm25Index::build(c, jobs);
      write_via(out_path, [&](std::ostream& os) { idx.save(os); });
      out << "indexed " << idx.size() << " sentences, " << idx.vocabulary_size() << " terms\n";
    } else if (*generate) {
      return do_generate(gen, out, err);
    } else if (*evaluate_cmd) {
      const SquadFile gold = read_squad_file(gold_path);
      auto in = open_in(pred_path);
      const EvalReport r = evaluate(gold, read_predictions(in));
      for (const auto& id : r.missing) err << "warning: unanswered question " << id << " will receive score 0\n";
      write_report(out, r);
      if (!report_path.empty()) write_via(report_path, [&](std::ostream& os) { write_report(os, r); });
    } else if (*subset) {
      const SquadFile gold = read_squad_file(gold_path);
      const SquadFile kept = ner_subset(gold, context_entities(gold, annotations_path, heuristic, gazetteer_path));
      write_via(out_path, [&](std::ostream& os) { write_squad(os, kept); });
      out << "kept " << kept.question_count() << " of " << gold.question_count() << " questions\n";
    } else if (*stats) {
      const SquadFile f = read_squad_file(train_path);
      std::map<std::string, std::size_t> by_variant, by_label, by_wh;
      std::size_t contexts = 0;
      for (const auto& a : f.data) {
        contexts += a.paragraphs.size();
        for (const auto& p : a.paragraphs) {
          for (const auto& q : p.qas) {
            const auto c1 = q.id.find(':');
            const auto c2 = q.id.rfind(':');
            if (c1 != std::string::npos && c2 > c1) {
              ++by_variant[q.id.substr(0, c1)];
              ++by_label[q.id.substr(c1 + 1, c2 - c1 - 1)];
            } else {
              ++by_variant["(unknown)"];
              ++by_label["(unknown)"];
            }
            const auto toks = normalized_tokens(q.question);
            ++by_wh[toks.empty() ? std::string("(empty)") : toks.front()];
          }
        }
      }
      out << "questions\t" << f.question_count() << "\ncontexts\t" << contexts << '\n';
      print_counts(out, "variant", by_variant);
      print_counts(out, "label", by_label);
      print_counts(out, "first_word", by_wh);
    } else if (*squad_corpus) {
      const SquadFile gold = read_squad_file(gold_path);
      write_via(out_path, [&](std::ostream& os) {
        for (const auto& d : squad_contexts_as_documents(gold)) {
          nlohmann::ordered_json j;
          j["doc_id"] = d.doc_id;
          j["title"] = d.title;
          j["paragraphs"] = d.paragraphs;
          os << j.dump() << '\n';
        }
      });
    } else if (*derive) {
      const SquadFile gold = read_squad_file(gold_path);
      const WhPriorTable t =
          derive_wh_priors(gold, context_entities(gold, annotations_path, heuristic, gazetteer_path), max_per_label);
      write_via(out_path, [&](std::ostream& os) { t.save(os); });
      out << "derived priors for " << t.rows().size() << " labels\n";
    } else if (*subsample) {
      const auto examples = read_squad_examples(in_path);
      const auto kept = subsample_per_context(examples, n_keep, seed);
      const SquadFile src = read_squad_file(in_path);
      write_squad_json(out_path, kept, src.data.empty() ? "synthqa" : src.data.front().title);
      out << "kept " << kept.size() << " examples\n";
    } else if (*search) {
      const Corpus c = load_store(store_path);
      auto in = open_in(index_path);
      const Bm25Index idx = Bm25Index::load(in);
      check_index_matches(idx, c);
      const auto tokens = normalized_tokens(query_text);
      const auto scores = idx.score_all_parallel(tokens, jobs);
      std::vector<ScoredSentence> ranked;
      for (std::size_t d = 0; d < scores.size(); ++d) ranked.push_back({static_cast<std::uint32_t>(d), scores[d]});
      const std::size_t k = std::min(top_k, ranked.size());
      std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(k), ranked.end(),
                        [&](const ScoredSentence& a, const ScoredSentence& b) { return idx.ranks_before(a, b); });
      out << std::setprecision(17);
      for (std::size_t r = 0; r < k; ++r) {
        const auto& s = c.sentences()[ranked[r].sentence];
        out << ranked[r].score << '\t' << s.sent_id << '\t' << s.text << '\n';
      }
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitOk;
}

int run(int argc, const char* const* argv) { return run(argc, argv, std::cout, std::cerr); }

}  // namespace synthqa
