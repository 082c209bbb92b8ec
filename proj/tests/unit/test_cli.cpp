#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "synthqa/cli.hpp"

using namespace synthqa;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result cli(std::vector<std::string> args) {
  args.insert(args.begin(), "synthqa");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

struct Workdir {
  fs::path dir = fs::temp_directory_path() / "synthqa_cli_test";
  Workdir() {
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Workdir() { fs::remove_all(dir); }
  std::string operator/(const std::string& f) const { return (dir / f).string(); }
  void write(const std::string& f, const std::string& text) const { std::ofstream(dir / f) << text; }
};

const std::string kCorpus =
    "{\"doc_id\": \"d1\", \"paragraphs\": [\"Alan Turing was born in London in 1912. Turing studied at "
    "Cambridge.\"]}\n"
    "{\"doc_id\": \"d2\", \"paragraphs\": [\"In 1936 Alan Turing visited Princeton. Church taught Alan Turing "
    "at Princeton.\"]}\n"
    "{\"doc_id\": \"d3\", \"paragraphs\": [\"London hosted Alan Turing after 1912 and Cambridge.\"]}\n";

const std::string kGazetteer =
    R"({"PERSON": ["Alan Turing", "Turing", "Church"], "GPE": ["London", "Princeton"], "ORG": ["Cambridge"]})";

}  // namespace

TEST_CASE("usage errors exit 1") {
  CHECK(cli({}).code == kExitUsage);
  CHECK(cli({"frobnicate"}).code == kExitUsage);
  CHECK(cli({"ingest", "--corpus", "x"}).code == kExitUsage);
  const Result bad = cli({"generate", "--store", "s", "--index", "i", "--out-train", "t", "--val-size", "0",
                          "--variant", "WH_Q"});
  CHECK(bad.code == kExitUsage);
  CHECK(bad.err.find("WH_SIMPLE_B_A") != std::string::npos);
  CHECK(cli({"generate", "--store", "s", "--index", "i", "--out-train", "t", "--f1-cap", "1.5"}).code == kExitUsage);
  CHECK(cli({"--help"}).code == kExitOk);
}

TEST_CASE("data errors exit 2") {
  Workdir w;
  CHECK(cli({"ingest", "--corpus", w / "missing.jsonl", "--out", w / "s.jsonl"}).code == kExitData);
  w.write("bad.jsonl", "{\"doc_id\": \"d\", \"paragraphs\": [\"\"]}\n");
  const Result r = cli({"ingest", "--corpus", w / "bad.jsonl", "--out", w / "s.jsonl"});
  CHECK(r.code == kExitData);
  CHECK(r.err.find("line 1") != std::string::npos);
  CHECK_FALSE(fs::exists(w / "s.jsonl"));
}

TEST_CASE("pipeline through the command line") {
  Workdir w;
  w.write("corpus.jsonl", kCorpus);
  w.write("gaz.json", kGazetteer);
  REQUIRE(cli({"ingest", "--corpus", w / "corpus.jsonl", "--out", w / "store.jsonl"}).code == 0);
  REQUIRE(cli({"annotate", "--store", w / "store.jsonl", "--heuristic", "--gazetteer", w / "gaz.json", "--export",
               w / "ann.jsonl"})
              .code == 0);
  // Re-importing the exported interchange file is a no-op.
  REQUIRE(cli({"annotate", "--store", w / "store.jsonl", "--annotations", w / "ann.jsonl", "--out",
               w / "store2.jsonl"})
              .code == 0);
  std::ifstream a(w / "store.jsonl"), b(w / "store2.jsonl");
  CHECK(std::string(std::istreambuf_iterator<char>(a), {}) == std::string(std::istreambuf_iterator<char>(b), {}));

  REQUIRE(cli({"index", "--store", w / "store.jsonl", "--out", w / "index.jsonl"}).code == 0);
  const Result s = cli({"search", "--store", w / "store.jsonl", "--index", w / "index.jsonl", "--query",
                        "Alan Turing Princeton", "--top-k", "2"});
  CHECK(s.code == 0);
  CHECK(s.out.find("d2:0:") != std::string::npos);

  // Options may come from a config file; explicit flags win.
  w.write("gen.toml", "[generate]\nvariant = \"WH_SIMPLE_B_A\"\nmode = \"none\"\nsize = 20\nval-size = 2\n");
  const Result g = cli({"--config", w / "gen.toml", "generate", "--store", w / "store.jsonl", "--index",
                        w / "index.jsonl", "--out-train", w / "train.json", "--out-val", w / "val.json",
                        "--skip-log", w / "skips.jsonl", "--val-size", "1"});
  REQUIRE(g.code == 0);
  CHECK(g.out.find("validation 1") != std::string::npos);
  std::ifstream tin(w / "train.json");
  const auto train = nlohmann::json::parse(tin);
  const auto first = train["data"][0]["paragraphs"][0]["qas"][0];
  CHECK(first["id"].get<std::string>().rfind("WH_SIMPLE_B_A:", 0) == 0);

  const Result st = cli({"stats", "--train", w / "train.json"});
  CHECK(st.code == 0);
  CHECK(st.out.find("WH_SIMPLE_B_A") != std::string::npos);

  // Score the training file against itself.
  nlohmann::json preds = nlohmann::json::object();
  for (const auto& p : train["data"][0]["paragraphs"])
    for (const auto& q : p["qas"]) preds[q["id"].get<std::string>()] = q["answers"][0]["text"];
  w.write("pred.json", preds.dump());
  const Result ev = cli({"evaluate", "--gold", w / "train.json", "--pred", w / "pred.json", "--report", w / "r.json"});
  CHECK(ev.code == 0);
  std::ifstream rin(w / "r.json");
  const auto report = nlohmann::json::parse(rin);
  CHECK(report["exact_match"] == 100.0);

  // Predictions for other qids: scored zero with a warning, not an error.
  w.write("other.json", R"({"unrelated": "x"})");
  const Result partial = cli({"evaluate", "--gold", w / "train.json", "--pred", w / "other.json"});
  CHECK(partial.code == 0);
  CHECK(partial.err.find("warning") != std::string::npos);
  CHECK(partial.out.find("\"exact_match\":0.0") != std::string::npos);

  CHECK(cli({"subsample", "--in", w / "train.json", "--n", "1", "--seed", "3", "--out", w / "one.json"}).code == 0);
  CHECK(cli({"squad-corpus", "--gold", w / "train.json", "--out", w / "ctx.jsonl"}).code == 0);
  CHECK(cli({"ner-subset", "--gold", w / "train.json", "--heuristic", "--gazetteer", w / "gaz.json", "--out",
             w / "ner.json"})
            .code == 0);
  CHECK(cli({"derive-priors", "--gold", w / "train.json", "--heuristic", "--gazetteer", w / "gaz.json", "--out",
             w / "priors.json"})
            .code == 0);
  CHECK(cli({"generate", "--store", w / "store.jsonl", "--index", w / "index.jsonl", "--wh-priors",
             w / "priors.json", "--size", "5", "--val-size", "0", "--out-train", w / "t2.json"})
            .code == 0);
}
