#include <doctest.h>

#include <sstream>

#include "synthqa/annotate.hpp"
#include "synthqa/error.hpp"

using namespace synthqa;

namespace {

Gazetteer turing_gazetteer() {
  Gazetteer g;
  g.add("PERSON", "Alan Turing");
  g.add("GPE", "London");
  return g;
}

}  // namespace

TEST_CASE("heuristic tagger examples") {
  const auto e = heuristic_annotate("Alan Turing was born in London in 1912.", turing_gazetteer());
  REQUIRE(e.size() == 3);
  CHECK(e[0] == Entity{"Alan Turing", 0, 11, "PERSON"});
  CHECK(e[1] == Entity{"London", 24, 30, "GPE"});
  CHECK(e[2] == Entity{"1912", 34, 38, "DATE"});

  const auto p = heuristic_annotate("It rose 5%.", {});
  REQUIRE(p.size() == 1);
  CHECK(p[0] == Entity{"5%", 8, 10, "PERCENT"});

  const auto m = heuristic_annotate("It cost $1,200 on July 4, 1990 and 37 more.", {});
  REQUIRE(m.size() == 3);
  CHECK(m[0] == Entity{"$1,200", 8, 14, "MONEY"});
  CHECK(m[1] == Entity{"July 4, 1990", 18, 30, "DATE"});
  CHECK(m[2] == Entity{"37", 35, 37, "CARDINAL"});
}

TEST_CASE("heuristic tagger offsets count code points") {
  Gazetteer g;
  g.add("GPE", "Kraków");
  const auto e = heuristic_annotate("Zoë left Kraków in 2001.", g);
  REQUIRE(e.size() == 2);
  CHECK(e[0] == Entity{"Kraków", 9, 15, "GPE"});
  CHECK(e[1] == Entity{"2001", 19, 23, "DATE"});
  CHECK(heuristic_annotate("Krakówian pride.", g).empty());  // word boundary
}

TEST_CASE("entity matching rule") {
  CHECK(entities_match({"Paris", 0, 5, "GPE"}, {"PARIS", 7, 12, "GPE"}));
  CHECK_FALSE(entities_match({"Paris", 0, 5, "GPE"}, {"Paris", 0, 5, "PERSON"}));
}

// The interchange file is how externally produced annotations enter the
// store; these cases pin its shape from the consumer side.
TEST_CASE("interchange records load into a store") {
  Corpus c = Corpus::from_documents({{"d", "", {"Zoë met Ana in Paris. They left."}}});
  std::istringstream in(
      "{\"format\": \"annotations\", \"model\": \"en_core_web_sm\"}\n"
      "{\"sent_id\": \"d:0:0\", \"entities\": [{\"surface\": \"Zoë\", \"start\": 0, \"end\": 3, \"label\": \"PERSON\"},"
      " {\"surface\": \"Paris\", \"start\": 15, \"end\": 20, \"label\": \"GPE\"}]}\n"
      "\n"
      "{\"sent_id\": \"d:0:1\", \"entities\": []}\n");
  load_annotations(c, in);
  CHECK(c.annotated());
  CHECK(c.sentences()[0].entities.size() == 2);
  CHECK(entities_of(c, "d:0:0")[1].surface == "Paris");

  std::ostringstream out;
  write_annotations(out, c);
  std::istringstream again(out.str());
  const auto records = read_annotation_records(again);
  REQUIRE(records.size() == 2);
  CHECK(records[0].entities == c.sentences()[0].entities);
}

TEST_CASE("interchange violations are rejected without partial updates") {
  Corpus c = Corpus::from_documents({{"d", "", {"Zoë met Ana in Paris."}}});
  c.set_entities(0, {{"Ana", 8, 11, "PERSON"}});
  auto load = [&](const std::string& s) {
    std::istringstream in(s);
    load_annotations(c, in);
  };
  CHECK_THROWS_AS(load("{\"sent_id\": \"x:0:0\", \"entities\": []}"), DataError);
  CHECK_THROWS_AS(load("{\"sent_id\": \"d:0:0\", \"entities\": [{\"surface\": \"Paris\", \"start\": 14, \"end\": 19, "
                       "\"label\": \"GPE\"}]}"),
                  DataError);
  CHECK_THROWS_AS(load("{\"sent_id\": \"d:0:0\", \"entities\": []}\n{\"sent_id\": \"d:0:0\", \"entities\": []}"),
                  DataError);
  CHECK_THROWS_AS(load("{\"sent_id\": \"d:0:0\", \"entities\": [{\"surface\": \"Zoë\", \"start\": -1, \"end\": 3, "
                       "\"label\": \"PERSON\"}]}"),
                  DataError);
  CHECK_THROWS_AS(load("{\"sent_id\": \"d:0:0\""), DataError);
  REQUIRE(c.sentences()[0].entities.size() == 1);
  CHECK(c.sentences()[0].entities[0].surface == "Ana");
}

TEST_CASE("gazetteer file") {
  std::istringstream in("{\"PERSON\": [\"Alan Turing\"], \"GPE\": [\"London\", \"Paris\"]}");
  const Gazetteer g = Gazetteer::load(in);
  CHECK(g.entries().at("GPE").size() == 2);
  std::istringstream bad("{\"PERSON\": \"Alan\"}");
  CHECK_THROWS_AS(Gazetteer::load(bad), DataError);
}

TEST_CASE("corpus annotation is independent of thread count") {
  std::vector<Document> docs;
  for (int i = 0; i < 40; ++i)
    docs.push_back({"d" + std::to_string(i), "", {"Alan Turing was born in London in 19" + std::to_string(10 + i) +
                                                  ". It cost $" + std::to_string(i) + "."}});
  Corpus a = Corpus::from_documents(docs), b = a;
  heuristic_annotate_corpus(a, turing_gazetteer(), 1);
  heuristic_annotate_corpus(b, turing_gazetteer(), 4);
  CHECK(a.sentences() == b.sentences());
  CHECK(a.sentences()[0].entities.size() == 3);
}
