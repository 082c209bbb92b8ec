#include <doctest.h>

#include <filesystem>
#include <sstream>

#include <json.hpp>

#include "synthqa/error.hpp"
#include "synthqa/squad.hpp"

using namespace synthqa;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) { return fs::temp_directory_path() / ("synthqa_unit_" + name); }

}  // namespace

TEST_CASE("grouping and shape") {
  const std::vector<QAExample> ex = {
      {"q1", "Zoë lives in Kraków.", "Where does Zoë live?", "Kraków", 13},
      {"q2", "Zoë lives in Kraków.", "Who lives in Kraków?", "Zoë", 0},
      {"q3", "Other text.", "What text?", "Other", 0},
  };
  const SquadFile f = to_squad(ex, "t");
  REQUIRE(f.data.size() == 1);
  REQUIRE(f.data[0].paragraphs.size() == 2);
  CHECK(f.data[0].paragraphs[0].qas.size() == 2);
  CHECK(f.question_count() == 3);

  std::ostringstream out;
  write_squad(out, f);
  const auto j = nlohmann::json::parse(out.str());
  CHECK(j["version"] == "1.1");
  CHECK(j["data"][0]["title"] == "t");
  CHECK(j["data"][0]["paragraphs"][0]["qas"][0]["answers"][0]["answer_start"] == 13);

  std::istringstream in(out.str());
  CHECK(from_squad(read_squad(in)) == ex);
}

TEST_CASE("extractive check") {
  CHECK_NOTHROW(check_examples({{"a", "Hello Zoë.", "Who?", "Zoë", 6}}));
  CHECK_THROWS_AS(check_examples({{"a", "Hello Zoë.", "Who?", "Zoë", 5}}), DataError);
  CHECK_THROWS_AS(check_examples({{"a", "Hello Zoë.", "", "Zoë", 6}}), DataError);
  CHECK_THROWS_AS(check_examples({{"a", "Hi.", "Q?", "Hi", 0}, {"a", "Hi.", "Q?", "Hi", 0}}), DataError);
}

TEST_CASE("file writes are validated and atomic") {
  const fs::path good = temp_file("good.json"), bad = temp_file("bad.json");
  fs::remove(bad);
  write_squad_json(good, {{"q1", "A b c.", "B?", "b", 2}}, "t");
  CHECK(read_squad_examples(good) == std::vector<QAExample>{{"q1", "A b c.", "B?", "b", 2}});
  CHECK_THROWS_AS(write_squad_json(bad, {{"q1", "A b c.", "B?", "b", 3}}, "t"), DataError);
  CHECK_FALSE(fs::exists(bad));
  CHECK_FALSE(fs::exists(bad.string() + ".tmp"));
  fs::remove(good);
}

TEST_CASE("malformed SQuAD input") {
  std::istringstream a("{\"data\": [{\"paragraphs\": [{\"context\": 5}]}]}");
  CHECK_THROWS_AS(read_squad(a), DataError);
  std::istringstream b("{");
  CHECK_THROWS_AS(read_squad(b), DataError);
  CHECK_THROWS_AS(read_squad_file("/nonexistent/file.json"), DataError);
}
