#include <doctest.h>

#include <random>

#include "synthqa/text_metrics.hpp"

using namespace synthqa;

TEST_CASE("normalize_text") {
  CHECK(normalize_text("The Red Apple!") == "red apple");
  CHECK(normalize_text("  a   cat, an  owl  ") == "cat owl");
  CHECK(normalize_text("theater and another") == "theater and another");
  CHECK(normalize_text("U.S.A.") == "usa");
  CHECK(normalize_text("") == "");
  CHECK(normalized_tokens("the the the").empty());
}

TEST_CASE("token_f1 and exact_match examples") {
  CHECK(token_f1("the cat sat", "cat sat down") == doctest::Approx(0.8));
  CHECK(exact_match("The Louvre", "louvre") == 1);
  CHECK(exact_match("Louvre Museum", "louvre") == 0);
  CHECK(token_f1("", "") == 1.0);
  CHECK(token_f1("the", "cat") == 0.0);
  CHECK(squad_f1("the", "a") == 0.0);
  CHECK(squad_f1("cat sat", "the cat sat down") == doctest::Approx(0.8));
  CHECK(multiset_overlap({"a", "a", "b"}, {"a", "b", "b"}) == 2);
}

TEST_CASE("metric properties over random strings") {
  std::mt19937 gen(3);
  const std::vector<std::string> words = {"the", "A", "cat", "Cat,", "dog", "an", "x.y", "  ", "ü", "!"};
  auto random_text = [&] {
    std::string s;
    for (int i = 0, n = static_cast<int>(gen() % 8); i < n; ++i) s += words[gen() % words.size()] + " ";
    return s;
  };
  for (int i = 0; i < 500; ++i) {
    const std::string a = random_text(), b = random_text();
    const double f = token_f1(a, b);
    CHECK(f == token_f1(b, a));
    CHECK(f >= 0.0);
    CHECK(f <= 1.0);
    CHECK(normalize_text(normalize_text(a)) == normalize_text(a));
    CHECK(exact_match(a, b) == exact_match(b, a));
    if (exact_match(a, b) && !normalized_tokens(a).empty()) CHECK(f == 1.0);
  }
}
