#include <doctest.h>

#include "synthqa/error.hpp"
#include "synthqa/utf8.hpp"

using namespace synthqa;

TEST_CASE("code point offsets") {
  const std::string s = "Zoë went to Kraków.";
  CHECK(utf8::length(s) == 19);
  CHECK(utf8::slice(s, 12, 18) == "Kraków");
  CHECK(utf8::byte_offset(s, 3) == 4);
  CHECK(utf8::cp_offset(s, 4) == 3);
  CHECK(utf8::encode(utf8::decode(s)) == s);
}

TEST_CASE("invalid input") {
  CHECK_FALSE(utf8::is_valid("\xC3"));
  CHECK_FALSE(utf8::is_valid("\xED\xA0\x80"));  // surrogate
  CHECK_THROWS_AS(utf8::decode("ab\xFF"), DataError);
}

TEST_CASE("case folding") {
  CHECK(utf8::to_lower("ÀÉÎ ŁÓDŹ Ωμέγα ДОМ") == "àéî łódź ωμέγα дом");
  CHECK(utf8::iequals("Kraków", "KRAKÓW"));
  CHECK_FALSE(utf8::iequals("Paris", "Pari"));
  CHECK(utf8::is_space(0x00A0));
  CHECK(utf8::is_word(U'é'));
  CHECK_FALSE(utf8::is_word(U'-'));
}
