#include "synthqa/text_metrics.hpp"

#include <algorithm>
#include <string_view>

#include "synthqa/utf8.hpp"

namespace synthqa {

namespace {

constexpr std::string_view kPunctuation = R"(!"#$%&'()*+,-./:;<=>?@[\]^_`{|}~)";

bool is_punct(char32_t c) { return c < 0x80 && kPunctuation.find(static_cast<char>(c)) != std::string_view::npos; }

bool matches_at(const std::u32string& s, std::size_t i, std::u32string_view word) {
  if (i + word.size() > s.size()) return false;
  if (s.compare(i, word.size(), word) != 0) return false;
  return i + word.size() == s.size() || !utf8::is_word(s[i + word.size()]);
}

}  // namespace

std::string normalize_text(std::string_view s) {
  std::u32string text;
  text.reserve(s.size());
  for (char32_t c : utf8::decode(s)) {
    c = utf8::to_lower(c);
    if (!is_punct(c)) text.push_back(c);
  }

  // \b(a|an|the)\b -> ' ', scanning left to right over the unmodified text.
  std::u32string stripped;
  stripped.reserve(text.size());
  for (std::size_t i = 0; i < text.size();) {
    const bool at_boundary = utf8::is_word(text[i]) && (i == 0 || !utf8::is_word(text[i - 1]));
    if (at_boundary) {
      std::size_t hit = 0;
      if (matches_at(text, i, U"a")) hit = 1;
      else if (matches_at(text, i, U"an")) hit = 2;
      else if (matches_at(text, i, U"the")) hit = 3;
      if (hit != 0) {
        stripped.push_back(U' ');
        i += hit;
        continue;
      }
    }
    stripped.push_back(text[i]);
    ++i;
  }

  std::string out;
  out.reserve(stripped.size());
  bool pending_space = false;
  for (char32_t c : stripped) {
    if (utf8::is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    utf8::append(out, c);
  }
  return out;
}

std::vector<std::string> normalized_tokens(std::string_view s) {
  std::vector<std::string> tokens;
  const std::string norm = normalize_text(s);
  std::size_t start = 0;
  while (start < norm.size()) {
    std::size_t end = norm.find(' ', start);
    if (end == std::string::npos) end = norm.size();
    tokens.emplace_back(norm.substr(start, end - start));
    start = end + 1;
  }
  return tokens;
}

std::size_t multiset_overlap(std::vector<std::string> a, std::vector<std::string> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t common = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++common, ++i, ++j;
    }
  }
  return common;
}

double token_f1(std::span<const std::string> a, std::span<const std::string> b) {
  if (a.empty() && b.empty()) return 1.0;
  if (a.empty() || b.empty()) return 0.0;
  const std::size_t common =
      multiset_overlap(std::vector<std::string>(a.begin(), a.end()), std::vector<std::string>(b.begin(), b.end()));
  return static_cast<double>(2 * common) / static_cast<double>(a.size() + b.size());
}

double token_f1(std::string_view a, std::string_view b) {
  const auto ta = normalized_tokens(a);
  const auto tb = normalized_tokens(b);
  return token_f1(std::span<const std::string>(ta), std::span<const std::string>(tb));
}

double squad_f1(std::string_view prediction, std::string_view gold) {
  auto tp = normalized_tokens(prediction);
  auto tg = normalized_tokens(gold);
  const double np = static_cast<double>(tp.size());
  const double ng = static_cast<double>(tg.size());
  const std::size_t common = multiset_overlap(std::move(tp), std::move(tg));
  if (common == 0) return 0.0;
  const double precision = static_cast<double>(common) / np;
  const double recall = static_cast<double>(common) / ng;
  return (2 * precision * recall) / (precision + recall);
}

int exact_match(std::string_view prediction, std::string_view gold) {
  return normalize_text(prediction) == normalize_text(gold) ? 1 : 0;
}

}  // namespace synthqa
