#pragma once

// SQuAD-style answer normalization and token overlap metrics. The same
// tokenization feeds the retrieval index, the near-duplicate filter and the
// evaluator, so all three agree on what a "token" is.

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace synthqa {

/// Lowercase, drop ASCII punctuation, drop the articles a/an/the as whole
/// words, collapse whitespace. Mirrors the official SQuAD v1.1 normalizer.
std::string normalize_text(std::string_view s);

/// normalize_text followed by whitespace split. Never yields empty tokens.
std::vector<std::string> normalized_tokens(std::string_view s);

/// Number of tokens shared by two bags, counted with multiplicity.
std::size_t multiset_overlap(std::vector<std::string> a, std::vector<std::string> b);

/// Token F1 in [0, 1]. Both sides empty after normalization gives 1.0, one
/// side empty gives 0.0. Computed as 2*overlap/(|a|+|b|), which equals
/// 2PR/(P+R) but rounds once.
double token_f1(std::string_view a, std::string_view b);
/// Same, over already-normalized token lists.
double token_f1(std::span<const std::string> a, std::span<const std::string> b);

/// The official v1.1 scorer's F1: zero whenever nothing overlaps, including
/// when both sides are empty. Used by the evaluator so scores line up with
/// the reference script.
double squad_f1(std::string_view prediction, std::string_view gold);

int exact_match(std::string_view prediction, std::string_view gold);

}  // namespace synthqa
