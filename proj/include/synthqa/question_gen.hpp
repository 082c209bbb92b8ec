#pragma once

// Template question generation from a sentence and an answer entity.

#include <array>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "synthqa/corpus.hpp"
#include "synthqa/rng.hpp"

namespace synthqa {

/// Question styles. Names follow the template notation: A and B are the
/// sentence text before and after the answer, Wh is the question word.
enum class TemplateVariant {
  kCloze,          // A [MASK] B.
  kAWhB,           // A + Wh + B + ?
  kWhAB,           // Wh + A + B + ?
  kWhBA,           // Wh + B + A + ?
  kBANoWh,         // B + A + ?
  kWhBANoQmark,    // Wh + B + A
  kWhSimpleBA,     // Wh_simple + B + A + ?
  kWhatBA,         // What + B + A + ?
};

inline constexpr std::array<TemplateVariant, 8> kAllVariants = {
    TemplateVariant::kCloze,  TemplateVariant::kAWhB,        TemplateVariant::kWhAB,
    TemplateVariant::kWhBA,   TemplateVariant::kBANoWh,      TemplateVariant::kWhBANoQmark,
    TemplateVariant::kWhSimpleBA, TemplateVariant::kWhatBA};

/// Canonical upper-case name, e.g. "WH_B_A".
std::string_view variant_name(TemplateVariant v);
/// Accepts canonical names case-insensitively, with '-' or '_'.
std::optional<TemplateVariant> parse_variant(std::string_view name);
std::string allowed_variant_names();

/// True for the variants whose wh-word is sampled from the bi-gram prior.
bool uses_wh_prior(TemplateVariant v);

struct TemplateParts {
  std::string fragment_a;
  std::string answer_surface;
  std::string fragment_b;

  friend bool operator==(const TemplateParts&, const TemplateParts&) = default;
};

/// Splits around the answer span; trims both fragments and drops one
/// trailing . ! or ? from fragment B. Throws DataError on a bad span.
TemplateParts split_fragments(std::string_view sentence, const Entity& answer);

std::string make_cloze(const TemplateParts& parts);

/// Question-initial bi-gram distribution per entity label. The label "*"
/// is the fallback for labels without their own row.
class WhPriorTable {
 public:
  using Row = std::vector<std::pair<std::string, double>>;

  WhPriorTable() = default;
  /// Parses {"PERSON": [["who was", 0.4], ...], "*": [...]} and validates it.
  static WhPriorTable load(std::istream& in);
  static WhPriorTable from_rows(std::map<std::string, Row> rows);

  /// Row for `label`, or the "*" row, or nullptr.
  const Row* lookup(std::string_view label) const;
  const std::map<std::string, Row>& rows() const { return rows_; }
  void save(std::ostream& out) const;

 private:
  void validate() const;
  std::map<std::string, Row> rows_;
};

/// Built-in table used when no prior file is supplied.
WhPriorTable default_wh_priors();

/// Inverse-CDF draw from a row using one uniform from `rng`.
const std::string& sample_bigram(const WhPriorTable::Row& row, Rng& rng);

/// Fixed label -> wh-word mapping used by WH_SIMPLE_B_A.
std::string_view simple_wh(std::string_view label);

/// Wh component for `variant`: sampled bi-gram for the prior variants, the
/// five-way mapping for WH_SIMPLE_B_A, "what" for WHAT_B_A and the empty
/// string for CLOZE and B_A_NO_WH. Throws DataError when the prior has no
/// row for the label and no "*" fallback.
std::string choose_wh(std::string_view label, TemplateVariant variant, const WhPriorTable& prior, Rng& rng);

/// Assembles a non-cloze question. Fragments are joined with single spaces,
/// empty pieces are skipped, "?" is appended without a space where the
/// variant asks for it, and the first character is uppercased.
std::string make_wh_question(const TemplateParts& parts, TemplateVariant variant, std::string_view wh);

/// make_cloze or make_wh_question depending on the variant.
std::string make_question(const TemplateParts& parts, TemplateVariant variant, std::string_view wh);

}  // namespace synthqa
