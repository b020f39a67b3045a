#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>

// Twitch AutoMod toxicity taxonomy: four categories, eight subclasses.

namespace chattox {

enum class Category { Harassment, Discrimination, SexualContent, Profanity };

enum class Subclass {
  Aggression,
  Bullying,
  Disability,
  SexualityGender,
  Misogyny,
  RaceEthnicityReligion,
  SexBasedTerms,
  Swearing,
};

inline constexpr std::size_t kCategoryCount = 4;
inline constexpr std::size_t kSubclassCount = 8;

inline constexpr std::array<Category, kCategoryCount> kAllCategories = {
    Category::Harassment, Category::Discrimination, Category::SexualContent,
    Category::Profanity};

inline constexpr std::array<Subclass, kSubclassCount> kAllSubclasses = {
    Subclass::Aggression,      Subclass::Bullying, Subclass::Disability,
    Subclass::SexualityGender, Subclass::Misogyny, Subclass::RaceEthnicityReligion,
    Subclass::SexBasedTerms,   Subclass::Swearing};

constexpr std::size_t index_of(Subclass s) { return static_cast<std::size_t>(s); }
constexpr std::size_t index_of(Category c) { return static_cast<std::size_t>(c); }

constexpr Category category_of(Subclass s) {
  switch (s) {
    case Subclass::Aggression:
    case Subclass::Bullying:
      return Category::Harassment;
    case Subclass::Disability:
    case Subclass::SexualityGender:
    case Subclass::Misogyny:
    case Subclass::RaceEthnicityReligion:
      return Category::Discrimination;
    case Subclass::SexBasedTerms:
      return Category::SexualContent;
    case Subclass::Swearing:
      return Category::Profanity;
  }
  return Category::Harassment;
}

/// Lowercase snake-case key used in stores and reports.
std::string_view canonical_string(Subclass s);
std::string_view canonical_string(Category c);

/// Human-readable name as printed in the Twitch taxonomy table.
std::string_view display_name(Subclass s);
std::string_view display_name(Category c);

/// Verbatim description of the subclass from the Twitch taxonomy table.
std::string_view definition(Subclass s);

/// Case-insensitive match against canonical names and known aliases.
/// nullopt means the token is not part of the taxonomy.
std::optional<Subclass> parse_subclass(std::string_view text);
std::optional<Category> parse_category(std::string_view text);

/// Every accepted spelling of a subclass, lowercase.
struct SubclassAlias {
  std::string_view text;
  Subclass subclass;
};
std::span<const SubclassAlias> subclass_aliases();

}  // namespace chattox
