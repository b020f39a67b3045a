#include "chattox/taxonomy.hpp"

#include <algorithm>
#include <cctype>
#include <string>

namespace chattox {

namespace {

constexpr SubclassAlias kAliases[] = {
    {"aggression", Subclass::Aggression},
    {"bullying", Subclass::Bullying},
    {"disability", Subclass::Disability},
    {"sexuality_gender", Subclass::SexualityGender},
    {"sexuality gender", Subclass::SexualityGender},
    {"sexuality or gender", Subclass::SexualityGender},
    {"sexuality/gender", Subclass::SexualityGender},
    {"sexuality, sex, or gender", Subclass::SexualityGender},
    {"sexuality, sex, gender", Subclass::SexualityGender},
    {"misogyny", Subclass::Misogyny},
    {"race_ethnicity_religion", Subclass::RaceEthnicityReligion},
    {"race ethnicity religion", Subclass::RaceEthnicityReligion},
    {"race, ethnicity, or religion", Subclass::RaceEthnicityReligion},
    {"race, ethnicity, religion", Subclass::RaceEthnicityReligion},
    {"race/religion", Subclass::RaceEthnicityReligion},
    {"race", Subclass::RaceEthnicityReligion},
    {"sex_based_terms", Subclass::SexBasedTerms},
    {"sex based terms", Subclass::SexBasedTerms},
    {"sex-based terms", Subclass::SexBasedTerms},
    {"sexual content", Subclass::SexBasedTerms},
    {"swearing", Subclass::Swearing},
    {"profanity targeted", Subclass::Swearing},
    {"profanity", Subclass::Swearing},
};

std::string normalize(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char c : text) {
    auto uc = static_cast<unsigned char>(c);
    if (std::isspace(uc)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(static_cast<char>(std::tolower(uc)));
  }
  while (!out.empty() && (out.back() == '.' || out.back() == ':' || out.back() == ';' ||
                          out.back() == ',' || out.back() == '!')) {
    out.pop_back();
  }
  return out;
}

}  // namespace

std::string_view canonical_string(Subclass s) {
  switch (s) {
    case Subclass::Aggression: return "aggression";
    case Subclass::Bullying: return "bullying";
    case Subclass::Disability: return "disability";
    case Subclass::SexualityGender: return "sexuality_gender";
    case Subclass::Misogyny: return "misogyny";
    case Subclass::RaceEthnicityReligion: return "race_ethnicity_religion";
    case Subclass::SexBasedTerms: return "sex_based_terms";
    case Subclass::Swearing: return "swearing";
  }
  return "";
}

std::string_view canonical_string(Category c) {
  switch (c) {
    case Category::Harassment: return "harassment";
    case Category::Discrimination: return "discrimination";
    case Category::SexualContent: return "sexual_content";
    case Category::Profanity: return "profanity";
  }
  return "";
}

std::string_view display_name(Subclass s) {
  switch (s) {
    case Subclass::Aggression: return "Aggression";
    case Subclass::Bullying: return "Bullying";
    case Subclass::Disability: return "Disability";
    case Subclass::SexualityGender: return "Sexuality, sex, or gender";
    case Subclass::Misogyny: return "Misogyny";
    case Subclass::RaceEthnicityReligion: return "Race, ethnicity, or religion";
    case Subclass::SexBasedTerms: return "Sex-based terms";
    case Subclass::Swearing: return "Swearing";
  }
  return "";
}

std::string_view display_name(Category c) {
  switch (c) {
    case Category::Harassment: return "Harassment";
    case Category::Discrimination: return "Discrimination and Slurs";
    case Category::SexualContent: return "Sexual Content";
    case Category::Profanity: return "Profanity";
  }
  return "";
}

std::string_view definition(Subclass s) {
  switch (s) {
    case Subclass::Aggression:
      return "Threatening, inciting, or promoting violence or other harm";
    case Subclass::Bullying:
      return "Name-calling, insults, or antagonization";
    case Subclass::Disability:
      return "Demonstrating hatred or prejudice based on perceived or actual mental or "
             "physical abilities";
    case Subclass::SexualityGender:
      return "Demonstrating hatred or prejudice based on sexual identity, sexual "
             "orientation, gender identity, or gender expression";
    case Subclass::Misogyny:
      return "Demonstrating hatred or prejudice against women, including sexual "
             "objectification";
    case Subclass::RaceEthnicityReligion:
      return "Demonstrating hatred or prejudice based on race, ethnicity, or religion";
    case Subclass::SexBasedTerms:
      return "Sexual acts, anatomy";
    case Subclass::Swearing:
      return "Swear words, &^#$%*";
  }
  return "";
}

std::span<const SubclassAlias> subclass_aliases() { return kAliases; }

std::optional<Subclass> parse_subclass(std::string_view text) {
  const std::string key = normalize(text);
  for (const auto& alias : kAliases) {
    if (alias.text == key) return alias.subclass;
  }
  return std::nullopt;
}

std::optional<Category> parse_category(std::string_view text) {
  std::string key = normalize(text);
  std::replace(key.begin(), key.end(), ' ', '_');
  for (Category c : kAllCategories) {
    if (canonical_string(c) == key) return c;
  }
  if (key == "discrimination_and_slurs") return Category::Discrimination;
  return std::nullopt;
}

}  // namespace chattox
