#include "dapip/catalog.hpp"

#include <array>
#include <unordered_map>

#include "dapip/errors.hpp"

namespace dapip {
namespace {

struct Entry {
  const char* name;
  const char* description;  // nullptr: derived from a positional name
};

constexpr std::array<Entry, 18> kLookup = {{
    {"GetStreetNum", "House number preceding a street name"},
    {"GetStreetName", "Propercase word followed by a street suffix (St., Ave., ...)"},
    {"GetAptNum", "Number following Apt/Unit/Suite/#"},
    {"GetCityName", "City name from the city dictionary"},
    {"GetStateName", "US state name"},
    {"GetStateAbbr", "Two-letter US state abbreviation"},
    {"GetZipcode", "Five-digit number"},
    {"GetFirstName", "First name from the first-name dictionary"},
    {"GetLastName", "Last name from the last-name dictionary"},
    {"GetTitle", "Honorific title (Mr., Dr., ...)"},
    {"GetSuffix", "Name suffix (Jr., PhD, ...)"},
    {"GetCompany", "Company name"},
    {"GetCEO", "Chief executive name"},
    {"GetStockSymbol", "Stock ticker symbol"},
    {"GetWeekday", "Weekday name"},
    {"GetMonth", "Month name"},
    {"GetYear", "Four-digit year between 1900 and 2099"},
    {"GetDate", "Date in YYYY-MM-DD, M/D/YYYY or 'Month D, YYYY' form"},
}};

constexpr std::array<Entry, 13> kTransform = {{
    {"GetStateFromCity", "State abbreviation of the city found in the input"},
    {"GetCityFromZipcode", "City of the zip code found in the input"},
    {"GetStateAbbrFromState", "Abbreviation of the state name found in the input"},
    {"GetStateFromStateAbbr", "State name of the abbreviation found in the input"},
    {"GetFirstInitial", "Initial of the first name found in the input, with a dot"},
    {"GetLastInitial", "Initial of the last name found in the input, with a dot"},
    {"GetStockSymbolFromCEO", "Ticker of the company run by the CEO found in the input"},
    {"GetCEOFromCompany", "CEO of the company found in the input"},
    {"GetCompanyFromStockSymbol", "Company of the ticker found in the input"},
    {"GetOrdinalFromDate", "Day of month of the date found in the input, as an ordinal"},
    {"GetMonthFromDate", "Month name of the date found in the input"},
    {"GetWeekdayFromDate", "Weekday of the date found in the input"},
    {"GetYearFromDate", "Year of the date found in the input"},
}};

constexpr std::array<Entry, 104> kRegex = {{
    {"GetFirstWord", nullptr}, {"GetSecondWord", nullptr},
    {"GetThirdWord", nullptr}, {"GetFourthWord", nullptr},
    {"GetFifthWord", nullptr}, {"GetLastWord", nullptr},
    {"GetSecondToLastWord", nullptr}, {"GetThirdToLastWord", nullptr},
    {"GetFourthToLastWord", nullptr}, {"GetFifthToLastWord", nullptr},
    {"GetFirstNumber", nullptr}, {"GetSecondNumber", nullptr},
    {"GetThirdNumber", nullptr}, {"GetFourthNumber", nullptr},
    {"GetFifthNumber", nullptr}, {"GetLastNumber", nullptr},
    {"GetSecondToLastNumber", nullptr}, {"GetThirdToLastNumber", nullptr},
    {"GetFourthToLastNumber", nullptr}, {"GetFifthToLastNumber", nullptr},
    {"GetFirstAlpha", nullptr}, {"GetSecondAlpha", nullptr},
    {"GetThirdAlpha", nullptr}, {"GetFourthAlpha", nullptr},
    {"GetFifthAlpha", nullptr}, {"GetLastAlpha", nullptr},
    {"GetSecondToLastAlpha", nullptr}, {"GetThirdToLastAlpha", nullptr},
    {"GetFourthToLastAlpha", nullptr}, {"GetFifthToLastAlpha", nullptr},
    {"GetFirstWS", nullptr}, {"GetSecondWS", nullptr},
    {"GetThirdWS", nullptr}, {"GetFourthWS", nullptr},
    {"GetFifthWS", nullptr}, {"GetLastWS", nullptr},
    {"GetSecondToLastWS", nullptr}, {"GetThirdToLastWS", nullptr},
    {"GetFourthToLastWS", nullptr}, {"GetFifthToLastWS", nullptr},
    {"TrimSpaces", "Strips outer whitespace and collapses inner runs to one space"},
    {"TrimLeadingZeros", "Drops leading zeros that precede another digit"},
    {"GetIdentity", "The input unchanged"},
    {"ReplaceSpacesWithDashes", "Every space replaced by '-'"},
    {"ReplaceSpacesWithCommas", "Every space replaced by ','"},
    {"ReplaceSpacesWithUnderscores", "Every space replaced by '_'"},
    {"ToLowercase", "ASCII letters lowercased"},
    {"ToUppercase", "ASCII letters uppercased"},
    {"ToPropercase", "Each letter run capitalized, rest lowercased"},
    {"GetWordBetweenStartAndAt", "Prefix before the first '@'"},
    {"GetWordBetweenAtAndEnd", "Suffix after the first '@'"},
    {"GetWordBetweenStartAndDot", "Prefix before the first '.'"},
    {"GetWordBetweenDotAndEnd", "Suffix after the first '.'"},
    {"GetStartToFirstSpace", "Prefix before the first space"},
    {"GetFirstSpaceToEnd", "Suffix after the first space"},
    {"GetStartToLastSpace", "Prefix before the last space"},
    {"GetLastSpaceToEnd", "Suffix after the last space"},
    {"GetStartToDash", "Prefix before the first '-'"},
    {"GetFirstDashToSecondDash", "Text between the first and second '-' (or end)"},
    {"GetLastDashToEnd", "Suffix after the last '-'"},
    {"GetStartToFirstComma", "Prefix before the first ','"},
    {"GetWordBetweenFirstAndSecondComma", "Trimmed text between the first and second ','"},
    {"GetWordBetweenSecondAndThirdComma", "Trimmed text between the second and third ','"},
    {"GetLastCommaToEnd", "Suffix after the last ','"},
    {"GetWordBetweenCommaSpaceAndEnd", "Suffix after the first ', '"},
    {"GetStartToParan", "Prefix before the first '('"},
    {"GetStartToFirstColon", "Prefix before the first ':'"},
    {"GetStartToSecondColon", "Prefix before the second ':'"},
    {"GetStringBetweenLastColonToEnd", "Suffix after the last ':'"},
    {"GetStringBetweenLastFirstAndSecondQuote", "Text between the first and second '\"'"},
    {"GetStartToEndOfFirstNumber", "Prefix through the end of the first number"},
    {"GetFirstChar", "First character"},
    {"GetFirstTwoChar", "First two characters"},
    {"GetFirstThreeChar", "First three characters"},
    {"GetFirstFourChar", "First four characters"},
    {"GetFirstFiveChar", "First five characters"},
    {"GetFirstDigit", "First digit of the first number"},
    {"GetFirstTwoDigit", "First two digits of the first number"},
    {"GetFirstThreeDigit", "First three digits of the first number"},
    {"GetFirstFourDigit", "First four digits of the first number"},
    {"GetFirstFiveDigit", "First five digits of the first number"},
    {"GetFirstCapsWord", nullptr}, {"GetSecondCapsWord", nullptr},
    {"GetThirdCapsWord", nullptr}, {"GetFourthCapsWord", nullptr},
    {"GetFifthCapsWord", nullptr}, {"GetLastCapsWord", nullptr},
    {"GetSecondToLastCapsWord", nullptr}, {"GetThirdToLastCapsWord", nullptr},
    {"GetFourthToLastCapsWord", nullptr}, {"GetFifthToLastCapsWord", nullptr},
    {"GetFirstPropercaseWord", nullptr}, {"GetSecondPropercaseWord", nullptr},
    {"GetThirdPropercaseWord", nullptr}, {"GetFourthPropercaseWord", nullptr},
    {"GetFifthPropercaseWord", nullptr},
    {"GetAllPropercaseWords", "Span from the first to the last propercase word"},
    {"GetLastPropercaseWord", nullptr},
    {"GetSecondToLastPropercaseWord", nullptr},
    {"GetThirdToLastPropercaseWord", nullptr},
    {"GetFourthToLastPropercaseWord", nullptr},
    {"GetFifthToLastPropercaseWord", nullptr},
    {"GetAllLetters", "Span from the first to the last letter"},
    {"GetAllNumbers", "Span from the first to the last digit"},
}};

std::string positional_description(std::string_view name) {
  static constexpr std::array<std::pair<std::string_view, std::string_view>, 6>
      kClasses = {{{"PropercaseWord", "propercase word"},
                   {"CapsWord", "all-caps word"},
                   {"Number", "number"},
                   {"Alpha", "letter run"},
                   {"Word", "alphanumeric word"},
                   {"WS", "whitespace-delimited token"}}};
  static constexpr std::array<std::pair<std::string_view, std::string_view>, 10>
      kOrdinals = {{{"SecondToLast", "2nd-to-last"},
                    {"ThirdToLast", "3rd-to-last"},
                    {"FourthToLast", "4th-to-last"},
                    {"FifthToLast", "5th-to-last"},
                    {"First", "1st"},
                    {"Second", "2nd"},
                    {"Third", "3rd"},
                    {"Fourth", "4th"},
                    {"Fifth", "5th"},
                    {"Last", "last"}}};
  std::string_view rest = name.substr(3);  // strip "Get"
  for (auto [ord, ord_text] : kOrdinals) {
    if (!rest.starts_with(ord)) continue;
    const std::string_view cls = rest.substr(ord.size());
    for (auto [c, c_text] : kClasses) {
      if (cls == c) {
        return "The " + std::string(ord_text) + " " + std::string(c_text);
      }
    }
  }
  return std::string(name);
}

std::vector<ApiSpec> build_catalog() {
  std::vector<ApiSpec> out;
  auto add = [&](const auto& entries, ApiFamily family) {
    for (const Entry& e : entries) {
      ApiSpec spec;
      spec.id = ApiId{static_cast<std::uint16_t>(out.size())};
      spec.name = e.name;
      spec.family = family;
      spec.description =
          e.description ? std::string(e.description) : positional_description(e.name);
      out.push_back(std::move(spec));
    }
  };
  add(kLookup, ApiFamily::Lookup);
  add(kTransform, ApiFamily::Transform);
  add(kRegex, ApiFamily::Regex);
  return out;
}

const std::vector<ApiSpec>& catalog_storage() {
  static const std::vector<ApiSpec> catalog = build_catalog();
  return catalog;
}

const std::unordered_map<std::string, ApiId>& name_index() {
  static const auto index = [] {
    std::unordered_map<std::string, ApiId> m;
    for (const ApiSpec& s : catalog_storage()) {
      m.emplace(s.name, s.id);
      // Abbreviated spellings: GetFirstNum, GetThirdNum, ...
      if (s.name.ends_with("Number")) {
        m.emplace(s.name.substr(0, s.name.size() - 3), s.id);
      }
    }
    m.emplace("GetCity", m.at("GetCityName"));
    m.emplace("GetState", m.at("GetStateName"));
    return m;
  }();
  return index;
}

}  // namespace

std::string_view to_string(ApiFamily family) {
  switch (family) {
    case ApiFamily::Regex: return "Regex";
    case ApiFamily::Lookup: return "Lookup";
    case ApiFamily::Transform: return "Transform";
  }
  return "?";
}

std::optional<ApiFamily> parse_family(std::string_view name) {
  auto lower = [](std::string_view s) {
    std::string r(s);
    for (char& c : r) {
      if (c >= 'A' && c <= 'Z') c = static_cast<char>(c + 32);
    }
    return r;
  };
  const std::string n = lower(name);
  if (n == "regex") return ApiFamily::Regex;
  if (n == "lookup") return ApiFamily::Lookup;
  if (n == "transform") return ApiFamily::Transform;
  return std::nullopt;
}

std::span<const ApiSpec> api_catalog() { return catalog_storage(); }

const ApiSpec& api_spec(ApiId id) { return catalog_storage().at(id.value); }

std::vector<ApiId> list_apis(std::optional<ApiFamily> family) {
  std::vector<ApiId> out;
  for (const ApiSpec& s : catalog_storage()) {
    if (!family || s.family == *family) out.push_back(s.id);
  }
  return out;
}

std::optional<ApiId> find_api(std::string_view name) {
  const auto& index = name_index();
  const auto it = index.find(std::string(name));
  if (it == index.end()) return std::nullopt;
  return it->second;
}

ApiId api_by_name(std::string_view name) {
  if (auto id = find_api(name)) return *id;
  throw UnknownApi(std::string(name));
}

}  // namespace dapip
