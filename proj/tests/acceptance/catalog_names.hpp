#pragma once

// API names per family as listed in the published catalog, in table order.

#include <string>
#include <vector>

namespace dapip::acceptance {

inline const std::vector<std::string>& lookup_names() {
  static const std::vector<std::string> names{
    "GetStreetNum",
    "GetStreetName",
    "GetAptNum",
    "GetCityName",
    "GetStateName",
    "GetStateAbbr",
    "GetZipcode",
    "GetFirstName",
    "GetLastName",
    "GetTitle",
    "GetSuffix",
    "GetCompany",
    "GetCEO",
    "GetStockSymbol",
    "GetWeekday",
    "GetMonth",
    "GetYear",
    "GetDate",
  };
  return names;
}

inline const std::vector<std::string>& transform_names() {
  static const std::vector<std::string> names{
    "GetStateFromCity",
    "GetCityFromZipcode",
    "GetStateAbbrFromState",
    "GetStateFromStateAbbr",
    "GetFirstInitial",
    "GetLastInitial",
    "GetStockSymbolFromCEO",
    "GetCEOFromCompany",
    "GetCompanyFromStockSymbol",
    "GetOrdinalFromDate",
    "GetMonthFromDate",
    "GetWeekdayFromDate",
    "GetYearFromDate",
  };
  return names;
}

inline const std::vector<std::string>& regex_names() {
  static const std::vector<std::string> names{
    "GetFirstWord",
    "GetFourthToLastNumber",
    "GetSecondWord",
    "GetFifthToLastNumber",
    "GetThirdWord",
    "GetFirstAlpha",
    "GetFourthWord",
    "GetSecondAlpha",
    "GetFifthWord",
    "GetThirdAlpha",
    "GetLastWord",
    "GetFourthAlpha",
    "GetSecondToLastWord",
    "GetFifthAlpha",
    "GetThirdToLastWord",
    "GetLastAlpha",
    "GetFourthToLastWord",
    "GetSecondToLastAlpha",
    "GetFifthToLastWord",
    "GetThirdToLastAlpha",
    "GetFirstNumber",
    "GetFourthToLastAlpha",
    "GetSecondNumber",
    "GetFifthToLastAlpha",
    "GetThirdNumber",
    "GetFirstWS",
    "GetFourthNumber",
    "GetSecondWS",
    "GetFifthNumber",
    "GetThirdWS",
    "GetLastNumber",
    "GetFourthWS",
    "GetSecondToLastNumber",
    "GetFifthWS",
    "GetThirdToLastNumber",
    "GetLastWS",
    "GetSecondToLastWS",
    "GetFirstSpaceToEnd",
    "GetFirstTwoChar",
    "GetFifthToLastCapsWord",
    "GetThirdToLastWS",
    "GetStartToLastSpace",
    "GetFirstThreeChar",
    "GetFirstPropercaseWord",
    "GetFourthToLastWS",
    "GetLastSpaceToEnd",
    "GetFirstFourChar",
    "GetSecondPropercaseWord",
    "GetFifthToLastWS",
    "GetStartToDash",
    "GetFirstFiveChar",
    "GetThirdPropercaseWord",
    "TrimSpaces",
    "GetFirstDashToSecondDash",
    "GetFirstDigit",
    "GetFourthPropercaseWord",
    "TrimLeadingZeros",
    "GetLastDashToEnd",
    "GetFirstTwoDigit",
    "GetFifthPropercaseWord",
    "GetIdentity",
    "GetStartToFirstComma",
    "GetFirstThreeDigit",
    "GetAllPropercaseWords",
    "ReplaceSpacesWithDashes",
    "GetWordBetweenFirstAndSecondComma",
    "GetFirstFourDigit",
    "GetLastPropercaseWord",
    "ReplaceSpacesWithCommas",
    "GetWordBetweenSecondAndThirdComma",
    "GetFirstFiveDigit",
    "GetSecondToLastPropercaseWord",
    "ReplaceSpacesWithUnderscores",
    "GetLastCommaToEnd",
    "GetFirstCapsWord",
    "GetThirdToLastPropercaseWord",
    "ToLowercase",
    "GetWordBetweenCommaSpaceAndEnd",
    "GetSecondCapsWord",
    "GetFourthToLastPropercaseWord",
    "ToUppercase",
    "GetStartToParan",
    "GetThirdCapsWord",
    "GetFifthToLastPropercaseWord",
    "ToPropercase",
    "GetStartToFirstColon",
    "GetFourthCapsWord",
    "GetAllLetters",
    "GetWordBetweenStartAndAt",
    "GetStartToSecondColon",
    "GetFifthCapsWord",
    "GetAllNumbers",
    "GetWordBetweenAtAndEnd",
    "GetStringBetweenLastColonToEnd",
    "GetLastCapsWord",
    "GetWordBetweenStartAndDot",
    "GetStringBetweenLastFirstAndSecondQuote",
    "GetSecondToLastCapsWord",
    "GetWordBetweenDotAndEnd",
    "GetStartToEndOfFirstNumber",
    "GetThirdToLastCapsWord",
    "GetStartToFirstSpace",
    "GetFirstChar",
    "GetFourthToLastCapsWord",
  };
  return names;
}

}  // namespace dapip::acceptance
