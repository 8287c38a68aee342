#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "dapip/api_library.hpp"
#include "dapip/config.hpp"
#include "dapip/errors.hpp"
#include "dapip/rng.hpp"
#include "dapip/text.hpp"

namespace dapip {
namespace {

ApiResult run(std::string_view api, std::string_view s) { return eval_api(api_by_name(api), s); }

TEST(Catalog, FamilyCounts) {
  EXPECT_EQ(list_apis().size(), 135u);
  EXPECT_EQ(list_apis(ApiFamily::Regex).size(), 104u);
  EXPECT_EQ(list_apis(ApiFamily::Lookup).size(), 18u);
  EXPECT_EQ(list_apis(ApiFamily::Transform).size(), 13u);
  EXPECT_EQ(api_spec(list_apis(ApiFamily::Lookup).front()).name, "GetStreetNum");
}

TEST(Regex, ReferenceVectors) {
  EXPECT_EQ(run("GetFirstChar", "John S. Henry"), "J");
  EXPECT_EQ(run("GetLastWord", "John S. Henry"), "Henry");
  EXPECT_EQ(run("GetFirstDashToSecondDash", "09:40-09:50"), "09:50");
  EXPECT_EQ(run("TrimLeadingZeros", "09:50"), "9:50");
  EXPECT_EQ(run("GetSecondToLastWS", "John Thain"), "John");
  EXPECT_EQ(run("GetFirstNumber", "no digits here"), std::nullopt);
}

TEST(Regex, Delimiters) {
  EXPECT_EQ(run("GetWordBetweenStartAndAt", "bob@x.org"), "bob");
  EXPECT_EQ(run("GetWordBetweenAtAndEnd", "bob@x.org"), "x.org");
  EXPECT_EQ(run("GetWordBetweenAtAndEnd", "bob"), std::nullopt);
  EXPECT_EQ(run("GetWordBetweenStartAndAt", "bob"), "bob");
  EXPECT_EQ(run("GetStartToLastSpace", "a b c"), "a b");
  EXPECT_EQ(run("GetLastSpaceToEnd", "a b c"), "c");
  EXPECT_EQ(run("GetWordBetweenFirstAndSecondComma", "a, b ,c"), "b");
  EXPECT_EQ(run("GetWordBetweenSecondAndThirdComma", "a,b, c"), "c");
  EXPECT_EQ(run("GetWordBetweenCommaSpaceAndEnd", "x,y, z"), "z");
  EXPECT_EQ(run("GetStartToSecondColon", "1:42:00 AM"), "1:42");
  EXPECT_EQ(run("GetStringBetweenLastColonToEnd", "1:42:00 AM"), "00 AM");
  EXPECT_EQ(run("GetStringBetweenLastFirstAndSecondQuote", "say \"hi\" now"), "hi");
  EXPECT_EQ(run("GetStartToParan", "abc (d)"), "abc ");
  EXPECT_EQ(run("GetStartToEndOfFirstNumber", "[CPT-00350"), "[CPT-00350");
  // Empty matches are failures.
  EXPECT_EQ(run("GetLastSpaceToEnd", "abc "), std::nullopt);
}

TEST(Regex, Prefixes) {
  EXPECT_EQ(run("GetFirstThreeChar", "ab"), std::nullopt);
  EXPECT_EQ(run("GetFirstThreeChar", "abcd"), "abc");
  EXPECT_EQ(run("GetFirstTwoDigit", "x 4096 7"), "40");
  EXPECT_EQ(run("GetFirstFiveDigit", "x 4096 77777"), std::nullopt);
  EXPECT_EQ(run("GetFirstChar", "\xc3\xa9t\xc3\xa9"), "\xc3\xa9");  // code points, not bytes
}

TEST(Regex, Rewrites) {
  EXPECT_EQ(run("TrimSpaces", "  a   b  "), "a b");
  EXPECT_EQ(run("ReplaceSpacesWithDashes", "a b c"), "a-b-c");
  EXPECT_EQ(run("ToPropercase", "hELLO wORLD-x"), "Hello World-X");
  EXPECT_EQ(run("ToUppercase", "[cpt-11523]"), "[CPT-11523]");
  EXPECT_EQ(run("TrimLeadingZeros", "000"), "0");
  EXPECT_EQ(run("TrimLeadingZeros", "0a"), "0a");
}

TEST(Regex, AllSpans) {
  EXPECT_EQ(run("GetAllNumbers", "a 12 b 3 c"), "12 b 3");
  EXPECT_EQ(run("GetAllLetters", "1 ab 2 c 3"), "ab 2 c");
  EXPECT_EQ(run("GetAllPropercaseWords", "x Foo bar Baz y"), "Foo bar Baz");
}

TEST(TokenClasses, Definitions) {
  auto spans = [](TokenClass c, std::string_view s) {
    std::vector<std::string> out;
    const auto u = text::decode_utf8(s);
    for (const Span& sp : token_spans(c, u)) out.push_back(text::encode_utf8(u.substr(sp.start, sp.size())));
    return out;
  };
  using V = std::vector<std::string>;
  EXPECT_EQ(spans(TokenClass::Number, "a1b22c"), (V{"1", "22"}));
  EXPECT_EQ(spans(TokenClass::Alpha, "ab1cd"), (V{"ab", "cd"}));
  EXPECT_EQ(spans(TokenClass::Word, "ab1 cd-e"), (V{"ab1", "cd", "e"}));
  EXPECT_EQ(spans(TokenClass::WSToken, " a,b  c "), (V{"a,b", "c"}));
  EXPECT_EQ(spans(TokenClass::CapsWord, "I met NASA and IBMers"), (V{"NASA"}));
  EXPECT_EQ(spans(TokenClass::PropercaseWord, "Ann McDo Bo x"), (V{"Ann", "Bo"}));
  EXPECT_EQ(spans(TokenClass::Digit, "a12"), (V{"1", "2"}));
}

TEST(TokenClasses, MatchToken) {
  EXPECT_EQ(match_token(TokenClass::Number, 1, false, std::string_view("1-452-789-4567")), (Span{0, 1}));
  EXPECT_EQ(match_token(TokenClass::Number, 1, true, std::string_view("a1b22c")), (Span{3, 5}));
  EXPECT_EQ(match_token(TokenClass::CapsWord, 1, false, std::string_view("lower case only")), std::nullopt);
}

// Brute-force oracle for maximal digit runs, compared on random strings.
TEST(TokenClasses, NumberRunsMatchBruteForce) {
  Rng rng(3);
  const std::string alphabet = "0123456789ab -";
  for (int trial = 0; trial < 500; ++trial) {
    std::string s;
    const int n = rng.uniform_int(0, 20);
    for (int i = 0; i < n; ++i) s += alphabet[rng.uniform_index(alphabet.size())];
    std::vector<Span> expect;
    for (std::size_t i = 0; i < s.size(); ++i) {
      const bool d = std::isdigit(static_cast<unsigned char>(s[i]));
      const bool prev = i > 0 && std::isdigit(static_cast<unsigned char>(s[i - 1]));
      if (d && !prev) {
        std::size_t j = i;
        while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
        expect.push_back({i, j});
      }
    }
    EXPECT_EQ(token_spans(TokenClass::Number, text::decode_utf8(s)), expect) << s;
  }
}

TEST(TokenClasses, ForwardAndBackwardOrdersAgree) {
  Rng rng(5);
  const std::string alphabet = "Ab cD 12,xY";
  for (int trial = 0; trial < 300; ++trial) {
    std::string s;
    for (int i = 0, n = rng.uniform_int(0, 24); i < n; ++i) s += alphabet[rng.uniform_index(alphabet.size())];
    for (TokenClass c : {TokenClass::Number, TokenClass::Alpha, TokenClass::Word, TokenClass::WSToken,
                         TokenClass::CapsWord, TokenClass::PropercaseWord}) {
      std::vector<Span> fwd, back;
      for (int k = 1;; ++k) {
        auto sp = match_token(c, k, false, std::string_view(s));
        if (!sp) break;
        fwd.push_back(*sp);
      }
      for (int k = 1;; ++k) {
        auto sp = match_token(c, k, true, std::string_view(s));
        if (!sp) break;
        back.push_back(*sp);
      }
      std::reverse(back.begin(), back.end());
      EXPECT_EQ(fwd, back);
    }
  }
}

TEST(Lookup, ReferenceVectors) {
  EXPECT_EQ(run("GetCityName", "Seattle, 98002"), "Seattle");
  EXPECT_EQ(run("GetStateFromCity", "Seattle"), "WA");
  EXPECT_EQ(run("GetCityName", "500 Mem Dr., Cambridge, 02139"), "Cambridge");
  EXPECT_EQ(run("GetCityName", "22 NE Street, Redmond, USA"), "Redmond");
  EXPECT_EQ(run("GetStateAbbrFromState", "$ can Sound St. mist Nevada"), "NV");
  EXPECT_EQ(run("GetStateName", "MA , North Carolina Zehr Gilma"), "North Carolina");
  EXPECT_EQ(run("GetCEO", "! AOL Inc. Rinaldo quicksand James Gorman"), "James Gorman");
  EXPECT_EQ(run("GetStreetName", "Hensley Bag St. HI Rinaldo Nolan @"), "Bag St.");
}

TEST(Lookup, PatternApis) {
  EXPECT_EQ(run("GetStreetNum", "500 Mem Dr., Cambridge"), "500");
  EXPECT_EQ(run("GetStreetName", "500 Mem Dr., Cambridge"), "Mem Dr.");
  EXPECT_EQ(run("GetAptNum", "12 Oak St. Apt 4B"), "4");
  EXPECT_EQ(run("GetAptNum", "Oak St. #17"), "17");
  EXPECT_EQ(run("GetZipcode", "Cambridge 021 02139"), "02139");
  EXPECT_EQ(run("GetYear", "in 1850 and 2016"), "2016");
  EXPECT_EQ(run("GetDate", "due March 3, 2016 ok"), "March 3, 2016");
  EXPECT_EQ(run("GetDate", "on 2/30/2016 or 2016-02-29"), "2016-02-29");
  EXPECT_EQ(run("GetWeekdayFromDate", "2016-02-29"), "Monday");
  EXPECT_EQ(run("GetOrdinalFromDate", "2016-02-22"), "22nd");
  EXPECT_EQ(run("GetMonthFromDate", "7/4/1976"), "July");
  EXPECT_EQ(run("GetYearFromDate", "July 4, 1976"), "1976");
  EXPECT_EQ(run("GetFirstName", "dear Michael,"), "Michael");
  EXPECT_EQ(run("GetFirstInitial", "dear Michael,"), "M.");
}

TEST(Dates, CivilCalendar) {
  EXPECT_EQ(day_of_week({1970, 1, 1}), 4);
  EXPECT_EQ(day_of_week({2000, 1, 1}), 6);
  EXPECT_EQ(day_of_week({2024, 12, 25}), 3);
  EXPECT_FALSE(valid_date({1900, 2, 29}));
  EXPECT_TRUE(valid_date({2000, 2, 29}));
  EXPECT_EQ(ordinal(1), "1st");
  EXPECT_EQ(ordinal(11), "11th");
  EXPECT_EQ(ordinal(13), "13th");
  EXPECT_EQ(ordinal(23), "23rd");
}

TEST(Dictionaries, BundledContents) {
  const auto d = Dictionaries::defaults();
  EXPECT_EQ(d->lookup("state").size(), 50u);
  EXPECT_EQ(d->lookup("state_abbr").size(), 50u);
  const auto& c2s = d->transform("city_to_state");
  for (auto [city, st] : {std::pair{"Cambridge", "MA"}, {"Redmond", "WA"}, {"Seattle", "WA"},
                          {"Kirkland", "WA"}}) {
    ASSERT_NE(c2s.find(city), nullptr) << city;
    EXPECT_EQ(*c2s.find(city), st);
  }
}

std::size_t count_nonempty_lines(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::size_t n = 0;
  std::string line;
  while (std::getline(in, line)) n += !line.empty();
  return n;
}

TEST(Dictionaries, EntryCountsEqualLineCounts) {
  const auto dir = default_data_dir() / "dictionaries";
  const auto d = Dictionaries::defaults();
  for (auto name : Dictionaries::required_lookup_tables()) {
    EXPECT_EQ(d->lookup(name).size(), count_nonempty_lines(dir / "lookup" / (std::string(name) + ".txt")));
  }
  for (auto name : Dictionaries::required_transform_tables()) {
    EXPECT_EQ(d->transform(name).size(),
              count_nonempty_lines(dir / "transform" / (std::string(name) + ".tsv")));
  }
}

class TempDataDir : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() /
           ("dapip_dict_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    std::filesystem::remove_all(dir_);
    std::filesystem::copy(default_data_dir() / "dictionaries", dir_, std::filesystem::copy_options::recursive);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }
  void write(const std::string& rel, const std::string& content) {
    std::ofstream(dir_ / rel, std::ios::trunc) << content;
  }
  std::filesystem::path dir_;
};

TEST_F(TempDataDir, EmptyCityFileIsMissingTable) {
  write("lookup/city.txt", "");
  EXPECT_THROW(Dictionaries::load(dir_), MissingTable);
}

TEST_F(TempDataDir, AbsentTableIsMissingTable) {
  std::filesystem::remove(dir_ / "transform" / "zip_to_city.tsv");
  EXPECT_THROW(Dictionaries::load(dir_), MissingTable);
}

TEST_F(TempDataDir, MalformedRowNamesFileAndLine) {
  write("transform/city_to_state.tsv", "Seattle\tWA\nBoston MA\n");
  try {
    Dictionaries::load(dir_);
    FAIL();
  } catch (const DataFormatError& e) {
    EXPECT_NE(std::string(e.what()).find("city_to_state.tsv:2"), std::string::npos) << e.what();
  }
}

TEST_F(TempDataDir, DuplicateEntryRejected) {
  write("lookup/state.txt", "Utah\nUtah\n");
  EXPECT_THROW(Dictionaries::load(dir_), DataFormatError);
}

TEST_F(TempDataDir, CustomTablesDriveEvaluation) {
  write("lookup/city.txt", "Gotham\n");
  const ApiLibrary lib(Dictionaries::load(dir_));
  EXPECT_EQ(lib.eval(api_by_name("GetCityName"), "to Gotham, now"), "Gotham");
  EXPECT_EQ(lib.eval(api_by_name("GetCityName"), "Seattle"), std::nullopt);
}

// Invariants over every API on a mixed random corpus.
class AllApis : public ::testing::Test {
 protected:
  static std::vector<std::string> corpus() {
    std::vector<std::string> out = {"John S. Henry", "500 Mem Dr., Cambridge, 02139", "  a  b ",
                                    "09:40-09:50", "[CPT-00350", "MA , North Carolina Zehr Gilma",
                                    "x@y.com", "Sundar Pichai of Google", "2016-02-29", "",
                                    "\xc3\xa9l\xc3\xa8ve 12"};
    Rng rng(9);
    const std::string alphabet = "aZ09 ,.-@:()\"#Ab";
    for (int i = 0; i < 200; ++i) {
      std::string s;
      for (int j = 0, n = rng.uniform_int(1, 24); j < n; ++j) s += alphabet[rng.uniform_index(alphabet.size())];
      out.push_back(s);
    }
    return out;
  }
};

bool is_rewrite(const std::string& name) {
  return name.starts_with("Trim") || name.starts_with("Replace") || name.starts_with("To");
}

TEST_F(AllApis, DeterminismSpansAndIdempotence) {
  const auto inputs = corpus();
  for (const ApiSpec& spec : api_catalog()) {
    for (const std::string& s : inputs) {
      const auto a = eval_api(spec.id, s);
      EXPECT_EQ(a, eval_api(spec.id, s));
      if (!a) continue;
      EXPECT_FALSE(a->empty()) << spec.name;
      if (spec.family == ApiFamily::Regex && !is_rewrite(spec.name)) {
        EXPECT_NE(s.find(*a), std::string::npos) << spec.name << " on '" << s << "'";
      }
      if (is_rewrite(spec.name)) {
        EXPECT_EQ(eval_api(spec.id, *a), a) << spec.name << " not idempotent on '" << s << "'";
        EXPECT_LE(text::code_point_count(*a), text::code_point_count(s));
      }
      if (spec.family == ApiFamily::Lookup) {
        EXPECT_NE(s.find(*a), std::string::npos) << spec.name;
      }
    }
  }
}

TEST_F(AllApis, LookupAndTransformSoundness) {
  const auto d = Dictionaries::defaults();
  const ApiLibrary& lib = ApiLibrary::defaults();
  std::vector<std::string> inputs = corpus();
  for (const auto* t : {"state", "city", "ceo", "company"}) {
    for (std::size_t i = 0; i < d->lookup(t).size(); i += 7) {
      inputs.push_back("x " + d->lookup(t).entries()[i] + ", y");
    }
  }
  for (ApiId id : list_apis(ApiFamily::Lookup)) {
    const auto table = lib.table_for(id);
    if (table.empty() || table == "street_suffix") continue;
    for (const std::string& s : inputs) {
      if (auto r = lib.eval(id, s)) EXPECT_TRUE(d->lookup(table).contains(*r)) << *r;
    }
  }
  for (ApiId id : list_apis(ApiFamily::Transform)) {
    const auto table = lib.table_for(id);
    if (table.empty() || table == "first_name" || table == "last_name") continue;
    const auto& tt = d->transform(table);
    for (const std::string& s : inputs) {
      const auto r = lib.eval(id, s);
      if (!r) continue;
      bool found = false;
      for (const auto& [src, dst] : tt.rows()) found |= dst == *r && s.find(src) != std::string::npos;
      EXPECT_TRUE(found) << api_spec(id).name << " on '" << s << "'";
    }
  }
}

}  // namespace
}  // namespace dapip
