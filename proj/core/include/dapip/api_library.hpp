#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "dapip/catalog.hpp"

namespace dapip {

/// Result of a partial string function: nullopt is Failure.
using ApiResult = std::optional<std::string>;

// ---------------------------------------------------------------------------
// Token classes

enum class TokenClass : std::uint8_t {
  Number,          // maximal digit run
  Alpha,           // maximal letter run
  Word,            // maximal alphanumeric run
  WSToken,         // maximal non-whitespace run
  CapsWord,        // all-uppercase letter run of length >= 2
  PropercaseWord,  // letter run of the form [A-Z][a-z]+
  Digit,
  Char,
};

/// Half-open code point offsets.
struct Span {
  std::size_t start = 0;
  std::size_t end = 0;
  std::size_t size() const { return end - start; }
  bool operator==(const Span&) const = default;
};

/// Every occurrence of `cls` in `s`, left to right, non-overlapping.
std::vector<Span> token_spans(TokenClass cls, std::u32string_view s);

/// k-th occurrence (1-based), counted from the end when `from_end` is set.
std::optional<Span> match_token(TokenClass cls, int k, bool from_end, std::string_view s);
std::optional<Span> match_token(TokenClass cls, int k, bool from_end, std::u32string_view s);

// ---------------------------------------------------------------------------
// Dictionaries

/// A finite set of strings matched inside inputs on whitespace-token
/// boundaries. Entries keep file order.
class LookupTable {
 public:
  LookupTable() = default;
  explicit LookupTable(std::vector<std::string> entries);

  std::span<const std::string> entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool contains(std::string_view s) const;
  /// Upper bound on the whitespace tokens of any entry.
  std::size_t max_tokens() const { return max_tokens_; }

 private:
  std::vector<std::string> entries_;
  std::unordered_map<std::string, std::size_t> index_;
  std::size_t max_tokens_ = 0;
};

/// A finite map D: S1 -> S2 with source matching identical to LookupTable.
class TransformTable {
 public:
  TransformTable() = default;
  explicit TransformTable(std::vector<std::pair<std::string, std::string>> rows);

  const LookupTable& sources() const { return sources_; }
  std::span<const std::pair<std::string, std::string>> rows() const { return rows_; }
  std::size_t size() const { return rows_.size(); }
  const std::string* find(std::string_view source) const;

 private:
  LookupTable sources_;
  std::vector<std::pair<std::string, std::string>> rows_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// All lookup and transform tables. Immutable after load.
class Dictionaries {
 public:
  /// Names of the tables every registry must provide.
  static std::span<const std::string_view> required_lookup_tables();
  static std::span<const std::string_view> required_transform_tables();

  /// Reads <dir>/lookup/<name>.txt and <dir>/transform/<name>.tsv. Throws
  /// DataFormatError (file:line) on malformed or duplicate rows and
  /// MissingTable when a required table is absent or empty.
  static std::shared_ptr<const Dictionaries> load(const std::filesystem::path& dir);
  /// Bundled tables under default_data_dir()/dictionaries, loaded once.
  static std::shared_ptr<const Dictionaries> defaults();

  const LookupTable& lookup(std::string_view name) const;
  const TransformTable& transform(std::string_view name) const;

 private:
  std::map<std::string, LookupTable, std::less<>> lookup_;
  std::map<std::string, TransformTable, std::less<>> transform_;
};

/// Leftmost, then longest, dictionary entry found in `s` on whitespace-token
/// boundaries. Punctuation clinging to the first or last token is ignored.
struct DictMatch {
  std::string entry;
  std::size_t byte_start = 0;
  std::size_t byte_end = 0;
};
std::optional<DictMatch> find_entry(const LookupTable& table, std::string_view s);

// ---------------------------------------------------------------------------
// Dates

struct CivilDate {
  int year = 1970;
  int month = 1;  // 1..12
  int day = 1;
  bool operator==(const CivilDate&) const = default;
};

/// First date in `s` written as YYYY-MM-DD, M/D/YYYY or "Month D, YYYY".
std::optional<CivilDate> find_date(std::string_view s,
                                   std::string* matched_text = nullptr);
bool valid_date(const CivilDate& d);
/// 0 = Sunday.
int day_of_week(const CivilDate& d);
std::string_view month_name(int month);
std::string_view weekday_name(int dow);
std::string ordinal(int n);

// ---------------------------------------------------------------------------
// Evaluation

/// Executable semantics for the 135 catalog APIs over a dictionary registry.
/// Every API is deterministic and returns Failure instead of an empty
/// string: an empty match is treated as no match.
class ApiLibrary {
 public:
  explicit ApiLibrary(std::shared_ptr<const Dictionaries> dicts);

  /// The library over the bundled dictionaries.
  static const ApiLibrary& defaults();

  /// Throws UnknownApi for an id outside the catalog.
  ApiResult eval(ApiId id, std::string_view s) const;

  const Dictionaries& dictionaries() const { return *dicts_; }

  /// Table consulted by a lookup or transform API (empty for regex APIs and
  /// for lookups with pattern semantics such as GetZipcode).
  std::string_view table_for(ApiId id) const;

 private:
  std::shared_ptr<const Dictionaries> dicts_;
};

/// Shorthand for ApiLibrary::defaults().eval.
ApiResult eval_api(ApiId id, std::string_view s);

}  // namespace dapip
