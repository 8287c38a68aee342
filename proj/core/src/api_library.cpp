#include "dapip/api_library.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <functional>
#include <mutex>

#include "dapip/config.hpp"
#include "dapip/errors.hpp"
#include "dapip/text.hpp"

namespace dapip {

using text::is_alnum;
using text::is_alpha;
using text::is_digit;
using text::is_lower;
using text::is_space;
using text::is_upper;

// ---------------------------------------------------------------------------
// Token classes

namespace {

template <class Pred>
void runs(std::u32string_view s, Pred pred, std::vector<Span>& out) {
  std::size_t i = 0;
  while (i < s.size()) {
    if (!pred(s[i])) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    while (i < s.size() && pred(s[i])) ++i;
    out.push_back({start, i});
  }
}

bool is_caps(std::u32string_view w) {
  return w.size() >= 2 && std::all_of(w.begin(), w.end(), [](char32_t c) { return is_upper(c); });
}

bool is_propercase(std::u32string_view w) {
  return w.size() >= 2 && is_upper(w[0]) &&
         std::all_of(w.begin() + 1, w.end(), [](char32_t c) { return is_lower(c); });
}

}  // namespace

std::vector<Span> token_spans(TokenClass cls, std::u32string_view s) {
  std::vector<Span> out;
  switch (cls) {
    case TokenClass::Number:
      runs(s, [](char32_t c) { return is_digit(c); }, out);
      break;
    case TokenClass::Alpha:
      runs(s, [](char32_t c) { return is_alpha(c); }, out);
      break;
    case TokenClass::Word:
      runs(s, [](char32_t c) { return is_alnum(c); }, out);
      break;
    case TokenClass::WSToken:
      runs(s, [](char32_t c) { return !is_space(c); }, out);
      break;
    case TokenClass::CapsWord:
    case TokenClass::PropercaseWord: {
      std::vector<Span> alpha;
      runs(s, [](char32_t c) { return is_alpha(c); }, alpha);
      for (const Span& sp : alpha) {
        const auto w = s.substr(sp.start, sp.size());
        if (cls == TokenClass::CapsWord ? is_caps(w) : is_propercase(w)) out.push_back(sp);
      }
      break;
    }
    case TokenClass::Digit:
      for (std::size_t i = 0; i < s.size(); ++i) {
        if (is_digit(s[i])) out.push_back({i, i + 1});
      }
      break;
    case TokenClass::Char:
      for (std::size_t i = 0; i < s.size(); ++i) out.push_back({i, i + 1});
      break;
  }
  return out;
}

std::optional<Span> match_token(TokenClass cls, int k, bool from_end, std::u32string_view s) {
  if (k < 1) return std::nullopt;
  const auto spans = token_spans(cls, s);
  const auto n = static_cast<std::size_t>(k);
  if (n > spans.size()) return std::nullopt;
  return from_end ? spans[spans.size() - n] : spans[n - 1];
}

std::optional<Span> match_token(TokenClass cls, int k, bool from_end, std::string_view s) {
  return match_token(cls, k, from_end, std::u32string_view(text::decode_utf8(s)));
}

// ---------------------------------------------------------------------------
// Tables

namespace {

std::size_t count_ws_tokens(std::string_view s) {
  std::size_t n = 0;
  bool in = false;
  for (char c : s) {
    const bool sp = is_space(static_cast<unsigned char>(c));
    if (!sp && !in) ++n;
    in = !sp;
  }
  return n;
}

}  // namespace

LookupTable::LookupTable(std::vector<std::string> entries) : entries_(std::move(entries)) {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    index_.emplace(entries_[i], i);
    max_tokens_ = std::max(max_tokens_, count_ws_tokens(entries_[i]));
  }
}

bool LookupTable::contains(std::string_view s) const {
  return index_.find(std::string(s)) != index_.end();
}

TransformTable::TransformTable(std::vector<std::pair<std::string, std::string>> rows)
    : rows_(std::move(rows)) {
  std::vector<std::string> sources;
  sources.reserve(rows_.size());
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    sources.push_back(rows_[i].first);
    index_.emplace(rows_[i].first, i);
  }
  sources_ = LookupTable(std::move(sources));
}

const std::string* TransformTable::find(std::string_view source) const {
  const auto it = index_.find(std::string(source));
  return it == index_.end() ? nullptr : &rows_[it->second].second;
}

namespace {

constexpr std::array<std::string_view, 13> kLookupTables = {
    "city",    "state", "state_abbr",   "first_name", "last_name",
    "title",   "suffix", "company",     "ceo",        "stock_symbol",
    "weekday", "month", "street_suffix"};

constexpr std::array<std::string_view, 7> kTransformTables = {
    "city_to_state", "zip_to_city",   "state_to_abbr",    "abbr_to_state",
    "ceo_to_symbol", "company_to_ceo", "symbol_to_company"};

bool bad_field(std::string_view f) {
  return f.empty() || is_space(static_cast<unsigned char>(f.front())) ||
         is_space(static_cast<unsigned char>(f.back()));
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) return {};
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

LookupTable load_lookup(const std::filesystem::path& path, std::string_view name) {
  const auto lines = read_lines(path);
  std::vector<std::string> entries;
  std::unordered_map<std::string, std::size_t> seen;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string& l = lines[i];
    if (l.empty()) continue;
    if (bad_field(l) || l.find('\t') != std::string::npos) {
      throw DataFormatError(path.string(), i + 1, "malformed entry");
    }
    if (!seen.emplace(l, i + 1).second) {
      throw DataFormatError(path.string(), i + 1, "duplicate entry '" + l + "'");
    }
    entries.push_back(l);
  }
  if (entries.empty()) throw MissingTable(std::string(name));
  return LookupTable(std::move(entries));
}

TransformTable load_transform(const std::filesystem::path& path, std::string_view name) {
  const auto lines = read_lines(path);
  std::vector<std::pair<std::string, std::string>> rows;
  std::unordered_map<std::string, std::size_t> seen;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string& l = lines[i];
    if (l.empty()) continue;
    const auto fields = text::split(l, '\t');
    if (fields.size() != 2 || bad_field(fields[0]) || bad_field(fields[1])) {
      throw DataFormatError(path.string(), i + 1, "expected source<TAB>target");
    }
    std::string src(fields[0]);
    if (!seen.emplace(src, i + 1).second) {
      throw DataFormatError(path.string(), i + 1, "duplicate source '" + src + "'");
    }
    rows.emplace_back(std::move(src), std::string(fields[1]));
  }
  if (rows.empty()) throw MissingTable(std::string(name));
  return TransformTable(std::move(rows));
}

}  // namespace

std::span<const std::string_view> Dictionaries::required_lookup_tables() {
  return kLookupTables;
}

std::span<const std::string_view> Dictionaries::required_transform_tables() {
  return kTransformTables;
}

std::shared_ptr<const Dictionaries> Dictionaries::load(const std::filesystem::path& dir) {
  auto d = std::make_shared<Dictionaries>();
  for (std::string_view name : kLookupTables) {
    const auto path = dir / "lookup" / (std::string(name) + ".txt");
    if (!std::filesystem::exists(path)) throw MissingTable(std::string(name));
    d->lookup_.emplace(std::string(name), load_lookup(path, name));
  }
  for (std::string_view name : kTransformTables) {
    const auto path = dir / "transform" / (std::string(name) + ".tsv");
    if (!std::filesystem::exists(path)) throw MissingTable(std::string(name));
    d->transform_.emplace(std::string(name), load_transform(path, name));
  }
  return d;
}

std::shared_ptr<const Dictionaries> Dictionaries::defaults() {
  static const std::shared_ptr<const Dictionaries> d =
      load(default_data_dir() / "dictionaries");
  return d;
}

const LookupTable& Dictionaries::lookup(std::string_view name) const {
  const auto it = lookup_.find(name);
  if (it == lookup_.end()) throw MissingTable(std::string(name));
  return it->second;
}

const TransformTable& Dictionaries::transform(std::string_view name) const {
  const auto it = transform_.find(name);
  if (it == transform_.end()) throw MissingTable(std::string(name));
  return it->second;
}

// ---------------------------------------------------------------------------
// Dictionary matching

namespace {

struct ByteSpan {
  std::size_t start;
  std::size_t end;
};

bool ascii_space(char c) { return is_space(static_cast<unsigned char>(c)); }
bool ascii_alnum(char c) { return is_alnum(static_cast<unsigned char>(c)); }

std::vector<ByteSpan> ws_tokens(std::string_view s) {
  std::vector<ByteSpan> out;
  std::size_t i = 0;
  while (i < s.size()) {
    if (ascii_space(s[i])) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    while (i < s.size() && !ascii_space(s[i])) ++i;
    out.push_back({start, i});
  }
  return out;
}

// Punctuation is any byte that is neither alphanumeric nor part of a
// multibyte sequence.
bool punct(char c) { return !ascii_alnum(c) && static_cast<unsigned char>(c) < 0x80; }

}  // namespace

std::optional<DictMatch> find_entry(const LookupTable& table, std::string_view s) {
  if (table.size() == 0) return std::nullopt;
  const auto toks = ws_tokens(s);
  std::string buf;
  for (std::size_t i = 0; i < toks.size(); ++i) {
    const std::size_t max_n = std::min(table.max_tokens(), toks.size() - i);
    for (std::size_t n = max_n; n >= 1; --n) {
      const std::size_t raw_start = toks[i].start;
      const std::size_t raw_end = toks[i + n - 1].end;
      std::size_t stripped_start = raw_start;
      while (stripped_start < raw_end && punct(s[stripped_start])) ++stripped_start;
      const std::array<std::size_t, 2> starts = {raw_start, stripped_start};
      for (std::size_t si = 0; si < starts.size(); ++si) {
        const std::size_t b = starts[si];
        if (si == 1 && b == raw_start) break;
        // Shrink the end over trailing punctuation one byte at a time.
        for (std::size_t e = raw_end; e > b; --e) {
          if (e != raw_end && !punct(s[e])) break;
          buf.assign(s.substr(b, e - b));
          if (table.contains(buf)) return DictMatch{buf, b, e};
        }
      }
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Dates

namespace {

constexpr std::array<std::string_view, 12> kMonths = {
    "January", "February", "March",     "April",   "May",      "June",
    "July",    "August",   "September", "October", "November", "December"};
constexpr std::array<std::string_view, 7> kWeekdays = {
    "Sunday", "Monday", "Tuesday", "Wednesday", "Thursday", "Friday", "Saturday"};

int days_in_month(int y, int m) {
  static constexpr std::array<int, 12> kDays = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  const bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
  return m == 2 && leap ? 29 : kDays[static_cast<std::size_t>(m - 1)];
}

int to_int(std::string_view digits) {
  int v = 0;
  for (char c : digits) v = v * 10 + (c - '0');
  return v;
}

}  // namespace

bool valid_date(const CivilDate& d) {
  return d.year >= 1 && d.year <= 9999 && d.month >= 1 && d.month <= 12 && d.day >= 1 &&
         d.day <= days_in_month(d.year, d.month);
}

int day_of_week(const CivilDate& d) {
  // Sakamoto's method.
  static constexpr std::array<int, 12> t = {0, 3, 2, 5, 0, 3, 5, 1, 4, 6, 2, 4};
  int y = d.year;
  if (d.month < 3) y -= 1;
  return (y + y / 4 - y / 100 + y / 400 + t[static_cast<std::size_t>(d.month - 1)] + d.day) % 7;
}

std::string_view month_name(int month) { return kMonths.at(static_cast<std::size_t>(month - 1)); }
std::string_view weekday_name(int dow) { return kWeekdays.at(static_cast<std::size_t>(dow)); }

std::string ordinal(int n) {
  const int mod100 = n % 100;
  const char* suffix = "th";
  if (mod100 < 11 || mod100 > 13) {
    switch (n % 10) {
      case 1: suffix = "st"; break;
      case 2: suffix = "nd"; break;
      case 3: suffix = "rd"; break;
      default: break;
    }
  }
  return std::to_string(n) + suffix;
}

std::optional<CivilDate> find_date(std::string_view s, std::string* matched_text) {
  std::vector<ByteSpan> nums;
  for (std::size_t i = 0; i < s.size();) {
    if (!is_digit(static_cast<unsigned char>(s[i]))) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    while (i < s.size() && is_digit(static_cast<unsigned char>(s[i]))) ++i;
    nums.push_back({start, i});
  }
  auto len = [&](std::size_t r) { return nums[r].end - nums[r].start; };
  auto val = [&](std::size_t r) { return to_int(s.substr(nums[r].start, len(r))); };
  // Run r+1 follows run r after exactly the separator `sep`.
  auto joined = [&](std::size_t r, std::string_view sep) {
    return r + 1 < nums.size() && nums[r].end + sep.size() == nums[r + 1].start &&
           s.substr(nums[r].end, sep.size()) == sep;
  };
  auto small = [&](std::size_t r) { return len(r) == 1 || len(r) == 2; };

  for (std::size_t r = 0; r < nums.size(); ++r) {
    std::optional<CivilDate> d;
    std::size_t begin = nums[r].start;
    std::size_t finish = 0;
    if (len(r) == 4 && joined(r, "-") && small(r + 1) && joined(r + 1, "-") && small(r + 2)) {
      d = CivilDate{val(r), val(r + 1), val(r + 2)};
      finish = nums[r + 2].end;
    } else if (small(r) && joined(r, "/") && small(r + 1) && joined(r + 1, "/") &&
               len(r + 2) == 4) {
      d = CivilDate{val(r + 2), val(r), val(r + 1)};
      finish = nums[r + 2].end;
    } else if (small(r) && joined(r, ", ") && len(r + 1) == 4 && nums[r].start >= 2 &&
               s[nums[r].start - 1] == ' ') {
      const std::string_view before = s.substr(0, nums[r].start - 1);
      for (std::size_t m = 0; m < kMonths.size(); ++m) {
        const auto& name = kMonths[m];
        if (before.size() >= name.size() &&
            before.substr(before.size() - name.size()) == name &&
            (before.size() == name.size() ||
             !is_alpha(static_cast<unsigned char>(before[before.size() - name.size() - 1])))) {
          d = CivilDate{val(r + 1), static_cast<int>(m) + 1, val(r)};
          begin = before.size() - name.size();
          finish = nums[r + 1].end;
          break;
        }
      }
    }
    if (d && valid_date(*d)) {
      if (matched_text) *matched_text = std::string(s.substr(begin, finish - begin));
      return d;
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// API semantics

namespace {

using Fn = std::function<ApiResult(const Dictionaries&, std::string_view)>;

ApiResult non_empty(std::string s) {
  if (s.empty()) return std::nullopt;
  return s;
}

std::string sub(std::u32string_view s, std::size_t b, std::size_t e) {
  return text::encode_utf8(s.substr(b, e - b));
}

constexpr auto npos = std::u32string_view::npos;

std::size_t nth(std::u32string_view s, char32_t c, int n) {
  std::size_t pos = npos;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == c && --n == 0) return i;
  }
  return pos;
}

// Prefix up to the n-th occurrence of c (whole string if absent).
Fn start_to(char32_t c, int n = 1) {
  return [c, n](const Dictionaries&, std::string_view in) {
    const auto s = text::decode_utf8(in);
    const std::size_t p = nth(s, c, n);
    return non_empty(sub(s, 0, p == npos ? s.size() : p));
  };
}

Fn start_to_last(char32_t c) {
  return [c](const Dictionaries&, std::string_view in) {
    const auto s = text::decode_utf8(in);
    const std::size_t p = std::u32string_view(s).rfind(c);
    return non_empty(sub(s, 0, p == npos ? s.size() : p));
  };
}

Fn after_first(char32_t c) {
  return [c](const Dictionaries&, std::string_view in) -> ApiResult {
    const auto s = text::decode_utf8(in);
    const std::size_t p = std::u32string_view(s).find(c);
    if (p == npos) return std::nullopt;
    return non_empty(sub(s, p + 1, s.size()));
  };
}

Fn after_last(char32_t c) {
  return [c](const Dictionaries&, std::string_view in) -> ApiResult {
    const auto s = text::decode_utf8(in);
    const std::size_t p = std::u32string_view(s).rfind(c);
    if (p == npos) return std::nullopt;
    return non_empty(sub(s, p + 1, s.size()));
  };
}

// Between the i-th and j-th occurrence of c; the closing one may be absent.
Fn between(char32_t c, int i, int j, bool trim) {
  return [=](const Dictionaries&, std::string_view in) -> ApiResult {
    const auto s = text::decode_utf8(in);
    const std::size_t open = nth(s, c, i);
    if (open == npos) return std::nullopt;
    const std::size_t close = nth(s, c, j);
    std::size_t b = open + 1;
    std::size_t e = close == npos ? s.size() : close;
    if (trim) {
      while (b < e && is_space(s[b])) ++b;
      while (e > b && is_space(s[e - 1])) --e;
    }
    return non_empty(sub(s, b, e));
  };
}

Fn positional(TokenClass cls, int k, bool from_end) {
  return [=](const Dictionaries&, std::string_view in) -> ApiResult {
    const auto s = text::decode_utf8(in);
    const auto sp = match_token(cls, k, from_end, std::u32string_view(s));
    if (!sp) return std::nullopt;
    return non_empty(sub(s, sp->start, sp->end));
  };
}

Fn first_to_last(TokenClass cls) {
  return [=](const Dictionaries&, std::string_view in) -> ApiResult {
    const auto s = text::decode_utf8(in);
    const auto spans = token_spans(cls, s);
    if (spans.empty()) return std::nullopt;
    return non_empty(sub(s, spans.front().start, spans.back().end));
  };
}

Fn first_chars(std::size_t k) {
  return [k](const Dictionaries&, std::string_view in) -> ApiResult {
    const auto s = text::decode_utf8(in);
    if (s.size() < k) return std::nullopt;
    return sub(s, 0, k);
  };
}

Fn first_digits(std::size_t k) {
  return [k](const Dictionaries&, std::string_view in) -> ApiResult {
    const auto s = text::decode_utf8(in);
    const auto sp = match_token(TokenClass::Number, 1, false, std::u32string_view(s));
    if (!sp || sp->size() < k) return std::nullopt;
    return sub(s, sp->start, sp->start + k);
  };
}

template <class Map>
Fn rewrite(Map map) {
  return [map](const Dictionaries&, std::string_view in) -> ApiResult {
    auto s = text::decode_utf8(in);
    map(s);
    return non_empty(text::encode_utf8(s));
  };
}

Fn lookup(std::string_view table) {
  return [table](const Dictionaries& d, std::string_view in) -> ApiResult {
    const auto m = find_entry(d.lookup(table), in);
    if (!m) return std::nullopt;
    return m->entry;
  };
}

Fn transform(std::string_view table) {
  return [table](const Dictionaries& d, std::string_view in) -> ApiResult {
    const TransformTable& t = d.transform(table);
    const auto m = find_entry(t.sources(), in);
    if (!m) return std::nullopt;
    return *t.find(m->entry);
  };
}

Fn initial(std::string_view table) {
  return [table](const Dictionaries& d, std::string_view in) -> ApiResult {
    const auto m = find_entry(d.lookup(table), in);
    if (!m) return std::nullopt;
    const auto u = text::decode_utf8(m->entry);
    return text::encode_utf8(u.substr(0, 1)) + ".";
  };
}

template <class Render>
Fn from_date(Render render) {
  return [render](const Dictionaries&, std::string_view in) -> ApiResult {
    const auto d = find_date(in);
    if (!d) return std::nullopt;
    return render(*d);
  };
}

bool all_digits(std::string_view t) {
  return !t.empty() &&
         std::all_of(t.begin(), t.end(), [](char c) { return is_digit(static_cast<unsigned char>(c)); });
}

bool propercase_token(std::string_view t) {
  return t.size() >= 2 && is_upper(static_cast<unsigned char>(t[0])) &&
         std::all_of(t.begin() + 1, t.end(),
                     [](char c) { return is_lower(static_cast<unsigned char>(c)); });
}

// End offset of the street suffix starting at token i+1 of a street name
// whose word is token i, or npos.
std::size_t street_at(const Dictionaries& d, std::string_view s, const std::vector<ByteSpan>& toks,
                      std::size_t i) {
  if (i + 1 >= toks.size()) return std::string_view::npos;
  if (!propercase_token(s.substr(toks[i].start, toks[i].end - toks[i].start))) {
    return std::string_view::npos;
  }
  std::size_t e = toks[i + 1].end;
  const std::size_t b = toks[i + 1].start;
  const LookupTable& suffixes = d.lookup("street_suffix");
  while (e > b) {
    if (suffixes.contains(s.substr(b, e - b))) return e;
    if (s[e - 1] != ',' && s[e - 1] != ';') break;
    --e;
  }
  return std::string_view::npos;
}

ApiResult street_name(const Dictionaries& d, std::string_view s) {
  const auto toks = ws_tokens(s);
  for (std::size_t i = 0; i < toks.size(); ++i) {
    const std::size_t e = street_at(d, s, toks, i);
    if (e != std::string_view::npos) return std::string(s.substr(toks[i].start, e - toks[i].start));
  }
  return std::nullopt;
}

ApiResult street_num(const Dictionaries& d, std::string_view s) {
  const auto toks = ws_tokens(s);
  for (std::size_t i = 0; i + 1 < toks.size(); ++i) {
    const auto t = s.substr(toks[i].start, toks[i].end - toks[i].start);
    if (all_digits(t) && street_at(d, s, toks, i + 1) != std::string_view::npos) {
      return std::string(t);
    }
  }
  return std::nullopt;
}

std::string leading_digits(std::string_view t) {
  std::size_t n = 0;
  while (n < t.size() && is_digit(static_cast<unsigned char>(t[n]))) ++n;
  return std::string(t.substr(0, n));
}

ApiResult apt_num(const Dictionaries&, std::string_view s) {
  static constexpr std::array<std::string_view, 5> kMarkers = {"Apt", "Apt.", "Unit", "Suite", "#"};
  const auto toks = ws_tokens(s);
  for (std::size_t i = 0; i < toks.size(); ++i) {
    const auto t = s.substr(toks[i].start, toks[i].end - toks[i].start);
    if (std::find(kMarkers.begin(), kMarkers.end(), t) != kMarkers.end()) {
      if (i + 1 < toks.size()) {
        auto n = leading_digits(s.substr(toks[i + 1].start, toks[i + 1].end - toks[i + 1].start));
        if (!n.empty()) return n;
      }
    } else if (t.size() > 1 && t[0] == '#') {
      auto n = leading_digits(t.substr(1));
      if (!n.empty()) return n;
    }
  }
  return std::nullopt;
}

template <class Pred>
Fn number_where(Pred pred) {
  return [pred](const Dictionaries&, std::string_view in) -> ApiResult {
    const auto s = text::decode_utf8(in);
    for (const Span& sp : token_spans(TokenClass::Number, s)) {
      auto t = sub(s, sp.start, sp.end);
      if (pred(t)) return t;
    }
    return std::nullopt;
  };
}

void trim_spaces(std::u32string& s) {
  std::u32string out;
  bool pending = false;
  for (char32_t c : s) {
    if (is_space(c)) {
      pending = !out.empty();
      continue;
    }
    if (pending) out.push_back(U' ');
    pending = false;
    out.push_back(c);
  }
  s = std::move(out);
}

void to_propercase(std::u32string& s) {
  bool start = true;
  for (char32_t& c : s) {
    if (is_alpha(c)) {
      c = start ? text::to_upper(c) : text::to_lower(c);
      start = false;
    } else {
      start = true;
    }
  }
}

struct NamedTokenClass {
  std::string_view suffix;
  TokenClass cls;
};

struct Ordinal {
  std::string_view word;
  int k;
  bool from_end;
};

std::optional<Fn> positional_from_name(std::string_view name) {
  static constexpr std::array<NamedTokenClass, 6> kClasses = {{
      {"PropercaseWord", TokenClass::PropercaseWord},
      {"CapsWord", TokenClass::CapsWord},
      {"Number", TokenClass::Number},
      {"Alpha", TokenClass::Alpha},
      {"Word", TokenClass::Word},
      {"WS", TokenClass::WSToken},
  }};
  static constexpr std::array<Ordinal, 10> kOrdinals = {{
      {"SecondToLast", 2, true}, {"ThirdToLast", 3, true}, {"FourthToLast", 4, true},
      {"FifthToLast", 5, true},  {"First", 1, false},       {"Second", 2, false},
      {"Third", 3, false},       {"Fourth", 4, false},      {"Fifth", 5, false},
      {"Last", 1, true},
  }};
  if (!name.starts_with("Get")) return std::nullopt;
  name.remove_prefix(3);
  for (const Ordinal& o : kOrdinals) {
    if (!name.starts_with(o.word)) continue;
    const auto rest = name.substr(o.word.size());
    for (const NamedTokenClass& c : kClasses) {
      if (rest == c.suffix) return positional(c.cls, o.k, o.from_end);
    }
  }
  return std::nullopt;
}

struct Named {
  std::string_view name;
  Fn fn;
  std::string_view table;
};

std::vector<Named> named_functions() {
  auto date_text = [](const Dictionaries&, std::string_view in) -> ApiResult {
    std::string text;
    if (!find_date(in, &text)) return std::nullopt;
    return text;
  };
  return {
      // Lookup
      {"GetStreetNum", street_num, ""},
      {"GetStreetName", street_name, "street_suffix"},
      {"GetAptNum", apt_num, ""},
      {"GetCityName", lookup("city"), "city"},
      {"GetStateName", lookup("state"), "state"},
      {"GetStateAbbr", lookup("state_abbr"), "state_abbr"},
      {"GetZipcode", number_where([](const std::string& t) { return t.size() == 5; }), ""},
      {"GetFirstName", lookup("first_name"), "first_name"},
      {"GetLastName", lookup("last_name"), "last_name"},
      {"GetTitle", lookup("title"), "title"},
      {"GetSuffix", lookup("suffix"), "suffix"},
      {"GetCompany", lookup("company"), "company"},
      {"GetCEO", lookup("ceo"), "ceo"},
      {"GetStockSymbol", lookup("stock_symbol"), "stock_symbol"},
      {"GetWeekday", lookup("weekday"), "weekday"},
      {"GetMonth", lookup("month"), "month"},
      {"GetYear",
       number_where([](const std::string& t) {
         return t.size() == 4 && to_int(t) >= 1900 && to_int(t) <= 2099;
       }),
       ""},
      {"GetDate", date_text, ""},
      // Transform
      {"GetStateFromCity", transform("city_to_state"), "city_to_state"},
      {"GetCityFromZipcode", transform("zip_to_city"), "zip_to_city"},
      {"GetStateAbbrFromState", transform("state_to_abbr"), "state_to_abbr"},
      {"GetStateFromStateAbbr", transform("abbr_to_state"), "abbr_to_state"},
      {"GetFirstInitial", initial("first_name"), "first_name"},
      {"GetLastInitial", initial("last_name"), "last_name"},
      {"GetStockSymbolFromCEO", transform("ceo_to_symbol"), "ceo_to_symbol"},
      {"GetCEOFromCompany", transform("company_to_ceo"), "company_to_ceo"},
      {"GetCompanyFromStockSymbol", transform("symbol_to_company"), "symbol_to_company"},
      {"GetOrdinalFromDate", from_date([](const CivilDate& d) { return ordinal(d.day); }), ""},
      {"GetMonthFromDate",
       from_date([](const CivilDate& d) { return std::string(month_name(d.month)); }), ""},
      {"GetWeekdayFromDate",
       from_date([](const CivilDate& d) { return std::string(weekday_name(day_of_week(d))); }),
       ""},
      {"GetYearFromDate", from_date([](const CivilDate& d) { return std::to_string(d.year); }), ""},
      // Regex: rewriting
      {"TrimSpaces", rewrite(trim_spaces), ""},
      {"TrimLeadingZeros",
       rewrite([](std::u32string& s) {
         std::size_t n = 0;
         while (n + 1 < s.size() && s[n] == U'0' && is_digit(s[n + 1])) ++n;
         s.erase(0, n);
       }),
       ""},
      {"GetIdentity", rewrite([](std::u32string&) {}), ""},
      {"ReplaceSpacesWithDashes", rewrite([](std::u32string& s) { std::replace(s.begin(), s.end(), U' ', U'-'); }), ""},
      {"ReplaceSpacesWithCommas", rewrite([](std::u32string& s) { std::replace(s.begin(), s.end(), U' ', U','); }), ""},
      {"ReplaceSpacesWithUnderscores", rewrite([](std::u32string& s) { std::replace(s.begin(), s.end(), U' ', U'_'); }), ""},
      {"ToLowercase", rewrite([](std::u32string& s) { for (auto& c : s) c = text::to_lower(c); }), ""},
      {"ToUppercase", rewrite([](std::u32string& s) { for (auto& c : s) c = text::to_upper(c); }), ""},
      {"ToPropercase", rewrite(to_propercase), ""},
      // Regex: delimiters
      {"GetWordBetweenStartAndAt", start_to(U'@'), ""},
      {"GetWordBetweenAtAndEnd", after_first(U'@'), ""},
      {"GetWordBetweenStartAndDot", start_to(U'.'), ""},
      {"GetWordBetweenDotAndEnd", after_first(U'.'), ""},
      {"GetStartToFirstSpace", start_to(U' '), ""},
      {"GetFirstSpaceToEnd", after_first(U' '), ""},
      {"GetStartToLastSpace", start_to_last(U' '), ""},
      {"GetLastSpaceToEnd", after_last(U' '), ""},
      {"GetStartToDash", start_to(U'-'), ""},
      {"GetFirstDashToSecondDash", between(U'-', 1, 2, false), ""},
      {"GetLastDashToEnd", after_last(U'-'), ""},
      {"GetStartToFirstComma", start_to(U','), ""},
      {"GetWordBetweenFirstAndSecondComma", between(U',', 1, 2, true), ""},
      {"GetWordBetweenSecondAndThirdComma", between(U',', 2, 3, true), ""},
      {"GetLastCommaToEnd", after_last(U','), ""},
      {"GetWordBetweenCommaSpaceAndEnd",
       [](const Dictionaries&, std::string_view in) -> ApiResult {
         const auto p = in.find(", ");
         if (p == std::string_view::npos) return std::nullopt;
         return non_empty(std::string(in.substr(p + 2)));
       },
       ""},
      {"GetStartToParan", start_to(U'('), ""},
      {"GetStartToFirstColon", start_to(U':'), ""},
      {"GetStartToSecondColon", start_to(U':', 2), ""},
      {"GetStringBetweenLastColonToEnd", after_last(U':'), ""},
      {"GetStringBetweenLastFirstAndSecondQuote", between(U'"', 1, 2, false), ""},
      {"GetStartToEndOfFirstNumber",
       [](const Dictionaries&, std::string_view in) -> ApiResult {
         const auto s = text::decode_utf8(in);
         const auto sp = match_token(TokenClass::Number, 1, false, std::u32string_view(s));
         if (!sp) return std::nullopt;
         return sub(s, 0, sp->end);
       },
       ""},
      // Regex: prefixes
      {"GetFirstChar", first_chars(1), ""},
      {"GetFirstTwoChar", first_chars(2), ""},
      {"GetFirstThreeChar", first_chars(3), ""},
      {"GetFirstFourChar", first_chars(4), ""},
      {"GetFirstFiveChar", first_chars(5), ""},
      {"GetFirstDigit", first_digits(1), ""},
      {"GetFirstTwoDigit", first_digits(2), ""},
      {"GetFirstThreeDigit", first_digits(3), ""},
      {"GetFirstFourDigit", first_digits(4), ""},
      {"GetFirstFiveDigit", first_digits(5), ""},
      {"GetAllPropercaseWords", first_to_last(TokenClass::PropercaseWord), ""},
      {"GetAllLetters", first_to_last(TokenClass::Alpha), ""},
      {"GetAllNumbers", first_to_last(TokenClass::Number), ""},
  };
}

struct Dispatch {
  std::vector<Fn> fns;
  std::vector<std::string_view> tables;
};

const Dispatch& dispatch() {
  static const Dispatch d = [] {
    Dispatch out;
    const auto catalog = api_catalog();
    out.fns.resize(catalog.size());
    out.tables.resize(catalog.size());
    const auto named = named_functions();
    for (const ApiSpec& spec : catalog) {
      const auto it = std::find_if(named.begin(), named.end(),
                                   [&](const Named& n) { return n.name == spec.name; });
      if (it != named.end()) {
        out.fns[spec.id.value] = it->fn;
        out.tables[spec.id.value] = it->table;
      } else if (auto fn = positional_from_name(spec.name)) {
        out.fns[spec.id.value] = std::move(*fn);
      } else {
        throw Error("no semantics for API " + spec.name);
      }
    }
    return out;
  }();
  return d;
}

}  // namespace

ApiLibrary::ApiLibrary(std::shared_ptr<const Dictionaries> dicts) : dicts_(std::move(dicts)) {
  if (!dicts_) throw Error("ApiLibrary needs a dictionary registry");
}

const ApiLibrary& ApiLibrary::defaults() {
  static const ApiLibrary lib(Dictionaries::defaults());
  return lib;
}

ApiResult ApiLibrary::eval(ApiId id, std::string_view s) const {
  const Dispatch& d = dispatch();
  if (id.value >= d.fns.size()) throw UnknownApi("#" + std::to_string(id.value));
  return d.fns[id.value](*dicts_, s);
}

std::string_view ApiLibrary::table_for(ApiId id) const {
  const Dispatch& d = dispatch();
  if (id.value >= d.tables.size()) throw UnknownApi("#" + std::to_string(id.value));
  return d.tables[id.value];
}

ApiResult eval_api(ApiId id, std::string_view s) { return ApiLibrary::defaults().eval(id, s); }

}  // namespace dapip
