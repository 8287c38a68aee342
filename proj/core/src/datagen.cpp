#include "dapip/datagen.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "dapip/config.hpp"
#include "dapip/errors.hpp"
#include "dapip/text.hpp"

namespace dapip {

// ---------------------------------------------------------------------------
// Configuration

std::string_view to_string(ApiSet set) {
  switch (set) {
    case ApiSet::Full: return "full";
    case ApiSet::RegexOnly: return "regex-only";
    case ApiSet::Reduced: return "reduced";
    case ApiSet::Custom: return "custom";
  }
  return "custom";
}

std::optional<ApiSet> parse_api_set(std::string_view name) {
  for (ApiSet s : {ApiSet::Full, ApiSet::RegexOnly, ApiSet::Reduced, ApiSet::Custom}) {
    if (to_string(s) == name) return s;
  }
  return std::nullopt;
}

std::vector<ApiId> reduced_regex_apis() {
  static constexpr std::array<std::string_view, 25> kNames = {
      "GetFirstWord",           "GetSecondWord",         "GetLastWord",
      "GetFirstNumber",         "GetSecondNumber",       "GetLastNumber",
      "GetFirstAlpha",          "GetLastAlpha",          "GetFirstWS",
      "GetLastWS",              "GetFirstCapsWord",      "GetFirstPropercaseWord",
      "GetLastPropercaseWord",  "TrimSpaces",            "TrimLeadingZeros",
      "ReplaceSpacesWithDashes", "ToLowercase",          "ToUppercase",
      "ToPropercase",           "GetStartToFirstSpace",  "GetLastSpaceToEnd",
      "GetStartToFirstComma",   "GetFirstChar",          "GetFirstTwoChar",
      "GetAllNumbers"};
  std::vector<ApiId> out;
  for (auto n : kNames) out.push_back(api_by_name(n));
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<ApiId> apis_for(ApiSet set) {
  switch (set) {
    case ApiSet::Full: return list_apis();
    case ApiSet::RegexOnly: return list_apis(ApiFamily::Regex);
    case ApiSet::Reduced: return reduced_regex_apis();
    case ApiSet::Custom: break;
  }
  throw std::invalid_argument("custom API sets have no fixed member list");
}

GenConfig& GenConfig::with_api_set(ApiSet set) {
  api_set = set;
  apis = apis_for(set);
  return *this;
}

void GenConfig::validate() const {
  if (max_size < 2) throw std::invalid_argument("max_size must be at least 2");
  if (max_input_length < 1 || max_output_length < 1) {
    throw std::invalid_argument("length bounds must be positive");
  }
  if (min_noise_tokens < 0 || max_noise_tokens < min_noise_tokens) {
    throw std::invalid_argument("bad noise token bounds");
  }
  if (attempts_per_input < 1) throw std::invalid_argument("attempts_per_input must be positive");
}

Grammar GenConfig::grammar(const ConstantTable& constants) const { return Grammar(apis, constants); }

// ---------------------------------------------------------------------------
// Uniform program sampler

ProgramSampler::ProgramSampler(const Grammar& grammar, int max_size)
    : grammar_(&grammar), max_size_(max_size) {
  if (max_size < 2) throw std::invalid_argument("max_size must be at least 2");
  for (RuleId id : grammar.rules_for(Symbol::F)) {
    const GrammarRule& r = grammar.rule(id);
    switch (r.kind) {
      case GrammarRule::Kind::Api:
        if (r.arity == 0) {
          leaves_.push_back(Expr::apply(r.api, Expr::input()));
        } else {
          nested_.push_back(r.api);
        }
        break;
      case GrammarRule::Kind::Const:
        leaves_.push_back(Expr::constant(r.constant));
        break;
      case GrammarRule::Kind::Input:
        leaves_.push_back(Expr::input());
        break;
      case GrammarRule::Kind::Concat:
        break;
    }
  }
  const int m_max = max_size - 1;
  f_.assign(static_cast<std::size_t>(m_max) + 1, 0.0);
  if (m_max >= 1) f_[1] = static_cast<double>(leaves_.size());
  for (int s = 2; s <= m_max; ++s) f_[s] = static_cast<double>(nested_.size()) * f_[s - 1];
  comp_.assign(Program::kMaxConcatArity + 1, std::vector<double>(f_.size(), 0.0));
  comp_[0][0] = 1.0;
  for (int q = 1; q <= Program::kMaxConcatArity; ++q) {
    for (int m = 1; m <= m_max; ++m) {
      double c = 0.0;
      for (int s = 1; s <= m; ++s) c += f_[s] * comp_[q - 1][m - s];
      comp_[q][m] = c;
    }
  }
}

double ProgramSampler::count(int size) const {
  if (size < 2 || size > max_size_) return 0.0;
  double c = 0.0;
  for (int q = 1; q <= Program::kMaxConcatArity; ++q) c += comp_[q][size - 1];
  return c;
}

double ProgramSampler::total() const {
  double t = 0.0;
  for (int n = 2; n <= max_size_; ++n) t += count(n);
  return t;
}

Expr ProgramSampler::sample_substring(Rng& rng, int size) const {
  if (size == 1) return leaves_[rng.uniform_index(leaves_.size())];
  const ApiId api = nested_[rng.uniform_index(nested_.size())];
  return Expr::apply(api, sample_substring(rng, size - 1));
}

Program ProgramSampler::sample(Rng& rng) const {
  std::vector<double> w;
  for (int n = 2; n <= max_size_; ++n) w.push_back(count(n));
  const int n = 2 + static_cast<int>(rng.weighted_index(w));
  int m = n - 1;
  w.clear();
  for (int q = 1; q <= Program::kMaxConcatArity; ++q) w.push_back(comp_[q][m]);
  const int q = 1 + static_cast<int>(rng.weighted_index(w));
  std::vector<Expr> kids;
  for (int i = 0; i < q; ++i) {
    const int rest = q - i - 1;
    w.clear();
    for (int s = 1; s <= m; ++s) w.push_back(f_[s] * comp_[rest][m - s]);
    const int s = 1 + static_cast<int>(rng.weighted_index(w));
    kids.push_back(sample_substring(rng, s));
    m -= s;
  }
  return Program(Expr::concat(std::move(kids)));
}

Program sample_program(Rng& rng, const GenConfig& cfg) {
  cfg.validate();
  const Grammar g = cfg.grammar();
  return ProgramSampler(g, cfg.max_size).sample(rng);
}

// ---------------------------------------------------------------------------
// Prerequisites

namespace {

struct PositionalName {
  int k = 0;
  std::string_view cls;
};

std::optional<PositionalName> parse_positional(std::string_view name) {
  static constexpr std::array<std::pair<std::string_view, int>, 10> kOrd = {{
      {"SecondToLast", 2}, {"ThirdToLast", 3}, {"FourthToLast", 4}, {"FifthToLast", 5},
      {"First", 1},        {"Second", 2},      {"Third", 3},        {"Fourth", 4},
      {"Fifth", 5},        {"Last", 1},
  }};
  static constexpr std::array<std::string_view, 6> kCls = {"PropercaseWord", "CapsWord", "Number",
                                                           "Alpha",          "Word",     "WS"};
  if (!name.starts_with("Get")) return std::nullopt;
  name.remove_prefix(3);
  for (auto [word, k] : kOrd) {
    if (!name.starts_with(word)) continue;
    for (auto c : kCls) {
      if (name.substr(word.size()) == c) return PositionalName{k, c};
    }
  }
  return std::nullopt;
}

void need(int& slot, int k) { slot = std::max(slot, k); }

void need_delim(Prerequisites& p, char c, int n) {
  auto& slot = p.delimiters[c];
  slot = std::max(slot, n);
}

void add_api(Prerequisites& p, const ApiSpec& spec, const ApiLibrary& lib) {
  const std::string& n = spec.name;
  if (auto pos = parse_positional(n)) {
    if (pos->cls == "Number") need(p.numbers, pos->k);
    else if (pos->cls == "Alpha") need(p.alphas, pos->k);
    else if (pos->cls == "Word") need(p.words, pos->k);
    else if (pos->cls == "WS") need(p.ws_tokens, pos->k);
    else if (pos->cls == "CapsWord") need(p.caps_words, pos->k);
    else need(p.propercase_words, pos->k);
    return;
  }
  if (spec.family != ApiFamily::Regex) {
    const auto table = lib.table_for(spec.id);
    if (n == "GetStreetName") p.street = true;
    else if (n == "GetStreetNum") p.street = p.street_number = true;
    else if (n == "GetAptNum") p.apartment = true;
    else if (n == "GetZipcode") p.zipcode = true;
    else if (n == "GetYear") p.year = true;
    else if (n == "GetDate" || n.ends_with("FromDate")) p.date = true;
    else if (table.empty()) return;
    else if (spec.family == ApiFamily::Lookup || n == "GetFirstInitial" || n == "GetLastInitial") {
      p.lookup_tables.insert(std::string(table));
    } else {
      p.transform_tables.insert(std::string(table));
    }
    return;
  }
  static constexpr std::array<std::pair<std::string_view, std::size_t>, 10> kPrefix = {{
      {"GetFirstChar", 1}, {"GetFirstTwoChar", 2}, {"GetFirstThreeChar", 3},
      {"GetFirstFourChar", 4}, {"GetFirstFiveChar", 5}, {"GetFirstDigit", 1},
      {"GetFirstTwoDigit", 2}, {"GetFirstThreeDigit", 3}, {"GetFirstFourDigit", 4},
      {"GetFirstFiveDigit", 5},
  }};
  for (auto [name, k] : kPrefix) {
    if (n != name) continue;
    if (n.ends_with("Digit")) {
      need(p.numbers, 1);
      p.min_digit_run = std::max(p.min_digit_run, k);
    } else {
      p.min_length = std::max(p.min_length, k);
    }
    return;
  }
  if (n == "TrimSpaces" || n.starts_with("ReplaceSpaces")) p.spaces = true;
  else if (n == "TrimLeadingZeros") p.leading_zero = true, need(p.numbers, 1);
  else if (n.starts_with("To")) p.mixed_case = true;
  else if (n.find("At") != std::string::npos && n.starts_with("GetWordBetween")) need_delim(p, '@', 1);
  else if (n.find("Dot") != std::string::npos) need_delim(p, '.', 1);
  else if (n.find("Space") != std::string::npos && n != "GetWordBetweenCommaSpaceAndEnd") p.spaces = true, need(p.ws_tokens, 2);
  else if (n == "GetFirstDashToSecondDash") need_delim(p, '-', 2);
  else if (n.find("Dash") != std::string::npos) need_delim(p, '-', 1);
  else if (n == "GetWordBetweenFirstAndSecondComma") need_delim(p, ',', 2);
  else if (n == "GetWordBetweenSecondAndThirdComma") need_delim(p, ',', 3);
  else if (n.find("Comma") != std::string::npos) need_delim(p, ',', 1);
  else if (n == "GetStartToParan") need_delim(p, '(', 1);
  else if (n == "GetStartToSecondColon") need_delim(p, ':', 2);
  else if (n.find("Colon") != std::string::npos) need_delim(p, ':', 1);
  else if (n.find("Quote") != std::string::npos) need_delim(p, '"', 2);
  else if (n == "GetStartToEndOfFirstNumber" || n == "GetAllNumbers") need(p.numbers, 1);
  else if (n == "GetAllPropercaseWords") need(p.propercase_words, 2);
  else if (n == "GetAllLetters") need(p.alphas, 2);
}

void walk(const Expr& e, Prerequisites& p, const ApiLibrary& lib) {
  if (e.kind == Expr::Kind::Apply) add_api(p, api_spec(e.api()), lib);
  for (const Expr& c : e.args) walk(c, p, lib);
}

// Only calls applied directly to the input contribute.
void walk_innermost(const Expr& e, Prerequisites& p, const ApiLibrary& lib) {
  if (e.kind == Expr::Kind::Apply && e.args.front().kind == Expr::Kind::InputVar) {
    add_api(p, api_spec(e.api()), lib);
  }
  for (const Expr& c : e.args) walk_innermost(c, p, lib);
}

}  // namespace

Prerequisites collect_prerequisites(const Program& program, const ApiLibrary& library) {
  Prerequisites p;
  walk(program.root(), p, library);
  return p;
}

Prerequisites api_prerequisites(ApiId api, const ApiLibrary& library) {
  Prerequisites p;
  add_api(p, api_spec(api), library);
  return p;
}

// ---------------------------------------------------------------------------
// Inputs

namespace {

std::vector<std::string> load_noise_words() {
  const auto path = default_data_dir() / "noise_words.txt";
  std::ifstream in(path);
  if (!in) throw IoError("cannot open noise vocabulary " + path.string());
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) out.push_back(line);
  }
  if (out.empty()) throw DataFormatError(path.string(), 1, "empty noise vocabulary");
  return out;
}

std::string capitalize(std::string w) {
  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i] = static_cast<char>(i == 0 ? text::to_upper(static_cast<unsigned char>(w[i]))
                                    : text::to_lower(static_cast<unsigned char>(w[i])));
  }
  return w;
}

std::string upper(std::string w) {
  for (char& c : w) c = static_cast<char>(text::to_upper(static_cast<unsigned char>(c)));
  return w;
}

constexpr std::array<std::string_view, 10> kPunctTokens = {"%", "!", "?", "$", "&", "}", "*", "~", "+", "="};

struct Segment {
  std::string text;
  bool noise = false;
};

}  // namespace

InputGenerator::InputGenerator(const GenConfig& cfg, const ApiLibrary& library,
                               const ConstantTable& constants)
    : cfg_(cfg), library_(&library), interp_(library, constants) {
  cfg_.validate();
  static const std::vector<std::string> noise = load_noise_words();
  noise_ = noise;
}

std::string InputGenerator::noise_word(Rng& rng) const { return noise_[rng.uniform_index(noise_.size())]; }

std::string InputGenerator::number(Rng& rng, std::size_t min_len, bool leading_zero) const {
  const std::size_t len = std::max<std::size_t>(min_len, static_cast<std::size_t>(rng.uniform_int(1, 4)));
  std::string s;
  for (std::size_t i = 0; i < len; ++i) s.push_back(static_cast<char>('0' + rng.uniform_int(0, 9)));
  if (leading_zero && len > 1 && rng.bernoulli(0.6)) s[0] = '0';
  return s;
}

std::string InputGenerator::candidate(const Prerequisites& pre, Rng& rng,
                                      std::span<const std::string> seeds, int max_noise) const {
  const Dictionaries& dicts = library_->dictionaries();
  std::vector<Segment> segs;
  auto add = [&](std::string t, bool noise = false) { segs.push_back({std::move(t), noise}); };
  for (const std::string& seed : seeds) add(seed);
  auto cased = [&](std::string w) {
    const double u = rng.uniform01();
    const double lower_p = pre.mixed_case ? 0.45 : 0.6;
    const double proper_p = pre.mixed_case ? 0.3 : 0.3;
    if (u < lower_p) return w;
    if (u < lower_p + proper_p) return capitalize(std::move(w));
    return upper(std::move(w));
  };

  for (const std::string& t : pre.lookup_tables) {
    const auto entries = dicts.lookup(t).entries();
    add(entries[rng.uniform_index(entries.size())]);
  }
  for (const std::string& t : pre.transform_tables) {
    const auto rows = dicts.transform(t).rows();
    add(rows[rng.uniform_index(rows.size())].first);
  }
  if (pre.date) {
    CivilDate d{rng.uniform_int(1950, 2030), rng.uniform_int(1, 12), 1};
    d.day = rng.uniform_int(1, 28);
    auto pad2 = [](int v) { return (v < 10 ? "0" : "") + std::to_string(v); };
    const std::string y = std::to_string(d.year);
    switch (rng.uniform_int(0, 2)) {
      case 0: add(y + "-" + pad2(d.month) + "-" + pad2(d.day)); break;
      case 1: add(std::to_string(d.month) + "/" + std::to_string(d.day) + "/" + y); break;
      default: add(std::string(month_name(d.month)) + " " + std::to_string(d.day) + ", " + y);
    }
  }
  if (pre.street) {
    const auto suffixes = dicts.lookup("street_suffix").entries();
    std::string s = capitalize(noise_word(rng)) + " " + suffixes[rng.uniform_index(suffixes.size())];
    if (pre.street_number || rng.bernoulli(0.3)) s = number(rng, 1, false) + " " + s;
    add(s);
  }
  if (pre.apartment) {
    static constexpr std::array<std::string_view, 4> kMarks = {"Apt ", "Unit ", "Suite ", "#"};
    add(std::string(kMarks[rng.uniform_index(kMarks.size())]) + number(rng, 1, false));
  }
  if (pre.zipcode) add(number(rng, 5, false).substr(0, 5));
  if (pre.year) add(std::to_string(rng.uniform_int(1900, 2099)));

  // Count what the mandatory segments already provide.
  auto count = [&](TokenClass c) {
    int n = 0;
    for (const Segment& s : segs) n += static_cast<int>(token_spans(c, text::decode_utf8(s.text)).size());
    return n;
  };
  for (int i = count(TokenClass::Number); i < pre.numbers; ++i) {
    add(number(rng, pre.min_digit_run, pre.leading_zero));
  }
  for (int i = count(TokenClass::CapsWord); i < pre.caps_words; ++i) {
    std::string w = upper(noise_word(rng));
    if (w.size() > 4) w.resize(static_cast<std::size_t>(rng.uniform_int(2, 4)));
    add(w);
  }
  for (int i = count(TokenClass::PropercaseWord); i < pre.propercase_words; ++i) {
    add(capitalize(noise_word(rng)));
  }
  for (int i = count(TokenClass::Alpha); i < pre.alphas; ++i) add(cased(noise_word(rng)));
  for (int i = count(TokenClass::Word); i < pre.words; ++i) {
    add(rng.bernoulli(0.3) ? number(rng, 1, false) : cased(noise_word(rng)));
  }
  for (int i = count(TokenClass::WSToken); i < pre.ws_tokens; ++i) add(cased(noise_word(rng)), true);

  const int noise_hi = max_noise < 0 ? cfg_.max_noise_tokens : std::min(max_noise, cfg_.max_noise_tokens);
  const int noise = rng.uniform_int(std::min(cfg_.min_noise_tokens, noise_hi), noise_hi);
  for (int i = 0; i < noise; ++i) {
    const double u = rng.uniform01();
    if (u < 0.6) add(cased(noise_word(rng)), true);
    else if (u < 0.8) add(number(rng, 1, pre.leading_zero), true);
    else add(std::string(kPunctTokens[rng.uniform_index(kPunctTokens.size())]), true);
  }
  if (segs.empty()) add(cased(noise_word(rng)), true);

  // Shuffle, keeping a number up front now and then for leading-zero tasks.
  for (std::size_t i = segs.size(); i > 1; --i) std::swap(segs[i - 1], segs[rng.uniform_index(i)]);
  if (pre.leading_zero && rng.bernoulli(0.5)) {
    const auto it = std::find_if(segs.begin(), segs.end(), [](const Segment& s) {
      return !s.text.empty() && text::is_digit(static_cast<unsigned char>(s.text[0]));
    });
    if (it != segs.end()) std::rotate(segs.begin(), it, it + 1);
  }

  // Separators: spaces by default, required delimiters in random gaps.
  std::vector<std::string> seps(segs.size() > 0 ? segs.size() - 1 : 0, " ");
  std::string prefix, suffix;
  for (const auto& [c, n] : pre.delimiters) {
    for (int i = 0; i < n; ++i) {
      std::string sep;
      switch (c) {
        case ',': sep = rng.bernoulli(0.7) ? ", " : ","; break;
        case '-': sep = rng.bernoulli(0.7) ? "-" : " - "; break;
        case ':': sep = ":"; break;
        case '.': sep = rng.bernoulli(0.5) ? "." : ". "; break;
        case '@': sep = "@"; break;
        case '(': sep = " ("; break;
        case '"': sep = i % 2 == 0 ? " \"" : "\" "; break;
        default: sep = std::string(1, c);
      }
      std::vector<std::size_t> free;
      for (std::size_t g = 0; g < seps.size(); ++g) {
        if (seps[g] == " ") free.push_back(g);
      }
      if (!free.empty()) {
        seps[free[rng.uniform_index(free.size())]] = sep;
      } else {
        suffix += sep + cased(noise_word(rng));
      }
    }
  }
  if (pre.spaces) {
    for (auto& s : seps) {
      if (s == " " && rng.bernoulli(0.25)) s = "  ";
    }
    if (rng.bernoulli(0.2)) prefix = " ";
  }

  // Drop noise segments until the string fits.
  auto join = [&] {
    std::string out = prefix;
    for (std::size_t i = 0; i < segs.size(); ++i) {
      if (i > 0) out += seps[i - 1];
      out += segs[i].text;
    }
    return out + suffix;
  };
  std::string out = join();
  while (text::code_point_count(out) > cfg_.max_input_length) {
    const auto it = std::find_if(segs.begin(), segs.end(), [](const Segment& s) { return s.noise; });
    if (it == segs.end() || segs.size() < 2) break;
    const std::size_t idx = static_cast<std::size_t>(it - segs.begin());
    segs.erase(it);
    seps.erase(seps.begin() + static_cast<std::ptrdiff_t>(std::min(idx, seps.size() - 1)));
    out = join();
  }
  return out;
}

std::optional<std::string> InputGenerator::chain_seed(const Expr& child, Rng& rng) const {
  constexpr int kTriesPerLevel = 8;
  std::vector<ApiId> chain;  // outermost first
  const Expr* cur = &child;
  while (cur->kind == Expr::Kind::Apply && cur->args.front().kind == Expr::Kind::Apply) {
    chain.push_back(cur->api());
    cur = &cur->args.front();
  }
  // A lookup at the bottom fixes the innermost string to a table entry and
  // a constant fixes it entirely; neither can take a seed.
  if (chain.empty() || cur->kind != Expr::Kind::Apply ||
      api_spec(cur->api()).family == ApiFamily::Lookup) {
    return std::nullopt;
  }
  const ApiLibrary& lib = *library_;
  auto run_outer = [&](std::size_t depth, std::string s) -> ApiResult {
    for (std::size_t j = depth + 1; j-- > 0;) {
      auto r = lib.eval(chain[j], s);
      if (!r) return std::nullopt;
      s = std::move(*r);
    }
    return s;
  };
  std::optional<std::string> seed;
  for (std::size_t j = 0; j < chain.size(); ++j) {
    const Prerequisites pre = api_prerequisites(chain[j], lib);
    std::optional<std::string> next;
    for (int t = 0; t < kTriesPerLevel && !next; ++t) {
      std::vector<std::string> seeds;
      if (seed) seeds.push_back(*seed);
      std::string c = candidate(pre, rng, seeds, 1);
      if (text::code_point_count(c) > cfg_.max_input_length) continue;
      if (run_outer(j, c)) next = std::move(c);
    }
    if (!next) return std::nullopt;
    seed = std::move(next);
  }
  return seed;
}

std::vector<std::string> InputGenerator::generate(const Program& program, Rng& rng) const {
  // Children that never read the input either always fail or never do.
  auto reads_input = [](const Expr& e, auto&& self) -> bool {
    if (e.kind == Expr::Kind::InputVar) return true;
    return std::any_of(e.args.begin(), e.args.end(), [&](const Expr& c) { return self(c, self); });
  };
  for (const Expr& child : program.root().args) {
    if (!reads_input(child, reads_input) && !interp_.evaluate(child, "")) {
      throw UnsatisfiableProgram("constant subexpression fails in " +
                                 print_program(program, interp_.constants()));
    }
  }
  const Prerequisites joint = collect_prerequisites(program, *library_);
  Prerequisites innermost;
  walk_innermost(program.root(), innermost, *library_);
  std::vector<std::string> inputs;
  for (std::size_t i = 0; i < kPairsPerInstance; ++i) {
    bool found = false;
    for (int a = 0; a < cfg_.attempts_per_input && !found; ++a) {
      std::string s;
      if (a % 2 == 0) {
        s = candidate(joint, rng);
      } else {
        std::vector<std::string> seeds;
        for (const Expr& child : program.root().args) {
          if (auto seed = chain_seed(child, rng)) seeds.push_back(std::move(*seed));
        }
        s = candidate(innermost, rng, seeds);
      }
      if (s.empty() || text::code_point_count(s) > cfg_.max_input_length) continue;
      const auto out = interp_.evaluate(program, s);
      if (!out || text::code_point_count(*out) > cfg_.max_output_length) continue;
      inputs.push_back(std::move(s));
      found = true;
    }
    if (!found) {
      throw UnsatisfiableProgram("no input found for " + print_program(program, interp_.constants()));
    }
  }
  return inputs;
}

std::vector<std::string> generate_inputs(const Program& program, Rng& rng, const GenConfig& cfg) {
  return InputGenerator(cfg).generate(program, rng);
}

TrainingInstance make_instance(const Program& program, Rng& rng, const InputGenerator& gen) {
  TrainingInstance inst{program, {}};
  for (std::string& in : gen.generate(program, rng)) {
    auto out = gen.interpreter().evaluate(program, in);
    inst.pairs.push_back({std::move(in), std::move(*out)});
  }
  return inst;
}

TrainingInstance make_instance(const Program& program, Rng& rng, const GenConfig& cfg) {
  return make_instance(program, rng, InputGenerator(cfg));
}

// ---------------------------------------------------------------------------
// Datasets

namespace {

constexpr int kMaxProgramTries = 200000;
constexpr std::uint64_t kCoverageStreamBase = 1ULL << 40;

bool try_instance(const ProgramSampler& sampler, const InputGenerator& gen, Rng& rng,
                  const std::set<std::string>& exclude, const ConstantTable& constants,
                  DatasetStats& stats, std::optional<TrainingInstance>& out,
                  std::optional<ApiId> must_use = std::nullopt) {
  const Program p = sampler.sample(rng);
  if (must_use) {
    const auto used = apis_used(p);
    if (std::find(used.begin(), used.end(), *must_use) == used.end()) return false;
  }
  if (!exclude.empty() && exclude.count(print_program(p, constants))) {
    ++stats.excluded_rejects;
    return false;
  }
  try {
    out = make_instance(p, rng, gen);
    return true;
  } catch (const UnsatisfiableProgram&) {
    ++stats.unsatisfiable_rejects;
    return false;
  }
}

}  // namespace

std::vector<TrainingInstance> generate_dataset(std::size_t n, const GenConfig& cfg,
                                               const std::set<std::string>& exclude,
                                               DatasetStats* stats_out) {
  cfg.validate();
  const ConstantTable& constants = ConstantTable::defaults();
  const Grammar grammar = cfg.grammar(constants);
  const ProgramSampler sampler(grammar, cfg.max_size);
  const InputGenerator gen(cfg);
  DatasetStats stats;
  std::vector<TrainingInstance> data;
  data.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng = Rng::stream(cfg.seed, i);
    std::optional<TrainingInstance> inst;
    for (int t = 0; t < kMaxProgramTries && !inst; ++t) {
      try_instance(sampler, gen, rng, exclude, constants, stats, inst);
    }
    if (!inst) throw UnsatisfiableProgram("sampler could not produce a satisfiable program");
    data.push_back(std::move(*inst));
  }

  if (cfg.ensure_coverage && n > 0) {
    std::map<ApiId, int> uses;
    for (const auto& d : data) {
      for (ApiId a : apis_used(d.program)) ++uses[a];
    }
    std::size_t victim = n;
    for (ApiId api : grammar.apis()) {
      if (uses[api] > 0) continue;
      Rng rng = Rng::stream(cfg.seed, kCoverageStreamBase + api.value);
      std::optional<TrainingInstance> inst;
      for (int t = 0; t < 20 * kMaxProgramTries && !inst; ++t) {
        try_instance(sampler, gen, rng, exclude, constants, stats, inst, api);
      }
      if (!inst) {
        stats.uncovered_apis.push_back(api_spec(api).name);
        continue;
      }
      // Replace the last instance whose APIs all stay covered without it.
      bool placed = false;
      while (victim > 0 && !placed) {
        --victim;
        const auto used = apis_used(data[victim].program);
        if (std::all_of(used.begin(), used.end(), [&](ApiId a) { return uses[a] > 1; })) {
          for (ApiId a : used) --uses[a];
          for (ApiId a : apis_used(inst->program)) ++uses[a];
          data[victim] = std::move(*inst);
          ++stats.coverage_replacements;
          placed = true;
        }
      }
      if (!placed) stats.uncovered_apis.push_back(api_spec(api).name);
    }
  }
  stats.count = data.size();
  if (stats_out) *stats_out = stats;
  return data;
}

std::string format_record(const TrainingInstance& inst, const ConstantTable& constants) {
  std::string line = text::escape_field(print_program(inst.program, constants));
  for (const ExamplePair& p : inst.pairs) {
    line += '\t';
    line += text::escape_field(p.input);
    line += '\t';
    line += text::escape_field(p.output);
  }
  return line;
}

TrainingInstance parse_record(std::string_view line, const ConstantTable& constants) {
  const auto fields = text::split(line, '\t');
  if (fields.size() < 3 || fields.size() % 2 == 0) {
    throw std::invalid_argument("expected program followed by input/output pairs");
  }
  TrainingInstance inst{parse_program(text::unescape_field(fields[0]), constants), {}};
  for (std::size_t i = 1; i + 1 < fields.size(); i += 2) {
    inst.pairs.push_back({text::unescape_field(fields[i]), text::unescape_field(fields[i + 1])});
  }
  return inst;
}

std::filesystem::path manifest_path(const std::filesystem::path& dataset) {
  auto p = dataset;
  p += ".manifest";
  return p;
}

void write_dataset(const std::vector<TrainingInstance>& data, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write dataset " + path.string());
  for (const auto& inst : data) out << format_record(inst) << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

DatasetStats emit_dataset(std::size_t n, const GenConfig& cfg, const std::filesystem::path& path,
                          const std::set<std::string>& exclude) {
  // Open both files first so a bad path fails before any generation work.
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write dataset " + path.string());
  std::ofstream m(manifest_path(path), std::ios::binary | std::ios::trunc);
  if (!m) throw IoError("cannot write manifest " + manifest_path(path).string());
  DatasetStats stats;
  for (const auto& inst : generate_dataset(n, cfg, exclude, &stats)) out << format_record(inst) << '\n';
  if (!out.flush()) throw IoError("write failed for " + path.string());
  std::string uncovered;
  for (const auto& a : stats.uncovered_apis) uncovered += (uncovered.empty() ? "" : ",") + a;
  m << "format=dapip-dataset-1\n"
    << "count=" << stats.count << '\n'
    << "seed=" << cfg.seed << '\n'
    << "max_size=" << cfg.max_size << '\n'
    << "api_set=" << to_string(cfg.api_set) << '\n'
    << "api_count=" << cfg.apis.size() << '\n'
    << "grammar_fingerprint=" << cfg.grammar().fingerprint() << '\n'
    << "pairs_per_instance=" << kPairsPerInstance << '\n'
    << "max_input_length=" << cfg.max_input_length << '\n'
    << "max_output_length=" << cfg.max_output_length << '\n'
    << "noise_tokens=" << cfg.min_noise_tokens << ".." << cfg.max_noise_tokens << '\n'
    << "attempts_per_input=" << cfg.attempts_per_input << '\n'
    << "ensure_coverage=" << (cfg.ensure_coverage ? "true" : "false") << '\n'
    << "coverage_replacements=" << stats.coverage_replacements << '\n'
    << "uncovered_apis=" << uncovered << '\n'
    << "excluded_programs=" << exclude.size() << '\n'
    << "excluded_rejects=" << stats.excluded_rejects << '\n'
    << "unsatisfiable_rejects=" << stats.unsatisfiable_rejects << '\n';
  if (!m.flush()) throw IoError("write failed for " + manifest_path(path).string());
  return stats;
}

std::vector<TrainingInstance> read_dataset(const std::filesystem::path& path,
                                           const ConstantTable& constants) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open dataset " + path.string());
  std::vector<TrainingInstance> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      out.push_back(parse_record(line, constants));
    } catch (const DataFormatError&) {
      throw;
    } catch (const std::exception& e) {
      throw DataFormatError(path.string(), lineno, e.what());
    }
  }
  return out;
}

std::map<std::string, std::string> read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest " + path.string());
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw DataFormatError(path.string(), lineno, "expected key=value");
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return kv;
}

}  // namespace dapip
