#include "beacon/option_syntax.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <limits>
#include <set>
#include <utility>

#include "beacon/error.hpp"
#include "beacon/rng.hpp"
#include "beacon/text.hpp"

namespace beacon {
namespace {

constexpr std::int64_t kInt64Max = std::numeric_limits<std::int64_t>::max();
constexpr std::int64_t kInt64Min = std::numeric_limits<std::int64_t>::min();

const std::vector<std::string>& signal_names() {
  static const std::vector<std::string> names = {
      "SIGHUP",  "SIGINT",  "SIGQUIT", "SIGILL",    "SIGTRAP", "SIGABRT",   "SIGBUS",  "SIGFPE",
      "SIGKILL", "SIGUSR1", "SIGSEGV", "SIGUSR2",   "SIGPIPE", "SIGALRM",   "SIGTERM", "SIGSTKFLT",
      "SIGCHLD", "SIGCONT", "SIGSTOP", "SIGTSTP",   "SIGTTIN", "SIGTTOU",   "SIGURG",  "SIGXCPU",
      "SIGXFSZ", "SIGVTALRM", "SIGPROF", "SIGWINCH", "SIGIO",  "SIGPWR",    "SIGSYS",
  };
  return names;
}

SyntaxPtr make(auto node) { return std::make_shared<const ValueSyntax>(ValueSyntax{std::move(node)}); }

std::uint64_t unsigned_max(int w) {
  return w >= 64 ? std::numeric_limits<std::uint64_t>::max() : (std::uint64_t{1} << w) - 1;
}

std::int64_t signed_min(int w) { return w >= 64 ? kInt64Min : -(std::int64_t{1} << (w - 1)); }
std::int64_t signed_max(int w) { return w >= 64 ? kInt64Max : (std::int64_t{1} << (w - 1)) - 1; }

// ---------------------------------------------------------------------------
// Syntax expression parser
// ---------------------------------------------------------------------------

class SyntaxParser {
 public:
  explicit SyntaxParser(std::string_view src) : src_(src) {}

  SyntaxPtr parse() {
    auto s = alternation();
    skip_ws();
    if (pos_ != src_.size()) fail("unexpected '" + std::string(1, src_[pos_]) + "'");
    return s;
  }

 private:
  struct Element {
    SyntaxPtr syntax;
    bool optional = false;
  };

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("syntax error at column " + std::to_string(pos_ + 1) + ": " + what);
  }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  char peek() {
    skip_ws();
    return pos_ < src_.size() ? src_[pos_] : '\0';
  }

  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  SyntaxPtr alternation() {
    std::vector<SyntaxPtr> alts{sequence()};
    while (peek() == '|') {
      ++pos_;
      alts.push_back(sequence());
    }
    if (alts.size() == 1) return alts.front();

    const bool all_literals = std::all_of(alts.begin(), alts.end(), [](const SyntaxPtr& s) {
      return std::holds_alternative<Literal>(s->node);
    });
    if (all_literals) {
      Enum e;
      std::set<std::string> seen;
      for (const auto& a : alts) {
        const auto& t = std::get<Literal>(a->node).text;
        if (!seen.insert(t).second) fail("duplicate choice \"" + t + "\"");
        e.choices.push_back(t);
      }
      return make(std::move(e));
    }
    return make(Choice{std::move(alts)});
  }

  SyntaxPtr sequence() {
    std::vector<Element> elems;
    while (true) {
      const char c = peek();
      if (c == '\0' || c == ')' || c == ']' || c == '|') break;
      elems.push_back(element());
    }
    if (elems.empty()) fail("empty expression");
    if (elems.size() == 1 && !elems.front().optional) return elems.front().syntax;

    // <Un> followed by single-character unit choices is a byte quantity.
    if (elems.size() == 2 && !elems[0].optional) {
      const auto* mag = std::get_if<UnsignedInt>(&elems[0].syntax->node);
      const auto* units = std::get_if<Enum>(&elems[1].syntax->node);
      if (mag && units &&
          std::all_of(units->choices.begin(), units->choices.end(),
                      [](const std::string& u) { return u.size() == 1 && std::isalpha(static_cast<unsigned char>(u[0])); })) {
        BytesWithUnit b;
        b.magnitude_bit_width = mag->bit_width;
        for (const auto& u : units->choices) b.unit_suffixes += u;
        b.suffix_optional = elems[1].optional;
        return make(std::move(b));
      }
    }

    Compound comp;
    for (auto& e : elems) comp.parts.push_back({std::move(e.syntax), e.optional});
    return make(std::move(comp));
  }

  Element element() {
    const char c = peek();
    if (c == '<') return {named_type(), false};
    if (c == '"') return {literal(), false};
    if (c == '[') {
      ++pos_;
      auto inner = alternation();
      expect(']');
      return {std::move(inner), true};
    }
    if (c == '(') {
      if (range_ahead()) return {range(), false};
      ++pos_;
      auto inner = alternation();
      expect(')');
      return {std::move(inner), false};
    }
    fail(c == '\0' ? std::string("unexpected end of expression")
                   : "unexpected '" + std::string(1, c) + "'");
  }

  SyntaxPtr literal() {
    expect('"');
    const auto end = src_.find('"', pos_);
    if (end == std::string_view::npos) fail("unterminated literal");
    std::string text(src_.substr(pos_, end - pos_));
    if (text.empty()) fail("empty literal");
    pos_ = end + 1;
    return make(Literal{std::move(text)});
  }

  SyntaxPtr named_type() {
    expect('<');
    const auto end = src_.find('>', pos_);
    if (end == std::string_view::npos) fail("unterminated type name");
    const std::string name(text::trim(src_.substr(pos_, end - pos_)));
    pos_ = end + 1;

    if (name == "Bool") return make(BoolFlag{});
    if (name == "Signals") return make(Enum{signal_names()});
    if (name == "HVPath") return make(PathValue{PathRole::Host});
    if (name == "CVPath") return make(PathValue{PathRole::Container});
    if (name == "List") {
      expect(':');
      return make(ListOf{element_syntax()});
    }
    if (name == "Continuous_range") {
      expect(':');
      if (!range_ahead()) fail("expected (lo, hi) after <Continuous_range>:");
      return range();
    }
    if ((name.size() >= 2) && (name[0] == 'U' || name[0] == 'I')) {
      const auto w = text::parse_u64(std::string_view(name).substr(1));
      if (!w || *w < 1 || *w > 64) fail("bit width out of range in <" + name + ">");
      if (name[0] == 'U') return make(UnsignedInt{static_cast<int>(*w)});
      return make(SignedInt{static_cast<int>(*w)});
    }
    fail("unknown type <" + name + ">");
  }

  SyntaxPtr element_syntax() {
    auto e = element();
    if (e.optional) {
      Compound c;
      c.parts.push_back({std::move(e.syntax), true});
      return make(std::move(c));
    }
    return std::move(e.syntax);
  }

  bool range_ahead() {
    std::size_t p = pos_;
    auto ws = [&] {
      while (p < src_.size() && std::isspace(static_cast<unsigned char>(src_[p]))) ++p;
    };
    ws();
    if (p >= src_.size() || src_[p] != '(') return false;
    ++p;
    ws();
    if (p < src_.size() && src_[p] == '-') ++p;
    return p < src_.size() && std::isdigit(static_cast<unsigned char>(src_[p]));
  }

  std::int64_t bound() {
    skip_ws();
    const std::size_t start = pos_;
    if (pos_ < src_.size() && src_[pos_] == 'U') {
      ++pos_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      const auto w = text::parse_u64(src_.substr(start + 1, pos_ - start - 1));
      if (!w || *w < 1 || *w > 62) fail("bad power-of-two bound");
      return std::int64_t{1} << *w;
    }
    if (pos_ < src_.size() && src_[pos_] == '-') ++pos_;
    while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    const auto v = text::parse_i64(src_.substr(start, pos_ - start));
    if (!v) fail("bad range bound");
    return *v;
  }

  SyntaxPtr range() {
    expect('(');
    const auto lo = bound();
    expect(',');
    const auto hi = bound();
    expect(')');
    if (lo >= hi) fail("empty range");
    return make(ContinuousRange{lo, hi});
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Matching
// ---------------------------------------------------------------------------

// First range/unit failure seen while matching; reported when no parse
// consumes the whole input.
struct Diagnostics {
  struct Range {
    std::string message, lo, hi;
  };
  struct Unit {
    std::string message, allowed;
  };
  std::optional<Range> range;
  std::optional<Unit> unit;
};

using Candidates = std::vector<std::pair<std::size_t, Value>>;

std::size_t digits_end(std::string_view s, std::size_t pos) {
  while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
  return pos;
}

std::size_t signed_end(std::string_view s, std::size_t pos) {
  const std::size_t start = pos;
  if (pos < s.size() && s[pos] == '-') ++pos;
  const auto e = digits_end(s, pos);
  return e == pos ? start : e;
}

void note_range(Diagnostics& d, std::string_view token, const std::string& lo, const std::string& hi) {
  if (!d.range) d.range = Diagnostics::Range{"value " + std::string(token) + " out of range", lo, hi};
}

Candidates match(const ValueSyntax& syntax, std::string_view s, std::size_t pos, Diagnostics& diag);

Candidates match_node(const BoolFlag&, std::string_view s, std::size_t pos, Diagnostics&) {
  Candidates out;
  if (s.substr(pos, 4) == "true") out.emplace_back(pos + 4, Value{true});
  if (s.substr(pos, 5) == "false") out.emplace_back(pos + 5, Value{false});
  if (pos == s.size()) out.emplace_back(pos, Value{true});
  return out;
}

Candidates match_node(const UnsignedInt& u, std::string_view s, std::size_t pos, Diagnostics& diag) {
  const auto end = digits_end(s, pos);
  if (end == pos) return {};
  const auto token = s.substr(pos, end - pos);
  const auto v = text::parse_u64(token);
  if (!v || *v > unsigned_max(u.bit_width)) {
    note_range(diag, token, "0", std::to_string(unsigned_max(u.bit_width)));
    return {};
  }
  return {{end, Value{*v}}};
}

Candidates match_signed(std::int64_t lo, std::int64_t hi, std::string_view s, std::size_t pos,
                        Diagnostics& diag) {
  const auto end = signed_end(s, pos);
  if (end == pos) return {};
  const auto token = s.substr(pos, end - pos);
  const auto v = text::parse_i64(token);
  if (!v || *v < lo || *v > hi) {
    note_range(diag, token, std::to_string(lo), std::to_string(hi));
    return {};
  }
  return {{end, Value{*v}}};
}

Candidates match_node(const SignedInt& i, std::string_view s, std::size_t pos, Diagnostics& diag) {
  return match_signed(signed_min(i.bit_width), signed_max(i.bit_width), s, pos, diag);
}

Candidates match_node(const ContinuousRange& r, std::string_view s, std::size_t pos, Diagnostics& diag) {
  return match_signed(r.lo, r.hi - 1, s, pos, diag);
}

Candidates match_node(const Enum& e, std::string_view s, std::size_t pos, Diagnostics&) {
  Candidates out;
  for (const auto& c : e.choices)
    if (s.substr(pos, c.size()) == c) out.emplace_back(pos + c.size(), Value{c});
  return out;
}

Candidates match_node(const Literal& l, std::string_view s, std::size_t pos, Diagnostics&) {
  if (s.substr(pos, l.text.size()) == l.text) return {{pos + l.text.size(), Value{l.text}}};
  return {};
}

Candidates match_node(const BytesWithUnit& b, std::string_view s, std::size_t pos, Diagnostics& diag) {
  auto mags = match_node(UnsignedInt{b.magnitude_bit_width}, s, pos, diag);
  if (mags.empty()) return {};
  const auto [end, mag] = mags.front();
  const auto magnitude = std::get<std::uint64_t>(mag.data);
  Candidates out;
  if (end < s.size() && std::isalpha(static_cast<unsigned char>(s[end]))) {
    if (b.unit_suffixes.find(s[end]) != std::string::npos) {
      out.emplace_back(end + 1, Value{Bytes{magnitude, s[end]}});
    } else if (!diag.unit) {
      diag.unit = Diagnostics::Unit{"unit suffix '" + std::string(1, s[end]) + "' not recognised", b.unit_suffixes};
    }
  } else if (!b.suffix_optional && !diag.unit) {
    diag.unit = Diagnostics::Unit{"missing unit suffix", b.unit_suffixes};
  }
  if (b.suffix_optional) out.emplace_back(end, Value{Bytes{magnitude, std::nullopt}});
  return out;
}

Candidates match_node(const PathValue&, std::string_view s, std::size_t pos, Diagnostics&) {
  if (pos >= s.size() || s[pos] != '/') return {};
  std::size_t end = pos;
  while (end < s.size() && s[end] != ':' && s[end] != ',' &&
         !std::isspace(static_cast<unsigned char>(s[end])))
    ++end;
  return {{end, Value{std::string(s.substr(pos, end - pos))}}};
}

Candidates match_node(const ListOf& l, std::string_view s, std::size_t pos, Diagnostics& diag) {
  Candidates out;
  std::vector<std::pair<std::size_t, Value::Items>> frontier{{pos, {}}};
  while (!frontier.empty()) {
    std::vector<std::pair<std::size_t, Value::Items>> next;
    for (auto& [p, items] : frontier) {
      for (auto& [end, v] : match(*l.element, s, p, diag)) {
        auto grown = items;
        grown.push_back(std::move(v));
        out.emplace_back(end, Value{grown});
        if (end < s.size() && s[end] == ',') next.emplace_back(end + 1, std::move(grown));
      }
    }
    frontier = std::move(next);
  }
  // Longest lists first so a full-input match is found early.
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  return out;
}

Candidates match_node(const Compound& c, std::string_view s, std::size_t pos, Diagnostics& diag) {
  std::vector<std::pair<std::size_t, Value::Items>> states{{pos, {}}};
  for (const auto& part : c.parts) {
    std::vector<std::pair<std::size_t, Value::Items>> next;
    for (auto& [p, items] : states) {
      for (auto& [end, v] : match(*part.syntax, s, p, diag)) {
        auto grown = items;
        grown.push_back(std::move(v));
        next.emplace_back(end, std::move(grown));
      }
      if (part.optional) {
        auto grown = items;
        grown.push_back(Value{});
        next.emplace_back(p, std::move(grown));
      }
    }
    states = std::move(next);
  }
  Candidates out;
  for (auto& [p, items] : states) out.emplace_back(p, Value{std::move(items)});
  return out;
}

Candidates match_node(const Choice& c, std::string_view s, std::size_t pos, Diagnostics& diag) {
  Candidates out;
  for (std::size_t i = 0; i < c.alternatives.size(); ++i)
    for (auto& [end, v] : match(*c.alternatives[i], s, pos, diag))
      out.emplace_back(end, Value{Value::Items{Value{std::uint64_t{i}}, std::move(v)}});
  return out;
}

Candidates match(const ValueSyntax& syntax, std::string_view s, std::size_t pos, Diagnostics& diag) {
  return std::visit([&](const auto& node) { return match_node(node, s, pos, diag); }, syntax.node);
}

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

template <typename T>
const T& payload_as(const Value& v) {
  const auto* p = std::get_if<T>(&v.data);
  if (!p) throw ContractError("payload does not match its syntax");
  return *p;
}

std::string render(const ValueSyntax& syntax, const Value& value);

struct RenderVisitor {
  const Value& value;

  std::string operator()(const BoolFlag&) const { return payload_as<bool>(value) ? "true" : "false"; }
  std::string operator()(const UnsignedInt&) const {
    return std::to_string(payload_as<std::uint64_t>(value));
  }
  std::string operator()(const SignedInt&) const { return std::to_string(payload_as<std::int64_t>(value)); }
  std::string operator()(const ContinuousRange&) const {
    return std::to_string(payload_as<std::int64_t>(value));
  }
  std::string operator()(const Enum&) const { return payload_as<std::string>(value); }
  std::string operator()(const Literal&) const { return payload_as<std::string>(value); }
  std::string operator()(const PathValue&) const { return payload_as<std::string>(value); }
  std::string operator()(const BytesWithUnit&) const {
    const auto& b = payload_as<Bytes>(value);
    std::string out = std::to_string(b.magnitude);
    if (b.unit) out += *b.unit;
    return out;
  }
  std::string operator()(const ListOf& l) const {
    std::vector<std::string> parts;
    for (const auto& item : payload_as<Value::Items>(value)) parts.push_back(render(*l.element, item));
    return text::join(parts, ",");
  }
  std::string operator()(const Compound& c) const {
    const auto& items = payload_as<Value::Items>(value);
    if (items.size() != c.parts.size()) throw ContractError("compound payload arity mismatch");
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (std::holds_alternative<std::monostate>(items[i].data)) {
        if (!c.parts[i].optional) throw ContractError("required compound part missing");
        continue;
      }
      out += render(*c.parts[i].syntax, items[i]);
    }
    return out;
  }
  std::string operator()(const Choice& c) const {
    const auto& items = payload_as<Value::Items>(value);
    if (items.size() != 2) throw ContractError("choice payload malformed");
    const auto branch = payload_as<std::uint64_t>(items[0]);
    if (branch >= c.alternatives.size()) throw ContractError("choice branch out of range");
    return render(*c.alternatives[branch], items[1]);
  }
};

std::string render(const ValueSyntax& syntax, const Value& value) {
  return std::visit(RenderVisitor{value}, syntax.node);
}

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

Value sample(const ValueSyntax& syntax, Rng& rng, const SamplerConfig& cfg);

struct SampleVisitor {
  Rng& rng;
  const SamplerConfig& cfg;

  Value operator()(const BoolFlag&) const { return Value{rng.coin()}; }
  Value operator()(const UnsignedInt& u) const { return Value{rng.uniform_u64(0, unsigned_max(u.bit_width))}; }
  Value operator()(const SignedInt& i) const {
    return Value{rng.uniform_i64(signed_min(i.bit_width), signed_max(i.bit_width))};
  }
  Value operator()(const ContinuousRange& r) const { return Value{rng.uniform_i64(r.lo, r.hi - 1)}; }
  Value operator()(const Enum& e) const { return Value{e.choices[rng.index(e.choices.size())]}; }
  Value operator()(const Literal& l) const { return Value{l.text}; }
  Value operator()(const PathValue& p) const {
    const auto& pool = p.role == PathRole::Host ? cfg.host_paths : cfg.container_paths;
    if (pool.empty()) throw ContractError("empty path pool");
    return Value{pool[rng.index(pool.size())]};
  }
  Value operator()(const BytesWithUnit& b) const {
    Bytes out{rng.uniform_u64(0, unsigned_max(b.magnitude_bit_width)), std::nullopt};
    const std::size_t n = b.unit_suffixes.size();
    if (b.suffix_optional) {
      const auto k = rng.index(n + 1);
      if (k < n) out.unit = b.unit_suffixes[k];
    } else {
      out.unit = b.unit_suffixes[rng.index(n)];
    }
    return Value{out};
  }
  Value operator()(const ListOf& l) const {
    const auto len = rng.uniform_u64(1, std::max<std::size_t>(1, cfg.list_max));
    Value::Items items;
    for (std::uint64_t i = 0; i < len; ++i) items.push_back(sample(*l.element, rng, cfg));
    return Value{items};
  }
  Value operator()(const Compound& c) const {
    Value::Items items;
    for (const auto& part : c.parts) {
      if (part.optional && !rng.coin())
        items.push_back(Value{});
      else
        items.push_back(sample(*part.syntax, rng, cfg));
    }
    return Value{items};
  }
  Value operator()(const Choice& c) const {
    const auto branch = rng.index(c.alternatives.size());
    return Value{Value::Items{Value{std::uint64_t{branch}}, sample(*c.alternatives[branch], rng, cfg)}};
  }
};

Value sample(const ValueSyntax& syntax, Rng& rng, const SamplerConfig& cfg) {
  return std::visit(SampleVisitor{rng, cfg}, syntax.node);
}

std::optional<long double> numeric(const ValueSyntax& syntax, const Value& value) {
  if (const auto* u = std::get_if<std::uint64_t>(&value.data)) return static_cast<long double>(*u);
  if (const auto* i = std::get_if<std::int64_t>(&value.data)) return static_cast<long double>(*i);
  if (const auto* b = std::get_if<Bytes>(&value.data)) {
    long double scale = 1;
    if (b->unit == 'k') scale = 1024.0L;
    if (b->unit == 'm') scale = 1024.0L * 1024.0L;
    if (b->unit == 'g') scale = 1024.0L * 1024.0L * 1024.0L;
    return static_cast<long double>(b->magnitude) * scale;
  }
  if (const auto* s = std::get_if<std::string>(&value.data)) {
    if (auto v = text::parse_i64(*s)) return static_cast<long double>(*v);
    return std::nullopt;
  }
  if (const auto* c = std::get_if<Choice>(&syntax.node)) {
    const auto& items = payload_as<Value::Items>(value);
    return numeric(*c->alternatives.at(payload_as<std::uint64_t>(items.at(0))), items.at(1));
  }
  return std::nullopt;
}

}  // namespace

// ---------------------------------------------------------------------------

SyntaxPtr parse_syntax(std::string_view expression) { return SyntaxParser(expression).parse(); }

std::string describe(const ValueSyntax& syntax) {
  struct V {
    std::string operator()(const BoolFlag&) const { return "<Bool>"; }
    std::string operator()(const UnsignedInt& u) const { return "<U" + std::to_string(u.bit_width) + ">"; }
    std::string operator()(const SignedInt& i) const { return "<I" + std::to_string(i.bit_width) + ">"; }
    std::string operator()(const ContinuousRange& r) const {
      return "(" + std::to_string(r.lo) + ", " + std::to_string(r.hi) + ")";
    }
    std::string operator()(const Enum& e) const {
      if (e.choices == signal_names()) return "<Signals>";
      std::vector<std::string> q;
      for (const auto& c : e.choices) q.push_back("\"" + c + "\"");
      return "(" + text::join(q, " | ") + ")";
    }
    std::string operator()(const BytesWithUnit& b) const {
      std::vector<std::string> q;
      for (char c : b.unit_suffixes) q.push_back("\"" + std::string(1, c) + "\"");
      const std::string units = "(" + text::join(q, " | ") + ")";
      return "<U" + std::to_string(b.magnitude_bit_width) + "> " +
             (b.suffix_optional ? "[" + units + "]" : units);
    }
    std::string operator()(const ListOf& l) const { return "<List>:(" + describe(*l.element) + ")"; }
    std::string operator()(const Literal& l) const { return "\"" + l.text + "\""; }
    std::string operator()(const PathValue& p) const {
      return p.role == PathRole::Host ? "<HVPath>" : "<CVPath>";
    }
    std::string operator()(const Compound& c) const {
      std::vector<std::string> parts;
      for (const auto& p : c.parts) {
        auto d = describe(*p.syntax);
        parts.push_back(p.optional ? "[" + d + "]" : d);
      }
      return text::join(parts, " ");
    }
    std::string operator()(const Choice& c) const {
      std::vector<std::string> parts;
      for (const auto& a : c.alternatives) parts.push_back(describe(*a));
      return text::join(parts, " | ");
    }
  };
  return std::visit(V{}, syntax.node);
}

std::string OptionValue::raw() const { return render(*spec->syntax, payload); }

void OptionCatalog::add(OptionSpec spec) {
  if (specs_.count(spec.name)) throw ConflictError("duplicate option '" + spec.name + "' in catalog");
  auto name = spec.name;
  specs_.emplace(std::move(name), std::make_shared<const OptionSpec>(std::move(spec)));
}

const OptionSpecPtr& OptionCatalog::at(std::string_view name) const {
  const auto it = specs_.find(name);
  if (it == specs_.end()) throw LookupError("unknown option '" + std::string(name) + "'");
  return it->second;
}

OptionSpecPtr OptionCatalog::find(std::string_view name) const {
  const auto it = specs_.find(name);
  return it == specs_.end() ? nullptr : it->second;
}

OptionCatalog load_catalog(std::istream& document) {
  OptionCatalog catalog;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(document, line)) {
    ++line_no;
    const auto trimmed = text::trim(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    auto fields = text::split(trimmed, '\t');
    if (fields.size() != 3)
      throw ParseError("catalog line " + std::to_string(line_no) +
                       ": expected name<TAB>category<TAB>syntax");
    OptionSpec spec;
    spec.name = std::string(text::trim(fields[0]));
    spec.category = std::string(text::trim(fields[1]));
    if (spec.name.empty()) throw ParseError("catalog line " + std::to_string(line_no) + ": empty name");
    try {
      spec.syntax = parse_syntax(text::trim(fields[2]));
    } catch (const ParseError& e) {
      throw ParseError("option '" + spec.name + "' (catalog line " + std::to_string(line_no) +
                       "): " + e.what());
    }
    catalog.add(std::move(spec));
  }
  return catalog;
}

OptionCatalog load_catalog_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open catalog '" + path + "'");
  return load_catalog(in);
}

OptionValue validate_value(const OptionSpecPtr& spec, std::string_view candidate) {
  Diagnostics diag;
  for (auto& [end, v] : match(*spec->syntax, candidate, 0, diag))
    if (end == candidate.size()) return OptionValue{spec, std::move(v)};
  const std::string where = " for option '" + spec->name + "'";
  if (diag.range) throw RangeError(diag.range->message + where, diag.range->lo, diag.range->hi);
  if (diag.unit) throw UnitError(diag.unit->message + where, diag.unit->allowed);
  throw ParseError("'" + std::string(candidate) + "' does not match " + describe(*spec->syntax) + where);
}

OptionValue sample_value(const OptionSpecPtr& spec, std::uint64_t seed, const SamplerConfig& config) {
  Rng rng(seed);
  return OptionValue{spec, sample(*spec->syntax, rng, config)};
}

std::string render_flag(const OptionValue& value) {
  const auto& spec = *value.spec;
  const std::string prefix = "--" + spec.name;
  if (std::holds_alternative<BoolFlag>(spec.syntax->node))
    return payload_as<bool>(value.payload) ? prefix : prefix + "=false";
  if (const auto* list = std::get_if<ListOf>(&spec.syntax->node)) {
    std::vector<std::string> flags;
    for (const auto& item : payload_as<Value::Items>(value.payload))
      flags.push_back(prefix + "=" + render(*list->element, item));
    return text::join(flags, " ");
  }
  return prefix + "=" + value.raw();
}

std::string flag_argument(const OptionSpec& spec, std::string_view rendered) {
  const std::string prefix = "--" + spec.name;
  std::vector<std::string> args;
  for (const auto& tok : text::split(text::trim(rendered), ' ')) {
    if (tok.empty()) continue;
    if (tok == prefix) {
      args.emplace_back();
    } else if (tok.rfind(prefix + "=", 0) == 0) {
      args.push_back(tok.substr(prefix.size() + 1));
    } else {
      throw ParseError("'" + tok + "' is not a flag for option '" + spec.name + "'");
    }
  }
  if (args.empty()) throw ParseError("no flag for option '" + spec.name + "'");
  if (args.size() > 1 && !std::holds_alternative<ListOf>(spec.syntax->node))
    throw ParseError("option '" + spec.name + "' given more than once");
  return text::join(args, ",");
}

OptionValue parse_flag(const OptionCatalog& catalog, std::string_view flag) {
  flag = text::trim(flag);
  if (flag.substr(0, 2) != "--") throw ParseError("expected --option[=value], got '" + std::string(flag) + "'");
  const auto body = flag.substr(2);
  const auto eq = body.find('=');
  const auto& spec = catalog.at(body.substr(0, eq));
  if (eq == std::string_view::npos && !std::holds_alternative<BoolFlag>(spec->syntax->node))
    throw ParseError("option '" + spec->name + "' requires a value");
  return validate_value(spec, eq == std::string_view::npos ? std::string_view{} : body.substr(eq + 1));
}

std::optional<IntegerDomain> integer_domain(const ValueSyntax& syntax) {
  if (const auto* u = std::get_if<UnsignedInt>(&syntax.node))
    return IntegerDomain{0, static_cast<std::int64_t>(std::min<std::uint64_t>(unsigned_max(u->bit_width), kInt64Max))};
  if (const auto* i = std::get_if<SignedInt>(&syntax.node))
    return IntegerDomain{signed_min(i->bit_width), signed_max(i->bit_width)};
  if (const auto* r = std::get_if<ContinuousRange>(&syntax.node)) return IntegerDomain{r->lo, r->hi - 1};
  if (const auto* b = std::get_if<BytesWithUnit>(&syntax.node))
    return IntegerDomain{0, static_cast<std::int64_t>(std::min<std::uint64_t>(unsigned_max(b->magnitude_bit_width), kInt64Max))};
  return std::nullopt;
}

OptionValue integer_value(const OptionSpecPtr& spec, std::int64_t v) {
  const auto domain = integer_domain(*spec->syntax);
  if (!domain) throw ContractError("option '" + spec->name + "' is not integer-typed");
  if (v < domain->lo || v > domain->hi)
    throw RangeError("value " + std::to_string(v) + " out of range for option '" + spec->name + "'",
                     std::to_string(domain->lo), std::to_string(domain->hi));
  const auto& node = spec->syntax->node;
  if (std::holds_alternative<UnsignedInt>(node)) return {spec, Value{static_cast<std::uint64_t>(v)}};
  if (std::holds_alternative<BytesWithUnit>(node)) return {spec, Value{Bytes{static_cast<std::uint64_t>(v), std::nullopt}}};
  return {spec, Value{v}};
}

std::optional<long double> numeric_payload(const OptionValue& value) {
  return numeric(*value.spec->syntax, value.payload);
}

}  // namespace beacon
