#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace beacon {

// ---------------------------------------------------------------------------
// Value grammar
//
// A ValueSyntax is the formal value space of one container-launch option,
// written in the catalog with the notation
//
//   <Bool> <U18> <I11> <U32>["b"|"k"|"m"|"g"] (1000, 1000000)
//   <List>:(<Continuous_range>:(0, U16) ":" <Continuous_range>:(0, U16)
//           ["/"("tcp" | "udp")])
//
// Every syntax denotes a finite value space.
// ---------------------------------------------------------------------------

struct ValueSyntax;
using SyntaxPtr = std::shared_ptr<const ValueSyntax>;

struct BoolFlag {};

// Integers in [0, 2^bit_width).
struct UnsignedInt {
  int bit_width = 32;
};

// Integers in [-2^(bit_width-1), 2^(bit_width-1)).
struct SignedInt {
  int bit_width = 32;
};

// Integers in [lo, hi): inclusive low, exclusive high.
struct ContinuousRange {
  std::int64_t lo = 0;
  std::int64_t hi = 0;
};

struct Enum {
  std::vector<std::string> choices;
};

// Unsigned magnitude followed by a single-character unit suffix.
struct BytesWithUnit {
  int magnitude_bit_width = 32;
  std::string unit_suffixes;
  bool suffix_optional = true;
};

// Comma-separated on the command line; one repeated flag per element.
struct ListOf {
  SyntaxPtr element;
};

struct Literal {
  std::string text;
};

enum class PathRole { Host, Container };

// Absolute path without ':' or whitespace; sampled from a configured pool.
struct PathValue {
  PathRole role = PathRole::Container;
};

struct Compound {
  struct Part {
    SyntaxPtr syntax;
    bool optional = false;
  };
  std::vector<Part> parts;
};

// Alternation that is not a plain enum, e.g. `"-1" | <U22>`.
struct Choice {
  std::vector<SyntaxPtr> alternatives;
};

struct ValueSyntax {
  std::variant<BoolFlag, UnsignedInt, SignedInt, ContinuousRange, Enum, BytesWithUnit, ListOf,
               Literal, PathValue, Compound, Choice>
      node;
};

// Parses one syntax expression. Throws ParseError.
SyntaxPtr parse_syntax(std::string_view expression);

// Canonical text of a syntax, in catalog notation.
std::string describe(const ValueSyntax& syntax);

// ---------------------------------------------------------------------------
// Values
// ---------------------------------------------------------------------------

struct Bytes {
  std::uint64_t magnitude = 0;
  std::optional<char> unit;
  bool operator==(const Bytes&) const = default;
};

// Typed payload. The alternative held depends on the syntax:
//   BoolFlag -> bool, UnsignedInt -> uint64, SignedInt/ContinuousRange -> int64,
//   Enum/Literal/PathValue -> string, BytesWithUnit -> Bytes,
//   ListOf/Compound -> Items (absent optional part = monostate),
//   Choice -> Items{uint64 branch index, branch payload}.
struct Value {
  using Items = std::vector<Value>;
  std::variant<std::monostate, bool, std::uint64_t, std::int64_t, std::string, Bytes, Items> data;

  bool operator==(const Value&) const = default;
};

// ---------------------------------------------------------------------------
// Options and catalog
// ---------------------------------------------------------------------------

struct OptionSpec {
  std::string name;
  std::string category;
  SyntaxPtr syntax;
};

using OptionSpecPtr = std::shared_ptr<const OptionSpec>;

struct OptionValue {
  OptionSpecPtr spec;
  Value payload;

  const std::string& spec_name() const { return spec->name; }
  // Canonical argument text, e.g. "512m" or "8080:80/tcp".
  std::string raw() const;

  bool operator==(const OptionValue& other) const {
    return spec_name() == other.spec_name() && payload == other.payload;
  }
};

class OptionCatalog {
 public:
  void add(OptionSpec spec);  // ConflictError on duplicate names

  const OptionSpecPtr& at(std::string_view name) const;  // LookupError
  OptionSpecPtr find(std::string_view name) const;
  bool contains(std::string_view name) const { return find(name) != nullptr; }
  std::size_t size() const { return specs_.size(); }

  const std::map<std::string, OptionSpecPtr, std::less<>>& specs() const { return specs_; }

 private:
  std::map<std::string, OptionSpecPtr, std::less<>> specs_;
};

// Reads the line-oriented catalog format: `name<TAB>category<TAB>syntax`,
// `#` comment lines and blank lines ignored.
OptionCatalog load_catalog(std::istream& document);
OptionCatalog load_catalog_file(const std::string& path);

// Accepts the candidate iff it lies in the option's value space. Throws
// RangeError, UnitError or ParseError.
OptionValue validate_value(const OptionSpecPtr& spec, std::string_view candidate);

struct SamplerConfig {
  std::size_t list_max = 4;
  std::vector<std::string> host_paths = {"/srv/beacon/data", "/tmp/beacon", "/var/lib/beacon"};
  std::vector<std::string> container_paths = {"/data", "/var/lib/app", "/mnt/volume"};
};

// Uniform draw over the value space; a pure function of (spec, seed, config).
OptionValue sample_value(const OptionSpecPtr& spec, std::uint64_t seed,
                         const SamplerConfig& config = {});

// Canonical command-line fragment: `--memory=512m`, `--detach`,
// `--detach=false`; lists render as one repeated flag per element.
std::string render_flag(const OptionValue& value);

// Inverse of the flag prefix added by render_flag: returns the argument text
// that validate_value accepts. Throws ParseError on a foreign flag.
std::string flag_argument(const OptionSpec& spec, std::string_view rendered);

// Parses `--name[=value]` against the catalog.
OptionValue parse_flag(const OptionCatalog& catalog, std::string_view flag);

// Integer view used by value mutation: the legal interval of an integer-typed
// option (UnsignedInt, SignedInt, ContinuousRange, BytesWithUnit magnitude),
// clamped to int64.
struct IntegerDomain {
  std::int64_t lo = 0;
  std::int64_t hi = 0;
};
std::optional<IntegerDomain> integer_domain(const ValueSyntax& syntax);
OptionValue integer_value(const OptionSpecPtr& spec, std::int64_t v);

// Numeric reading of an integer-like payload; byte units are scaled
// (b=1, k=2^10, m=2^20, g=2^30).
std::optional<long double> numeric_payload(const OptionValue& value);

}  // namespace beacon
