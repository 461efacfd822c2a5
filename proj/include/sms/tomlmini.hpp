#pragma once

#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace sms::toml {

/// Minimal TOML reader/writer covering the subset the model and scenario
/// files use: `[table]` / `[[array-of-tables]]` headers, `key = value`
/// pairs, numbers, booleans, quoted strings, single-line arrays of
/// scalars, and `#` comments.  No dates, inline tables, or dotted keys.

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class Value;
using Array = std::vector<Value>;

class Table {
 public:
  bool has(const std::string& key) const;
  const Value& at(const std::string& key) const;  // throws ParseError if absent
  Value* find(const std::string& key);
  Value& insert(const std::string& key);          // appends or returns existing
  const std::vector<std::pair<std::string, Value>>& entries() const { return entries_; }

 private:
  std::vector<std::pair<std::string, Value>> entries_;  // insertion-ordered
};

class Value {
 public:
  enum class Kind { Number, Boolean, String, Array, Table };

  Value() : data_(0.0) {}
  explicit Value(double v) : data_(v) {}
  explicit Value(bool v) : data_(v) {}
  explicit Value(std::string v) : data_(std::move(v)) {}
  explicit Value(Array v) : data_(std::move(v)) {}
  explicit Value(Table v) : data_(std::move(v)) {}

  Kind kind() const { return static_cast<Kind>(data_.index()); }
  bool is_table() const { return kind() == Kind::Table; }
  bool is_array() const { return kind() == Kind::Array; }

  double as_number() const;
  bool as_bool() const;
  const std::string& as_string() const;
  const Array& as_array() const;
  Array& as_array();
  const Table& as_table() const;
  Table& as_table();

  std::vector<double> as_number_array() const;

 private:
  std::variant<double, bool, std::string, Array, Table> data_;
};

/// Parses TOML text into a root table.  `origin` names the source in errors.
Value parse(const std::string& text, const std::string& origin = "<string>");
Value parse_file(const std::string& path);

/// Serializes a table tree back to TOML text.  Numbers are printed with 17
/// significant digits, so a write/parse round trip is value-exact.
std::string write(const Value& root);

}  // namespace sms::toml
