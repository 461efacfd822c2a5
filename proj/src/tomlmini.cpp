#include "sms/tomlmini.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace sms::toml {

bool Table::has(const std::string& key) const {
  for (const auto& [k, v] : entries_)
    if (k == key) return true;
  return false;
}

const Value& Table::at(const std::string& key) const {
  for (const auto& [k, v] : entries_)
    if (k == key) return v;
  throw ParseError("missing key '" + key + "'");
}

Value* Table::find(const std::string& key) {
  for (auto& [k, v] : entries_)
    if (k == key) return &v;
  return nullptr;
}

Value& Table::insert(const std::string& key) {
  if (Value* v = find(key)) return *v;
  entries_.emplace_back(key, Value{});
  return entries_.back().second;
}

namespace {
[[noreturn]] void kind_error(const char* want) {
  throw ParseError(std::string("value is not a ") + want);
}
}  // namespace

double Value::as_number() const {
  if (auto* v = std::get_if<double>(&data_)) return *v;
  kind_error("number");
}
bool Value::as_bool() const {
  if (auto* v = std::get_if<bool>(&data_)) return *v;
  kind_error("boolean");
}
const std::string& Value::as_string() const {
  if (auto* v = std::get_if<std::string>(&data_)) return *v;
  kind_error("string");
}
const Array& Value::as_array() const {
  if (auto* v = std::get_if<Array>(&data_)) return *v;
  kind_error("array");
}
Array& Value::as_array() {
  if (auto* v = std::get_if<Array>(&data_)) return *v;
  kind_error("array");
}
const Table& Value::as_table() const {
  if (auto* v = std::get_if<Table>(&data_)) return *v;
  kind_error("table");
}
Table& Value::as_table() {
  if (auto* v = std::get_if<Table>(&data_)) return *v;
  kind_error("table");
}

std::vector<double> Value::as_number_array() const {
  std::vector<double> out;
  for (const auto& v : as_array()) out.push_back(v.as_number());
  return out;
}

namespace {

struct Cursor {
  const std::string& text;
  size_t pos = 0;
  int line = 1;
  std::string origin;

  [[noreturn]] void fail(const std::string& msg) const {
    std::ostringstream s;
    s << origin << ":" << line << ": " << msg;
    throw ParseError(s.str());
  }
  bool eof() const { return pos >= text.size(); }
  char peek() const { return text[pos]; }
  char take() {
    char c = text[pos++];
    if (c == '\n') ++line;
    return c;
  }
  void skip_ws() {
    while (!eof() && (peek() == ' ' || peek() == '\t')) ++pos;
  }
  void skip_ws_and_comment() {
    skip_ws();
    if (!eof() && peek() == '#') {
      while (!eof() && peek() != '\n') ++pos;
    }
  }
  void expect_line_end() {
    skip_ws_and_comment();
    if (eof()) return;
    if (peek() != '\n' && peek() != '\r') fail("unexpected trailing characters");
    while (!eof() && (peek() == '\n' || peek() == '\r')) take();
  }
};

bool is_bare_key_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

std::string parse_key(Cursor& cur) {
  cur.skip_ws();
  std::string key;
  while (!cur.eof() && is_bare_key_char(cur.peek())) key += cur.take();
  if (key.empty()) cur.fail("expected a key");
  return key;
}

std::string parse_quoted(Cursor& cur) {
  cur.take();  // opening quote
  std::string out;
  while (true) {
    if (cur.eof() || cur.peek() == '\n') cur.fail("unterminated string");
    char c = cur.take();
    if (c == '"') break;
    if (c == '\\') {
      if (cur.eof()) cur.fail("unterminated escape");
      char e = cur.take();
      switch (e) {
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        case '"': out += '"'; break;
        case '\\': out += '\\'; break;
        default: cur.fail(std::string("unsupported escape \\") + e);
      }
    } else {
      out += c;
    }
  }
  return out;
}

Value parse_scalar(Cursor& cur) {
  cur.skip_ws();
  if (cur.eof()) cur.fail("expected a value");
  char c = cur.peek();
  if (c == '"') return Value(parse_quoted(cur));
  std::string tok;
  while (!cur.eof() && cur.peek() != ',' && cur.peek() != ']' && cur.peek() != '\n' &&
         cur.peek() != '\r' && cur.peek() != '#') {
    tok += cur.take();
  }
  while (!tok.empty() && (tok.back() == ' ' || tok.back() == '\t')) tok.pop_back();
  if (tok == "true") return Value(true);
  if (tok == "false") return Value(false);
  double num = 0.0;
  const char* begin = tok.data();
  const char* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(begin, end, num);
  if (ec != std::errc{} || ptr != end) cur.fail("cannot parse value '" + tok + "'");
  return Value(num);
}

Value parse_value(Cursor& cur) {
  cur.skip_ws();
  if (cur.eof()) cur.fail("expected a value");
  if (cur.peek() != '[') return parse_scalar(cur);
  cur.take();  // '['
  Array arr;
  cur.skip_ws();
  if (!cur.eof() && cur.peek() == ']') {
    cur.take();
    return Value(std::move(arr));
  }
  while (true) {
    arr.push_back(parse_scalar(cur));
    cur.skip_ws();
    if (cur.eof()) cur.fail("unterminated array");
    char c = cur.take();
    if (c == ']') break;
    if (c != ',') cur.fail("expected ',' or ']' in array");
    cur.skip_ws();
    if (!cur.eof() && cur.peek() == ']') {  // trailing comma
      cur.take();
      break;
    }
  }
  return Value(std::move(arr));
}

std::vector<std::string> parse_table_path(Cursor& cur) {
  std::vector<std::string> path;
  while (true) {
    path.push_back(parse_key(cur));
    cur.skip_ws();
    if (cur.eof()) cur.fail("unterminated table header");
    if (cur.peek() == '.') {
      cur.take();
      continue;
    }
    break;
  }
  return path;
}

Table* descend(Table* root, const std::vector<std::string>& path, Cursor& cur,
               bool array_of_tables) {
  Table* t = root;
  for (size_t i = 0; i < path.size(); ++i) {
    const bool last = (i + 1 == path.size());
    Value* slot = t->find(path[i]);
    if (!slot) {
      slot = &t->insert(path[i]);
      *slot = (last && array_of_tables) ? Value(Array{}) : Value(Table{});
    }
    if (last && array_of_tables) {
      if (!slot->is_array()) cur.fail("'" + path[i] + "' is not an array of tables");
      slot->as_array().push_back(Value(Table{}));
      return &slot->as_array().back().as_table();
    }
    if (slot->is_array()) {
      if (slot->as_array().empty() || !slot->as_array().back().is_table())
        cur.fail("'" + path[i] + "' is not a table");
      t = &slot->as_array().back().as_table();
    } else if (slot->is_table()) {
      t = &slot->as_table();
    } else {
      cur.fail("'" + path[i] + "' is not a table");
    }
  }
  return t;
}

}  // namespace

Value parse(const std::string& text, const std::string& origin) {
  Cursor cur{text, 0, 1, origin};
  Value root{Table{}};
  Table* current = &root.as_table();

  while (!cur.eof()) {
    cur.skip_ws_and_comment();
    if (cur.eof()) break;
    char c = cur.peek();
    if (c == '\n' || c == '\r') {
      cur.take();
      continue;
    }
    if (c == '[') {
      cur.take();
      bool array_of_tables = false;
      if (!cur.eof() && cur.peek() == '[') {
        cur.take();
        array_of_tables = true;
      }
      auto path = parse_table_path(cur);
      if (cur.eof() || cur.take() != ']') cur.fail("expected ']'");
      if (array_of_tables && (cur.eof() || cur.take() != ']')) cur.fail("expected ']]'");
      current = descend(&root.as_table(), path, cur, array_of_tables);
      cur.expect_line_end();
      continue;
    }
    std::string key = parse_key(cur);
    cur.skip_ws();
    if (cur.eof() || cur.take() != '=') cur.fail("expected '=' after key '" + key + "'");
    Value v = parse_value(cur);
    if (current->has(key)) cur.fail("duplicate key '" + key + "'");
    current->insert(key) = std::move(v);
    cur.expect_line_end();
  }
  return root;
}

Value parse_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

namespace {

std::string format_scalar(const Value& v) {
  switch (v.kind()) {
    case Value::Kind::Number: {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.17g", v.as_number());
      return buf;
    }
    case Value::Kind::Boolean:
      return v.as_bool() ? "true" : "false";
    case Value::Kind::String: {
      std::string out = "\"";
      for (char c : v.as_string()) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
      }
      out += '"';
      return out;
    }
    default:
      throw ParseError("cannot format nested value as scalar");
  }
}

bool is_array_of_tables(const Value& v) {
  return v.is_array() && !v.as_array().empty() && v.as_array().front().is_table();
}

void write_table(const Table& t, const std::string& path, std::ostream& out) {
  // Scalars and plain arrays first, then subtables.
  for (const auto& [key, value] : t.entries()) {
    if (value.is_table() || is_array_of_tables(value)) continue;
    out << key << " = ";
    if (value.is_array()) {
      out << "[";
      const auto& arr = value.as_array();
      for (size_t i = 0; i < arr.size(); ++i) {
        if (i) out << ", ";
        out << format_scalar(arr[i]);
      }
      out << "]";
    } else {
      out << format_scalar(value);
    }
    out << "\n";
  }
  for (const auto& [key, value] : t.entries()) {
    const std::string sub = path.empty() ? key : path + "." + key;
    if (value.is_table()) {
      out << "\n[" << sub << "]\n";
      write_table(value.as_table(), sub, out);
    } else if (is_array_of_tables(value)) {
      for (const auto& elem : value.as_array()) {
        out << "\n[[" << sub << "]]\n";
        write_table(elem.as_table(), sub, out);
      }
    }
  }
}

}  // namespace

std::string write(const Value& root) {
  std::ostringstream out;
  write_table(root.as_table(), "", out);
  return out.str();
}

}  // namespace sms::toml
