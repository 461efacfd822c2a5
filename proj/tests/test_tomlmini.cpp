#include <doctest.h>

#include "sms/tomlmini.hpp"

using namespace sms;

TEST_CASE("parses scalars, arrays, and comments") {
  const auto root = toml::parse(R"(
# header comment
title = "hello \"world\""
count = 42
ratio = -0.125
flag = true
empty = []
nums = [1.0, 2.5, -3.0]   # trailing comment
)");
  const toml::Table& t = root.as_table();
  CHECK(t.at("title").as_string() == "hello \"world\"");
  CHECK(t.at("count").as_number() == 42.0);
  CHECK(t.at("ratio").as_number() == -0.125);
  CHECK(t.at("flag").as_bool() == true);
  CHECK(t.at("empty").as_array().empty());
  const auto nums = t.at("nums").as_number_array();
  REQUIRE(nums.size() == 3);
  CHECK(nums[1] == 2.5);
}

TEST_CASE("parses tables and arrays of tables") {
  const auto root = toml::parse(R"(
format = "x"

[alpha]
a = 1

[alpha.inner]
b = 2

[[item]]
name = "first"

[[item]]
name = "second"
)");
  const toml::Table& t = root.as_table();
  CHECK(t.at("alpha").as_table().at("a").as_number() == 1.0);
  CHECK(t.at("alpha").as_table().at("inner").as_table().at("b").as_number() == 2.0);
  const toml::Array& items = t.at("item").as_array();
  REQUIRE(items.size() == 2);
  CHECK(items[0].as_table().at("name").as_string() == "first");
  CHECK(items[1].as_table().at("name").as_string() == "second");
}

TEST_CASE("rejects malformed input") {
  CHECK_THROWS_AS(toml::parse("key"), toml::ParseError);
  CHECK_THROWS_AS(toml::parse("key = "), toml::ParseError);
  CHECK_THROWS_AS(toml::parse("[unclosed"), toml::ParseError);
  CHECK_THROWS_AS(toml::parse("a = [1, 2"), toml::ParseError);
  CHECK_THROWS_AS(toml::parse("a = \"no end"), toml::ParseError);
  CHECK_THROWS_AS(toml::parse("a = 1\na = 2"), toml::ParseError);
}

TEST_CASE("missing keys and kind mismatches throw") {
  auto root = toml::parse("a = 1");
  CHECK_THROWS_AS(root.as_table().at("missing"), toml::ParseError);
  CHECK_THROWS(root.as_table().at("a").as_string());
  CHECK(root.as_table().find("missing") == nullptr);
  CHECK(root.as_table().has("a"));
}

TEST_CASE("write/parse round trip is value-exact") {
  // Doubles that don't have short decimal forms must survive exactly.
  toml::Table t;
  t.insert("third") = toml::Value(1.0 / 3.0);
  t.insert("tiny") = toml::Value(4.9406564584124654e-324);
  t.insert("big") = toml::Value(1.7976931348623157e308);
  t.insert("neg") = toml::Value(-0.1);
  t.insert("text") = toml::Value(std::string("line\\path \"q\""));
  toml::Array arr;
  arr.push_back(toml::Value(0.1));
  arr.push_back(toml::Value(true));
  t.insert("mix") = toml::Value(arr);
  toml::Table inner;
  inner.insert("x") = toml::Value(2.5);
  t.insert("sub") = toml::Value(inner);

  const std::string text = toml::write(toml::Value(t));
  const auto back = toml::parse(text);
  const toml::Table& b = back.as_table();
  CHECK(b.at("third").as_number() == 1.0 / 3.0);
  CHECK(b.at("tiny").as_number() == 4.9406564584124654e-324);
  CHECK(b.at("big").as_number() == 1.7976931348623157e308);
  CHECK(b.at("neg").as_number() == -0.1);
  CHECK(b.at("text").as_string() == "line\\path \"q\"");
  CHECK(b.at("mix").as_array()[0].as_number() == 0.1);
  CHECK(b.at("mix").as_array()[1].as_bool() == true);
  CHECK(b.at("sub").as_table().at("x").as_number() == 2.5);

  // Serialization is deterministic.
  CHECK(toml::write(back) == text);
}

TEST_CASE("insertion order is preserved") {
  const auto root = toml::parse("z = 1\na = 2\nm = 3");
  const auto& entries = root.as_table().entries();
  REQUIRE(entries.size() == 3);
  CHECK(entries[0].first == "z");
  CHECK(entries[1].first == "a");
  CHECK(entries[2].first == "m");
}
