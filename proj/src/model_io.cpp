#include "sms/model_io.hpp"

#include <fstream>
#include <sstream>

namespace sms {

namespace {

using toml::Table;
using toml::Value;

[[noreturn]] void fail(const std::string& origin, const std::string& msg) {
  throw ModelParseError(origin + ": " + msg);
}

double get_number(const Table& t, const std::string& key, const std::string& origin) {
  if (!t.has(key)) fail(origin, "missing key '" + key + "'");
  return t.at(key).as_number();
}

Vec3 get_vec3(const Table& t, const std::string& key, const std::string& origin) {
  if (!t.has(key)) fail(origin, "missing key '" + key + "'");
  const auto v = t.at(key).as_number_array();
  if (v.size() != 3) fail(origin, "'" + key + "' must have 3 entries");
  return {v[0], v[1], v[2]};
}

Vec3 get_vec3_or(const Table& t, const std::string& key, const Vec3& fallback,
                 const std::string& origin) {
  return t.has(key) ? get_vec3(t, key, origin) : fallback;
}

// Either [ixx, iyy, izz] or [ixx, iyy, izz, ixy, ixz, iyz].
Mat3 get_inertia(const Table& t, const std::string& origin) {
  if (!t.has("inertia")) fail(origin, "missing key 'inertia'");
  const auto v = t.at("inertia").as_number_array();
  Mat3 inertia = Mat3::Zero();
  if (v.size() == 3) {
    inertia.diagonal() << v[0], v[1], v[2];
  } else if (v.size() == 6) {
    inertia << v[0], v[3], v[4],
               v[3], v[1], v[5],
               v[4], v[5], v[2];
  } else {
    fail(origin, "'inertia' must have 3 (diagonal) or 6 (symmetric) entries");
  }
  return inertia;
}

ArmModel parse_arm(const Table& root, const std::string& key, const std::string& origin) {
  if (!root.has(key)) fail(origin, "missing table [" + key + "]");
  const Table& at = root.at(key).as_table();
  ArmModel arm;
  arm.mount_offset = get_vec3(at, "mount_offset", origin + " [" + key + "]");
  arm.tool_offset = get_vec3_or(at, "tool_offset", Vec3::Zero(), origin);
  if (!at.has("link")) return arm;  // armless model is permitted
  for (size_t i = 0; i < at.at("link").as_array().size(); ++i) {
    std::ostringstream where;
    where << origin << " [" << key << ".link #" << (i + 1) << "]";
    const Table& lt = at.at("link").as_array()[i].as_table();
    ArmLink link;
    link.body.name = lt.has("name") ? lt.at("name").as_string() : "";
    link.body.mass = get_number(lt, "mass", where.str());
    link.body.inertia = get_inertia(lt, where.str());
    link.body.joint_to_com = get_vec3(lt, "joint_to_com", where.str());
    link.body.com_to_next_joint = get_vec3(lt, "com_to_next_joint", where.str());
    link.joint.name = link.body.name;
    link.joint.axis = get_vec3(lt, "axis", where.str());
    if (lt.has("joint_limits")) {
      const auto lim = lt.at("joint_limits").as_number_array();
      if (lim.size() != 2) fail(where.str(), "'joint_limits' must be [min, max]");
      link.joint.limit_min = lim[0];
      link.joint.limit_max = lim[1];
    }
    arm.links.push_back(std::move(link));
  }
  return arm;
}

void put_vec3(Table& t, const std::string& key, const Vec3& v) {
  toml::Array a;
  for (int i = 0; i < 3; ++i) a.push_back(Value(v[i]));
  t.insert(key) = Value(std::move(a));
}

void put_inertia(Table& t, const Mat3& inertia) {
  toml::Array a;
  a.push_back(Value(inertia(0, 0)));
  a.push_back(Value(inertia(1, 1)));
  a.push_back(Value(inertia(2, 2)));
  const bool diagonal = std::abs(inertia(0, 1)) == 0.0 && std::abs(inertia(0, 2)) == 0.0 &&
                        std::abs(inertia(1, 2)) == 0.0;
  if (!diagonal) {
    a.push_back(Value(inertia(0, 1)));
    a.push_back(Value(inertia(0, 2)));
    a.push_back(Value(inertia(1, 2)));
  }
  t.insert("inertia") = Value(std::move(a));
}

void put_arm(Table& root, const std::string& key, const ArmModel& arm) {
  Table at;
  put_vec3(at, "mount_offset", arm.mount_offset);
  if (!arm.tool_offset.isZero()) put_vec3(at, "tool_offset", arm.tool_offset);
  toml::Array links;
  for (const auto& link : arm.links) {
    Table lt;
    if (!link.body.name.empty()) lt.insert("name") = Value(link.body.name);
    lt.insert("mass") = Value(link.body.mass);
    put_inertia(lt, link.body.inertia);
    put_vec3(lt, "axis", link.joint.axis);
    put_vec3(lt, "joint_to_com", link.body.joint_to_com);
    put_vec3(lt, "com_to_next_joint", link.body.com_to_next_joint);
    toml::Array lim;
    lim.push_back(Value(link.joint.limit_min));
    lim.push_back(Value(link.joint.limit_max));
    lt.insert("joint_limits") = Value(std::move(lim));
    links.push_back(Value(std::move(lt)));
  }
  if (!links.empty()) at.insert("link") = Value(std::move(links));
  root.insert(key) = Value(std::move(at));
}

}  // namespace

SystemModel parse_system_model(const std::string& text, const std::string& origin) {
  Value root;
  try {
    root = toml::parse(text, origin);
  } catch (const toml::ParseError& e) {
    throw ModelParseError(e.what());
  }
  SystemModel model;
  try {
    const Table& t = root.as_table();
    if (!t.has("format") || t.at("format").as_string() != "sms-model-v1") {
      fail(origin, "missing or unsupported 'format' (expected \"sms-model-v1\")");
    }
    model.name = t.has("name") ? t.at("name").as_string() : "unnamed";
    if (!t.has("base")) fail(origin, "missing table [base]");
    const Table& bt = t.at("base").as_table();
    model.base.name = "base";
    model.base.mass = get_number(bt, "mass", origin + " [base]");
    model.base.inertia = get_inertia(bt, origin + " [base]");
    model.arm_a = parse_arm(t, "arm_a", origin);
    model.arm_b = parse_arm(t, "arm_b", origin);
  } catch (const toml::ParseError& e) {
    throw ModelParseError(origin + ": " + e.what());
  }
  validate_or_throw(model);
  return model;
}

SystemModel load_system_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ModelParseError("cannot open model file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_system_model(ss.str(), path);
}

std::string serialize_system_model(const SystemModel& model) {
  Table root;
  root.insert("format") = Value(std::string("sms-model-v1"));
  root.insert("name") = Value(model.name);
  Table base;
  base.insert("mass") = Value(model.base.mass);
  put_inertia(base, model.base.inertia);
  root.insert("base") = Value(std::move(base));
  put_arm(root, "arm_a", model.arm_a);
  put_arm(root, "arm_b", model.arm_b);
  return toml::write(Value(std::move(root)));
}

}  // namespace sms
