/*
 Copyright 2026 The wbmpc Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/
#pragma once

#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "wbmpc/common.hpp"
#include "wbmpc/geometry.hpp"

// Document-reading helpers. Every failure names the offending field.
namespace wbmpc::json_util {

using nlohmann::json;

inline const json& require(const json& obj, const std::string& key, const std::string& ctx) {
  if (!obj.is_object()) throw ModelError(ctx + ": expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ModelError(ctx + ": missing field '" + key + "'");
  return *it;
}

template <typename T>
T get(const json& obj, const std::string& key, const std::string& ctx) {
  const json& v = require(obj, key, ctx);
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    throw ModelError(ctx + ": field '" + key + "' has the wrong type");
  }
}

template <typename T>
T get_or(const json& obj, const std::string& key, const T& fallback, const std::string& ctx) {
  if (!obj.is_object() || !obj.contains(key)) return fallback;
  return get<T>(obj, key, ctx);
}

inline VectorXd vector(const json& v, const std::string& ctx) {
  if (!v.is_array()) throw ModelError(ctx + ": expected an array of numbers");
  VectorXd out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) throw ModelError(ctx + ": expected an array of numbers");
    out[i] = v[i].get<double>();
  }
  return out;
}

inline Vec3 vec3(const json& v, const std::string& ctx) {
  const VectorXd out = vector(v, ctx);
  if (out.size() != 3) throw ModelError(ctx + ": expected 3 numbers");
  return out;
}

inline json to_json(const Eigen::Ref<const VectorXd>& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

/// {xyz, rpy}, either field optional.
inline Pose pose(const json& v, const std::string& ctx) {
  if (!v.is_object()) throw ModelError(ctx + ": expected {xyz, rpy}");
  const Vec3 xyz = v.contains("xyz") ? vec3(v.at("xyz"), ctx + ".xyz") : Vec3::Zero();
  const Vec3 rpy = v.contains("rpy") ? vec3(v.at("rpy"), ctx + ".rpy") : Vec3::Zero();
  return Pose::from_xyz_rpy(xyz, rpy);
}

inline json read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ModelError("'" + path.string() + "': " + e.what());
  }
}

}  // namespace wbmpc::json_util
