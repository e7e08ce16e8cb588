#pragma once

#include "lab/geometry.hpp"

#include <nlohmann/json.hpp>

namespace lab {

using json = nlohmann::json;

inline json to_json(const Vec& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

inline json to_json(const VecI& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

inline Vec vec_from_json(const json& a) {
  if (!a.is_array() || a.empty() || a.size() > 3)
    throw InvalidInput("expected a numeric array of size 1..3");
  Vec v(static_cast<int>(a.size()));
  for (int i = 0; i < v.size(); ++i) v[i] = a.at(i).get<double>();
  return v;
}

inline VecI veci_from_json(const json& a) {
  if (!a.is_array() || a.empty() || a.size() > 3)
    throw InvalidInput("expected an integer array of size 1..3");
  VecI v(static_cast<int>(a.size()));
  for (int i = 0; i < v.size(); ++i) v[i] = a.at(i).get<int>();
  return v;
}

inline json to_json(const std::vector<Vec>& vs) {
  json a = json::array();
  for (const auto& v : vs) a.push_back(to_json(v));
  return a;
}

}  // namespace lab
