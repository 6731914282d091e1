#pragma once

#include <initializer_list>
#include <string>
#include <vector>

#include "caploc/core.hpp"

namespace caploc::testing {

inline Rational q(const char* text) { return Rational::parse(text); }

/// Instance from "p/q" strings in id order.
inline Instance make(std::initializer_list<const char*> agents, std::vector<int> capacities) {
  std::vector<Rational> xs;
  for (const char* a : agents) xs.push_back(Rational::parse(a));
  return Instance(std::move(xs), std::move(capacities));
}

inline std::vector<Rational> qs(std::initializer_list<const char*> values) {
  std::vector<Rational> out;
  for (const char* v : values) out.push_back(Rational::parse(v));
  return out;
}

}  // namespace caploc::testing
