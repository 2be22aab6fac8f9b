/*
 *   Copyright 2026 The edgercl authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/**
 * @file
 *
 * Shared basics: the library error type, edge keys, and decimal text
 * helpers used by every serializer in the project.
 */

#ifndef EDGERCL_CORE_HPP
#define EDGERCL_CORE_HPP

#include <charconv>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace edgercl {

/// Single exception type for all validation and pipeline failures.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Directed microservice pair (source, target) of a communication edge.
using EdgeKey = std::pair<std::string, std::string>;

inline std::string edge_name(const EdgeKey& e) {
  return e.first + "->" + e.second;
}

/// Shortest decimal text that round-trips the exact double value.
inline std::string format_double(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view text, std::string_view context) {
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    throw Error("malformed decimal value '" + std::string(text) + "' in " +
                std::string(context));
  }
  if (!std::isfinite(v)) {
    throw Error("non-finite value '" + std::string(text) + "' in " +
                std::string(context));
  }
  return v;
}

inline std::size_t parse_index(std::string_view text, std::string_view context) {
  std::size_t v = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    throw Error("malformed index '" + std::string(text) + "' in " +
                std::string(context));
  }
  return v;
}

/// Identifiers appear in file formats and report keys, so the charset is
/// restricted up front. ':' is reserved for synthetic vertex prefixes and
/// '+' for canonical cluster ids.
inline bool valid_id(std::string_view id) {
  if (id.empty()) return false;
  for (char c : id) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '_' || c == '-' || c == '.';
    if (!ok) return false;
  }
  return true;
}

inline void require_valid_id(std::string_view id, std::string_view what) {
  if (!valid_id(id)) {
    throw Error(std::string(what) + " id '" + std::string(id) +
                "' is empty or contains characters outside [A-Za-z0-9_.-]");
  }
}

}  // namespace edgercl

#endif  // EDGERCL_CORE_HPP
