#pragma once

#include <functional>
#include <optional>
#include <random>
#include <string>

#include "gpc/error.hpp"

namespace testutil {

// Runs f and returns the Errc it threw, or nullopt if it returned.
template <class F>
std::optional<gpc::Errc> thrown_code(F&& f) {
  try {
    f();
  } catch (const gpc::Error& e) {
    return e.code();
  }
  return std::nullopt;
}

inline std::string random_printable(std::mt19937& rng, std::size_t max_len) {
  std::uniform_int_distribution<std::size_t> len_dist(0, max_len);
  std::uniform_int_distribution<int> char_dist(0x20, 0x7E);
  std::string out;
  const std::size_t len = len_dist(rng);
  out.reserve(len);
  for (std::size_t i = 0; i < len; ++i)
    out.push_back(static_cast<char>(char_dist(rng)));
  return out;
}

}  // namespace testutil
