#pragma once
#include <random>
#include <string>

#include "lvorb/io.hpp"

inline const lvorb::LatticeFile& e8() {
  static const lvorb::LatticeFile f = lvorb::parse_lattice(std::string(LVORB_DATA_DIR) + "/e8.lat");
  return f;
}

inline lvorb::ZVec random_vector(std::mt19937& rng, std::size_t d, int bound = 3) {
  std::uniform_int_distribution<int> u(-bound, bound);
  lvorb::ZVec v(d);
  for (auto& x : v) x = u(rng);
  return v;
}
