#pragma once

#include <boost/dynamic_bitset.hpp>
#include <string>
#include <vector>

#include "modelforge/errors.hpp"

namespace modelforge {

// Subset of a finite index set {0, ..., n-1}.
using IndexSet = boost::dynamic_bitset<>;

inline IndexSet make_index_set(int n, const std::vector<int>& members) {
  IndexSet s(static_cast<std::size_t>(n));
  for (int i : members) {
    if (i < 0 || i >= n)
      throw InvalidInput("index " + std::to_string(i) + " outside index set of size " + std::to_string(n));
    s.set(static_cast<std::size_t>(i));
  }
  return s;
}

inline IndexSet full_index_set(int n) {
  IndexSet s(static_cast<std::size_t>(n));
  s.set();
  return s;
}

inline std::vector<int> members(const IndexSet& s) {
  std::vector<int> out;
  for (auto i = s.find_first(); i != IndexSet::npos; i = s.find_next(i)) out.push_back(static_cast<int>(i));
  return out;
}

}  // namespace modelforge
