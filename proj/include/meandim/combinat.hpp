#pragma once

#include <map>
#include <optional>
#include <vector>

#include "meandim/dynsys.hpp"

namespace meandim {

struct SeparatedSet {
  int N = 0;
  int y = 0;
  std::vector<int> A;  // increasing order of insertion
};

SeparatedSet greedy_separated_set(int N, int y);
bool is_separated(int N, int y, const std::vector<int>& A);

struct PairRelation {
  enum class Kind { Unrelated, Translate, Periodic } kind = Kind::Unrelated;
  int l = 0;       // y = T^l x
  int period = 0;  // exact period of x (Periodic)
};

// Reads the relation off the windows: exact period of x, or a shift l with y = T^l x on the overlap.
PairRelation classify_pair(const Window& x, const Window& y, int max_shift);
std::vector<int> distinct_times(const SymbolicSystem& sys, const Window& x, const Window& y, int n,
                                std::optional<PairRelation> relation = std::nullopt);

class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

int good_segment(const std::map<int, Rational>& values, int M);

}  // namespace meandim
