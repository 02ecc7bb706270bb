#pragma once

#include <string>
#include <vector>

#include "meandim/regions.hpp"

namespace meandim {

struct Cover {
  std::vector<CylinderRegion> members;
};

void validate_cover(const CylinderAlgebra& alg, const Cover& c);
int ord(const CylinderAlgebra& alg, const Cover& c);
Cover join(const CylinderAlgebra& alg, const Cover& a, const Cover& b);
Cover iterate(const CylinderAlgebra& alg, const Cover& c, int n);  // joins T^{-i} c, i < n
Cover width_partition(const CylinderAlgebra& alg, int width, int offset = 0);
bool refines(const CylinderAlgebra& alg, const Cover& fine, const Cover& coarse);

struct DResult {
  int value = 0;
  bool budget_exhausted = false;
  Cover witness;
  std::vector<std::string> transcript;
};

// Upper bound for D: minimum ord over covering subcovers and sequentially shrunk refinements.
DResult D_surrogate(const CylinderAlgebra& alg, const Cover& c, int budget = 4096);

struct MdimEntry {
  int n = 0;
  int D = 0;
  Rational value;
  bool flagged = false;
};
std::vector<MdimEntry> mdim_report(const CylinderAlgebra& alg, const Cover& c, int n_max, int budget = 4096);

struct PerdimEntry {
  int m = 0;
  int dim = -1;  // -1 for the empty set
  Rational value;
  bool empty = true;
};
std::vector<PerdimEntry> perdim_report(const SymbolicSystem& sys, int m_max);

}  // namespace meandim
