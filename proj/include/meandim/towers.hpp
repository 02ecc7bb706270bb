#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "meandim/circle.hpp"
#include "meandim/regions.hpp"

namespace meandim {

int marker_constant(int d, int N);
std::pair<int, int> coloring_interval(int k, int N);  // I_k as [first, last]
int interval_coloring(const std::vector<int>& hits, int d, int N);

template <class Alg>
struct DisjointifyResult {
  using Region = typename Alg::Region;
  int m = 0;
  Region W, R;
  std::vector<Region> pieces;
  std::vector<std::vector<int>> hits;
  std::vector<int> colors;
  std::optional<Rational> rho;  // interval backend: half the minimal translate gap of V
};

namespace detail {
template <class Alg>
std::optional<Rational> translate_gap(const Alg&, const typename Alg::Region&, int) {
  return std::nullopt;
}
std::optional<Rational> translate_gap(const IntervalAlgebra& alg, const CircleSet& V, int m);
}  // namespace detail

template <class Alg>
DisjointifyResult<Alg> disjointify(const Alg& alg, const typename Alg::Region& U, const typename Alg::Region& V, int N,
                                   int d) {
  using Region = typename Alg::Region;
  if (N < 1 || d < 0) throw std::invalid_argument("disjointify needs N >= 1 and d >= 0");
  DisjointifyResult<Alg> res;
  const int m = res.m = marker_constant(d, N);
  for (int i = 1; i < N; ++i)
    if (!alg.closures_disjoint(U, alg.translate(U, i)))
      throw std::invalid_argument("precondition: closure of U meets its translate by " + std::to_string(i));
  for (int i = 1; i <= m; ++i)
    if (!alg.closures_disjoint(V, alg.translate(V, i)))
      throw std::invalid_argument("precondition: closure of V meets its translate by " + std::to_string(i));

  const Region Ubar = alg.closure(U);
  std::vector<Region> family, open_translates;
  for (int i = 1; i <= m; ++i) {
    family.push_back(alg.translate(Ubar, i));
    open_translates.push_back(alg.translate(U, i));
  }
  res.R = alg.subtract(alg.closure(V), alg.unite_all(open_translates));
  res.rho = detail::translate_gap(alg, V, m);
  res.W = U;
  if (!alg.is_empty(res.R)) {
    res.pieces = alg.refine_meeting_few(res.R, family, d);
    for (const auto& E : res.pieces) {
      std::vector<int> hit;
      Region Ebar = alg.closure(E);
      for (int i = 1; i <= m; ++i)
        if (!alg.is_empty(alg.intersect(family[static_cast<std::size_t>(i - 1)], Ebar))) hit.push_back(i);
      int c = interval_coloring(hit, d, N);
      res.hits.push_back(hit);
      res.colors.push_back(c);
      res.W = alg.unite(res.W, alg.translate(E, -c * N));
    }
  }
  // Postconditions.
  const Region Wbar = alg.closure(res.W);
  if (!alg.subset(Ubar, Wbar)) throw std::logic_error("disjointify: closure of U not inside closure of W");
  std::vector<Region> ws;
  for (int i = 1; i <= m; ++i) ws.push_back(alg.translate(Wbar, i));
  if (!alg.subset(alg.closure(V), alg.unite_all(ws))) throw std::logic_error("disjointify: V not covered by translates of W");
  for (int i = 1; i < N; ++i)
    if (!alg.closures_disjoint(res.W, alg.translate(res.W, i)))
      throw std::logic_error("disjointify: W meets its translate by " + std::to_string(i));
  return res;
}

struct MarkerFact {
  std::string kind;  // disjoint | cover | step_contains | step_covers | step_disjoint | coloring
  int step = 0;
  int index = 0;
  std::string detail;
};

struct InductionStep {
  CylinderRegion V;
  CylinderRegion R;
  std::vector<CylinderRegion> pieces;
  std::vector<std::vector<int>> hits;
  std::vector<int> colors;
  CylinderRegion W;
};

struct MarkerCertificate {
  SymbolicSystem system;
  int N = 1;
  int d = 0;
  int m = 0;            // marker_constant(d, N)
  int cover_bound = 0;  // least m' with T^0 W, ..., T^{m'} W covering
  CylinderRegion W{};
  std::vector<CylinderRegion> start_cover{};
  std::vector<InductionStep> steps{};
  std::vector<MarkerFact> facts{};
};

struct MarkerOptions {
  int max_start_width = 0;  // 0: limited by the window budget
};

MarkerCertificate build_marker(const CylinderAlgebra& alg, int N, int d, const MarkerOptions& opt = {});

struct VerifyReport {
  bool ok = true;
  std::size_t checked = 0;
  std::string first_failure;
};
// Re-checks every recorded fact by sweeping admissible windows; shares no code with the constructor.
VerifyReport verify_marker(const MarkerCertificate& cert);

namespace sweep {
struct Shifted {
  const CylinderRegion* region;
  int shift;  // the set T^shift(region)
};
// For every admissible configuration: membership in all of `all` implies membership in one of `any`.
bool implies(const SymbolicSystem& sys, const std::vector<Shifted>& all, const std::vector<Shifted>& any);
bool translates_disjoint(const SymbolicSystem& sys, const CylinderRegion& a, int i, const CylinderRegion& b);
bool covered(const SymbolicSystem& sys, const CylinderRegion& a, int i_lo, int i_hi, const CylinderRegion& w);
}  // namespace sweep

enum class MarkerDirection { ClosedToOpen, OpenToClosed };

struct InterconvertResult {
  CircleSet marker;
  Rational radius;  // epsilon for the outward tube, delta for the inward one
  std::optional<Rational> lebesgue;
};

CylinderRegion marker_interconvert(const CylinderAlgebra& alg, const CylinderRegion& F, MarkerDirection dir);
InterconvertResult marker_interconvert(const IntervalAlgebra& alg, const CircleSet& F, int n, int m, MarkerDirection dir);
bool is_marker(const IntervalAlgebra& alg, const CircleSet& F, int n, int m);
Rational lebesgue_number(const IntervalAlgebra& alg, const std::vector<CircleSet>& open_cover);

struct RokhlinFunction {
  std::function<Rational(const Window&)> value;
  int lo = 0, hi = 0;  // value(x) reads coordinates [lo, hi)
  int height = 0;      // values lie in [0, height]
  int depth = 1;       // N: exceptional set disjoint from its translates by 1..N-1
  bool integer_valued = true;
  std::optional<CylinderRegion> marker;

  Rational operator()(const Window& x) const { return value(x); }
  Rational at_shift(const Window& x, int k) const { return value(x.shifted(k)); }  // n(T^k x)
  bool exceptional(const Window& x) const;  // n(Tx) != n(x) + 1
};

RokhlinFunction rokhlin_from_marker(const MarkerCertificate& cert);

struct RokhlinReport {
  bool ok = true;
  std::size_t windows = 0;
  int max_bad = 0;  // most exceptional positions among `span` consecutive shifts
  std::string first_failure;
};
// Over every admissible window: the exceptional set is disjoint from its translates by 1..depth-1,
// and at most one of `span` consecutive shifts is exceptional.
RokhlinReport check_rokhlin(const SymbolicSystem& sys, const RokhlinFunction& r, int span);
RokhlinFunction rokhlin_from_region(const CylinderRegion& W, int height, int depth);

}  // namespace meandim
