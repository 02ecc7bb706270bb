#pragma once

#include <optional>
#include <vector>

#include "meandim/rational.hpp"
#include "meandim/regions.hpp"

namespace meandim {

// Exact subsets of R/Z made of finitely many arcs and points. Stored as sorted critical
// points with a membership flag for each point and for each open gap after it.
class CircleSet {
 public:
  struct Component {
    Rational lo, hi;  // lo in [0,1), lo <= hi < lo + 1
    bool lo_closed = false, hi_closed = false;
    bool full = false;
  };

  static CircleSet empty_set() { return CircleSet(); }
  static CircleSet full_set();
  // Arc from `a` of length `len` (0 <= len < 1); len >= 1 gives the whole circle.
  static CircleSet arc(const Rational& a, const Rational& len, bool a_closed, bool b_closed);
  static CircleSet half_open(const Rational& a, const Rational& b);  // [a,b), wrapping if b < a
  static CircleSet closed_arc(const Rational& a, const Rational& b);
  static CircleSet open_arc(const Rational& a, const Rational& b);
  static CircleSet point(const Rational& a);

  bool contains(const Rational& x) const;
  bool is_empty() const;
  bool is_full() const;
  Rational measure() const;
  std::vector<Component> components() const;
  const std::vector<Rational>& critical_points() const { return pts_; }

  CircleSet complement() const;
  CircleSet closure() const;
  CircleSet interior() const;
  CircleSet boundary() const;
  CircleSet translate(const Rational& t) const;

  friend CircleSet unite(const CircleSet& a, const CircleSet& b);
  friend CircleSet intersect(const CircleSet& a, const CircleSet& b);
  friend CircleSet subtract(const CircleSet& a, const CircleSet& b);

  bool operator==(const CircleSet& o) const;

 private:
  std::vector<Rational> pts_;
  std::vector<char> in_pt_, in_gap_;
  bool all_ = false;

  Rational gap_sample(std::size_t i) const;
  void normalize();
  template <class Op>
  static CircleSet merge(const CircleSet& a, const CircleSet& b, Op op);
};

CircleSet unite(const CircleSet& a, const CircleSet& b);
CircleSet intersect(const CircleSet& a, const CircleSet& b);
CircleSet subtract(const CircleSet& a, const CircleSet& b);

Rational circle_mod(const Rational& x);
// Distance on R/Z between two closed sets (closures are taken); nullopt if either is empty.
std::optional<Rational> set_distance(const CircleSet& a, const CircleSet& b);
Rational point_distance(const Rational& x, const CircleSet& s);
CircleSet open_tube(const CircleSet& f, const Rational& eps);
CircleSet closed_tube(const CircleSet& f, const Rational& eps);
CircleSet inward_tube(const CircleSet& u, const Rational& eps);  // {y in u : dist(y, u^c) > eps}

class IntervalAlgebra {
 public:
  using Region = CircleSet;

  explicit IntervalAlgebra(Rational angle) : angle_(std::move(angle)) {}
  const Rational& angle() const { return angle_; }

  Region empty() const { return CircleSet::empty_set(); }
  Region whole() const { return CircleSet::full_set(); }
  Region unite(const Region& a, const Region& b) const { return meandim::unite(a, b); }
  Region intersect(const Region& a, const Region& b) const { return meandim::intersect(a, b); }
  Region subtract(const Region& a, const Region& b) const { return meandim::subtract(a, b); }
  Region complement(const Region& a) const { return a.complement(); }
  Region translate(const Region& a, int i) const { return a.translate(angle_ * i); }
  Region closure(const Region& a) const { return a.closure(); }
  Region interior(const Region& a) const { return a.interior(); }
  Region boundary(const Region& a) const { return a.boundary(); }
  Region canonical(const Region& a) const { return a; }

  bool is_empty(const Region& a) const { return a.is_empty(); }
  bool equal(const Region& a, const Region& b) const { return a == b; }
  bool subset(const Region& a, const Region& b) const { return subtract(a, b).is_empty(); }
  bool disjoint(const Region& a, const Region& b) const { return intersect(a, b).is_empty(); }
  bool closures_disjoint(const Region& a, const Region& b) const { return disjoint(a.closure(), b.closure()); }
  bool covers_space(const std::vector<Region>& rs) const;
  Region unite_all(const std::vector<Region>& rs) const;

  // Closed pieces with union exactly R, each meeting at most d family members.
  std::vector<Region> refine_meeting_few(const Region& R, const std::vector<Region>& family, int d, int max_depth = 48) const;

 private:
  Rational angle_;
};

bool check_general_position_weak(const IntervalAlgebra& alg, const std::vector<CircleSet>& boundaries, int d);

}  // namespace meandim
