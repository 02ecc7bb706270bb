#include "meandim/circle.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

namespace meandim {

Rational circle_mod(const Rational& x) { return frac_of(x); }

CircleSet CircleSet::full_set() {
  CircleSet s;
  s.all_ = true;
  return s;
}

CircleSet CircleSet::arc(const Rational& a, const Rational& len, bool a_closed, bool b_closed) {
  if (len < 0) throw std::invalid_argument("negative arc length");
  if (len >= 1) return full_set();
  if (len == 0) return a_closed && b_closed ? point(a) : CircleSet();
  Rational s = circle_mod(a), e = circle_mod(a + len);
  CircleSet c;
  if (s < e) {
    c.pts_ = {s, e};
    c.in_pt_ = {a_closed, b_closed};
    c.in_gap_ = {1, 0};
  } else {
    c.pts_ = {e, s};
    c.in_pt_ = {b_closed, a_closed};
    c.in_gap_ = {0, 1};
  }
  c.normalize();
  return c;
}

CircleSet CircleSet::half_open(const Rational& a, const Rational& b) {
  if (a == b) throw std::invalid_argument("degenerate interval");
  Rational len = a < b ? Rational(b - a) : Rational(1 - a + b);
  return arc(a, len, true, false);
}

CircleSet CircleSet::closed_arc(const Rational& a, const Rational& b) {
  Rational len = b >= a ? Rational(b - a) : Rational(1 - a + b);
  return arc(a, len, true, true);
}

CircleSet CircleSet::open_arc(const Rational& a, const Rational& b) {
  Rational len = b >= a ? Rational(b - a) : Rational(1 - a + b);
  return arc(a, len, false, false);
}

CircleSet CircleSet::point(const Rational& a) {
  CircleSet c;
  c.pts_ = {circle_mod(a)};
  c.in_pt_ = {1};
  c.in_gap_ = {0};
  return c;
}

bool CircleSet::contains(const Rational& raw) const {
  if (pts_.empty()) return all_;
  Rational x = circle_mod(raw);
  auto it = std::upper_bound(pts_.begin(), pts_.end(), x);
  if (it == pts_.begin()) return in_gap_.back();
  std::size_t idx = static_cast<std::size_t>(it - pts_.begin()) - 1;
  if (pts_[idx] == x) return in_pt_[idx];
  return in_gap_[idx];
}

bool CircleSet::is_empty() const {
  if (pts_.empty()) return !all_;
  return std::none_of(in_pt_.begin(), in_pt_.end(), [](char c) { return c; }) &&
         std::none_of(in_gap_.begin(), in_gap_.end(), [](char c) { return c; });
}

bool CircleSet::is_full() const {
  if (pts_.empty()) return all_;
  return std::all_of(in_pt_.begin(), in_pt_.end(), [](char c) { return c; }) &&
         std::all_of(in_gap_.begin(), in_gap_.end(), [](char c) { return c; });
}

Rational CircleSet::gap_sample(std::size_t i) const {
  if (i + 1 < pts_.size()) return (pts_[i] + pts_[i + 1]) / 2;
  return circle_mod((pts_.back() + pts_.front() + 1) / 2);
}

Rational CircleSet::measure() const {
  if (pts_.empty()) return all_ ? Rational(1) : Rational(0);
  Rational m = 0;
  for (std::size_t i = 0; i < pts_.size(); ++i)
    if (in_gap_[i]) m += i + 1 < pts_.size() ? Rational(pts_[i + 1] - pts_[i]) : Rational(pts_.front() + 1 - pts_.back());
  return m;
}

void CircleSet::normalize() {
  bool changed = true;
  while (changed && !pts_.empty()) {
    changed = false;
    std::size_t n = pts_.size();
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t prev = (i + n - 1) % n;
      if (in_pt_[i] == in_gap_[prev] && in_pt_[i] == in_gap_[i]) {
        if (n == 1) {
          all_ = in_gap_[0];
          pts_.clear();
          in_pt_.clear();
          in_gap_.clear();
          return;
        }
        pts_.erase(pts_.begin() + static_cast<long>(i));
        in_pt_.erase(in_pt_.begin() + static_cast<long>(i));
        in_gap_.erase(in_gap_.begin() + static_cast<long>(i));
        changed = true;
        break;
      }
    }
  }
  if (!pts_.empty()) all_ = false;
}

template <class Op>
CircleSet CircleSet::merge(const CircleSet& a, const CircleSet& b, Op op) {
  CircleSet c;
  std::set_union(a.pts_.begin(), a.pts_.end(), b.pts_.begin(), b.pts_.end(), std::back_inserter(c.pts_));
  if (c.pts_.empty()) {
    c.all_ = op(a.all_, b.all_);
    return c;
  }
  for (std::size_t i = 0; i < c.pts_.size(); ++i) {
    c.in_pt_.push_back(op(a.contains(c.pts_[i]), b.contains(c.pts_[i])));
    Rational s = c.gap_sample(i);
    c.in_gap_.push_back(op(a.contains(s), b.contains(s)));
  }
  c.normalize();
  return c;
}

CircleSet unite(const CircleSet& a, const CircleSet& b) {
  return CircleSet::merge(a, b, [](bool x, bool y) { return x || y; });
}
CircleSet intersect(const CircleSet& a, const CircleSet& b) {
  return CircleSet::merge(a, b, [](bool x, bool y) { return x && y; });
}
CircleSet subtract(const CircleSet& a, const CircleSet& b) {
  return CircleSet::merge(a, b, [](bool x, bool y) { return x && !y; });
}

CircleSet CircleSet::complement() const {
  CircleSet c = *this;
  c.all_ = !all_;
  for (auto& f : c.in_pt_) f = !f;
  for (auto& f : c.in_gap_) f = !f;
  if (!c.pts_.empty()) c.all_ = false;
  return c;
}

CircleSet CircleSet::closure() const {
  CircleSet c = *this;
  std::size_t n = pts_.size();
  for (std::size_t i = 0; i < n; ++i) c.in_pt_[i] = in_pt_[i] || in_gap_[(i + n - 1) % n] || in_gap_[i];
  c.normalize();
  return c;
}

CircleSet CircleSet::interior() const {
  CircleSet c = *this;
  std::size_t n = pts_.size();
  for (std::size_t i = 0; i < n; ++i) c.in_pt_[i] = in_pt_[i] && in_gap_[(i + n - 1) % n] && in_gap_[i];
  c.normalize();
  return c;
}

CircleSet CircleSet::boundary() const { return subtract(closure(), interior()); }

CircleSet CircleSet::translate(const Rational& t) const {
  if (pts_.empty()) return *this;
  std::size_t n = pts_.size();
  std::vector<Rational> moved(n);
  for (std::size_t i = 0; i < n; ++i) moved[i] = circle_mod(pts_[i] + t);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return moved[x] < moved[y]; });
  CircleSet c;
  for (auto i : order) {
    c.pts_.push_back(moved[i]);
    c.in_pt_.push_back(in_pt_[i]);
    c.in_gap_.push_back(in_gap_[i]);
  }
  return c;
}

bool CircleSet::operator==(const CircleSet& o) const {
  return pts_ == o.pts_ && in_pt_ == o.in_pt_ && in_gap_ == o.in_gap_ && (pts_.empty() ? all_ == o.all_ : true);
}

std::vector<CircleSet::Component> CircleSet::components() const {
  std::vector<Component> out;
  if (is_full()) {
    Component c;
    c.lo = 0;
    c.hi = 1;
    c.full = true;
    out.push_back(c);
    return out;
  }
  if (is_empty()) return out;
  std::size_t n = pts_.size(), m = 2 * n;
  auto member = [&](std::size_t e) { return e % 2 == 0 ? in_pt_[e / 2] : in_gap_[e / 2]; };
  std::size_t start = 0;
  while (member(start)) ++start;
  bool inside = false;
  Component cur;
  std::size_t run_len = 0;
  std::size_t last = 0;
  for (std::size_t k = 1; k <= m; ++k) {
    std::size_t e = (start + k) % m;
    if (member(e)) {
      if (!inside) {
        inside = true;
        run_len = 0;
        cur = Component();
        cur.lo = pts_[e / 2];
        cur.lo_closed = e % 2 == 0;
      }
      ++run_len;
      last = e;
    } else if (inside) {
      inside = false;
      if (last % 2 == 0) {
        cur.hi = pts_[last / 2];
        cur.hi_closed = true;
      } else {
        cur.hi = pts_[(last / 2 + 1) % n];
        cur.hi_closed = false;
      }
      if (cur.hi < cur.lo || (cur.hi == cur.lo && run_len > 1)) cur.hi += 1;
      out.push_back(cur);
    }
  }
  return out;
}

std::optional<Rational> set_distance(const CircleSet& a, const CircleSet& b) {
  CircleSet ca = a.closure(), cb = b.closure();
  if (ca.is_empty() || cb.is_empty()) return std::nullopt;
  if (!intersect(ca, cb).is_empty()) return Rational(0);
  std::optional<Rational> best;
  for (const auto& x : ca.components())
    for (const auto& y : cb.components()) {
      Rational d1 = circle_mod(y.lo - x.hi), d2 = circle_mod(x.lo - y.hi);
      Rational d = std::min(d1, d2);
      if (!best || d < *best) best = d;
    }
  return best;
}

Rational point_distance(const Rational& x, const CircleSet& s) {
  auto d = set_distance(CircleSet::point(x), s);
  if (!d) throw std::invalid_argument("distance to empty set");
  return *d;
}

CircleSet open_tube(const CircleSet& f, const Rational& eps) {
  CircleSet out;
  for (const auto& c : f.closure().components()) {
    if (c.full) return CircleSet::full_set();
    out = unite(out, CircleSet::arc(c.lo - eps, c.hi - c.lo + 2 * eps, false, false));
  }
  return out;
}

CircleSet closed_tube(const CircleSet& f, const Rational& eps) {
  CircleSet out;
  for (const auto& c : f.closure().components()) {
    if (c.full) return CircleSet::full_set();
    out = unite(out, CircleSet::arc(c.lo - eps, c.hi - c.lo + 2 * eps, true, true));
  }
  return out;
}

CircleSet inward_tube(const CircleSet& u, const Rational& eps) {
  return subtract(u, closed_tube(u.complement(), eps));
}

CircleSet IntervalAlgebra::unite_all(const std::vector<Region>& rs) const {
  CircleSet out;
  for (const auto& r : rs) out = meandim::unite(out, r);
  return out;
}

bool IntervalAlgebra::covers_space(const std::vector<Region>& rs) const { return unite_all(rs).is_full(); }

std::vector<CircleSet> IntervalAlgebra::refine_meeting_few(const Region& R, const std::vector<Region>& family, int d,
                                                           int max_depth) const {
  std::vector<Region> out;
  std::function<void(const Region&, const Rational&, const Rational&, int)> split =
      [&](const Region& piece, const Rational& lo, const Rational& hi, int depth) {
        int hits = 0;
        for (const auto& f : family)
          if (!meandim::intersect(piece, f).is_empty()) ++hits;
        if (hits <= d) {
          out.push_back(piece);
          return;
        }
        if (depth >= max_depth || lo == hi)
          throw Infeasible("a piece meets " + std::to_string(hits) + " family members at maximal refinement depth");
        Rational mid = (lo + hi) / 2;
        auto left = meandim::intersect(piece, CircleSet::arc(lo, mid - lo, true, true));
        auto right = meandim::intersect(piece, CircleSet::arc(mid, hi - mid, true, true));
        if (!left.is_empty()) split(left, lo, mid, depth + 1);
        if (!right.is_empty()) split(right, mid, hi, depth + 1);
      };
  for (const auto& c : R.components()) {
    auto piece = c.full ? CircleSet::full_set() : CircleSet::arc(c.lo, c.hi - c.lo, c.lo_closed, c.hi_closed);
    split(piece, c.lo, c.hi, 0);
  }
  return out;
}

bool check_general_position_weak(const IntervalAlgebra& alg, const std::vector<CircleSet>& boundaries, int d) {
  int n = static_cast<int>(boundaries.size());
  if (d + 1 > n) return true;
  std::function<bool(int, int, const CircleSet&)> rec = [&](int start, int depth, const CircleSet& acc) {
    if (depth == d + 1) return alg.is_empty(acc);
    for (int i = start; i < n; ++i) {
      auto next = depth == 0 ? boundaries[static_cast<std::size_t>(i)] : alg.intersect(acc, boundaries[static_cast<std::size_t>(i)]);
      if (!rec(i + 1, depth + 1, next)) return false;
    }
    return true;
  };
  return rec(0, 0, alg.whole());
}

}  // namespace meandim
