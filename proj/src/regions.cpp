#include "meandim/regions.hpp"

#include <algorithm>
#include <functional>
#include <unordered_set>

namespace meandim {

CylinderRegion::CylinderRegion(int lo, int width, std::vector<Word> words) : lo_(lo), width_(width), words_(std::move(words)) {
  std::sort(words_.begin(), words_.end());
  words_.erase(std::unique(words_.begin(), words_.end()), words_.end());
  for (const auto& w : words_)
    if (static_cast<int>(w.size()) != width_) throw std::invalid_argument("cylinder word width mismatch");
  if (words_.empty()) lo_ = width_ = 0;
}

bool CylinderRegion::contains_word(std::string_view w) const {
  auto it = std::lower_bound(words_.begin(), words_.end(), w, [](const Word& a, std::string_view b) { return std::string_view(a) < b; });
  return it != words_.end() && *it == w;
}

bool CylinderRegion::contains(const Window& x) const {
  if (words_.empty()) return false;
  return contains_word(x.slice(lo_, hi()));
}

CylinderRegion CylinderAlgebra::cylinder(const Word& w, int offset) const {
  if (!sys_.allowed(w)) return empty();
  return Region(offset, static_cast<int>(w.size()), {w});
}

CylinderRegion CylinderAlgebra::from_cylinders(const std::vector<std::pair<Word, int>>& cyls) const {
  Region out;
  for (const auto& [w, k] : cyls) out = unite(out, cylinder(w, k));
  return out;
}

CylinderRegion CylinderAlgebra::extend(const Region& r, int lo, int hi) const {
  if (r.empty()) return r;
  if (lo > r.lo() || hi < r.hi()) throw std::invalid_argument("extend must enlarge the range");
  if (lo == r.lo() && hi == r.hi()) return r;
  sys_.require_window(hi - lo);
  return Region(lo, hi - lo, sys_.extend(r.words(), r.lo() - lo, hi - r.hi()));
}

CylinderRegion CylinderAlgebra::canonical(const Region& r) const {
  if (r.empty()) return empty();
  int lo = r.lo();
  std::vector<Word> ws = r.words();
  auto drop = [&](bool left) {
    int w = static_cast<int>(ws.front().size());
    std::vector<Word> core;
    core.reserve(ws.size());
    for (const auto& x : ws) core.push_back(left ? x.substr(1) : x.substr(0, static_cast<std::size_t>(w - 1)));
    std::sort(core.begin(), core.end());
    core.erase(std::unique(core.begin(), core.end()), core.end());
    auto back = sys_.extend(core, left ? 1 : 0, left ? 0 : 1);
    if (back.size() != ws.size()) return false;
    ws = std::move(core);
    if (left) ++lo;
    return true;
  };
  while (!ws.front().empty() && (drop(true) || drop(false))) {
  }
  if (ws.front().empty()) return whole();
  int width = static_cast<int>(ws.front().size());
  return Region(lo, width, std::move(ws));
}

namespace {

template <class Op>
CylinderRegion combine(const CylinderAlgebra& alg, const CylinderRegion& a, const CylinderRegion& b, bool a_empty_ok, Op op) {
  (void)a_empty_ok;
  int lo = std::min(a.lo(), b.lo()), hi = std::max(a.hi(), b.hi());
  if (a.empty()) lo = b.lo(), hi = b.hi();
  if (b.empty()) lo = a.lo(), hi = a.hi();
  auto ea = a.empty() ? a : alg.extend(a, lo, hi);
  auto eb = b.empty() ? b : alg.extend(b, lo, hi);
  std::vector<Word> out;
  op(ea.words(), eb.words(), std::back_inserter(out));
  return alg.canonical(CylinderRegion(lo, hi - lo, std::move(out)));
}

}  // namespace

CylinderRegion CylinderAlgebra::unite(const Region& a, const Region& b) const {
  if (a.empty()) return b;
  if (b.empty()) return a;
  return combine(*this, a, b, true, [](const auto& x, const auto& y, auto out) {
    std::set_union(x.begin(), x.end(), y.begin(), y.end(), out);
  });
}

CylinderRegion CylinderAlgebra::intersect(const Region& a, const Region& b) const {
  if (a.empty() || b.empty()) return empty();
  return combine(*this, a, b, false, [](const auto& x, const auto& y, auto out) {
    std::set_intersection(x.begin(), x.end(), y.begin(), y.end(), out);
  });
}

CylinderRegion CylinderAlgebra::subtract(const Region& a, const Region& b) const {
  if (a.empty()) return empty();
  if (b.empty()) return a;
  return combine(*this, a, b, false, [](const auto& x, const auto& y, auto out) {
    std::set_difference(x.begin(), x.end(), y.begin(), y.end(), out);
  });
}

CylinderRegion CylinderAlgebra::translate(const Region& a, int i) const {
  if (a.empty()) return a;
  return Region(a.lo() + i, a.width(), a.words());
}

bool CylinderAlgebra::equal(const Region& a, const Region& b) const {
  return is_empty(subtract(a, b)) && is_empty(subtract(b, a));
}

bool CylinderAlgebra::disjoint(const Region& a, const Region& b) const { return is_empty(intersect(a, b)); }

CylinderRegion CylinderAlgebra::unite_all(const std::vector<Region>& rs) const {
  if (rs.empty()) return empty();
  int lo = 0, hi = 0;
  bool any = false;
  for (const auto& r : rs) {
    if (r.empty()) continue;
    lo = any ? std::min(lo, r.lo()) : r.lo();
    hi = any ? std::max(hi, r.hi()) : r.hi();
    any = true;
  }
  if (!any) return empty();
  std::vector<Word> all;
  for (const auto& r : rs) {
    if (r.empty()) continue;
    auto e = extend(r, lo, hi);
    all.insert(all.end(), e.words().begin(), e.words().end());
  }
  return canonical(Region(lo, hi - lo, std::move(all)));
}

bool CylinderAlgebra::covers_space(const std::vector<Region>& rs) const {
  return is_empty(complement(unite_all(rs)));
}

std::vector<CylinderRegion> CylinderAlgebra::cylinders(const Region& r) const {
  std::vector<Region> out;
  for (const auto& w : r.words()) out.emplace_back(r.lo(), r.width(), std::vector<Word>{w});
  return out;
}

std::vector<CylinderRegion> CylinderAlgebra::refine_meeting_few(const Region& R, const std::vector<Region>& family, int d) const {
  std::vector<Region> out;
  std::function<void(const Region&)> split = [&](const Region& piece) {
    int hits = 0;
    for (const auto& f : family)
      if (!disjoint(piece, f)) ++hits;
    if (hits <= d) {
      out.push_back(piece);
      return;
    }
    bool right = piece.width() % 2 == 0;
    if (piece.width() + 1 > sys_.max_window())
      throw Infeasible("piece meets " + std::to_string(hits) + " family members at maximal refinement");
    auto finer = extend(piece, right ? piece.lo() : piece.lo() - 1, right ? piece.hi() + 1 : piece.hi());
    for (const auto& c : cylinders(finer)) split(c);
  };
  for (const auto& c : cylinders(R)) split(c);
  return out;
}

bool check_general_position_weak(const CylinderAlgebra& alg, const std::vector<CylinderRegion>& boundaries, int d) {
  int n = static_cast<int>(boundaries.size());
  if (d + 1 > n) return true;
  std::vector<int> pick(static_cast<std::size_t>(d + 1));
  std::function<bool(int, int, CylinderRegion)> rec = [&](int start, int depth, CylinderRegion acc) {
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
