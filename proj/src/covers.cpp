#include "meandim/covers.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace meandim {

void validate_cover(const CylinderAlgebra& alg, const Cover& c) {
  for (const auto& m : c.members)
    if (alg.is_empty(m)) throw std::invalid_argument("cover has an empty member");
  if (!alg.covers_space(c.members)) throw std::invalid_argument("members do not cover the space");
}

int ord(const CylinderAlgebra& alg, const Cover& c) {
  if (c.members.empty()) return -1;
  int lo = c.members.front().lo(), hi = c.members.front().hi();
  for (const auto& m : c.members) {
    lo = std::min(lo, m.lo());
    hi = std::max(hi, m.hi());
  }
  std::map<Word, int> count;
  for (const auto& m : c.members) {
    const CylinderRegion e = alg.extend(m, lo, hi);
    for (const auto& w : e.words()) ++count[w];
  }
  int best = 0;
  for (const auto& [w, k] : count) best = std::max(best, k);
  return best - 1;
}

namespace {

void push_unique(const CylinderAlgebra& alg, std::vector<CylinderRegion>& out, const CylinderRegion& r) {
  if (alg.is_empty(r)) return;
  for (const auto& x : out)
    if (alg.equal(x, r)) return;
  out.push_back(r);
}

}  // namespace

Cover join(const CylinderAlgebra& alg, const Cover& a, const Cover& b) {
  Cover out;
  for (const auto& u : a.members)
    for (const auto& v : b.members) push_unique(alg, out.members, alg.intersect(u, v));
  return out;
}

Cover iterate(const CylinderAlgebra& alg, const Cover& c, int n) {
  if (n < 1) throw std::invalid_argument("iterate needs n >= 1");
  Cover acc = c;
  for (int i = 1; i < n; ++i) {
    Cover shifted;
    for (const auto& m : c.members) shifted.members.push_back(alg.translate(m, -i));
    acc = join(alg, acc, shifted);
  }
  return acc;
}

Cover width_partition(const CylinderAlgebra& alg, int width, int offset) {
  Cover c;
  for (const auto& w : alg.system().language(width)) c.members.push_back(alg.cylinder(w, offset));
  return c;
}

bool refines(const CylinderAlgebra& alg, const Cover& fine, const Cover& coarse) {
  for (const auto& f : fine.members) {
    bool inside = false;
    for (const auto& g : coarse.members)
      if (alg.subset(f, g)) {
        inside = true;
        break;
      }
    if (!inside) return false;
  }
  return true;
}

DResult D_surrogate(const CylinderAlgebra& alg, const Cover& c, int budget) {
  DResult res;
  res.value = ord(alg, c);
  res.witness = c;
  res.transcript.push_back("start ord " + std::to_string(res.value));
  int spent = 0;
  std::size_t n = c.members.size();
  // Covering subcovers, by increasing size.
  if (n <= 20) {
    std::vector<unsigned> masks((std::size_t{1} << n) - 1);
    std::iota(masks.begin(), masks.end(), 1u);
    std::stable_sort(masks.begin(), masks.end(), [](unsigned a, unsigned b) { return __builtin_popcount(a) < __builtin_popcount(b); });
    for (unsigned mask : masks) {
      if (res.value == 0) break;
      if (spent >= budget) {
        res.budget_exhausted = true;
        break;
      }
      ++spent;
      Cover sub;
      for (std::size_t i = 0; i < n; ++i)
        if (mask >> i & 1u) sub.members.push_back(c.members[i]);
      if (!alg.covers_space(sub.members)) continue;
      int o = ord(alg, sub);
      if (o < res.value) {
        res.value = o;
        res.witness = sub;
        res.transcript.push_back("subcover of " + std::to_string(sub.members.size()) + " members has ord " + std::to_string(o));
      }
    }
  } else {
    res.budget_exhausted = true;
  }
  // Shrink each member by the members kept before it.
  if (res.value > 0 && spent < budget) {
    ++spent;
    Cover shrunk;
    CylinderRegion taken;
    for (const auto& m : res.witness.members) {
      auto s = alg.subtract(m, taken);
      if (!alg.is_empty(s)) {
        shrunk.members.push_back(s);
        taken = alg.unite(taken, s);
      }
    }
    if (alg.covers_space(shrunk.members) && refines(alg, shrunk, c)) {
      int o = ord(alg, shrunk);
      if (o < res.value) {
        res.value = o;
        res.witness = shrunk;
        res.transcript.push_back("sequential shrinking gives ord " + std::to_string(o));
      }
    }
  }
  return res;
}

std::vector<MdimEntry> mdim_report(const CylinderAlgebra& alg, const Cover& c, int n_max, int budget) {
  std::vector<MdimEntry> out;
  for (int n = 1; n <= n_max; ++n) {
    auto r = D_surrogate(alg, iterate(alg, c, n), budget);
    MdimEntry e;
    e.n = n;
    e.D = r.value;
    e.value = Rational(r.value, n);
    e.value.canonicalize();
    e.flagged = r.budget_exhausted;
    out.push_back(e);
  }
  return out;
}

std::vector<PerdimEntry> perdim_report(const SymbolicSystem& sys, int m_max) {
  std::vector<PerdimEntry> out;
  auto ps = enumerate_periodic_points(sys, m_max);
  std::size_t running = 0;
  for (int m = 1; m <= m_max; ++m) {
    running += ps.strata[m].size();
    PerdimEntry e;
    e.m = m;
    e.empty = running == 0;
    e.dim = e.empty ? -1 : 0;
    e.value = Rational(e.dim, m);
    e.value.canonicalize();
    out.push_back(e);
  }
  return out;
}

}  // namespace meandim
