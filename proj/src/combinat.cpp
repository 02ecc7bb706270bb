#include "meandim/combinat.hpp"

#include <algorithm>
#include <set>

namespace meandim {

SeparatedSet greedy_separated_set(int N, int y) {
  if (N < 2) throw std::invalid_argument("N must be at least 2");
  y = static_cast<int>(mod_floor(y, N));
  if (y == 0) throw std::invalid_argument("y must be a nonzero residue");
  SeparatedSet s{N, y, {0}};
  const int target = (N + 2) / 3;
  std::vector<char> blocked(static_cast<std::size_t>(N), 0);
  auto block = [&](int a) {
    blocked[static_cast<std::size_t>(a)] = 1;
    blocked[static_cast<std::size_t>(mod_floor(a + y, N))] = 1;
    blocked[static_cast<std::size_t>(mod_floor(a - y, N))] = 1;
  };
  block(0);
  while (static_cast<int>(s.A.size()) < target) {
    int a = 0;
    while (a < N && blocked[static_cast<std::size_t>(a)]) ++a;
    if (a == N) throw std::logic_error("greedy separated set ran out of residues");
    s.A.push_back(a);
    block(a);
  }
  return s;
}

bool is_separated(int N, int y, const std::vector<int>& A) {
  std::set<int> in;
  for (int a : A) in.insert(static_cast<int>(mod_floor(a, N)));
  for (int a : in)
    if (in.count(static_cast<int>(mod_floor(a + y, N)))) return false;
  return true;
}

PairRelation classify_pair(const Window& x, const Window& y, int max_shift) {
  PairRelation rel;
  int len = static_cast<int>(x.symbols.size());
  for (int p = 1; p <= len / 3; ++p) {
    bool ok = true;
    for (int j = x.lo(); j + p < x.hi() && ok; ++j) ok = x.at(j) == x.at(j + p);
    if (ok) {
      rel.kind = PairRelation::Kind::Periodic;
      rel.period = p;
      break;
    }
  }
  for (int a = 0; a <= max_shift; ++a)
    for (int l : {a, -a}) {
      if (a == 0 && l != 0) continue;
      int lo = std::max(y.lo(), x.lo() + l), hi = std::min(y.hi(), x.hi() + l);
      if (hi - lo < len / 2) continue;
      bool ok = true;
      for (int j = lo; j < hi && ok; ++j) ok = y.at(j) == x.at(j - l);
      if (ok) {
        if (rel.kind == PairRelation::Kind::Unrelated) rel.kind = PairRelation::Kind::Translate;
        rel.l = rel.kind == PairRelation::Kind::Periodic ? static_cast<int>(mod_floor(l, rel.period)) : l;
        return rel;
      }
    }
  if (rel.kind == PairRelation::Kind::Periodic) rel.kind = PairRelation::Kind::Unrelated;
  return rel;
}

namespace {

// Distinct as configurations, decided on the common coordinates of the two windows.
bool windows_differ(const Window& a, const Window& b) {
  int lo = std::max(a.lo(), b.lo()), hi = std::min(a.hi(), b.hi());
  if (lo >= hi) throw WindowExceeded("verification window too short");
  for (int j = lo; j < hi; ++j)
    if (a.at(j) != b.at(j)) return true;
  return false;
}

}  // namespace

std::vector<int> distinct_times(const SymbolicSystem& sys, const Window& x, const Window& y, int n,
                                std::optional<PairRelation> relation) {
  if (n < 0) throw std::invalid_argument("n must be nonnegative");
  if (!sys.allowed(x.symbols) || !sys.allowed(y.symbols)) throw std::invalid_argument("inadmissible window");
  int len = static_cast<int>(x.symbols.size());
  PairRelation rel = relation ? *relation : classify_pair(x, y, len / 2);
  std::vector<int> idx;
  std::vector<Window> pts;
  if (rel.kind == PairRelation::Kind::Periodic) {
    const int N = rel.period;
    if (N <= 6 * n) throw std::invalid_argument("period must exceed 6n");
    int l = static_cast<int>(mod_floor(rel.l, N));
    if (l == 0) throw std::invalid_argument("x and y coincide");
    auto A = greedy_separated_set(N, l).A;
    std::sort(A.begin(), A.end());
    idx.assign(A.begin(), A.begin() + (2 * n + 1));
    Word w(x.slice(x.lo(), x.lo() + N));
    w = rotate_point(w, x.lo());  // coordinates 0..N-1 of x
    for (int i : idx) {
      pts.push_back(periodic_window(rotate_point(w, i), 0, N));
      pts.push_back(periodic_window(rotate_point(w, i + l), 0, N));
    }
  } else {
    int step = rel.kind == PairRelation::Kind::Translate ? (rel.l < 0 ? -rel.l : rel.l) + 1 : 1;
    if (rel.kind == PairRelation::Kind::Translate && rel.l == 0) throw std::invalid_argument("x and y coincide");
    for (int k = 0; k <= 2 * n; ++k) idx.push_back(k * step);
    for (int i : idx) {
      pts.push_back(x.shifted(i));
      pts.push_back(y.shifted(i));
    }
  }
  for (std::size_t a = 0; a < pts.size(); ++a)
    for (std::size_t b = a + 1; b < pts.size(); ++b)
      if (!windows_differ(pts[a], pts[b])) throw std::invalid_argument("orbit points not distinct on the window");
  return idx;
}

namespace {

long long mod_int(const Integer& a, int M) {
  Integer r;
  mpz_fdiv_r_ui(r.get_mpz_t(), a.get_mpz_t(), static_cast<unsigned long>(M));
  return r.get_si();
}

}  // namespace

int good_segment(const std::map<int, Rational>& values, int M) {
  if (M < 2 || M % 2) throw std::invalid_argument("M must be even and positive");
  const int first = -3 * M / 2, last = M / 2 - 1;
  for (int j = first; j <= last; ++j)
    if (!values.count(j)) throw std::invalid_argument("values missing index " + std::to_string(j));
  std::vector<int> bad;
  for (int j = first; j < last; ++j)
    if (values.at(j + 1) != values.at(j) + 1) bad.push_back(j);
  if (bad.size() > 1) throw PreconditionError("more than one bad index");
  // Runs of consecutive good increments on either side of the bad index.
  int left_end = bad.empty() ? last : bad.front();
  int right_start = bad.empty() ? first : bad.front() + 1;
  std::vector<std::pair<int, int>> runs;
  if (left_end - first + 1 >= M) runs.push_back({first, left_end});
  if (last - right_start + 1 >= M) runs.push_back({right_start, last});
  for (auto [a, b] : runs)
    for (int r = a; r <= std::min(0, b - M / 2 + 1); ++r) {
      long long f = mod_int(floor_of(values.at(r)), M), c = mod_int(ceil_of(values.at(r)), M);
      if (f <= M / 2 && c <= M / 2) return r;
    }
  throw std::logic_error("no good segment found");
}

}  // namespace meandim
