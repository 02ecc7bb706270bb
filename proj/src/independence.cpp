#include "meandim/independence.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <unordered_map>

namespace meandim {

RationalMatrix RationalMatrix::from_rows(const std::vector<Vec>& rows) {
  if (rows.empty()) return RationalMatrix();
  RationalMatrix M(static_cast<int>(rows.size()), static_cast<int>(rows.front().size()));
  for (int i = 0; i < M.rows; ++i) {
    if (static_cast<int>(rows[static_cast<std::size_t>(i)].size()) != M.cols) throw std::invalid_argument("ragged rows");
    for (int j = 0; j < M.cols; ++j) M(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  return M;
}

RationalMatrix RationalMatrix::from_columns(const std::vector<Vec>& cols) {
  if (cols.empty()) return RationalMatrix();
  RationalMatrix M(static_cast<int>(cols.front().size()), static_cast<int>(cols.size()));
  for (int j = 0; j < M.cols; ++j) {
    if (static_cast<int>(cols[static_cast<std::size_t>(j)].size()) != M.rows) throw std::invalid_argument("ragged columns");
    for (int i = 0; i < M.rows; ++i) M(i, j) = cols[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
  }
  return M;
}

namespace {

std::vector<std::vector<Integer>> clear_denominators(const RationalMatrix& M) {
  std::vector<std::vector<Integer>> A(static_cast<std::size_t>(M.rows), std::vector<Integer>(static_cast<std::size_t>(M.cols)));
  for (int i = 0; i < M.rows; ++i) {
    Integer l = 1;
    for (int j = 0; j < M.cols; ++j) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), M(i, j).get_den_mpz_t());
    for (int j = 0; j < M.cols; ++j) A[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = M(i, j).get_num() * (l / M(i, j).get_den());
  }
  return A;
}

// Fraction-free elimination; returns rank and, for square input, the determinant of the scaled matrix.
int bareiss(std::vector<std::vector<Integer>>& A, int cols, Integer* det) {
  int rows = static_cast<int>(A.size());
  int r = 0;
  Integer prev = 1;
  int sign = 1;
  for (int c = 0; c < cols && r < rows; ++c) {
    int p = r;
    while (p < rows && A[static_cast<std::size_t>(p)][static_cast<std::size_t>(c)] == 0) ++p;
    if (p == rows) {
      if (det) *det = 0;
      det = nullptr;
      continue;
    }
    if (p != r) {
      std::swap(A[static_cast<std::size_t>(p)], A[static_cast<std::size_t>(r)]);
      sign = -sign;
    }
    auto& R = A[static_cast<std::size_t>(r)];
    for (int i = r + 1; i < rows; ++i) {
      auto& Ri = A[static_cast<std::size_t>(i)];
      for (int j = c + 1; j < cols; ++j) {
        Integer t = Ri[static_cast<std::size_t>(j)] * R[static_cast<std::size_t>(c)] - Ri[static_cast<std::size_t>(c)] * R[static_cast<std::size_t>(j)];
        mpz_divexact(Ri[static_cast<std::size_t>(j)].get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
      }
      Ri[static_cast<std::size_t>(c)] = 0;
    }
    prev = R[static_cast<std::size_t>(c)];
    ++r;
  }
  if (det) *det = r == rows ? Integer(prev * sign) : Integer(0);
  return r;
}

}  // namespace

int rank_exact(const RationalMatrix& M) {
  if (M.rows == 0 || M.cols == 0) return 0;
  auto A = clear_denominators(M);
  return bareiss(A, M.cols, nullptr);
}

int rank_of(const std::vector<Vec>& vectors) {
  if (vectors.empty()) return 0;
  return rank_exact(RationalMatrix::from_rows(vectors));
}

Rational det_exact(const RationalMatrix& M) {
  if (M.rows != M.cols) throw std::invalid_argument("determinant of a non-square matrix");
  if (M.rows == 0) return Rational(1);
  Rational scale = 1;
  for (int i = 0; i < M.rows; ++i) {
    Integer l = 1;
    for (int j = 0; j < M.cols; ++j) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), M(i, j).get_den_mpz_t());
    scale *= Rational(l);
  }
  auto A = clear_denominators(M);
  Integer d;
  bareiss(A, M.cols, &d);
  Rational out = Rational(d) / scale;
  out.canonicalize();
  return out;
}

bool linearly_independent(const std::vector<Vec>& vs) { return rank_of(vs) == static_cast<int>(vs.size()); }

bool affinely_independent(const std::vector<Vec>& vs) {
  if (vs.empty()) throw std::invalid_argument("affine independence of an empty list");
  std::vector<Vec> diff;
  for (std::size_t i = 1; i < vs.size(); ++i) {
    if (vs[i].size() != vs[0].size()) throw std::invalid_argument("dimension mismatch");
    Vec d(vs[i].size());
    for (std::size_t j = 0; j < d.size(); ++j) d[j] = vs[i][j] - vs[0][j];
    diff.push_back(std::move(d));
  }
  return rank_of(diff) == static_cast<int>(diff.size());
}

bool reverify(const IndependenceCertificate& cert) {
  std::vector<Vec> all = cert.base;
  all.insert(all.end(), cert.sampled.begin(), cert.sampled.end());
  for (const auto& c : cert.checks) {
    int rank = -1;
    if (c.name == "linear") rank = rank_of(all);
    else if (c.name == "affine") {
      rank = affinely_independent(all) ? static_cast<int>(all.size()) - 1 : -1;
      if (rank < 0) return false;
    } else if (c.name == "rank_two") rank = rank_of(all);
    else if (c.name == "bordered_det") {
      RationalMatrix M = RationalMatrix::from_columns(cert.sampled);
      rank = rank_exact(M);
    } else
      return false;
    if (rank != c.rank || (rank == c.expected) != c.pass) return false;
  }
  return cert.pass == std::all_of(cert.checks.begin(), cert.checks.end(), [](const RankCheck& c) { return c.pass; });
}

IndependenceCertificate sample_linear_extension(const std::vector<Vec>& V, int s, int m, std::uint64_t seed) {
  int r = rank_of(V);
  if (r != static_cast<int>(V.size())) throw std::invalid_argument("V must be a basis");
  if (r + s > m) throw std::invalid_argument("r + s exceeds the dimension");
  for (const auto& v : V)
    if (static_cast<int>(v.size()) != m) throw std::invalid_argument("dimension mismatch");
  IndependenceCertificate cert;
  cert.lemma = "linear";
  cert.seed = seed;
  cert.dim = m;
  cert.base = V;
  for (int attempt = 0; attempt < kRetryBound; ++attempt) {
    GridSampler g(derive_seed(seed, static_cast<std::uint64_t>(attempt)));
    cert.attempts = attempt + 1;
    cert.sampled.clear();
    for (int i = 0; i < s; ++i) cert.sampled.push_back(g.vector(static_cast<std::size_t>(m)));
    std::vector<Vec> all = V;
    all.insert(all.end(), cert.sampled.begin(), cert.sampled.end());
    RankCheck c{"linear", rank_of(all), r + s, false};
    c.pass = c.rank == c.expected;
    cert.checks = {c};
    if (c.pass) {
      cert.pass = true;
      return cert;
    }
  }
  throw std::runtime_error("linear extension: retries exhausted");
}

IndependenceCertificate sample_affine_extension(const std::vector<Vec>& V, int s, int m, std::uint64_t seed) {
  int r = static_cast<int>(V.size());
  if (r + s > m + 1) throw std::invalid_argument("r + s exceeds m + 1");
  if (r > 0 && !affinely_independent(V)) throw std::invalid_argument("V must be affinely independent");
  IndependenceCertificate cert;
  cert.lemma = "affine";
  cert.seed = seed;
  cert.dim = m;
  cert.base = V;
  for (int attempt = 0; attempt < kRetryBound; ++attempt) {
    GridSampler g(derive_seed(seed, static_cast<std::uint64_t>(attempt)));
    cert.attempts = attempt + 1;
    std::vector<Vec> pts = V;
    cert.sampled.clear();
    int todo = s;
    if (pts.empty() && todo > 0) {
      pts.push_back(g.vector(static_cast<std::size_t>(m)));
      cert.sampled.push_back(pts.back());
      --todo;
    }
    // Differences from v_1 extended linearly, then shifted back by v_1.
    std::vector<Vec> diff;
    for (std::size_t i = 1; i < pts.size(); ++i) {
      Vec d(static_cast<std::size_t>(m));
      for (int j = 0; j < m; ++j) d[static_cast<std::size_t>(j)] = pts[i][static_cast<std::size_t>(j)] - pts[0][static_cast<std::size_t>(j)];
      diff.push_back(d);
    }
    for (int i = 0; i < todo; ++i) {
      Vec w = g.vector(static_cast<std::size_t>(m));
      for (int j = 0; j < m; ++j) w[static_cast<std::size_t>(j)] += pts[0][static_cast<std::size_t>(j)];
      cert.sampled.push_back(w);
    }
    std::vector<Vec> all = V;
    all.insert(all.end(), cert.sampled.begin(), cert.sampled.end());
    bool ok = all.empty() || affinely_independent(all);
    RankCheck c{"affine", ok ? static_cast<int>(all.size()) - 1 : -1, static_cast<int>(all.size()) - 1, ok};
    cert.checks = {c};
    if (ok) {
      cert.pass = true;
      return cert;
    }
  }
  throw std::runtime_error("affine extension: retries exhausted");
}

IndependenceCertificate rank_two_extension_check(const std::vector<Vec>& V, int r, int m, std::uint64_t seed) {
  if (r < 1 || r >= m) throw std::invalid_argument("need 1 <= r < m");
  int dv = rank_of(V);
  if (dv != static_cast<int>(V.size())) throw std::invalid_argument("V must be a basis");
  if (dv > m - 2) throw std::invalid_argument("dim V must be at most m - 2");
  IndependenceCertificate cert;
  cert.lemma = "rank_two";
  cert.seed = seed;
  cert.dim = m;
  cert.base = V;
  for (int attempt = 0; attempt < kRetryBound; ++attempt) {
    GridSampler g(derive_seed(seed, static_cast<std::uint64_t>(attempt)));
    cert.attempts = attempt + 1;
    Vec x = g.vector(static_cast<std::size_t>(r + m));
    Vec w1(x.begin(), x.begin() + m), w2(x.begin() + r, x.begin() + r + m);
    cert.sampled = {w1, w2};
    std::vector<Vec> all = V;
    all.push_back(w1);
    all.push_back(w2);
    RankCheck c{"rank_two", rank_of(all), dv + 2, false};
    c.pass = c.rank == c.expected;
    cert.checks = {c};
    if (c.pass) {
      cert.pass = true;
      return cert;
    }
  }
  throw std::runtime_error("rank-two extension: retries exhausted");
}

void validate_layout(const SymbolLayout& L) {
  int R = 2 * L.k - 1, C = 2 * L.k;
  if (L.k < 1 || static_cast<int>(L.cells.size()) != R) throw std::invalid_argument("layout must have 2k-1 rows");
  std::unordered_map<int, std::vector<std::pair<int, int>>> where;
  for (int i = 0; i < R; ++i) {
    if (static_cast<int>(L.cells[static_cast<std::size_t>(i)].size()) != C) throw std::invalid_argument("layout must have 2k columns");
    for (int j = 0; j < C; ++j) where[L.cells[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]].push_back({i, j});
  }
  for (const auto& [s, pos] : where) {
    if (pos.size() > 2) throw std::invalid_argument("symbol used more than twice");
    if (pos.size() == 2 && (pos[0].first == pos[1].first || pos[0].second == pos[1].second))
      throw std::invalid_argument("symbol repeated in a row or column");
  }
}

RationalMatrix layout_matrix(const SymbolLayout& L, const std::vector<Rational>& values) {
  int n = 2 * L.k;
  RationalMatrix M(n, n);
  for (int j = 0; j < n; ++j) M(0, j) = 1;
  for (int i = 1; i < n; ++i)
    for (int j = 0; j < n; ++j) M(i, j) = values.at(static_cast<std::size_t>(L.cells[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j)]));
  return M;
}

namespace {

int max_symbol(const SymbolLayout& L) {
  int mx = 0;
  for (const auto& row : L.cells)
    for (int s : row) mx = std::max(mx, s);
  return mx;
}

}  // namespace

IndependenceCertificate paired_symbol_matrix_check(const SymbolLayout& L, std::uint64_t seed) {
  validate_layout(L);
  IndependenceCertificate cert;
  cert.lemma = "paired_symbol";
  cert.seed = seed;
  cert.dim = 2 * L.k - 1;
  for (int attempt = 0; attempt < kRetryBound; ++attempt) {
    GridSampler g(derive_seed(seed, static_cast<std::uint64_t>(attempt)));
    cert.attempts = attempt + 1;
    Vec values = g.vector(static_cast<std::size_t>(max_symbol(L) + 1));
    auto M = layout_matrix(L, values);
    cert.sampled.clear();
    for (int j = 0; j < M.cols; ++j) {
      Vec col(static_cast<std::size_t>(M.rows));
      for (int i = 0; i < M.rows; ++i) col[static_cast<std::size_t>(i)] = M(i, j);
      cert.sampled.push_back(col);
    }
    RankCheck c{"bordered_det", rank_exact(M), M.rows, false};
    c.pass = c.rank == c.expected;
    cert.checks = {c};
    if (c.pass) {
      cert.pass = true;
      return cert;
    }
  }
  cert.pass = false;
  return cert;
}

bool determinant_not_identically_zero(const SymbolLayout& L) {
  validate_layout(L);
  const int n = 2 * L.k;
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  std::unordered_map<std::uint64_t, long long> coeff;
  int sym[8];
  do {
    int inv = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) inv += perm[static_cast<std::size_t>(i)] > perm[static_cast<std::size_t>(j)];
    for (int i = 1; i < n; ++i) sym[i - 1] = L.cells[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])];
    std::sort(sym, sym + (n - 1));
    std::uint64_t key = 0;
    for (int i = 0; i < n - 1; ++i) key = key * 64 + static_cast<std::uint64_t>(sym[i] + 1);
    coeff[key] += inv % 2 ? -1 : 1;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return std::any_of(coeff.begin(), coeff.end(), [](const auto& kv) { return kv.second != 0; });
}

namespace {

SymbolLayout layout_from_pairs(int k, const std::vector<std::pair<int, int>>& pairs) {
  int R = 2 * k - 1, C = 2 * k;
  SymbolLayout L;
  L.k = k;
  L.cells.assign(static_cast<std::size_t>(R), std::vector<int>(static_cast<std::size_t>(C)));
  for (int i = 0; i < R * C; ++i) L.cells[static_cast<std::size_t>(i / C)][static_cast<std::size_t>(i % C)] = i;
  for (auto [a, b] : pairs) L.cells[static_cast<std::size_t>(b / C)][static_cast<std::size_t>(b % C)] = a;
  return L;
}

}  // namespace

SymbolLayout shifted_pairs_layout(int k, const std::vector<int>& shifts) {
  int R = 2 * k - 1;
  if (static_cast<int>(shifts.size()) > k) throw std::invalid_argument("at most k column pairs");
  std::vector<std::pair<int, int>> pairs;
  int C = 2 * k;
  for (std::size_t p = 0; p < shifts.size(); ++p) {
    int s = shifts[p];
    if (s < 1 || s >= R) throw std::invalid_argument("shift must lie in 1..2k-2");
    int a = static_cast<int>(2 * p), b = a + 1;
    // column b holds column a cyclically shifted by s
    for (int i = 0; i < R; ++i) pairs.push_back({i * C + a, static_cast<int>(mod_floor(i - s, R)) * C + b});
  }
  return layout_from_pairs(k, pairs);
}

SymbolLayout random_layout(int k, std::uint64_t seed) {
  GridSampler g(seed);
  int R = 2 * k - 1, C = 2 * k;
  std::vector<int> partner(static_cast<std::size_t>(R * C), -1);
  std::vector<std::pair<int, int>> pairs;
  int tries = static_cast<int>(g.below(static_cast<std::uint64_t>(R * C)));
  for (int t = 0; t < tries; ++t) {
    int a = static_cast<int>(g.below(static_cast<std::uint64_t>(R * C))), b = static_cast<int>(g.below(static_cast<std::uint64_t>(R * C)));
    if (a == b || partner[static_cast<std::size_t>(a)] >= 0 || partner[static_cast<std::size_t>(b)] >= 0) continue;
    if (a / C == b / C || a % C == b % C) continue;
    partner[static_cast<std::size_t>(a)] = b;
    partner[static_cast<std::size_t>(b)] = a;
    pairs.push_back({std::min(a, b), std::max(a, b)});
  }
  return layout_from_pairs(k, pairs);
}

BruteReport brute_verify(int k, std::uint64_t seed, bool compare_random) {
  if (k < 1 || k > 3) throw std::invalid_argument("brute_verify supports k <= 3");
  BruteReport rep;
  rep.k = k;
  int R = 2 * k - 1, C = 2 * k, n = R * C;
  auto visit = [&](const SymbolLayout& L) {
    ++rep.layouts;
    bool nz = determinant_not_identically_zero(L);
    if (nz) ++rep.nonzero;
    else rep.failures.push_back(L);
    if (compare_random) {
      auto cert = paired_symbol_matrix_check(L, derive_seed(seed, rep.layouts));
      if (cert.pass == nz) ++rep.agree_with_random;
    }
  };
  std::vector<std::pair<int, int>> pairs;
  if (k <= 2) {
    std::vector<char> used(static_cast<std::size_t>(n), 0);
    std::function<void(int)> rec = [&](int i) {
      while (i < n && used[static_cast<std::size_t>(i)]) ++i;
      if (i == n) {
        visit(layout_from_pairs(k, pairs));
        return;
      }
      used[static_cast<std::size_t>(i)] = 1;
      rec(i + 1);
      for (int j = i + 1; j < n; ++j)
        if (!used[static_cast<std::size_t>(j)] && j / C != i / C && j % C != i % C) {
          used[static_cast<std::size_t>(j)] = 1;
          pairs.push_back({i, j});
          rec(i + 1);
          pairs.pop_back();
          used[static_cast<std::size_t>(j)] = 0;
        }
      used[static_cast<std::size_t>(i)] = 0;
    };
    rec(0);
    return rep;
  }
  std::vector<std::pair<int, int>> valid;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      if (a / C != b / C && a % C != b % C) valid.push_back({a, b});
  visit(layout_from_pairs(k, {}));
  for (std::size_t p = 0; p < valid.size(); ++p) {
    visit(layout_from_pairs(k, {valid[p]}));
    for (std::size_t q = p + 1; q < valid.size(); ++q) {
      auto [a, b] = valid[p];
      auto [c, d] = valid[q];
      if (a == c || a == d || b == c || b == d) continue;
      visit(layout_from_pairs(k, {valid[p], valid[q]}));
    }
  }
  // Column pairs related by a cyclic shift, as produced by the translation case.
  std::function<void(std::vector<int>&, int)> shifts = [&](std::vector<int>& cur, int from) {
    if (!cur.empty()) visit(shifted_pairs_layout(k, cur));
    if (static_cast<int>(cur.size()) == k) return;
    for (int s = from; s < R; ++s) {
      cur.push_back(s);
      shifts(cur, s);
      cur.pop_back();
    }
  };
  std::vector<int> cur;
  shifts(cur, 1);
  return rep;
}

std::vector<Vec> PeriodicitySubspace::basis() const {
  if (n < 1 || S < 1 || d < 1) throw std::invalid_argument("bad periodicity subspace");
  if (n > 2 * S) throw std::invalid_argument("period exceeds the window");
  std::vector<Vec> out;
  for (int c = 0; c < n; ++c)
    for (int t = 0; t < d; ++t) {
      Vec e(static_cast<std::size_t>(2 * S * d), Rational(0));
      for (int a = c; a < 2 * S; a += n) e[static_cast<std::size_t>(a * d + t)] = 1;
      out.push_back(e);
    }
  return out;
}

bool PeriodicitySubspace::contains(const Vec& z) const { return distance(z) == 0; }

Rational PeriodicitySubspace::distance(const Vec& z) const {
  if (static_cast<int>(z.size()) != 2 * S * d) throw std::invalid_argument("shape mismatch");
  Rational best = 0;
  for (int a = 0; a < 2 * S; ++a)
    for (int b = a + n; b < 2 * S; b += n)
      for (int t = 0; t < d; ++t)
        best = std::max(best, abs_of(z[static_cast<std::size_t>(a * d + t)] - z[static_cast<std::size_t>(b * d + t)]));
  return best;
}

namespace {

// One solution of A x = b, or nullopt.
std::optional<Vec> solve(RationalMatrix A, Vec b) {
  int rows = A.rows, cols = A.cols;
  std::vector<int> pivot_col;
  int r = 0;
  for (int c = 0; c < cols && r < rows; ++c) {
    int p = r;
    while (p < rows && A(p, c) == 0) ++p;
    if (p == rows) continue;
    for (int j = 0; j < cols; ++j) std::swap(A(p, j), A(r, j));
    std::swap(b[static_cast<std::size_t>(p)], b[static_cast<std::size_t>(r)]);
    Rational inv = 1 / A(r, c);
    for (int j = 0; j < cols; ++j) A(r, j) *= inv;
    b[static_cast<std::size_t>(r)] *= inv;
    for (int i = 0; i < rows; ++i) {
      if (i == r || A(i, c) == 0) continue;
      Rational f = A(i, c);
      for (int j = 0; j < cols; ++j) A(i, j) -= f * A(r, j);
      b[static_cast<std::size_t>(i)] -= f * b[static_cast<std::size_t>(r)];
    }
    pivot_col.push_back(c);
    ++r;
  }
  for (int i = r; i < rows; ++i)
    if (b[static_cast<std::size_t>(i)] != 0) return std::nullopt;
  Vec x(static_cast<std::size_t>(cols), Rational(0));
  for (int i = 0; i < r; ++i) x[static_cast<std::size_t>(pivot_col[static_cast<std::size_t>(i)])] = b[static_cast<std::size_t>(i)];
  return x;
}

}  // namespace

std::optional<Vec> barycentric(const Vec& p, const std::vector<Vec>& vertices) {
  std::size_t k = vertices.size();
  if (k == 0) return std::nullopt;
  for (unsigned mask = 1; mask < (1u << k); ++mask) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < k; ++i)
      if (mask >> i & 1u) idx.push_back(i);
    std::vector<Vec> sub;
    for (auto i : idx) sub.push_back(vertices[i]);
    if (!affinely_independent(sub)) continue;
    RationalMatrix A(static_cast<int>(p.size()) + 1, static_cast<int>(idx.size()));
    Vec b(p.size() + 1);
    for (std::size_t j = 0; j < idx.size(); ++j) {
      for (std::size_t i = 0; i < p.size(); ++i) A(static_cast<int>(i), static_cast<int>(j)) = sub[j][i];
      A(static_cast<int>(p.size()), static_cast<int>(j)) = 1;
    }
    for (std::size_t i = 0; i < p.size(); ++i) b[i] = p[i];
    b[p.size()] = 1;
    auto x = solve(A, b);
    if (!x || std::any_of(x->begin(), x->end(), [](const Rational& q) { return q < 0; })) continue;
    Vec lam(k, Rational(0));
    for (std::size_t j = 0; j < idx.size(); ++j) lam[idx[j]] = (*x)[j];
    return lam;
  }
  return std::nullopt;
}

}  // namespace meandim
