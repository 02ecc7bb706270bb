#include <doctest.h>

#include <random>

#include "meandim/independence.hpp"
#include "oracles.hpp"

using namespace meandim;

namespace {

std::vector<Vec> random_rows(std::mt19937_64& rng, int r, int c, int range = 5) {
  std::vector<Vec> out(static_cast<std::size_t>(r), Vec(static_cast<std::size_t>(c)));
  for (auto& row : out)
    for (auto& q : row) q = oracle::q(static_cast<long>(rng() % static_cast<unsigned>(2 * range + 1)) - range, 1 + static_cast<long>(rng() % 3));
  return out;
}

std::vector<Vec> low_rank_rows(std::mt19937_64& rng, int r, int c, int k) {
  auto basis = random_rows(rng, k, c);
  auto coef = random_rows(rng, r, k);
  std::vector<Vec> out(static_cast<std::size_t>(r), Vec(static_cast<std::size_t>(c), Rational(0)));
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < k; ++j)
      for (int t = 0; t < c; ++t) out[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)] += coef[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] * basis[static_cast<std::size_t>(j)][static_cast<std::size_t>(t)];
  return out;
}

Rational det_cofactor(const std::vector<Vec>& m) {
  std::size_t n = m.size();
  if (n == 1) return m[0][0];
  Rational s = 0;
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<Vec> minor;
    for (std::size_t i = 1; i < n; ++i) {
      Vec row;
      for (std::size_t t = 0; t < n; ++t)
        if (t != j) row.push_back(m[i][t]);
      minor.push_back(row);
    }
    Rational term = m[0][j] * det_cofactor(minor);
    s += j % 2 ? Rational(-term) : term;
  }
  return s;
}

}  // namespace

TEST_SUITE("independence") {
  TEST_CASE("rank examples") {
    RationalMatrix I(3, 3);
    for (int i = 0; i < 3; ++i) I(i, i) = 1;
    CHECK(rank_exact(I) == 3);
    CHECK(rank_exact(RationalMatrix(3, 3)) == 0);
    CHECK(rank_of({{1, 2}, {2, 4}, {3, 6}}) == 1);
    CHECK(rank_of({}) == 0);
  }

  TEST_CASE("rank agrees with Gauss-Jordan on random low-rank matrices") {
    std::mt19937_64 rng(21);
    for (int t = 0; t < 300; ++t) {
      int r = 1 + static_cast<int>(rng() % 6), c = 1 + static_cast<int>(rng() % 6), k = static_cast<int>(rng() % 5);
      auto rows = low_rank_rows(rng, r, c, k);
      CHECK(rank_of(rows) == oracle::rank(rows));
      CHECK(rank_exact(RationalMatrix::from_rows(rows)) == rank_exact(RationalMatrix::from_columns(rows)));
    }
  }

  TEST_CASE("determinant agrees with cofactor expansion") {
    std::mt19937_64 rng(4);
    for (int t = 0; t < 200; ++t) {
      int n = 1 + static_cast<int>(rng() % 5);
      auto rows = random_rows(rng, n, n);
      CHECK(det_exact(RationalMatrix::from_rows(rows)) == det_cofactor(rows));
    }
  }

  TEST_CASE("affine independence examples") {
    CHECK(affinely_independent({{0, 0}, {1, 0}, {0, 1}}));
    CHECK_FALSE(affinely_independent({{0, 0}, {1, 0}, {2, 0}}));
    std::mt19937_64 rng(8);
    for (int t = 0; t < 50; ++t) CHECK_FALSE(affinely_independent(random_rows(rng, 4, 2)));
    for (int t = 0; t < 100; ++t) {
      auto pts = random_rows(rng, 1 + static_cast<int>(rng() % 4), 3);
      CHECK(affinely_independent(pts) == oracle::affinely_independent(pts));
    }
  }

  TEST_CASE("linear extension") {
    auto c = sample_linear_extension({}, 3, 3, 1);
    CHECK(c.pass);
    CHECK(oracle::rank(c.sampled) == 3);
    auto t = sample_linear_extension({{1, 0, 0}}, 0, 3, 1);
    CHECK(t.pass);
    CHECK(t.sampled.empty());
    auto f = sample_linear_extension({{1, 0, 0, 0}, {0, 1, 1, 0}}, 2, 4, 9);
    CHECK(f.pass);
    std::vector<Vec> all = f.base;
    all.insert(all.end(), f.sampled.begin(), f.sampled.end());
    CHECK(oracle::rank(all) == 4);
    CHECK(reverify(f));
    CHECK_THROWS(sample_linear_extension({{1, 0}}, 2, 2, 1));
  }

  TEST_CASE("affine extension") {
    auto c = sample_affine_extension({}, 4, 3, 2);
    CHECK(c.pass);
    CHECK(oracle::affinely_independent(c.sampled));
    CHECK(sample_affine_extension({{oracle::q(1, 2), 0}}, 1, 2, 3).pass);
    auto l = sample_affine_extension({{1, 0, 0}, {0, 1, 0}}, 2, 3, 5);
    std::vector<Vec> all = l.base;
    all.insert(all.end(), l.sampled.begin(), l.sampled.end());
    CHECK(oracle::affinely_independent(all));
    CHECK(reverify(l));
  }

  TEST_CASE("rank-two extension") {
    auto c = rank_two_extension_check({}, 1, 2, 3);
    CHECK(c.pass);
    REQUIRE(c.sampled.size() == 2);
    // (x1,x2) and (x2,x3): the overlap is shared
    CHECK(c.sampled[0][1] == c.sampled[1][0]);
    Rational det = c.sampled[0][0] * c.sampled[1][1] - c.sampled[0][1] * c.sampled[1][0];
    CHECK(det != 0);
    auto m = rank_two_extension_check({{1, 0, 0, 0}, {0, 1, 0, 0}}, 3, 4, 7);
    std::vector<Vec> all = m.base;
    all.insert(all.end(), m.sampled.begin(), m.sampled.end());
    CHECK(oracle::rank(all) == 4);
    CHECK(reverify(m));
  }

  TEST_CASE("tampered certificates fail reverification") {
    auto c = sample_linear_extension({{1, 0, 0}}, 2, 3, 1);
    REQUIRE(reverify(c));
    auto bad = c;
    bad.sampled[1] = bad.sampled[0];
    CHECK_FALSE(reverify(bad));
  }

  TEST_CASE("paired symbol layouts") {
    SymbolLayout k1{1, {{0, 1}}};
    CHECK(determinant_not_identically_zero(k1));
    CHECK(paired_symbol_matrix_check(k1, 1).pass);
    SymbolLayout bad{1, {{0, 0}}};
    CHECK_THROWS(validate_layout(bad));
    SymbolLayout distinct{2, {{0, 1, 2, 3}, {4, 5, 6, 7}, {8, 9, 10, 11}}};
    CHECK(determinant_not_identically_zero(distinct));
    auto cert = paired_symbol_matrix_check(distinct, 4);
    CHECK(cert.pass);
    CHECK(oracle::affinely_independent(cert.sampled));
    SymbolLayout rep{2, {{0, 1, 2, 3}, {4, 0, 6, 7}, {8, 9, 10, 11}}};
    CHECK(determinant_not_identically_zero(rep));
    CHECK(paired_symbol_matrix_check(rep, 4).pass);
  }

  TEST_CASE("symbolic determinant agrees with random evaluation on random layouts") {
    for (int k = 1; k <= 3; ++k)
      for (std::uint64_t s = 0; s < 30; ++s) {
        auto L = random_layout(k, s);
        CHECK_NOTHROW(validate_layout(L));
        bool nz = determinant_not_identically_zero(L);
        CHECK(paired_symbol_matrix_check(L, s).pass == nz);
      }
  }

  TEST_CASE("shifted pairs layouts") {
    for (int s = 1; s <= 4; ++s) {
      auto L = shifted_pairs_layout(3, {s, s, s});
      CHECK_NOTHROW(validate_layout(L));
      CHECK(determinant_not_identically_zero(L));
    }
  }

  TEST_CASE("brute verification at k <= 2") {
    for (int k = 1; k <= 2; ++k) {
      auto rep = brute_verify(k, 1);
      CHECK(rep.failures.empty());
      CHECK(rep.nonzero == rep.layouts);
      CHECK(rep.agree_with_random == rep.layouts);
    }
  }

  TEST_CASE("periodicity subspace") {
    PeriodicitySubspace p{1, 1, 1};
    CHECK(p.contains({oracle::q(3, 10), oracle::q(3, 10)}));
    CHECK_FALSE(p.contains({oracle::q(3, 10), oracle::q(4, 10)}));
    CHECK(p.distance({oracle::q(3, 10), oracle::q(4, 10)}) == oracle::q(1, 10));
    PeriodicitySubspace q{2, 2, 1};
    std::mt19937_64 rng(2);
    for (int t = 0; t < 20; ++t) {
      Rational a = oracle::q(static_cast<long>(rng() % 100), 100), b = oracle::q(static_cast<long>(rng() % 100), 100);
      CHECK(q.contains({a, b, a, b}));
    }
    CHECK(oracle::rank(q.basis()) == q.dimension());
    for (const auto& v : q.basis()) CHECK(q.contains(v));
  }

  TEST_CASE("barycentric coordinates") {
    std::vector<Vec> tri{{0, 0}, {1, 0}, {0, 1}};
    auto c = barycentric({oracle::q(1, 4), oracle::q(1, 4)}, tri);
    REQUIRE(c);
    Vec p(2, Rational(0));
    Rational sum = 0;
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK((*c)[i] >= 0);
      sum += (*c)[i];
      for (int t = 0; t < 2; ++t) p[static_cast<std::size_t>(t)] += (*c)[i] * tri[i][static_cast<std::size_t>(t)];
    }
    CHECK(sum == 1);
    CHECK(p == Vec{oracle::q(1, 4), oracle::q(1, 4)});
    CHECK_FALSE(barycentric({1, 1}, tri));
  }
}
