#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "meandim/rational.hpp"

namespace meandim {

struct RationalMatrix {
  int rows = 0, cols = 0;
  std::vector<Rational> a;

  RationalMatrix() = default;
  RationalMatrix(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r * c)) {}
  Rational& operator()(int i, int j) { return a[static_cast<std::size_t>(i * cols + j)]; }
  const Rational& operator()(int i, int j) const { return a[static_cast<std::size_t>(i * cols + j)]; }
  static RationalMatrix from_rows(const std::vector<Vec>& rows);
  static RationalMatrix from_columns(const std::vector<Vec>& cols);
};

int rank_exact(const RationalMatrix& M);
int rank_of(const std::vector<Vec>& vectors);
Rational det_exact(const RationalMatrix& M);
bool linearly_independent(const std::vector<Vec>& vs);
bool affinely_independent(const std::vector<Vec>& vs);

struct RankCheck {
  std::string name;
  int rank = 0;
  int expected = 0;
  bool pass = false;
};

struct IndependenceCertificate {
  std::string lemma;
  std::uint64_t seed = 0;
  int attempts = 0;
  int dim = 0;
  std::vector<Vec> base;
  std::vector<Vec> sampled;
  std::vector<RankCheck> checks;
  bool pass = false;
};

// Re-runs every recorded rank check from the stored vectors.
bool reverify(const IndependenceCertificate& cert);

inline constexpr int kRetryBound = 16;

IndependenceCertificate sample_linear_extension(const std::vector<Vec>& V, int s, int m, std::uint64_t seed);
IndependenceCertificate sample_affine_extension(const std::vector<Vec>& V, int s, int m, std::uint64_t seed);
IndependenceCertificate rank_two_extension_check(const std::vector<Vec>& V, int r, int m, std::uint64_t seed);

// (2k-1) x 2k table of symbol ids.
struct SymbolLayout {
  int k = 1;
  std::vector<std::vector<int>> cells;
};

void validate_layout(const SymbolLayout& L);
RationalMatrix layout_matrix(const SymbolLayout& L, const std::vector<Rational>& values);  // with the row of ones
IndependenceCertificate paired_symbol_matrix_check(const SymbolLayout& L, std::uint64_t seed);
// Symbolic expansion of the bordered determinant; true iff it is not the zero polynomial.
bool determinant_not_identically_zero(const SymbolLayout& L);

struct BruteReport {
  int k = 0;
  std::size_t layouts = 0;
  std::size_t nonzero = 0;
  std::size_t agree_with_random = 0;
  std::vector<SymbolLayout> failures;
};
// k <= 2: every valid layout. k = 3: every layout with at most two repeated pairs, plus every
// layout whose columns come in cyclically shifted pairs.
BruteReport brute_verify(int k, std::uint64_t seed, bool compare_random = true);
SymbolLayout random_layout(int k, std::uint64_t seed);
SymbolLayout shifted_pairs_layout(int k, const std::vector<int>& shifts);

struct PeriodicitySubspace {
  int n = 1, S = 1, d = 1;
  int dimension() const { return n * d; }
  std::vector<Vec> basis() const;
  bool contains(const Vec& z) const;
  Rational distance(const Vec& z) const;
};

// Coefficients lambda >= 0 with sum 1 and sum lambda_i v_i = p, if p lies in the convex hull.
std::optional<Vec> barycentric(const Vec& p, const std::vector<Vec>& vertices);

}  // namespace meandim
