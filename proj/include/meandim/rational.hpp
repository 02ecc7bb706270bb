#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace meandim {

using Rational = mpq_class;
using Integer = mpz_class;
using Vec = std::vector<Rational>;

// Accepts "p/q", "p" and finite decimals such as "0.125".
Rational parse_rational(const std::string& s);
std::string to_string(const Rational& q);

Integer floor_of(const Rational& q);
Integer ceil_of(const Rational& q);
Rational frac_of(const Rational& q);  // q - floor(q), in [0,1)
long long mod_floor(long long a, long long m);
Rational abs_of(const Rational& q);
Rational pow2_neg(int k);  // 2^{-k}

std::vector<std::string> to_strings(const Vec& v);
Vec parse_vec(const std::vector<std::string>& v);

// Deterministic seeded sampling on the grid {a/(2^31-1)}.
inline constexpr std::uint64_t kGridDenominator = 2147483647ULL;

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

class GridSampler {
 public:
  explicit GridSampler(std::uint64_t seed) : engine_(seed) {}
  std::uint64_t below(std::uint64_t bound);  // uniform in [0, bound)
  Rational unit();                           // uniform grid point of [0,1]
  Rational between(const Rational& lo, const Rational& hi);
  Vec vector(std::size_t n);

 private:
  std::mt19937_64 engine_;
};

}  // namespace meandim
