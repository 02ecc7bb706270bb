#include "meandim/rational.hpp"

#include <cctype>

namespace meandim {

Rational parse_rational(const std::string& raw) {
  std::string s;
  for (char c : raw)
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  if (s.empty()) throw std::invalid_argument("empty rational");
  auto dot = s.find('.');
  if (dot != std::string::npos) {
    if (s.find('/') != std::string::npos) throw std::invalid_argument("bad rational: " + raw);
    std::string whole = s.substr(0, dot), frac = s.substr(dot + 1);
    bool neg = !whole.empty() && whole[0] == '-';
    if (neg || (!whole.empty() && whole[0] == '+')) whole = whole.substr(1);
    if (whole.empty()) whole = "0";
    for (char c : whole + frac)
      if (!std::isdigit(static_cast<unsigned char>(c))) throw std::invalid_argument("bad rational: " + raw);
    Integer num(whole + frac);
    Integer den;
    mpz_ui_pow_ui(den.get_mpz_t(), 10, frac.size());
    Rational q(num, den);
    q.canonicalize();
    return neg ? Rational(-q) : q;
  }
  Rational q;
  if (q.set_str(s, 10) != 0) throw std::invalid_argument("bad rational: " + raw);
  if (q.get_den() == 0) throw std::invalid_argument("zero denominator: " + raw);
  q.canonicalize();
  return q;
}

std::string to_string(const Rational& q) { return q.get_str(); }

Integer floor_of(const Rational& q) {
  Integer r;
  mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return r;
}

Integer ceil_of(const Rational& q) {
  Integer r;
  mpz_cdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return r;
}

Rational frac_of(const Rational& q) { return q - Rational(floor_of(q)); }

long long mod_floor(long long a, long long m) {
  long long r = a % m;
  return r < 0 ? r + m : r;
}

Rational abs_of(const Rational& q) { return q < 0 ? Rational(-q) : q; }

Rational pow2_neg(int k) {
  Integer den;
  mpz_ui_pow_ui(den.get_mpz_t(), 2, static_cast<unsigned long>(k));
  return Rational(1, den);
}

std::vector<std::string> to_strings(const Vec& v) {
  std::vector<std::string> out;
  out.reserve(v.size());
  for (const auto& q : v) out.push_back(to_string(q));
  return out;
}

Vec parse_vec(const std::vector<std::string>& v) {
  Vec out;
  out.reserve(v.size());
  for (const auto& s : v) out.push_back(parse_rational(s));
  return out;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(splitmix64(seed) ^ (index * 0xd1b54a32d192ed03ULL));
}

std::uint64_t GridSampler::below(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("empty sampling range");
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % bound;
}

Rational GridSampler::unit() {
  Rational q(static_cast<unsigned long>(below(kGridDenominator + 1)),
             static_cast<unsigned long>(kGridDenominator));
  q.canonicalize();
  return q;
}

Rational GridSampler::between(const Rational& lo, const Rational& hi) {
  Rational q = lo + (hi - lo) * unit();
  return q;
}

Vec GridSampler::vector(std::size_t n) {
  Vec v(n);
  for (auto& q : v) q = unit();
  return v;
}

}  // namespace meandim
