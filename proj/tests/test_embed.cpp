#include <doctest.h>

#include <random>
#include <set>

#include "meandim/embed.hpp"
#include "oracles.hpp"

using namespace meandim;

namespace {

SymbolicSystem fibonacci(int window = 256) { return SymbolicSystem::substitution("01", {{'0', "01"}, {'1', "0"}}, window); }

Rational absq(const Rational& q) { return q < 0 ? Rational(-q) : q; }

// z is n-block periodic: block k equals block k + n.
bool block_periodic(const Vec& z, int n, int d) {
  for (std::size_t i = 0; i + static_cast<std::size_t>(n * d) < z.size(); ++i)
    if (z[i] != z[i + static_cast<std::size_t>(n * d)]) return false;
  return true;
}

Vec sub_blocks(const Vec& v, int d, int a, int b) { return Vec(v.begin() + a * d, v.begin() + (b + 1) * d); }

}  // namespace

TEST_SUITE("embed") {
  TEST_CASE("partition of unity on a partition is an indicator") {
    auto fs = SymbolicSystem::full_shift("01", 32);
    CylinderAlgebra alg(fs);
    auto pou = partition_of_unity(alg, width_partition(alg, 1, 0));
    REQUIRE(pou.size() == 2);
    for (const auto& w : fs.language(3)) {
      Window x{w, -1};
      auto wt = pou.weights(x);
      for (std::size_t u = 0; u < 2; ++u) CHECK(wt[u] == (pou.members()[u].contains(x) ? 1 : 0));
    }
  }

  TEST_CASE("partition of unity splits evenly on a symmetric overlap") {
    auto fs = SymbolicSystem::full_shift("abc", 32);
    CylinderAlgebra alg(fs);
    Cover c{{CylinderRegion(0, 1, {"a", "b"}), CylinderRegion(0, 1, {"b", "c"})}};
    auto pou = partition_of_unity(alg, c);
    CHECK(pou.weights(Window::centered("b")) == Vec{oracle::q(1, 2), oracle::q(1, 2)});
    CHECK(pou.support(Window::centered("b")) == std::vector<int>{0, 1});
    REQUIRE(pou.anchors().size() == 2);
    CHECK(pou.weights(pou.anchors()[0]) == Vec{1, 0});
    CHECK(pou.weights(pou.anchors()[1]) == Vec{0, 1});
  }

  TEST_CASE("partition of unity weights are nonnegative, sum to one and vanish off the support") {
    auto gm = SymbolicSystem::sft("01", {"11"}, 32);
    CylinderAlgebra alg(gm);
    Cover c{{CylinderRegion(0, 1, {"0"}), CylinderRegion(0, 2, {"01", "10"})}};
    auto pou = partition_of_unity(alg, c);
    for (const auto& w : gm.language(7)) {
      Window x{w, -3};
      auto wt = pou.weights(x);
      Rational sum = 0;
      for (std::size_t u = 0; u < wt.size(); ++u) {
        CHECK(wt[u] >= 0);
        CHECK((wt[u] > 0) == pou.members()[u].contains(x));
        sum += wt[u];
      }
      CHECK(sum == 1);
    }
  }

  TEST_CASE("block helpers") {
    Vec v{1, 2, 3, 4, 5, 6};
    CHECK(block(v, 2, 1) == Vec{3, 4});
    CHECK(blocks(v, 2, 1, 2) == Vec{3, 4, 5, 6});
    CHECK(oplus(Vec{1, 2}, 2, 3) == Vec{1, 2, 1, 2, 1, 2});
    CHECK(bullet(v, 2, 1) == Vec{3, 4, 5, 6, 1, 2});
    CHECK(bullet(v, 2, -1) == Vec{5, 6, 1, 2, 3, 4});
  }

  TEST_CASE("F on disjoint regions separates values") {
    auto fs = SymbolicSystem::full_shift("ab", 32);
    CylinderAlgebra alg(fs);
    PartitionOfUnity p1(fs, {alg.cylinder("a", 0)}, {}), p2(fs, {alg.cylinder("b", 0)}, {});
    const Rational eps = oracle::q(1, 4);
    auto r = build_F_disjoint(p1, p2, {{oracle::q(1, 2)}}, {{oracle::q(1, 2)}}, 1, 1, 1, eps, 3);
    CHECK(r.cert.pass);
    CHECK(r.F1.v[0] != r.F2.v[0]);
    CHECK(absq(r.F1.v[0][0] - oracle::q(1, 2)) <= eps / 2);
    CHECK(r.F2.v[0] == Vec{oracle::q(1, 2)});

    auto r2 = build_F_disjoint(p1, p2, {{oracle::q(1, 2), oracle::q(1, 2)}}, {{oracle::q(1, 2)}}, 2, 1, 1, eps, 5);
    CHECK(r2.F1.v[0] != oplus(r2.F2.v[0], 1, 2));

    CHECK_THROWS(build_F_disjoint(p1, p1, {{0}}, {{0}}, 1, 1, 1, eps, 1));
    CHECK_THROWS(build_F_disjoint(p1, p2, {{0}}, {{0, 0}}, 1, 2, 1, eps, 1));
  }

  TEST_CASE("F translation: v and its block rotation are independent") {
    auto gm = SymbolicSystem::sft("01", {"11"}, 32);
    CylinderAlgebra alg(gm);
    PartitionOfUnity p(gm, {alg.cylinder("1", 0)}, {});
    auto r = build_F_translation(p, {{oracle::q(1, 2), oracle::q(1, 2)}}, 2, 1, 1, oracle::q(1, 4), 7);
    CHECK(r.cert.pass);
    const Vec& v = r.table.v[0];
    CHECK(oracle::rank({v, bullet(v, 1, 1)}) == 2);
    CHECK(v[0] * v[0] != v[1] * v[1]);
    // 1 -> T^2: 101 is allowed
    CHECK_THROWS(build_F_translation(p, {{0, 0, 0}}, 3, 1, 1, oracle::q(1, 4), 7));
    CHECK_THROWS(build_F_translation(p, {{0, 0}}, 2, 2, 1, oracle::q(1, 4), 7));
  }

  TEST_CASE("F avoiding periodic blocks, single window") {
    auto fs = SymbolicSystem::full_shift("ab", 32);
    CylinderAlgebra alg(fs);
    auto pou = partition_of_unity(alg, width_partition(alg, 1, 0));
    std::vector<Vec> t(2, Vec(3, oracle::q(1, 2)));
    auto r = build_F_avoid_periodic(pou, t, 3, 1, 1, 1, oracle::q(1, 4), 11, AvoidMode::SingleWindow);
    CHECK(r.cert.pass);
    for (const auto& v : r.table.v) CHECK(v[0] != v[1]);

    std::vector<Vec> t5(2, Vec(5, oracle::q(1, 2)));
    auto r2 = build_F_avoid_periodic(pou, t5, 5, 2, 1, 1, oracle::q(1, 4), 2, AvoidMode::SingleWindow);
    for (const auto& v : r2.table.v) CHECK_FALSE(block_periodic(sub_blocks(v, 1, 0, 3), 1, 1));
    CHECK_THROWS(build_F_avoid_periodic(pou, t, 3, 1, 1, 1, oracle::q(1, 4), 11, AvoidMode::Full));
    CHECK_THROWS(build_F_avoid_periodic(pou, t, 2, 1, 1, 1, oracle::q(1, 4), 11, AvoidMode::SingleWindow));
  }

  TEST_CASE("F avoiding periodic blocks, convex combinations") {
    auto fs = SymbolicSystem::full_shift("ab", 32);
    CylinderAlgebra alg(fs);
    auto pou = partition_of_unity(alg, width_partition(alg, 1, 0));
    const int N = 5, S = 2, n = 1, d = 2;
    std::vector<Vec> t(2, Vec(static_cast<std::size_t>(N * d), oracle::q(1, 2)));
    auto r = build_F_avoid_periodic(pou, t, N, S, n, d, oracle::q(1, 4), 4);
    CHECK(r.cert.pass);
    for (int l = 0; l < N - 2 * S; ++l)
      for (const auto& a : r.table.v)
        for (const auto& b : r.table.v)
          for (int k = 0; k <= 16; ++k) {
            Rational lam = oracle::q(k, 16);
            auto z0 = sub_blocks(a, d, l, l + 2 * S - 1), z1 = sub_blocks(b, d, l + 1, l + 2 * S);
            Vec z(z0.size());
            for (std::size_t i = 0; i < z.size(); ++i) z[i] = (1 - lam) * z0[i] + lam * z1[i];
            CHECK_FALSE(block_periodic(z, n, d));
          }
  }

  TEST_CASE("shifted block checks detect a repeated vertex") {
    auto fs = SymbolicSystem::full_shift("ab", 32);
    CylinderAlgebra alg(fs);
    auto pou = partition_of_unity(alg, width_partition(alg, 1, 0));
    std::vector<Vec> t(2, Vec(6, oracle::q(1, 2)));
    auto r = build_F_shifted_blocks(pou, t, 6, 2, 1, oracle::q(1, 4), 1);
    CHECK(r.cert.pass);
    auto again = shifted_block_checks(r.table.v, 6, 2, 1);
    REQUIRE(again.size() == r.cert.checks.size());
    for (std::size_t i = 0; i < again.size(); ++i) CHECK(again[i].rank == r.cert.checks[i].rank);
    auto bad = r.table.v;
    bad[1] = bad[0];
    auto checks = shifted_block_checks(bad, 6, 2, 1);
    CHECK_FALSE(std::all_of(checks.begin(), checks.end(), [](const RankCheck& c) { return c.pass; }));
  }

  TEST_CASE("clamp extension") {
    auto fs = SymbolicSystem::full_shift("01", 32);
    CylinderAlgebra alg(fs);
    auto ft = coordinate_function(fs, 1);
    const Rational eps = oracle::q(1, 4);
    auto same = clamp_extend({}, ft, eps);
    auto patched = clamp_extend({{alg.cylinder("0", 0), {oracle::q(1, 8)}, Window::centered("0")}}, ft, eps);
    auto fixed = clamp_extend({{alg.cylinder("1", 0), {1}, Window::centered("1")}}, ft, eps);
    for (const auto& w : fs.language(3)) {
      Window x{w, -1};
      CHECK(same(x) == ft(x));
      CHECK(fixed(x) == ft(x));
      CHECK(patched(x) == (x.at(0) == '0' ? Vec{oracle::q(1, 8)} : Vec{1}));
      CHECK(absq(patched(x)[0] - ft(x)[0]) < eps);
    }
    CHECK_THROWS(clamp_extend({{alg.cylinder("0", 0), {oracle::q(1, 2)}, Window::centered("0")}}, ft, eps));
    CHECK_THROWS(clamp_extend({{alg.cylinder("0", 0), {0}, Window::centered("1")}}, ft, eps));
    CHECK_THROWS(clamp_extend({{alg.cylinder("0", 0), {0}, Window::centered("0")}, {alg.cylinder("0", 0), {0}, Window::centered("0")}}, ft, eps));
  }

  TEST_CASE("orbit windows read the shifted coordinates") {
    auto fs = SymbolicSystem::full_shift("01", 32);
    auto f = coordinate_function(fs, 1);
    Window x{"0110100", -3};
    auto o = orbit_window(f, x, -2, 2);
    REQUIRE(o.size() == 5);
    for (int k = -2; k <= 2; ++k) CHECK(o[static_cast<std::size_t>(k + 2)][0] == (x.at(-k) == '1' ? 1 : 0));
    CHECK(orbit_window(f, x.shifted(1), -2, 1) == orbit_window(f, x, -1, 2));
  }

  TEST_CASE("K compatibility") {
    auto fs = SymbolicSystem::full_shift("01", 32);
    auto f = coordinate_function(fs, 1);
    auto empty = check_K_compatible(f, {}, 0, 0);
    CHECK(empty.ok);
    CHECK_FALSE(empty.margin);
    std::vector<std::pair<Window, Window>> K{{Window::centered("000"), Window::centered("010")}, {Window::centered("100"), Window::centered("000")}};
    auto c = check_K_compatible(f, K, -1, 1);
    CHECK(c.ok);
    CHECK(c.margin == Rational(1));
    auto constant = lookup_function(0, 1, {}, 1, Vec{oracle::q(1, 2)});
    CHECK_FALSE(check_K_compatible(constant, K, -1, 1).ok);
    CHECK_FALSE(check_K_compatible(f, K, 0, 0).ok);
  }

  TEST_CASE("embedding parameter plan") {
    auto p = plan_embedding_parameters(0, 1);
    CHECK(p.mdim_used == oracle::q(1, 32));
    CHECK(p.N == 16);
    CHECK(p.M == 8);
    CHECK(p.S == 1);
    CHECK(p.eps_prime == oracle::q(1, 4));
    CHECK_THROWS(plan_embedding_parameters(oracle::q(1, 16), 1));
    CHECK_THROWS(plan_embedding_parameters(-1, 1));
    auto q = plan_embedding_parameters(oracle::q(1, 4), 8);
    CHECK(16 * q.mdim_used * (1 + 2 * q.eps_prime) < 8);
    CHECK(Rational(q.S * 8) > q.N * q.mdim_used * (1 + 2 * q.eps_prime));
    CHECK(q.M == q.N / 2);
  }

  TEST_CASE("interpolated function at a half-integer return time") {
    auto fs = SymbolicSystem::full_shift("ab", 32);
    CylinderAlgebra alg(fs);
    auto pou = partition_of_unity(alg, width_partition(alg, 1, 0));
    VertexTable F{4, 1, {{0, oracle::q(1, 4), oracle::q(1, 2), oracle::q(3, 4)}, {1, 1, 1, 1}}};
    RokhlinFunction n;
    n.value = [](const Window&) { return oracle::q(5, 2); };
    n.integer_valued = false;
    n.height = 3;
    auto f = build_embedding_function(pou, F, n, 4);
    // half of block 2 of F(T^{-2}x) plus half of block 3 of F(T^{-3}x)
    CHECK(f(periodic_window("a", -6, 6)) == Vec{oracle::q(5, 8)});
    CHECK(f(periodic_window("b", -6, 6)) == Vec{1});
    Window x{"aaaaaab", -3};  // T^{-2}x in [a], T^{-3}x in [b]
    CHECK(f(x) == Vec{oracle::q(3, 4)});
    CHECK_THROWS(build_embedding_function(pou, VertexTable{2, 1, {{0, 0}, {1, 1}}}, n, 4));
  }

  TEST_CASE("interpolated function agrees with a direct block read") {
    auto fib = fibonacci();
    CylinderAlgebra alg(fib);
    auto cert = build_marker(alg, 7, 0);
    REQUIRE(verify_marker(cert).ok);
    auto pou = partition_of_unity(alg, width_partition(alg, 3, -1));
    VertexTable F{8, 1, {}};
    for (std::size_t u = 0; u < pou.size(); ++u) {
      Vec v;
      for (int k = 0; k < 8; ++k) v.push_back(oracle::q(static_cast<long>(u) * 8 + k, 64));
      F.v.push_back(v);
    }
    auto f = build_embedding_function(pou, F, rokhlin_from_marker(cert), 4);
    auto [lo, hi] = f.read_range();
    int checked = 0;
    for (const auto& w : fib.language(hi - lo + 20))
      for (int s = 0; s <= 20; ++s) {
        Window x{w.substr(static_cast<std::size_t>(s), static_cast<std::size_t>(hi - lo)), lo};
        CHECK(f(x) == block_read(f, x));
        // integer branch: block n(x) mod M of the member vector at T^{-(n mod M)} x
        int n = rokhlin_from_marker(cert)(x).get_num().get_si() % 4;
        Window z = x.shifted(-n);
        std::size_t u = 0;
        while (!pou.members()[u].contains(z)) ++u;
        CHECK(f(x) == Vec{F.v[u][static_cast<std::size_t>(n)]});
        ++checked;
      }
    CHECK(checked > 100);
  }

  TEST_CASE("epsilon embedding check") {
    auto fs = SymbolicSystem::full_shift("01", 32);
    auto f = coordinate_function(fs, 1);
    auto vac = check_epsilon_embedding(f, fs, nullptr, 2, 3, 1);
    CHECK(vac.pass);
    CHECK(vac.pairs == 0);
    auto good = check_epsilon_embedding(f, fs, nullptr, oracle::q(1, 2), 3, 1);
    CHECK(good.pass);
    CHECK(good.complete);
    CHECK(good.tau == Rational(1));
    auto constant = lookup_function(0, 1, {}, 1, Vec{0});
    auto bad = check_epsilon_embedding(constant, fs, nullptr, oracle::q(1, 2), 3, 1);
    CHECK_FALSE(bad.pass);
    REQUIRE(bad.witness);
    CHECK(metric_distance(bad.witness->first, bad.witness->second) >= oracle::q(1, 2));
    CHECK(bad.tau == Rational(0));
    auto id = SlidingCode::identity("01");
    auto viapi = check_epsilon_embedding(constant, fs, &id, oracle::q(1, 2), 3, 1);
    CHECK(viapi.pass);
    CHECK(viapi.separated_by_pi == viapi.pairs);
  }

  TEST_CASE("combining with an injective factor map") {
    auto fs = SymbolicSystem::full_shift("01", 32);
    auto g = lookup_function(0, 1, {}, 1, Vec{0});
    auto h = coordinate_function(fs, 1);
    auto cert = certify_injective(h, "01");
    REQUIRE(cert.pass);
    auto f = combine_with_factor(g, h, SlidingCode::identity("01"), cert);
    CHECK(f.d == 2);
    CHECK(f(Window::centered("010")) == Vec{0, 1});
    auto ch = lookup_function(0, 1, {{"0", {0}}, {"1", {0}}}, 1);
    auto bad = certify_injective(ch, "01");
    CHECK_FALSE(bad.pass);
    CHECK_THROWS(combine_with_factor(g, ch, SlidingCode::identity("01"), bad));
    CHECK_FALSE(certify_injective(lookup_function(0, 1, {{"0", {0}}}, 1), "01").pass);
  }

  TEST_CASE("periodic immersion on the golden mean shift") {
    auto gm = SymbolicSystem::sft("01", {"11"}, 32);
    auto P = build_periodic_immersion(gm, 2, 1, 5);
    CHECK(P.injective);
    CHECK(P.pairs_checked == 3);
    for (const auto& c : P.checks) CHECK(c.pass);
  }

  TEST_CASE("periodic immersion on the full 2-shift with period 3") {
    auto fs = SymbolicSystem::full_shift("01", 64);
    auto P = build_periodic_immersion(fs, 3, 1, 1);
    CHECK(P.injective);
    CHECK(P.pairs_checked == 45);
    // independent pairwise comparison of orbit values
    auto pts = enumerate_periodic_points(fs, 3).points();
    REQUIRE(pts.size() == 10);
    std::set<std::vector<Vec>> sigs;
    for (const auto& p : pts) sigs.insert(orbit_window(P.f, periodic_window(p, -40, 40), 0, 5));
    CHECK(sigs.size() == 10);
    auto ft = coordinate_function(fs, 1);
    for (const auto& p : pts) {
      Window x = periodic_window(p, -40, 40);
      CHECK(absq(P.f(x)[0] - ft(x)[0]) < oracle::q(1, 4));
    }
  }

  TEST_CASE("periodic injectivity check") {
    auto fs = SymbolicSystem::full_shift("01", 64);
    CHECK_FALSE(periodic_injective(lookup_function(0, 1, {}, 1, Vec{0}), fs, 2).first);
    CHECK(periodic_injective(coordinate_function(fs, 1), fs, 3).first);
    CHECK(build_periodic_immersion(fs, 2, 1, 3).injective);
  }
}
