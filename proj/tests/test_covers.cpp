#include <doctest.h>

#include "meandim/covers.hpp"
#include "oracles.hpp"

using namespace meandim;

namespace {

// ord by direct count over windows long enough to decide every member.
int brute_ord(const CylinderAlgebra& alg, const Cover& c, int lo, int hi) {
  int best = -1;
  for (const auto& w : alg.system().language(hi - lo)) {
    Window x{w, lo};
    int k = 0;
    for (const auto& m : c.members) k += m.contains(x);
    best = std::max(best, k - 1);
  }
  return best;
}

}  // namespace

TEST_SUITE("covers") {
  TEST_CASE("ord examples") {
    CylinderAlgebra fs(SymbolicSystem::full_shift("01", 32));
    CHECK(ord(fs, width_partition(fs, 2)) == 0);
    CylinderAlgebra abc(SymbolicSystem::full_shift("abc", 32));
    Cover c{{abc.from_cylinders({{"a", 0}, {"b", 0}}), abc.from_cylinders({{"b", 0}, {"c", 0}})}};
    CHECK(ord(abc, c) == 1);
    CylinderAlgebra gm(SymbolicSystem::sft("01", {"11"}, 32));
    auto j = join(gm, width_partition(gm, 1), width_partition(gm, 2, 1));
    CHECK(ord(gm, j) == 0);
  }

  TEST_CASE("ord agrees with a window count") {
    CylinderAlgebra gm(SymbolicSystem::sft("01", {"11"}, 32));
    Cover c{{gm.cylinder("0", 0), gm.cylinder("01", 0), gm.cylinder("1", 1), gm.cylinder("00", -1)}};
    CHECK(ord(gm, c) == brute_ord(gm, c, -1, 2));
  }

  TEST_CASE("join and iterate") {
    CylinderAlgebra fs(SymbolicSystem::full_shift("01", 32));
    auto a = width_partition(fs, 1);
    auto j = join(fs, a, a);
    CHECK(j.members.size() == a.members.size());
    CHECK(refines(fs, j, a));
    CHECK(refines(fs, a, j));
    auto it = iterate(fs, a, 3);
    CHECK(it.members.size() == 8);
    for (const auto& m : it.members) CHECK(m.words().size() == 1);
    CylinderAlgebra gm(SymbolicSystem::sft("01", {"11"}, 32));
    CHECK(iterate(gm, width_partition(gm, 1), 2).members.size() == 3);
  }

  TEST_CASE("D surrogate examples") {
    CylinderAlgebra fs(SymbolicSystem::full_shift("01", 32));
    CHECK(D_surrogate(fs, width_partition(fs, 2)).value == 0);
    // A cover containing a partition as a subcover.
    Cover c{{fs.cylinder("0", 0), fs.cylinder("1", 0), fs.cylinder("01", 0)}};
    auto r = D_surrogate(fs, c);
    CHECK(r.value == 0);
    CHECK(ord(fs, r.witness) == 0);
    // Overlap [10] is a cylinder: shrinking the second member removes it.
    Cover o{{fs.from_cylinders({{"0", 0}, {"10", 0}}), fs.cylinder("1", 0)}};
    CHECK(ord(fs, o) == 1);
    auto s = D_surrogate(fs, o);
    CHECK(s.value == 0);
    CHECK(refines(fs, s.witness, o));
    CHECK(fs.covers_space(s.witness.members));
  }

  TEST_CASE("D surrogate witnesses are covering refinements with the reported ord") {
    CylinderAlgebra gm(SymbolicSystem::sft("01", {"11"}, 32));
    std::mt19937_64 rng(9);
    for (int t = 0; t < 30; ++t) {
      Cover c;
      for (const auto& w : gm.system().language(2)) {
        c.members.push_back(gm.cylinder(w, 0));
        if (rng() % 2) c.members.push_back(gm.unite(gm.cylinder(w, 0), gm.cylinder(w.substr(0, 1), 0)));
      }
      auto r = D_surrogate(gm, c);
      CHECK(gm.covers_space(r.witness.members));
      CHECK(refines(gm, r.witness, c));
      CHECK(ord(gm, r.witness) == r.value);
      CHECK(r.value <= ord(gm, c));
    }
  }

  TEST_CASE("mdim report examples") {
    CylinderAlgebra gm(SymbolicSystem::sft("01", {"11"}, 32));
    for (const auto& e : mdim_report(gm, width_partition(gm, 1), 4)) CHECK(e.D == 0);
    CylinderAlgebra fs(SymbolicSystem::full_shift("01", 32));
    auto rep = mdim_report(fs, width_partition(fs, 1), 3);
    REQUIRE(rep.size() == 3);
    for (const auto& e : rep) CHECK(e.value == 0);
    Cover o{{fs.from_cylinders({{"0", 0}, {"10", 0}}), fs.cylinder("1", 0)}};
    auto ro = mdim_report(fs, o, 2);
    for (const auto& e : ro) CHECK(e.D <= ord(fs, iterate(fs, o, e.n)));
  }

  TEST_CASE("periodic dimension report") {
    auto gm = SymbolicSystem::sft("01", {"11"}, 32);
    for (const auto& e : perdim_report(gm, 3)) {
      CHECK_FALSE(e.empty);
      CHECK(e.value == 0);
    }
    auto fib = SymbolicSystem::substitution("01", {{'0', "01"}, {'1', "0"}}, 64);
    for (const auto& e : perdim_report(fib, 3)) CHECK(e.empty);
    auto fs = perdim_report(SymbolicSystem::full_shift("01", 32), 1);
    REQUIRE(fs.size() == 1);
    CHECK(fs[0].dim == 0);
  }

  TEST_CASE("validate_cover rejects a non-covering family") {
    CylinderAlgebra fs(SymbolicSystem::full_shift("01", 32));
    CHECK_THROWS(validate_cover(fs, Cover{{fs.cylinder("0", 0)}}));
    CHECK_NOTHROW(validate_cover(fs, width_partition(fs, 1)));
  }
}
