// Runs the ten acceptance criteria; one PASS/FAIL line each, nonzero exit if any fails.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include <unistd.h>

#include "meandim/cli.hpp"
#include "meandim/combinat.hpp"
#include "meandim/embed.hpp"
#include "meandim/serialize.hpp"
#include "oracles.hpp"

using namespace meandim;
namespace fs = std::filesystem;

namespace {

struct Result {
  bool ok = true;
  std::string detail;
};

SymbolicSystem fibonacci(int window) { return SymbolicSystem::substitution("01", {{'0', "01"}, {'1', "0"}}, window); }

void fail(Result& r, const std::string& why) {
  if (r.ok) r.detail = why;
  r.ok = false;
  std::cerr << "  failure: " << why << "\n";
}

// 1
Result marker_constants() {
  Result r;
  int count = 0;
  for (int d = 0; d <= 4; ++d)
    for (int N = 1; N <= 16; ++N, ++count) {
      int m = marker_constant(d, N);
      if (m != (2 * d + 2) * N - 1 || m != (2 * d + 1) * N + N - 1) fail(r, "d=" + std::to_string(d) + " N=" + std::to_string(N));
    }
  r.detail = r.ok ? std::to_string(count) + " pairs" : r.detail;
  return r;
}

// 2: marker conditions by direct membership of T^{-i} x in W.
Result tower_pipeline() {
  Result r;
  auto fib = fibonacci(64);
  CylinderAlgebra alg(fib);
  std::size_t windows = 0;
  for (int N : {2, 3, 4}) {
    auto cert = build_marker(alg, N, 0);
    if (!verify_marker(cert).ok) fail(r, "verify_marker N=" + std::to_string(N));
    const auto& W = cert.W;
    int lo = W.lo() - 1, hi = W.hi() + std::max(N, cert.cover_bound) + 1;
    for (const auto& w : fib.language(hi - lo)) {
      Window x{w, lo};
      ++windows;
      auto in = [&](int i) { return W.contains(x.shifted(-i)); };
      for (int i = 1; i < N; ++i)
        if (in(0) && in(i)) fail(r, "W meets T^" + std::to_string(i) + "W at N=" + std::to_string(N));
      bool covered = false;
      for (int i = 0; i <= cert.cover_bound; ++i) covered = covered || in(i);
      if (!covered) fail(r, "uncovered window at N=" + std::to_string(N));
    }
  }
  if (r.ok) r.detail = "N=2,3,4, " + std::to_string(windows) + " windows";
  return r;
}

// 3: exceptional flags from return times counted directly.
Result rokhlin_property() {
  Result r;
  auto fib = fibonacci(128);
  CylinderAlgebra alg(fib);
  std::size_t windows = 0;
  for (int N : {2, 3, 4, 6}) {
    auto cert = build_marker(alg, N, 0);
    auto rf = rokhlin_from_marker(cert);
    auto rep = check_rokhlin(fib, rf, N - 1);
    if (!rep.ok) fail(r, "check_rokhlin N=" + std::to_string(N) + ": " + rep.first_failure);
    const auto& W = cert.W;
    const int K = 3 * N, H = cert.cover_bound;
    int lo = W.lo() - K - 1, hi = W.hi() + H + 2;
    for (const auto& w : fib.language(hi - lo)) {
      Window x{w, lo};
      ++windows;
      auto n_at = [&](int k) {
        for (int j = 0; j <= H + 1; ++j)
          if (W.contains(x.shifted(k - j))) return j;
        return -1;
      };
      std::vector<int> n(static_cast<std::size_t>(K + 1));
      for (int k = 0; k <= K; ++k) n[static_cast<std::size_t>(k)] = n_at(k);
      std::vector<bool> e(static_cast<std::size_t>(K));
      for (int k = 0; k < K; ++k) e[static_cast<std::size_t>(k)] = n[static_cast<std::size_t>(k + 1)] != n[static_cast<std::size_t>(k)] + 1;
      for (int k = 0; k < K; ++k) {
        if (x.shifted(k).covers(rf.lo, rf.hi) && rf(x.shifted(k)) != n[static_cast<std::size_t>(k)])
          fail(r, "return time mismatch");
        for (int i = 1; i < N && k + i < K; ++i)
          if (e[static_cast<std::size_t>(k)] && e[static_cast<std::size_t>(k + i)]) fail(r, "E meets T^" + std::to_string(i) + "E at N=" + std::to_string(N));
      }
      for (int k = 0; k + N - 1 <= K; ++k) {
        int bad = 0;
        for (int i = 0; i < N - 1; ++i) bad += e[static_cast<std::size_t>(k + i)];
        if (bad > 1) fail(r, "two exceptional indices among N-1 shifts");
      }
    }
  }
  if (r.ok) r.detail = "N=2,3,4,6, " + std::to_string(windows) + " windows";
  return r;
}

// 4
Result zn_lemma() {
  Result r;
  std::size_t cases = 0;
  for (int N = 2; N <= 64; ++N)
    for (int y = 1; y < N; ++y) {
      ++cases;
      auto s = greedy_separated_set(N, y);
      std::set<int> A(s.A.begin(), s.A.end());
      if (!A.count(0)) fail(r, "0 missing");
      for (int a : A)
        if (A.count((a + y) % N)) fail(r, "(y+A) meets A");
      if (static_cast<int>(A.size()) * 3 < N) fail(r, "|A| < N/3");
      if (N <= 24 && static_cast<int>(A.size()) > oracle::max_separated(N, y)) fail(r, "exceeds exhaustive maximum");
    }
  if (r.ok) r.detail = std::to_string(cases) + " (N,y)";
  return r;
}

// 5: floor/ceil residues from gmp integer division only.
long long residue(const Rational& q, int M, bool ceil) {
  mpz_class f, m;
  if (ceil) mpz_cdiv_q(f.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  else mpz_fdiv_q(f.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  mpz_fdiv_r_ui(m.get_mpz_t(), f.get_mpz_t(), static_cast<unsigned long>(M));
  return m.get_si();
}

Result good_segments() {
  Result r;
  std::mt19937_64 rng(20240601);
  const int trials = 10000;
  for (int t = 0; t < trials; ++t) {
    int M = 2 * (1 + static_cast<int>(rng() % 16));
    int first = -3 * M / 2, last = M / 2 - 1;
    Rational base = oracle::q(static_cast<long>(rng() % 2000) - 1000, 1 + static_cast<long>(rng() % 7));
    int bad = first + static_cast<int>(rng() % static_cast<unsigned>(2 * M + 1)) - 1;
    Rational jump = oracle::q(static_cast<long>(rng() % 200) - 100, 1 + static_cast<long>(rng() % 5));
    std::map<int, Rational> v;
    for (int j = first; j <= last; ++j) v[j] = base + j + (j > bad ? jump : Rational(0));
    int s = good_segment(v, M);
    bool ok = s >= first && s <= 0 && residue(v[s], M, false) <= M / 2;
    for (int j = s; ok && j <= s + M / 2 - 1; ++j)
      ok = residue(v[j], M, false) == residue(v[s], M, false) + (j - s) && residue(v[j], M, true) == residue(v[s], M, true) + (j - s);
    if (!ok) fail(r, "instance " + std::to_string(t) + " M=" + std::to_string(M));
  }
  if (r.ok) r.detail = std::to_string(trials) + " instances";
  return r;
}

// 6
std::vector<Vec> small_int_rows(std::mt19937_64& rng, int count, int dim) {
  std::vector<Vec> V(static_cast<std::size_t>(count), Vec(static_cast<std::size_t>(dim)));
  for (auto& v : V)
    for (auto& q : v) q = static_cast<long>(rng() % 9) - 4;
  return V;
}

std::vector<Vec> independent_rows(std::mt19937_64& rng, int count, int dim) {
  for (;;) {
    auto V = small_int_rows(rng, count, dim);
    if (oracle::rank(V) == count) return V;
  }
}

std::vector<Vec> affine_points(std::mt19937_64& rng, int count, int dim) {
  for (;;) {
    auto V = small_int_rows(rng, count, dim);
    for (auto& v : V)
      for (auto& q : v) q /= 8, q += Rational(1, 2);
    if (oracle::affinely_independent(V)) return V;
  }
}

bool block_periodic(const Vec& z, int n, int d) {
  for (std::size_t i = 0; i + static_cast<std::size_t>(n * d) < z.size(); ++i)
    if (z[i] != z[i + static_cast<std::size_t>(n * d)]) return false;
  return true;
}

Result independence_suite() {
  Result r;
  const int trials = 1000;
  std::map<std::string, int> failures;
  auto trial = [&](const std::string& lemma, int t, const std::function<bool()>& body) {
    bool ok = false;
    try {
      ok = body();
    } catch (const std::exception& e) {
      std::cerr << "  " << lemma << " trial " << t << " threw: " << e.what() << "\n";
    }
    if (!ok) {
      ++failures[lemma];
      std::cerr << "  " << lemma << " trial " << t << " failed\n";
    }
  };
  std::mt19937_64 rng(7);
  for (int t = 0; t < trials; ++t) {
    auto seed = static_cast<std::uint64_t>(t);
    trial("linear", t, [&] {
      int m = 2 + static_cast<int>(rng() % 5), k = static_cast<int>(rng() % static_cast<unsigned>(m));
      auto V = independent_rows(rng, k, m);
      auto c = sample_linear_extension(V, m - k, m, seed);
      auto all = V;
      all.insert(all.end(), c.sampled.begin(), c.sampled.end());
      return c.pass && c.attempts == 1 && reverify(c) && oracle::rank(all) == m;
    });
    trial("affine", t, [&] {
      int m = 1 + static_cast<int>(rng() % 5), k = static_cast<int>(rng() % static_cast<unsigned>(m + 1));
      auto V = affine_points(rng, k, m);
      auto c = sample_affine_extension(V, m + 1 - k, m, seed);
      auto all = V;
      all.insert(all.end(), c.sampled.begin(), c.sampled.end());
      return c.pass && c.attempts == 1 && reverify(c) && static_cast<int>(all.size()) == m + 1 && oracle::affinely_independent(all);
    });
    trial("rank-two", t, [&] {
      int m = 3 + static_cast<int>(rng() % 4), dv = static_cast<int>(rng() % static_cast<unsigned>(m - 1));
      int shift = 1 + static_cast<int>(rng() % static_cast<unsigned>(m - 1));
      auto V = independent_rows(rng, dv, m);
      auto c = rank_two_extension_check(V, shift, m, seed);
      if (c.sampled.size() != 2) return false;
      for (int i = 0; i + shift < m; ++i)
        if (c.sampled[0][static_cast<std::size_t>(i + shift)] != c.sampled[1][static_cast<std::size_t>(i)]) return false;
      auto all = V;
      all.insert(all.end(), c.sampled.begin(), c.sampled.end());
      return c.pass && c.attempts == 1 && reverify(c) && oracle::rank(all) == dv + 2;
    });
    trial("paired", t, [&] {
      int k = 1 + t % 4;
      auto L = random_layout(k, seed);
      validate_layout(L);
      auto c = paired_symbol_matrix_check(L, seed);
      return c.pass && c.attempts == 1 && reverify(c);
    });
  }
  auto fs2 = SymbolicSystem::full_shift("01", 16);
  CylinderAlgebra alg(fs2);
  auto pou = partition_of_unity(alg, width_partition(alg, 1, 0));
  for (int t = 0; t < trials; ++t)
    trial("periodic-avoidance", t, [&] {
      int S = 1 + static_cast<int>(rng() % 3), d = 1 + static_cast<int>(rng() % 2);
      std::vector<int> ns;
      for (int n = 1; n < 2 * S; ++n)
        if (2 <= (2 * S - n) * d) ns.push_back(n);
      if (ns.empty()) S = 2, d = 1, ns = {1, 2};
      int n = ns[rng() % ns.size()], N = 2 * S + 1 + static_cast<int>(rng() % 3);
      std::vector<Vec> targets;
      for (int u = 0; u < 2; ++u) {
        GridSampler g(rng());
        targets.push_back(g.vector(static_cast<std::size_t>(N * d)));
      }
      auto F = build_F_avoid_periodic(pou, targets, N, S, n, d, Rational(1, 4), static_cast<std::uint64_t>(t));
      if (!F.cert.pass || F.cert.attempts != 1) return false;
      const std::vector<Rational> lambdas{0, 1, Rational(1, 2), Rational(1, 3), Rational(5, 7)};
      for (int l = 0; l < N - 2 * S; ++l)
        for (const auto& a : F.table.v)
          for (const auto& b : F.table.v)
            for (const auto& lam : lambdas) {
              Vec z(static_cast<std::size_t>(2 * S * d));
              for (std::size_t i = 0; i < z.size(); ++i)
                z[i] = (1 - lam) * a[static_cast<std::size_t>(l * d) + i] + lam * b[static_cast<std::size_t>((l + 1) * d) + i];
              if (block_periodic(z, n, d)) return false;
            }
      return true;
    });
  std::ostringstream detail;
  for (const std::string lemma : {"linear", "affine", "rank-two", "paired", "periodic-avoidance"}) {
    int f = failures[lemma];
    detail << lemma << " " << f << "/" << trials << ", ";
    if (f * 100 > trials) fail(r, lemma + " failure rate above 1e-2");
  }
  for (int k = 1; k <= 3; ++k) {
    auto rep = brute_verify(k, 11);
    detail << "brute k=" << k << " " << rep.nonzero << "/" << rep.layouts << (k < 3 ? ", " : "");
    if (!rep.failures.empty() || rep.agree_with_random != rep.layouts) fail(r, "brute_verify k=" + std::to_string(k));
  }
  if (r.ok) r.detail = detail.str();
  return r;
}

// 7
Result periodic_immersion() {
  Result r;
  auto fs2 = SymbolicSystem::full_shift("01", 64);
  auto P = build_periodic_immersion(fs2, 3, 1, 0);
  auto pts = enumerate_periodic_points(fs2, 3).points();
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      ++pairs;
      std::size_t L = std::lcm(pts[i].size(), pts[j].size());
      auto a = orbit_window(P.f, periodic_window(pts[i], -64, 64), 0, static_cast<int>(L) - 1);
      auto b = orbit_window(P.f, periodic_window(pts[j], -64, 64), 0, static_cast<int>(L) - 1);
      if (a == b) fail(r, pts[i] + " and " + pts[j] + " share an orbit signature");
    }
  if (pts.size() != 10) fail(r, "expected 10 points of period <= 3");
  if (!P.injective) fail(r, "library injectivity check failed");
  if (r.ok) r.detail = std::to_string(pts.size()) + " points, " + std::to_string(pairs) + " pairs";
  return r;
}

PipelineResult fib_pipeline() {
  PipelineOptions opt;
  opt.mdim_est = Rational(1, 32);
  opt.d = 1;
  opt.eps = Rational(1, 8);
  opt.seed = 0;
  return build_pipeline(fibonacci(256), opt);
}

// 8
Result embedding_pipeline() {
  Result r;
  auto fib = fibonacci(256);
  auto res = fib_pipeline();
  if (res.plan.N != 16 || res.plan.M != 8 || res.plan.S != 1) fail(r, "plan is not N=16, M=8, S=1");
  auto id = SlidingCode::identity("01");
  auto rep = check_epsilon_embedding(res.f, fib, &id, Rational(1, 8), 6, 0);
  if (!rep.pass) fail(r, "sweep found an eps-far pair with equal values");
  if (!rep.tau || *rep.tau <= 0) fail(r, "margin tau is not positive");
  if (r.ok)
    r.detail = std::to_string(rep.pairs) + " pairs over " + std::to_string(rep.cylinders) + " cylinders, tau=" + to_string(*rep.tau) +
               (rep.complete ? "" : " (width 6 does not reach every eps-far pair)");
  return r;
}

// 9
Result interpolation_identity() {
  Result r;
  auto fib = fibonacci(256);
  auto res = fib_pipeline();
  const auto& f = res.f;
  if (!f.rokhlin || !f.rokhlin->integer_valued) fail(r, "Rokhlin function is not integer valued");
  auto [lo, hi] = f.read_range();
  const int len = hi - lo, spread = 20;
  int n = 0;
  for (const auto& w : fib.language(len + spread)) {
    for (int s = 0; s <= spread && n < 1000; ++s, ++n) {
      Window x{w.substr(static_cast<std::size_t>(s), static_cast<std::size_t>(len)), lo};
      if (f(x) != block_read(f, x)) fail(r, "mismatch at window " + x.symbols);
    }
    if (n >= 1000) break;
  }
  if (n < 1000) fail(r, "fewer than 1000 windows");
  if (r.ok) r.detail = std::to_string(n) + " windows";
  return r;
}

// 10
std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Result determinism() {
  Result r;
  fs::path dir = fs::temp_directory_path() / ("meandim_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  auto p = [&](const std::string& name) { return (dir / name).string(); };
  const std::string data = MEANDIM_TEST_DATA;
  std::ostringstream sink;
  auto run = [&](std::vector<std::string> args) { return run_cli(args, sink, sink); };
  std::vector<std::pair<std::string, std::vector<std::string>>> cmds{
      {"cert.json", {"--out", p("cert.json"), "marker", "--system", data + "/fibonacci.json", "--N", "3"}},
      {"rok.json", {"--out", p("rok.json"), "rokhlin", "--cert", p("cert.json")}},
      {"per.json", {"--out", p("per.json"), "--seed", "3", "periodic", "--system", data + "/full_shift.json", "--m", "3"}},
      {"mdim.json", {"--out", p("mdim.json"), "mdim", "--system", data + "/golden_mean.json", "--width", "2", "--n", "3"}},
      {"zn.json", {"--out", p("zn.json"), "lemmas", "znset", "--N", "12", "--y", "5"}},
      {"ind.json", {"--out", p("ind.json"), "--seed", "9", "lemmas", "independence", "--lemma", "rank-two", "--dim", "5", "--base", "2", "--shift", "2"}},
      {"emb.json", {"--out", p("emb.json"), "--seed", "1", "embed", "--system", data + "/fibonacci.json"}},
  };
  std::size_t artifacts = 0;
  for (auto& [name, args] : cmds) {
    if (run(args) != 0) {
      fail(r, "command for " + name + " failed");
      continue;
    }
    const std::string first = slurp(p(name));
    Json manifest = Json::parse(slurp(p(name) + ".manifest.json"));
    if (manifest.at("outputs").at(0).at("sha256") != sha256_hex(first)) fail(r, name + ": manifest hash differs from the artifact");
    // Replay the recorded command to a fresh path and compare bytes.
    auto cmd = manifest.at("command").get<std::vector<std::string>>();
    for (std::size_t i = 0; i + 1 < cmd.size(); ++i)
      if (cmd[i] == "--out") cmd[i + 1] = p("replay_" + name);
    if (run(cmd) != 0 || slurp(p("replay_" + name)) != first) fail(r, name + ": replay is not byte-identical");
    if (run({"verify", "--cert", p(name) + ".manifest.json"}) != 0) fail(r, name + ": manifest verification failed");
    ++artifacts;
  }
  fs::remove_all(dir);
  if (r.ok) r.detail = std::to_string(artifacts) + " artifacts";
  return r;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget;
    std::function<Result()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "marker constant", 1, marker_constants},
      {2, "tower pipeline", 30, tower_pipeline},
      {3, "Rokhlin property", 10, rokhlin_property},
      {4, "Z_N lemma", 60, zn_lemma},
      {5, "good segment", 30, good_segments},
      {6, "independence suite", 120, independence_suite},
      {7, "periodic immersion", 10, periodic_immersion},
      {8, "embedding pipeline", 120, embedding_pipeline},
      {9, "interpolation identity", 5, interpolation_identity},
      {10, "determinism", 5, determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    auto t0 = std::chrono::steady_clock::now();
    Result res;
    try {
      res = c.run();
    } catch (const std::exception& e) {
      res = {false, std::string("exception: ") + e.what()};
    }
    double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool in_time = s <= c.budget;
    bool ok = res.ok && in_time;
    failed += !ok;
    std::ostringstream line;
    line.setf(std::ios::fixed);
    line.precision(2);
    line << (ok ? "PASS" : "FAIL") << "  " << c.id << ". " << c.name << "  [" << s << " s / " << c.budget << " s]  " << res.detail;
    if (!in_time) line << "  (over time budget)";
    std::cout << line.str() << std::endl;
  }
  std::cout << (failed ? std::to_string(failed) + " criteria failed" : "all criteria passed") << std::endl;
  return failed ? 1 : 0;
}
