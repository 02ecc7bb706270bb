#include "meandim/embed.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <unordered_map>

namespace meandim {

PartitionOfUnity::PartitionOfUnity(SymbolicSystem sys, std::vector<CylinderRegion> members, std::vector<Window> anchors)
    : sys_(std::move(sys)), members_(std::move(members)), anchors_(std::move(anchors)), cache_(std::make_shared<Cache>()) {
  if (members_.empty()) throw std::invalid_argument("partition of unity over an empty cover");
  if (!anchors_.empty() && anchors_.size() != members_.size()) throw std::invalid_argument("one anchor per member");
  for (const auto& m : members_) {
    if (m.empty()) throw std::invalid_argument("empty cover member");
    if (m.width() > 0) radius_ = std::max({radius_, -m.lo(), m.hi() - 1});
  }
}

Rational PartitionOfUnity::distance_to_complement(std::size_t u, const Window& x) const {
  const auto& U = members_.at(u);
  if (U.width() == 0) return Rational(2);
  if (!U.contains(x)) return Rational(0);
  std::string key = std::to_string(u) + "|" + std::string(x.slice(-radius_, radius_ + 1));
  {
    std::lock_guard<std::mutex> lock(cache_->mu);
    auto it = cache_->depth.find(key);
    if (it != cache_->depth.end()) return pow2_neg(it->second);
  }
  // Least r with the centered radius-r cylinder of x inside U.
  int depth = radius_;
  for (int r = 0; r < radius_; ++r) {
    int lo = std::min(-r, U.lo()), hi = std::max(r + 1, U.hi());
    auto ext = sys_.extend({Word(x.slice(-r, r + 1))}, -r - lo, hi - (r + 1));
    bool inside = !ext.empty();
    for (const auto& e : ext)
      if (!U.contains_word(std::string_view(e).substr(static_cast<std::size_t>(U.lo() - lo), static_cast<std::size_t>(U.width())))) {
        inside = false;
        break;
      }
    if (inside) {
      depth = r;
      break;
    }
  }
  std::lock_guard<std::mutex> lock(cache_->mu);
  cache_->depth.emplace(key, depth);
  return pow2_neg(depth);
}

Vec PartitionOfUnity::weights(const Window& x) const {
  Vec w(members_.size(), Rational(0));
  std::vector<std::size_t> in;
  for (std::size_t u = 0; u < members_.size(); ++u)
    if (members_[u].contains(x)) in.push_back(u);
  if (in.empty()) throw std::invalid_argument("configuration outside every cover member");
  if (in.size() == 1) {
    w[in[0]] = 1;
    return w;
  }
  Rational total = 0;
  for (auto u : in) total += (w[u] = distance_to_complement(u, x));
  for (auto u : in) w[u] /= total;
  return w;
}

std::vector<int> PartitionOfUnity::support(const Window& x) const {
  std::vector<int> s;
  for (std::size_t u = 0; u < members_.size(); ++u)
    if (members_[u].contains(x)) s.push_back(static_cast<int>(u));
  return s;
}

std::vector<std::vector<int>> PartitionOfUnity::all_supports() const {
  std::set<std::vector<int>> seen;
  for (const auto& w : sys_.language(2 * radius_ + 1)) seen.insert(support(Window{w, -radius_}));
  return {seen.begin(), seen.end()};
}

PartitionOfUnity partition_of_unity(const CylinderAlgebra& alg, const Cover& cover) {
  validate_cover(alg, cover);
  PartitionOfUnity bare(alg.system(), cover.members, {});
  int R = bare.radius();
  auto words = alg.system().language(2 * R + 1);
  std::vector<Window> anchors;
  for (std::size_t u = 0; u < cover.members.size(); ++u) {
    std::optional<Window> best;
    Rational best_dist = -1;
    for (const auto& w : words) {
      Window x{w, -R};
      if (!cover.members[u].contains(x)) continue;
      bool alone = true;
      for (std::size_t v = 0; v < cover.members.size() && alone; ++v)
        if (v != u && cover.members[v].contains(x)) alone = false;
      if (!alone) continue;
      Rational dist = bare.distance_to_complement(u, x);
      if (dist > best_dist) best_dist = dist, best = x;  // words are sorted, so ties keep the smallest
    }
    if (!best) throw std::invalid_argument("cover member " + std::to_string(u) + " has no witness outside the other members");
    anchors.push_back(*best);
  }
  return PartitionOfUnity(alg.system(), cover.members, std::move(anchors));
}

Vec block(const Vec& v, int d, int k) {
  return Vec(v.begin() + static_cast<long>(k) * d, v.begin() + static_cast<long>(k + 1) * d);
}

Vec blocks(const Vec& v, int d, int a, int b) {
  if (a < 0 || static_cast<std::size_t>((b + 1) * d) > v.size()) throw std::out_of_range("block range");
  return Vec(v.begin() + static_cast<long>(a) * d, v.begin() + static_cast<long>(b + 1) * d);
}

Vec oplus(const Vec& v, int d, int n_target) {
  int n = static_cast<int>(v.size()) / d;
  Vec out;
  out.reserve(static_cast<std::size_t>(n_target * d));
  for (int k = 0; k < n_target; ++k)
    for (int t = 0; t < d; ++t) out.push_back(v[static_cast<std::size_t>((k % n) * d + t)]);
  return out;
}

Vec bullet(const Vec& v, int d, int l) {
  int n = static_cast<int>(v.size()) / d;
  Vec out;
  out.reserve(v.size());
  for (int k = 0; k < n; ++k)
    for (int t = 0; t < d; ++t) out.push_back(v[static_cast<std::size_t>(mod_floor(k + l, n) * d + t)]);
  return out;
}

Vec evaluate_F(const PartitionOfUnity& pou, const VertexTable& F, const Window& x) {
  auto w = pou.weights(x);
  Vec out(static_cast<std::size_t>(F.n * F.d), Rational(0));
  for (std::size_t u = 0; u < w.size(); ++u) {
    if (w[u] == 0) continue;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += w[u] * F.v[u][i];
  }
  return out;
}

namespace {

int support_ord(const std::vector<std::vector<int>>& supports) {
  std::size_t m = 0;
  for (const auto& s : supports) m = std::max(m, s.size());
  return static_cast<int>(m) - 1;
}

Vec perturb(GridSampler& g, const Vec& target, const Rational& eps) {
  Vec v(target.size());
  Rational r = eps / 4;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (target[i] < 0 || target[i] > 1) throw std::invalid_argument("targets must lie in [0,1]");
    Rational lo = target[i] - r, hi = target[i] + r;
    v[i] = g.between(lo < 0 ? Rational(0) : lo, hi > 1 ? Rational(1) : hi);
  }
  return v;
}

void check_targets(const std::vector<Vec>& targets, std::size_t members, int len) {
  if (targets.size() != members) throw std::invalid_argument("one target per cover member");
  for (const auto& t : targets)
    if (static_cast<int>(t.size()) != len) throw std::invalid_argument("target length mismatch");
}

CylinderRegion union_of(const CylinderAlgebra& alg, const PartitionOfUnity& pou) { return alg.unite_all(pou.members()); }

RankCheck rank_check(const std::string& name, int rank, int expected) { return RankCheck{name, rank, expected, rank == expected}; }

int affine_rank(const std::vector<Vec>& pts) {
  std::vector<Vec> diff;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    Vec d(pts[i].size());
    for (std::size_t j = 0; j < d.size(); ++j) d[j] = pts[i][j] - pts[0][j];
    diff.push_back(std::move(d));
  }
  return rank_of(diff);
}

}  // namespace

FDisjointBuild build_F_disjoint(const PartitionOfUnity& pou1, const PartitionOfUnity& pou2, const std::vector<Vec>& targets1,
                                const std::vector<Vec>& targets2, int n1, int n2, int d, const Rational& eps,
                                std::uint64_t seed) {
  if (n1 < n2 || n2 < 1 || d < 1) throw std::invalid_argument("need n1 >= n2 >= 1 and d >= 1");
  check_targets(targets1, pou1.size(), n1 * d);
  check_targets(targets2, pou2.size(), n2 * d);
  auto s1 = pou1.all_supports(), s2 = pou2.all_supports();
  if (2 * support_ord(s1) >= n1 * d || 2 * support_ord(s2) >= n2 * d) throw std::invalid_argument("precondition: ord(alpha_i) < n_i d / 2");
  CylinderAlgebra alg(pou1.system());
  if (!alg.disjoint(union_of(alg, pou1), union_of(alg, pou2))) throw std::invalid_argument("precondition: R1 and R2 intersect");

  FDisjointBuild out;
  out.cert.lemma = "F_disjoint";
  out.cert.seed = seed;
  out.cert.dim = n1 * d;
  out.F2 = VertexTable{n2, d, targets2};
  for (int attempt = 0; attempt < kRetryBound; ++attempt) {
    GridSampler g(derive_seed(seed, static_cast<std::uint64_t>(attempt)));
    out.cert.attempts = attempt + 1;
    out.F1 = VertexTable{n1, d, {}};
    for (const auto& t : targets1) out.F1.v.push_back(perturb(g, t, eps));
    out.cert.checks.clear();
    bool all = true;
    for (const auto& a : s1)
      for (const auto& b : s2) {
        if (a.empty() || b.empty()) continue;
        std::vector<Vec> A, B;
        for (int u : a) A.push_back(out.F1.v[static_cast<std::size_t>(u)]);
        for (int u : b) B.push_back(oplus(out.F2.v[static_cast<std::size_t>(u)], d, n1));
        int rb = rank_of(B);
        std::vector<Vec> AB = A;
        AB.insert(AB.end(), B.begin(), B.end());
        RankCheck c = rb == static_cast<int>(B.size()) ? rank_check("affine", affine_rank(AB), static_cast<int>(AB.size()) - 1)
                                                       : rank_check("linear", rank_of(AB), static_cast<int>(A.size()) + rb);
        all = all && c.pass;
        out.cert.checks.push_back(c);
      }
    out.cert.sampled = out.F1.v;
    if (all) {
      out.cert.pass = true;
      return out;
    }
  }
  throw std::runtime_error("build_F_disjoint: retries exhausted");
}

FBuild build_F_translation(const PartitionOfUnity& pou, const std::vector<Vec>& targets, int n, int l, int d,
                           const Rational& eps, std::uint64_t seed) {
  if (l < 1 || l > n - 1) throw std::invalid_argument("need 1 <= l <= n - 1");
  check_targets(targets, pou.size(), n * d);
  FBuild out;
  out.supports = pou.all_supports();
  if (2 * support_ord(out.supports) >= n * d) throw std::invalid_argument("precondition: ord(alpha) < n d / 2");
  CylinderAlgebra alg(pou.system());
  auto R = union_of(alg, pou);
  for (int i = 1; i < n; ++i)
    if (!alg.disjoint(R, alg.translate(R, i))) throw std::invalid_argument("precondition: R meets its translate by " + std::to_string(i));

  const int nd = n * d;
  out.cert.lemma = "F_translation";
  out.cert.seed = seed;
  out.cert.dim = nd;
  for (int attempt = 0; attempt < kRetryBound; ++attempt) {
    GridSampler g(derive_seed(seed, static_cast<std::uint64_t>(attempt)));
    out.cert.attempts = attempt + 1;
    out.table = VertexTable{n, d, {}};
    for (const auto& t : targets) out.table.v.push_back(perturb(g, t, eps));
    out.cert.checks.clear();
    bool all = true;
    for (const auto& sx : out.supports)
      for (const auto& sy : out.supports) {
        if (sx.empty() || sy.empty()) continue;
        std::vector<Vec> cols;
        for (int u : sx) cols.push_back(out.table.v[static_cast<std::size_t>(u)]);
        for (int u : sy) cols.push_back(bullet(out.table.v[static_cast<std::size_t>(u)], d, l));
        int c = static_cast<int>(cols.size());
        RankCheck rc = c <= nd ? rank_check("linear", rank_of(cols), c) : rank_check("bordered_det", affine_rank(cols) + 1, c);
        all = all && rc.pass;
        out.cert.checks.push_back(rc);
        if (c == nd + 1 && c <= 8) {
          SymbolLayout L;
          L.k = c / 2;
          L.cells.assign(static_cast<std::size_t>(nd), std::vector<int>(static_cast<std::size_t>(c)));
          for (int i = 0; i < nd; ++i) {
            int j = 0;
            for (int u : sx) L.cells[static_cast<std::size_t>(i)][static_cast<std::size_t>(j++)] = u * nd + i;
            for (int u : sy) L.cells[static_cast<std::size_t>(i)][static_cast<std::size_t>(j++)] = u * nd + static_cast<int>(mod_floor(i + d * l, nd));
          }
          bool nz = determinant_not_identically_zero(L);
          out.cert.checks.push_back(rank_check("symbolic", nz ? 1 : 0, 1));
          all = all && nz;
        }
      }
    out.cert.sampled = out.table.v;
    if (all) {
      out.cert.pass = true;
      return out;
    }
  }
  throw std::runtime_error("build_F_translation: retries exhausted");
}

FBuild build_F_avoid_periodic(const PartitionOfUnity& pou, const std::vector<Vec>& targets, int N, int S, int n, int d,
                              const Rational& eps, std::uint64_t seed, AvoidMode mode, int lambda_samples) {
  if (N <= 2 * S) throw std::invalid_argument("precondition: N > 2S");
  if (n < 1 || n > 2 * S) throw std::invalid_argument("period must lie in 1..2S");
  check_targets(targets, pou.size(), N * d);
  FBuild out;
  out.supports = pou.all_supports();
  int o = support_ord(out.supports);
  bool single = mode == AvoidMode::SingleWindow;
  if (single ? n * d + o + 1 > 2 * S * d : 2 * (o + 1) > (2 * S - n) * d)
    throw std::invalid_argument("precondition: ord(gamma) + 1 <= (S - n/2) d");
  PeriodicitySubspace P{n, S, d};
  const auto basis = P.basis();

  out.cert.lemma = single ? "F_avoid_periodic_single" : "F_avoid_periodic";
  out.cert.seed = seed;
  out.cert.dim = 2 * S * d;
  out.cert.base = basis;
  for (int attempt = 0; attempt < kRetryBound; ++attempt) {
    GridSampler g(derive_seed(seed, static_cast<std::uint64_t>(attempt)));
    out.cert.attempts = attempt + 1;
    out.table = VertexTable{N, d, {}};
    for (const auto& t : targets) out.table.v.push_back(perturb(g, t, eps));
    const auto& v = out.table.v;
    out.cert.checks.clear();
    bool all = true;
    int l_end = single ? 1 : N - 2 * S;
    for (int l = 0; l < l_end; ++l) {
      for (const auto& s0 : out.supports)
        for (const auto& s1 : out.supports) {
          if (single && &s1 != &out.supports.front()) break;
          std::vector<Vec> vecs = basis;
          for (int u : s0) vecs.push_back(blocks(v[static_cast<std::size_t>(u)], d, l, l + 2 * S - 1));
          if (!single)
            for (int u : s1) vecs.push_back(blocks(v[static_cast<std::size_t>(u)], d, l + 1, l + 2 * S));
          int expected = static_cast<int>(vecs.size());
          if (expected > 2 * S * d) throw std::logic_error("rank bookkeeping exceeds 2Sd");
          auto rc = rank_check("periodic_avoidance", rank_of(vecs), expected);
          all = all && rc.pass;
          out.cert.checks.push_back(rc);
        }
      // Pointwise cross-check on anchor pairs at lambda in {0, 1} and sampled interior values.
      std::vector<Rational> lambdas{0};
      if (!single) {
        lambdas.push_back(1);
        for (int i = 0; i < lambda_samples; ++i) lambdas.push_back(g.between(Rational(1, 1024), Rational(1023, 1024)));
      }
      int ok = 0, total = 0;
      for (std::size_t a = 0; a < v.size(); ++a)
        for (std::size_t b = 0; b < (single ? 1 : v.size()); ++b)
          for (const auto& lam : lambdas) {
            auto z0 = blocks(v[a], d, l, l + 2 * S - 1);
            Vec z(z0.size());
            if (single) z = z0;
            else {
              auto z1 = blocks(v[b], d, l + 1, l + 2 * S);
              for (std::size_t i = 0; i < z.size(); ++i) z[i] = (1 - lam) * z0[i] + lam * z1[i];
            }
            ++total;
            if (!P.contains(z)) ++ok;
          }
      auto pc = rank_check("pointwise", ok, total);
      all = all && pc.pass;
      out.cert.checks.push_back(pc);
    }
    out.cert.sampled = v;
    if (all) {
      out.cert.pass = true;
      return out;
    }
  }
  throw std::runtime_error("build_F_avoid_periodic: retries exhausted");
}

namespace {

// u and w are linearly independent.
bool independent_pair(const Vec& u, const Vec& w) {
  for (std::size_t i = 0; i < u.size(); ++i)
    for (std::size_t j = i + 1; j < u.size(); ++j)
      if (u[i] * w[j] != u[j] * w[i]) return true;
  return false;
}

bool nonzero(const Vec& u) {
  return std::any_of(u.begin(), u.end(), [](const Rational& q) { return q != 0; });
}

Vec minus(const Vec& a, const Vec& b) {
  Vec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

}  // namespace

std::vector<RankCheck> shifted_block_checks(const std::vector<Vec>& v, int N, int w, int d) {
  const std::size_t m = v.size();
  std::vector<RankCheck> checks;
  std::set<Rational> entries;
  std::size_t count = 0;
  for (const auto& x : v)
    for (const auto& q : x) entries.insert(q), ++count;
  auto distinct = rank_check("distinct_entries", static_cast<int>(entries.size()), static_cast<int>(count));
  checks.push_back(distinct);
  bool all = distinct.pass;
  for (int l = 0; l + w < N && all; ++l) {
    std::vector<Vec> a(m), b(m);
    for (std::size_t u = 0; u < m; ++u) {
      a[u] = blocks(v[u], d, l, l + w - 1);
      b[u] = blocks(v[u], d, l + 1, l + w);
    }
    std::vector<Vec> db;
    for (std::size_t y = 0; y < m; ++y)
      for (std::size_t y2 = y + 1; y2 < m; ++y2) db.push_back(minus(b[y], b[y2]));
    int ok = 0, total = 0;
    for (std::size_t u = 0; u < m; ++u)
      for (std::size_t u2 = u + 1; u2 < m; ++u2) {
        Vec da = minus(a[u], a[u2]);
        ++total;
        ok += nonzero(da);
        for (const auto& e : db) {
          ++total;
          ok += independent_pair(da, e);
        }
      }
    auto rc = rank_check("shifted_blocks", ok, total);
    all = all && rc.pass;
    checks.push_back(rc);
  }
  return checks;
}

FBuild build_F_shifted_blocks(const PartitionOfUnity& pou, const std::vector<Vec>& targets, int N, int w, int d,
                              const Rational& eps, std::uint64_t seed) {
  if (w < 1 || N <= w) throw std::invalid_argument("need 1 <= w < N");
  check_targets(targets, pou.size(), N * d);
  FBuild out;
  out.supports = pou.all_supports();
  if (support_ord(out.supports) != 0) throw std::invalid_argument("shifted-block certificate needs a partition");
  out.cert.lemma = "F_shifted_blocks";
  out.cert.seed = seed;
  out.cert.dim = w * d;
  for (int attempt = 0; attempt < kRetryBound; ++attempt) {
    GridSampler g(derive_seed(seed, static_cast<std::uint64_t>(attempt)));
    out.cert.attempts = attempt + 1;
    out.table = VertexTable{N, d, {}};
    for (const auto& t : targets) out.table.v.push_back(perturb(g, t, eps));
    out.cert.checks = shifted_block_checks(out.table.v, N, w, d);
    out.cert.sampled = out.table.v;
    if (std::all_of(out.cert.checks.begin(), out.cert.checks.end(), [](const RankCheck& c) { return c.pass; })) {
      out.cert.pass = true;
      return out;
    }
  }
  throw std::runtime_error("build_F_shifted_blocks: retries exhausted");
}

SlidingCode SlidingCode::identity(const std::string& alphabet) {
  SlidingCode c;
  c.lo = 0;
  c.hi = 1;
  c.target_alphabet = alphabet;
  for (char a : alphabet) c.table[Word(1, a)] = a;
  return c;
}

char SlidingCode::apply(const Window& x) const {
  auto it = table.find(Word(x.slice(lo, hi)));
  if (it == table.end()) throw std::invalid_argument("sliding code undefined on " + Word(x.slice(lo, hi)));
  return it->second;
}

Window SlidingCode::image(const Window& x, int a, int b) const {
  Window z{Word(), a};
  for (int j = a; j < b; ++j) z.symbols.push_back(apply(x.shifted(-j)));
  return z;
}

std::string mode_name(EmbeddingFunction::Mode m) {
  switch (m) {
    case EmbeddingFunction::Mode::Lookup: return "lookup";
    case EmbeddingFunction::Mode::DirectF: return "direct-F";
    case EmbeddingFunction::Mode::Rokhlin: return "rokhlin-interpolated";
    case EmbeddingFunction::Mode::Clamp: return "clamp";
    case EmbeddingFunction::Mode::Composed: return "composed";
  }
  return "?";
}

namespace {

Vec clamp01(Vec v) {
  for (auto& q : v) q = q < 0 ? Rational(0) : (q > 1 ? Rational(1) : q);
  return v;
}

void add_to(Vec& a, const Vec& b, const Rational& s = 1) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += s * b[i];
}

}  // namespace

Vec EmbeddingFunction::operator()(const Window& x) const {
  switch (mode) {
    case Mode::Lookup: {
      auto it = table.find(Word(x.slice(lo, hi)));
      if (it != table.end()) return it->second;
      if (fallback) return *fallback;
      throw std::invalid_argument("lookup undefined on " + Word(x.slice(lo, hi)));
    }
    case Mode::DirectF: return block(evaluate_F(*pou, F, x), d, 0);
    case Mode::Rokhlin: {
      Rational n = rokhlin->value(x);
      int lower = static_cast<int>(mod_floor(floor_of(n).get_si(), M));
      int upper = static_cast<int>(mod_floor(ceil_of(n).get_si(), M));
      Rational t = frac_of(n);
      Vec out = block(evaluate_F(*pou, F, x.shifted(-lower)), d, lower);
      if (t != 0) {
        Vec hi_part = block(evaluate_F(*pou, F, x.shifted(-upper)), d, upper);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = (1 - t) * out[i] + t * hi_part[i];
      }
      return out;
    }
    case Mode::Clamp: {
      Vec y = (*base)(x);
      for (const auto& [region, g] : patches)
        if (region.contains(x)) {
          add_to(y, g);
          break;
        }
      return clamp01(std::move(y));
    }
    case Mode::Composed: {
      Vec out = (*base)(x);
      auto [a, b] = h->read_range();
      Vec z = (*h)(code->image(x, a, b));
      out.insert(out.end(), z.begin(), z.end());
      return out;
    }
  }
  throw std::logic_error("unknown mode");
}

std::pair<int, int> EmbeddingFunction::read_range() const {
  switch (mode) {
    case Mode::Lookup: return {lo, hi};
    case Mode::DirectF: return {pou->lo(), pou->hi()};
    case Mode::Rokhlin: return {std::min(rokhlin->lo, pou->lo()), std::max(rokhlin->hi, pou->hi() + M - 1)};
    case Mode::Clamp: {
      auto r = base->read_range();
      for (const auto& p : patches)
        if (!p.first.empty()) r = {std::min(r.first, p.first.lo()), std::max(r.second, p.first.hi())};
      return r;
    }
    case Mode::Composed: {
      auto r = base->read_range();
      auto [a, b] = h->read_range();
      return {std::min(r.first, a + code->lo), std::max(r.second, b - 1 + code->hi)};
    }
  }
  throw std::logic_error("unknown mode");
}

EmbeddingFunction lookup_function(int lo, int hi, std::map<Word, Vec> table, int d, std::optional<Vec> fallback) {
  EmbeddingFunction f;
  f.mode = EmbeddingFunction::Mode::Lookup;
  f.d = d;
  f.lo = lo;
  f.hi = hi;
  f.table = std::move(table);
  f.fallback = std::move(fallback);
  return f;
}

EmbeddingFunction coordinate_function(const SymbolicSystem& sys, int d) {
  const auto& A = sys.alphabet();
  Rational scale = A.size() > 1 ? Rational(1, static_cast<long>(A.size() - 1)) : Rational(0);
  std::map<Word, Vec> table;
  for (const auto& w : sys.language(d)) {
    Vec v;
    for (char c : w) v.push_back(Rational(static_cast<long>(A.find(c))) * scale);
    table[w] = v;
  }
  auto f = lookup_function(0, d, std::move(table), d);
  f.params["name"] = "coordinate";
  return f;
}

Vec block_read(const EmbeddingFunction& f, const Window& x) {
  if (f.mode != EmbeddingFunction::Mode::Rokhlin || !f.rokhlin || !f.rokhlin->marker)
    throw std::invalid_argument("block read needs a marker-based interpolated function");
  const auto& W = *f.rokhlin->marker;
  int k = 0;
  while (!W.contains(x.shifted(-k))) {
    if (++k > f.rokhlin->height) throw std::logic_error("no marker visit within the height");
  }
  int j = k % f.M;
  Window z = x.shifted(-j);
  const auto& members = f.pou->members();
  std::vector<std::size_t> in;
  for (std::size_t u = 0; u < members.size(); ++u)
    if (members[u].contains(z)) in.push_back(u);
  if (in.size() == 1) return block(f.F.v[in[0]], f.d, j);
  return block(evaluate_F(*f.pou, f.F, z), f.d, j);
}

EmbeddingFunction clamp_extend(const std::vector<ClampPatch>& patches, const EmbeddingFunction& f_tilde, const Rational& eps) {
  EmbeddingFunction f;
  f.mode = EmbeddingFunction::Mode::Clamp;
  f.d = f_tilde.d;
  f.base = std::make_shared<EmbeddingFunction>(f_tilde);
  for (std::size_t i = 0; i < patches.size(); ++i) {
    const auto& p = patches[i];
    if (!p.region.contains(p.base_point)) throw std::invalid_argument("patch base point outside its region");
    for (std::size_t j = 0; j < i; ++j) {
      const auto& q = patches[j].region;
      if (q.lo() != p.region.lo() || q.width() != p.region.width()) throw std::invalid_argument("patches must share one coordinate range");
      for (const auto& w : p.region.words())
        if (q.contains_word(w)) throw std::invalid_argument("patches overlap");
    }
    Vec ft = f_tilde(p.base_point);
    if (p.target.size() != ft.size()) throw std::invalid_argument("target dimension mismatch");
    Vec g(ft.size());
    for (std::size_t t = 0; t < g.size(); ++t) {
      if (p.target[t] < 0 || p.target[t] > 1) throw std::invalid_argument("target outside [0,1]");
      g[t] = p.target[t] - ft[t];
      if (abs_of(g[t]) >= eps) throw std::invalid_argument("precondition: gap " + to_string(abs_of(g[t])) + " >= eps");
    }
    f.patches.push_back({p.region, g});
  }
  f.params["eps"] = to_string(eps);
  return f;
}

std::vector<Vec> orbit_window(const EmbeddingFunction& f, const Window& x, int a, int b) {
  std::vector<Vec> out;
  for (int k = a; k <= b; ++k) out.push_back(f(x.shifted(k)));
  return out;
}

namespace {

Rational orbit_gap(const std::vector<Vec>& a, const std::vector<Vec>& b, const std::optional<Rational>& stop_at = {}) {
  Rational best = 0;
  for (std::size_t k = 0; k < a.size(); ++k)
    for (std::size_t t = 0; t < a[k].size(); ++t) {
      Rational g = abs_of(a[k][t] - b[k][t]);
      if (g > best) {
        best = g;
        if (stop_at && best >= *stop_at) return best;
      }
    }
  return best;
}

}  // namespace

Compatibility check_K_compatible(const EmbeddingFunction& f, const std::vector<std::pair<Window, Window>>& K, int a, int b) {
  Compatibility c;
  for (const auto& [x, y] : K) {
    Rational gap = orbit_gap(orbit_window(f, x, a, b), orbit_window(f, y, a, b));
    if (gap == 0) c.ok = false;
    if (!c.margin || gap < *c.margin) c.margin = gap;
  }
  return c;
}

EmbeddingPlan plan_embedding_parameters(const Rational& mdim_est, int d) {
  if (mdim_est < 0 || d < 1) throw std::invalid_argument("need mdim >= 0 and d >= 1");
  EmbeddingPlan p;
  p.mdim_used = mdim_est == 0 ? Rational(1, 32) : mdim_est;
  if (16 * p.mdim_used >= d) throw std::invalid_argument("precondition: mdim < d/16");
  bool found = false;
  for (int k = 2; k <= 62 && !found; ++k) {
    Rational e = pow2_neg(k);
    if (16 * p.mdim_used * (1 + 2 * e) < d) p.eps_prime = e, found = true;
  }
  if (!found) throw std::invalid_argument("no workable eps' on the grid");
  for (int N = 16;; N += 16) {
    int S = N / 16;
    if (Rational(S * d) > N * p.mdim_used * (1 + 2 * p.eps_prime)) {
      p.N = N;
      p.M = N / 2;
      p.S = p.M / 8;
      return p;
    }
  }
}

EmbeddingFunction build_embedding_function(const PartitionOfUnity& pou, const VertexTable& F, const RokhlinFunction& n, int M) {
  if (M < 1 || F.n < M) throw std::invalid_argument("F must have at least M blocks");
  EmbeddingFunction f;
  f.mode = EmbeddingFunction::Mode::Rokhlin;
  f.d = F.d;
  f.pou = std::make_shared<PartitionOfUnity>(pou);
  f.F = F;
  f.M = M;
  f.rokhlin = n;
  return f;
}

EpsilonReport check_epsilon_embedding(const EmbeddingFunction& f, const SymbolicSystem& sys, const SlidingCode* pi,
                                      const Rational& eps, int width, int radius) {
  if (width < 1 || radius < 0) throw std::invalid_argument("need width >= 1 and radius >= 0");
  EpsilonReport rep;
  rep.width = width;
  rep.radius = radius;
  const int c_lo = -(width / 2), c_hi = c_lo + width;
  auto [rl, rh] = f.read_range();
  int lo = std::min({c_lo, rl - radius, 0}), hi = std::max({c_hi, rh + radius, 1});
  if (pi) lo = std::min(lo, pi->lo - radius), hi = std::max(hi, pi->hi + radius);
  rep.window = hi - lo;
  // eps-far pairs differ somewhere in [-k, k].
  int k = 0;
  while (pow2_neg(k + 1) >= eps) ++k;
  rep.complete = eps <= 1 && c_lo <= -k && c_hi >= k + 1;

  std::map<Word, std::vector<std::size_t>> groups;
  std::vector<Window> xs;
  for (auto& w : sys.language(hi - lo)) {
    Window x{w, lo};
    groups[Word(x.slice(c_lo, c_hi))].push_back(xs.size());
    xs.push_back(std::move(x));
  }
  rep.cylinders = groups.size();
  std::vector<std::vector<Vec>> sig(xs.size());
  std::vector<Word> pimg(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sig[i] = orbit_window(f, xs[i], -radius, radius);
    if (pi) pimg[i] = pi->image(xs[i], -radius, radius + 1).symbols;
  }
  std::vector<const std::vector<std::size_t>*> gs;
  for (const auto& [c, idx] : groups) gs.push_back(&idx);
  for (std::size_t g1 = 0; g1 < gs.size(); ++g1)
    for (std::size_t g2 = g1 + 1; g2 < gs.size(); ++g2)
      for (auto i : *gs[g1])
        for (auto j : *gs[g2]) {
          if (metric_distance(xs[i], xs[j]) < eps) continue;
          ++rep.pairs;
          Rational gap = orbit_gap(sig[i], sig[j], rep.tau);
          if (!rep.tau || gap < *rep.tau) rep.tau = gap;
          if (gap > 0) ++rep.separated_by_f;
          else if (pi && pimg[i] != pimg[j]) ++rep.separated_by_pi;
          else if (rep.pass) {
            rep.pass = false;
            rep.witness = {xs[i], xs[j]};
          }
        }
  return rep;
}

InjectivityCertificate certify_injective(const EmbeddingFunction& h, const std::string& alphabet) {
  InjectivityCertificate c;
  if (h.mode != EmbeddingFunction::Mode::Lookup) {
    c.reason = "injectivity is certified for lookup functions only";
    return c;
  }
  if (h.fallback) {
    c.reason = "lookup with a fallback value";
    return c;
  }
  std::set<Vec> values;
  for (const auto& [w, v] : h.table) {
    for (char ch : w)
      if (alphabet.find(ch) == std::string::npos) {
        c.reason = "table word outside the alphabet";
        return c;
      }
    if (!values.insert(v).second) {
      c.reason = "two windows share the value " + to_strings(v).front();
      return c;
    }
  }
  if (h.hi - h.lo == 1)
    for (char ch : alphabet)
      if (!h.table.count(Word(1, ch))) {
        c.reason = std::string("symbol ") + ch + " missing";
        return c;
      }
  c.pass = !h.table.empty();
  if (!c.pass) c.reason = "empty table";
  return c;
}

EmbeddingFunction combine_with_factor(const EmbeddingFunction& g, const EmbeddingFunction& h, const SlidingCode& pi,
                                      const InjectivityCertificate& cert) {
  if (!cert.pass) throw std::invalid_argument("h lacks an injectivity certificate: " + cert.reason);
  EmbeddingFunction f;
  f.mode = EmbeddingFunction::Mode::Composed;
  f.d = g.d + h.d;
  f.base = std::make_shared<EmbeddingFunction>(g);
  f.h = std::make_shared<EmbeddingFunction>(h);
  f.code = pi;
  return f;
}

namespace {

long long lcm_ll(long long a, long long b) { return a / std::gcd(a, b) * b; }

}  // namespace

std::pair<bool, std::size_t> periodic_injective(const EmbeddingFunction& f, const SymbolicSystem& sys, int m_max) {
  auto P = enumerate_periodic_points(sys, m_max);
  auto pts = P.points();
  long long L = 1;
  for (int n = 1; n <= m_max; ++n) L = lcm_ll(L, n);
  auto [rl, rh] = f.read_range();
  std::vector<std::vector<Vec>> sig;
  for (const auto& w : pts) sig.push_back(orbit_window(f, periodic_window(w, rl - static_cast<int>(L), rh + static_cast<int>(L)), 0, static_cast<int>(L) - 1));
  std::size_t pairs = 0;
  bool ok = true;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      ++pairs;
      auto len = static_cast<std::size_t>(lcm_ll(static_cast<long long>(pts[i].size()), static_cast<long long>(pts[j].size())));
      bool differ = false;
      for (std::size_t k = 0; k < len && !differ; ++k) differ = sig[i][k] != sig[j][k];
      ok = ok && differ;
    }
  return {ok, pairs};
}

PeriodicImmersion build_periodic_immersion(const SymbolicSystem& sys, int m_max, int d, std::uint64_t seed, const Rational& eps) {
  if (d < 1) throw std::invalid_argument("need d >= 1");
  if (sys.kind() == SystemKind::Rotation) throw std::invalid_argument("periodic points of a rotation coding are not enumerated");
  auto P = enumerate_periodic_points(sys, m_max);
  PeriodicImmersion out;
  auto f_tilde = coordinate_function(sys, d);
  auto pts = P.points();
  // Neighbourhood radius separating all points.
  int r = 0;
  for (;; ++r) {
    std::set<Word> seen;
    for (const auto& w : pts) seen.insert(periodic_window(w, -r, r + 1).symbols);
    if (seen.size() == pts.size()) break;
  }
  r = std::max(r, d);
  for (int n = 1; n <= m_max; ++n)
    for (const auto& base : P.cycles(n)) {
      PeriodicOrbit O;
      O.base = base;
      O.period = n;
      for (int k = 0; k < n; ++k) {
        auto t = f_tilde(periodic_window(rotate_point(base, k), -r, r + 1));
        O.target.insert(O.target.end(), t.begin(), t.end());
      }
      bool done = false;
      for (int attempt = 0; attempt < kRetryBound && !done; ++attempt) {
        GridSampler g(derive_seed(seed, static_cast<std::uint64_t>(out.orbits.size()) * kRetryBound + static_cast<std::uint64_t>(attempt)));
        O.v = perturb(g, O.target, eps);
        std::vector<RankCheck> checks;
        for (int l = 1; l < n; ++l) checks.push_back(rank_check("translation", rank_of({O.v, bullet(O.v, d, l)}), 2));
        for (const auto& prev : out.orbits)
          for (int j = 0; j < prev.period; ++j) {
            Vec B = oplus(bullet(prev.v, d, j), d, n);
            if (nonzero(B)) checks.push_back(rank_check("affine", affine_rank({O.v, B}), 1));
            else checks.push_back(rank_check("linear", rank_of({O.v}), 1));
          }
        done = std::all_of(checks.begin(), checks.end(), [](const RankCheck& c) { return c.pass; });
        if (done) out.checks.insert(out.checks.end(), checks.begin(), checks.end());
      }
      if (!done) throw std::runtime_error("periodic immersion: constraint certificate failed for orbit " + base);
      out.orbits.push_back(O);
    }
  std::vector<ClampPatch> patches;
  for (const auto& O : out.orbits)
    for (int k = 0; k < O.period; ++k) {
      Word p = rotate_point(O.base, k);
      Window bp = periodic_window(p, -r, r + 1);
      patches.push_back({CylinderRegion(-r, 2 * r + 1, {bp.symbols}), block(O.v, d, k), bp});
    }
  out.f = clamp_extend(patches, f_tilde, eps);
  out.f.params["m_max"] = std::to_string(m_max);
  out.f.params["seed"] = std::to_string(seed);
  auto [ok, pairs] = periodic_injective(out.f, sys, m_max);
  out.injective = ok;
  out.pairs_checked = pairs;
  return out;
}

PipelineResult build_pipeline(const SymbolicSystem& sys, const PipelineOptions& opt) {
  PipelineResult res;
  res.plan = plan_embedding_parameters(opt.mdim_est, opt.d);
  const int N = res.plan.N, M = res.plan.M, S = res.plan.S;
  CylinderAlgebra alg(sys);
  int r = 0;
  while (pow2_neg(r + 1) >= opt.eps) ++r;
  res.alpha_width = 2 * r + 1;
  Cover alpha = width_partition(alg, res.alpha_width, -r);
  Cover gamma = iterate(alg, alpha, N + 1);
  auto pou = partition_of_unity(alg, gamma);
  res.f_tilde = coordinate_function(sys, opt.d);
  std::vector<Vec> targets;
  for (const auto& q : pou.anchors()) {
    Vec t;
    for (int i = 0; i < N; ++i) {
      auto v = res.f_tilde(q.shifted(i));
      t.insert(t.end(), v.begin(), v.end());
    }
    targets.push_back(t);
  }
  res.F = build_F_shifted_blocks(pou, targets, N, 4 * S, opt.d, opt.delta, opt.seed);
  res.marker = build_marker(alg, 2 * M - 1, 0);
  res.marker_report = verify_marker(res.marker);
  if (!res.marker_report.ok) throw std::runtime_error("marker certificate failed: " + res.marker_report.first_failure);
  res.f = build_embedding_function(pou, res.F.table, rokhlin_from_marker(res.marker), M);
  res.f.params["N"] = std::to_string(N);
  res.f.params["M"] = std::to_string(M);
  res.f.params["S"] = std::to_string(S);
  res.f.params["eps"] = to_string(opt.eps);
  res.f.params["delta"] = to_string(opt.delta);
  res.f.params["eps_prime"] = to_string(res.plan.eps_prime);
  res.f.params["seed"] = std::to_string(opt.seed);
  return res;
}

}  // namespace meandim
