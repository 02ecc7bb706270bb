#include "meandim/towers.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <memory>
#include <unordered_set>

namespace meandim {

int marker_constant(int d, int N) {
  if (d < 0 || N < 1) throw std::invalid_argument("marker_constant needs d >= 0 and N >= 1");
  return (2 * d + 2) * N - 1;
}

std::pair<int, int> coloring_interval(int k, int N) { return {-N + 1 + k * N, k * N + N - 1}; }

int interval_coloring(const std::vector<int>& hits, int d, int N) {
  const int m = marker_constant(d, N);
  for (int h : hits)
    if (h < 1 || h > m) throw std::invalid_argument("hit index outside 1..m");
  if (static_cast<int>(hits.size()) > d) throw std::invalid_argument("pigeonhole failure: more than d hits");
  for (int k = 1; k <= 2 * d + 1; ++k) {
    auto [a, b] = coloring_interval(k, N);
    if (std::none_of(hits.begin(), hits.end(), [&](int h) { return h >= a && h <= b; })) return k;
  }
  throw std::logic_error("pigeonhole failure: no free interval");
}

namespace detail {
std::optional<Rational> translate_gap(const IntervalAlgebra& alg, const CircleSet& V, int m) {
  std::optional<Rational> best;
  for (int i = 1; i <= m; ++i) {
    auto g = set_distance(V, alg.translate(V, i));
    if (g && (!best || *g < *best)) best = g;
  }
  if (best) *best /= 2;
  return best;
}
}  // namespace detail

namespace sweep {

bool implies(const SymbolicSystem& sys, const std::vector<Shifted>& all, const std::vector<Shifted>& any) {
  bool first = true;
  int lo = 0, hi = 0;
  auto take = [&](const Shifted& s) {
    if (s.region->words().empty()) return;
    int a = s.region->lo() + s.shift, b = s.region->hi() + s.shift;
    lo = first ? a : std::min(lo, a);
    hi = first ? b : std::max(hi, b);
    first = false;
  };
  for (const auto& s : all) {
    if (s.region->words().empty()) return true;
    take(s);
  }
  for (const auto& s : any) take(s);
  auto member = [&](std::string_view x, const Shifted& s) {
    const auto& ws = s.region->words();
    if (ws.empty()) return false;
    auto part = x.substr(static_cast<std::size_t>(s.region->lo() + s.shift - lo), static_cast<std::size_t>(s.region->width()));
    auto it = std::lower_bound(ws.begin(), ws.end(), part, [](const Word& a, std::string_view b) { return std::string_view(a) < b; });
    return it != ws.end() && std::string_view(*it) == part;
  };
  for (const auto& x : sys.language(hi - lo)) {
    bool in_all = std::all_of(all.begin(), all.end(), [&](const Shifted& s) { return member(x, s); });
    if (!in_all) continue;
    if (std::none_of(any.begin(), any.end(), [&](const Shifted& s) { return member(x, s); })) return false;
  }
  return true;
}

bool translates_disjoint(const SymbolicSystem& sys, const CylinderRegion& a, int i, const CylinderRegion& b) {
  return implies(sys, {{&a, 0}, {&b, i}}, {});
}

bool covered(const SymbolicSystem& sys, const CylinderRegion& a, int i_lo, int i_hi, const CylinderRegion& w) {
  std::vector<Shifted> any;
  for (int i = i_lo; i <= i_hi; ++i) any.push_back({&w, i});
  return implies(sys, {{&a, 0}}, any);
}

}  // namespace sweep

namespace {

bool m_disjoint(const CylinderAlgebra& alg, const CylinderRegion& a, const CylinderRegion& b, int m) {
  for (int i = 1; i <= m; ++i) {
    if (!alg.disjoint(a, alg.translate(b, i))) return false;
    if (!alg.disjoint(b, alg.translate(a, i))) return false;
  }
  return true;
}

}  // namespace

MarkerCertificate build_marker(const CylinderAlgebra& alg, int N, int d, const MarkerOptions& opt) {
  const auto& sys = alg.system();
  MarkerCertificate cert;
  cert.system = sys;
  cert.N = N;
  cert.d = d;
  cert.m = marker_constant(d, N);
  const int m = cert.m;
  if (N == 1) {
    cert.W = alg.whole();
    cert.start_cover = {cert.W};
    cert.cover_bound = 0;
    cert.facts.push_back({"cover", 0, 0, ""});
    return cert;
  }
  sys.require_window(m + 1);
  auto ps = enumerate_periodic_points(sys, m);
  if (!ps.empty())
    throw std::invalid_argument("aperiodicity precondition fails: " + std::to_string(ps.size()) + " points of period <= " +
                                std::to_string(m));

  // Starting cylinders: refine to the right until each is m-disjoint from its translates.
  int limit = opt.max_start_width > 0 ? opt.max_start_width : sys.max_window() - m;
  std::vector<CylinderRegion> good;
  std::deque<Word> queue;
  for (const auto& w : sys.language(1)) queue.push_back(w);
  while (!queue.empty()) {
    Word w = queue.front();
    queue.pop_front();
    auto C = alg.cylinder(w, 0);
    bool ok = true;
    for (int i = 1; i <= m && ok; ++i) ok = alg.disjoint(C, alg.translate(C, i));
    if (ok) {
      good.push_back(C);
      continue;
    }
    if (static_cast<int>(w.size()) + 1 > limit) throw Infeasible("no valid starting cover within the window budget");
    for (char c : sys.alphabet())
      if (sys.allowed(w + c)) queue.push_back(w + c);
  }
  // Group cylinders into few m-disjoint members.
  std::vector<CylinderRegion> groups;
  for (const auto& C : good) {
    bool placed = false;
    for (auto& G : groups)
      if (m_disjoint(alg, G, C, m)) {
        G = alg.unite(G, C);
        placed = true;
        break;
      }
    if (!placed) groups.push_back(C);
  }
  cert.start_cover = groups;

  CylinderRegion W = groups.front();
  for (std::size_t k = 1; k < groups.size(); ++k) {
    auto r = disjointify(alg, W, groups[k], N, d);
    InductionStep step;
    step.V = groups[k];
    step.R = r.R;
    step.pieces = r.pieces;
    step.hits = r.hits;
    step.colors = r.colors;
    step.W = alg.canonical(r.W);
    W = step.W;
    cert.steps.push_back(std::move(step));
  }
  cert.W = W;

  CylinderRegion acc = W;
  int bound = 0;
  while (!alg.covers_space({acc})) {
    if (++bound > m) throw std::logic_error("translates of W fail to cover within the return bound");
    acc = alg.unite(acc, alg.translate(W, bound));
  }
  cert.cover_bound = bound;

  for (std::size_t j = 0; j < groups.size(); ++j)
    for (int i = 1; i <= m; ++i) cert.facts.push_back({"start_disjoint", static_cast<int>(j), i, ""});
  cert.facts.push_back({"start_cover", 0, 0, ""});
  for (std::size_t k = 0; k < cert.steps.size(); ++k) {
    int s = static_cast<int>(k) + 1;
    cert.facts.push_back({"step_contains", s, 0, ""});
    cert.facts.push_back({"step_covers", s, 0, ""});
    for (int i = 1; i < N; ++i) cert.facts.push_back({"step_disjoint", s, i, ""});
    for (std::size_t p = 0; p < cert.steps[k].pieces.size(); ++p) cert.facts.push_back({"coloring", s, static_cast<int>(p), ""});
  }
  for (int i = 1; i < N; ++i) cert.facts.push_back({"disjoint", 0, i, ""});
  cert.facts.push_back({"cover", 0, bound, ""});
  return cert;
}

VerifyReport verify_marker(const MarkerCertificate& cert) {
  VerifyReport rep;
  const auto& sys = cert.system;
  auto fail = [&](const std::string& what) {
    if (rep.ok) {
      rep.ok = false;
      rep.first_failure = what;
    }
  };
  if (cert.m != (2 * cert.d + 2) * cert.N - 1) fail("m differs from (2d+2)N-1");
  if (cert.cover_bound < 0 || cert.cover_bound > cert.m) fail("cover bound outside [0, m]");
  auto W_at = [&](std::size_t s) -> const CylinderRegion& {
    return s == 0 ? cert.start_cover.at(0) : cert.steps.at(s - 1).W;
  };
  auto one = [&](const MarkerFact& f) -> bool {
    const int m = cert.m;
    if (f.kind == "disjoint") return sweep::translates_disjoint(sys, cert.W, f.index, cert.W);
    if (f.kind == "cover") {
      CylinderRegion all(0, 0, {Word()});
      return sweep::covered(sys, all, 0, f.index, cert.W) && f.index == cert.cover_bound;
    }
    if (f.kind == "start_disjoint") {
      const auto& U = cert.start_cover.at(static_cast<std::size_t>(f.step));
      return sweep::translates_disjoint(sys, U, f.index, U);
    }
    if (f.kind == "start_cover") {
      std::vector<sweep::Shifted> any;
      for (const auto& U : cert.start_cover) any.push_back({&U, 0});
      return sweep::implies(sys, {}, any);
    }
    std::size_t s = static_cast<std::size_t>(f.step);
    const auto& st = cert.steps.at(s - 1);
    const auto& prev = W_at(s - 1);
    if (f.kind == "step_contains") return sweep::implies(sys, {{&prev, 0}}, {{&st.W, 0}});
    if (f.kind == "step_covers") return sweep::covered(sys, st.V, 1, m, st.W);
    if (f.kind == "step_disjoint") return sweep::translates_disjoint(sys, st.W, f.index, st.W);
    if (f.kind == "coloring") {
      const auto& E = st.pieces.at(static_cast<std::size_t>(f.index));
      std::vector<int> hits;
      for (int i = 1; i <= m; ++i)
        if (!sweep::translates_disjoint(sys, E, i, prev)) hits.push_back(i);
      if (hits != st.hits.at(static_cast<std::size_t>(f.index))) return false;
      int c = st.colors.at(static_cast<std::size_t>(f.index));
      if (c < 1 || c > 2 * cert.d + 1) return false;
      for (int h : hits)
        if (h >= -cert.N + 1 + c * cert.N && h <= c * cert.N + cert.N - 1) return false;
      // The translated piece must sit inside the new W.
      return sweep::implies(sys, {{&E, -c * cert.N}}, {{&st.W, 0}});
    }
    return false;
  };
  // Core conditions are checked whatever the fact list says.
  std::vector<MarkerFact> core;
  for (int i = 1; i < cert.N; ++i) core.push_back({"disjoint", 0, i, ""});
  core.push_back({"cover", 0, cert.cover_bound, ""});
  for (const std::vector<MarkerFact>* list : std::array<const std::vector<MarkerFact>*, 2>{&core, &cert.facts})
    for (const auto& f : *list) {
      if (!rep.ok) return rep;
      bool holds = false;
      try {
        holds = one(f);
      } catch (const std::exception& e) {
        fail(f.kind + " step " + std::to_string(f.step) + " index " + std::to_string(f.index) + ": " + e.what());
        continue;
      }
      ++rep.checked;
      if (!holds) fail(f.kind + " step " + std::to_string(f.step) + " index " + std::to_string(f.index));
    }
  return rep;
}

CylinderRegion marker_interconvert(const CylinderAlgebra&, const CylinderRegion& F, MarkerDirection) { return F; }

bool is_marker(const IntervalAlgebra& alg, const CircleSet& F, int n, int m) {
  for (int i = 1; i < n; ++i)
    if (!alg.disjoint(F, alg.translate(F, i))) return false;
  std::vector<CircleSet> ts;
  for (int i = 0; i <= m; ++i) ts.push_back(alg.translate(F, i));
  return alg.covers_space(ts);
}

Rational lebesgue_number(const IntervalAlgebra&, const std::vector<CircleSet>& open_cover) {
  for (const auto& c : open_cover)
    if (c.is_full()) return Rational(1, 2);
  std::vector<CircleSet::Component> comps;
  for (const auto& c : open_cover)
    for (const auto& k : c.components()) comps.push_back(k);
  std::vector<Rational> cand;
  for (const auto& p : comps) {
    cand.push_back(circle_mod(p.lo));
    cand.push_back(circle_mod(p.hi));
    cand.push_back(circle_mod((p.lo + p.hi) / 2));
    for (const auto& q : comps) {
      cand.push_back(circle_mod((q.lo + p.hi) / 2));
      cand.push_back(circle_mod((q.lo + p.hi + 1) / 2));
    }
  }
  std::sort(cand.begin(), cand.end());
  cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
  std::vector<CircleSet> comp_sets;
  for (const auto& c : open_cover) comp_sets.push_back(c.complement());
  std::optional<Rational> best;
  for (const auto& x : cand) {
    Rational h = 0;
    for (std::size_t i = 0; i < open_cover.size(); ++i)
      if (open_cover[i].contains(x)) h = std::max(h, point_distance(x, comp_sets[i]));
    if (!best || h < *best) best = h;
  }
  return best.value_or(Rational(0));
}

InterconvertResult marker_interconvert(const IntervalAlgebra& alg, const CircleSet& F, int n, int m, MarkerDirection dir) {
  InterconvertResult out;
  if (dir == MarkerDirection::ClosedToOpen) {
    if (!(F == F.closure())) throw std::invalid_argument("expected a closed marker");
    if (!is_marker(alg, F, n, m)) throw std::invalid_argument("input is not a marker");
    std::optional<Rational> gap;
    for (int i = 1; i < n; ++i) {
      auto g = set_distance(F, alg.translate(F, i));
      if (g && (!gap || *g < *gap)) gap = g;
    }
    out.radius = gap ? Rational(*gap / 2) : Rational(1, 8);
    if (out.radius <= 0) throw Infeasible("translates of the marker touch");
    out.marker = open_tube(F, out.radius);
    if (!is_marker(alg, out.marker, n, m)) throw Infeasible("no rational tube radius preserves disjointness");
    return out;
  }
  if (!(F == F.interior())) throw std::invalid_argument("expected an open marker");
  if (!is_marker(alg, F, n, m)) throw std::invalid_argument("input is not a marker");
  std::vector<CircleSet> cover;
  for (int i = 0; i <= m; ++i) cover.push_back(alg.translate(F, i));
  out.lebesgue = lebesgue_number(alg, cover);
  if (*out.lebesgue <= 0) throw Infeasible("zero Lebesgue number");
  out.radius = *out.lebesgue / 4;
  out.marker = inward_tube(F, out.radius).closure();
  if (!is_marker(alg, out.marker, n, m)) throw Infeasible("inward tube lost the marker property");
  return out;
}

bool RokhlinFunction::exceptional(const Window& x) const { return value(x.shifted(1)) != value(x) + 1; }

RokhlinFunction rokhlin_from_region(const CylinderRegion& W, int height, int depth) {
  if (W.empty()) throw std::invalid_argument("empty marker");
  auto words = std::make_shared<std::unordered_set<std::string>>(W.words().begin(), W.words().end());
  RokhlinFunction r;
  r.lo = W.lo();
  r.hi = W.hi() + height;
  r.height = height;
  r.depth = depth;
  r.marker = W;
  const int a = W.lo(), w = W.width();
  r.value = [words, a, w, height](const Window& x) {
    for (int k = 0; k <= height; ++k) {
      auto s = x.slice(a + k, a + k + w);
      if (words->count(std::string(s))) return Rational(k);
    }
    throw std::logic_error("configuration misses every translate of the marker");
  };
  return r;
}

RokhlinFunction rokhlin_from_marker(const MarkerCertificate& cert) {
  return rokhlin_from_region(cert.W, cert.cover_bound, cert.N);
}

RokhlinReport check_rokhlin(const SymbolicSystem& sys, const RokhlinFunction& r, int span) {
  RokhlinReport rep;
  int len = std::max(span, r.depth);
  int lo = r.lo - 1, hi = r.hi + len;
  for (const auto& w : sys.language(hi - lo)) {
    Window x{w, lo};
    ++rep.windows;
    std::vector<char> bad(static_cast<std::size_t>(len));
    for (int j = 0; j < len; ++j) bad[static_cast<std::size_t>(j)] = r.exceptional(x.shifted(-j));
    for (int a = 0; a + 1 < len; ++a) {
      if (!bad[static_cast<std::size_t>(a)]) continue;
      for (int b = a + 1; b < len; ++b) {
        if (!bad[static_cast<std::size_t>(b)]) continue;
        if (b - a < r.depth && rep.ok) {
          rep.ok = false;
          rep.first_failure = "exceptional at shifts " + std::to_string(a) + " and " + std::to_string(b) + " of " + w;
        }
      }
    }
    for (int a = 0; a + span <= len; ++a) {
      int c = 0;
      for (int b = a; b < a + span; ++b) c += bad[static_cast<std::size_t>(b)];
      rep.max_bad = std::max(rep.max_bad, c);
      if (c > 1 && rep.ok) {
        rep.ok = false;
        rep.first_failure = "two exceptional shifts among " + std::to_string(span) + " in " + w;
      }
    }
  }
  return rep;
}

}  // namespace meandim
