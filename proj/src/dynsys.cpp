#include "meandim/dynsys.hpp"

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <mutex>
#include <numeric>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace meandim {

char Window::at(int coord) const {
  if (coord < lo() || coord >= hi()) throw WindowExceeded("coordinate " + std::to_string(coord) + " outside window");
  return symbols[static_cast<std::size_t>(coord - origin)];
}

std::string_view Window::slice(int a, int b) const {
  if (!covers(a, b))
    throw WindowExceeded("window [" + std::to_string(lo()) + "," + std::to_string(hi()) + ") does not cover [" +
                         std::to_string(a) + "," + std::to_string(b) + ")");
  return std::string_view(symbols).substr(static_cast<std::size_t>(a - origin), static_cast<std::size_t>(b - a));
}

Window Window::restrict(int a, int b) const { return Window{Word(slice(a, b)), a}; }

Window Window::centered(Word w) {
  int r = static_cast<int>(w.size()) / 2;
  return Window{std::move(w), -r};
}

std::string kind_name(SystemKind k) {
  switch (k) {
    case SystemKind::FullShift: return "full_shift";
    case SystemKind::SFT: return "sft";
    case SystemKind::Substitution: return "substitution";
    case SystemKind::Rotation: return "rotation";
  }
  return "?";
}

int capped_window(int requested) {
  if (requested <= 0) throw std::invalid_argument("max_window must be positive");
  if (const char* env = std::getenv("MEANDIM_MAX_WINDOW")) {
    int cap = std::atoi(env);
    if (cap > 0) return std::min(requested, cap);
  }
  return requested;
}

struct SymbolicSystem::Oracle {
  SystemKind kind;
  std::string alphabet;
  int max_window = 0;
  std::vector<Word> forbidden;
  std::map<char, Word> rule;
  Rational angle;
  std::vector<Rational> cuts;

  virtual ~Oracle() = default;
  virtual std::vector<Word> words(int len) const = 0;
  virtual std::size_t count(int len) const { return words(len).size(); }
  virtual bool allowed(std::string_view w) const = 0;
  virtual bool small() const = 0;

  void require(int len) const {
    if (len > max_window)
      throw WindowExceeded("window " + std::to_string(len) + " exceeds max_window " + std::to_string(max_window));
  }
  bool in_alphabet(std::string_view w) const {
    return std::all_of(w.begin(), w.end(), [&](char c) { return alphabet.find(c) != std::string::npos; });
  }
};

namespace {

void check_alphabet(const std::string& alphabet) {
  if (alphabet.empty()) throw std::invalid_argument("empty alphabet");
  std::set<char> seen(alphabet.begin(), alphabet.end());
  if (seen.size() != alphabet.size()) throw std::invalid_argument("repeated alphabet symbol");
}

// Higher-block presentation: vertices are allowed words of length b, trimmed to the
// bi-infinitely extendable part.
struct SftOracle : SymbolicSystem::Oracle {
  int b = 1;
  std::vector<Word> vertices;  // sorted
  std::unordered_map<Word, int> index;
  std::vector<std::vector<int>> succ;
  std::unordered_set<Word> edge_words;  // length b+1
  mutable std::mutex mu;
  mutable std::map<int, std::vector<Word>> short_cache;

  bool clean(std::string_view w) const {
    for (const auto& f : forbidden)
      if (w.find(f) != std::string_view::npos) return false;
    return true;
  }

  void build() {
    std::size_t longest = 0;
    for (const auto& f : forbidden) {
      if (f.empty() || !in_alphabet(f)) throw std::invalid_argument("bad forbidden word '" + f + "'");
      longest = std::max(longest, f.size());
    }
    b = std::max(1, static_cast<int>(longest) - 1);
    std::vector<Word> all{""};
    for (int i = 0; i < b; ++i) {
      std::vector<Word> next;
      for (const auto& w : all)
        for (char c : alphabet) {
          Word x = w + c;
          if (clean(x)) next.push_back(x);
        }
      all = std::move(next);
    }
    std::sort(all.begin(), all.end());
    std::set<Word> alive(all.begin(), all.end());
    // Remove vertices without predecessor or successor until stable.
    bool changed = true;
    while (changed) {
      changed = false;
      for (auto it = alive.begin(); it != alive.end();) {
        bool has_out = false, has_in = false;
        for (char c : alphabet) {
          Word out = it->substr(1) + c, in = Word(1, c) + it->substr(0, b - 1);
          if (!has_out && alive.count(out) && clean(*it + c)) has_out = true;
          if (!has_in && alive.count(in) && clean(Word(1, c) + *it)) has_in = true;
        }
        if (!has_out || !has_in) {
          it = alive.erase(it);
          changed = true;
        } else {
          ++it;
        }
      }
    }
    vertices.assign(alive.begin(), alive.end());
    for (std::size_t i = 0; i < vertices.size(); ++i) index[vertices[i]] = static_cast<int>(i);
    succ.assign(vertices.size(), {});
    for (std::size_t i = 0; i < vertices.size(); ++i)
      for (char c : alphabet) {
        Word e = vertices[i] + c;
        auto it = index.find(e.substr(1));
        if (it != index.end() && clean(e)) {
          succ[i].push_back(it->second);
          edge_words.insert(e);
        }
      }
  }

  std::vector<Word> words(int len) const override {
    require(len);
    if (len <= b) {
      std::lock_guard<std::mutex> lock(mu);
      auto it = short_cache.find(len);
      if (it != short_cache.end()) return it->second;
      std::set<Word> out;
      for (const auto& v : vertices)
        for (int s = 0; s + len <= b; ++s) out.insert(v.substr(s, len));
      return short_cache[len] = std::vector<Word>(out.begin(), out.end());
    }
    std::vector<Word> out;
    Word cur;
    std::function<void(int, int)> walk = [&](int v, int left) {
      if (left == 0) {
        out.push_back(cur);
        return;
      }
      for (int u : succ[v]) {
        cur.push_back(vertices[u].back());
        walk(u, left - 1);
        cur.pop_back();
      }
    };
    for (std::size_t v = 0; v < vertices.size(); ++v) {
      cur = vertices[v];
      walk(static_cast<int>(v), len - b);
    }
    return out;
  }

  bool allowed(std::string_view w) const override {
    int len = static_cast<int>(w.size());
    require(len);
    if (!in_alphabet(w)) return false;
    if (len <= b) {
      auto ws = words(len);
      return std::binary_search(ws.begin(), ws.end(), Word(w));
    }
    for (int s = 0; s + b + 1 <= len; ++s)
      if (!edge_words.count(Word(w.substr(s, b + 1)))) return false;
    return true;
  }

  bool small() const override { return false; }
};

std::vector<int> suffix_array(const std::string& s) {
  int n = static_cast<int>(s.size());
  std::vector<int> sa(n), rk(n), tmp(n);
  std::iota(sa.begin(), sa.end(), 0);
  for (int i = 0; i < n; ++i) rk[i] = static_cast<unsigned char>(s[i]);
  for (int k = 1;; k <<= 1) {
    auto key = [&](int i) { return std::make_pair(rk[i], i + k < n ? rk[i + k] : -1); };
    std::sort(sa.begin(), sa.end(), [&](int a, int b) { return key(a) < key(b); });
    tmp[sa[0]] = 0;
    for (int i = 1; i < n; ++i) tmp[sa[i]] = tmp[sa[i - 1]] + (key(sa[i - 1]) < key(sa[i]) ? 1 : 0);
    rk = tmp;
    if (rk[sa[n - 1]] == n - 1) break;
  }
  return sa;
}

std::vector<int> lcp_array(const std::string& s, const std::vector<int>& sa) {
  int n = static_cast<int>(s.size());
  std::vector<int> rank(n), lcp(n, 0);
  for (int i = 0; i < n; ++i) rank[sa[i]] = i;
  int h = 0;
  for (int i = 0; i < n; ++i) {
    if (rank[i] > 0) {
      int j = sa[rank[i] - 1];
      while (i + h < n && j + h < n && s[i + h] == s[j + h]) ++h;
      lcp[rank[i]] = h;
      if (h > 0) --h;
    } else {
      h = 0;
    }
  }
  return lcp;
}

// Factors of a long iterate of the substitution, indexed through a suffix array.
struct SubstitutionOracle : SymbolicSystem::Oracle {
  std::string text;
  std::vector<int> sa, lcp;
  mutable std::mutex mu;
  mutable std::map<int, std::vector<std::uint32_t>> cache;

  std::vector<std::uint32_t> groups(int len) const {
    std::vector<std::uint32_t> out;
    int n = static_cast<int>(text.size());
    int run = 0;
    bool have = false;
    for (int i = 0; i < n; ++i) {
      if (i > 0) run = have ? std::min(run, lcp[i]) : lcp[i];
      if (n - sa[i] < len) continue;
      if (!have || run < len) out.push_back(static_cast<std::uint32_t>(sa[i]));
      have = true;
      run = n;
    }
    return out;
  }

  void build() {
    for (char c : alphabet) {
      auto it = rule.find(c);
      if (it == rule.end() || it->second.empty() || !in_alphabet(it->second))
        throw std::invalid_argument(std::string("bad substitution image for '") + c + "'");
    }
    std::size_t target = std::max<std::size_t>(4096, 64 * static_cast<std::size_t>(max_window + 1));
    Word seed(1, alphabet[0]);
    for (;;) {
      Word w = seed;
      std::size_t steps = 0;
      while (w.size() < target) {
        Word next;
        for (char c : w) next += rule.at(c);
        if (next.size() <= w.size()) throw std::invalid_argument("substitution is not expanding");
        w = std::move(next);
        if (++steps > 200) throw std::invalid_argument("substitution does not grow");
      }
      text = std::move(w);
      sa = suffix_array(text);
      lcp = lcp_array(text, sa);
      // Stable once every factor of the largest length already occurs in the first half.
      for (char c : alphabet)
        if (text.find(c) == Word::npos) throw std::invalid_argument("substitution is not primitive");
      int n = static_cast<int>(text.size());
      std::size_t half = text.size() / 2;
      bool stable = true;
      std::size_t min_pos = text.size();
      int run = 0;
      bool have = false;
      for (int i = 0; i < n && stable; ++i) {
        if (i > 0) run = have ? std::min(run, lcp[i]) : lcp[i];
        if (n - sa[i] < max_window) continue;
        if (have && run < max_window) {
          if (min_pos + max_window > half) stable = false;
          min_pos = text.size();
        }
        min_pos = std::min<std::size_t>(min_pos, static_cast<std::size_t>(sa[i]));
        have = true;
        run = n;
      }
      if (stable && have && min_pos + max_window > half) stable = false;
      if (stable) break;
      target *= 2;
    }
  }

  const std::vector<std::uint32_t>& positions(int len) const {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(len);
    if (it != cache.end()) return it->second;
    return cache[len] = groups(len);
  }

  std::vector<Word> words(int len) const override {
    require(len);
    std::vector<Word> out;
    for (auto p : positions(len)) out.push_back(text.substr(p, static_cast<std::size_t>(len)));
    return out;
  }

  std::size_t count(int len) const override {
    require(len);
    return positions(len).size();
  }

  bool allowed(std::string_view w) const override {
    int len = static_cast<int>(w.size());
    require(len);
    if (len == 0) return true;
    const auto& pos = positions(len);
    std::string_view t(text);
    auto it = std::lower_bound(pos.begin(), pos.end(), w, [&](std::uint32_t p, std::string_view x) {
      return t.substr(p, static_cast<std::size_t>(len)) < x;
    });
    return it != pos.end() && t.substr(*it, static_cast<std::size_t>(len)) == w;
  }

  bool small() const override { return true; }
};

struct RotationOracle : SymbolicSystem::Oracle {
  mutable std::mutex mu;
  mutable std::map<int, std::vector<Word>> cache;

  char symbol_at(const Rational& x) const {
    std::size_t j = static_cast<std::size_t>(std::upper_bound(cuts.begin(), cuts.end(), x) - cuts.begin()) - 1;
    return alphabet[j];
  }

  Word code(const Rational& theta, int len) const {
    Word w;
    Rational x = theta;
    for (int i = 0; i < len; ++i) {
      w.push_back(symbol_at(x));
      x += angle;
      if (x >= 1) x -= 1;
    }
    return w;
  }

  std::vector<Word> words(int len) const override {
    require(len);
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(len);
    if (it != cache.end()) return it->second;
    std::vector<Rational> pts;
    for (const auto& c : cuts)
      for (int i = 0; i < len; ++i) pts.push_back(frac_of(c - angle * i));
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    std::set<Word> out;
    for (const auto& p : pts) out.insert(code(p, len));
    return cache[len] = std::vector<Word>(out.begin(), out.end());
  }

  bool allowed(std::string_view w) const override {
    int len = static_cast<int>(w.size());
    require(len);
    if (len == 0) return true;
    auto ws = words(len);
    return std::binary_search(ws.begin(), ws.end(), Word(w));
  }

  bool small() const override { return true; }
};

}  // namespace

SymbolicSystem SymbolicSystem::full_shift(std::string alphabet, int max_window) {
  check_alphabet(alphabet);
  auto o = std::make_shared<SftOracle>();
  o->kind = SystemKind::FullShift;
  o->alphabet = std::move(alphabet);
  o->max_window = capped_window(max_window);
  o->build();
  SymbolicSystem s;
  s.impl_ = o;
  return s;
}

SymbolicSystem SymbolicSystem::sft(std::string alphabet, std::vector<Word> forbidden, int max_window) {
  check_alphabet(alphabet);
  auto o = std::make_shared<SftOracle>();
  o->kind = SystemKind::SFT;
  o->alphabet = std::move(alphabet);
  std::sort(forbidden.begin(), forbidden.end());
  forbidden.erase(std::unique(forbidden.begin(), forbidden.end()), forbidden.end());
  o->forbidden = std::move(forbidden);
  o->max_window = capped_window(max_window);
  o->build();
  if (o->vertices.empty()) throw std::invalid_argument("SFT is empty");
  SymbolicSystem s;
  s.impl_ = o;
  return s;
}

SymbolicSystem SymbolicSystem::substitution(std::string alphabet, std::map<char, Word> rule, int max_window) {
  check_alphabet(alphabet);
  auto o = std::make_shared<SubstitutionOracle>();
  o->kind = SystemKind::Substitution;
  o->alphabet = std::move(alphabet);
  o->rule = std::move(rule);
  o->max_window = capped_window(max_window);
  o->build();
  SymbolicSystem s;
  s.impl_ = o;
  return s;
}

SymbolicSystem SymbolicSystem::rotation(std::string alphabet, Rational angle, std::vector<Rational> cuts,
                                        int max_window) {
  check_alphabet(alphabet);
  auto o = std::make_shared<RotationOracle>();
  o->kind = SystemKind::Rotation;
  o->alphabet = std::move(alphabet);
  angle.canonicalize();
  if (angle <= 0 || angle >= 1) throw std::invalid_argument("rotation angle must lie in (0,1)");
  o->angle = angle;
  std::sort(cuts.begin(), cuts.end());
  if (cuts.empty() || cuts.front() != 0 || cuts.back() >= 1 ||
      std::adjacent_find(cuts.begin(), cuts.end()) != cuts.end())
    throw std::invalid_argument("partition cuts must start at 0 and be distinct in [0,1)");
  if (cuts.size() != o->alphabet.size()) throw std::invalid_argument("one cut per symbol required");
  o->cuts = std::move(cuts);
  o->max_window = capped_window(max_window);
  if (Integer(angle.get_den()) <= o->max_window)
    throw std::invalid_argument("rotation denominator must exceed max_window");
  SymbolicSystem s;
  s.impl_ = o;
  return s;
}

SystemKind SymbolicSystem::kind() const { return impl_->kind; }
const std::string& SymbolicSystem::alphabet() const { return impl_->alphabet; }
int SymbolicSystem::max_window() const { return impl_->max_window; }
const std::vector<Word>& SymbolicSystem::forbidden() const { return impl_->forbidden; }
const std::map<char, Word>& SymbolicSystem::rule() const { return impl_->rule; }
const Rational& SymbolicSystem::angle() const { return impl_->angle; }
const std::vector<Rational>& SymbolicSystem::cuts() const { return impl_->cuts; }
std::vector<Word> SymbolicSystem::language(int len) const {
  if (len < 0) throw std::invalid_argument("negative length");
  if (len == 0) return {Word()};
  return impl_->words(len);
}
std::size_t SymbolicSystem::language_size(int len) const {
  if (len == 0) return 1;
  return impl_->count(len);
}
bool SymbolicSystem::allowed(std::string_view w) const { return impl_->allowed(w); }
bool SymbolicSystem::small_language() const { return impl_->small(); }
void SymbolicSystem::require_window(int len) const { impl_->require(len); }

std::vector<Word> SymbolicSystem::extend(const std::vector<Word>& core, int left, int right) const {
  if (core.empty()) return {};
  int w = static_cast<int>(core.front().size());
  int len = w + left + right;
  require_window(len);
  if (left == 0 && right == 0) return core;
  std::vector<Word> out;
  if (small_language()) {
    std::unordered_set<std::string_view> keep(core.begin(), core.end());
    for (auto& x : language(len))
      if (keep.count(std::string_view(x).substr(static_cast<std::size_t>(left), static_cast<std::size_t>(w))))
        out.push_back(std::move(x));
    return out;
  }
  std::vector<Word> cur = core;
  for (int i = 0; i < right; ++i) {
    std::vector<Word> next;
    for (const auto& x : cur)
      for (char c : alphabet()) {
        Word y = x + c;
        if (allowed(y)) next.push_back(std::move(y));
      }
    cur = std::move(next);
  }
  for (int i = 0; i < left; ++i) {
    std::vector<Word> next;
    for (const auto& x : cur)
      for (char c : alphabet()) {
        Word y = Word(1, c) + x;
        if (allowed(y)) next.push_back(std::move(y));
      }
    cur = std::move(next);
  }
  std::sort(cur.begin(), cur.end());
  cur.erase(std::unique(cur.begin(), cur.end()), cur.end());
  return cur;
}

bool is_primitive(const Word& w) { return exact_period(w) == static_cast<int>(w.size()); }

int exact_period(const Word& w) {
  int n = static_cast<int>(w.size());
  for (int p = 1; p < n; ++p) {
    if (n % p) continue;
    bool ok = true;
    for (int i = p; i < n && ok; ++i) ok = w[i] == w[i - p];
    if (ok) return p;
  }
  return n;
}

Word rotate_point(const Word& w, int k) {
  int n = static_cast<int>(w.size());
  Word out(w.size(), ' ');
  for (int j = 0; j < n; ++j) out[j] = w[mod_floor(j - k, n)];
  return out;
}

Window periodic_window(const Word& w, int lo, int hi) {
  Window x{Word(), lo};
  long long n = static_cast<long long>(w.size());
  for (int j = lo; j < hi; ++j) x.symbols.push_back(w[mod_floor(j, n)]);
  return x;
}

std::vector<Word> PeriodicSet::points() const {
  std::vector<Word> out;
  for (const auto& [n, pts] : strata) out.insert(out.end(), pts.begin(), pts.end());
  return out;
}

std::size_t PeriodicSet::size() const {
  std::size_t s = 0;
  for (const auto& [n, pts] : strata) s += pts.size();
  return s;
}

std::vector<Word> PeriodicSet::cycles(int n) const {
  std::vector<Word> out;
  auto it = strata.find(n);
  if (it == strata.end()) return out;
  for (const auto& w : it->second) {
    Word best = w;
    for (int k = 1; k < n; ++k) best = std::min(best, rotate_point(w, k));
    if (best == w) out.push_back(w);
  }
  return out;
}

PeriodicSet enumerate_periodic_points(const SymbolicSystem& sys, int m) {
  if (m < 1) throw std::invalid_argument("period bound must be positive");
  sys.require_window(m);
  PeriodicSet ps;
  ps.period_bound = m;
  const int L = sys.max_window();
  for (int n = 1; n <= m; ++n) {
    std::vector<Word> found;
    if (sys.kind() == SystemKind::Rotation) {
      ps.strata[n] = found;  // q > max_window >= n: no visible periodic points
      continue;
    }
    for (const auto& w : sys.language(n)) {
      if (!is_primitive(w)) continue;
      bool ok = true;
      if (sys.kind() == SystemKind::SFT || sys.kind() == SystemKind::FullShift) {
        int longest = 1;
        for (const auto& f : sys.forbidden()) longest = std::max(longest, static_cast<int>(f.size()));
        ok = sys.allowed(periodic_window(w, 0, std::min(L, n + longest)).symbols);
      } else {
        for (int t = 0; t < n && ok; ++t) ok = sys.allowed(periodic_window(w, t, t + L).symbols);
      }
      if (ok) found.push_back(w);
    }
    ps.strata[n] = found;
  }
  return ps;
}

Rational metric_distance(const Window& x, const Window& y) {
  if (x.symbols.size() != y.symbols.size() || x.origin != y.origin)
    throw std::invalid_argument("mismatched windows");
  if (x.lo() > 0 || x.hi() <= 0) throw std::invalid_argument("windows must contain coordinate 0");
  int best = -1;
  for (int j = x.lo(); j < x.hi(); ++j)
    if (x.at(j) != y.at(j)) {
      int k = j < 0 ? -j : j;
      if (best < 0 || k < best) best = k;
    }
  return best < 0 ? Rational(0) : pow2_neg(best);
}

}  // namespace meandim
