#pragma once

#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "meandim/rational.hpp"

namespace meandim {

using Word = std::string;

class WindowExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A finite piece of a configuration: symbols[i] sits at coordinate origin + i.
struct Window {
  Word symbols;
  int origin = 0;

  int lo() const { return origin; }
  int hi() const { return origin + static_cast<int>(symbols.size()); }
  bool covers(int a, int b) const { return a >= lo() && b <= hi(); }
  char at(int coord) const;
  std::string_view slice(int a, int b) const;
  Window restrict(int a, int b) const;
  // T^k x: (T^k x)_j = x_{j-k}.
  Window shifted(int k) const { return Window{symbols, origin + k}; }

  static Window centered(Word w);
  bool operator==(const Window&) const = default;
};

enum class SystemKind { FullShift, SFT, Substitution, Rotation };

std::string kind_name(SystemKind k);

class SymbolicSystem {
 public:
  struct Oracle;

  static SymbolicSystem full_shift(std::string alphabet, int max_window);
  static SymbolicSystem sft(std::string alphabet, std::vector<Word> forbidden, int max_window);
  static SymbolicSystem substitution(std::string alphabet, std::map<char, Word> rule, int max_window);
  // Coding of the rotation by `angle` with symbol j on [cuts[j], cuts[j+1]).
  static SymbolicSystem rotation(std::string alphabet, Rational angle, std::vector<Rational> cuts,
                                 int max_window);

  SystemKind kind() const;
  const std::string& alphabet() const;
  int max_window() const;
  const std::vector<Word>& forbidden() const;
  const std::map<char, Word>& rule() const;
  const Rational& angle() const;
  const std::vector<Rational>& cuts() const;

  std::vector<Word> language(int len) const;  // sorted
  std::size_t language_size(int len) const;
  bool allowed(std::string_view w) const;
  // Allowed words of length |core word| + left + right whose middle part lies in `core`.
  std::vector<Word> extend(const std::vector<Word>& core, int left, int right) const;
  // Polynomial complexity: extension is done by filtering the language.
  bool small_language() const;
  void require_window(int len) const;

 private:
  std::shared_ptr<const Oracle> impl_;
};

// Window length cap from MEANDIM_MAX_WINDOW, applied to every constructor.
int capped_window(int requested);

// Periodic points as words w (the point w^infinity with x_j = w[j mod n]).
struct PeriodicSet {
  int period_bound = 0;
  std::map<int, std::vector<Word>> strata;  // exact period n -> points

  std::vector<Word> points() const;
  std::size_t size() const;
  bool empty() const { return size() == 0; }
  std::vector<Word> cycles(int n) const;  // lexicographically minimal representatives
};

PeriodicSet enumerate_periodic_points(const SymbolicSystem& sys, int m);
bool is_primitive(const Word& w);
int exact_period(const Word& w);
Word rotate_point(const Word& w, int k);  // T^k of the periodic point
Window periodic_window(const Word& w, int lo, int hi);

Rational metric_distance(const Window& x, const Window& y);

}  // namespace meandim
