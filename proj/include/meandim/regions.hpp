#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "meandim/dynsys.hpp"

namespace meandim {

class Infeasible : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A clopen set: all configurations whose coordinates [lo, lo+width) spell one of `words`.
class CylinderRegion {
 public:
  CylinderRegion() = default;
  CylinderRegion(int lo, int width, std::vector<Word> words);

  int lo() const { return lo_; }
  int width() const { return width_; }
  int hi() const { return lo_ + width_; }
  const std::vector<Word>& words() const { return words_; }
  bool empty() const { return words_.empty(); }
  bool contains(const Window& x) const;
  bool contains_word(std::string_view w) const;

  bool operator==(const CylinderRegion&) const = default;

 private:
  int lo_ = 0;
  int width_ = 0;
  std::vector<Word> words_;
};

class CylinderAlgebra {
 public:
  using Region = CylinderRegion;

  explicit CylinderAlgebra(SymbolicSystem sys) : sys_(std::move(sys)) {}
  const SymbolicSystem& system() const { return sys_; }

  Region empty() const { return Region(); }
  Region whole() const { return Region(0, 0, {Word()}); }
  Region cylinder(const Word& w, int offset) const;
  Region from_cylinders(const std::vector<std::pair<Word, int>>& cyls) const;

  Region extend(const Region& r, int lo, int hi) const;
  Region canonical(const Region& r) const;

  Region unite(const Region& a, const Region& b) const;
  Region intersect(const Region& a, const Region& b) const;
  Region subtract(const Region& a, const Region& b) const;
  Region complement(const Region& a) const { return subtract(whole(), a); }
  Region translate(const Region& a, int i) const;
  Region closure(const Region& a) const { return a; }
  Region interior(const Region& a) const { return a; }
  Region boundary(const Region&) const { return empty(); }

  bool is_empty(const Region& a) const { return a.empty(); }
  bool equal(const Region& a, const Region& b) const;
  bool subset(const Region& a, const Region& b) const { return is_empty(subtract(a, b)); }
  bool disjoint(const Region& a, const Region& b) const;
  bool closures_disjoint(const Region& a, const Region& b) const { return disjoint(a, b); }
  bool covers_space(const std::vector<Region>& rs) const;
  Region unite_all(const std::vector<Region>& rs) const;

  std::vector<Region> cylinders(const Region& r) const;
  std::vector<Region> refine_meeting_few(const Region& R, const std::vector<Region>& family, int d) const;
  int max_width() const { return sys_.max_window(); }

 private:
  SymbolicSystem sys_;
};

bool check_general_position_weak(const CylinderAlgebra& alg, const std::vector<CylinderRegion>& boundaries, int d);

}  // namespace meandim
