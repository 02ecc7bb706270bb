#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "meandim/covers.hpp"
#include "meandim/independence.hpp"
#include "meandim/towers.hpp"

namespace meandim {

// Weights psi_U(x) = dist(x, U^c) / sum_V dist(x, V^c) for a finite clopen cover.
class PartitionOfUnity {
 public:
  PartitionOfUnity(SymbolicSystem sys, std::vector<CylinderRegion> members, std::vector<Window> anchors);

  const SymbolicSystem& system() const { return sys_; }
  const std::vector<CylinderRegion>& members() const { return members_; }
  const std::vector<Window>& anchors() const { return anchors_; }
  std::size_t size() const { return members_.size(); }
  int radius() const { return radius_; }
  int lo() const { return -radius_; }
  int hi() const { return radius_ + 1; }

  Rational distance_to_complement(std::size_t u, const Window& x) const;
  Vec weights(const Window& x) const;
  std::vector<int> support(const Window& x) const;  // alpha_x, increasing
  // Every support set met by some admissible configuration.
  std::vector<std::vector<int>> all_supports() const;

 private:
  SymbolicSystem sys_;
  std::vector<CylinderRegion> members_;
  std::vector<Window> anchors_;
  int radius_ = 0;
  struct Cache {
    std::mutex mu;
    std::unordered_map<std::string, int> depth;  // key: member index + centered word
  };
  std::shared_ptr<Cache> cache_;
};

// Anchors are the deepest windows of U outside every other member, lexicographically minimal.
PartitionOfUnity partition_of_unity(const CylinderAlgebra& alg, const Cover& cover);

// Per-member vectors in ([0,1]^d)^n, flattened block by block.
struct VertexTable {
  int n = 1, d = 1;
  std::vector<Vec> v;
};

Vec oplus(const Vec& v, int d, int n_target);  // periodic extension to n_target blocks
Vec bullet(const Vec& v, int d, int l);        // block k of the result is block (k + l) mod n
Vec block(const Vec& v, int d, int k);
Vec blocks(const Vec& v, int d, int a, int b);  // blocks a..b inclusive
Vec evaluate_F(const PartitionOfUnity& pou, const VertexTable& F, const Window& x);

struct FBuild {
  VertexTable table;
  IndependenceCertificate cert;
  std::vector<std::vector<int>> supports;
};

struct FDisjointBuild {
  VertexTable F1, F2;
  IndependenceCertificate cert;
};

// Targets are perturbed within eps/2 for the first cover; the second keeps its targets.
FDisjointBuild build_F_disjoint(const PartitionOfUnity& pou1, const PartitionOfUnity& pou2, const std::vector<Vec>& targets1,
                                const std::vector<Vec>& targets2, int n1, int n2, int d, const Rational& eps,
                                std::uint64_t seed);
FBuild build_F_translation(const PartitionOfUnity& pou, const std::vector<Vec>& targets, int n, int l, int d,
                           const Rational& eps, std::uint64_t seed);

enum class AvoidMode { Full, SingleWindow };
FBuild build_F_avoid_periodic(const PartitionOfUnity& pou, const std::vector<Vec>& targets, int N, int S, int n, int d,
                              const Rational& eps, std::uint64_t seed, AvoidMode mode = AvoidMode::Full,
                              int lambda_samples = 4);

// lambda F(x)|_l^{l+w-1} + (1-lambda) F(y)|_{l+1}^{l+w} determines the member of x, for 0 <= l < N - w.
FBuild build_F_shifted_blocks(const PartitionOfUnity& pou, const std::vector<Vec>& targets, int N, int w, int d,
                              const Rational& eps, std::uint64_t seed);
// The checks recorded by build_F_shifted_blocks, recomputed from the vertex vectors alone.
std::vector<RankCheck> shifted_block_checks(const std::vector<Vec>& v, int N, int w, int d);

// Sliding block code x -> (table[x_{[j+lo, j+hi)}])_j.
struct SlidingCode {
  int lo = 0, hi = 1;
  std::map<Word, char> table;
  std::string target_alphabet;

  static SlidingCode identity(const std::string& alphabet);
  char apply(const Window& x) const;
  Window image(const Window& x, int a, int b) const;  // coordinates [a, b)
};

struct EmbeddingFunction {
  enum class Mode { Lookup, DirectF, Rokhlin, Clamp, Composed };
  Mode mode = Mode::Lookup;
  int d = 1;

  // Lookup: value of the word on [lo, hi).
  int lo = 0, hi = 1;
  std::map<Word, Vec> table;
  std::optional<Vec> fallback;

  // DirectF: F(x)|_0. Rokhlin: interpolation over blocks of length M.
  std::shared_ptr<const PartitionOfUnity> pou;
  VertexTable F;
  int M = 0;
  std::optional<RokhlinFunction> rokhlin;

  // Clamp: h(base + g), g constant on each patch. Composed: (base, h o code).
  std::shared_ptr<const EmbeddingFunction> base;
  std::vector<std::pair<CylinderRegion, Vec>> patches;
  std::shared_ptr<const EmbeddingFunction> h;
  std::optional<SlidingCode> code;

  std::map<std::string, std::string> params;

  Vec operator()(const Window& x) const;
  std::pair<int, int> read_range() const;
};

std::string mode_name(EmbeddingFunction::Mode m);

EmbeddingFunction coordinate_function(const SymbolicSystem& sys, int d);  // symbol index / (|A|-1) at coordinates 0..d-1
EmbeddingFunction lookup_function(int lo, int hi, std::map<Word, Vec> table, int d, std::optional<Vec> fallback = {});

// Direct block read: the last marker visit is found by scanning back; independent of the interpolation formula.
Vec block_read(const EmbeddingFunction& f, const Window& x);

struct ClampPatch {
  CylinderRegion region;
  Vec target;  // f_partial on the region's base point
  Window base_point;
};
// f = h(f_tilde + g). B is given as patches; on patch i, g is the constant f_partial(b_i) - f_tilde(b_i).
EmbeddingFunction clamp_extend(const std::vector<ClampPatch>& patches, const EmbeddingFunction& f_tilde, const Rational& eps);

std::vector<Vec> orbit_window(const EmbeddingFunction& f, const Window& x, int a, int b);

struct Compatibility {
  bool ok = true;
  std::optional<Rational> margin;  // nullopt for an empty K
};
Compatibility check_K_compatible(const EmbeddingFunction& f, const std::vector<std::pair<Window, Window>>& K, int a, int b);

struct EmbeddingPlan {
  int N = 16, M = 8, S = 1;
  Rational eps_prime;
  Rational mdim_used;
};
EmbeddingPlan plan_embedding_parameters(const Rational& mdim_est, int d);

EmbeddingFunction build_embedding_function(const PartitionOfUnity& pou, const VertexTable& F, const RokhlinFunction& n, int M);

struct EpsilonReport {
  bool pass = true;
  bool complete = false;  // every eps-far pair differs inside the cylinder width
  int width = 0;
  int window = 0;
  int radius = 0;
  std::size_t cylinders = 0;
  std::size_t pairs = 0;
  std::size_t separated_by_f = 0;
  std::size_t separated_by_pi = 0;
  std::optional<Rational> tau;  // min over pairs of the I_f gap
  std::optional<std::pair<Window, Window>> witness;
};
// Exhaustive sweep over pairs of distinct centered width-w cylinders. I_f is read on shifts [-radius, radius].
EpsilonReport check_epsilon_embedding(const EmbeddingFunction& f, const SymbolicSystem& sys, const SlidingCode* pi,
                                      const Rational& eps, int width, int radius);

struct InjectivityCertificate {
  bool pass = false;
  std::string reason;
};
InjectivityCertificate certify_injective(const EmbeddingFunction& h, const std::string& alphabet);
EmbeddingFunction combine_with_factor(const EmbeddingFunction& g, const EmbeddingFunction& h, const SlidingCode& pi,
                                      const InjectivityCertificate& cert);

struct PeriodicOrbit {
  Word base;
  int period = 1;
  Vec target, v;
};
struct PeriodicImmersion {
  EmbeddingFunction f;
  std::vector<PeriodicOrbit> orbits;
  std::vector<RankCheck> checks;
  std::size_t pairs_checked = 0;
  bool injective = false;
};
PeriodicImmersion build_periodic_immersion(const SymbolicSystem& sys, int m_max, int d, std::uint64_t seed,
                                           const Rational& eps = Rational(1, 4));
// Pairwise comparison of I_f over lcm-length windows of all points of period <= m_max.
std::pair<bool, std::size_t> periodic_injective(const EmbeddingFunction& f, const SymbolicSystem& sys, int m_max);

struct PipelineOptions {
  Rational mdim_est = 0;
  int d = 1;
  Rational eps = Rational(1, 8);
  Rational delta = Rational(1, 4);
  std::uint64_t seed = 0;
};
struct PipelineResult {
  EmbeddingPlan plan;
  MarkerCertificate marker;
  VerifyReport marker_report;
  EmbeddingFunction f, f_tilde;
  FBuild F;
  int alpha_width = 1;
};
PipelineResult build_pipeline(const SymbolicSystem& sys, const PipelineOptions& opt);

}  // namespace meandim
