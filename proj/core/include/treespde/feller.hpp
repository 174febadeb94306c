#pragma once

#include <string>
#include <vector>

#include "treespde/graph.hpp"
#include "treespde/nullspace.hpp"
#include "treespde/rational.hpp"
#include "treespde/spectrum.hpp"

namespace treespde {

enum class Tristate { yes, no, indeterminate };

std::string to_string(Tristate t);

// Decision for one noise placement. The kernel condition is exact rational
// arithmetic; the promotion of "condition holds" to a definite yes needs the
// interior-eigenvector hypothesis, which is checked numerically per tree.
struct FellerDecision {
  bool kernel_condition = false;  // noisy set nonempty and kernel visible on it
  Tristate strong_feller = Tristate::indeterminate;
  Tristate irreducible = Tristate::indeterminate;
  std::string assumption_status;  // "verified" | "violated"
  // Vertex values of a blocking eigenfunction when strong_feller == no:
  // it vanishes on both endpoints of every noisy edge.
  std::vector<Rational> witness;
  std::string witness_kind;  // "constant" | "kernel" | ""
};

class FellerAnalyzer {
 public:
  explicit FellerAnalyzer(const MetricTree& tree);

  const MetricTree& tree() const { return tree_; }
  const KernelBasis& kernel() const { return kernel_; }
  int kernel_dimension() const { return kernel_.dimension(); }
  bool assumption_verified() const { return assumption_ok_; }
  const std::string& assumption_detail() const { return assumption_detail_; }

  // Exact: the noisy set is nonempty and the kernel basis restricted to the
  // columns of noisy-edge endpoints keeps full row rank, i.e. no kernel
  // combination hides from the noise.
  bool kernel_condition(const NoiseConfig& config) const;

  FellerDecision decide(const NoiseConfig& config) const;

 private:
  MetricTree tree_;
  KernelBasis kernel_;
  bool assumption_ok_ = true;
  std::string assumption_detail_;
};

// Exhaustive certificate over all 2^m noise-free subsets: the largest subset
// that keeps the kernel condition matches the closed-form bound.
struct SharpnessCertificate {
  int bound = 0;
  int achieved = 0;
  bool sharp = false;
  std::vector<int> witness_noise_free;  // 0-based, one maximizer
  long long subsets_checked = 0;
};

SharpnessCertificate certify_sharpness(const MetricTree& tree);

}  // namespace treespde
