// Three-valued numeric classification of tensors on a cone: K-positive
// (semi)definiteness / copositivity, K-regularity, K-(non)singularity and the
// principal sub-tensor sweep, plus sampling of the homogeneous solution cone.
#pragma once

#include "tcpkit/cone.hpp"
#include "tcpkit/tensor.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace tcpkit {

struct SearchBudget {
  /// Barycentric lattice resolution; 0 picks a default from the number of
  /// cone generators (64 up to three, 16 for four, smaller beyond).
  int grid_resolution = 0;
  int multistarts = 8;
  int polish_iters = 200;
  /// Lattice doublings allowed when a face certificate fails at the base resolution.
  int refinements = 3;
  std::uint64_t seed = 0;
  double margin = 1e-6;

  /// Throws std::invalid_argument on negative counts or a non-positive margin.
  void validate() const;
  /// Same budget with every effort knob multiplied by `factor`.
  SearchBudget scaled(int factor) const;
};

enum class Status { holds, fails, unknown };

const char* to_string(Status s);

struct Verdict {
  std::string property;
  Status status = Status::unknown;
  /// Optimum found by the search (the quantity compared against the margin).
  double certificate = 0.0;
  std::optional<VectorXd> witness;
  /// Objective evaluations spent.
  long budget_used = 0;
  SearchBudget budget;
  std::string note;
};

enum class Objective {
  form,           ///< A x^m
  residual_norm,  ///< |A x^{m-1}|
  abs_form,       ///< |A x^m|
};

struct BasisMinimum {
  double value = 0.0;
  VectorXd argmin;
  long evaluations = 0;
};

/// Minimum of the objective over unit vectors of K: lattice search over the
/// generator simplex followed by a local polish from the best lattice points.
/// The value is an upper bound on the true minimum. Ties on the lattice go to
/// the first point in enumeration order, which starts at the first generator.
BasisMinimum min_over_basis(Objective f, const Tensor& a, const PolyhedralCone& k, const SearchBudget& budget);

/// A x^m >= 0 on K.
Verdict is_K_psd(const Tensor& a, const PolyhedralCone& k, const SearchBudget& budget = {});
Verdict is_copositive(const Tensor& a, const SearchBudget& budget = {});

/// A x^m > 0 on K \ {0}.
Verdict is_K_pd(const Tensor& a, const PolyhedralCone& k, const SearchBudget& budget = {});
Verdict is_strictly_copositive(const Tensor& a, const SearchBudget& budget = {});

/// A x^m != 0 on K \ {0}.
Verdict is_K_regular(const Tensor& a, const PolyhedralCone& k, const SearchBudget& budget = {});

/// A x^{m-1} != 0 on K \ {0}. A `fails` status means K-singular, with a witness
/// whose residual is at most margin * 1e-3.
Verdict is_K_nonsingular(const Tensor& a, const PolyhedralCone& k, const SearchBudget& budget = {});

struct PrincipalEntry {
  IndexSet alpha;
  Verdict verdict;
};

struct PrincipalSweep {
  Verdict verdict;
  std::vector<PrincipalEntry> table;
  /// First subset (in size-then-lexicographic order) that is singular.
  std::optional<IndexSet> failing_alpha;
};

inline constexpr int kMaxSubsetDim = 12;

/// Orthant nonsingularity of every principal sub-tensor. Witnesses are
/// embedded back into R^n with zeros outside the failing subset.
PrincipalSweep all_principal_nonsingular(const Tensor& a, const SearchBudget& budget = {});

/// Unit vectors of S_A = SOL(R^n_+, 0, A): x >= 0 with A x^{m-1} >= 0 and
/// x^T A x^{m-1} = 0 up to the margin. Returns at most `count` points.
std::vector<VectorXd> s_cone_samples(const Tensor& a, int count, std::uint64_t seed,
                                     const SearchBudget& budget = {});

/// Necessary condition for q in the dual of S_A: q^T x >= -margin on every
/// sample. A `holds` result is a claim at sampling resolution only.
Verdict q_in_dual_SA(const Tensor& a, const VectorXd& q, const SearchBudget& budget = {});

}  // namespace tcpkit
