// Verification and solution of TCP(K, q, A): find x in K with
// w = A x^{m-1} + q in K* and <x, w> = 0.
#pragma once

#include "tcpkit/classifiers.hpp"
#include "tcpkit/cone.hpp"
#include "tcpkit/tensor.hpp"

#include <cstdint>
#include <vector>

namespace tcpkit {

struct TcpInstance {
  PolyhedralCone cone;
  VectorXd q;
  Tensor a;

  /// Throws std::invalid_argument when the dimensions disagree.
  void validate() const;
  int dim() const { return a.dim(); }
};

struct Residual {
  double primal_dist = 0.0;  ///< dist(K, x)
  double dual_dist = 0.0;    ///< dist(K*, w)
  double comp_gap = 0.0;     ///< |<x, w>|
  double max() const;
};

struct TcpSolution {
  VectorXd x;
  VectorXd w;
  double primal_dist = 0.0;
  double dual_dist = 0.0;
  double comp_gap = 0.0;
  /// Support of x: components above kSupportTolerance.
  IndexSet alpha;
};

inline constexpr double kSupportTolerance = 1e-8;
inline constexpr double kDedupDistance = 1e-6;
inline constexpr double kSolutionTolerance = 1e-7;

Residual residual(const TcpInstance& inst, const VectorXd& x);
bool is_solution(const TcpInstance& inst, const VectorXd& x, double tol);
TcpSolution make_solution(const TcpInstance& inst, const VectorXd& x);

struct EnumerationResult {
  /// Distinct verified solutions, sorted lexicographically by x.
  std::vector<TcpSolution> solutions;
  /// Some face system was inconclusive.
  bool unknown = false;
  /// Some face carries a continuum of solutions; only representatives listed.
  bool continuum = false;
  int subsets_examined = 0;
};

/// Every face system of the orthant decomposition, collected. q = 0 returns
/// x = 0 alone. Orthant cones with n <= 12 only.
EnumerationResult solve_enumerate(const TcpInstance& inst, const SearchBudget& budget = {});

struct RefineResult {
  TcpSolution solution;
  bool converged = false;
  int iterations = 0;
  double merit = 0.0;  ///< |min(x, A x^{m-1} + q)|
};

inline constexpr double kRefineTolerance = 1e-9;

/// Semismooth Newton on the min-map min(x, A x^{m-1} + q) with an Armijo
/// line search. `converged` requires the residual triple to be within
/// kRefineTolerance. Orthant cones only.
RefineResult refine(const TcpInstance& inst, const VectorXd& x0, int iters = 100);

struct SolutionSetReport {
  double bounded_within = 0.0;  ///< largest solution norm found
  int count = 0;
  bool unknown = false;
  std::vector<TcpSolution> solutions;
};

/// Enumeration plus refinement from `samples` seeded random starts in [0, radius]^n.
SolutionSetReport solution_set_probe(const TcpInstance& inst, double radius, int samples, std::uint64_t seed,
                                     const SearchBudget& budget = {});

}  // namespace tcpkit
